"""Field strength and source current from a vector potential.

Minkowski chart, signature (+,-,-,-), coordinates (t, x, y, z).
The potential A = (x^2/2) dy is static and magnetic; its field
strength is F = x dx^dy and its source is the constant unit current
in the y direction.  Same computation as

    gcalc maxwell --potential "3:x^2/2"
"""

import numpy as np

from gcalc.connection import levi_civita
from gcalc.manifest import builtin
from gcalc.manifold import MultivectorField, sample_point
from gcalc.mdd import curl, curl_field, divergence, eval_field

chart = builtin("minkowski4").chart
spec = levi_civita(chart, "coord")

# Covariant component A_y = x^2/2 lowers to the vector component
# A^y = -x^2/2 through the metric sign.
A = MultivectorField.parse(chart, {"3": "-x^2/2"})

F = curl_field(spec, A)

for x in (0.25, 0.5, 1.0):
    p = (0.0, x, 0.0, 0.0)
    print(f"x = {x}: F =", eval_field(F, p).to_blade_map())

# Half of the field equations: the curl of F vanishes identically.
rng = np.random.default_rng(11)
worst = 0.0
for _ in range(50):
    p = sample_point(chart, rng)
    worst = max(worst, curl(spec, F, p).norm_inf())
print("\nmax |curl F| over 50 random points:", worst)

# The other half: the divergence of F is the current density.
p = (0.2, -0.7, 0.4, 0.1)
print("div F at", p, "=", divergence(spec, F, p).to_blade_map())
print("expected: unit vector along y, independent of the point")
