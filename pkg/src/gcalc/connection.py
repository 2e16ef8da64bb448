"""Metric-compatible connections in arbitrary frames.

The Levi-Civita coefficients come from the standard form

    Gbar_ijk = (dg_i g_jk - dg_k g_ij + dg_j g_ki)/2
             + (L_ijk - L_jki + L_kij)/2,

with dg_i the directional derivative along frame vector e_i and L the Lie
coefficients.  A metric-compatible connection is then Gamma = Gbar + chi for
any contorsion chi antisymmetric in its last two slots.

Coefficients are evaluated on jet-valued frame data, so the same formula
yields values or first derivatives as needed by nested derivative operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import expr as ex
from .errors import FrameMismatch, InvalidContorsion
from .jets import value_of
from .manifold import Chart, FrameAt, MultivectorField, eval_frame, frame_jets

_CHI_TOL = 1e-10


@dataclass(frozen=True)
class ConnSpec:
    """A connection named by chart, frame, and contorsion expressions.

    Hashable so jet evaluations can be cached per (spec, point, order).
    """

    chart: Chart
    frame: str
    chi: tuple  # ((i, j, k, Expr), ...) with 1-based indices

    @property
    def n(self) -> int:
        return self.chart.n


def _normalize_chi(chart: Chart, chi) -> tuple:
    if chi is None:
        return tuple(chart.contorsion)
    out = []
    for (i, j, k, e) in chi:
        out.append((int(i), int(j), int(k), chart.parse(e)))
    return tuple(out)


def conn_spec(chart: Chart, frame: str, chi=None) -> ConnSpec:
    """Connection spec; chi=None takes the chart's contorsion, () is Levi-Civita."""
    chart.frame_rows(frame)
    return ConnSpec(chart, frame, _normalize_chi(chart, chi))


def levi_civita(chart: Chart, frame: str) -> ConnSpec:
    return conn_spec(chart, frame, ())


class GammaJets:
    """Connection coefficients as jets at one point (internal work object)."""

    __slots__ = ("spec", "point", "order", "frame", "gammabar", "chi", "gamma",
                 "mixed")

    def __init__(self, spec, point, order, frame, gammabar, chi, gamma, mixed):
        self.spec = spec
        self.point = point
        self.order = order
        self.frame = frame          # FrameJets at order + 1
        self.gammabar = gammabar    # [i][j][k], jets at order
        self.chi = chi
        self.gamma = gamma
        self.mixed = mixed          # [i][j][l] = sum_k gamma_ijk g^{kl}


@lru_cache(maxsize=8192)
def gamma_jets(spec: ConnSpec, point: tuple, order: int) -> GammaJets:
    """Evaluate Gbar, chi, Gamma and the mixed coefficients as jets."""
    n = spec.n
    fj = frame_jets(spec.chart, spec.frame, point, order + 1)
    dg, lie = fj.dgram, fj.lie

    gammabar = [[[0.0] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                gammabar[i][j][k] = (
                    (dg[i][j][k] - dg[k][i][j] + dg[j][k][i]) * 0.5
                    + (lie[i][j][k] - lie[j][k][i] + lie[k][i][j]) * 0.5)

    chi = [[[0.0] * n for _ in range(n)] for _ in range(n)]
    for (i, j, k, e) in spec.chi:
        if not (1 <= i <= n and 1 <= j <= n and 1 <= k <= n):
            raise InvalidContorsion(f"contorsion index ({i},{j},{k}) out of range")
        jet = ex.eval_jet(e, point, order)
        chi[i - 1][j - 1][k - 1] = chi[i - 1][j - 1][k - 1] + jet
    scale = max([1.0] + [abs(value_of(chi[i][j][k]))
                         for i in range(n) for j in range(n) for k in range(n)])
    for i in range(n):
        for j in range(n):
            for k in range(n):
                dev = abs(value_of(chi[i][j][k]) + value_of(chi[i][k][j]))
                if dev > _CHI_TOL * scale:
                    raise InvalidContorsion(
                        f"contorsion antisymmetry violated at entry "
                        f"({i + 1},{j + 1},{k + 1}): deviation {dev:.3e}")

    gamma = [[[gammabar[i][j][k] + chi[i][j][k] for k in range(n)]
              for j in range(n)] for i in range(n)]
    mixed = [[[_dot_row(gamma[i][j], [fj.gram_inv[k][l] for k in range(n)])
               for l in range(n)] for j in range(n)] for i in range(n)]
    return GammaJets(spec, point, order, fj, gammabar, chi, gamma, mixed)


def _dot_row(a, b):
    s = 0.0
    for x, y in zip(a, b):
        s = s + x * y
    return s


def _values3(arr, n):
    return np.array([[[value_of(arr[i][j][k]) for k in range(n)]
                      for j in range(n)] for i in range(n)])


@dataclass
class ConnectionAt:
    """Numeric connection coefficients at a point."""

    spec: ConnSpec
    point: tuple
    frame_at: FrameAt
    gammabar: np.ndarray
    chi: np.ndarray
    gamma: np.ndarray

    @property
    def chart(self) -> Chart:
        return self.spec.chart

    @property
    def frame(self) -> str:
        return self.spec.frame


def connection_at(chart: Chart, frame: str, point, chi=None) -> ConnectionAt:
    """Connection coefficients at a point; chi defaults to the chart's."""
    point = tuple(float(p) for p in point)
    spec = conn_spec(chart, frame, chi)
    gj = gamma_jets(spec, point, 0)
    n = chart.n
    return ConnectionAt(spec, point, eval_frame(chart, frame, point),
                        _values3(gj.gammabar, n), _values3(gj.chi, n),
                        _values3(gj.gamma, n))


def mixed_gamma(conn: ConnectionAt) -> np.ndarray:
    """Gamma_ij^k = Gamma_ijm g^{mk}: D_{e_i} e_j = Gamma_ij^k e_k."""
    return np.einsum("ijm,mk->ijk", conn.gamma, conn.frame_at.gram_inv)


def reciprocal_gamma(conn: ConnectionAt) -> np.ndarray:
    """rg[i, j, l]: D_{e_i} e^j = rg[i, j, l] e^l = -(Gamma_ilm g^{mj}) e^l."""
    return -np.einsum("ilm,mj->ijl", conn.gamma, conn.frame_at.gram_inv)


def torsion(chart: Chart, frame: str, field_a, field_b, point, chi=None) -> np.ndarray:
    """tau(a, b) = D_a b - D_b a - [a, b], in frame components.

    ``field_a``/``field_b`` are sequences of n frame-component expressions.
    """
    from . import mdd as _mdd

    point = tuple(float(p) for p in point)
    spec = conn_spec(chart, frame, chi)
    n = chart.n
    fa = MultivectorField.vector(chart, field_a, frame)
    fb = MultivectorField.vector(chart, field_b, frame)

    a_jets = [ex.eval_jet(fa.components.get(1 << i, ex.Num(0.0)), point, 1)
              for i in range(n)]
    b_jets = [ex.eval_jet(fb.components.get(1 << i, ex.Num(0.0)), point, 1)
              for i in range(n)]
    a_vals = [j.value for j in a_jets]
    b_vals = [j.value for j in b_jets]

    dab = _mdd.mdd(spec, a_vals, fb, point)
    dba = _mdd.mdd(spec, b_vals, fa, point)

    # [a, b] via coordinate components a_coord^k = a^i F_i^k
    fj = frame_jets(chart, frame, point, 1)
    a_coord = [sum((a_jets[i] * fj.F[i][k] for i in range(n)), start=0.0)
               for k in range(n)]
    b_coord = [sum((b_jets[i] * fj.F[i][k] for i in range(n)), start=0.0)
               for k in range(n)]
    bracket = np.zeros(n)
    for k in range(n):
        bracket[k] = sum(value_of(a_coord[l]) * b_coord[k].grad[l]
                         - value_of(b_coord[l]) * a_coord[k].grad[l]
                         for l in range(n))
    F = np.array([[value_of(fj.F[i][k]) for k in range(n)] for i in range(n)])
    bracket_frame = np.linalg.solve(F.T, bracket)

    out = np.zeros(n)
    for i in range(n):
        out[i] = dab.coeffs.get(1 << i, 0.0) - dba.coeffs.get(1 << i, 0.0) \
            - bracket_frame[i]
    return out


def contorsion_apply(conn_d: ConnSpec, conn_nabla: ConnSpec, a, field, point):
    """Q_a(field) = D_a field - nabla_a field for two connections on one frame."""
    from . import mdd as _mdd

    if (conn_d.chart is not conn_nabla.chart) or conn_d.frame != conn_nabla.frame:
        raise FrameMismatch("contorsion operator needs both connections on the "
                            "same chart and frame")
    point = tuple(float(p) for p in point)
    da = _mdd.mdd(conn_d, a, field, point)
    na = _mdd.mdd(conn_nabla, a, field, point)
    return da - na
