"""Charts, frames, and pointwise frame data.

A chart is a named coordinate patch: coordinate names, a metric given as a
matrix of scalar expressions, and a set of frames.  A frame is a row matrix of
expressions, row i holding the coordinate components of the frame vector e_i;
the identity frame is always present under the name "coord".

Frame data at a point (frame Gram, its inverse, reciprocal rows, Lie
coefficients, frame-direction metric derivatives) is produced by evaluating
the defining expressions as jets, so the same code yields plain numbers or
first/second derivative information as needed by the derivative operators.

Lie coefficients follow the commutator of frame vector fields,

    [e_i, e_j] = (F_i^l d_l F_j^k - F_j^l d_l F_i^k) d/dx^k,
    L_ijk = [e_i, e_j] . e_k,

which vanish exactly on coordinate frames.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from . import expr as ex
from .errors import DimMismatch, FrameMismatch, SingularFrame, SingularGram
from .jets import mat_det_inv, value_of

_ORTHO_TOL = 1e-10
_HOLO_TOL = 1e-10


def _parse_matrix(rows, coords):
    out = []
    for row in rows:
        out.append(tuple(ex.parse(e, coords) if isinstance(e, str) else ex.as_expr(e)
                         for e in row))
    return tuple(out)


@dataclass(eq=False)
class Chart:
    """A coordinate patch with a metric and named frames.

    ``metric`` and frame rows accept expression text or Expr trees.
    ``contorsion`` is a sparse list of (i, j, k, expr) entries, 1-based,
    antisymmetric in (j, k); unspecified entries are zero.
    ``domain`` gives per-coordinate sampling bounds used by property suites.
    """

    name: str
    coords: tuple
    metric: tuple
    frames: dict = field(default_factory=dict)
    contorsion: tuple = ()
    orientation: int = 1
    domain: tuple = ()

    def __post_init__(self):
        self.coords = tuple(self.coords)
        n = len(self.coords)
        self.metric = _parse_matrix(self.metric, self.coords)
        if len(self.metric) != n or any(len(r) != n for r in self.metric):
            raise DimMismatch("metric must be n by n")
        frames = {}
        for fname, rows in self.frames.items():
            if isinstance(rows, str) and rows == "identity":
                continue
            frames[fname] = _parse_matrix(rows, self.coords)
            if len(frames[fname]) != n or any(len(r) != n for r in frames[fname]):
                raise DimMismatch(f"frame {fname!r} must be n by n")
        eye = tuple(tuple(ex.Num(1.0 if i == j else 0.0) for j in range(n))
                    for i in range(n))
        frames.setdefault("coord", eye)
        self.frames = frames
        cont = []
        for (i, j, k, e) in self.contorsion:
            cont.append((int(i), int(j), int(k),
                         ex.parse(e, self.coords) if isinstance(e, str) else ex.as_expr(e)))
        self.contorsion = tuple(cont)
        if not self.domain:
            self.domain = tuple((-1.0, 1.0) for _ in range(n))
        else:
            self.domain = tuple((float(a), float(b)) for a, b in self.domain)
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def n(self) -> int:
        return len(self.coords)

    def frame_rows(self, frame: str):
        try:
            return self.frames[frame]
        except KeyError:
            raise FrameMismatch(f"chart {self.name!r} has no frame {frame!r}") from None

    def parse(self, text):
        return ex.parse(text, self.coords) if isinstance(text, str) else ex.as_expr(text)


@dataclass
class FrameAt:
    """Numeric frame data at a single point."""

    chart: Chart
    frame: str
    point: tuple
    rows: np.ndarray          # F[i, k]: coordinate components of e_i
    gram: np.ndarray          # g_ij = e_i . e_j
    gram_inv: np.ndarray
    reciprocal: np.ndarray    # coordinate components of e^i
    lie: np.ndarray           # L[i, j, k] = [e_i, e_j] . e_k
    dgram: np.ndarray         # dgram[i, j, k] = directional derivative of g_jk along e_i


class FrameJets:
    """Frame data with jet-valued entries (internal work object).

    ``order`` is the derivative order carried by F, the coordinate metric and
    the frame Gram; bracket data (lie, dgram) sits one order lower.
    """

    __slots__ = ("chart", "frame", "point", "order", "F", "g_coord", "gram",
                 "gram_inv", "lie", "dgram", "det_gram")

    def __init__(self, chart, frame, point, order, F, g_coord, gram, gram_inv,
                 lie, dgram, det_gram):
        self.chart = chart
        self.frame = frame
        self.point = point
        self.order = order
        self.F = F
        self.g_coord = g_coord
        self.gram = gram
        self.gram_inv = gram_inv
        self.lie = lie
        self.dgram = dgram
        self.det_gram = det_gram


@lru_cache(maxsize=8192)
def frame_jets(chart: Chart, frame: str, point: tuple, order: int) -> FrameJets:
    """Evaluate frame and metric data as jets of the given order at ``point``.

    Lie coefficients and frame-direction metric derivatives consume one
    derivative, so requesting them at order d needs d+1 <= 2; they are only
    filled for order <= 1.
    """
    n = chart.n
    ex.check_point(point, n)
    rows = chart.frame_rows(frame)
    F = [[ex.eval_jet(rows[i][k], point, order) for k in range(n)] for i in range(n)]
    g_coord = [[ex.eval_jet(chart.metric[i][j], point, order) for j in range(n)]
               for i in range(n)]

    fvals = np.array([[value_of(F[i][k]) for k in range(n)] for i in range(n)])
    scale = max(1.0, float(np.max(np.abs(fvals))))
    if abs(np.linalg.det(fvals)) < 1e-12 * scale ** n:
        raise SingularFrame(f"frame {frame!r} is degenerate at {point}")

    gram = [[_sym_dot(F[i], F[j], g_coord) for j in range(n)] for i in range(n)]
    try:
        det_gram, gram_inv = mat_det_inv(gram)
    except Exception as exc:
        raise SingularGram(f"frame Gram is singular at {point}") from exc
    if abs(value_of(det_gram)) < 1e-12:
        raise SingularGram(f"frame Gram is singular at {point}")

    lie = None
    dgram = None
    if order >= 1:
        lie = _lie_coefficients(F, g_coord, n)
        dgram = [[[_dir_deriv(F[i], gram[j][k]) for k in range(n)]
                  for j in range(n)] for i in range(n)]
    return FrameJets(chart, frame, point, order, F, g_coord, gram, gram_inv,
                     lie, dgram, det_gram)


def _sym_dot(row_a, row_b, g):
    n = len(row_a)
    s = 0.0
    for l in range(n):
        for m in range(n):
            s = s + row_a[l] * g[l][m] * row_b[m]
    return s


def _dir_deriv(frame_row, scalar_jet):
    """Directional derivative along a frame row; drops one jet order."""
    n = len(frame_row)
    s = 0.0
    for k in range(n):
        s = s + frame_row[k] * scalar_jet.partial(k)
    return s


def _lie_coefficients(F, g_coord, n):
    """L[i][j][k], one jet order below the frame data."""
    # coordinate components of [e_i, e_j]
    bracket = [[[0.0] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            for k in range(n):
                s = 0.0
                for l in range(n):
                    s = s + F[i][l] * F[j][k].partial(l) - F[j][l] * F[i][k].partial(l)
                bracket[i][j][k] = s
    out = [[[0.0] * n for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            for k in range(n):
                s = 0.0
                for m in range(n):
                    for l in range(n):
                        s = s + bracket[i][j][m] * g_coord[m][l] * F[k][l]
                out[i][j][k] = s
    return out


def _values(mat):
    return np.array([[value_of(c) for c in row] for row in mat])


def eval_frame(chart: Chart, frame: str, point) -> FrameAt:
    """Numeric frame data at a point (Gram, reciprocal rows, Lie coefficients)."""
    point = tuple(float(p) for p in point)
    fj = frame_jets(chart, frame, point, 1)
    F = _values(fj.F)
    gram = _values(fj.gram)
    gram = (gram + gram.T) / 2.0
    gram_inv = _values(fj.gram_inv)
    reciprocal = gram_inv @ F
    n = chart.n
    lie = np.array([[[value_of(fj.lie[i][j][k]) for k in range(n)]
                     for j in range(n)] for i in range(n)])
    dgram = np.array([[[value_of(fj.dgram[i][j][k]) for k in range(n)]
                       for j in range(n)] for i in range(n)])
    return FrameAt(chart, frame, point, F, gram, gram_inv, reciprocal, lie, dgram)


def classify_frame(frame_at: FrameAt) -> dict:
    """Orthonormality (with signature flags) and holonomicity at the point."""
    g = frame_at.gram
    n = g.shape[0]
    off = float(np.max(np.abs(g - np.diag(np.diag(g))))) if n > 1 else 0.0
    unit = float(np.max(np.abs(np.abs(np.diag(g)) - 1.0)))
    orthonormal = off < _ORTHO_TOL and unit < _ORTHO_TOL
    eta = tuple(int(np.sign(g[i, i])) for i in range(n)) if orthonormal else None
    holonomic = float(np.max(np.abs(frame_at.lie))) < _HOLO_TOL
    return {"orthonormal": orthonormal, "holonomic": holonomic, "signature": eta}


def dirderiv_scalar(chart: Chart, frame_at: FrameAt, a, phi) -> float:
    """Directional derivative along a = a^i e_i of a scalar expression."""
    phi = chart.parse(phi)
    jet = ex.eval_jet(phi, frame_at.point, 1)
    n = chart.n
    total = 0.0
    for i in range(n):
        ai = float(a[i])
        if ai == 0.0:
            continue
        for k in range(n):
            total += ai * frame_at.rows[i, k] * jet.grad[k]
    return total


def lie_bracket(chart: Chart, field_a, field_b, point) -> np.ndarray:
    """[a, b] for vector fields given by coordinate-frame component expressions."""
    point = tuple(float(p) for p in point)
    n = chart.n
    ex.check_point(point, n)
    a = [ex.eval_jet(chart.parse(c), point, 1) for c in field_a]
    b = [ex.eval_jet(chart.parse(c), point, 1) for c in field_b]
    if len(a) != n or len(b) != n:
        raise DimMismatch("vector fields must have n components")
    out = np.zeros(n)
    for k in range(n):
        s = 0.0
        for l in range(n):
            s += a[l].value * b[k].grad[l] - b[l].value * a[k].grad[l]
        out[k] = s
    return out


def sample_point(chart: Chart, rng) -> tuple:
    """Uniform random point inside the chart's sampling box."""
    return tuple(float(rng.uniform(lo, hi)) for lo, hi in chart.domain)


def gradient_basis(chart: Chart, point) -> np.ndarray:
    """Rows are the coordinate components of the gradient vectors dx^i = g^{ij} e(x_j)."""
    point = tuple(float(p) for p in point)
    fj = frame_jets(chart, "coord", point, 0)
    return _values(fj.gram_inv)


@dataclass(frozen=True)
class MultivectorField:
    """A multivector field: blade components (expressions) over a named frame.

    Primitive fields can supply value, gradient and Hessian data for their
    components, so two derivative operators may be stacked on top of them.
    """

    frame: str
    components: dict

    @property
    def budget(self) -> int:
        return 2

    @staticmethod
    def parse(chart: Chart, components: dict, frame: str = "coord") -> "MultivectorField":
        from . import blades as bl
        comps = {}
        for key, e in components.items():
            mask = bl.mask_from_key(key) if isinstance(key, str) else int(key)
            comps[mask] = chart.parse(e)
        return MultivectorField(frame, comps)

    @staticmethod
    def scalar(chart: Chart, text, frame: str = "coord") -> "MultivectorField":
        return MultivectorField(frame, {0: chart.parse(text)})

    @staticmethod
    def vector(chart: Chart, comps, frame: str = "coord") -> "MultivectorField":
        return MultivectorField(frame, {1 << i: chart.parse(c)
                                        for i, c in enumerate(comps)})
