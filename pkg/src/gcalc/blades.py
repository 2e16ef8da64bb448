"""Bitmask blade arithmetic.

A basis blade over n frame vectors is a bitmask: bit i set means frame vector
i+1 participates, indices ascending.  A multivector is a dict mapping masks to
coefficients.  Coefficients may be floats or :class:`gcalc.jets.Jet` objects;
every routine here is written against plain ring arithmetic so the same code
paths serve numeric evaluation and jet-valued evaluation.

The geometric product for an arbitrary (symmetric, possibly indefinite) Gram
matrix is computed by grade recursion on the left factor,

    E_J B = e_j (E_J' B) - (e_j . E_J') B        with E_J = e_j ^ E_J',

which bottoms out in the two vector-level primitives: the contraction of a
vector into a blade and the metric-free wedge.  Serialization uses 1-based
comma-joined index keys: "" for the scalar slot, "1", "1,3", ...
"""

from __future__ import annotations


def grade_of(mask: int) -> int:
    return mask.bit_count()


def indices_of(mask: int):
    """0-based ascending indices in the blade."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(indices0) -> int:
    m = 0
    for i in indices0:
        m |= 1 << i
    return m


def key_of(mask: int) -> str:
    return ",".join(str(i + 1) for i in indices_of(mask))


def mask_from_key(key: str) -> int:
    key = key.strip()
    if not key:
        return 0
    m = 0
    last = 0
    for part in key.split(","):
        i = int(part)
        if i <= last:
            raise ValueError(f"blade key {key!r}: indices must be ascending and 1-based")
        last = i
        m |= 1 << (i - 1)
    return m


def merge_sign(a: int, b: int) -> int:
    """Parity sign from interleaving the basis string of a with that of b."""
    swaps = 0
    a >>= 1
    while a:
        swaps += (a & b).bit_count()
        a >>= 1
    return -1 if swaps & 1 else 1


def wedge_blades(a: int, b: int):
    """e_a ^ e_b -> (sign, mask) or None when the blades share a vector."""
    if a & b:
        return None
    return merge_sign(a, b), a | b


def substitute(mask: int, pos: int, new_index: int):
    """Replace the pos-th vector of the blade with e_{new_index}, resorted.

    Returns (sign, mask) or None if the substitution repeats a vector.
    """
    idx = indices_of(mask)
    rest = mask & ~(1 << idx[pos])
    if rest & (1 << new_index):
        return None
    below = (rest & ((1 << new_index) - 1)).bit_count()
    sign = -1 if (pos + below) & 1 else 1
    return sign, rest | (1 << new_index)


def add_into(dst: dict, src: dict, scale=1.0) -> dict:
    for m, c in src.items():
        cur = dst.get(m)
        dst[m] = c * scale if cur is None else cur + c * scale
    return dst


def scale_mv(mv: dict, s) -> dict:
    return {m: c * s for m, c in mv.items()}


def prune(mv: dict, tol: float = 0.0) -> dict:
    """Drop exact (or below-tol) zero float coefficients; jets are kept."""
    return {m: c for m, c in mv.items()
            if not (isinstance(c, (int, float)) and abs(c) <= tol)}


def grade_select(mv: dict, k: int) -> dict:
    return {m: c for m, c in mv.items() if m.bit_count() == k}


def vector_dot_blade(comps, mask: int, gram) -> dict:
    """a . E_J for a vector a with components ``comps`` (grade lowers by 1)."""
    out: dict = {}
    idx = indices_of(mask)
    n = len(comps)
    for pos, j in enumerate(idx):
        s = 0.0
        for l in range(n):
            c = comps[l]
            if isinstance(c, (int, float)) and c == 0.0:
                continue
            s = s + c * gram[l][j]
        if isinstance(s, (int, float)) and s == 0.0:
            continue
        if pos & 1:
            s = -s
        rem = mask & ~(1 << j)
        cur = out.get(rem)
        out[rem] = s if cur is None else cur + s
    return out


def vector_wedge_mv(comps, mv: dict) -> dict:
    out: dict = {}
    for m, c in mv.items():
        for l, a in enumerate(comps):
            if isinstance(a, (int, float)) and a == 0.0:
                continue
            w = wedge_blades(1 << l, m)
            if w is None:
                continue
            sign, res = w
            term = a * c if sign > 0 else -(a * c)
            cur = out.get(res)
            out[res] = term if cur is None else cur + term
    return out


def vector_gp_mv(comps, mv: dict, gram) -> dict:
    """Geometric product (vector) * (multivector) over an arbitrary Gram."""
    out: dict = {}
    for m, c in mv.items():
        if m:
            for rem, s in vector_dot_blade(comps, m, gram).items():
                term = s * c
                cur = out.get(rem)
                out[rem] = term if cur is None else cur + term
    add_into(out, vector_wedge_mv(comps, mv))
    return out


def _basis_vector_comps(l: int, n: int):
    return [1.0 if i == l else 0.0 for i in range(n)]


def gp_blade_mv(mask: int, mv: dict, gram, n: int) -> dict:
    """E_mask * mv by grade recursion on the left blade."""
    if mask == 0:
        return dict(mv)
    idx = indices_of(mask)
    lead = idx[0]
    comps = _basis_vector_comps(lead, n)
    if len(idx) == 1:
        return vector_gp_mv(comps, mv, gram)
    rest = mask & ~(1 << lead)
    out = vector_gp_mv(comps, gp_blade_mv(rest, mv, gram, n), gram)
    correction = vector_dot_blade(comps, rest, gram)
    for m2, c2 in correction.items():
        sub = gp_blade_mv(m2, mv, gram, n) if m2 else dict(mv)
        add_into(out, sub, -c2)
    return out


def gp_generic(A: dict, B: dict, gram, n: int) -> dict:
    """Geometric product of two multivectors over an arbitrary Gram matrix."""
    out: dict = {}
    for mask, coeff in A.items():
        part = gp_blade_mv(mask, B, gram, n)
        add_into(out, part, coeff)
    return out


def wedge_generic(A: dict, B: dict) -> dict:
    out: dict = {}
    for ma, ca in A.items():
        for mb, cb in B.items():
            w = wedge_blades(ma, mb)
            if w is None:
                continue
            sign, m = w
            term = ca * cb if sign > 0 else -(ca * cb)
            cur = out.get(m)
            out[m] = term if cur is None else cur + term
    return out


def dot_generic(A: dict, B: dict, gram, n: int) -> dict:
    """Grade-projected product <A_j B_k>_{k-j}, summed over pure-grade parts."""
    out: dict = {}
    by_grade_a: dict = {}
    for m, c in A.items():
        by_grade_a.setdefault(m.bit_count(), {})[m] = c
    by_grade_b: dict = {}
    for m, c in B.items():
        by_grade_b.setdefault(m.bit_count(), {})[m] = c
    for j, Aj in by_grade_a.items():
        for k, Bk in by_grade_b.items():
            if j > k:
                continue
            prod = gp_generic(Aj, Bk, gram, n)
            add_into(out, grade_select(prod, k - j))
    return out


def transform_components(M, comps: dict, n: int, det_fn) -> dict:
    """Outermorphism action on blade components.

    If old basis vectors expand in the new basis as old_i = sum_k M[i][k] new_k,
    vector components map as new^k = sum_i M[i][k] old^i, and blade components
    pick up minors: new^K = sum_J det(M[J;K]) old^J (rows J, columns K).
    ``det_fn`` computes the determinant of a small nested-list matrix, so the
    same routine serves float and jet matrices.
    """
    out: dict = {}
    for mask, coeff in comps.items():
        if isinstance(coeff, (int, float)) and coeff == 0.0:
            continue
        if mask == 0:
            cur = out.get(0)
            out[0] = coeff if cur is None else cur + coeff
            continue
        rows = indices_of(mask)
        k = len(rows)
        for target in _masks_of_grade(n, k):
            cols = indices_of(target)
            sub = [[M[r][c] for c in cols] for r in rows]
            d = det_fn(sub)
            if isinstance(d, (int, float)) and d == 0.0:
                continue
            term = coeff * d
            cur = out.get(target)
            out[target] = term if cur is None else cur + term
    return out


def _masks_of_grade(n: int, k: int):
    masks = _GRADE_MASKS.get((n, k))
    if masks is None:
        masks = [m for m in range(1 << n) if m.bit_count() == k]
        _GRADE_MASKS[(n, k)] = masks
    return masks


_GRADE_MASKS: dict = {}


def diag_gp_blades(a: int, b: int, lam):
    """Product of two blades under a diagonal metric with entries ``lam``."""
    sign = merge_sign(a, b)
    coeff = float(sign)
    common = a & b
    i = 0
    while common:
        if common & 1:
            coeff *= lam[i]
        common >>= 1
        i += 1
    return coeff, a ^ b
