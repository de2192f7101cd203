"""Rank-2 integer lattice automorphisms: Dehn twists, form stabilizers,
and bounded double-coset enumeration.

Conventions fixed here for the whole package:
  * the intersection form on Z^2 has <e1, e2> = +1, i.e.
    <u, v> = u1*v2 - u2*v1;
  * matrices act on column vectors, forms pull back as A^T G A;
  * the stabilizer of a form is taken inside GL(2, Z) (both determinant
    signs), so coset classes match brute-force closure under all
    form-preserving unimodular matrices together with -I.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .errors import (
    DimensionError,
    InvalidSlopeError,
    PreconditionError,
    UnsupportedError,
)
from .exact_lattice import (
    QForm,
    floor_sqrt,
    frac,
    mat,
    mat_det,
    mat_mul,
    short_vectors,
    transpose,
)

# ---------------------------------------------------------------------------
# 2x2 integer matrices


def m2(a, b, c, d):
    return ((int(a), int(b)), (int(c), int(d)))


M2_NEG = m2(-1, 0, 0, -1)
M2_SWAP = m2(0, 1, 1, 0)


def m2_mul(x, y):
    return (
        (
            x[0][0] * y[0][0] + x[0][1] * y[1][0],
            x[0][0] * y[0][1] + x[0][1] * y[1][1],
        ),
        (
            x[1][0] * y[0][0] + x[1][1] * y[1][0],
            x[1][0] * y[0][1] + x[1][1] * y[1][1],
        ),
    )


def m2_det(x):
    return x[0][0] * x[1][1] - x[0][1] * x[1][0]


def m2_inv_unimodular(x):
    d = m2_det(x)
    if d == 1:
        return ((x[1][1], -x[0][1]), (-x[1][0], x[0][0]))
    if d == -1:
        return ((-x[1][1], x[0][1]), (x[1][0], -x[0][0]))
    raise PreconditionError("matrix is not unimodular")


def m2_vec(x, v):
    return (x[0][0] * v[0] + x[0][1] * v[1], x[1][0] * v[0] + x[1][1] * v[1])


@dataclass(frozen=True)
class TorusAuto:
    """Automorphism of H_1 of a torus: a 2x2 integer matrix of det +-1."""

    matrix: tuple
    det: int = None

    def __post_init__(self):
        mtx = tuple(tuple(int(x) for x in row) for row in self.matrix)
        object.__setattr__(self, "matrix", mtx)
        d = m2_det(mtx)
        if abs(d) != 1:
            raise PreconditionError(f"determinant {d} is not +-1")
        if self.det is not None and self.det != d:
            raise PreconditionError("cached determinant disagrees with the matrix")
        object.__setattr__(self, "det", d)

    def inverse(self) -> "TorusAuto":
        return TorusAuto(m2_inv_unimodular(self.matrix))

    def __mul__(self, other) -> "TorusAuto":
        return TorusAuto(m2_mul(self.matrix, other.matrix))

    def apply(self, v):
        return m2_vec(self.matrix, v)


def dehn_twist(gamma) -> TorusAuto:
    """Right-handed twist along a primitive slope: v -> v + <v, gamma> gamma.

    The matrix is even in gamma, so the two directions of the slope give
    the same twist.
    """
    g = (int(gamma[0]), int(gamma[1]))
    if gcd(g[0], g[1]) != 1:
        raise InvalidSlopeError(f"slope {g} is not primitive")
    # I + outer(gamma, (g2, -g1))
    return TorusAuto(
        (
            (1 + g[0] * g[1], -g[0] * g[0]),
            (g[1] * g[1], 1 - g[0] * g[1]),
        )
    )


def pullback_form(q: QForm, a: TorusAuto) -> QForm:
    """The composition q o a, with Gram A^T G A."""
    if q.rank != 2:
        raise DimensionError("pullback is implemented for rank-2 forms")
    g = mat_mul(mat_mul(transpose(a.matrix), q.gram), a.matrix)
    return QForm(2, g)


def is_stabilized(q: QForm, a: TorusAuto) -> bool:
    return pullback_form(q, a).gram == q.gram


def twisted_sum_gram(q: QForm, qp: QForm, sigma: TorusAuto):
    """Gram of (q o sigma) + qp."""
    g = mat_mul(mat_mul(transpose(sigma.matrix), q.gram), sigma.matrix)
    return tuple(
        tuple(g[i][j] + qp.gram[i][j] for j in range(2)) for i in range(2)
    )


def twisted_sum_delta(q: QForm, qp: QForm, sigma: TorusAuto) -> Fraction:
    return mat_det(twisted_sum_gram(q, qp, sigma))


# ---------------------------------------------------------------------------
# stabilizers


def _complete_primitive(v):
    """Deterministic w with <w, v> ... actually det [[v],[w]] handling below."""
    g, x, y = _xgcd(v[0], v[1])
    assert g == 1
    # (x, y) satisfies v0*x + v1*y = 1; row (-y, x) has cross v0*x + v1*y = 1
    return (-y, x)


def _xgcd(a, b):
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        qq = old_r // r
        old_r, r = r, old_r - qq * r
        old_s, s = s, old_s - qq * s
        old_t, t = t, old_t - qq * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def kernel_slope(q: QForm):
    """Primitive integer kernel vector of a rank-2 form with 1-dim kernel."""
    if q.kernel_rank != 1:
        raise PreconditionError("form does not have a one-dimensional kernel")
    return q.kernel_basis[0]


def stabilizer_generators(q: QForm) -> list:
    """Generators of the full GL(2, Z) stabilizer of the form.

    Kernel rank 1: {-I, twist along the kernel slope, reflection fixing a
    complement and negating the kernel}.  Kernel rank 0: the whole finite
    orthogonal group, found by matching columns among short vectors.
    Kernel rank 2 (the zero form) is unsupported: its stabilizer is all
    of GL(2, Z).
    """
    if q.rank != 2:
        raise DimensionError("stabilizers are implemented for rank-2 forms")
    if q.kernel_rank == 2:
        raise UnsupportedError("the zero form has the whole GL(2, Z) as stabilizer")
    if q.kernel_rank == 1:
        gamma = kernel_slope(q)
        w = _complete_primitive(gamma)
        # reflection: gamma -> -gamma, w -> w  (basis change is unimodular)
        p = ((gamma[0], w[0]), (gamma[1], w[1]))
        refl = m2_mul(m2_mul(p, m2(-1, 0, 0, 1)), m2_inv_unimodular(p))
        return [TorusAuto(M2_NEG), dehn_twist(gamma), TorusAuto(refl)]
    return [TorusAuto(g) for g in _finite_orthogonal_group(q)]


def _finite_orthogonal_group(q: QForm):
    """All unimodular matrices preserving a positive-definite rank-2 form."""
    cap = max(q.gram[0][0], q.gram[1][1])
    vecs = [v for v, _ in short_vectors(q, cap, strict=False)]
    cols1 = [v for v in vecs if q.value(v) == q.gram[0][0]]
    cols2 = [v for v in vecs if q.value(v) == q.gram[1][1]]
    found = set()
    target_b = q.gram[0][1]
    for u in cols1:
        for su in (u, (-u[0], -u[1])):
            for v in cols2:
                for sv in (v, (-v[0], -v[1])):
                    mtx = ((su[0], sv[0]), (su[1], sv[1]))
                    if abs(m2_det(mtx)) != 1:
                        continue
                    if q.bilinear(su, sv) == target_b:
                        found.add(mtx)
    return sorted(found)


def stabilizer_group(q: QForm):
    """The finite stabilizer of a positive-definite rank-2 form, as a list."""
    if q.kernel_rank != 0:
        raise PreconditionError("only definite forms have finite stabilizers")
    return [TorusAuto(g) for g in _finite_orthogonal_group(q)]


def _stabilizer_families(q: QForm):
    """Kernel-rank-1 stabilizer as four affine families A + k*B over k in Z.

    In a basis (gamma, w) the stabilizer is {diag(e1, e2) * upper-twist^k};
    conjugating back gives integral affine families in the standard basis.
    """
    gamma = kernel_slope(q)
    w = _complete_primitive(gamma)
    p = ((gamma[0], w[0]), (gamma[1], w[1]))
    pinv = m2_inv_unimodular(p)
    fams = []
    shift = m2(0, 1, 0, 0)
    for e1 in (1, -1):
        for e2 in (1, -1):
            a = m2_mul(m2_mul(p, m2(e1, 0, 0, e2)), pinv)
            b = m2_mul(m2_mul(p, shift), pinv)
            fams.append((a, b))
    return fams


# ---------------------------------------------------------------------------
# double cosets


@dataclass(frozen=True)
class DoubleCosetRep:
    """One representative (det +1) of a double coset, with its discriminant."""

    rep: TorusAuto
    delta: Fraction

    def __post_init__(self):
        if self.rep.det != 1:
            raise PreconditionError("coset representatives must have det +1")
        if frac(self.delta) <= 0:
            raise PreconditionError("coset discriminant must be positive")
        object.__setattr__(self, "delta", frac(self.delta))


class CosetRepList(list):
    """List of DoubleCosetRep with the search-bound derivation attached."""

    def __init__(self, reps, derivation):
        super().__init__(reps)
        self.derivation = list(derivation)


def _solve_int_quadratic(a: Fraction, b: Fraction, c: Fraction):
    """Integer solutions of a k^2 + b k + c = 0; None means 'all integers'."""
    if a == 0 and b == 0:
        return None if c == 0 else []
    if a == 0:
        k = -c / b
        return [int(k)] if k.denominator == 1 else []
    disc = b * b - 4 * a * c
    if disc < 0:
        return []
    s = floor_sqrt(disc)
    roots = []
    if Fraction(s * s) == disc:
        for sign in (1, -1):
            k = (-b + sign * s) / (2 * a)
            if k.denominator == 1:
                roots.append(int(k))
    return sorted(set(roots))


def same_double_coset(q: QForm, qp: QForm, s1: TorusAuto, s2: TorusAuto) -> bool:
    """Decide s2 in Stab(q) * s1 * Stab(qp), exactly.

    Equivalent to: exists t' in Stab(qp) with q o (s1 t' s2^{-1}) = q.
    For a definite qp the stabilizer is finite; for kernel rank 1 it is
    four affine twist families and membership reduces to integer roots of
    per-entry quadratics.
    """
    s2inv = s2.inverse()

    def in_left_stab(mtx):
        t = TorusAuto(mtx)
        return is_stabilized(q, t)

    if qp.kernel_rank == 0:
        for tp in _finite_orthogonal_group(qp):
            if in_left_stab(m2_mul(m2_mul(s1.matrix, tp), s2inv.matrix)):
                return True
        return False
    if qp.kernel_rank == 1:
        for a0, b0 in _stabilizer_families(qp):
            a = m2_mul(m2_mul(s1.matrix, a0), s2inv.matrix)
            b = m2_mul(m2_mul(s1.matrix, b0), s2inv.matrix)
            # Gram of q o (a + k b) equals q: per-entry quadratics in k
            amat, bmat = mat(a), mat(b)
            ga = mat_mul(mat_mul(transpose(amat), q.gram), amat)
            gb = mat_mul(mat_mul(transpose(bmat), q.gram), bmat)
            gab = mat_mul(mat_mul(transpose(amat), q.gram), bmat)
            candidates = None
            impossible = False
            for i in range(2):
                for j in range(2):
                    ca = gb[i][j]
                    cb = gab[i][j] + gab[j][i]
                    cc = ga[i][j] - q.gram[i][j]
                    roots = _solve_int_quadratic(ca, cb, cc)
                    if roots is None:
                        continue
                    if candidates is None:
                        candidates = set(roots)
                    else:
                        candidates &= set(roots)
                    if not candidates:
                        impossible = True
                        break
                if impossible:
                    break
            if impossible:
                continue
            if candidates is None:
                return True  # every k works
            for k in candidates:
                mtx = tuple(
                    tuple(a[i][j] + k * b[i][j] for j in range(2)) for i in range(2)
                )
                if abs(m2_det(mtx)) == 1:
                    return True
        return False
    raise UnsupportedError("zero form on the right is unsupported")


def _abs_lex_key(mtx):
    flat = (mtx[0][0], mtx[0][1], mtx[1][0], mtx[1][1])
    return (tuple(abs(x) for x in flat), tuple(-x for x in flat))


def _rank1_functional(q: QForm):
    """Write a kernel-rank-1 form as c * (p . v)^2: returns (c, p primitive)."""
    g = q.gram
    if g[0][0] != 0:
        row = (g[0][0], g[0][1])
    else:
        row = (g[0][1], g[1][1])
    den = Fraction(1)
    for x in row:
        den = den * frac(x).denominator
    ints = (int(row[0] * den), int(row[1] * den))
    gg = gcd(ints[0], ints[1])
    p = (ints[0] // gg, ints[1] // gg)
    if p[0] != 0:
        c = g[0][0] / (p[0] * p[0])
    else:
        c = g[1][1] / (p[1] * p[1])
    assert c > 0
    return c, p


def _adjugate(g):
    return ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))


def _matrix_with_row(p):
    """Deterministic det +1 matrix whose first row is the primitive row p."""
    g, x, y = _xgcd(p[0], p[1])
    assert g == 1
    # det [[p0, p1], [-y, x]] = p0 x + p1 y = 1
    return ((p[0], p[1]), (-y, x))


def _sigma_with_left_row(p0, p):
    """sigma in SL2 with p0 * sigma = p, for primitive rows p0, p."""
    b = _matrix_with_row(p0)
    m0 = _matrix_with_row(p)
    return m2_mul(m2_inv_unimodular(b), m0)


def _primitive_rows_below(adj, cap):
    """Primitive integer rows p with p adj p^T < cap (up to sign, canonical sign)."""
    if cap <= 0:
        return []
    qa = QForm(2, mat(adj))
    out = []
    for v, val in short_vectors(qa, cap, strict=True):
        if gcd(v[0], v[1]) != 1:
            continue
        out.append((v, val))
    return out


def double_coset_reps(q: QForm, qp: QForm, bound) -> CosetRepList:
    """One representative per double coset Stab(q) s Stab(qp) with
    0 < delta(q o s + qp) < bound, for s in SL(2, Z).

    Search bounds are derived per kernel pattern and recorded in the
    result's .derivation metadata; candidates are reduced to canonical
    representatives (smallest absolute entries, positives preferred) and
    deduplicated by the exact same-coset test.
    """
    for f, name in ((q, "left"), (qp, "right")):
        if f.rank != 2:
            raise DimensionError("double cosets are implemented for rank-2 forms")
        if f.kernel_rank == 2:
            raise UnsupportedError(f"{name} form is zero")
    bound = frac(bound)
    derivation = []
    candidates = []

    kq, kqp = q.kernel_rank, qp.kernel_rank
    if kq == 0 and kqp == 0:
        dq, dqp = mat_det(q.gram), mat_det(qp.gram)
        tq = q.gram[0][0] + q.gram[1][1]
        tqp = qp.gram[0][0] + qp.gram[1][1]
        # delta >= det q + det qp + lam_min(qp) * tr(sigma^T G sigma) and
        # lam_min >= det/tr for definite 2x2 forms, so the Frobenius norm
        # of any in-budget sigma obeys an explicit quadratic cap.
        slack = bound - dq - dqp
        if slack <= 0:
            norm_cap = 0
        else:
            norm_cap = slack * (tq * tqp) / (dq * dqp)
        derivation.append(
            f"definite/definite: |sigma|_F^2 <= ({bound} - {dq} - {dqp})"
            f" * ({tq} * {tqp}) / ({dq} * {dqp}) = {norm_cap}"
        )
        e = floor_sqrt(Fraction(norm_cap)) if norm_cap > 0 else 0
        for a in range(-e, e + 1):
            for b in range(-e, e + 1):
                for c in range(-e, e + 1):
                    for d in range(-e, e + 1):
                        if a * d - b * c != 1:
                            continue
                        if a * a + b * b + c * c + d * d > norm_cap:
                            continue
                        s = TorusAuto(((a, b), (c, d)))
                        delta = twisted_sum_delta(q, qp, s)
                        if 0 < delta < bound:
                            candidates.append((s, delta))
    elif kq == 1 and kqp == 0:
        cw, p0 = _rank1_functional(q)
        dqp = mat_det(qp.gram)
        adj = _adjugate(qp.gram)
        cap = (bound - dqp) / cw
        derivation.append(
            f"degenerate/definite: delta = det qp + c*(p adj(qp) p^T) with"
            f" c = {cw}; primitive rows p bounded by p adj p^T < {cap}"
        )
        for p, _val in _primitive_rows_below(adj, cap):
            s = TorusAuto(_sigma_with_left_row(p0, p))
            delta = twisted_sum_delta(q, qp, s)
            assert 0 < delta < bound
            candidates.append((s, delta))
    elif kq == 0 and kqp == 1:
        cwp, p0p = _rank1_functional(qp)
        dq = mat_det(q.gram)
        adj = _adjugate(q.gram)
        cap = (bound - dq) / cwp
        derivation.append(
            f"definite/degenerate: delta = det q + c'*(r adj(q) r^T) with"
            f" c' = {cwp}; primitive rows r bounded by r adj r^T < {cap}"
        )
        for r, _val in _primitive_rows_below(adj, cap):
            # r = p0p * sigma^{-1}
            sinv = _sigma_with_left_row(p0p, r)
            s = TorusAuto(m2_inv_unimodular(sinv))
            delta = twisted_sum_delta(q, qp, s)
            assert 0 < delta < bound
            candidates.append((s, delta))
    else:
        cw, p0 = _rank1_functional(q)
        cwp, p0p = _rank1_functional(qp)
        tmax = floor_sqrt(bound / (cw * cwp))
        if Fraction(tmax * tmax) * cw * cwp >= bound:
            tmax -= 1
        derivation.append(
            f"degenerate/degenerate: delta = c*c'*(p x p')^2 with c = {cw},"
            f" c' = {cwp}; cross product t bounded by |t| <= {tmax}"
        )
        g, x, y = _xgcd(p0p[1], -p0p[0])
        assert g == 1
        base = (x, y)  # base x p0p = 1
        for t in range(1, tmax + 1):
            for s_off in range(0, t):
                p = (t * base[0] + s_off * p0p[0], t * base[1] + s_off * p0p[1])
                if gcd(p[0], p[1]) != 1:
                    continue
                sig = TorusAuto(_sigma_with_left_row(p0, p))
                delta = twisted_sum_delta(q, qp, sig)
                assert 0 < delta < bound
                candidates.append((sig, delta))

    # canonical order then exact pairwise dedupe
    candidates.sort(key=lambda sd: (sd[1], _abs_lex_key(sd[0].matrix)))
    reps = []
    for s, delta in candidates:
        if any(
            delta == r.delta and same_double_coset(q, qp, r.rep, s) for r in reps
        ):
            continue
        reps.append(DoubleCosetRep(s, delta))
    return CosetRepList(reps, derivation)
