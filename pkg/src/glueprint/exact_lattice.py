"""Exact rational linear algebra for quadratic forms on free Z-modules.

Everything here runs on fractions.Fraction and Python integers; no
floating point enters any computation.  Discriminants, kernels,
positive-semidefiniteness and sublattice enumeration are all decided
exactly, so strict inequalities like 0 < delta < C are trustworthy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt

from .errors import DimensionError, PreconditionError

Mat = tuple  # tuple of tuples of Fraction
Vec = tuple


# ---------------------------------------------------------------------------
# scalars


def frac(x) -> Fraction:
    """Coerce ints, 'p/q' strings and Fractions to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"not an exact rational: {x!r}")


def floor_sqrt(x: Fraction) -> int:
    """floor(sqrt(x)) for a nonnegative rational, exactly."""
    if x < 0:
        raise PreconditionError("floor_sqrt of a negative rational")
    # sqrt(n/d) = sqrt(n*d)/d and floor(floor(y)/d) = floor(y/d) for d > 0
    return isqrt(x.numerator * x.denominator) // x.denominator


def ceil_sqrt(x: Fraction) -> int:
    """Smallest integer k >= 0 with k*k >= x."""
    s = floor_sqrt(x)
    return s if Fraction(s * s) >= x else s + 1


def int_nth_root_floor(x: int, n: int) -> int:
    """floor(x ** (1/n)) for x >= 0 via correction of a float guess."""
    if x < 0:
        raise PreconditionError("root of negative integer")
    if x == 0:
        return 0
    if n == 1:
        return x
    if n == 2:
        return isqrt(x)
    r = int(round(x ** (1.0 / n)))
    while r > 0 and r**n > x:
        r -= 1
    while (r + 1) ** n <= x:
        r += 1
    return r


# ---------------------------------------------------------------------------
# rational matrices (tuple-of-tuples, immutable)


def mat(rows) -> Mat:
    return tuple(tuple(frac(x) for x in row) for row in rows)


def imat(rows) -> tuple:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity_mat(n) -> Mat:
    return tuple(
        tuple(Fraction(1) if i == j else Fraction(0) for j in range(n)) for i in range(n)
    )


def mat_mul(a, b) -> Mat:
    n, m, p = len(a), len(b), len(b[0]) if b else 0
    if a and len(a[0]) != m:
        raise DimensionError("matrix product shape mismatch")
    return tuple(
        tuple(sum((frac(a[i][k]) * frac(b[k][j]) for k in range(m)), Fraction(0)) for j in range(p))
        for i in range(n)
    )


def mat_vec(a, v) -> Vec:
    if a and len(a[0]) != len(v):
        raise DimensionError("matrix-vector shape mismatch")
    return tuple(sum((frac(a[i][k]) * frac(v[k]) for k in range(len(v))), Fraction(0)) for i in range(len(a)))


def transpose(a) -> Mat:
    if not a:
        return ()
    return tuple(tuple(a[i][j] for i in range(len(a))) for j in range(len(a[0])))


def mat_sub(a, b) -> Mat:
    return tuple(tuple(frac(x) - frac(y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_add(a, b) -> Mat:
    return tuple(tuple(frac(x) + frac(y) for x, y in zip(ra, rb)) for ra, rb in zip(a, b))


def mat_det(a) -> Fraction:
    """Determinant by fraction-exact Gaussian elimination."""
    n = len(a)
    if n == 0:
        return Fraction(1)
    if any(len(row) != n for row in a):
        raise DimensionError("determinant of a non-square matrix")
    m = [[frac(x) for x in row] for row in a]
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            if m[r][col] != 0:
                f = m[r][col] * inv
                for c in range(col, n):
                    m[r][c] -= f * m[col][c]
    return det


def mat_rank(a) -> int:
    """Rank over Q."""
    if not a:
        return 0
    m = [[frac(x) for x in row] for row in a]
    rows, cols = len(m), len(m[0])
    rank = 0
    for col in range(cols):
        piv = next((r for r in range(rank, rows) if m[r][col] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = 1 / m[rank][col]
        for r in range(rows):
            if r != rank and m[r][col] != 0:
                f = m[r][col] * inv
                for c in range(col, cols):
                    m[r][c] -= f * m[rank][c]
        rank += 1
        if rank == rows:
            break
    return rank


# ---------------------------------------------------------------------------
# integer matrices: Hermite normal form and integer kernels


def hnf_rows(rows) -> tuple:
    """Canonical row-style Hermite normal form of the row span over Z.

    Pivots are positive, entries above a pivot are reduced into
    [0, pivot), zero rows are dropped.  Two integer matrices have equal
    HNF iff they span the same sublattice of Z^n.
    """
    m = [list(int(x) for x in row) for row in rows]
    if not m:
        return ()
    cols = len(m[0])
    pivot_row = 0
    for col in range(cols):
        # gcd-reduce all entries of this column below pivot_row into one row
        r = pivot_row
        while True:
            nz = [i for i in range(pivot_row, len(m)) if m[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(m[i][col]), i))
            if i0 != pivot_row:
                m[pivot_row], m[i0] = m[i0], m[pivot_row]
            done = True
            for i in range(pivot_row + 1, len(m)):
                if m[i][col] != 0:
                    q = m[i][col] // m[pivot_row][col]
                    for c in range(cols):
                        m[i][c] -= q * m[pivot_row][c]
                    if m[i][col] != 0:
                        done = False
            if done:
                break
        if not nz:
            continue
        if m[pivot_row][col] < 0:
            m[pivot_row] = [-x for x in m[pivot_row]]
        # reduce entries above the pivot
        p = m[pivot_row][col]
        for i in range(pivot_row):
            q = m[i][col] // p
            if q:
                for c in range(cols):
                    m[i][c] -= q * m[pivot_row][c]
        pivot_row += 1
        if pivot_row == len(m):
            break
    return tuple(tuple(row) for row in m[:pivot_row] if any(row))


def hnf_with_transform(rows):
    """Row HNF H together with a unimodular U so that U * rows = H_full.

    H_full keeps zero rows (at the bottom); U is square of size len(rows).
    """
    m = [list(int(x) for x in row) for row in rows]
    n = len(m)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    if n == 0:
        return (), ()
    cols = len(m[0])
    pivot_row = 0
    for col in range(cols):
        while True:
            nz = [i for i in range(pivot_row, n) if m[i][col] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: (abs(m[i][col]), i))
            if i0 != pivot_row:
                m[pivot_row], m[i0] = m[i0], m[pivot_row]
                u[pivot_row], u[i0] = u[i0], u[pivot_row]
            done = True
            for i in range(pivot_row + 1, n):
                if m[i][col] != 0:
                    q = m[i][col] // m[pivot_row][col]
                    for c in range(cols):
                        m[i][c] -= q * m[pivot_row][c]
                    for c in range(n):
                        u[i][c] -= q * u[pivot_row][c]
                    if m[i][col] != 0:
                        done = False
            if done:
                break
        if not nz:
            continue
        if m[pivot_row][col] < 0:
            m[pivot_row] = [-x for x in m[pivot_row]]
            u[pivot_row] = [-x for x in u[pivot_row]]
        p = m[pivot_row][col]
        for i in range(pivot_row):
            q = m[i][col] // p
            if q:
                for c in range(cols):
                    m[i][c] -= q * m[pivot_row][c]
                for c in range(n):
                    u[i][c] -= q * u[pivot_row][c]
        pivot_row += 1
        if pivot_row == n:
            break
    return tuple(tuple(r) for r in m), tuple(tuple(r) for r in u)


def integer_kernel(rows, ncols=None):
    """Saturated basis (HNF rows) of {v in Z^ncols : rows * v^T = 0}."""
    if ncols is None:
        if not rows:
            raise DimensionError("integer_kernel needs ncols for an empty matrix")
        ncols = len(rows[0])
    if not rows:
        return tuple(tuple(1 if i == j else 0 for j in range(ncols)) for i in range(ncols))
    # rows of U mapping transpose(rows) to zero rows span the kernel
    h, u = hnf_with_transform(transpose(rows))
    ker = [u[i] for i in range(len(h)) if not any(h[i])]
    return hnf_rows(ker)


def primitive_vector(v) -> tuple:
    """Divide an integer vector by the gcd of its entries (sign kept)."""
    g = 0
    for x in v:
        g = gcd(g, int(x))
    if g == 0:
        raise PreconditionError("primitive part of the zero vector")
    return tuple(int(x) // g for x in v)


# ---------------------------------------------------------------------------
# quadratic forms


def _psd_analysis(gram):
    """Pivoted exact LDL^T pass.

    Returns the number of positive pivots, or None if the matrix is not
    positive semidefinite.
    """
    n = len(gram)
    a = {(i, j): frac(gram[i][j]) for i in range(n) for j in range(n)}
    remaining = list(range(n))
    pivots = 0
    while remaining:
        if any(a[i, i] < 0 for i in remaining):
            return None
        piv = next((i for i in remaining if a[i, i] > 0), None)
        if piv is None:
            # zero diagonal: PSD forces the whole remaining block to vanish
            if any(a[i, j] != 0 for i in remaining for j in remaining):
                return None
            break
        pivots += 1
        remaining.remove(piv)
        inv = 1 / a[piv, piv]
        for i in remaining:
            if a[i, piv] == 0:
                continue
            f = a[i, piv] * inv
            for j in remaining:
                a[i, j] -= f * a[piv, j]
    return pivots


@dataclass(frozen=True)
class QForm:
    """Positive-semidefinite quadratic form on Z^rank with exact rational Gram.

    Validation is constructive: an exact pivoted LDL^T pass certifies
    semidefiniteness and records the kernel rank, and an integer kernel
    basis is stored (rational entries always give a rational kernel).
    """

    rank: int
    gram: Mat

    def __post_init__(self):
        g = mat(self.gram)
        object.__setattr__(self, "gram", g)
        if len(g) != self.rank or any(len(row) != self.rank for row in g):
            raise DimensionError(f"Gram matrix is not {self.rank}x{self.rank}")
        for i in range(self.rank):
            for j in range(i + 1, self.rank):
                if g[i][j] != g[j][i]:
                    raise PreconditionError("Gram matrix is not symmetric")
        pivots = _psd_analysis(g)
        if pivots is None:
            raise PreconditionError("Gram matrix is not positive semidefinite")
        object.__setattr__(self, "_kernel_rank", self.rank - pivots)
        object.__setattr__(self, "_kernel_basis", None)

    @property
    def kernel_rank(self) -> int:
        return self._kernel_rank

    @property
    def kernel_basis(self) -> tuple:
        """Saturated integer basis (HNF rows) of the kernel lattice."""
        if self._kernel_basis is None:
            if self._kernel_rank == 0:
                basis = ()
            else:
                denoms = 1
                for row in self.gram:
                    for x in row:
                        denoms = denoms * x.denominator // gcd(denoms, x.denominator)
                int_rows = tuple(
                    tuple(int(x * denoms) for x in row) for row in self.gram
                )
                basis = integer_kernel(int_rows, self.rank)
            object.__setattr__(self, "_kernel_basis", basis)
        return self._kernel_basis

    @property
    def is_positive_definite(self) -> bool:
        return self._kernel_rank == 0

    def value(self, v) -> Fraction:
        if len(v) != self.rank:
            raise DimensionError("vector length does not match form rank")
        w = mat_vec(self.gram, v)
        return sum((frac(v[i]) * w[i] for i in range(self.rank)), Fraction(0))

    def bilinear(self, u, v) -> Fraction:
        w = mat_vec(self.gram, v)
        return sum((frac(u[i]) * w[i] for i in range(self.rank)), Fraction(0))


def qform(rows) -> QForm:
    g = mat(rows)
    return QForm(len(g), g)


def identity_form(n) -> QForm:
    return QForm(n, identity_mat(n))


def diag_form(*entries) -> QForm:
    n = len(entries)
    return QForm(
        n, tuple(tuple(frac(entries[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))
    )


def direct_sum(forms) -> QForm:
    """Block-diagonal sum of quadratic forms."""
    n = sum(f.rank for f in forms)
    rows = []
    offset = 0
    for f in forms:
        for r in f.gram:
            rows.append(
                tuple(Fraction(0) for _ in range(offset))
                + tuple(r)
                + tuple(Fraction(0) for _ in range(n - offset - f.rank))
            )
        offset += f.rank
    return QForm(n, tuple(rows))


# ---------------------------------------------------------------------------
# sublattices


@dataclass(frozen=True)
class Sublattice:
    """Sublattice of Z^ambient_rank given by integer basis rows.

    Basis rows must be linearly independent over Q.  canonical() returns
    the row-style HNF representative, which is unique per sublattice.
    """

    ambient_rank: int
    basis: tuple

    def __post_init__(self):
        b = tuple(tuple(int(x) for x in row) for row in self.basis)
        object.__setattr__(self, "basis", b)
        if any(len(row) != self.ambient_rank for row in b):
            raise DimensionError("basis vector length does not match ambient rank")
        if len(b) > self.ambient_rank:
            raise DimensionError("more basis vectors than the ambient rank")
        if mat_rank(b) != len(b):
            raise PreconditionError("basis vectors are not Q-linearly independent")

    @property
    def rank(self) -> int:
        return len(self.basis)

    def canonical(self) -> "Sublattice":
        return Sublattice(self.ambient_rank, hnf_rows(self.basis))


def span(ambient_rank, *vectors) -> Sublattice:
    return Sublattice(ambient_rank, tuple(tuple(int(x) for x in v) for v in vectors))


def discriminant(w: Sublattice, q: QForm) -> Fraction:
    """det(B G B^T): the Gram determinant of the form on the sublattice.

    Independent of the basis choice (unimodular changes have det +-1).
    """
    if w.ambient_rank != q.rank:
        raise DimensionError(
            f"sublattice ambient rank {w.ambient_rank} != form rank {q.rank}"
        )
    b = w.basis
    return mat_det(mat_mul(mat_mul(b, q.gram), transpose(b)))


def dominates(q1: QForm, q2: QForm) -> bool:
    """True iff q1 - q2 is positive semidefinite."""
    if q1.rank != q2.rank:
        raise DimensionError("form ranks differ")
    return _psd_analysis(mat_sub(q1.gram, q2.gram)) is not None


# ---------------------------------------------------------------------------
# short vector enumeration (positive-definite forms only)


def _ldl_pd(gram):
    """Unpivoted LDL^T for a positive-definite Gram: q(x) = sum d_i (x_i + sum_j>i mu_ij x_j)^2."""
    n = len(gram)
    a = [[frac(x) for x in row] for row in gram]
    ds = [Fraction(0)] * n
    mus = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        d = a[i][i]
        if d <= 0:
            raise PreconditionError("form is not positive definite")
        ds[i] = d
        for j in range(i + 1, n):
            mus[i][j] = a[i][j] / d
        for r in range(i + 1, n):
            for c in range(i + 1, n):
                a[r][c] -= a[r][i] * a[i][c] / d
    return ds, mus


def short_vectors(q: QForm, bound, *, strict=True):
    """All nonzero integer vectors v (up to sign) with q(v) < bound (or <=).

    The sign representative has positive first nonzero coordinate.
    Returns a deterministically sorted list of (vector, value) pairs.
    """
    if not q.is_positive_definite:
        raise PreconditionError("short vector enumeration needs a definite form")
    bound = frac(bound)
    n = q.rank
    if n == 0 or bound < 0 or (strict and bound <= 0):
        return []
    ds, mus = _ldl_pd(q.gram)
    out = []
    coords = [0] * n

    def admissible(val):
        return val < bound if strict else val <= bound

    def rec(i, used):
        if i < 0:
            if any(coords) :
                out.append((tuple(coords), used))
            return
        budget = bound - used
        center = sum((mus[i][j] * coords[j] for j in range(i + 1, n)), Fraction(0))
        radius = floor_sqrt(budget / ds[i]) + 1
        lo = -center
        lo_int = lo.numerator // lo.denominator  # floor
        for x in range(lo_int - radius, lo_int + radius + 2):
            term = ds[i] * (x + center) ** 2
            if admissible(used + term):
                coords[i] = x
                rec(i - 1, used + term)
        coords[i] = 0

    rec(n - 1, Fraction(0))
    seen = {}
    for v, val in out:
        first = next(x for x in v if x != 0)
        if first < 0:
            v = tuple(-x for x in v)
        seen[v] = val
    return sorted(seen.items())


def minimum_value(q: QForm) -> Fraction:
    """Minimum of q over nonzero integer vectors (attained at a primitive one)."""
    if not q.is_positive_definite:
        raise PreconditionError("minimum of a degenerate form is zero (not enumerable)")
    cap = min(q.gram[i][i] for i in range(q.rank))
    vecs = short_vectors(q, cap, strict=False)
    return min(val for _, val in vecs)


# ---------------------------------------------------------------------------
# sublattice enumeration below a discriminant bound


def _subsets(n, k):
    return list(itertools.combinations(range(n), k))


def compound_gram(gram, k):
    """Gram matrix of the k-th exterior power (entries are k x k minors)."""
    n = len(gram)
    subs = _subsets(n, k)
    rows = []
    for I in subs:
        row = []
        for J in subs:
            minor = tuple(tuple(gram[i][j] for j in J) for i in I)
            row.append(mat_det(minor))
        rows.append(tuple(row))
    return tuple(rows)


def _wedge_coords(basis_rows, subs):
    return tuple(
        mat_det(tuple(tuple(row[j] for j in J) for row in basis_rows)) for J in subs
    )


def _lattice_from_wedge(w, n, k):
    """Recover {v : v wedge w = 0} and return its basis if it has rank k."""
    if k == n:
        return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    subs_k = _subsets(n, k)
    subs_k1 = _subsets(n, k + 1)
    index_k = {s: i for i, s in enumerate(subs_k)}
    # column j of the constraint matrix holds the coordinates of e_j ^ w
    cols = []
    for j in range(n):
        col = [0] * len(subs_k1)
        for s, ws in zip(subs_k, w):
            if ws == 0 or j in s:
                continue
            t = tuple(sorted((j,) + s))
            sign = (-1) ** t.index(j)
            col[subs_k1.index(t)] += sign * int(ws)
        cols.append(col)
    rows = transpose(tuple(tuple(c) for c in cols))
    ker = integer_kernel(rows, n)
    if len(ker) != k:
        return None
    return ker


def _index_subgroup_bases(k, m):
    """Row-HNF bases of the index-m subgroups of Z^k (upper triangular)."""

    def diag_splits(rest, parts):
        if parts == 1:
            yield (rest,)
            return
        for d in range(1, rest + 1):
            if rest % d == 0:
                for tail in diag_splits(rest // d, parts - 1):
                    yield (d,) + tail

    for diag in diag_splits(m, k):
        ranges = []
        for i in range(k):
            for j in range(i + 1, k):
                ranges.append(range(diag[j]))
        for offs in itertools.product(*ranges):
            t = [[0] * k for _ in range(k)]
            it = iter(offs)
            for i in range(k):
                t[i][i] = diag[i]
                for j in range(i + 1, k):
                    t[i][j] = next(it)
            yield tuple(tuple(r) for r in t)


def enumerate_small_sublattices(q: QForm, k: int, bound) -> list:
    """All rank-k submodules W of Z^n with discriminant(W, q) < bound.

    Saturated sublattices come from primitive decomposable short vectors
    of the k-th compound form (their wedge norm equals the discriminant);
    deeper sublattices are index-m subgroups of those, picking up a
    factor m^2.  Output is in canonical HNF bases, sorted.
    """
    if not q.is_positive_definite:
        raise PreconditionError("finiteness needs a positive-definite form")
    if not 0 <= k <= q.rank:
        raise DimensionError(f"k={k} outside 0..{q.rank}")
    bound = frac(bound)
    n = q.rank
    if k == 0:
        return [Sublattice(n, ())] if bound > 1 else []
    gk = compound_gram(q.gram, k)
    saturated = []
    for w, val in short_vectors(QForm(len(gk), gk), bound, strict=True):
        g = 0
        for x in w:
            g = gcd(g, x)
        if g != 1:
            continue  # non-saturated lattices are generated below
        basis = _lattice_from_wedge(w, n, k)
        if basis is None:
            continue  # not decomposable: no sublattice has this wedge
        lat = Sublattice(n, hnf_rows(basis))
        assert discriminant(lat, q) == val
        saturated.append((val, lat))
    out = {}
    for val, lat in saturated:
        m = 1
        while m * m * val < bound:
            for t in _index_subgroup_bases(k, m):
                sub = Sublattice(n, hnf_rows(mat_mul(t, lat.basis)))
                out[sub.basis] = m * m * val
            m += 1
    return [
        Sublattice(n, basis)
        for basis, _ in sorted(out.items(), key=lambda kv: (kv[1], kv[0]))
    ]
