"""Exact dense linear algebra: ranks, kernels, subspace arithmetic, span sampling.

Ranks over the rationals go through fraction-free (Bareiss) elimination on
integer-cleared rows so coefficient growth stays polynomial; prime fields use
plain elimination. Matrices over a polynomial ring (needed for generic ranks
of one-parameter families) reuse the Bareiss path, which only requires exact
division.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .fields import PolyRing, PrimeField, RationalField

DEFAULT_PRIME = 2**31 - 1


class FieldMismatchError(ValueError):
    """Raised when operands live over different coefficient fields."""


@dataclass
class Matrix:
    """Dense matrix; `rows` holds field elements in row-major nested lists."""

    field: object
    rows: list

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    @classmethod
    def from_rows(cls, field, rows) -> "Matrix":
        return cls(field, [[field.of(x) for x in row] for row in rows])

    @classmethod
    def zeros(cls, field, nrows: int, ncols: int) -> "Matrix":
        return cls(field, [[field.zero] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, field, n: int) -> "Matrix":
        m = cls.zeros(field, n, n)
        for i in range(n):
            m.rows[i][i] = field.one
        return m

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [list(col) for col in zip(*self.rows)] if self.rows else [])

    def column(self, j: int) -> list:
        return [row[j] for row in self.rows]


def _rank_int_bareiss(rows: list[list[int]]) -> int:
    m = len(rows)
    if m == 0:
        return 0
    n = len(rows[0])
    a = [row[:] for row in rows]
    rank = 0
    prev = 1
    for col in range(n):
        piv = None
        for i in range(rank, m):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            a[piv], a[rank] = a[rank], a[piv]
        pv = a[rank][col]
        for i in range(rank + 1, m):
            ai = a[i]
            ar = a[rank]
            aic = ai[col]
            for j in range(col + 1, n):
                ai[j] = (pv * ai[j] - aic * ar[j]) // prev
            ai[col] = 0
        prev = pv
        rank += 1
        if rank == m:
            break
    return rank


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    m = len(rows)
    if m == 0:
        return 0
    n = len(rows[0])
    a = [[x % p for x in row] for row in rows]
    rank = 0
    for col in range(n):
        piv = None
        for i in range(rank, m):
            if a[i][col]:
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            a[piv], a[rank] = a[rank], a[piv]
        inv = pow(a[rank][col], p - 2, p)
        ar = a[rank]
        for i in range(rank + 1, m):
            f = a[i][col]
            if f:
                f = f * inv % p
                ai = a[i]
                for j in range(col, n):
                    ai[j] = (ai[j] - f * ar[j]) % p
        rank += 1
        if rank == m:
            break
    return rank


def _rank_domain_bareiss(rows: list, ring: PolyRing) -> int:
    m = len(rows)
    if m == 0:
        return 0
    n = len(rows[0])
    a = [row[:] for row in rows]
    rank = 0
    prev = ring.one
    for col in range(n):
        piv = None
        for i in range(rank, m):
            if not ring.is_zero(a[i][col]):
                piv = i
                break
        if piv is None:
            continue
        if piv != rank:
            a[piv], a[rank] = a[rank], a[piv]
        pv = a[rank][col]
        for i in range(rank + 1, m):
            aic = a[i][col]
            for j in range(col + 1, n):
                num = ring.sub(ring.mul(pv, a[i][j]), ring.mul(aic, a[rank][j]))
                a[i][j] = ring.exact_div(num, prev)
            a[i][col] = ring.zero
        prev = pv
        rank += 1
        if rank == m:
            break
    return rank


def _clear_row_denominators(row: list[Fraction]) -> list[int]:
    lcm = 1
    for x in row:
        lcm = math.lcm(lcm, x.denominator)
    return [int(x * lcm) for x in row]


def rank_of_rows(field, rows: list) -> int:
    """Exact rank of a list of row vectors over `field`."""
    rows = [row for row in rows if row]
    if not rows:
        return 0
    if isinstance(field, RationalField):
        return _rank_int_bareiss([_clear_row_denominators([Fraction(x) for x in row]) for row in rows])
    if isinstance(field, PrimeField):
        return _rank_mod_p(rows, field.p)
    if isinstance(field, PolyRing):
        return _rank_domain_bareiss(rows, field)
    raise TypeError(f"no rank routine for {field!r}")


def rank(m: Matrix) -> int:
    return rank_of_rows(m.field, m.rows)


def _rref(field, rows: list, ncols: int):
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    a = [row[:] for row in rows]
    pivots = []
    r = 0
    for col in range(ncols):
        piv = None
        for i in range(r, len(a)):
            if not field.is_zero(a[i][col]):
                piv = i
                break
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = field.inv(a[r][col])
        a[r] = [field.mul(inv, x) for x in a[r]]
        for i in range(len(a)):
            if i != r and not field.is_zero(a[i][col]):
                f = a[i][col]
                a[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(a[i], a[r])]
        pivots.append(col)
        r += 1
    return a, pivots


def nullspace(m: Matrix) -> list[list]:
    """Basis of the right kernel {x : m x = 0}."""
    field = m.field
    n = m.ncols
    a, pivots = _rref(field, m.rows, n)
    pivot_set = set(pivots)
    free = [j for j in range(n) if j not in pivot_set]
    basis = []
    for j in free:
        v = [field.zero] * n
        v[j] = field.one
        for r, pc in enumerate(pivots):
            v[pc] = field.neg(a[r][j])
        basis.append(v)
    return basis


def column_space(m: Matrix) -> "Subspace":
    """Image of the matrix as a subspace of the row-index space."""
    return subspace_from_vectors(m.field, m.nrows, [m.column(j) for j in range(m.ncols)])


def solve_columns(field, columns: list, target: list):
    """Solve sum_i x_i * columns[i] = target; None when inconsistent."""
    k = len(columns)
    n = len(target)
    aug = [[columns[i][r] for i in range(k)] + [target[r]] for r in range(n)]
    a, pivots = _rref(field, aug, k + 1)
    if k in pivots:
        return None
    x = [field.zero] * k
    for r, pc in enumerate(pivots):
        x[pc] = a[r][k]
    return x


class SpanBuilder:
    """Grows a subspace one vector at a time.

    Keeps a fully reduced pivot system internally (every stored row is zero
    at every other stored pivot), so membership is a single pass, and keeps
    the accepted original vectors as the exposed basis.
    """

    def __init__(self, field, ambient_dim: int):
        self.field = field
        self.ambient_dim = ambient_dim
        self.vectors: list = []
        self._rows: list = []  # (pivot index, row with pivot normalized to 1)

    @property
    def dim(self) -> int:
        return len(self._rows)

    def residual(self, vec: list) -> list:
        f = self.field
        v = list(vec)
        for piv, row in self._rows:
            c = v[piv]
            if f.is_zero(c):
                continue
            for j in range(self.ambient_dim):
                if not f.is_zero(row[j]):
                    v[j] = f.sub(v[j], f.mul(c, row[j]))
        return v

    def contains(self, vec: list) -> bool:
        return all(self.field.is_zero(x) for x in self.residual(vec))

    def add(self, vec: list) -> bool:
        """Insert `vec`; True when the dimension grew."""
        if len(vec) != self.ambient_dim:
            raise ValueError("vector length does not match ambient dimension")
        f = self.field
        v = self.residual(vec)
        piv = None
        for j, x in enumerate(v):
            if not f.is_zero(x):
                piv = j
                break
        if piv is None:
            return False
        inv = f.inv(v[piv])
        v = [f.mul(inv, x) for x in v]
        for k, (p, row) in enumerate(self._rows):
            c = row[piv]
            if not f.is_zero(c):
                self._rows[k] = (p, [f.sub(x, f.mul(c, y)) for x, y in zip(row, v)])
        self._rows.append((piv, v))
        self.vectors.append(list(vec))
        return True

    def to_subspace(self) -> "Subspace":
        return Subspace(self.field, self.ambient_dim, [list(v) for v in self.vectors])


@dataclass
class Subspace:
    """A linear subspace given by an independent list of spanning vectors.

    Dimensions here are always vector-space (cone) dimensions.
    """

    field: object
    ambient_dim: int
    basis: list

    @property
    def dim(self) -> int:
        return len(self.basis)

    def builder(self) -> SpanBuilder:
        b = SpanBuilder(self.field, self.ambient_dim)
        for v in self.basis:
            b.add(v)
        return b


def subspace_from_vectors(field, ambient_dim: int, vectors: list) -> Subspace:
    b = SpanBuilder(field, ambient_dim)
    for v in vectors:
        b.add(v)
    return b.to_subspace()


def _check_compatible(a: Subspace, b: Subspace) -> None:
    if a.field != b.field:
        raise FieldMismatchError(f"mixed fields {a.field!r} and {b.field!r}")
    if a.ambient_dim != b.ambient_dim:
        raise ValueError(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )


def span_sum(a: Subspace, b: Subspace) -> Subspace:
    """Sum of two subspaces of the same ambient space."""
    _check_compatible(a, b)
    builder = SpanBuilder(a.field, a.ambient_dim)
    for v in a.basis:
        builder.add(v)
    for v in b.basis:
        builder.add(v)
    return builder.to_subspace()


def random_in_span(s: Subspace, bound: int, rng) -> list:
    """Nonzero integer combination of the basis with coefficients in [-bound, bound]."""
    if s.dim == 0:
        raise ValueError("cannot sample from a zero-dimensional subspace")
    if bound < 1:
        raise ValueError("coefficient bound must be at least 1")
    f = s.field
    while True:
        coeffs = [rng.randint(-bound, bound) for _ in range(s.dim)]
        if any(coeffs):
            break
    out = [f.zero] * s.ambient_dim
    for c, v in zip(coeffs, s.basis):
        if c:
            fc = f.of(c)
            for j in range(s.ambient_dim):
                out[j] = f.add(out[j], f.mul(fc, v[j]))
    return out


def solve_membership(s: Subspace, v: list):
    """Coordinates of v in s.basis, or None when v is outside s."""
    if len(v) != s.ambient_dim:
        raise ValueError("vector length does not match ambient dimension")
    if s.dim == 0:
        return [] if all(s.field.is_zero(x) for x in v) else None
    return solve_columns(s.field, s.basis, v)


def subspace_contains(s: Subspace, v: list) -> bool:
    return s.builder().contains(v)


def subspaces_equal(a: Subspace, b: Subspace) -> bool:
    """Equality of column spaces, decided by mutual membership of bases."""
    _check_compatible(a, b)
    if a.dim != b.dim:
        return False
    ba = a.builder()
    bb = b.builder()
    return all(ba.contains(v) for v in b.basis) and all(bb.contains(v) for v in a.basis)


def vector_to_field(field, vec) -> list:
    return [field.of(x) for x in vec]
