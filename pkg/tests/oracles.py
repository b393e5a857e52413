"""Independent brute-force oracles used to freeze expected values in the tests.

These deliberately avoid the library's construction paths: flattenings are
rebuilt by direct multi-index loops, catalecticants by dictionary lookup of
coefficients, Koszul flattenings through the alternating-tensor embedding, and
jets by full (untruncated) convolution arithmetic on coefficient lists.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations, permutations, product

from cactusbarrier.exactalg import Matrix
from cactusbarrier.fields import QQ
from cactusbarrier.varieties import (
    homogeneous_exponents,
    monomial_exponents,
)


def perm_sign(perm) -> int:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1 if inv % 2 else 1


def brute_flattening_matrix(shape, entries, row_modes) -> Matrix:
    """Reshape a flat row-major tensor as the (row_modes | rest) matrix."""
    shape = tuple(shape)
    row_modes = tuple(sorted(row_modes))
    col_modes = tuple(m for m in range(len(shape)) if m not in row_modes)
    rows_idx = list(product(*(range(shape[m]) for m in row_modes)))
    cols_idx = list(product(*(range(shape[m]) for m in col_modes)))
    strides = [1] * len(shape)
    for i in range(len(shape) - 2, -1, -1):
        strides[i] = strides[i + 1] * shape[i + 1]
    out = []
    for ri in rows_idx:
        row = []
        for ci in cols_idx:
            full = [0] * len(shape)
            for m, v in zip(row_modes, ri):
                full[m] = v
            for m, v in zip(col_modes, ci):
                full[m] = v
            row.append(Fraction(entries[sum(i * s for i, s in zip(full, strides))]))
        out.append(row)
    return Matrix(QQ, out)


def brute_catalecticant_matrix(nvars: int, degree: int, i: int, coeff_of) -> Matrix:
    """Hankel-style matrix: entry (b, a) is the coefficient of x^(a+b).

    `coeff_of` maps a homogeneous exponent tuple to a Fraction.
    """
    n = nvars - 1
    rows = homogeneous_exponents(n, degree - i)
    cols = homogeneous_exponents(n, i)
    out = []
    for re in rows:
        out.append([Fraction(coeff_of(tuple(x + y for x, y in zip(re, ce)))) for ce in cols])
    return Matrix(QQ, out)


def vector_coeff_lookup(nvars: int, degree: int, vec):
    """Coefficient accessor for a W-vector in the canonical monomial order."""
    n = nvars - 1
    index = {e: k for k, e in enumerate(homogeneous_exponents(n, degree))}

    def coeff_of(exps):
        return vec[index[tuple(exps)]]

    return coeff_of


def brute_koszul_matrix(shape, entries, p: int) -> Matrix:
    """Koszul contraction through the alternating embedding of wedges into tensor powers.

    Columns are indexed by (p-subset, second-mode index); rows live in the full
    (p+1)-fold tensor power of the first factor times the third factor, where
    a wedge is the signed sum over all orderings. Ranks agree with the
    wedge-basis matrix because the embedding is injective.
    """
    a, b, c = shape
    strides = (b * c, c, 1)

    def t(i, j, l):
        return Fraction(entries[i * strides[0] + j * strides[1] + l * strides[2]])

    cols = [(s, j) for s in combinations(range(a), p) for j in range(b)]
    nrows = a ** (p + 1) * c
    out_cols = []
    for (s, j) in cols:
        col = [Fraction(0)] * nrows
        for i in range(a):
            for l in range(c):
                coeff = t(i, j, l)
                if not coeff:
                    continue
                tup = (i,) + s
                for perm in permutations(range(p + 1)):
                    sign = perm_sign(perm)
                    ordered = tuple(tup[q] for q in perm)
                    flat = 0
                    for x in ordered:
                        flat = flat * a + x
                    col[flat * c + l] += sign * coeff
        out_cols.append(col)
    return Matrix(QQ, [[out_cols[cc][rr] for cc in range(len(out_cols))] for rr in range(nrows)])


def _pmul(x, y):
    out = [Fraction(0)] * (len(x) + len(y) - 1)
    for i, a in enumerate(x):
        if a:
            for j, bb in enumerate(y):
                out[i + j] += a * bb
    return out


def brute_jet_vectors(param, germ, length: int) -> list[list]:
    """Taylor coefficient vectors by full convolution, no truncation anywhere."""
    coords = []
    for j in range(param.dim_X):
        cs = [Fraction(germ.base[j])] + [Fraction(c[j]) for c in germ.coeffs]
        coords.append(cs)
    parts = []
    pos = 0
    for f in param.factors:
        u = coords[pos:pos + f.n]
        pos += f.n
        vec = []
        for exps in monomial_exponents(f.n, f.d):
            poly = [Fraction(1)]
            for var, e in zip(u, exps):
                for _ in range(e):
                    poly = _pmul(poly, var)
            vec.append(poly)
        parts.append(vec)
    w = parts[0]
    for nxt in parts[1:]:
        w = [_pmul(x, y) for x in w for y in nxt]
    return [[poly[m] if m < len(poly) else Fraction(0) for poly in w] for m in range(length)]
