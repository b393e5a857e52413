import random
from fractions import Fraction

import pytest

from cactusbarrier.exactalg import (
    DEFAULT_PRIME,
    FieldMismatchError,
    Matrix,
    Subspace,
    nullspace,
    random_in_span,
    rank,
    rank_of_rows,
    solve_membership,
    span_sum,
    subspace_contains,
    subspace_from_vectors,
    subspaces_equal,
)
from cactusbarrier.fields import QQ, PrimeField


def qvec(*xs):
    return [Fraction(x) for x in xs]


def test_rank_identity():
    assert rank(Matrix.identity(QQ, 3)) == 3


def test_rank_zero_matrix():
    assert rank(Matrix.zeros(QQ, 4, 2)) == 0


def test_rank_proportional_rows():
    assert rank(Matrix.from_rows(QQ, [[1, 2], [2, 4]])) == 1


def test_rank_rectangular_rational():
    m = Matrix.from_rows(QQ, [["1/2", "1/3", 0], [1, "2/3", 0], [0, 0, 5]])
    assert rank(m) == 2


def test_rank_mod_p():
    gf = PrimeField(7)
    m = Matrix.from_rows(gf, [[1, 2], [2, 4]])
    assert rank(m) == 1
    assert rank(Matrix.identity(gf, 4)) == 4
    # 7 divides the determinant of [[1,3],[3,2]] (= -7), so rank drops mod 7
    assert rank(Matrix.from_rows(gf, [[1, 3], [3, 2]])) == 1
    assert rank(Matrix.from_rows(QQ, [[1, 3], [3, 2]])) == 2


def test_rank_equals_rank_of_transpose():
    rng = random.Random(11)
    for _ in range(30):
        rows = [[rng.randint(-9, 9) for _ in range(rng.randint(1, 6))]]
        ncols = len(rows[0])
        for _ in range(rng.randint(0, 5)):
            rows.append([rng.randint(-9, 9) for _ in range(ncols)])
        m = Matrix.from_rows(QQ, rows)
        assert rank(m) == rank(m.transpose())


def test_rank_agreement_rational_vs_prime_field():
    # ranks over a large prime agree with rational ranks on almost all samples;
    # any disagreement must come from a bad prime, i.e. undershoot the QQ rank
    rng = random.Random(2024)
    gf = PrimeField(1_000_003)
    agree = total = 0
    for _ in range(120):
        n, m, r = rng.randint(2, 5), rng.randint(2, 5), rng.randint(1, 3)
        left = [[rng.randint(-5, 5) for _ in range(r)] for _ in range(n)]
        right = [[rng.randint(-5, 5) for _ in range(m)] for _ in range(r)]
        prod = [[sum(left[i][k] * right[k][j] for k in range(r)) for j in range(m)]
                for i in range(n)]
        rq = rank(Matrix.from_rows(QQ, prod))
        rp = rank(Matrix.from_rows(gf, prod))
        total += 1
        if rq == rp:
            agree += 1
        else:
            assert rp < rq
    assert agree / total >= 0.99


def test_nullspace():
    m = Matrix.from_rows(QQ, [[1, 2, 3], [2, 4, 6]])
    basis = nullspace(m)
    assert len(basis) == 2
    for v in basis:
        for row in m.rows:
            assert sum(a * b for a, b in zip(row, v)) == 0


def test_span_sum_dims():
    e1 = subspace_from_vectors(QQ, 3, [qvec(1, 0, 0)])
    e2 = subspace_from_vectors(QQ, 3, [qvec(0, 1, 0)])
    assert span_sum(e1, e2).dim == 2
    assert span_sum(e1, e1).dim == 1
    e12 = subspace_from_vectors(QQ, 3, [qvec(1, 0, 0), qvec(0, 1, 0)])
    diag = subspace_from_vectors(QQ, 3, [qvec(1, 1, 0)])
    assert span_sum(e12, diag).dim == 2


def test_span_sum_requires_matching_ambient():
    a = subspace_from_vectors(QQ, 2, [qvec(1, 0)])
    b = subspace_from_vectors(QQ, 3, [qvec(1, 0, 0)])
    with pytest.raises(ValueError):
        span_sum(a, b)
    gf = PrimeField(7)
    c = subspace_from_vectors(gf, 2, [[1, 0]])
    with pytest.raises(FieldMismatchError):
        span_sum(a, c)


def test_span_sum_commutative_associative():
    rng = random.Random(5)
    for _ in range(10):
        spaces = [
            subspace_from_vectors(
                QQ, 4, [qvec(*(rng.randint(-3, 3) for _ in range(4))) for _ in range(2)]
            )
            for _ in range(3)
        ]
        a, b, c = spaces
        assert subspaces_equal(span_sum(a, b), span_sum(b, a))
        assert subspaces_equal(span_sum(span_sum(a, b), c), span_sum(a, span_sum(b, c)))


def test_random_in_span_single_vector():
    s = subspace_from_vectors(QQ, 3, [qvec(1, 0, 0)])
    rng = random.Random(0)
    for _ in range(10):
        v = random_in_span(s, 1, rng)
        assert v in (qvec(1, 0, 0), qvec(-1, 0, 0))


def test_random_in_span_membership():
    rng = random.Random(1)
    for _ in range(20):
        vecs = [qvec(*(rng.randint(-4, 4) for _ in range(5))) for _ in range(3)]
        s = subspace_from_vectors(QQ, 5, vecs)
        if s.dim == 0:
            continue
        v = random_in_span(s, 3, rng)
        assert any(x != 0 for x in v)
        assert subspace_contains(s, v)
        assert solve_membership(s, v) is not None


def test_random_in_span_rejects_zero_subspace():
    s = Subspace(QQ, 3, [])
    with pytest.raises(ValueError):
        random_in_span(s, 2, random.Random(0))


def test_solve_membership_coordinates():
    s = subspace_from_vectors(QQ, 3, [qvec(1, 0, 0), qvec(0, 1, 0)])
    assert solve_membership(s, qvec(1, 1, 0)) == [1, 1]
    assert solve_membership(subspace_from_vectors(QQ, 2, [qvec(1, 0)]), qvec(0, 1)) is None
    scaled = subspace_from_vectors(QQ, 2, [qvec(2, 0)])
    assert solve_membership(scaled, qvec(1, 0)) == [Fraction(1, 2)]


def test_subspaces_equal_by_mutual_membership():
    a = subspace_from_vectors(QQ, 3, [qvec(1, 1, 0), qvec(1, -1, 0)])
    b = subspace_from_vectors(QQ, 3, [qvec(1, 0, 0), qvec(0, 1, 0)])
    assert subspaces_equal(a, b)
    c = subspace_from_vectors(QQ, 3, [qvec(1, 0, 0), qvec(0, 0, 1)])
    assert not subspaces_equal(a, c)


def test_rank_of_rows_prime_field_matches_default_prime():
    gf = PrimeField(DEFAULT_PRIME)
    rows = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]
    assert rank_of_rows(gf, rows) == 2
    assert rank_of_rows(QQ, [[Fraction(x) for x in r] for r in rows]) == 2
