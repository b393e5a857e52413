"""Segre-Veronese parameterizations in affine charts: points, jets, tangent frames.

A variety is a product of factors; factor (n, d) contributes all monomials of
degree exactly d in (1, u_1, ..., u_n), and the full chart map is the Kronecker
product over factors. Chart coordinates of the ambient tensor space are indexed
accordingly, so a point evaluation is just a vector of monomials; its leading
entry is always 1, which keeps chart images away from zero.

Jets of curve germs are computed by truncated polynomial composition, never by
differentiating and dividing by factorials, so they stay correct over prime
fields (subject to the characteristic guard below).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .exactalg import Subspace, subspace_from_vectors
from .fields import QQ, PolyRing


class VarietySpecError(ValueError):
    """Raised for malformed variety spec strings."""


@dataclass(frozen=True)
class Factor:
    """One chart factor: n affine coordinates embedded by degree-d monomials."""

    n: int
    d: int

    @property
    def dim(self) -> int:
        return math.comb(self.n + self.d, self.d)


@lru_cache(maxsize=None)
def monomial_exponents(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Affine exponent tuples (e_1..e_n) with sum <= d, in canonical order.

    Canonical order is by total degree, then by exponent tuple with earlier
    variables weighted heavier, so (n=1, d=2) enumerates 1, u, u^2 and
    (n=2, d=1) enumerates 1, u_1, u_2.
    """
    exps = [e for e in product(range(d + 1), repeat=n) if sum(e) <= d]
    exps.sort(key=lambda e: (sum(e), tuple(-x for x in e)))
    return tuple(exps)


@lru_cache(maxsize=None)
def monomial_index(n: int, d: int) -> dict[tuple[int, ...], int]:
    return {e: i for i, e in enumerate(monomial_exponents(n, d))}


def homogeneous_exponents(n: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Degree-d exponent tuples over n+1 variables, aligned with the affine order."""
    return tuple((d - sum(e),) + e for e in monomial_exponents(n, d))


def homogeneous_index(n: int, d: int, exps: tuple[int, ...]) -> int:
    if len(exps) != n + 1 or sum(exps) != d or any(e < 0 for e in exps):
        raise ValueError(f"not a degree-{d} exponent tuple over {n + 1} variables: {exps}")
    return monomial_index(n, d)[tuple(exps[1:])]


class VarietyParam:
    """Chart parameterization of a product of Veronese factors in one tensor space."""

    def __init__(self, factors, spec: str | None = None):
        factors = tuple(Factor(*f) if not isinstance(f, Factor) else f for f in factors)
        if not factors:
            raise VarietySpecError("a variety needs at least one factor")
        for f in factors:
            if f.n < 1 or f.d < 1:
                raise VarietySpecError(f"factor {f} must have n >= 1 and d >= 1")
        self.factors = factors
        self.dim_X = sum(f.n for f in factors)
        self.factor_dims = tuple(f.dim for f in factors)
        self.dim_W = math.prod(self.factor_dims)
        self.max_degree = max(f.d for f in factors)
        self.spec = spec if spec is not None else format_variety(factors)

    def __repr__(self):
        return f"VarietyParam({self.spec!r})"

    def __eq__(self, other):
        return isinstance(other, VarietyParam) and other.factors == self.factors

    def __hash__(self):
        return hash(self.factors)


def format_variety(factors) -> str:
    factors = tuple(Factor(*f) if not isinstance(f, Factor) else f for f in factors)
    if len(factors) == 1 and factors[0].d >= 1:
        f = factors[0]
        return f"veronese:{f.n},{f.d}"
    if all(f.d == 1 for f in factors):
        return "segre:" + "x".join(str(f.n + 1) for f in factors)
    return "segre-veronese:" + "x".join(f"({f.n},{f.d})" for f in factors)


def parse_variety(spec: str) -> VarietyParam:
    """Parse "segre:a x b x c", "veronese:n,d" or "segre-veronese:(n1,d1)x(n2,d2)x..."."""
    s = spec.replace(" ", "")
    if s.startswith("segre-veronese:"):
        body = s[len("segre-veronese:"):]
        pairs = re.findall(r"\((\d+),(\d+)\)", body)
        if not pairs or "x".join(f"({a},{b})" for a, b in pairs) != body:
            raise VarietySpecError(f"cannot parse segre-veronese spec {spec!r}")
        return VarietyParam([(int(a), int(b)) for a, b in pairs], spec=s)
    if s.startswith("segre:"):
        dims = s[len("segre:"):].split("x")
        try:
            dims = [int(d) for d in dims]
        except ValueError:
            raise VarietySpecError(f"cannot parse segre spec {spec!r}") from None
        if any(d < 2 for d in dims):
            raise VarietySpecError("segre factor dimensions must be at least 2")
        return VarietyParam([(d - 1, 1) for d in dims], spec=s)
    if s.startswith("veronese:"):
        m = re.fullmatch(r"veronese:(\d+),(\d+)", s)
        if not m:
            raise VarietySpecError(f"cannot parse veronese spec {spec!r}")
        return VarietyParam([(int(m.group(1)), int(m.group(2)))], spec=s)
    raise VarietySpecError(f"unknown variety spec {spec!r}")


@dataclass(frozen=True)
class Germ:
    """Polynomial curve germ in a chart: base + c_1 t + ... + c_m t^m."""

    base: tuple
    coeffs: tuple = ()


def _split_coords(param: VarietyParam, coords):
    pos = 0
    for f in param.factors:
        yield f, coords[pos:pos + f.n]
        pos += f.n


def _factor_monomials(factor: Factor, u: list, ring) -> list:
    pows = []
    for x in u:
        px = [ring.one]
        for _ in range(factor.d):
            px.append(ring.mul(px[-1], x))
        pows.append(px)
    out = []
    for exps in monomial_exponents(factor.n, factor.d):
        v = ring.one
        for j, e in enumerate(exps):
            if e:
                v = ring.mul(v, pows[j][e])
        out.append(v)
    return out


def _kron(vectors: list[list], ring) -> list:
    out = vectors[0]
    for nxt in vectors[1:]:
        out = [ring.mul(a, b) for a in out for b in nxt]
    return out


def evaluate_in_ring(param: VarietyParam, coords: list, ring) -> list:
    """Chart map evaluated on coordinates that are elements of an arbitrary ring."""
    if len(coords) != param.dim_X:
        raise ValueError(
            f"chart point has length {len(coords)}, expected {param.dim_X}"
        )
    parts = [_factor_monomials(f, list(u), ring) for f, u in _split_coords(param, coords)]
    return _kron(parts, ring)


def evaluate(param: VarietyParam, chart_point, field=QQ) -> list:
    """Affine-cone point of the chart map; its leading coordinate is always 1."""
    return evaluate_in_ring(param, [field.of(x) for x in chart_point], field)


def _check_characteristic(field, param: VarietyParam, jet_length: int) -> None:
    if field.char and field.char <= param.max_degree * jet_length:
        raise ValueError(
            f"characteristic {field.char} too small for degree {param.max_degree} "
            f"jets of length {jet_length}; need p > {param.max_degree * jet_length}"
        )


def jet_vectors_in_ring(param: VarietyParam, base: list, coeffs: list, length: int, ring) -> list[list]:
    """Coefficient vectors of orders 0..length-1 of the chart map along a germ.

    `base` and each entry of `coeffs` are ring elements; computed by truncated
    polynomial composition.
    """
    if length < 1:
        raise ValueError("jet length must be at least 1")
    pr = PolyRing(ring, trunc=length)
    coords = []
    for j in range(param.dim_X):
        cs = [base[j]] + [c[j] for c in coeffs[: length - 1]]
        coords.append(pr.from_elems(cs))
    w = evaluate_in_ring(param, coords, pr)
    return [[pr.coeff(entry, m) for entry in w] for m in range(length)]


def jet_vectors(param: VarietyParam, germ: Germ, length: int, field=QQ) -> list[list]:
    _check_characteristic(field, param, length)
    base = [field.of(x) for x in germ.base]
    coeffs = [[field.of(x) for x in c] for c in germ.coeffs]
    return jet_vectors_in_ring(param, base, coeffs, length, field)


def jet_span(param: VarietyParam, germ: Germ, length: int, field=QQ) -> Subspace:
    """Span of the order-<length Taylor coefficient vectors along the germ."""
    if len(germ.base) != param.dim_X:
        raise ValueError("germ base does not match the chart dimension")
    if length >= 2:
        if not germ.coeffs or not any(germ.coeffs[0]):
            raise ValueError("germ must have a nonzero first-order direction")
    return subspace_from_vectors(field, param.dim_W, jet_vectors(param, germ, length, field))


def tangent_vectors_in_ring(param: VarietyParam, coords: list, ring) -> list[list]:
    """Chart point together with all first partial derivative vectors."""
    out = [evaluate_in_ring(param, coords, ring)]
    for j in range(param.dim_X):
        direction = [ring.one if i == j else ring.zero for i in range(param.dim_X)]
        out.append(jet_vectors_in_ring(param, coords, [direction], 2, ring)[1])
    return out


def tangent_frame(param: VarietyParam, chart_point, field=QQ) -> Subspace:
    """Affine tangent space of the cone at a chart point; dim = dim_X + 1 here."""
    _check_characteristic(field, param, 2)
    coords = [field.of(x) for x in chart_point]
    return subspace_from_vectors(
        field, param.dim_W, tangent_vectors_in_ring(param, coords, field)
    )


def random_chart_point(param: VarietyParam, bound: int, rng) -> tuple:
    return tuple(Fraction(rng.randint(-bound, bound)) for _ in range(param.dim_X))


def random_point(param: VarietyParam, bound: int, rng, field=QQ) -> list:
    """Evaluate at a uniformly random integer chart point in [-bound, bound]^dim_X."""
    return evaluate(param, random_chart_point(param, bound, rng), field)
