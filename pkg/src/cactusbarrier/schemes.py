"""Finite subschemes as unions of local pieces, their spans, and limits of spans.

Supported local pieces are reduced points, curvilinear germs (jets of a curve),
and first infinitesimal neighborhoods. These three families have unambiguous
span computations and already realize the span-degeneration phenomena this
package verifies; arbitrary zero-dimensional ideals are out of scope.

Flat limits are never computed here. A one-parameter family carries its own
explicitly stated limit, and the code checks that the span of the stated limit
sits inside the limit of the family's spans, which it computes exactly by
t-saturation over the polynomial ring.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactalg import (
    Matrix,
    Subspace,
    nullspace,
    rank_of_rows,
    subspace_from_vectors,
)
from .fields import QQ, PolyRing
from .varieties import (
    Germ,
    VarietyParam,
    evaluate,
    evaluate_in_ring,
    jet_vectors,
    jet_vectors_in_ring,
    tangent_vectors_in_ring,
)


class OverlappingSupportsError(ValueError):
    """Raised when two local pieces share a support point."""


@dataclass(frozen=True)
class ReducedPoint:
    """A single reduced chart point; degree 1."""

    point: tuple

    @property
    def support(self) -> tuple:
        return self.point

    @property
    def degree(self) -> int:
        return 1


@dataclass(frozen=True)
class CurvilinearGerm:
    """Jet of a curve germ up to order length-1; degree = length."""

    germ: Germ
    length: int

    @property
    def support(self) -> tuple:
        return self.germ.base

    @property
    def degree(self) -> int:
        return self.length


@dataclass(frozen=True)
class FirstNeighborhood:
    """A point together with all its first-order directions; degree = dim_X + 1."""

    point: tuple

    @property
    def support(self) -> tuple:
        return self.point

    @property
    def degree(self) -> int:
        return len(self.point) + 1


Piece = ReducedPoint | CurvilinearGerm | FirstNeighborhood


@dataclass(frozen=True)
class FiniteScheme:
    """A zero-dimensional subscheme given as a union of local pieces with disjoint supports."""

    pieces: tuple

    @property
    def degree(self) -> int:
        return sum(p.degree for p in self.pieces)

    def supports(self) -> list[tuple]:
        return [p.support for p in self.pieces]


def degree(scheme: FiniteScheme) -> int:
    return scheme.degree


def validate_scheme(param: VarietyParam, scheme: FiniteScheme) -> None:
    seen = set()
    for p in scheme.pieces:
        if len(p.support) != param.dim_X:
            raise ValueError(
                f"piece support length {len(p.support)} does not match dim_X={param.dim_X}"
            )
        if p.support in seen:
            raise OverlappingSupportsError(f"two pieces share the support {p.support}")
        seen.add(p.support)
        if isinstance(p, CurvilinearGerm):
            if p.length < 2:
                raise ValueError("curvilinear pieces need length >= 2")
            if not p.germ.coeffs or not any(p.germ.coeffs[0]):
                raise ValueError("curvilinear germ needs a nonzero first-order direction")


def piece_span_vectors(param: VarietyParam, piece: Piece, field=QQ) -> list[list]:
    if isinstance(piece, ReducedPoint):
        return [evaluate(param, piece.point, field)]
    if isinstance(piece, CurvilinearGerm):
        return jet_vectors(param, piece.germ, piece.length, field)
    if isinstance(piece, FirstNeighborhood):
        coords = [field.of(x) for x in piece.point]
        return tangent_vectors_in_ring(param, coords, field)
    raise TypeError(f"unknown piece type {type(piece).__name__}")


def scheme_span_vectors(param: VarietyParam, scheme: FiniteScheme, field=QQ) -> list[list]:
    """Raw spanning vectors of the scheme, concatenated piece by piece."""
    validate_scheme(param, scheme)
    out = []
    for p in scheme.pieces:
        out.extend(piece_span_vectors(param, p, field))
    return out


def scheme_span(param: VarietyParam, scheme: FiniteScheme, field=QQ) -> Subspace:
    """Linear span of the scheme; its dimension never exceeds the degree."""
    return subspace_from_vectors(field, param.dim_W, scheme_span_vectors(param, scheme, field))


_MIX_KINDS = {
    "reduced": ("reduced",),
    "curv": ("curv",),
    "nbhd": ("nbhd",),
    "mixed": ("reduced", "curv", "nbhd"),
}


def _fresh_support(param: VarietyParam, bound: int, rng, used: set) -> tuple:
    for _ in range(200):
        pt = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(param.dim_X))
        if pt not in used:
            used.add(pt)
            return pt
    raise ValueError(
        f"cannot place distinct supports with bound {bound} in dimension {param.dim_X}"
    )


def _random_direction(dim: int, bound: int, rng) -> tuple:
    while True:
        c = tuple(Fraction(rng.randint(-bound, bound)) for _ in range(dim))
        if any(c):
            return c


def random_scheme(param: VarietyParam, degree_budget: int, mix: str = "mixed",
                  bound: int = 3, rng=None) -> FiniteScheme:
    """A random scheme of total degree exactly `degree_budget` with distinct supports."""
    if rng is None:
        raise ValueError("an explicit rng is required")
    if degree_budget < 1:
        raise ValueError("degree budget must be at least 1")
    if bound < 1:
        raise ValueError("support bound must be at least 1")
    if mix not in _MIX_KINDS:
        raise ValueError(f"unknown mix {mix!r}; choose from {sorted(_MIX_KINDS)}")
    kinds = _MIX_KINDS[mix]
    nbhd_deg = param.dim_X + 1
    minimal = min({"reduced": 1, "curv": 2, "nbhd": nbhd_deg}[k] for k in kinds)
    if degree_budget < minimal:
        raise ValueError(
            f"degree {degree_budget} is below the smallest admissible piece ({minimal}) for mix {mix!r}"
        )
    if kinds == ("nbhd",) and degree_budget % nbhd_deg:
        raise ValueError(
            f"degree {degree_budget} is not a multiple of the neighborhood degree {nbhd_deg}"
        )

    used: set = set()
    pieces: list[Piece] = []
    remaining = degree_budget
    while remaining:
        options = []
        if "reduced" in kinds and remaining >= 1:
            options.append("reduced")
        if "curv" in kinds and remaining >= 2:
            options.append("curv")
        if "nbhd" in kinds and remaining >= nbhd_deg:
            if kinds != ("nbhd",) or remaining % nbhd_deg == 0:
                options.append("nbhd")
        if not options:
            raise ValueError(
                f"cannot fill remaining degree {remaining} under mix {mix!r}"
            )
        kind = rng.choice(options)
        if kind == "reduced":
            pieces.append(ReducedPoint(_fresh_support(param, bound, rng, used)))
            remaining -= 1
        elif kind == "nbhd":
            pieces.append(FirstNeighborhood(_fresh_support(param, bound, rng, used)))
            remaining -= nbhd_deg
        else:
            lengths = [l for l in range(2, remaining + 1) if remaining - l != 1 or "reduced" in kinds]
            length = rng.choice(lengths)
            base = _fresh_support(param, bound, rng, used)
            coeffs = [_random_direction(param.dim_X, bound, rng)]
            for _ in range(length - 2):
                coeffs.append(tuple(Fraction(rng.randint(-bound, bound)) for _ in range(param.dim_X)))
            pieces.append(CurvilinearGerm(Germ(base, tuple(coeffs)), length))
            remaining -= length
    return FiniteScheme(tuple(pieces))


@dataclass
class SpanFamily:
    """A family of subspaces over a punctured disk, spanned by polynomial vectors in t.

    The basis must have full generic rank (rank over the fraction field of the
    polynomial ring equals the basis length).
    """

    ambient_dim: int
    basis: list
    ring: PolyRing


def generic_rank(fam: SpanFamily) -> int:
    return rank_of_rows(fam.ring, fam.basis)


def limit_of_spans(fam: SpanFamily) -> Subspace:
    """The t->0 limit of the family of spans, computed by exact t-saturation.

    Iteratively: evaluate at t=0; while the rank drops, replace a dependent
    combination by its quotient by the largest possible power of t; repeat.
    The output dimension equals the generic rank of the family.
    """
    ring = fam.ring
    base = ring.base
    m = len(fam.basis)
    if m == 0:
        return Subspace(base, fam.ambient_dim, [])
    vecs = [list(v) for v in fam.basis]
    for v in vecs:
        vals = [ring.valuation(e) for e in v if not ring.is_zero(e)]
        if not vals:
            raise ValueError("family contains an identically zero column")
        shift = min(vals)
        if shift:
            for j in range(fam.ambient_dim):
                v[j] = ring.shift_down(v[j], shift)
    if rank_of_rows(ring, vecs) != m:
        raise ValueError("family basis drops rank generically (non-flat presentation)")

    max_steps = sum(max(ring.degree(e), 0) for v in vecs for e in v) + m + 8
    for _ in range(max_steps):
        at0 = [[ring.eval_at_zero(e) for e in v] for v in vecs]
        if rank_of_rows(base, at0) == m:
            return subspace_from_vectors(base, fam.ambient_dim, at0)
        kernel = nullspace(Matrix(base, [[at0[i][j] for i in range(m)] for j in range(fam.ambient_dim)]))
        combo = kernel[0]
        target = max(i for i, c in enumerate(combo) if not base.is_zero(c))
        new = [ring.zero] * fam.ambient_dim
        for i, c in enumerate(combo):
            if base.is_zero(c):
                continue
            pc = ring.const(c)
            for j in range(fam.ambient_dim):
                new[j] = ring.add(new[j], ring.mul(pc, vecs[i][j]))
        vals = [ring.valuation(e) for e in new if not ring.is_zero(e)]
        if not vals:
            raise ValueError("family basis drops rank generically (non-flat presentation)")
        shift = min(vals)
        vecs[target] = [ring.shift_down(e, shift) for e in new]
    raise RuntimeError("t-saturation did not stabilize; malformed family")


def family_piece_span_vectors(param: VarietyParam, piece: Piece, ring: PolyRing) -> list[list]:
    """Spanning vectors of one family piece whose chart data are polynomials in t."""
    if isinstance(piece, ReducedPoint):
        return [evaluate_in_ring(param, list(piece.point), ring)]
    if isinstance(piece, CurvilinearGerm):
        return jet_vectors_in_ring(
            param, list(piece.germ.base), [list(c) for c in piece.germ.coeffs],
            piece.length, ring,
        )
    if isinstance(piece, FirstNeighborhood):
        return tangent_vectors_in_ring(param, list(piece.point), ring)
    raise TypeError(f"unknown piece type {type(piece).__name__}")


def family_span(param: VarietyParam, pieces, ring: PolyRing | None = None) -> SpanFamily:
    """SpanFamily of a scheme family, keeping a generically independent subset."""
    if ring is None:
        ring = PolyRing(QQ)
    raw = []
    for p in pieces:
        raw.extend(family_piece_span_vectors(param, p, ring))
    kept: list = []
    for v in raw:
        if rank_of_rows(ring, kept + [v]) > len(kept):
            kept.append(v)
    return SpanFamily(param.dim_W, kept, ring)


@dataclass
class LimitComparison:
    """Dimensions of the span of the stated limit vs the limit of the spans."""

    dim_span_limit: int
    dim_limit_spans: int
    inclusion_holds: bool

    @property
    def strict(self) -> bool:
        return self.inclusion_holds and self.dim_span_limit < self.dim_limit_spans


def span_of_limit_vs_limit_of_spans(param: VarietyParam, family_pieces,
                                    limit_scheme: FiniteScheme, field=QQ) -> LimitComparison:
    """Check that the span of the stated limit lies inside the limit of the spans.

    The family is a list of pieces whose chart data are polynomials in t; the
    flat limit at t=0 is supplied by the caller, not computed.
    """
    ring = PolyRing(field)
    fam = family_span(param, family_pieces, ring)
    lim = limit_of_spans(fam)
    span0 = scheme_span(param, limit_scheme, field)
    builder = lim.builder()
    inclusion = all(builder.contains(v) for v in span0.basis)
    return LimitComparison(span0.dim, lim.dim, inclusion)


def constant_family_pieces(pieces, field=QQ) -> list:
    """Lift a rational scheme to a constant-in-t family (each coordinate a constant polynomial)."""
    ring = PolyRing(field)
    out = []
    for p in pieces:
        if isinstance(p, ReducedPoint):
            out.append(ReducedPoint(tuple(ring.of(x) for x in p.point)))
        elif isinstance(p, CurvilinearGerm):
            base = tuple(ring.of(x) for x in p.germ.base)
            coeffs = tuple(tuple(ring.of(x) for x in c) for c in p.germ.coeffs)
            out.append(CurvilinearGerm(Germ(base, coeffs), p.length))
        elif isinstance(p, FirstNeighborhood):
            out.append(FirstNeighborhood(tuple(ring.of(x) for x in p.point)))
        else:
            raise TypeError(f"unknown piece type {type(p).__name__}")
    return out


def perturbed_family(scheme: FiniteScheme, rng, bound: int = 2, tdeg: int = 2, field=QQ) -> list:
    """Random polynomial deformation of a scheme whose member at t=0 is the scheme itself.

    Constant terms are kept, higher t-coefficients are random integers, so the
    stated limit of the family is exactly the input scheme.
    """
    ring = PolyRing(field)

    def wiggle(x):
        return ring.from_coeffs([x] + [rng.randint(-bound, bound) for _ in range(tdeg)])

    out = []
    for p in scheme.pieces:
        if isinstance(p, ReducedPoint):
            out.append(ReducedPoint(tuple(wiggle(x) for x in p.point)))
        elif isinstance(p, CurvilinearGerm):
            base = tuple(wiggle(x) for x in p.germ.base)
            coeffs = tuple(tuple(wiggle(x) for x in c) for c in p.germ.coeffs)
            out.append(CurvilinearGerm(Germ(base, coeffs), p.length))
        elif isinstance(p, FirstNeighborhood):
            out.append(FirstNeighborhood(tuple(wiggle(x) for x in p.point)))
        else:
            raise TypeError(f"unknown piece type {type(p).__name__}")
    return out
