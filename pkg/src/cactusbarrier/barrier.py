"""Verification of the barrier inequalities on concrete scheme instances.

The verified statement is always the same: for F in the span of a finite
subscheme of degree r on a smooth chart variety, rank M(F) <= k * r for any
linear matrix map whose rank on chart points is at most k. Instances are
screened over a large prime field and confirmed over the rationals; a confirmed
violation is a build-stopping bug, never a discovery, since only smooth
varieties are in scope here.

The ceiling calculator reports the closed-form degrees at which scheme spans
fill the ambient space, which cap every bound any such method can certify.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .exactalg import (
    DEFAULT_PRIME,
    Subspace,
    SpanBuilder,
    rank,
    rank_of_rows,
)
from .fields import QQ, PrimeField
from .rankmethods import LinearMatrixMap, RankMethod, evaluate_map
from .schemes import FiniteScheme, scheme_span, scheme_span_vectors
from .varieties import VarietyParam, parse_variety


@dataclass
class BarrierReport:
    """Outcome of one verified instance."""

    variety: str
    method: str
    k: int
    k_source: str
    degree: int
    span_dim: int
    rank: int
    bound: int
    passed: bool
    field: str
    fp_rank: int | None = None
    qq_confirmed: bool = False
    seed: int | None = None
    kind: str = "instance"
    extra: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "variety": self.variety,
            "method": self.method,
            "k": self.k,
            "k_source": self.k_source,
            "degree": self.degree,
            "span_dim": self.span_dim,
            "rank": self.rank,
            "bound": self.bound,
            "passed": self.passed,
            "field": self.field,
            "fp_rank": self.fp_rank,
            "qq_confirmed": self.qq_confirmed,
            "seed": self.seed,
        }
        d.update(self.extra)
        return d


def _sample_combination(field, vectors: list, bound: int, rng) -> tuple[list, list]:
    """Nonzero integer combination of raw spanning vectors; returns (coeffs, vector)."""
    n = len(vectors[0])
    for _ in range(64):
        coeffs = [rng.randint(-bound, bound) for _ in range(len(vectors))]
        if not any(coeffs):
            continue
        out = [field.zero] * n
        for c, v in zip(coeffs, vectors):
            if c:
                fc = field.of(c)
                for j in range(n):
                    out[j] = field.add(out[j], field.mul(fc, v[j]))
        if any(not field.is_zero(x) for x in out):
            return coeffs, out
    raise RuntimeError("could not sample a nonzero span element")


def _reduce_vec(field, vec) -> list:
    return [field.of(x) for x in vec]


def verify_instance(param: VarietyParam, scheme: FiniteScheme, method: RankMethod,
                    rng, *, prime: int | None = DEFAULT_PRIME, confirm: str = "full",
                    bound: int = 5, seed: int | None = None) -> BarrierReport:
    """Sample F in the span of the scheme and check rank M(F) <= k * degree.

    ``confirm`` controls the rational pass after prime-field screening:
    "full" always recomputes over the rationals, "tight" only when the
    screened rank reaches or exceeds the bound, "never" reports the screened
    numbers as-is. With ``prime=None`` everything runs over the rationals.
    """
    if confirm not in ("full", "tight", "never"):
        raise ValueError(f"unknown confirm policy {confirm!r}")
    if method.map.w != param.dim_W:
        raise ValueError(
            f"method acts on W of dimension {method.map.w}, variety has {param.dim_W}"
        )
    r = scheme.degree
    cap = method.k * r
    if r == 0:
        return BarrierReport(param.spec, method.spec, method.k, method.k_source,
                             0, 0, 0, 0, True, "QQ", qq_confirmed=True, seed=seed)

    raw_q = scheme_span_vectors(param, scheme, QQ)
    coeffs, f_q = _sample_combination(QQ, raw_q, bound, rng)

    fp_rank = None
    if prime is not None:
        gf = PrimeField(prime)
        raw_p = [_reduce_vec(gf, v) for v in raw_q]
        f_p = _reduce_vec(gf, f_q)
        fp_rank = rank(evaluate_map(method.map, f_p, gf))
        if confirm == "never":
            passed = fp_rank <= cap
            return BarrierReport(param.spec, method.spec, method.k, method.k_source,
                                 r, rank_of_rows(gf, raw_p), fp_rank, cap, passed,
                                 gf.name, fp_rank=fp_rank, seed=seed)
        if confirm == "tight" and fp_rank < cap:
            passed = True
            return BarrierReport(param.spec, method.spec, method.k, method.k_source,
                                 r, rank_of_rows(gf, raw_p), fp_rank, cap, passed,
                                 gf.name, fp_rank=fp_rank, seed=seed)

    rank_q = rank(evaluate_map(method.map, f_q, QQ))
    passed = rank_q <= cap
    return BarrierReport(param.spec, method.spec, method.k, method.k_source,
                         r, rank_of_rows(QQ, raw_q), rank_q, cap, passed, "QQ",
                         fp_rank=fp_rank, qq_confirmed=True, seed=seed,
                         extra={"combination": coeffs})


def minimal_factor_subspace(m: LinearMatrixMap, u: Subspace) -> Subspace:
    """Smallest subspace B' of the column index space with every M(x), x in u, inside A (x) B'.

    Concretely the span of all rows of M(x) over a basis of u; when u is the
    span of a degree-r scheme and the method constant is k, its dimension is
    at most k * r.
    """
    if u.ambient_dim != m.w:
        raise ValueError(f"subspace lives in dimension {u.ambient_dim}, map needs {m.w}")
    field = u.field
    builder = SpanBuilder(field, m.b)
    for x in u.basis:
        mat = evaluate_map(m, x, field)
        for row in mat.rows:
            builder.add(row)
    return builder.to_subspace()


def verify_join_decomposition(param1: VarietyParam, param2: VarietyParam,
                              r1: FiniteScheme, r2: FiniteScheme, method: RankMethod,
                              rng, *, prime: int | None = DEFAULT_PRIME,
                              confirm: str = "full", bound: int = 5,
                              seed: int | None = None) -> BarrierReport:
    """Sample F in the span of {F1, F2} with Fi in the span of Ri and check the joint bound.

    The two schemes play the role of pieces on disjoint (regions of) varieties;
    the empty scheme is allowed on either side, matching the conventions that
    degree zero contributes nothing and a join with nothing is the other side.
    """
    if param1.spec != param2.spec or param1.dim_W != param2.dim_W:
        raise ValueError("join verification needs two copies of the same chart variety")
    overlap = set(r1.supports()) & set(r2.supports())
    if overlap:
        raise ValueError(f"scheme supports overlap at {sorted(overlap)}")
    d1, d2 = r1.degree, r2.degree
    cap = method.k * (d1 + d2)

    parts = []
    for scheme in (r1, r2):
        if scheme.degree:
            raw = scheme_span_vectors(param1, scheme, QQ)
            _, f = _sample_combination(QQ, raw, bound, rng)
            parts.append(f)
    if not parts:
        return BarrierReport(param1.spec, method.spec, method.k, method.k_source,
                             0, 0, 0, 0, True, "QQ", qq_confirmed=True, seed=seed,
                             kind="join", extra={"degree1": 0, "degree2": 0})

    _, f_q = _sample_combination(QQ, parts, bound, rng)
    extra = {"degree1": d1, "degree2": d2}
    fp_rank = None
    if prime is not None:
        gf = PrimeField(prime)
        fp_rank = rank(evaluate_map(method.map, _reduce_vec(gf, f_q), gf))
        if confirm == "never" or (confirm == "tight" and fp_rank < cap):
            span_dim = rank_of_rows(gf, [_reduce_vec(gf, p) for p in parts])
            return BarrierReport(param1.spec, method.spec, method.k, method.k_source,
                                 d1 + d2, span_dim, fp_rank, cap, fp_rank <= cap,
                                 gf.name, fp_rank=fp_rank, seed=seed, kind="join",
                                 extra=extra)
    rank_q = rank(evaluate_map(method.map, f_q, QQ))
    return BarrierReport(param1.spec, method.spec, method.k, method.k_source,
                         d1 + d2, rank_of_rows(QQ, parts), rank_q, cap,
                         rank_q <= cap, "QQ", fp_rank=fp_rank, qq_confirmed=True,
                         seed=seed, kind="join", extra=extra)


def grassmann_containment(e: Subspace, param: VarietyParam, scheme: FiniteScheme) -> bool:
    """True iff every basis vector of the plane lies in the span of the scheme.

    A positive answer witnesses membership of the plane in the corresponding
    pre-closure Grassmann locus; nothing is asserted beyond the witness.
    """
    if e.ambient_dim != param.dim_W:
        raise ValueError("plane and variety live in different ambient spaces")
    span = scheme_span(param, scheme, e.field)
    builder = span.builder()
    return all(builder.contains(v) for v in e.basis)


class UnsupportedVarietyError(ValueError):
    """Raised when no ceiling formula is on record for the requested variety."""


@dataclass
class CeilingReport:
    """Closed-form ceilings for a variety; every number carries its formula label."""

    variety: str
    cactus_ceiling: int | None
    secant_fill_in: int
    grassmann_ceiling: int | None
    labels: dict
    notes: list

    def to_dict(self) -> dict:
        return {
            "variety": self.variety,
            "cactus_ceiling": self.cactus_ceiling,
            "secant_fill_in": self.secant_fill_in,
            "grassmann_ceiling": self.grassmann_ceiling,
            "labels": self.labels,
            "notes": self.notes,
        }


def ceilings(variety) -> CeilingReport:
    """Ceiling constants for three-factor Segre and Veronese varieties.

    Reports the degree g at which spans of degree-g schemes fill the ambient
    space (so no linear rank method can certify border rank beyond g), the
    generic-secant fill-in lower bound, and, for balanced three-factor Segre,
    the analogous ceiling for planes. Numbers are only reported where a
    closed formula is on record; nothing is guessed.
    """
    param = parse_variety(variety) if isinstance(variety, str) else variety
    labels: dict = {}
    notes: list = []
    fill_in = -(-param.dim_W // (param.dim_X + 1))
    labels["secant_fill_in"] = "ceil(dim W / (dim X + 1))"

    g = None
    g2 = None
    if len(param.factors) == 3 and all(f.d == 1 for f in param.factors):
        a, b, c = (f.n + 1 for f in param.factors)
        g = 2 * (a + b + c - 2)
        labels["cactus_ceiling"] = "2(a+b+c-2)"
        labels["secant_fill_in"] = "ceil(abc / (a+b+c-2))"
        if a == b == c:
            labels["cactus_ceiling"] = "2(a+b+c-2) = 6m-4"
            g2 = 3 * a - 1
            labels["grassmann_ceiling"] = "3m-1"
    elif len(param.factors) == 1:
        f = param.factors[0]
        if f.d == 3:
            notes.append(
                "generic cactus rank of cubics admits a known upper bound from "
                "small apolar schemes; no closed formula is reported here"
            )
        else:
            notes.append("no cactus ceiling formula on record for this variety")
    else:
        raise UnsupportedVarietyError(
            f"no ceiling formulas on record for {param.spec}; "
            "supported: three-factor segre and veronese"
        )
    return CeilingReport(param.spec, g, fill_in, g2, labels, notes)
