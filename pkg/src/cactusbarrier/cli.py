"""Command-line front end: bound, verify, ceiling, limit, estimate-k.

Campaigns derive one seed per trial from the root seed, so identical seeds
give byte-identical report streams and --jobs only changes wall time, never
output. Exit codes: 0 all pass, 1 rationally confirmed barrier violation
(an implementation bug), 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import random
import sys
from multiprocessing import Pool

from .barrier import UnsupportedVarietyError, ceilings, verify_instance
from .exactalg import DEFAULT_PRIME, rank
from .fields import QQ, PolyRing, PrimeField, is_probable_prime
from .fileformats import (
    FileFormatError,
    custom_map_from_tensor,
    load_family,
    load_scheme,
    load_tensor,
)
from .rankmethods import (
    DenseTensor,
    MethodSpecError,
    RankMethod,
    SymmetricForm,
    catalecticant,
    check_k_consistency,
    estimate_k,
    evaluate_map,
    flattening,
    koszul_flattening,
    parse_method,
    parse_split,
)
from .schemes import (
    LimitComparison,
    SpanFamily,
    limit_of_spans,
    random_scheme,
    scheme_span,
    span_of_limit_vs_limit_of_spans,
    validate_scheme,
)
from .varieties import VarietySpecError, parse_variety

ENV_SEED = "CACTUS_BARRIER_SEED"


class CliError(Exception):
    """Usage-level error; maps to exit code 2."""


def derive_seed(root: int, *parts) -> int:
    """Deterministic per-trial seed: first 8 bytes of sha256 over root and parts."""
    text = ":".join([str(root)] + [str(p) for p in parts])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")


def _root_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise CliError(f"{ENV_SEED} must be an integer, got {env!r}") from None
    return 0


def _parse_field(text: str):
    if text in ("q", "qq", "QQ"):
        return None
    if text.startswith("p:"):
        try:
            p = int(text[2:])
        except ValueError:
            raise CliError(f"bad field spec {text!r}") from None
        if not is_probable_prime(p):
            raise CliError(f"field modulus {p} is not prime")
        return p
    raise CliError(f"bad field spec {text!r}; use q or p:PRIME")


def _parse_scheme_spec(spec: str):
    """Returns ("random", params) or ("file", path)."""
    s = spec.strip()
    if s.startswith("random:"):
        params = {"deg": None, "mix": "mixed", "seed": None}
        for part in s[len("random:"):].split(","):
            if not part:
                continue
            if "=" not in part:
                raise CliError(f"bad scheme spec component {part!r}")
            key, val = part.split("=", 1)
            if key == "deg":
                params["deg"] = int(val)
            elif key == "mix":
                if val not in ("reduced", "curv", "nbhd", "mixed"):
                    raise CliError(f"unknown scheme mix {val!r}")
                params["mix"] = val
            elif key == "seed":
                params["seed"] = int(val)
            else:
                raise CliError(f"unknown scheme spec key {key!r}")
        if params["deg"] is None:
            raise CliError("random scheme spec needs deg=R")
        return "random", params
    if s.startswith("file:"):
        return "file", s[len("file:"):]
    if s.endswith(".json") or os.path.exists(s):
        return "file", s
    raise CliError(f"cannot interpret scheme spec {spec!r}")


def _build_method(method_spec: str, param, rng) -> RankMethod:
    s = method_spec.replace(" ", "")
    if s.startswith("custom:file="):
        path = s[len("custom:file="):]
        t = load_tensor(path)
        if not isinstance(t, DenseTensor):
            raise CliError("custom method file must hold a dense (w, a, b) tensor")
        cmap = custom_map_from_tensor(t)
        return parse_method("custom:" + path, param, rng=rng, custom_map=cmap)
    return parse_method(s, param)


def _emit(line: str, out) -> None:
    out.write(line + "\n")


def _verify_trial(payload: dict) -> dict:
    param = parse_variety(payload["variety"])
    rng = random.Random(payload["trial_seed"])
    # custom-method k estimation must not vary over trials, so its rng comes
    # from the root seed
    method = _build_method(payload["method"], param,
                           random.Random(derive_seed(payload["root_seed"], "custom-k")))
    kind, data = payload["scheme_kind"], payload["scheme_data"]
    if kind == "random":
        seed = data["seed"]
        gen = rng if seed is None else random.Random(derive_seed(seed, payload["index"]))
        scheme = random_scheme(param, data["deg"], mix=data["mix"],
                               bound=payload["bound"], rng=gen)
    else:
        scheme = load_scheme(data)
        validate_scheme(param, scheme)
    report = verify_instance(param, scheme, method, rng,
                             prime=payload["prime"], confirm=payload["confirm"],
                             bound=payload["bound"], seed=payload["trial_seed"])
    d = report.to_dict()
    d["trial"] = payload["index"]
    d.pop("combination", None)
    return d


def cmd_verify(args, out) -> int:
    root = _root_seed(args)
    prime = _parse_field(args.field)
    param = parse_variety(args.variety)
    scheme_kind, scheme_data = _parse_scheme_spec(args.scheme)
    method = _build_method(args.method, param, random.Random(derive_seed(root, "k")))
    if args.validate_k:
        check_k_consistency(method, param, args.validate_k, args.bound,
                            random.Random(derive_seed(root, "validate")))

    payloads = [
        {
            "variety": args.variety,
            "scheme_kind": scheme_kind,
            "scheme_data": scheme_data,
            "method": args.method,
            "index": i,
            "root_seed": root,
            "trial_seed": derive_seed(root, i),
            "bound": args.bound,
            "prime": prime,
            "confirm": args.confirm,
        }
        for i in range(args.trials)
    ]
    if args.jobs > 1 and payloads:
        with Pool(args.jobs) as pool:
            results = pool.map(_verify_trial, payloads)
    else:
        results = [_verify_trial(p) for p in payloads]

    failures = [r for r in results if not r["passed"]]
    confirmed_failures = [r for r in failures if r["qq_confirmed"]]
    for r in results:
        if args.format == "json":
            _emit(json.dumps(r), out)
        else:
            status = "pass" if r["passed"] else "FAIL"
            _emit(
                f"[{r['trial']:4d}] {status} {r['variety']} {r['method']} "
                f"deg={r['degree']} span={r['span_dim']} rank={r['rank']} "
                f"bound={r['bound']} field={r['field']}",
                out,
            )
    summary = {
        "kind": "summary",
        "trials": len(results),
        "passed": len(results) - len(failures),
        "failed": len(failures),
        "qq_confirmed_failures": len(confirmed_failures),
    }
    if args.format == "json":
        _emit(json.dumps(summary), out)
    else:
        _emit(
            f"summary: {summary['passed']}/{summary['trials']} pass, "
            f"{summary['qq_confirmed_failures']} confirmed failures",
            out,
        )
    return 1 if confirmed_failures else 0


def _infer_variety(tensor):
    if isinstance(tensor, SymmetricForm):
        return parse_variety(f"veronese:{tensor.nvars - 1},{tensor.degree}")
    if any(d < 2 for d in tensor.shape):
        raise CliError("cannot infer a variety: tensor has a mode of dimension 1")
    return parse_variety("segre:" + "x".join(str(d) for d in tensor.shape))


def _method_for_tensor(spec: str, tensor, param, rng) -> RankMethod:
    s = spec.replace(" ", "")
    if s.startswith("flattening:split="):
        if not isinstance(tensor, DenseTensor):
            raise CliError("flattenings need a dense tensor")
        rows = parse_split(s[len("flattening:split="):], len(tensor.shape))
        return RankMethod(flattening(tensor.shape, rows), 1,
                          flattening(tensor.shape, rows).spec)
    if s.startswith("catalecticant:i="):
        if not isinstance(tensor, SymmetricForm):
            raise CliError("catalecticants need a symmetric tensor file")
        i = int(s[len("catalecticant:i="):])
        return RankMethod(catalecticant(tensor.nvars, tensor.degree, i), 1,
                          f"catalecticant:i={i}")
    if s.startswith("koszul:p="):
        if not isinstance(tensor, DenseTensor) or len(tensor.shape) != 3:
            raise CliError("koszul flattenings need a dense 3-mode tensor")
        p = int(s[len("koszul:p="):])
        m = koszul_flattening(tensor.shape, p)
        return RankMethod(m, math.comb(tensor.shape[0] - 1, p), m.spec)
    if s.startswith("custom:file="):
        return _build_method(s, param, rng)
    raise CliError(f"unknown method spec {spec!r}")


def cmd_bound(args, out) -> int:
    tensor = load_tensor(args.tensor)
    param = parse_variety(args.variety) if args.variety else _infer_variety(tensor)
    if tensor.w_dim != param.dim_W:
        raise CliError(
            f"tensor lives in dimension {tensor.w_dim}, variety {param.spec} "
            f"has dim W = {param.dim_W}"
        )
    prime = _parse_field(args.field)
    field = QQ if prime is None else PrimeField(prime)
    rng = random.Random(derive_seed(_root_seed(args), "bound"))
    method = _method_for_tensor(args.method, tensor, param, rng)
    vec = tensor.to_vector(field)
    r = rank(evaluate_map(method.map, vec, field))
    bound_val = -(-r // method.k) if method.k else 0
    if method.k < 1:
        raise CliError("method constant k is zero on this variety; no bound")
    result = {
        "variety": param.spec,
        "method": method.spec,
        "rank": r,
        "k": method.k,
        "k_source": method.k_source,
        "bound": bound_val,
        "field": field.name if prime is not None else "QQ",
    }
    ceiling_line = None
    try:
        cr = ceilings(param)
        if cr.cactus_ceiling is not None:
            ceiling_line = (
                f"cactus ceiling g = {cr.cactus_ceiling}; this method cannot "
                f"certify border rank > {cr.cactus_ceiling}"
            )
            result["cactus_ceiling"] = cr.cactus_ceiling
    except UnsupportedVarietyError:
        pass
    if args.format == "json":
        _emit(json.dumps(result), out)
    else:
        _emit(f"rank M(F) = {r}", out)
        _emit(f"k = {method.k} ({method.k_source})", out)
        _emit(f"lower bound: border rank >= {bound_val}", out)
        if ceiling_line:
            _emit(ceiling_line, out)
    return 0


def cmd_ceiling(args, out) -> int:
    report = ceilings(args.variety)
    if args.format == "json":
        _emit(json.dumps(report.to_dict()), out)
    else:
        _emit(f"variety: {report.variety}", out)
        if report.cactus_ceiling is not None:
            _emit(
                f"cactus ceiling g = {report.cactus_ceiling}   "
                f"[{report.labels['cactus_ceiling']}]",
                out,
            )
        _emit(
            f"secant fill-in >= {report.secant_fill_in}   "
            f"[{report.labels['secant_fill_in']}]",
            out,
        )
        if report.grassmann_ceiling is not None:
            _emit(
                f"grassmann ceiling g2 = {report.grassmann_ceiling}   "
                f"[{report.labels['grassmann_ceiling']}]",
                out,
            )
        for note in report.notes:
            _emit(f"note: {note}", out)
    return 0


def cmd_limit(args, out) -> int:
    param, (kind, data), limit_scheme = load_family(args.family)
    validate_scheme(param, limit_scheme)
    if kind == "schemes":
        cmp = span_of_limit_vs_limit_of_spans(param, data, limit_scheme)
    else:
        fam = SpanFamily(param.dim_W, data, PolyRing(QQ))
        lim = limit_of_spans(fam)
        span0 = scheme_span(param, limit_scheme)
        builder = lim.builder()
        inclusion = all(builder.contains(v) for v in span0.basis)
        cmp = LimitComparison(span0.dim, lim.dim, inclusion)
    verdict = "inclusion holds" if cmp.inclusion_holds else "INCLUSION FAILS"
    if cmp.inclusion_holds and cmp.strict:
        verdict += " (strict)"
    elif cmp.inclusion_holds:
        verdict += " (equality)"
    if args.format == "json":
        _emit(json.dumps({
            "dim_span_limit": cmp.dim_span_limit,
            "dim_limit_spans": cmp.dim_limit_spans,
            "inclusion_holds": cmp.inclusion_holds,
            "strict": cmp.strict,
        }), out)
    else:
        _emit(
            f"dim span(limit)={cmp.dim_span_limit} <= "
            f"dim lim(spans)={cmp.dim_limit_spans}: {verdict}",
            out,
        )
    return 0 if cmp.inclusion_holds else 1


def cmd_estimate_k(args, out) -> int:
    param = parse_variety(args.variety)
    root = _root_seed(args)
    rng = random.Random(derive_seed(root, "estimate"))
    method = _build_method(args.method, param, rng)
    est = estimate_k(method.map, param, args.trials, args.bound,
                     random.Random(derive_seed(root, "estimate-k")))
    result = {
        "variety": param.spec,
        "method": method.spec,
        "estimated_k": est,
        "trials": args.trials,
    }
    if method.k_source == "formula":
        result["declared_k"] = method.k
    else:
        result["k_label"] = "empirical (lower estimate)"
    if args.format == "json":
        _emit(json.dumps(result), out)
    else:
        _emit(f"estimated k = {est} over {args.trials} trials", out)
        if "declared_k" in result:
            _emit(f"declared k = {method.k} (formula)", out)
        else:
            _emit("k label: empirical (lower estimate)", out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cactus-barrier",
        description="Exact rank-method bounds and scheme-span barrier verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, field_default):
        p.add_argument("--seed", type=int, default=None,
                       help=f"root seed (default: ${ENV_SEED} or 0)")
        p.add_argument("--bound", type=int, default=3,
                       help="coefficient height for random data")
        p.add_argument("--field", default=field_default,
                       help="q for rationals or p:PRIME for screening")
        p.add_argument("--format", choices=("text", "json"), default="text")

    p = sub.add_parser("bound", help="lower-bound the border rank of a tensor file")
    p.add_argument("--tensor", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--variety", default=None)
    common(p, "q")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", help="run barrier verification campaigns")
    p.add_argument("--variety", required=True)
    p.add_argument("--scheme", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--trials", type=int, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--confirm", choices=("full", "tight", "never"), default="tight",
                   help="rational confirmation policy after prime screening")
    p.add_argument("--validate-k", type=int, default=20, metavar="N",
                   help="pre-campaign k-consistency samples (0 to skip)")
    common(p, f"p:{DEFAULT_PRIME}")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("ceiling", help="report ceiling constants for a variety")
    p.add_argument("--variety", required=True)
    common(p, "q")
    p.set_defaults(func=cmd_ceiling)

    p = sub.add_parser("limit", help="compare span of a stated limit with the limit of spans")
    p.add_argument("--family", required=True)
    common(p, "q")
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("estimate-k", help="estimate the method constant by sampling")
    p.add_argument("--variety", required=True)
    p.add_argument("--method", required=True)
    p.add_argument("--trials", type=int, default=200)
    common(p, "q")
    p.set_defaults(func=cmd_estimate_k)

    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    try:
        return args.func(args, out)
    except (CliError, VarietySpecError, MethodSpecError, FileFormatError,
            UnsupportedVarietyError, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
