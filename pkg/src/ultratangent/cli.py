"""Command-line front end.

    ultratangent validate   FILE
    ultratangent analyze    FILE [--base P --mode {ultra,s1,F,Phi} --s1 V --schedule S --budget B]
    ultratangent pretangent FAMILY [--window W --refine R --s0 V]
    ultratangent embed      FILE
    ultratangent generate   --kind K [--param key=value ...] [--family]
    ultratangent snowflake  FILE --exponent T

JSON goes to --out (default stdout) and a short summary to stderr.
Exit codes: 0 success, 1 structural or usage error, 2 domain-negative
result (invalid metric, refused identification, failed snowflake).
"""
from __future__ import annotations

import argparse
import json
import math
import sys

from . import __version__
from .diagnostics import HEURISTIC_WARNING, QUANTITIES, distance_schedule, estimate_limit, geometric_schedule
from .generators import GeneratorError, GeneratorSpec
from .io import digest, dumps, load_space, parse_space, space_document
from .line_geometry import detect_pseudo_linear_quadruple, embed_into_line
from .metric_core import (
    MetricViolationError,
    PointedSpace,
    SnowflakeError,
    StructureError,
    ToleranceConfig,
    check_metric,
    is_ultrametric,
    snowflake,
)
from .pretangent import (
    TANGENCY_NOTE,
    IdentificationRefused,
    WindowError,
    check_prop25_identity,
    family_from_dict,
    geometric_window,
    metric_identification,
    subsequence_refinement,
)
from .triples import betweenness_exponent, is_in_M_class

EXIT_OK, EXIT_USAGE, EXIT_NEGATIVE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _real(text: str) -> float:
    v = float(text)
    if math.isnan(v):
        raise argparse.ArgumentTypeError("NaN is not allowed")
    return v


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol-rel", type=_real, default=1e-9, help="relative equality tolerance")
    p.add_argument("--tol-root", type=_real, default=1e-12, help="root residual tolerance")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON output here instead of stdout")
    p.add_argument("--format", choices=("json", "text"), default="json")


def _input(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="matrix JSON/CSV, points CSV (with --points) or generator JSON")
    p.add_argument("--points", action="store_true", help="input is a CSV of label,x,y,... rows")
    p.add_argument("--metric", choices=("euclidean", "linf"), default="euclidean", help="norm for --points")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ultratangent", description="Ultrametric and betweenness diagnostics for finite metric spaces.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the metric axioms")
    _input(p)
    _common(p)

    p = sub.add_parser("analyze", help="betweenness exponent, ultrametric and class-M flags, limit estimates")
    _input(p)
    p.add_argument("--base", help="marked point (label or index); required with --mode")
    p.add_argument("--mode", choices=QUANTITIES)
    p.add_argument("--s1", type=_real)
    p.add_argument("--schedule", help="geom[:start,ratio,steps] | points[:steps] | r1,r2,...")
    p.add_argument("--budget", type=int, default=200_000)
    p.add_argument("--threshold", type=_real, default=1e3, help="divergence threshold for ultra/s1")
    _common(p)

    p = sub.add_parser("pretangent", help="stability, metric identification and refinement of a family")
    p.add_argument("family", help="family description JSON")
    p.add_argument("--window", help="START:STEPS (doubling) or n1,n2,...")
    p.add_argument("--refine", help="identity | even | odd | squares | affine:a,b | list:n1,n2,...")
    p.add_argument("--s0", type=_real, help="also test the power-sum identity with this exponent")
    _common(p)

    p = sub.add_parser("embed", help="class M test and line embedding")
    _input(p)
    _common(p)

    p = sub.add_parser("generate", help="write a generated space (or its family) as JSON")
    p.add_argument("--kind", help="prop29 | example37 | random_ultrametric | line_sample | snowflaked")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="generator parameter (JSON value)")
    p.add_argument("--spec", help="generator spec as a JSON object or a path to one")
    p.add_argument("--family", action="store_true", help="write the family description instead of the matrix")
    _common(p)

    p = sub.add_parser("snowflake", help="write the space with distances d**t")
    _input(p)
    p.add_argument("--exponent", "-t", type=_real, required=True)
    _common(p)
    return parser


# -- helpers ---------------------------------------------------------------


def _tol(args) -> ToleranceConfig:
    try:
        return ToleranceConfig(rel_eq=args.tol_rel, root_tol=args.tol_root, zero_dist=args.tol_rel)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _load(args, tol):
    return load_space(args.input, "points" if args.points else "auto", args.metric, tol)


def _echo(args) -> dict:
    skip = {"out", "format", "func"}
    return {"name": args.command, "args": {k: v for k, v in sorted(vars(args).items()) if k not in skip and k != "command"}}


def _report(args, raw: bytes, tol: ToleranceConfig, results: dict, warnings: list[str]) -> dict:
    return {
        "command": _echo(args),
        "input_digest": digest(raw),
        "tolerances": tol.as_dict(),
        "results": results,
        "warnings": warnings,
    }


def _labels(space, idx):
    return None if idx is None else [space.labels[i] for i in idx]


def _resolve_base(space, base: str) -> int:
    if base in space.labels:
        return space.labels.index(base)
    try:
        i = int(base)
    except ValueError:
        raise UsageError(f"--base {base!r} is neither a label nor an index") from None
    if not 0 <= i < space.n:
        raise UsageError(f"--base index {i} outside 0..{space.n - 1}")
    return i


def _schedule(text, pointed):
    if text is None:
        return None
    try:
        if text.startswith("geom"):
            parts = text.split(":", 1)
            if len(parts) == 1:
                return geometric_schedule(pointed)
            start, ratio, steps = parts[1].split(",")
            return geometric_schedule(pointed, float(ratio), int(steps), float(start))
        if text.startswith("points"):
            parts = text.split(":", 1)
            return distance_schedule(pointed, steps=int(parts[1]) if len(parts) > 1 else None)
        return [float(v) for v in text.split(",")]
    except ValueError as e:
        raise UsageError(f"bad --schedule {text!r}: {e}") from None


def _window(text):
    if text is None:
        return None
    try:
        if ":" in text:
            start, steps = text.split(":")
            return geometric_window(int(start), int(steps))
        return [int(v) for v in text.split(",")]
    except ValueError as e:
        raise UsageError(f"bad --window {text!r}: {e}") from None


# -- commands --------------------------------------------------------------


def cmd_validate(args, tol):
    raw = open(args.input, "rb").read() if not args.points else None
    if args.points:
        loaded = _load(args, tol)
        return _report(args, loaded.raw, tol, {"valid": True, "n": loaded.space.n, "violations": []}, []), EXIT_OK, "valid metric"
    labels, matrix, _ = parse_space(raw, "json" if args.input.endswith(".json") else "auto", tol=tol, validate=False)
    violations = check_metric(matrix, tol)
    results = {"valid": not violations, "n": int(matrix.shape[0]), "violations": [v.as_dict() for v in violations]}
    if violations:
        return _report(args, raw, tol, results, []), EXIT_NEGATIVE, f"invalid: {len(violations)} violation(s), first {violations[0]}"
    return _report(args, raw, tol, results, []), EXIT_OK, f"valid {matrix.shape[0]}-point metric"


def cmd_analyze(args, tol):
    loaded = _load(args, tol)
    sp = loaded.space
    t0 = betweenness_exponent(sp, tol)
    um = is_ultrametric(sp, tol)
    mc = is_in_M_class(sp, tol)
    results = {
        "n": sp.n,
        "betweenness_exponent": {"value": t0.value, "triple": _labels(sp, t0.triple)},
        "ultrametric": {"ok": um.ok, "witness": _labels(sp, um.witness)},
        "m_class": {"ok": mc.ok, "witness": _labels(sp, mc.witness)},
    }
    warnings = []
    summary = f"t0 = {t0.value:.6g}, ultrametric = {um.ok}, class M = {mc.ok}"
    if args.mode:
        if args.base is None:
            raise UsageError(f"--mode {args.mode} needs --base")
        pointed = PointedSpace(sp, _resolve_base(sp, args.base))
        try:
            est = estimate_limit(
                pointed,
                args.mode,
                _schedule(args.schedule, pointed),
                budget=args.budget,
                seed=args.seed,
                tol=tol,
                s1=args.s1,
                threshold=args.threshold,
            )
        except ValueError as e:  # includes EstimationError
            raise UsageError(str(e)) from None
        d = est.as_dict()
        d["argmin"] = [_labels(sp, t) for t in est.argmin]
        results["base"] = sp.labels[pointed.base]
        results["estimate"] = d
        warnings.append(HEURISTIC_WARNING)
        summary += f"; {args.mode} verdict: {est.verdict} (heuristic)"
    return _report(args, loaded.raw, tol, results, warnings), EXIT_OK, summary


def _family_doc(spec: dict, tol) -> dict:
    host = spec.get("host", {})
    if host.get("kind") == "generator":
        gen = GeneratorSpec.from_dict(host["spec"]).build(tol)
        spec = {**spec, "host": {"kind": "matrix", **gen.space.as_dict()}}
    return spec


def cmd_pretangent(args, tol):
    try:
        raw = open(args.family, "rb").read()
        spec = json.loads(raw)
    except OSError as e:
        raise StructureError(f"cannot read {args.family}: {e.strerror}") from None
    except json.JSONDecodeError as e:
        raise StructureError(f"malformed family JSON: {e}") from None
    if not isinstance(spec, dict) or "sequences" not in spec:
        raise StructureError('family JSON needs "host", "normalizer" and "sequences"')
    try:
        family = family_from_dict(_family_doc(spec, tol), _window(args.window), tol)
    except MetricViolationError:
        raise
    except (KeyError, TypeError) as e:
        raise StructureError(f"bad family description: {e!r}") from None
    except ValueError as e:
        raise UsageError(str(e)) from None
    results = {"family": family.as_dict()}
    warnings = [TANGENCY_NOTE]
    try:
        snap = metric_identification(family, tol)
    except IdentificationRefused as e:
        results["refused"] = {"pair": list(e.pair), "status": e.status}
        return _report(args, raw, tol, results, warnings), EXIT_NEGATIVE, f"identification refused: {e.pair} {e.status}"
    q = snap.quotient
    results["snapshot"] = snap.as_dict()
    results["card"] = snap.card
    um, mc = is_ultrametric(q, tol), is_in_M_class(q, tol)
    results["ultrametric"] = {"ok": um.ok, "witness": _labels(q, um.witness)}
    results["m_class"] = {"ok": mc.ok, "witness": _labels(q, mc.witness)}
    summary = f"snapshot card {snap.card}"
    if snap.card == 4:
        plq = detect_pseudo_linear_quadruple(q, tol)
        results["pseudo_linear_quadruple"] = plq.as_dict() if plq else None
        if plq:
            summary += f", PLQ(s,t) = ({plq.s:g}, {plq.t:g})"
    if args.s0 is not None:
        try:
            ok, worst = check_prop25_identity(snap, args.s0, tol)
        except ValueError as e:
            raise UsageError(str(e)) from None
        results["power_sum_identity"] = {"s0": args.s0, "ok": ok, "worst_residual": worst}
    if args.refine:
        try:
            ref = subsequence_refinement(family, args.refine, tol)
        except (ValueError, WindowError) as e:
            raise UsageError(f"bad --refine: {e}") from None
        results["refinement"] = ref.as_dict()
        summary += f", refinement {ref.status}"
    return _report(args, raw, tol, results, warnings), EXIT_OK, summary


def cmd_embed(args, tol):
    loaded = _load(args, tol)
    sp = loaded.space
    mc = is_in_M_class(sp, tol)
    emb = embed_into_line(sp, tol)
    results = {"m_class": {"ok": mc.ok, "witness": _labels(sp, mc.witness)}, "embedding": emb.as_dict()}
    plq = None
    if sp.n == 4:
        plq = detect_pseudo_linear_quadruple(sp, tol)
        results["pseudo_linear_quadruple"] = plq.as_dict() if plq else None
    if emb.ok:
        summary = "line-embeddable, coordinates emitted"
    elif not mc.ok:
        summary = "not in class M"
    else:
        summary = "class M member, not line-embeddable"
        if plq:
            summary += f", PLQ(s,t) = ({plq.s:g}, {plq.t:g})"
    results["summary"] = summary
    return _report(args, loaded.raw, tol, results, []), EXIT_OK, summary


def _param(text: str):
    key, sep, value = text.partition("=")
    if not sep:
        raise UsageError(f"--param {text!r} is not KEY=VALUE")
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def cmd_generate(args, tol):
    if args.spec:
        text = args.spec
        if not text.lstrip().startswith("{"):
            try:
                text = open(text).read()
            except OSError as e:
                raise StructureError(f"cannot read {args.spec}: {e.strerror}") from None
        try:
            gspec = GeneratorSpec.from_dict(json.loads(text))
        except (json.JSONDecodeError, KeyError) as e:
            raise StructureError(f"bad generator spec: {e}") from None
    elif args.kind:
        gspec = GeneratorSpec(args.kind, dict(_param(p) for p in args.param), args.seed)
    else:
        raise UsageError("generate needs --kind or --spec")
    try:
        gen = gspec.build(tol)
    except (KeyError, TypeError) as e:
        raise UsageError(f"missing or bad generator parameter: {e}") from None
    if args.family:
        if gen.family is None:
            raise UsageError(f"generator {gspec.kind!r} with these parameters has no family description")
        return gen.family, EXIT_OK, f"family with {len(gen.family['sequences'])} sequences"
    doc = space_document(gen.space, gen.pointed.base, generated_by=gspec.as_dict())
    return doc, EXIT_OK, f"{gspec.kind}: {gen.space.n} points"


def cmd_snowflake(args, tol):
    loaded = _load(args, tol)
    try:
        out = snowflake(loaded.space, args.exponent, tol)
    except SnowflakeError as e:
        results = {"exponent": args.exponent, "triple": _labels(loaded.space, e.triple), "error": str(e)}
        return _report(args, loaded.raw, tol, results, []), EXIT_NEGATIVE, str(e)
    except ValueError as e:
        raise UsageError(str(e)) from None
    return space_document(out, loaded.base), EXIT_OK, f"snowflaked with t = {args.exponent:g}"


COMMANDS = {
    "validate": cmd_validate,
    "analyze": cmd_analyze,
    "pretangent": cmd_pretangent,
    "embed": cmd_embed,
    "generate": cmd_generate,
    "snowflake": cmd_snowflake,
}


def _text(doc) -> str:
    if "results" not in doc:
        return dumps(doc)
    lines = [f"command: {doc['command']['name']}", f"input: {doc['input_digest']}"]
    for k, v in doc["results"].items():
        lines.append(f"{k}: {dumps(v, indent=None).strip()}")
    lines += [f"warning: {w}" for w in doc["warnings"]]
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = _tol(args)
        doc, code, summary = COMMANDS[args.command](args, tol)
    except UsageError as e:
        print(f"ultratangent {args.command}: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except MetricViolationError as e:
        print(f"ultratangent {args.command}: invalid metric: {e}", file=sys.stderr)
        return EXIT_NEGATIVE
    except (StructureError, GeneratorError, WindowError) as e:
        print(f"ultratangent {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as e:
        print(f"ultratangent {args.command}: {e}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(doc) if args.format == "json" else _text(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.format == "json":
        print(summary, file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
