"""involute command line: analyze, characters, check, list."""

from __future__ import annotations

import argparse
import json
import os
import sys

from ..spencer_analysis import GenericityFailure, InterpolationMismatch
from ..symbol_systems import WellDefinednessError
from .report import analyze, render
from .spec import GENERATORS, SCHEMA, SpecError, parse_metric, parse_spec

EXIT_OK, EXIT_USAGE, EXIT_INTERNAL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_common(p):
    p.add_argument("--spec", metavar="FILE", help="JSON system spec, '-' for stdin")
    p.add_argument("--system", metavar="NAME", help="built-in generator (see 'list')")
    p.add_argument("--metric", metavar="minkowski|euclidean|FILE", help="metric for --system")
    p.add_argument("--dim", type=int, metavar="N", help="base dimension for --system (default 4)")
    p.add_argument("--truncation", type=int, metavar="T")
    p.add_argument("--seed", type=int, metavar="S")
    p.add_argument("--format", choices=("text", "json"))
    p.add_argument("--out", metavar="FILE", help="write output here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="involute", description="Spencer cohomology and Cartan characters of PDE symbols.")
    sub = ap.add_subparsers(dest="verb", required=True, parser_class=_Parser)
    for verb, text in (("analyze", "run the full pipeline"),
                       ("characters", "Cartan characters and test only"),
                       ("check", "validate a spec without running it")):
        _add_common(sub.add_parser(verb, help=text))
    lp = sub.add_parser("list", help="list built-in generators")
    lp.add_argument("--format", choices=("text", "json"), default="text")
    lp.add_argument("--out", metavar="FILE")
    return ap


def _default_seed() -> int:
    raw = os.environ.get("INVOLUTE_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise SpecError(f"INVOLUTE_SEED must be an integer, got {raw!r}") from None


def _load_spec(args):
    seed = _default_seed()
    if args.spec and args.system:
        raise SpecError("give either --spec or --system, not both")
    if args.spec:
        data = sys.stdin.buffer.read() if args.spec == "-" else _read(args.spec)
        try:
            doc = json.loads(data)
        except ValueError:
            doc = None  # parse_spec reports where it broke
        # flags override fields of the file
        if isinstance(doc, dict):
            if args.truncation is not None:
                doc["truncation"] = args.truncation
            if args.seed is not None:
                doc["seed"] = args.seed
            if args.format is not None:
                doc["format"] = args.format
            if args.metric is not None and isinstance(doc.get("generator"), dict):
                doc["generator"]["metric"] = _metric_arg(args.metric)
            data = json.dumps(doc)
        return parse_spec(data, seed)
    if not args.system:
        raise SpecError("one of --spec or --system is required")
    gen = {"name": args.system}
    if args.metric is not None:
        gen["metric"] = _metric_arg(args.metric)
    n = args.dim
    if n is None:
        n = len(gen["metric"]) if isinstance(gen.get("metric"), list) else 4
    doc = {"n": n, "generator": gen, "seed": args.seed if args.seed is not None else seed}
    if args.system == "free":
        doc["order"] = 2
    if args.truncation is not None:
        doc["truncation"] = args.truncation
    if args.format is not None:
        doc["format"] = args.format
    return parse_spec(json.dumps(doc), seed)


def _read(path: str) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise SpecError(f"cannot read {path}: {exc.strerror}") from None


def _metric_arg(value: str):
    if value in ("minkowski", "euclidean"):
        return value
    data = _read(value)
    try:
        rows = json.loads(data)
    except ValueError as exc:
        raise SpecError(f"metric file {value}: {exc}") from None
    if isinstance(rows, dict) and "metric" in rows:
        rows = rows["metric"]
    parse_metric(rows, f"{value}")
    return rows


def _emit(data: bytes, out: str | None):
    if out:
        with open(out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()


def _list(args) -> int:
    if args.format == "json":
        doc = {"schema": SCHEMA, "generators": [
            {"name": g.name, "order": g.order, "summary": g.summary, "parameters": list(g.params)}
            for g in GENERATORS.values()]}
        _emit((json.dumps(doc, sort_keys=True, indent=2) + "\n").encode(), args.out)
    else:
        width = max(map(len, GENERATORS))
        lines = [f"{g.name:<{width}}  order {g.order if g.order is not None else 'any'}  {g.summary}"
                 for g in GENERATORS.values()]
        _emit(("\n".join(lines) + "\n").encode(), args.out)
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.verb == "list":
        return _list(args)
    try:
        spec = _load_spec(args)
    except SpecError as exc:
        print(f"involute: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    fmt = spec.format
    if args.verb == "check":
        if fmt == "json":
            body = json.dumps({"schema": SCHEMA, "valid": True, "spec": spec.to_json()}, sort_keys=True, indent=2) + "\n"
        else:
            src = spec.generator or "explicit matrix"
            body = f"ok: {src}, n={spec.n}, order={spec.order}, truncation={spec.truncation}, seed={spec.seed}\n"
        _emit(body.encode(), args.out)
        return EXIT_OK
    try:
        report = analyze(spec, characters_only=args.verb == "characters")
    except (GenericityFailure, InterpolationMismatch, WellDefinednessError) as exc:
        print(f"involute: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except SpecError as exc:
        print(f"involute: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(render(report, fmt), args.out)
    if report.failed:
        names = ", ".join(c[0] for c in report.failed)
        print(f"involute: consistency check failed: {names}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
