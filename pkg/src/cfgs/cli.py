"""Command-line interface.

    cfgs compile SPEC
    cfgs explain SPEC --instance k=v ... [--restrict k=CODE ...]
                      [--cost-bound N] [--limit N] [--minimal-only]
                      [--format table|json]
    cfgs enumerate SPEC --world pre|post [--limit N] [--format table|json]
    cfgs serve [--port N] [--spec-dir DIR]
    cfgs fixtures

SPEC is a spec-file path or the name of a shipped fixture.  Restriction
codes: 0 (fixed), 1 (must change / increase), -1 (must decrease), free,
inc, dec.

Exit codes: 0 ok; 2 unreadable/invalid input; 3 stratification or range
errors; 4 instance already desired; 5 infeasible restrictions.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import engine, fixtures
from .asp_core import serialize
from .errors import (
    CfgsError, DomainError, IllegalCode, InfeasibleRestrictions, NotUndesired,
    RangeRestrictionError, RuleSyntaxError, SpecValidationError,
    StratificationError, UnrealisticInstance,
)
from .render import canonical_json, instance_to_json, pair_label, pair_to_json
from .specfile import load_document

EXIT_INPUT = 2
EXIT_PROGRAM = 3
EXIT_NOT_UNDESIRED = 4
EXIT_INFEASIBLE = 5


def _load(spec_arg: str):
    p = Path(spec_arg)
    if p.exists():
        return load_document(p)
    try:
        return fixtures.load_fixture(spec_arg)
    except FileNotFoundError:
        raise FileNotFoundError(
            f"{spec_arg}: no such file, and no fixture with that name "
            f"(known fixtures: {', '.join(fixtures.fixture_ids())})")


def _parse_kv(pairs, what):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise DomainError(f"{what} {item!r} is not of the form name=value")
        k, v = item.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _coerce_instance(spec, raw):
    inst = {}
    for k, v in raw.items():
        f = spec.feature(k)
        inst[k] = int(v) if f.kind == "numeric" else v
    return inst


def cmd_compile(args):
    doc = _load(args.spec)
    sys.stdout.write(serialize(engine.compile_spec(doc.problem)))
    return 0


def cmd_explain(args):
    doc = _load(args.spec)
    spec = doc.problem
    instance = _coerce_instance(spec, _parse_kv(args.instance, "--instance"))
    restrictions = _parse_kv(args.restrict, "--restrict") or None
    pairs = engine.explain(spec, instance, restrictions,
                           cost_bound=args.cost_bound, limit=args.limit,
                           minimal_only=args.minimal_only)
    if args.format == "json":
        payload = {"spec": doc.spec_id,
                   "pairs": [pair_to_json(spec, p) for p in pairs]}
        print(canonical_json(payload))
    else:
        if not pairs:
            print("no counterfactuals under the given restrictions")
        for p in pairs:
            print(f"cost {p.cost}  {pair_label(spec, p)}")
    return 0


def cmd_enumerate(args):
    doc = _load(args.spec)
    spec = doc.problem
    it = (engine.enumerate_undesired(spec, limit=args.limit)
          if args.world == "pre"
          else engine.enumerate_counterfactuals(spec, limit=args.limit))
    instances = list(it)
    if args.format == "json":
        payload = {"spec": doc.spec_id, "world": args.world,
                   "instances": [instance_to_json(spec, i) for i in instances]}
        print(canonical_json(payload))
    else:
        for inst in instances:
            rendered = {k: str(v) for k, v in inst.items()}
            print("  ".join(f"{k}={v}" for k, v in rendered.items()))
    return 0


def cmd_serve(args):
    import uvicorn
    from .service import create_app
    app = create_app(args.spec_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


def cmd_fixtures(args):
    for spec_id in fixtures.fixture_ids():
        print(f"{spec_id:20s} {fixtures.fixture_path(spec_id)}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="cfgs",
        description="Counterfactual generation for rule-based classifiers.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compile", help="print the compiled logic program")
    p.add_argument("spec")
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("explain", help="counterfactual pairs for an instance")
    p.add_argument("spec")
    p.add_argument("--instance", action="append", metavar="NAME=VALUE")
    p.add_argument("--restrict", action="append", metavar="NAME=CODE")
    p.add_argument("--cost-bound", type=int, default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--minimal-only", action="store_true")
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("enumerate", help="symbolic instances of one world")
    p.add_argument("spec")
    p.add_argument("--world", choices=("pre", "post"), required=True)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--format", choices=("table", "json"), default="table")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--spec-dir", default=None)
    p.set_defaults(func=cmd_serve)

    p = sub.add_parser("fixtures", help="list shipped fixture specs")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (StratificationError, RangeRestrictionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PROGRAM
    except NotUndesired as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_NOT_UNDESIRED
    except InfeasibleRestrictions as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (SpecValidationError, RuleSyntaxError, DomainError,
            UnrealisticInstance, IllegalCode, FileNotFoundError, OSError,
            ValueError, CfgsError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
