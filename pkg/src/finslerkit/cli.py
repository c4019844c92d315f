"""Command-line harness: ``report``, ``verify`` and ``catalog``.

Exit codes: 0 pass, 1 fail, 2 erratum-only, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .abmetric import ConeError, PhiDomainError
from .fields import ENTRIES, Scenario
from .fields.metric import FieldError
from .finsler import StrongConvexityError
from .suites import SUITES, Settings, run_suite, scenario_report

EXIT_PASS, EXIT_FAIL, EXIT_ERRATUM, EXIT_USAGE = 0, 1, 2, 64


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _floats(text: str) -> list:
    try:
        return [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _common(p):
    p.add_argument("--scenario", help="scenario JSON file")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--box", type=float, default=None)
    p.add_argument("--margin", type=float, default=None)
    p.add_argument("--json", action="store_true", help="machine-readable output")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="finslerkit",
                     description="Curvature of (alpha, beta)-metrics and checks "
                                 "of their closed forms.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    rp = sub.add_parser("report", help="curvature report for a scenario")
    rp.add_argument("scenario_path", nargs="?", help="scenario JSON file")
    rp.add_argument("--x", type=_floats, help="point, comma separated")
    rp.add_argument("--y", type=_floats, help="direction, comma separated")
    _common(rp)

    vp = sub.add_parser("verify", help="run a verification suite")
    vp.add_argument("suite_name", nargs="?", help="suite (same as --suite)")
    vp.add_argument("--suite", default=None)
    _common(vp)

    cp = sub.add_parser("catalog", help="list or show built-in fields")
    cp.add_argument("action", choices=("list", "show"))
    cp.add_argument("name", nargs="?")
    cp.add_argument("--json", action="store_true")
    return parser


def _settings(args, sc: Scenario | None) -> Settings:
    st = Settings(scenario=sc)
    if sc is not None:
        st.samples, st.seed, st.box = sc.samples, sc.seed, sc.box
    for key in ("samples", "seed", "box", "margin"):
        v = getattr(args, key)
        if v is not None:
            setattr(st, key, v)
    if st.samples < 1:
        raise UsageError("--samples must be positive")
    if st.box <= 0:
        raise UsageError("--box must be positive")
    if not 0 <= st.margin < 1:
        raise UsageError("--margin must be in [0, 1)")
    return st


def _load(path) -> Scenario | None:
    if path is None:
        return None
    try:
        return Scenario.load(path)
    except OSError as exc:
        raise UsageError(f"cannot read scenario: {exc}") from None


def _dump(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, indent=2)


def cmd_report(args, out) -> int:
    path = args.scenario or args.scenario_path
    if path is None:
        raise UsageError("report needs a scenario file")
    sc = _load(path)
    st = _settings(args, sc)
    point = None
    if (args.x is None) != (args.y is None):
        raise UsageError("--x and --y must be given together")
    if args.x is not None:
        if len(args.x) != sc.dimension or len(args.y) != sc.dimension:
            raise UsageError(f"--x and --y need {sc.dimension} components")
        point = (args.x, args.y)
    rep = scenario_report(sc, st, point)
    if args.json:
        out.write(_dump(rep) + "\n")
    else:
        s = rep["summary"]
        out.write(f"dimension {rep['dimension']}, phi {rep['phi']}, "
                  f"{len(rep['samples'])} samples\n")
        out.write("beta: " + ", ".join(f"{k}={v}" for k, v in sorted(rep["beta"].items()))
                  + "\n")
        for key in sorted(s):
            out.write(f"{key}: {s[key]:.3e}\n")
    return EXIT_PASS


def cmd_verify(args, out) -> int:
    if args.suite and args.suite_name and args.suite != args.suite_name:
        raise UsageError("conflicting suite names")
    name = args.suite or args.suite_name or "all"
    if name not in SUITES + ("all",):
        raise UsageError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}, all")
    st = _settings(args, _load(args.scenario))
    rep = run_suite(name, st)
    if args.json:
        out.write(_dump(rep.to_dict()) + "\n")
    else:
        for c in rep.checks:
            err = "-" if c["max_error"] is None else f"{c['max_error']:.3e}"
            out.write(f"{c['status'].upper():8s} {c['name']}  max_error={err} "
                      f"samples={c['samples']}\n")
        out.write(f"suite {rep.suite}: {rep.status}\n")
    return rep.exit_code


def cmd_catalog(args, out) -> int:
    if args.action == "list":
        rows = [{"name": e.name, "params": e.params, "formula": e.formula}
                for e in ENTRIES.values()]
        if args.json:
            out.write(_dump(rows) + "\n")
        else:
            for r in rows:
                out.write(f"{r['name']:18s} ({r['params']})  {r['formula']}\n")
        return EXIT_PASS
    if not args.name:
        raise UsageError("catalog show needs a name")
    if args.name not in ENTRIES:
        raise UsageError(f"unknown catalog entry {args.name!r}")
    e = ENTRIES[args.name]
    doc = (e.build.__doc__ or "").strip()
    rec = {"name": e.name, "params": e.params, "formula": e.formula, "doc": doc}
    if args.json:
        out.write(_dump(rec) + "\n")
    else:
        out.write(f"{e.name}({e.params})\n  {e.formula}\n")
        if doc:
            out.write(f"  {doc}\n")
    return EXIT_PASS


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("expected a command: report, verify or catalog")
        cmd = {"report": cmd_report, "verify": cmd_verify,
               "catalog": cmd_catalog}[args.command]
        return cmd(args, out)
    except UsageError as exc:
        err.write(f"finslerkit: {exc}\n")
        err.write(parser.format_usage())
        return EXIT_USAGE
    except (FieldError, ConeError, PhiDomainError, StrongConvexityError) as exc:
        err.write(f"finslerkit: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
