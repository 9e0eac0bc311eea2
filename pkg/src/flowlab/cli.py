"""Command-line entry point.

    flowlab run CONFIG.json [--output DIR]
    flowlab verify-all [--only 1,4,12] [--output DIR]
    flowlab gl decide|lob FORMULA
    flowlab gl lambda
    flowlab gl hierarchy --depth K
    flowlab logic eval --structure FILE --formula TEXT

Exit codes: 0 ok, 1 a check failed, 2 usage or configuration error.
The default output directory is taken from FLOWLAB_OUTPUT_DIR.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import experiments
from .acceptance import run_all
from .logic import FormulaError, evaluate_with_witness, parse_formula
from .logic.semantics import EvaluationError
from .provability import formulas as mf
from .provability.tableau import DecisionBudgetExceeded, gl_decide
from .provability.theorems import extension_hierarchy, fixed_point_lambda, lob_instance
from .structures import StructureSpecError, structure_from_json

OUTPUT_ENV = "FLOWLAB_OUTPUT_DIR"
CONFIG_KEYS = {"experiment", "seed", "params", "output_dir"}


class UsageError(Exception):
    pass


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    if hasattr(v, "item"):  # numpy scalar
        return _fmt(v.item())
    return str(v)


def write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)] + [",".join(_fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n")


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if hasattr(v, "item"):
        return v.item()
    return v


def load_config(path: str) -> dict:
    try:
        doc = json.loads(Path(path).read_text())
    except OSError as e:
        raise UsageError(f"cannot read config: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"config is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise UsageError("config must be a JSON object")
    unknown = set(doc) - CONFIG_KEYS
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    if "experiment" not in doc:
        raise UsageError("config needs an 'experiment'")
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or not 0 <= seed < 2**64:
        raise UsageError("seed must be an integer in [0, 2^64)")
    if not isinstance(doc.get("params", {}), dict):
        raise UsageError("params must be a JSON object")
    return {"experiment": doc["experiment"], "seed": seed, "params": doc.get("params", {}),
            "output_dir": doc.get("output_dir")}


def _output_dir(cli_value: str | None, config_value: str | None = None) -> Path:
    out = Path(cli_value or config_value or os.environ.get(OUTPUT_ENV) or "flowlab_out")
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UsageError(f"output directory {out} is not writable: {e}") from e
    if not os.access(out, os.W_OK):
        raise UsageError(f"output directory {out} is not writable")
    return out


def run(config_path: str, output: str | None = None) -> tuple[dict, int]:
    cfg = load_config(config_path)
    try:
        params = experiments.make_params(cfg["experiment"], cfg["params"])
    except (TypeError, ValueError) as e:
        raise UsageError(str(e)) from e
    out_dir = _output_dir(output, cfg["output_dir"]) / cfg["experiment"]
    out_dir.mkdir(parents=True, exist_ok=True)
    _, fn = experiments.EXPERIMENTS[cfg["experiment"]]
    t0 = time.perf_counter()
    try:
        outcome = fn(params, cfg["seed"])
    except (ValueError, TypeError, FormulaError, StructureSpecError) as e:
        raise UsageError(f"invalid parameters: {e}") from e
    duration = time.perf_counter() - t0
    files = []
    for name, (header, rows) in outcome.tables.items():
        path = out_dir / f"{name}.csv"
        write_csv(path, header, rows)
        files.append(str(path))
    for name, svg in outcome.plots.items():
        path = out_dir / f"{name}.svg"
        path.write_text(svg)
        files.append(str(path))
    report_path = out_dir / "report.json"
    files.append(str(report_path))
    report = {
        "config": {"experiment": cfg["experiment"], "seed": cfg["seed"], "params": _jsonable(vars(params))},
        "checks": [c.to_json() for c in outcome.checks],
        "passed": all(c.passed for c in outcome.checks),
        "duration_seconds": duration,
        "artifacts": files,
        "summary": _jsonable(outcome.summary),
    }
    report_path.write_text(json.dumps(report, indent=2, default=str) + "\n")
    return report, 0 if report["passed"] else 1


def _print_json(obj) -> None:
    print(json.dumps(_jsonable(obj), indent=2, default=str))


def _parse_modal(text: str):
    try:
        return mf.parse_modal(text)
    except mf.ModalSyntaxError as e:
        raise UsageError(f"formula: {e}") from e


def cmd_gl(args) -> int:
    if args.gl_cmd == "decide":
        _print_json(gl_decide(_parse_modal(args.formula), args.budget).to_json())
        return 0
    if args.gl_cmd == "lob":
        inst = lob_instance(_parse_modal(args.formula))
        d = gl_decide(inst, args.budget)
        _print_json({"instance": mf.show(inst), "valid": d.valid})
        return 0 if d.valid else 1
    if args.gl_cmd == "lambda":
        fp = fixed_point_lambda()
        _print_json({
            "lambda": mf.show(fp.formula),
            "certificates": [{"name": c.name, "formula": mf.show(c.formula), "valid": c.valid} for c in fp.certificates],
            "unboxed_probe": fp.unboxed_probe.decision.to_json(),
        })
        return 0 if fp.certified else 1
    if args.gl_cmd == "hierarchy":
        try:
            reports = extension_hierarchy(args.depth)
        except ValueError as e:
            raise UsageError(str(e)) from e
        _print_json([{
            "level": r.level.index,
            "axioms": [mf.show(a) for a in r.level.extra_axioms],
            "next_level_derives_con": r.next_derives_con,
            "derives_con": r.derives_con,
            "witness": r.witness.to_json() if r.witness else None,
            "consistent": r.consistent,
            "includes_previous": r.includes_previous,
        } for r in reports])
        return 0 if all(r.ok for r in reports) else 1
    raise UsageError("unknown gl command")


def cmd_logic(args) -> int:
    try:
        doc = json.loads(Path(args.structure).read_text())
        m = structure_from_json(doc)
        f = parse_formula(args.formula)
        r = evaluate_with_witness(m, f, budget=args.budget)
    except (OSError, json.JSONDecodeError, StructureSpecError, FormulaError, EvaluationError) as e:
        raise UsageError(str(e)) from e
    _print_json({"formula": args.formula, "value": r.value, "bindings": r.bindings,
                 "nodes_evaluated": r.nodes_evaluated, "semantics": r.semantics})
    return 0


def cmd_verify_all(args) -> int:
    only = None
    if args.only:
        try:
            only = {int(x) for x in args.only.split(",")}
        except ValueError as e:
            raise UsageError("--only takes comma-separated criterion numbers") from e
    results = run_all(only)
    for r in results:
        print(r.line(), flush=True)
    ok = all(r.passed for r in results)
    print(f"{sum(r.passed for r in results)}/{len(results)} criteria passed")
    if args.output:
        out = _output_dir(args.output)
        (out / "acceptance.json").write_text(json.dumps([r.to_json() for r in results], indent=2) + "\n")
    return 0 if ok else 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="flowlab", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="cmd", parser_class=_Parser)
    r = sub.add_parser("run", help="run one experiment from a JSON config")
    r.add_argument("config")
    r.add_argument("--output", help=f"output directory (default: ${OUTPUT_ENV} or ./flowlab_out)")
    v = sub.add_parser("verify-all", help="run the acceptance suite")
    v.add_argument("--only", help="comma-separated criterion numbers")
    v.add_argument("--output", help="write acceptance.json here")
    g = sub.add_parser("gl", help="provability logic")
    gs = g.add_subparsers(dest="gl_cmd", parser_class=_Parser)
    for name in ("decide", "lob"):
        c = gs.add_parser(name)
        c.add_argument("formula")
        c.add_argument("--budget", type=int, default=200_000)
    gs.add_parser("lambda")
    h = gs.add_parser("hierarchy")
    h.add_argument("--depth", type=int, default=3)
    lg = sub.add_parser("logic", help="trajectory logic")
    ls = lg.add_subparsers(dest="logic_cmd", parser_class=_Parser)
    e = ls.add_parser("eval")
    e.add_argument("--structure", required=True)
    e.add_argument("--formula", required=True)
    e.add_argument("--budget", type=int, default=50_000_000)
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        if args.cmd == "run":
            report, code = run(args.config, args.output)
            for c in report["checks"]:
                print(f"[{'PASS' if c['pass'] else 'FAIL'}] {c['name']}: {c['value']} ({c['tolerance']})")
            print(f"report: {report['artifacts'][-1]}")
            return code
        if args.cmd == "verify-all":
            return cmd_verify_all(args)
        if args.cmd == "gl":
            if not args.gl_cmd:
                raise UsageError("gl needs a subcommand: decide, lob, lambda, hierarchy")
            return cmd_gl(args)
        if args.cmd == "logic":
            if args.logic_cmd != "eval":
                raise UsageError("logic needs a subcommand: eval")
            return cmd_logic(args)
        raise UsageError("missing command; see flowlab --help")
    except UsageError as e:
        print(f"flowlab: error: {e}", file=sys.stderr)
        return 2
    except DecisionBudgetExceeded as e:
        print(f"flowlab: resource limit: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
