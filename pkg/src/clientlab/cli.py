"""Batch front end: ``clientlab <command> [flags]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

import pandas as pd

from . import game, indices, regression, survey
from .graph import read_villages, write_villages

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
PARAM_FLAGS = ("n", "b", "theta", "c", "R", "e")


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _atomic_write(path: Path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _emit(args, text: str) -> None:
    if args.output:
        _atomic_write(Path(args.output), text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read JSON from {path}: {exc}") from None


def _params(args) -> game.GameParams:
    values = dict(_load_json(args.params)) if args.params else {}
    for name in PARAM_FLAGS:
        flag = getattr(args, name)
        if flag is not None:
            values[name] = flag
    missing = [k for k in PARAM_FLAGS if k not in values]
    if missing:
        raise UsageError(f"missing game parameter(s): {', '.join('--' + k for k in missing)}")
    try:
        return game.GameParams.from_dict(values)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def _constructed(p: game.GameParams):
    """Constructed equilibrium, or the restriction report when it does not exist."""
    report = game.check_restrictions(p)
    if not report.passed:
        return None, report
    return game.construct_clientelism_equilibrium(p), report


def _restriction_failure(args, p, report) -> int:
    _emit(args, _dump({"params": p.to_dict(), "restrictions": report.to_dict()}))
    print(f"restriction(s) violated: {', '.join(report.failed)}", file=sys.stderr)
    return EXIT_FAIL


def cmd_indices(args) -> int:
    if not args.input:
        raise UsageError("indices needs --input")
    records, reports = indices.compute_indices(read_villages(args.input).values())
    if args.format == "json":
        rows = [dict(zip(indices.INDEX_COLUMNS, row)) for row in _csv_rows(indices.records_to_csv(records))]
        _emit(args, _dump({"households": rows, "villages": json.loads(indices.reports_to_json(reports))}))
    else:
        _emit(args, indices.records_to_csv(records))
    return EXIT_OK


def _csv_rows(text: str):
    reader = csv.reader(io.StringIO(text))
    next(reader)
    return list(reader)


def cmd_solve(args) -> int:
    p = _params(args)
    built, report = _constructed(p)
    if built is None:
        return _restriction_failure(args, p, report)
    profile, outcome = built
    _emit(
        args,
        _dump(
            {
                "params": p.to_dict(),
                "restrictions": report.to_dict(),
                "profile": profile.to_dict(),
                "outcome": outcome.to_dict(),
            }
        ),
    )
    return EXIT_OK


def cmd_verify(args) -> int:
    p = _params(args)
    if args.profile:
        try:
            profile = game.StrategyProfile.from_dict(_load_json(args.profile))
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"malformed profile: {exc}") from None
    else:
        built, report = _constructed(p)
        if built is None:
            return _restriction_failure(args, p, report)
        profile = built[0]
    try:
        result = game.verify_spne(p, profile)
    except game.MalformedProfileError as exc:
        raise UsageError(f"malformed profile: {exc}") from None
    _emit(args, _dump({"params": p.to_dict(), "report": result.to_dict()}))
    return EXIT_OK if result.passed else EXIT_FAIL


def cmd_bruteforce(args) -> int:
    p = _params(args)
    try:
        result = game.brute_force_equilibria(p)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = {"params": p.to_dict(), "result": result.to_dict()}
    built, _ = _constructed(p)
    if built is not None:
        doc["constructed"] = game.OutcomePartition.of(built[0]).to_dict()
    _emit(args, _dump(doc))
    return EXIT_OK


def cmd_sweep(args) -> int:
    if not args.grid:
        raise UsageError("sweep needs --grid (JSON object of parameter -> list of values)")
    try:
        grid = json.loads(args.grid)
    except json.JSONDecodeError:
        grid = _load_json(args.grid)
    if not isinstance(grid, dict) or not all(isinstance(v, list) for v in grid.values()):
        raise UsageError("--grid must map parameter names to lists")
    fixed = {k: v for k, v in vars(args).items() if k in PARAM_FLAGS and v is not None}
    base = {**(_load_json(args.params) if args.params else {}), **fixed}
    for k in PARAM_FLAGS:
        base.setdefault(k, grid[k][0] if k in grid and grid[k] else None)
    missing = [k for k in PARAM_FLAGS if base[k] is None]
    if missing:
        raise UsageError(f"missing game parameter(s): {', '.join('--' + k for k in missing)}")
    try:
        rows = game.comparative_statics(game.GameParams.from_dict(base), grid)
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None
    dicts = [r.to_dict() for r in rows]
    if args.format == "csv":
        frame = pd.DataFrame(dicts)
        frame["failed"] = frame["failed"].map(";".join)
        _emit(args, frame.to_csv(index=False, lineterminator="\n", float_format="%.12g"))
    else:
        _emit(args, _dump(dicts))
    return EXIT_OK


def cmd_export_net(args) -> int:
    p = _params(args)
    built, report = _constructed(p)
    if built is None:
        return _restriction_failure(args, p, report)
    net = game.equilibrium_to_network(p, built[0])
    _emit(args, write_villages([net]))
    return EXIT_OK


def cmd_simulate(args) -> int:
    if args.seed is None:
        raise UsageError("simulate is stochastic; --seed is required")
    if not args.output:
        raise UsageError("simulate needs --output (a CSV path; a .json sidecar is written next to it)")
    p = _params(args) if args.params or any(getattr(args, k) is not None for k in PARAM_FLAGS) else None
    effects = survey.Effects() if args.effect is None else survey.Effects(client=args.effect)
    data = survey.simulate_survey(
        params=p, effects=effects, villages=args.villages, households=args.households, seed=args.seed
    )
    out = Path(args.output)
    with tempfile.TemporaryDirectory(dir=out.parent or ".") as tmp:
        side = data.to_csv(Path(tmp) / out.name)
        os.replace(Path(tmp) / out.name, out)
        os.replace(side, out.with_suffix(".json"))
    return EXIT_OK


def cmd_regress(args) -> int:
    if not args.input:
        raise UsageError("regress needs --input (a dataset CSV with its .json sidecar)")
    data = regression.Dataset.read_csv(args.input)
    fits = regression.run_suite(data)
    if args.format == "csv":
        table = regression.suite_table(fits)
        _emit(args, table.to_csv(index=False, lineterminator="\n", float_format="%.12g"))
    else:
        _emit(args, _dump([f.to_dict() for f in fits]))
    return EXIT_OK


COMMANDS = {
    "indices": (cmd_indices, "csv", "household indices and patron reports from a village edge list"),
    "solve": (cmd_solve, "json", "construct the clientelism equilibrium"),
    "verify": (cmd_verify, "json", "check a strategy profile for profitable deviations"),
    "bruteforce": (cmd_bruteforce, "json", "enumerate equilibrium partitions (n <= 8)"),
    "sweep": (cmd_sweep, "json", "comparative statics over --grid"),
    "export-net": (cmd_export_net, "csv", "equilibrium links as a village edge list"),
    "simulate": (cmd_simulate, "csv", "draw a synthetic survey dataset"),
    "regress": (cmd_regress, "csv", "fit the nine-model suite on a dataset"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clientlab")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, default_format, help_text) in COMMANDS.items():
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--n", type=int)
        for flag in PARAM_FLAGS[1:]:
            cmd.add_argument(f"--{flag}", type=Fraction)
        cmd.add_argument("--params", help="JSON file {n, b, theta, c, R, e}; flags override it")
        cmd.add_argument("--input")
        cmd.add_argument("--output")
        cmd.add_argument("--seed", type=int)
        cmd.add_argument("--format", choices=("csv", "json"), default=default_format)
        cmd.add_argument("--grid", help="JSON object (inline or a file path) of parameter -> values")
        if name == "verify":
            cmd.add_argument("--profile", help="strategy profile JSON; defaults to the constructed one")
        if name == "simulate":
            cmd.add_argument("--villages", type=int, default=36)
            cmd.add_argument("--households", type=int, default=100)
            cmd.add_argument("--effect", type=float, help="true client effect on participation")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    handler = COMMANDS[args.command][0]
    try:
        return handler(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"clientlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, ValueError) as exc:
        print(f"clientlab {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
