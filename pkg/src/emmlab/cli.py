"""Command line front end.

Two families of subcommands share one executable: ``exact`` works on finite
scenario trees (measure existence, filtration search, completeness, the
built-in obstruction demonstration) and ``mc`` runs the simulation and
Doob-Meyer diagnostics.  ``report`` renders a diagnostics directory as a
text table.

Exit codes: 0 on success (an infeasible market is still a successful
decision), 1 on validation errors, 2 when an enumeration budget is
exhausted, 3 when the minimality cross-check fails.

Output files are deterministic: floats are written with ``repr`` and the
manifest carries a digest of the effective configuration, so rerunning a
command with the same arguments reproduces every byte.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from .doobmeyer import (
    DEFAULT_RIDGE,
    DEFAULT_WARMUP,
    DEFAULT_WINDOW,
    DiagnosticsRun,
    run_diagnostics,
)
from .emm import emm_exists, is_complete, solution_geometry
from .errors import BudgetError, MinimalityViolation, ValidationError
from .lab import EnumerationCaps, minimality_report
from .market import FiltrationSpec, ScenarioTree, full_prefix_filtration, natural_filtration
from .obstruction import ObstructionConfig, build_three_driver_tree, obstruction_report
from .sim import SimConfig, simulate
from .treeio import filtration_from_dict, filtration_to_dict, load_tree


# ---------------------------------------------------------------------------
# formatting helpers

def _fmt_cell(x) -> str:
    if isinstance(x, bool):
        raise ValidationError("boolean has no CSV cell form")
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def write_csv(path: Path, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt_cell(c) for c in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else int(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating,)):
        return float(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def dump_json(data) -> str:
    return json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# configuration files

def load_config(path: str | None, seed: int | None = None) -> SimConfig:
    """Read ``key = value`` lines into a SimConfig; an absent or empty file
    yields the defaults.  A --seed flag wins over the file."""
    overrides: dict[str, object] = {}
    if path is not None:
        field_types = {f.name: f.type for f in dataclasses.fields(SimConfig)}
        text = Path(path).read_text()
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            key = key.strip()
            value = value.strip()
            if key not in field_types:
                raise ValidationError(f"{path}:{lineno}: unknown config key {key!r}")
            try:
                overrides[key] = _parse_scalar(field_types[key], value)
            except ValueError:
                raise ValidationError(
                    f"{path}:{lineno}: bad value {value!r} for {key}"
                ) from None
    if seed is not None:
        overrides["seed"] = seed
    return SimConfig(**overrides)


def _parse_scalar(ftype: str, text: str):
    if ftype == "int":
        return int(text)
    if "/" in text:
        num, _, den = text.partition("/")
        return float(num) / float(den)
    return float(text)


def config_digest(config: SimConfig) -> str:
    blob = json.dumps(dataclasses.asdict(config), sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()


def write_manifest(out_dir: Path, command: str, config: SimConfig,
                   outputs: list[str], engine: dict | None = None) -> None:
    manifest = {
        "command": command,
        "package": f"emmlab {__version__}",
        "config": dataclasses.asdict(config),
        "config_digest": config_digest(config),
        "outputs": outputs,
    }
    if engine is not None:
        manifest["engine"] = engine
    (out_dir / "manifest.json").write_text(dump_json(manifest))


# ---------------------------------------------------------------------------
# exact subcommands

def _resolve_filtration(spec: str | None, tree: ScenarioTree) -> FiltrationSpec:
    if spec is None or spec == "natural:all":
        return natural_filtration(tree, tree.process_ids)
    if spec == "full":
        return full_prefix_filtration(tree)
    if spec.startswith("natural:"):
        ids = tuple(s for s in spec[len("natural:"):].split(",") if s)
        if not ids:
            raise ValidationError("natural: needs at least one process id")
        return natural_filtration(tree, ids)
    data = json.loads(Path(spec).read_text())
    return filtration_from_dict(data, tree)


def _parse_assets(arg: str | None, tree: ScenarioTree):
    if arg is None:
        return sorted(tree.assets)
    return tuple(s for s in arg.split(",") if s)


def cmd_exact_check(args) -> int:
    tree = load_tree(args.tree)
    filtration = _resolve_filtration(args.filtration, tree)
    group = _parse_assets(args.group, tree)
    cert = emm_exists(tree, filtration, group)
    result: dict = {"feasible": cert is not None, "assets": list(group)}
    if cert is not None:
        result["max_residual"] = float(cert.residuals.max_abs)
        if args.emit_measure:
            result["measure"] = {
                pid: cert.measure.weights[tree.path_index(pid)]
                for pid in tree.paths
            }
    _emit(args, result)
    return 0


def cmd_exact_complete(args) -> int:
    tree = load_tree(args.tree)
    filtration = _resolve_filtration(args.filtration, tree)
    group = _parse_assets(args.group, tree)
    geometry = solution_geometry(tree, filtration, group)
    result = {
        "feasible": geometry.feasible,
        "affine_dimension": geometry.affine_dimension,
    }
    if geometry.feasible:
        result["complete"] = is_complete(tree, filtration, group)
    _emit(args, result)
    return 0


def _parse_caps(arg: str | None) -> EnumerationCaps:
    caps = EnumerationCaps()
    if arg is None:
        return caps
    parts = arg.split(",")
    if len(parts) not in (2, 3):
        raise ValidationError("--caps wants paths,periods[,filtrations]")
    try:
        values = [int(p) for p in parts]
    except ValueError:
        raise ValidationError(f"--caps entries must be integers, got {arg!r}") from None
    fields = ("max_paths", "max_periods", "max_filtrations")
    return dataclasses.replace(caps, **dict(zip(fields, values)))


def cmd_exact_search(args) -> int:
    tree = load_tree(args.tree)
    group = _parse_assets(args.group, tree)
    report = minimality_report(tree, group, caps=_parse_caps(args.caps))
    result = {
        "n_enumerated": report.n_enumerated,
        "n_feasible": report.n_feasible,
        "unique_minimal": report.unique_minimal,
        "consistent": report.consistent,
        "meet": filtration_to_dict(report.meet, tree),
        "natural": filtration_to_dict(report.natural, tree),
    }
    _emit(args, result)
    return 0


def cmd_exact_demo(args) -> int:
    config = ObstructionConfig(n_drivers=args.drivers, n_periods=args.periods)
    scenario = build_three_driver_tree(config)
    report = obstruction_report(scenario)
    _emit(args, report.to_dict(), filename="obstruction.json")
    return 0


def _flatten_csv(result: dict, prefix: str = "") -> list[list]:
    rows: list[list] = []
    for key, value in result.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            rows.extend(_flatten_csv(value, prefix=f"{name}."))
        elif isinstance(value, (list, tuple)):
            rows.append([name, ";".join(str(_jsonable(v)) for v in value)])
        else:
            rows.append([name, _jsonable(value)])
    return rows


def _emit(args, result: dict, filename: str = "result.json") -> None:
    if getattr(args, "format", "json") == "csv":
        lines = ["key,value"]
        lines.extend(f"{k},{v}" for k, v in _flatten_csv(result))
        text = "\n".join(lines) + "\n"
        filename = filename.rsplit(".", 1)[0] + ".csv"
    else:
        text = dump_json(result)
    sys.stdout.write(text)
    out = getattr(args, "out", None)
    if out is not None:
        out_dir = Path(out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / filename).write_text(text)


# ---------------------------------------------------------------------------
# monte carlo subcommands

def cmd_mc_simulate(args) -> int:
    config = load_config(args.config, args.seed)
    panel = simulate(config)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    header = (
        ["t"]
        + [f"y{i + 1}" for i in range(config.n_assets)]
        + [f"logS{i + 1}" for i in range(config.n_assets)]
    )
    rows = [
        [t, *panel.y[:, t], *panel.log_s[:, t]]
        for t in range(config.n_steps + 1)
    ]
    write_csv(out_dir / "paths.csv", header, rows)
    write_manifest(out_dir, "mc simulate", config, ["paths.csv"])
    return 0


def cmd_mc_diagnose(args) -> int:
    config = load_config(args.config, args.seed)
    run = run_diagnostics(
        config, warmup=args.warmup, ridge=args.ridge, window=args.window
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_diagnostics_files(out_dir, run)
    write_manifest(
        out_dir,
        "mc diagnose",
        config,
        ["diagnostics.csv", "at_paths.csv", "m_hist.csv"],
        engine={"warmup": run.warmup, "ridge": run.ridge, "window": run.window},
    )
    return 0


def _write_diagnostics_files(out_dir: Path, run: DiagnosticsRun) -> None:
    diag_rows: list[list] = []
    at_rows: list[list] = []
    hist_rows: list[list] = []
    for asset in run.asset_labels:
        for label in run.structure_labels:
            cell = run.cells.get((asset, label))
            if cell is None:
                continue
            diag_rows.append(
                [asset, label, cell.mean_abs_m, cell.rms_m, cell.fraction_qv]
            )
            at_rows.extend(
                [t, asset, label, cell.a_path[t]]
                for t in range(len(cell.a_path))
            )
            hist_rows.extend(
                [asset, label, m] for m in cell.m_path[run.warmup:]
            )
    for label in run.structure_labels:
        avg = run.averages[label]
        diag_rows.append(["avg", label, avg.mean_abs_m, avg.rms_m, avg.fraction_qv])
    write_csv(
        out_dir / "diagnostics.csv",
        ["asset", "filtration", "mean_abs_m", "rms_m", "fraction_qv"],
        diag_rows,
    )
    write_csv(out_dir / "at_paths.csv", ["t", "asset", "filtration", "a_t"], at_rows)
    write_csv(out_dir / "m_hist.csv", ["asset", "filtration", "m_hat"], hist_rows)


def cmd_report(args) -> int:
    path = Path(args.dir) / "diagnostics.csv"
    if not path.exists():
        raise ValidationError(f"no diagnostics.csv under {args.dir}")
    lines = path.read_text().splitlines()
    header = lines[0].split(",")
    idx = {name: i for i, name in enumerate(header)}
    rows = [line.split(",") for line in lines[1:]]
    averages = [r for r in rows if r[idx["asset"]] == "avg"]
    print(f"{'filtration':<20}{'mean|m|':>12}{'rms(m)':>12}{'qv fraction':>14}")
    for row in averages:
        print(
            f"{row[idx['filtration']]:<20}"
            f"{float(row[idx['mean_abs_m']]):>12.3e}"
            f"{float(row[idx['rms_m']]):>12.3e}"
            f"{float(row[idx['fraction_qv']]):>14.3e}"
        )
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emmlab",
        description="exact martingale-measure analysis and Doob-Meyer diagnostics",
    )
    parser.add_argument("--version", action="version", version=f"emmlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    exact = sub.add_parser("exact", help="finite scenario tree analysis")
    exact_sub = exact.add_subparsers(dest="subcommand", required=True)

    def common_exact(p, with_filtration=True):
        p.add_argument("tree", help="scenario tree JSON file")
        if with_filtration:
            p.add_argument(
                "filtration", nargs="?", help="JSON file, natural:IDS, or full"
            )
        p.add_argument("group", nargs="?", help="comma separated asset ids")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", help="directory for the result file")

    check = exact_sub.add_parser("check", help="decide measure existence")
    common_exact(check)
    check.add_argument("--emit-measure", action="store_true")
    check.set_defaults(func=cmd_exact_check)

    complete = exact_sub.add_parser("complete", help="completeness and geometry")
    common_exact(complete)
    complete.set_defaults(func=cmd_exact_complete)

    search = exact_sub.add_parser("search", help="enumerate pricing filtrations")
    common_exact(search, with_filtration=False)
    search.add_argument("--caps", help="paths,periods[,filtrations]")
    search.set_defaults(func=cmd_exact_search)

    demo = exact_sub.add_parser(
        "demo-obstruction", help="built-in multi-driver obstruction scenario"
    )
    demo.add_argument("--drivers", type=int, default=3, choices=(1, 2, 3))
    demo.add_argument("--periods", type=int, default=1)
    demo.add_argument("--format", choices=("json", "csv"), default="json")
    demo.add_argument("--out")
    demo.set_defaults(func=cmd_exact_demo)

    mc = sub.add_parser("mc", help="simulation and diagnostics")
    mc_sub = mc.add_subparsers(dest="subcommand", required=True)

    simulate_p = mc_sub.add_parser("simulate", help="write simulated paths")
    simulate_p.add_argument(
        "config", nargs="?", help="key = value configuration file"
    )
    simulate_p.add_argument("--seed", type=int)
    simulate_p.add_argument("--out", default=".")
    simulate_p.set_defaults(func=cmd_mc_simulate)

    diagnose = mc_sub.add_parser("diagnose", help="run Doob-Meyer diagnostics")
    diagnose.add_argument("config", nargs="?")
    diagnose.add_argument("--seed", type=int)
    diagnose.add_argument("--out", default=".")
    diagnose.add_argument("--warmup", type=int, default=DEFAULT_WARMUP)
    diagnose.add_argument("--ridge", type=float, default=DEFAULT_RIDGE)
    diagnose.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    diagnose.set_defaults(func=cmd_mc_diagnose)

    report = sub.add_parser("report", help="summarize a diagnostics directory")
    report.add_argument("dir")
    report.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetError as exc:
        print(f"budget exhausted: {exc}", file=sys.stderr)
        return 2
    except MinimalityViolation as exc:
        print(f"minimality violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
