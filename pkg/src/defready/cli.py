"""Command-line entry point: ``defready <command> [options]``.

Every successful run writes its outputs plus ``manifest.json`` into ``--out``.
Exit codes: 0 success, 1 invalid input, 2 solver non-convergence, 64 usage error.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import hashlib
import json
import logging
import os
import shlex
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import __version__
from .datasets import TABLE_A1, TABLE1_TOLERANCE_PP, bundled_path, check_stock_ratios, resolve_input
from .equilibrium import (
    SolverConfig,
    TradeCostShock,
    baseline_from_icio,
    load_baseline,
    save_baseline,
    solve_hat,
    validate_baseline,
)
from .errors import ConvergenceError, ValidationError
from .exposure import exposure_table, write_exposure_long, write_exposure_matrix
from .icio import aggregate_sectors, leontief_inverse, load_icio, technical_coefficients, write_icio_matrix
from .readiness import (
    expansion,
    fragmentation_index,
    herfindahl,
    read_inventories,
    read_manufacturer_units,
    read_profiles,
    stock_ratio_table,
    threshold_attrition_rate,
    WeaponSystem,
)
from .resilience import eari_table, read_dataset, write_eari
from .scenario import PolicyPath, compare_policies, read_scenario, run_trajectory, write_trajectory

logger = logging.getLogger("defready")

EXIT_OK, EXIT_INVALID, EXIT_NO_CONVERGENCE, EXIT_USAGE = 0, 1, 2, 64
MANIFEST = "manifest.json"


class UsageParser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def sha256(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def digests(paths) -> dict[str, str]:
    """File digests; a directory contributes each file inside it."""
    out = {}
    for p in paths:
        p = Path(p)
        if p.is_dir():
            for f in sorted(q for q in p.iterdir() if q.is_file()):
                out[str(f)] = sha256(f)
        elif p.is_file():
            out[str(p)] = sha256(p)
    return out


class Run:
    """Collects inputs, outputs and diagnostics for the manifest."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.argv = argv
        self.out = Path(args.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.inputs: list[Path] = []
        self.outputs: list[str] = []
        self.diagnostics: dict = {}
        self.started = time.perf_counter()

    def input(self, path) -> Path:
        p = resolve_input(path)
        if not p.exists():
            raise ValidationError(f"input not found: {path}", str(path))
        self.inputs.append(p)
        return p

    def output(self, name: str) -> Path:
        self.outputs.append(name)
        return self.out / name

    def write_manifest(self) -> Path:
        config = {k: v for k, v in sorted(vars(self.args).items()) if k != "func"}
        manifest = {
            "command": self.args.command,
            "argv": self.argv,
            "cwd": str(Path.cwd()),
            "version": __version__,
            "inputs": digests(self.inputs),
            "config": config,
            "outputs": sorted(self.outputs),
            "wall_clock_s": round(time.perf_counter() - self.started, 6),
            "diagnostics": self.diagnostics,
        }
        path = self.out / MANIFEST
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
            fh.write("\n")
        return path


def _solver_config(args, cfg_section: dict | None = None) -> SolverConfig:
    kw = dict(cfg_section or {})
    if args.tolerance is not None:
        kw["tolerance"] = args.tolerance
    if getattr(args, "numeraire", None):
        kw["numeraire"] = args.numeraire
    return SolverConfig.from_mapping(kw)


def _config_section(args, name: str) -> dict:
    if not args.config:
        return {}
    cp = configparser.ConfigParser()
    if not cp.read(resolve_input(args.config), encoding="utf-8"):
        raise ValidationError(f"cannot read config file {args.config}")
    return dict(cp[name]) if cp.has_section(name) else {}


def _load_table(run: Run, args):
    totals = run.input(args.totals) if args.totals else None
    tol = args.tolerance if args.tolerance is not None else 1e-6
    t = load_icio(run.input(args.icio), totals, fmt=args.format, tolerance=tol)
    if getattr(args, "aggregate", None):
        with open(run.input(args.aggregate), newline="", encoding="utf-8") as fh:
            mapping = {r["sector"].strip(): r["group"].strip() for r in csv.DictReader(fh)}
        t = aggregate_sectors(t, mapping)
    run.diagnostics["icio_residuals"] = t.residual_report()
    return t


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_ingest(run: Run, args) -> None:
    t = _load_table(run, args)
    write_icio_matrix(t, run.output("icio_matrix.csv"))
    run.diagnostics["shape"] = [len(t.index.countries), len(t.index.sectors)]


def cmd_exposure(run: Run, args) -> None:
    t = _load_table(run, args)
    a = technical_coefficients(t)
    m = a if args.direct else leontief_inverse(a)
    sectors = args.sectors.split(",") if args.sectors else list(t.index.sectors)
    records = exposure_table(m, t.x, sectors)
    write_exposure_long(records, run.output("exposure.csv"))
    write_exposure_matrix(records, run.output("fir_matrix.csv"), "FIR")
    write_exposure_matrix(records, run.output("fmr_matrix.csv"), "FMR")
    run.diagnostics["mode"] = "direct" if args.direct else "total"


def cmd_readiness_table(run: Run, args) -> None:
    path = run.input(args.inventories) if args.inventories else run.input(bundled_path(TABLE_A1))
    table = stock_ratio_table(read_inventories(path), args.base, args.current)
    formatted = table.formatted()
    formatted.index.name = "system"
    formatted.to_csv(run.output("stock_ratios.csv"), lineterminator="\n")
    with open(run.output("stock_ratios_full.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["system", "country", "status", "ratio_pct"])
        for s in table.values.index:
            for c in table.values.columns:
                v = table.values.loc[s, c]
                w.writerow([s, c, table.status.loc[s, c], "" if np.isnan(v) else repr(float(v))])
    if not args.inventories and (args.base, args.current) == (1990, 2024):
        checks = check_stock_ratios(table)
        run.diagnostics["table1"] = {
            "passed": sum(c.ok for c in checks),
            "failed": sum(not c.ok for c in checks),
            "tolerance_pp": TABLE1_TOLERANCE_PP,
            "failures": [asdict(c) for c in checks if not c.ok],
        }


def cmd_readiness_expansion(run: Run, args) -> None:
    profiles = read_profiles(run.input(args.profiles))
    with open(run.input(args.stocks), newline="", encoding="utf-8") as fh:
        stocks = [r for r in csv.DictReader(line for line in fh if not line.startswith("#"))]
    with open(run.output("expansion.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["system", "current", "objective", "units", "years_economic", "years_max",
                    "attrition_pct_economic", "attrition_pct_max"])
        for r in stocks:
            system = WeaponSystem(r["system"].strip())
            if system not in profiles:
                raise ValidationError(f"no production profile for {system.value}", system.value)
            p = profiles[system]
            cur, obj = float(r["current"]), float(r["objective"])
            e = expansion(cur, obj, p, basis=args.basis)
            w.writerow([system.value, repr(cur), repr(obj), repr(e.objective_units),
                        f"{e.years_economic:.1f}", f"{e.years_max:.1f}",
                        f"{threshold_attrition_rate(cur, p, 'economic'):.1f}",
                        f"{threshold_attrition_rate(cur, p, 'max'):.1f}"])


def cmd_readiness_fragmentation(run: Run, args) -> None:
    shares = read_manufacturer_units(run.input(args.units))
    with open(run.output("fragmentation.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["system", "manufacturers", "hhi", "fragmentation_index", "largest", "largest_share"])
        for system, m in shares.items():
            name, share = m.largest
            w.writerow([system, len(m.shares), f"{herfindahl(m):.4f}",
                        f"{fragmentation_index(m, args.variant):.1f}", name, f"{share:.2f}"])


def cmd_resilience(run: Run, args) -> None:
    d = read_dataset(run.input(args.metadata), run.input(args.values))
    res = eari_table(d, include_risk=args.include_risk, order=args.order, method=args.method)
    write_eari(res, run.output("eari.csv"))
    run.diagnostics["countries"] = len(res.scores)


def _theta(args, t):
    if args.theta_file:
        with open(resolve_input(args.theta_file), newline="", encoding="utf-8") as fh:
            return {r["sector"].strip(): float(r["theta"]) for r in csv.DictReader(fh)}
    return float(args.theta)


def cmd_baseline(run: Run, args) -> None:
    t = _load_table(run, args)
    if args.theta_file:
        run.input(args.theta_file)
    b = baseline_from_icio(t, _theta(args, t))
    problems = validate_baseline(b)
    if problems:
        raise ValidationError(f"baseline fails {len(problems)} check(s); first: {problems[0]}")
    save_baseline(b, run.out / "baseline")
    run.outputs.extend(f"baseline/{p.name}" for p in sorted((run.out / "baseline").iterdir()))
    run.diagnostics["shape"] = [b.J, b.S]


def read_shock(path: str | Path, countries, sectors) -> TradeCostShock:
    """``origin,destination,factor`` rows with optional ``sector`` (blank = all sectors)."""
    J, S = len(countries), len(sectors)
    ci = {c: k for k, c in enumerate(countries)}
    si = {s: k for k, s in enumerate(sectors)}
    ti, tf = np.ones((J, J, S, S)), np.ones((J, J, S))
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(line for line in fh if not line.startswith("#")):
            try:
                i, j = ci[r["origin"].strip()], ci[r["destination"].strip()]
            except KeyError as exc:
                raise ValidationError(f"shock names unknown country {exc.args[0]!r}", exc.args[0]) from None
            sec = (r.get("sector") or "").strip()
            f = float(r["factor"])
            if sec:
                if sec not in si:
                    raise ValidationError(f"shock names unknown sector {sec!r}", sec)
                ti[i, j, si[sec], :] = f
                tf[i, j, si[sec]] = f
            else:
                ti[i, j] = f
                tf[i, j] = f
    return TradeCostShock(ti, tf)


def write_change(e, path: str | Path) -> None:
    """Long CSV ``country,sector,metric,value_pct`` at full precision (``ALL`` = country level)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["country", "sector", "metric", "value_pct"])
        for j, c in enumerate(e.countries):
            w.writerow([c, "ALL", "gne", repr(100.0 * float(e.real_gne_change[j]))])
            w.writerow([c, "ALL", "wage", repr(100.0 * float(e.w_hat[j] - 1.0))])
            w.writerow([c, "ALL", "consumer_price", repr(100.0 * float(e.P_cons_hat[j] - 1.0))])
            for s, name in enumerate(e.sectors):
                w.writerow([c, name, "real_output", repr(100.0 * float(e.real_output_change[j, s]))])
                w.writerow([c, name, "unit_cost", repr(100.0 * float(e.c_hat[j, s] - 1.0))])


def cmd_simulate(run: Run, args) -> None:
    b = load_baseline(run.input(args.baseline))
    cfg = _solver_config(args, _config_section(args, "solver"))
    shock = None if args.shock == "none" else read_shock(run.input(args.shock), b.countries, b.sectors)
    e = solve_hat(b, shock, cfg)
    write_change(e, run.output("change.csv"))
    run.diagnostics.update(iterations=e.iterations, residual=e.residual,
                           inner_iterations=e.inner_iterations, final_damping=e.diagnostics["final_damping"])


def _trajectory_diagnostics(res) -> dict:
    return {
        "policy": res.policy,
        "focus": list(res.focus),
        "years": [{"year": y.year, "gne_pct": y.group_gne_change, "defence_output_pct": y.group_defence_change,
                   "theta_multiplier": y.theta_multiplier, "cut": y.cut, "iterations": y.iterations,
                   "residual": y.residual} for y in res.years],
        "worst_residual": max(y.residual for y in res.years),
    }


def cmd_scenario(run: Run, args) -> None:
    b = load_baseline(run.input(args.baseline))
    sc = read_scenario(run.input(args.scenario), b.countries)
    cfg = _solver_config(args, sc.solver)
    kw = dict(cfg=cfg, defence_sector=sc.defence_sector, focus=sc.focus,
              prohibitive_cap=sc.prohibitive_cap, workers=args.threads)
    if args.action == "run":
        res = run_trajectory(b, sc.blocs, sc.policy, sc.schedule, **kw)
        write_trajectory(res, run.output("trajectory.csv"))
        run.diagnostics["trajectories"] = [_trajectory_diagnostics(res)]
        return
    rapid = sc.policy if sc.policy.kind == "rapid_diversion" else PolicyPath.rapid(sc.schedule.horizon)
    cmp = compare_policies(b, sc.blocs, sc.schedule, rapid, PolicyPath.moderate(sc.schedule.horizon), **kw)
    write_trajectory(cmp.rapid, run.output("trajectory_rapid.csv"))
    write_trajectory(cmp.moderate, run.output("trajectory_moderate.csv"))
    with open(run.output("comparison.csv"), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["year", "metric", "rapid_pct", "moderate_pct", "gap_pp"])
        for r, m in zip(cmp.rapid.years, cmp.moderate.years):
            w.writerow([r.year, "defence_output", repr(r.group_defence_change), repr(m.group_defence_change),
                        repr(r.group_defence_change - m.group_defence_change)])
            w.writerow([r.year, "gne", repr(r.group_gne_change), repr(m.group_gne_change),
                        repr(r.group_gne_change - m.group_gne_change)])
    run.diagnostics["trajectories"] = [_trajectory_diagnostics(cmp.rapid), _trajectory_diagnostics(cmp.moderate)]
    run.diagnostics["crossover_year"] = cmp.crossover_year


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def find_manifests(results: Path) -> list[Path]:
    if not results.is_dir():
        return []
    return sorted(p for p in results.rglob(MANIFEST) if p.parent.name != "baseline")


def build_report(results: str | Path) -> tuple[str, dict[str, list[list[str]]]]:
    """Summary text and pivoted tables (one decimal) for every manifest under ``results``."""
    results = Path(results)
    manifests = find_manifests(results)
    if not manifests:
        return "no runs found\n", {}
    lines, pivots = [], {}
    for path in manifests:
        try:
            with open(path, encoding="utf-8") as fh:
                m = json.load(fh)
            command, diag = m["command"], m.get("diagnostics", {})
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ValidationError(f"corrupt manifest {path}: {exc}", str(path)) from None
        rel = path.parent.relative_to(results).as_posix() or "."
        lines.append(f"[{rel}] {command} (defready {m.get('version', '?')})")
        if "table1" in diag:
            t1 = diag["table1"]
            total = t1["passed"] + t1["failed"]
            lines.append(f"  Table 1 reproduction: {t1['passed']}/{total} cells pass, {t1['failed']} fail "
                         f"(tolerance {t1['tolerance_pp']} pp)")
        for traj in diag.get("trajectories", []):
            lines.append(f"  policy {traj['policy']} (focus {', '.join(traj['focus'])}):")
            rows = [["year", "gne_pct", "defence_output_pct"]]
            for y in sorted(traj["years"], key=lambda y: y["year"]):
                lines.append(f"    year {y['year']:>2}: GNE {y['gne_pct']:+.1f}%, "
                             f"defence output {y['defence_output_pct']:+.1f}%")
                rows.append([str(y["year"]), f"{y['gne_pct']:.1f}", f"{y['defence_output_pct']:.1f}"])
            lines.append(f"    worst residual {traj['worst_residual']:.3g} of world GDP")
            pivots[f"{rel.replace('/', '_')}_{traj['policy']}"] = rows
        if "crossover_year" in diag:
            cy = diag["crossover_year"]
            lines.append(f"  defence-output crossover: {'none' if cy is None else f'year {cy}'}")
        if "residual" in diag:
            lines.append(f"  residual {diag['residual']:.3g} of world GDP after {diag.get('iterations')} iterations")
    return "\n".join(lines) + "\n", pivots


def cmd_report(args) -> int:
    text, pivots = build_report(args.results)
    sys.stdout.write(text)
    out = Path(args.out) if args.out else Path(args.results)
    if pivots or text != "no runs found\n":
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.txt").write_text(text, encoding="utf-8")
        for name, rows in pivots.items():
            with open(out / f"report_{name}.csv", "w", newline="", encoding="utf-8") as fh:
                csv.writer(fh, lineterminator="\n").writerows(rows)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser, out_required: bool = True) -> None:
    p.add_argument("--out", required=out_required, help="output directory")
    p.add_argument("--config", help="INI file; a section named after the command supplies defaults")
    p.add_argument("--tolerance", type=float, help="solver or ICIO identity tolerance")
    p.add_argument("--seed", type=int, help="reserved; all computation is deterministic")
    p.add_argument("--threads", type=int, default=1, help="worker threads for independent solves")
    p.add_argument("-v", "--verbose", action="store_true")


def _icio_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--icio", required=True, help="ICIO flows CSV")
    p.add_argument("--totals", help="totals CSV (long format)")
    p.add_argument("--format", choices=("long", "matrix"), default="long")
    p.add_argument("--aggregate", help="sector,group mapping CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = UsageParser(prog="defready", description="Defence-readiness metrics and trade-decoupling scenarios.")
    parser.add_argument("--version", action="version", version=f"defready {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="load and validate an ICIO table")
    _icio_args(p)
    _common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("exposure", help="foreign input and market reliance")
    _icio_args(p)
    p.add_argument("--sectors", help="comma-separated sector filter (default: all)")
    p.add_argument("--direct", action="store_true", help="direct requirements only")
    _common(p)
    p.set_defaults(func=cmd_exposure)

    p = sub.add_parser("readiness", help="inventory, production and fragmentation metrics")
    rsub = p.add_subparsers(dest="action", required=True)
    q = rsub.add_parser("table", help="stock ratios between two years")
    q.add_argument("--inventories", help="country,system,year,count CSV (default: bundled data)")
    q.add_argument("--base", type=int, default=1990)
    q.add_argument("--current", type=int, default=2024)
    _common(q)
    q.set_defaults(func=cmd_readiness_table)
    q = rsub.add_parser("expansion", help="expansion times and threshold attrition")
    q.add_argument("--profiles", required=True, help="system,economic_rate,max_rate,lead_time_years CSV")
    q.add_argument("--stocks", required=True, help="system,current,objective CSV")
    q.add_argument("--basis", choices=("gap", "absolute"), default="gap")
    _common(q)
    q.set_defaults(func=cmd_readiness_expansion)
    q = rsub.add_parser("fragmentation", help="market fragmentation per system")
    q.add_argument("--units", required=True, help="system,manufacturer,units CSV")
    q.add_argument("--variant", choices=("reciprocal", "complement"), default="reciprocal")
    _common(q)
    q.set_defaults(func=cmd_readiness_fragmentation)

    p = sub.add_parser("resilience", help="composite resilience index")
    p.add_argument("--metadata", required=True)
    p.add_argument("--values", required=True)
    p.add_argument("--include-risk", action="store_true")
    p.add_argument("--order", choices=("normalize_first", "impute_first"), default="normalize_first")
    p.add_argument("--method", choices=("minmax", "zscore"), default="minmax")
    _common(p)
    p.set_defaults(func=cmd_resilience)

    p = sub.add_parser("baseline", help="build a model baseline from an ICIO table")
    _icio_args(p)
    p.add_argument("--theta", type=float, default=4.0, help="trade elasticity for every sector")
    p.add_argument("--theta-file", help="sector,theta CSV")
    _common(p)
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("simulate", help="one counterfactual")
    p.add_argument("--baseline", required=True)
    p.add_argument("--shock", required=True, help="'none' or origin,destination,factor[,sector] CSV")
    p.add_argument("--numeraire", help="'world' or a country code")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("scenario", help="multi-year decoupling scenarios")
    p.add_argument("action", choices=("run", "compare"))
    p.add_argument("--baseline", required=True)
    p.add_argument("--scenario", required=True, help="scenario INI file")
    p.add_argument("--numeraire", help="'world' or a country code")
    _common(p)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("report", help="summarize result directories")
    p.add_argument("results")
    p.add_argument("--out", help="where to write report files (default: the results directory)")
    p.set_defaults(func=None)
    return parser


def _apply_config_defaults(parser_args: argparse.Namespace, argv: list[str]) -> None:
    """Options not given on the command line take values from the command's config section."""
    section = _config_section(parser_args, parser_args.command)
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, raw in section.items():
        name = key.replace("-", "_")
        if name in given or not hasattr(parser_args, name):
            continue
        current = getattr(parser_args, name)
        if isinstance(current, bool):
            value = raw.strip().lower() in ("1", "true", "yes", "on")
        elif isinstance(current, int):
            value = int(raw)
        elif isinstance(current, float):
            value = float(raw)
        elif name == "tolerance":
            value = float(raw)
        else:
            value = raw
        setattr(parser_args, name, value)


def run_command(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "report":
            return cmd_report(args)
        _apply_config_defaults(args, argv)
        if args.seed is not None:
            logger.info("--seed is reserved; results do not depend on it")
        run = Run(args, argv)
        args.func(run, args)
        run.write_manifest()
    except ValidationError as exc:
        print(f"defready: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (FileNotFoundError, KeyError) as exc:
        print(f"defready: invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ConvergenceError as exc:
        print(f"defready: solver did not converge: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def rerun(manifest: str | Path, out: str | Path | None = None) -> int:
    """Re-execute the run recorded in ``manifest``, optionally into another directory."""
    with open(manifest, encoding="utf-8") as fh:
        m = json.load(fh)
    argv = list(m["argv"])
    if out is not None:
        argv = _replace_out(argv, str(Path(out).resolve()))
    logger.info("rerunning in %s: defready %s", m["cwd"], shlex.join(argv))
    here = Path.cwd()
    os.chdir(m["cwd"])
    try:
        return run_command(argv)
    finally:
        os.chdir(here)


def _replace_out(argv: list[str], out: str) -> list[str]:
    res, skip = [], False
    for a in argv:
        if skip:
            skip = False
            continue
        if a == "--out":
            skip = True
            continue
        if a.startswith("--out="):
            continue
        res.append(a)
    return res + ["--out", out]


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
