# This is the command-line entry point of the laboratory (`python -m dipelab`)
# Subcommands: coeffs, simulate, verify, plan, bench; every run echoes its resolved configuration
import argparse
import csv
import io
import json
import logging
import sys
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .bench import Sweep, expand_families, parse_grid, parse_n_range, run_bench
from .catalog import resolve_coefficients
from .config import configure_logging, get_settings, load_command_defaults
from .errors import ArgumentError, DipeError, VerificationError
from .moments import Ensemble, MomentCoefficients
from .planner import BoundKind, PlanRequest, Regime, scaling_table, sufficient_copies
from .protocol import EnsembleKind
from .simulate import simulate
from .verify import Suite, VerifyOptions, run_suite

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2

OUTPUT_FORMATS = ("csv", "json", "pretty")
ENSEMBLE_CHOICES = ("clifford", "haar", "both")


# ==================== OUTPUT ====================

def _cell(value: Any) -> Any:
    if value is None:
        return ""
    if hasattr(value, "value"):
        return value.value
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _json_default(value: Any) -> Any:
    if hasattr(value, "value"):
        return value.value
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return str(value)


def _columns(rows: Sequence[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns


def render(
    rows: Sequence[Dict[str, Any]],
    fmt: str,
    config: Dict[str, Any],
    timestamp: bool = True,
    extra: Optional[Dict[str, Any]] = None,
) -> str:
    """Rows as CSV (with `#` provenance lines before the header), JSON or an aligned text table."""
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds") if timestamp else None
    if fmt == "json":
        doc: Dict[str, Any] = {"config": config}
        if stamp:
            doc["generated"] = stamp
        doc["rows"] = list(rows)
        if extra:
            doc.update(extra)
        return json.dumps(doc, indent=2, default=_json_default) + "\n"

    buffer = io.StringIO()
    buffer.write("# config " + json.dumps(config, sort_keys=True, default=_json_default) + "\n")
    if stamp:
        buffer.write(f"# generated {stamp}\n")
    columns = _columns(rows)
    if fmt == "csv":
        writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _cell(row.get(k)) for k in columns})
        return buffer.getvalue()

    cells = [[str(_cell(row.get(k))) for k in columns] for row in rows]
    widths = [max([len(c)] + [len(r[i]) for r in cells]) for i, c in enumerate(columns)]
    buffer.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
    for r in cells:
        buffer.write("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip() + "\n")
    return buffer.getvalue()


def _ensembles(choice: str) -> List[Ensemble]:
    return [Ensemble.CLIFFORD, Ensemble.HAAR] if choice == "both" else [Ensemble(choice)]


# ==================== COEFFS ====================

def _coefficient_row(label: str, coeffs: MomentCoefficients, ensembles: Sequence[Ensemble]) -> Dict[str, Any]:
    row: Dict[str, Any] = {"n": coeffs.n, "family": label, "A": coeffs.A, "C": coeffs.C}
    fields = ["A", "C"]
    for ensemble in ensembles:
        field = "B_cl" if ensemble == Ensemble.CLIFFORD else "B_haar"
        row[field] = getattr(coeffs, field)
        fields.append(field)
    row["overlap"] = coeffs.overlap
    for field in fields:
        row[f"method_{field}"] = coeffs.methods.get(field)
    row["notes"] = "; ".join(f"{k}: {v}" for k, v in sorted(coeffs.notes.items()))
    return row


def cmd_coeffs(args: argparse.Namespace) -> Dict[str, Any]:
    n_values = parse_n_range(args.n_range) if args.n_range else [None]
    families = expand_families(args.family, n_values)
    ensembles = _ensembles(args.ensemble)
    rows = []
    for family in sorted(families, key=lambda f: (f.kind.value, f.n, f.label)):
        coeffs = resolve_coefficients(family, allow_large=args.allow_large, mc_samples=args.mc_samples, seed=args.seed)
        rows.append(_coefficient_row(family.label, coeffs, ensembles))
    return {"rows": rows}


# ==================== SIMULATE ====================

def cmd_simulate(args: argparse.Namespace) -> Dict[str, Any]:
    result = simulate(
        args.rho,
        args.sigma,
        ensemble=args.ensemble,
        N_U=args.nu,
        N_M=args.nm,
        seed=args.seed,
        outcome_noise=args.noise,
        workers=args.workers,
    )
    record = result.record
    summary = {
        "quantity": "estimate",
        "empirical": record.estimate,
        "standard_error": record.standard_error,
        "blocks": record.config.N_U,
        "shots": record.config.N_M,
        "total_copies": record.config.total_copies,
    }
    rows = [summary] + [row.model_dump() for row in result.variance]
    extra = result.model_dump(mode="json", exclude={"variance"})
    extra["variance"] = [row.model_dump() for row in result.variance]
    return {"rows": rows, "extra": extra}


# ==================== VERIFY ====================

def cmd_verify(args: argparse.Namespace) -> Dict[str, Any]:
    suites = list(Suite) if args.suite == "all" else [Suite(args.suite)]
    families = [f for text in args.families for f in text.split(",") if f]
    options = VerifyOptions(n=args.n, nmax=args.nmax, samples=args.samples, seed=args.seed, families=families or ("all",))
    rows = []
    passed = True
    for suite in suites:
        report = run_suite(suite, options, strict=args.strict)
        passed = passed and report.passed
        for check in report.checks:
            rows.append({"suite": suite.value, **check.model_dump()})
    return {"rows": rows, "passed": passed}


# ==================== PLAN ====================

def cmd_plan(args: argparse.Namespace) -> Dict[str, Any]:
    if args.table:
        n_values = range(1, args.nmax + 1)
        rows = []
        for row in scaling_table(args.eps, args.delta, n_values):
            out = {k: v for k, v in row.model_dump().items() if k != "N_star"}
            out.update({f"N_star_n{n}": row.N_star[n] for n in n_values})
            rows.append(out)
        return {"rows": rows}
    request = PlanRequest(
        n=args.n,
        epsilon=args.eps,
        delta=args.delta,
        regime=args.regime,
        A=args.A,
        B=args.B,
        C=args.C,
        overlap=args.overlap,
        bound=args.bound,
    )
    result = sufficient_copies(request)
    row = {k: v for k, v in result.model_dump().items() if k != "breakdown"}
    row.update({f"term_{k}": v for k, v in result.breakdown.items()})
    return {"rows": [row]}


# ==================== BENCH ====================

def cmd_bench(args: argparse.Namespace) -> Dict[str, Any]:
    result = run_bench(
        sweep=args.sweep,
        families=args.family,
        n_values=parse_n_range(args.n_range),
        ensembles=_ensembles(args.ensemble),
        p_grid=parse_grid(args.p_grid),
        allow_large=args.allow_large,
        mc_samples=args.mc_samples,
        seed=args.seed,
        workers=args.workers,
    )
    rows = [row.model_dump() for row in result.rows]
    extra = {"rigid": {str(n): v for n, v in result.rigid.items()}} if result.rigid else None
    return {"rows": rows, "extra": extra}


# ==================== PARSER ====================

# Flags whose argparse action appends; config-file values fill them only when the flag is absent
_APPEND_DEFAULTS = {
    "coeffs": {"family": ["ghz:3"]},
    "bench": {"family": ["plusprod", "ghz", "w", "belldimer", "haar"]},
    "verify": {"families": ["all"]},
}


def _common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--out", choices=OUTPUT_FORMATS, default="csv", help="Output format")
    parser.add_argument("--no-timestamp", action="store_true", help="Omit the timestamped header line")
    parser.add_argument("--log-level", default=None, help="Logging level (default from DIPE_LOG_LEVEL)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dipelab",
        description="Distributed inner-product estimation laboratory",
    )
    parser.add_argument("--config", default=None, help="JSON file of per-subcommand flag defaults (or DIPE_CONFIG)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coeffs", help="Variance coefficients A, C, B per state family")
    p.add_argument("--family", action="append", default=None, help="Family string, e.g. ghz:4 or ghz with --n-range")
    p.add_argument("--n-range", default=None, help="Qubit counts a:b for family strings without n")
    p.add_argument("--ensemble", choices=ENSEMBLE_CHOICES, default="both")
    p.add_argument("--allow-large", action="store_true", help="Run the generic Haar contraction past its default cap")
    p.add_argument("--mc-samples", type=int, default=None, help="Monte Carlo samples for B beyond the exact caps")
    p.add_argument("--seed", type=int, default=0)
    _common(p)
    p.set_defaults(func=cmd_coeffs)

    p = sub.add_parser("simulate", help="Monte Carlo run of the estimation protocol")
    p.add_argument("--rho", required=True, help="Family string of Alice's state")
    p.add_argument("--sigma", required=True, help="Family string of Bob's state")
    p.add_argument("--ensemble", choices=[e.value for e in EnsembleKind], default="clifford")
    p.add_argument("--nu", type=int, default=1000, help="Unitary blocks (shadow: repetitions)")
    p.add_argument("--nm", type=int, default=1, help="Shots per block (shadow: copies per party)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.0, help="Per-bit outcome depolarizing strength p")
    p.add_argument("--workers", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="Run a verification suite")
    p.add_argument("suite", choices=[s.value for s in Suite] + ["all"])
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--nmax", type=int, default=10)
    p.add_argument("--samples", type=int, default=None, help="Monte Carlo sample count override")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--families", action="append", default=None, help="Certificate families (comma separated or 'all')")
    p.add_argument("--strict", action="store_true", help="Stop at the first failing suite")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("plan", help="Chebyshev copy budgets")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--delta", type=float, default=0.1)
    p.add_argument("--regime", choices=[r.value for r in Regime], default="clifford")
    p.add_argument("--A", type=float, default=None)
    p.add_argument("--B", type=float, default=None)
    p.add_argument("--C", type=float, default=None)
    p.add_argument("--overlap", type=float, default=None)
    p.add_argument("--bound", choices=[b.value for b in BoundKind], default="simple")
    p.add_argument("--table", action="store_true", help="Print the worst-case scaling table")
    p.add_argument("--nmax", type=int, default=10, help="Largest n of the table")
    _common(p)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("bench", help="Coefficient sweeps for plotting")
    p.add_argument("--sweep", choices=[s.value for s in Sweep], default="families")
    p.add_argument("--family", action="append", default=None)
    p.add_argument("--n-range", default="1:3")
    p.add_argument("--ensemble", choices=ENSEMBLE_CHOICES, default="both")
    p.add_argument("--p-grid", default="0:1:11", help="Depolarizing grid start:stop:count")
    p.add_argument("--allow-large", action="store_true")
    p.add_argument("--mc-samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=None)
    _common(p)
    p.set_defaults(func=cmd_bench)
    return parser


def _subparsers(parser: argparse.ArgumentParser) -> Dict[str, argparse.ArgumentParser]:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return dict(action.choices)
    return {}


def _apply_file_defaults(parser: argparse.ArgumentParser, defaults: Dict[str, Dict[str, Any]]) -> None:
    subparsers = _subparsers(parser)
    for command, values in defaults.items():
        if command not in subparsers:
            raise ArgumentError(f"Config file names unknown subcommand {command!r}")
        known = {a.dest for a in subparsers[command]._actions} - {"help", "func"}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ArgumentError(f"Config file has unknown {command} flags: {', '.join(unknown)}")
        appended = _APPEND_DEFAULTS.get(command, {})
        subparsers[command].set_defaults(**{k: v for k, v in values.items() if k not in appended})


def _fill_append_defaults(args: argparse.Namespace, defaults: Dict[str, Dict[str, Any]]) -> None:
    for dest, fallback in _APPEND_DEFAULTS.get(args.command, {}).items():
        if getattr(args, dest) is None:
            value = defaults.get(args.command, {}).get(dest, fallback)
            setattr(args, dest, [value] if isinstance(value, str) else list(value))


def resolved_config(args: argparse.Namespace) -> Dict[str, Any]:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "no_timestamp", "log_level")}


def main(argv: Optional[Sequence[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    known, _ = pre.parse_known_args(argv)
    try:
        defaults = load_command_defaults(known.config or get_settings().config_path)
        _apply_file_defaults(parser, defaults)
    except DipeError as e:
        print(f"dipelab: error: {e.message}", file=sys.stderr)
        return EXIT_USAGE

    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    _fill_append_defaults(args, defaults)
    config = resolved_config(args)

    try:
        configure_logging(args.log_level)
        logger.info("config %s", json.dumps(config, sort_keys=True, default=_json_default))
        result = args.func(args)
    except VerificationError as e:
        logger.error("%s: %s", e.message, e.details)
        print(f"dipelab: {e.message}", file=sys.stderr)
        return EXIT_FAILED
    except DipeError as e:
        logger.error("%s: %s", e.code, e.message)
        print(f"dipelab: error: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as e:
        logger.error("invalid arguments: %s", e)
        print(f"dipelab: error: {e}", file=sys.stderr)
        return EXIT_USAGE

    stdout.write(render(result["rows"], args.out, config, timestamp=not args.no_timestamp, extra=result.get("extra")))
    if result.get("passed") is False:
        return EXIT_FAILED
    return EXIT_OK
