"""Command-line front end.

Commands: bulk-chern, edge-index, spectral-flow, fermi-points, local-kernel,
verify-bec, check-evenness, selftest.  Options may also come from a JSON
config file (--config); explicit command-line flags override file values.

Exit codes: 0 success, 1 identity mismatch or symmetry violation, 2 usage
error, 3 numerical failure, 4 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import catalog
from .bloch import second_chern_number
from .errors import (
    BoundaryDegenerateError,
    BulkEdgeError,
    CutoffInsufficientError,
    GaplessInputError,
    InvalidArgumentError,
    NotAFermiPointError,
    ResolutionInsufficientError,
    SymmetryViolationError,
    TrackingFailureError,
    WindowBoundaryError,
)
from .fermi import check_evenness, edge_index, spectral_flow, verify_bulk_edge
from .localmodel import (
    LocalModelParams,
    discriminant,
    kernel_classification,
)
from .report import InvariantReport, fermi_point_row, render
from .selftest import run_all

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

NUMERICAL_ERRORS = (
    GaplessInputError,
    TrackingFailureError,
    CutoffInsufficientError,
    WindowBoundaryError,
    BoundaryDegenerateError,
    NotAFermiPointError,
    ResolutionInsufficientError,
)

CONFIG_KEYS = {
    "family": str,
    "grid": int,
    "scan": int,
    "truncation": int,
    "mu": (float, str),
    "samples": int,
    "output": str,
    "format": str,
    "threads": (int, str),
    "seed": int,
    "energy": float,
    "c2_method": str,
}

DEFAULTS = {
    "grid": 16,
    "scan": 64,
    "truncation": 60,
    "mu": "auto",
    "samples": 512,
    "format": "text",
    "threads": "auto",
    "seed": 42,
    "energy": 0.0,
    "c2_method": "improved",
}


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    family: str | None
    grid: int
    scan: int
    truncation: int
    mu: float | str
    samples: int
    output: str | None
    format: str
    threads: int
    seed: int
    energy: float
    c2_method: str
    stabilize: bool = False
    break_ai: bool = False
    reverse: bool = False
    grid_explicit: bool = False


def _load_config_file(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    for key, value in data.items():
        if key not in CONFIG_KEYS:
            raise UsageError(f"unknown config key '{key}'")
        expected = CONFIG_KEYS[key]
        if not isinstance(value, expected if isinstance(expected, tuple) else (expected,)):
            raise UsageError(f"config key '{key}' has the wrong type")
    return data


def _resolve_threads(raw) -> int:
    if raw in ("auto", None):
        env = os.environ.get("BULKEDGE_THREADS")
        if env is not None:
            try:
                return max(1, int(env))
            except ValueError as exc:
                raise UsageError(f"BULKEDGE_THREADS is not an integer: {env!r}") from exc
        return min(8, os.cpu_count() or 1)
    return max(1, int(raw))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bulkedge",
        description="Bulk and edge topological invariants of Hermitian operator families.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "bulk-chern": "lattice second Chern number of a bulk family",
        "edge-index": "sum of Fermi-point signs of an edge family",
        "spectral-flow": "signed eigenvalue-crossing count around a circle family",
        "fermi-points": "locate and sign the Fermi points of an edge family",
        "local-kernel": "exact kernel classification of one model parameter point",
        "verify-bec": "check the bulk-edge identity c2 = -edge index",
        "check-evenness": "time-reversal pairing and evenness of the edge index",
        "selftest": "run the full acceptance suite",
    }
    for name, help_text in commands.items():
        p = sub.add_parser(name, help=help_text)
        if name != "selftest":
            p.add_argument("--family", help="catalog identifier (see README)")
        p.add_argument("--config", help="JSON config file; flags override its values")
        p.add_argument("--grid", type=int, help="per-axis bulk grid resolution (default 16)")
        p.add_argument("--scan", type=int, help="per-axis Fermi scan resolution (default 64)")
        p.add_argument("--N", dest="truncation", type=int, help="half-line truncation sites (default 60)")
        p.add_argument("--mu", help="spectral window radius or 'auto'")
        p.add_argument("--samples", type=int, help="loop samples for spectral flow (default 512)")
        p.add_argument("--output", help="write the report to this path")
        p.add_argument("--format", choices=["json", "csv", "text"], help="report format (default text)")
        p.add_argument("--threads", help="worker threads or 'auto'")
        p.add_argument("--seed", type=int, help="seed for randomized checks (default 42)")
        p.add_argument("--energy", type=float, help="probe energy for local-kernel (default 0)")
        p.add_argument("--c2-method", dest="c2_method", choices=["improved", "plain"],
                       help="plaquette field-strength scheme (default improved)")
        if name == "verify-bec":
            p.add_argument("--stabilize", action="store_true",
                           help="direct-sum the family with a constant gapped block first")
        if name == "check-evenness":
            p.add_argument("--break-ai", dest="break_ai", action="store_true",
                           help="perturb the family so time reversal fails (diagnostic)")
        if name in ("edge-index", "spectral-flow", "fermi-points"):
            p.add_argument("--reverse-orientation", dest="reverse", action="store_true",
                           help="reverse the base orientation")
    return parser


def parse_config(argv: list[str]) -> RunConfig:
    parser = build_parser()
    ns = parser.parse_args(argv)
    file_values = _load_config_file(ns.config) if getattr(ns, "config", None) else {}

    def pick(key, cast=None):
        flag = getattr(ns, key, None)
        if flag is not None:
            return cast(flag) if cast else flag
        if key in file_values:
            return cast(file_values[key]) if cast else file_values[key]
        return DEFAULTS.get(key)

    mu = pick("mu")
    if isinstance(mu, str) and mu != "auto":
        try:
            mu = float(mu)
        except ValueError as exc:
            raise UsageError(f"--mu must be a number or 'auto', got {mu!r}") from exc
    config = RunConfig(
        command=ns.command,
        family=pick("family"),
        grid=int(pick("grid")),
        scan=int(pick("scan")),
        truncation=int(pick("truncation")),
        mu=mu,
        samples=int(pick("samples")),
        output=pick("output"),
        format=pick("format"),
        threads=_resolve_threads(pick("threads")),
        seed=int(pick("seed")),
        energy=float(pick("energy")),
        c2_method=pick("c2_method"),
        stabilize=bool(getattr(ns, "stabilize", False)),
        break_ai=bool(getattr(ns, "break_ai", False)),
        reverse=bool(getattr(ns, "reverse", False)),
        grid_explicit=getattr(ns, "grid", None) is not None or "grid" in file_values,
    )
    if config.grid < 8:
        raise UsageError(f"grid must be at least 8, got {config.grid}")
    if config.truncation < 8:
        raise UsageError(f"truncation must be at least 8 sites, got {config.truncation}")
    if config.scan < 1 or config.samples < 1:
        raise UsageError("resolutions must be positive")
    if config.command != "selftest" and not config.family:
        raise UsageError(f"command '{config.command}' requires --family")
    return config


def _entry_for(config: RunConfig) -> catalog.CatalogEntry:
    try:
        return catalog.get_entry(config.family)
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from exc


def run(config: RunConfig) -> tuple[InvariantReport, int]:
    """Execute one configured command; returns the report and exit code."""
    t0 = time.perf_counter()
    report = InvariantReport(family=config.family or "-", command=config.command)
    diag = report.diagnostics
    diag["seed"] = config.seed
    exit_code = EXIT_OK

    if config.command == "selftest":
        results = run_all(threads=config.threads, seed=config.seed)
        for res in results:
            print(res.line())
        failed = [r for r in results if not r.passed]
        diag["criteria_total"] = len(results)
        diag["criteria_failed"] = len(failed)
        report.family = "acceptance-suite"
        return report, (EXIT_MISMATCH if failed else EXIT_OK)

    entry = _entry_for(config)

    if config.command == "bulk-chern":
        result = second_chern_number(
            entry.require_bulk(), config.grid, improved=config.c2_method == "improved"
        )
        report.bulk_c2 = result.rounded
        report.bulk_c2_raw = result.raw
        diag.update(grid=result.grid, quality=result.quality,
                    min_gap=result.min_abs_eigenvalue, method=config.c2_method)

    elif config.command in ("edge-index", "fermi-points"):
        edge = entry.require_edge()
        if config.reverse:
            edge = edge.reversed()
        index, points = edge_index(edge, config.scan)
        report.edge_index = index
        report.fermi_points = [fermi_point_row(fp) for fp in points]
        diag.update(scan=config.scan, reversed=config.reverse)

    elif config.command == "spectral-flow":
        edge = entry.require_edge()
        if config.reverse:
            edge = edge.reversed()
        mu = None if config.mu == "auto" else float(config.mu)
        flow = spectral_flow(edge, n_sites=config.truncation, mu=mu,
                             samples=config.samples, threads=config.threads)
        report.spectral_flow = flow
        diag.update(truncation=config.truncation, samples=config.samples,
                    mu=config.mu if config.mu == "auto" else float(config.mu),
                    reversed=config.reverse)

    elif config.command == "local-kernel":
        if entry.local_params is None:
            raise UsageError("local-kernel requires a 'local:...' family")
        params = LocalModelParams(
            a=entry.local_params.a, b=entry.local_params.b,
            c=entry.local_params.c, e=config.energy,
        )
        cls = kernel_classification(params)
        diag.update(
            kind=cls.kind.value,
            dimension="infinite" if cls.dimension is None else cls.dimension,
            condition=cls.condition_tag,
            discriminant=discriminant(params),
            boundary_energy=float(np.sqrt(params.a**2 + abs(params.b) ** 2)),
            energy=config.energy,
            basis=[{"decay_re": v.decay.real, "decay_im": v.decay.imag,
                    "amplitudes_re": [x.real for x in v.amplitudes],
                    "amplitudes_im": [x.imag for x in v.amplitudes]} for v in cls.basis],
        )

    elif config.command == "verify-bec":
        if config.stabilize:
            entry = catalog.stabilized(entry)
            report.family = entry.entry_id
        grid = config.grid if config.grid_explicit else "auto"
        outcome = verify_bulk_edge(entry.require_bulk(), entry.require_edge(),
                                   grid=grid, scan_resolution=config.scan, seed=config.seed)
        report.bulk_c2 = outcome["bulk_c2"]
        report.bulk_c2_raw = outcome["bulk_c2_raw"]
        report.edge_index = outcome["edge_index"]
        report.bulk_edge_ok = outcome["bulk_edge_ok"]
        report.fermi_points = [fermi_point_row(fp) for fp in outcome["fermi_points"]]
        diag.update(grids=outcome["grids"], c2_quality=outcome["bulk_c2_quality"],
                    min_gap=outcome["bulk_min_gap"], ai_deviation=outcome["ai_deviation"],
                    scan=config.scan)
        if not outcome["bulk_edge_ok"]:
            exit_code = EXIT_MISMATCH

    elif config.command == "check-evenness":
        if config.break_ai:
            entry = catalog.with_broken_time_reversal(entry)
            report.family = entry.entry_id
        outcome = check_evenness(entry.require_edge(), scan_resolution=config.scan,
                                 seed=config.seed)
        report.evenness_ok = outcome.ok
        report.edge_index = outcome.index
        report.fermi_points = [fermi_point_row(fp) for fp in outcome.fermi_points]
        diag.update(ai_deviation=outcome.ai_deviation, pairing_ok=outcome.pairing_ok,
                    fixed_point_ok=outcome.fixed_point_ok, signs_ok=outcome.signs_ok,
                    index_even=outcome.index_even, scan=config.scan)
        if outcome.failure:
            diag["failure"] = outcome.failure
        if not outcome.ok:
            exit_code = EXIT_MISMATCH

    else:
        raise UsageError(f"unknown command '{config.command}'")

    diag["runtime_seconds"] = round(time.perf_counter() - t0, 6)
    return report, exit_code


def _emit(report: InvariantReport, config: RunConfig) -> None:
    text = render(report, config.format)
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        config = parse_config(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        report, exit_code = run(config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SymmetryViolationError as exc:
        print(f"symmetry violation: {exc}", file=sys.stderr)
        return EXIT_MISMATCH
    except NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except InvalidArgumentError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BulkEdgeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    if config.command != "selftest":
        try:
            _emit(report, config)
        except OSError as exc:
            print(f"error: cannot write report to {config.output}: {exc}", file=sys.stderr)
            return EXIT_IO
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
