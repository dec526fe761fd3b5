"""Command-line front end: sweeps, threshold solving, error bands, ingestion.

Angles on the command line are in degrees by default (the lab convention
for wave-plate settings); ``--radians`` switches.  Every subcommand emits
either CSV (header row, 9-decimal fixed-point reals) or JSON (full
precision plus a metadata object).  Exit codes: 0 success, 1 usage error,
2 numeric/domain failure, 3 I/O failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .analysis import (
    CoincidenceRecord,
    ErrorModelConfig,
    critical_gamma,
    evaluate_point,
    ingest_counts,
    monte_carlo_band,
    sweep,
)
from .channels import theta1_to_gamma
from .errors import QracError
from .protocol import classical_bruteforce

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_NUMERIC = 2
EXIT_IO = 3

SUBCOMMANDS = ("witness", "sweep", "critical", "montecarlo", "ingest", "classical-bound")

COUNTS_HEADER = ["a0", "a1", "y", "cc0", "cc1"]
COUNTS_HEADER_LABELED = COUNTS_HEADER + ["gamma_label", "fa_label", "fb_label"]


class UsageError(QracError):
    """Bad flags or malformed input files; maps to exit code 1."""


@dataclass
class CommandPlan:
    """A validated invocation: subcommand, parameters and output routing."""

    subcommand: str
    parameters: dict
    output_format: str = "csv"
    destination: str | None = None


@dataclass
class Document:
    """Tabular result of one command, plus JSON-only top-level extras."""

    columns: list[str]
    rows: list[list]
    metadata: dict
    extra: dict = field(default_factory=dict)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2); route to exit code 1
        raise UsageError(message)


def _unit_interval(name: str):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not 0.0 <= value <= 1.0:
            raise argparse.ArgumentTypeError(f"{name} = {value} outside [0, 1]")
        return value

    return parse


def _positive_float(name: str):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not (math.isfinite(value) and value > 0.0):
            raise argparse.ArgumentTypeError(f"{name} = {value} must be positive")
        return value

    return parse


def _nonnegative_float(name: str):
    def parse(text: str) -> float:
        try:
            value = float(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be a number, got {text!r}") from None
        if not (math.isfinite(value) and value >= 0.0):
            raise argparse.ArgumentTypeError(f"{name} = {value} must be >= 0")
        return value

    return parse


def _positive_int(name: str):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{name} must be an integer, got {text!r}") from None
        if value < 1:
            raise argparse.ArgumentTypeError(f"{name} = {value} must be >= 1")
        return value

    return parse


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError(f"seed = {value} must fit in 64 unsigned bits")
    return value


def _percentiles(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"percentiles must be 'lo,hi', got {text!r}")
    try:
        lo, hi = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"percentiles must be numbers, got {text!r}") from None
    if not 0.0 <= lo < hi <= 100.0:
        raise argparse.ArgumentTypeError(f"percentiles {text!r} must satisfy 0 <= lo < hi <= 100")
    return lo, hi


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="output format (default csv)")
    parser.add_argument("--output", default=None, metavar="PATH",
                        help="write the document to PATH instead of standard output")


def build_parser() -> _Parser:
    parser = _Parser(prog="qracsim", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qracsim {__version__}")
    subparsers = parser.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    p = subparsers.add_parser("witness", help="witness and success probability at one point")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--gamma", type=_unit_interval("gamma"), help="damping parameter in [0, 1]")
    group.add_argument("--theta1", type=float, metavar="ANGLE",
                       help="channel wave-plate angle instead of gamma")
    p.add_argument("--fa", type=_unit_interval("fa"), default=0.0, help="Alice-side filter parameter")
    p.add_argument("--fb", type=_unit_interval("fb"), default=0.0, help="Bob-side filter parameter")
    p.add_argument("--radians", action="store_true", help="interpret angle flags as radians")
    _add_output_flags(p)

    p = subparsers.add_parser("sweep", help="witness as a function of gamma")
    p.add_argument("--gamma-start", type=_unit_interval("gamma-start"), default=0.0)
    p.add_argument("--gamma-end", type=_unit_interval("gamma-end"), default=1.0)
    p.add_argument("--steps", type=_positive_int("steps"), default=5,
                   help="number of grid points (default 5)")
    p.add_argument("--fa", type=_unit_interval("fa"), default=0.0)
    p.add_argument("--fb", type=_unit_interval("fb"), default=0.0)
    _add_output_flags(p)

    p = subparsers.add_parser("critical", help="solve for the critical damping gamma_c")
    p.add_argument("--fa", type=_unit_interval("fa"), required=True)
    p.add_argument("--fb", type=_unit_interval("fb"), required=True)
    p.add_argument("--tol", type=_positive_float("tol"), default=1e-6,
                   help="bisection tolerance on gamma (default 1e-6)")
    _add_output_flags(p)

    p = subparsers.add_parser("montecarlo", help="instrument-error bands for the witness")
    p.add_argument("--gamma-start", type=_unit_interval("gamma-start"), default=0.0)
    p.add_argument("--gamma-end", type=_unit_interval("gamma-end"), default=1.0)
    p.add_argument("--steps", type=_positive_int("steps"), default=5)
    p.add_argument("--fa", type=_unit_interval("fa"), default=0.0)
    p.add_argument("--fb", type=_unit_interval("fb"), default=0.0)
    p.add_argument("--samples", type=_positive_int("samples"), default=10000,
                   help="Monte Carlo samples per grid point (default 10000)")
    p.add_argument("--seed", type=_seed, default=42, help="random seed (default 42)")
    p.add_argument("--prep-err", type=_nonnegative_float("prep-err"), default=None, metavar="ANGLE",
                   help="preparation wave-plate halfwidth (default 1 degree)")
    p.add_argument("--meas-err", type=_nonnegative_float("meas-err"), default=None, metavar="ANGLE",
                   help="measurement wave-plate halfwidth (default 1 degree)")
    p.add_argument("--filter-err", type=_nonnegative_float("filter-err"), default=0.01,
                   help="relative filter-characterization halfwidth (default 0.01)")
    p.add_argument("--percentiles", type=_percentiles, default=(5.0, 95.0),
                   help="band percentiles as 'lo,hi' (default 5,95)")
    p.add_argument("--dump-samples", default=None, metavar="PATH",
                   help="also write the raw per-sample witness values to PATH")
    p.add_argument("--radians", action="store_true", help="interpret angle flags as radians")
    _add_output_flags(p)

    p = subparsers.add_parser("ingest", help="estimate the witness from coincidence counts")
    p.add_argument("counts", metavar="COUNTS_CSV", help="CSV file of coincidence counts")
    _add_output_flags(p)

    p = subparsers.add_parser("classical-bound", help="exhaustive classical-strategy optimum")
    _add_output_flags(p)

    return parser


def _angle_to_radians(value: float, radians_flag: bool) -> float:
    return value if radians_flag else math.radians(value)


def parse_args(argv) -> CommandPlan:
    """Turn an argument vector into a validated CommandPlan."""
    namespace = build_parser().parse_args(argv)
    params = dict(vars(namespace))
    subcommand = params.pop("subcommand")
    output_format = params.pop("format")
    destination = params.pop("output")

    if subcommand == "witness":
        radians_flag = params.pop("radians")
        theta1 = params.pop("theta1")
        if theta1 is not None:
            theta1 = _angle_to_radians(theta1, radians_flag)
            if not 0.0 <= theta1 <= math.pi / 4.0 + 1e-12:
                raise UsageError(f"theta1 = {theta1!r} rad outside [0, pi/4]")
            params["theta1"] = theta1
            params["gamma"] = theta1_to_gamma(min(theta1, math.pi / 4.0))
    elif subcommand == "montecarlo":
        radians_flag = params.pop("radians")
        one_degree = math.radians(1.0)
        for key in ("prep_err", "meas_err"):
            value = params.pop(key)
            params[key] = one_degree if value is None else _angle_to_radians(value, radians_flag)
    return CommandPlan(
        subcommand=subcommand,
        parameters=params,
        output_format=output_format,
        destination=destination,
    )


def _gamma_grid(params: dict) -> np.ndarray:
    return np.linspace(params["gamma_start"], params["gamma_end"], params["steps"])


def _sweep_rows(records) -> list[list]:
    return [
        [r.gamma, r.f_a, r.f_b, r.witness, r.asp, r.acceptance_min]
        for r in records
    ]


def _run_witness(params: dict) -> Document:
    record = evaluate_point(params["gamma"], params["fa"], params["fb"])
    return Document(
        columns=["gamma", "f_a", "f_b", "W", "P_b", "acceptance_min"],
        rows=_sweep_rows([record]),
        metadata=_metadata("witness", params),
    )


def _run_sweep(params: dict) -> Document:
    records = sweep(_gamma_grid(params), params["fa"], params["fb"])
    failures = [
        {"gamma": r.gamma, "error": r.error} for r in records if r.error is not None
    ]
    extra = {"errors": failures} if failures else {}
    return Document(
        columns=["gamma", "f_a", "f_b", "W", "P_b", "acceptance_min"],
        rows=_sweep_rows(records),
        metadata=_metadata("sweep", params),
        extra=extra,
    )


def _run_critical(params: dict) -> Document:
    gamma_c = critical_gamma(params["fa"], params["fb"], tol=params["tol"])
    record = evaluate_point(gamma_c, params["fa"], params["fb"])
    return Document(
        columns=["f_a", "f_b", "gamma_c", "witness_at_gamma_c"],
        rows=[[params["fa"], params["fb"], gamma_c, record.witness]],
        metadata=_metadata("critical", params),
    )


def _run_montecarlo(params: dict) -> Document:
    em = ErrorModelConfig(
        hwp_prep_halfwidth=params["prep_err"],
        hwp_meas_halfwidth=params["meas_err"],
        filter_rel_halfwidth=params["filter_err"],
        samples=params["samples"],
        seed=params["seed"],
    )
    gammas = _gamma_grid(params)
    result = monte_carlo_band(
        gammas,
        params["fa"],
        params["fb"],
        em,
        percentiles=params["percentiles"],
        return_samples=params["dump_samples"] is not None,
    )
    if params["dump_samples"] is not None:
        records, samples = result
        _write_sample_dump(params["dump_samples"], gammas, samples)
    else:
        records = result
    rows = [
        [r.gamma, r.nominal, r.lo, r.hi, r.minimum, r.maximum, r.discards]
        for r in records
    ]
    return Document(
        columns=["gamma", "nominal", "lo", "hi", "min", "max", "discards"],
        rows=rows,
        metadata=_metadata("montecarlo", params),
    )


def _write_sample_dump(path: str, gammas, samples) -> None:
    lines = ["gamma,sample,witness,ok"]
    for gamma, (w, ok) in zip(gammas, samples):
        for index in range(w.size):
            lines.append(
                f"{_csv_value(float(gamma))},{index},{_csv_value(float(w[index]))},{int(ok[index])}"
            )
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("\n".join(lines) + "\n")


def _run_ingest(params: dict) -> Document:
    records = read_counts_csv(params["counts"])
    result = ingest_counts(records)
    rows = []
    for a0, a1, y in sorted(result.table.e):
        rows.append(
            [
                a0,
                a1,
                y,
                result.table.e[(a0, a1, y)],
                result.table.sigma[(a0, a1, y)],
                result.witness,
                result.witness_sigma,
                result.asp,
                result.asp_sigma,
            ]
        )
    return Document(
        columns=["a0", "a1", "y", "e", "sigma", "witness", "witness_sigma", "asp", "asp_sigma"],
        rows=rows,
        metadata=_metadata("ingest", params),
        extra={
            "witness": result.witness,
            "witness_sigma": result.witness_sigma,
            "asp": result.asp,
            "asp_sigma": result.asp_sigma,
        },
    )


def _run_classical_bound(params: dict) -> Document:
    bound = classical_bruteforce()
    encoding, decoding = bound.maximizers[0]
    return Document(
        columns=["max_witness", "max_asp", "strategies"],
        rows=[[bound.max_witness, bound.max_asp, bound.strategy_count]],
        metadata=_metadata("classical-bound", params),
        extra={
            "max_witness": bound.max_witness,
            "max_asp": bound.max_asp,
            "strategies": bound.strategy_count,
            "example_strategy": {"encoding": list(encoding), "decoding": list(decoding)},
        },
    )


_RUNNERS = {
    "witness": _run_witness,
    "sweep": _run_sweep,
    "critical": _run_critical,
    "montecarlo": _run_montecarlo,
    "ingest": _run_ingest,
    "classical-bound": _run_classical_bound,
}


def _metadata(subcommand: str, params: dict) -> dict:
    parameters = {
        key: value for key, value in sorted(params.items()) if key not in ("dump_samples",)
    }
    if "percentiles" in parameters:
        parameters["percentiles"] = list(parameters["percentiles"])
    return {
        "tool": "qracsim",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": parameters,
    }


def read_counts_csv(path: str) -> list[CoincidenceRecord]:
    """Read coincidence records; header a0,a1,y,cc0,cc1[,labels].

    Malformed content raises UsageError naming the line; missing files
    surface as OSError (exit code 3).
    """
    with open(path, newline="", encoding="utf-8") as handle:
        raw = list(csv.reader(handle))
    rows = [(index + 1, row) for index, row in enumerate(raw) if any(cell.strip() for cell in row)]
    if not rows:
        raise UsageError(f"{path}: empty counts file")
    header_line, header = rows[0]
    header = [cell.strip() for cell in header]
    if header == COUNTS_HEADER:
        labeled = False
    elif header == COUNTS_HEADER_LABELED:
        labeled = True
    else:
        raise UsageError(
            f"{path}:{header_line}: bad header {','.join(header)!r}; expected "
            f"{','.join(COUNTS_HEADER)!r} optionally followed by gamma_label,fa_label,fb_label"
        )
    expected_width = len(COUNTS_HEADER_LABELED) if labeled else len(COUNTS_HEADER)

    records = []
    for line_number, row in rows[1:]:
        cells = [cell.strip() for cell in row]
        if len(cells) != expected_width:
            raise UsageError(
                f"{path}:{line_number}: expected {expected_width} columns, got {len(cells)}"
            )
        try:
            a0, a1, y = (int(cells[i]) for i in range(3))
            cc0, cc1 = int(cells[3]), int(cells[4])
        except ValueError:
            raise UsageError(f"{path}:{line_number}: non-integer count fields") from None
        if any(bit not in (0, 1) for bit in (a0, a1, y)):
            raise UsageError(f"{path}:{line_number}: a0, a1, y must be 0 or 1")
        if cc0 < 0 or cc1 < 0:
            raise UsageError(f"{path}:{line_number}: counts must be nonnegative")
        labels = {}
        if labeled:
            try:
                labels = {
                    "gamma_label": float(cells[5]),
                    "fa_label": float(cells[6]),
                    "fb_label": float(cells[7]),
                }
            except ValueError:
                raise UsageError(f"{path}:{line_number}: non-numeric label fields") from None
        records.append(CoincidenceRecord(a0=a0, a1=a1, y=y, cc0=cc0, cc1=cc1, **labels))
    return records


def _csv_value(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        raise TypeError("boolean cells are not part of any schema")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        text = f"{float(value):.9f}"
        return "0.000000000" if text == "-0.000000000" else text
    return str(value)


def _json_ready(value):
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, (int, np.integer)):
        return int(value)
    return value


def render_csv(document: Document) -> str:
    lines = [",".join(document.columns)]
    for row in document.rows:
        lines.append(",".join(_csv_value(value) for value in row))
    return "\n".join(lines) + "\n"


def render_json(document: Document) -> str:
    payload = {
        "metadata": document.metadata,
        "columns": document.columns,
        "rows": [[_json_ready(value) for value in row] for row in document.rows],
    }
    for key, value in document.extra.items():
        payload[key] = _json_ready(value) if isinstance(value, (int, float)) else value
    return json.dumps(payload, indent=2) + "\n"


def execute(plan: CommandPlan) -> str:
    """Run the planned subcommand and emit its document.

    Returns the rendered text after writing it to the planned destination
    (a file, or standard output).
    """
    document = _RUNNERS[plan.subcommand](plan.parameters)
    text = render_csv(document) if plan.output_format == "csv" else render_json(document)
    if plan.destination is None:
        sys.stdout.write(text)
    else:
        with open(plan.destination, "w", encoding="utf-8") as handle:
            handle.write(text)
    return text


def main(argv=None) -> int:
    """Console entry point implementing the 0/1/2/3 exit-code contract."""
    try:
        plan = parse_args(sys.argv[1:] if argv is None else list(argv))
        execute(plan)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QracError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
