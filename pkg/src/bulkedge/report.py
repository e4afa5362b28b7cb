"""Machine-readable run reports: canonical JSON, CSV tables, plain text.

JSON output uses a fixed key order and prints floats with 17 significant
digits so that reports are bit-stable across runs at a fixed seed and
round-trip through a parser without loss.  Integer invariants are emitted
as JSON integers, never as floats.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .fermi import FermiPoint

SCHEMA_VERSION = 1


@dataclass
class InvariantReport:
    """Complete outcome of one CLI run."""

    family: str
    command: str
    bulk_c2: int | None = None
    bulk_c2_raw: float | None = None
    edge_index: int | None = None
    spectral_flow: int | None = None
    evenness_ok: bool | None = None
    bulk_edge_ok: bool | None = None
    fermi_points: list[dict] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def consistent(self) -> bool:
        if self.bulk_c2 is not None and self.edge_index is not None and self.bulk_edge_ok is not None:
            return self.bulk_edge_ok == (self.bulk_c2 == -self.edge_index)
        return True

    def as_ordered_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "family": self.family,
            "command": self.command,
            "bulk_c2": self.bulk_c2,
            "bulk_c2_raw": self.bulk_c2_raw,
            "edge_index": self.edge_index,
            "spectral_flow": self.spectral_flow,
            "evenness_ok": self.evenness_ok,
            "bulk_edge_ok": self.bulk_edge_ok,
            "fermi_points": self.fermi_points,
            "diagnostics": {k: self.diagnostics[k] for k in sorted(self.diagnostics)},
        }


def fermi_point_row(fp: FermiPoint) -> dict:
    return {
        "chart": fp.chart_key,
        "coords": [float(x) for x in np.asarray(fp.location).reshape(-1)],
        "sign": int(fp.sign),
        "det_jacobian": None if fp.det_jacobian is None else float(fp.det_jacobian),
        "c_abs": float(abs(fp.c_value)),
        "residual": float(fp.residual_norm),
    }


def _json_value(value) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if not np.isfinite(value):
            raise ValueError(f"non-finite float in report: {value}")
        return format(float(value), ".17g")
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_json_value(v) for v in value) + "]"
    if isinstance(value, dict):
        parts = [f"{json.dumps(str(k))}: {_json_value(v)}" for k, v in value.items()]
        return "{" + ", ".join(parts) + "}"
    if isinstance(value, np.ndarray):
        return _json_value(value.tolist())
    raise TypeError(f"cannot serialize {type(value)!r} into a report")


def to_json(report: InvariantReport) -> str:
    return _json_value(report.as_ordered_dict()) + "\n"


def to_csv(report: InvariantReport) -> str:
    """Fermi-point table: chart, coordinates, sign, Jacobian, |c|, residual."""
    ncoords = max((len(r["coords"]) for r in report.fermi_points), default=0)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = ["chart"] + [f"coord{i + 1}" for i in range(ncoords)] + [
        "sign", "det_jacobian", "c_abs", "residual",
    ]
    writer.writerow(header)
    for row in report.fermi_points:
        coords = [format(c, ".17g") for c in row["coords"]]
        coords += [""] * (ncoords - len(coords))
        det = "" if row["det_jacobian"] is None else format(row["det_jacobian"], ".17g")
        writer.writerow(
            [row["chart"]] + coords + [row["sign"], det,
                                       format(row["c_abs"], ".17g"),
                                       format(row["residual"], ".17g")]
        )
    return buf.getvalue()


def to_text(report: InvariantReport) -> str:
    lines = [f"family:   {report.family}", f"command:  {report.command}"]
    if report.bulk_c2 is not None:
        lines.append(f"bulk c2:  {report.bulk_c2} (raw {report.bulk_c2_raw:+.6f})")
    if report.edge_index is not None:
        lines.append(f"edge index: {report.edge_index}")
    if report.spectral_flow is not None:
        lines.append(f"spectral flow: {report.spectral_flow}")
    if report.evenness_ok is not None:
        lines.append(f"evenness check: {'pass' if report.evenness_ok else 'FAIL'}")
    if report.bulk_edge_ok is not None:
        lines.append(f"bulk-edge identity: {'pass' if report.bulk_edge_ok else 'FAIL'}")
    if report.fermi_points:
        lines.append(f"fermi points ({len(report.fermi_points)}):")
        for row in report.fermi_points:
            coords = ", ".join(f"{c:+.8f}" for c in row["coords"])
            det = "" if row["det_jacobian"] is None else f"  detJ={row['det_jacobian']:+.8f}"
            lines.append(f"  [{row['chart']}] ({coords})  sign={row['sign']:+d}{det}  |c|={row['c_abs']:.6f}")
    if report.diagnostics:
        lines.append("diagnostics:")
        for key in sorted(report.diagnostics):
            lines.append(f"  {key}: {report.diagnostics[key]}")
    return "\n".join(lines) + "\n"


def render(report: InvariantReport, fmt: str) -> str:
    if fmt == "json":
        return to_json(report)
    if fmt == "csv":
        return to_csv(report)
    if fmt == "text":
        return to_text(report)
    raise ValueError(f"unknown report format '{fmt}'")
