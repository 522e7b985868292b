"""Trace persistence.

The CSV column contract is stable: every column name carries its unit, one
row per accepted step, numbers with 9 significant digits, byte-deterministic
output for a given trace.
"""

from __future__ import annotations

import math
from pathlib import Path

from .engine import SimTrace

_FIXED_SPRINGS = 6
_FIXED_UNITS = 3

HEADER = (
    ["t_s", "kappa_per_m", "phi_rad", "theta_deg"]
    + [f"T{i}_K" for i in range(1, _FIXED_SPRINGS + 1)]
    + [f"xi{i}" for i in range(1, _FIXED_SPRINGS + 1)]
    + [f"Fk{i}_N" for i in range(1, _FIXED_UNITS + 1)]
    + ["residual_Nm"]
)


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def write_trace(trace: SimTrace, destination) -> Path:
    """Write the trace as CSV to ``destination`` (path-like); returns the path."""
    if len(trace) == 0:
        raise ValueError("refusing to write an empty trace")
    if trace.n_springs != _FIXED_SPRINGS:
        raise ValueError(
            f"trace carries {trace.n_springs} springs; the CSV contract fixes "
            f"{_FIXED_SPRINGS}"
        )
    path = Path(destination)
    lines = [",".join(HEADER)]
    for i in range(len(trace)):
        row = [
            _fmt(trace.t[i]),
            _fmt(trace.kappa[i]),
            _fmt(trace.phi[i]),
            _fmt(math.degrees(trace.theta[i])),
        ]
        row.extend(_fmt(v) for v in trace.spring_temperatures[i])
        row.extend(_fmt(v) for v in trace.spring_fractions[i])
        row.extend(_fmt(v) for v in trace.unit_forces[i])
        row.append(_fmt(trace.residual_norm[i]))
        lines.append(",".join(row))
    try:
        path.write_text("\n".join(lines) + "\n", newline="\n")
    except OSError as exc:
        raise OSError(f"writing trace to {path}: {exc}") from exc
    return path


def read_trace(source) -> dict[str, list[float]]:
    """Parse a trace CSV back into a column -> values mapping."""
    path = Path(source)
    try:
        text = path.read_text()
    except OSError as exc:
        raise OSError(f"reading trace from {path}: {exc}") from exc
    lines = [line for line in text.splitlines() if line]
    if not lines:
        raise ValueError(f"{path}: empty trace file")
    names = lines[0].split(",")
    columns: dict[str, list[float]] = {name: [] for name in names}
    for line in lines[1:]:
        parts = line.split(",")
        if len(parts) != len(names):
            raise ValueError(f"{path}: ragged row: {line!r}")
        for name, part in zip(names, parts):
            columns[name].append(float(part))
    return columns
