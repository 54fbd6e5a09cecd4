"""
Serializers for trajectories, clocks, paths, tables and reports.

CSV floats are written with repr() so they round-trip exactly; JSON uses
sorted keys and fixed separators. Nothing time- or host-dependent is ever
written, so identical inputs give identical bytes.
"""
import csv
import io
import json
import logging
import struct
from typing import Any, Dict, Iterable, List, Mapping, Sequence

import numpy as np

from linewalk.clocks import ClockSample
from linewalk.walker import Trajectory

logger = logging.getLogger(__name__)

# u64 record count, then one record per position: f64 time, i32 x1, i32 x2
RECORD_DTYPE = np.dtype([("time", "<f8"), ("x1", "<i4"), ("x2", "<i4")])
HEADER = struct.Struct("<Q")


def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (np.integer,)):
        return str(int(value))
    if value is None:
        return ""
    return str(value)


def _write(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def trajectory_csv(traj: Trajectory) -> str:
    """Rows (time, x1, x2): the start at time 0, then one row per jump."""
    times = np.concatenate(([0.0], traj.jump_times))
    return _write(("time", "x1", "x2"), zip(times, traj.positions[:, 0], traj.positions[:, 1]))


def trajectory_binary(traj: Trajectory) -> bytes:
    times = np.concatenate(([0.0], traj.jump_times))
    records = np.empty(times.shape[0], dtype=RECORD_DTYPE)
    records["time"] = times
    records["x1"] = traj.positions[:, 0]
    records["x2"] = traj.positions[:, 1]
    return HEADER.pack(records.shape[0]) + records.tobytes()


def read_trajectory_binary(blob: bytes, horizon: float = float("nan"), kind: str = "VSRW") -> Trajectory:
    (count,) = HEADER.unpack_from(blob, 0)
    records = np.frombuffer(blob, dtype=RECORD_DTYPE, count=count, offset=HEADER.size)
    positions = np.stack((records["x1"], records["x2"]), axis=1).astype(np.int64)
    jump_times = records["time"][1:].astype(np.float64)
    if np.isnan(horizon):
        horizon = float(records["time"][-1])
    return Trajectory(jump_times, positions, horizon, False, kind)


def clock_csv(clock: ClockSample) -> str:
    """Rows (time, value) at every knot and at the horizon."""
    times = np.concatenate((clock.knot_times, [clock.horizon]))
    values = np.concatenate((clock.values, [clock.final_value]))
    return _write(("time", "value"), zip(times, values))


def path_csv(t_grid: Sequence[float], **columns: Sequence[float]) -> str:
    """Rows (t, column...) for a sampled path or a limit pair."""
    names = list(columns)
    return _write(["t"] + names, zip(t_grid, *(columns[n] for n in names)))


def rows_csv(rows: List[Mapping[str, Any]]) -> str:
    """A list of flat dicts as CSV; the column order follows the first row."""
    if not rows:
        return ""
    header = list(rows[0])
    return _write(header, ([row.get(k) for k in header] for row in rows))


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, tuple):
        return list(value)
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def report_json(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, separators=(",", ": "),
                      default=_json_default, allow_nan=True) + "\n"
