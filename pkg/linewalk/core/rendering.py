"""Static SVG plots rendered from Jinja2 templates."""
import logging
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np
from jinja2 import Environment, FileSystemLoader, select_autoescape

from linewalk.walker import Trajectory

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"
WIDTH = 480
HEIGHT = 480
MARGIN = 24
PALETTE = ("#1f4e9c", "#c0392b", "#2e8b57", "#8e44ad", "#d35400")

_templates = Environment(
    loader=FileSystemLoader(str(TEMPLATE_DIR)),
    autoescape=select_autoescape(enabled_extensions=("j2",), default=True),
    keep_trailing_newline=True,
)


def _fmt(value: float) -> str:
    return "%.3f" % value


def _points(xs: Sequence[float], ys: Sequence[float]) -> str:
    return " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in zip(xs, ys))


def render_trajectory_svg(traj: Trajectory, title: str = "") -> str:
    """The lattice path of a trajectory, one unit cell per lattice step."""
    x1 = traj.positions[:, 0].astype(np.float64)
    x2 = traj.positions[:, 1].astype(np.float64)
    lo1, hi1 = x1.min() - 1, x1.max() + 1
    lo2, hi2 = x2.min() - 1, x2.max() + 1
    span = max(hi1 - lo1, hi2 - lo2)
    cell = (WIDTH - 2 * MARGIN) / span

    px = MARGIN + (x1 - lo1) * cell
    py = HEIGHT - MARGIN - (x2 - lo2) * cell
    grid_x = [_fmt(MARGIN + k * cell) for k in range(int(span) + 1)]
    grid_y = [_fmt(HEIGHT - MARGIN - k * cell) for k in range(int(span) + 1)]
    template = _templates.get_template("trajectory.svg.j2")
    return template.render(
        width=WIDTH, height=HEIGHT, margin=MARGIN, bottom=HEIGHT - MARGIN, right=WIDTH - MARGIN,
        grid_x=grid_x, grid_y=grid_y, points=_points(px, py),
        start=(_fmt(px[0]), _fmt(py[0])), end=(_fmt(px[-1]), _fmt(py[-1])), title=title,
    )


def render_paths_svg(t_grid: Sequence[float], series: Mapping[str, Sequence[float]], title: str = "") -> str:
    """Several real-valued paths against a shared time grid."""
    t = np.asarray(t_grid, dtype=np.float64)
    values = {name: np.asarray(v, dtype=np.float64) for name, v in series.items()}
    lo = min(0.0, min(float(v.min()) for v in values.values()))
    hi = max(0.0, max(float(v.max()) for v in values.values()))
    if hi == lo:
        hi = lo + 1.0
    t_span = float(t[-1] - t[0]) or 1.0

    def to_px(tv, yv):
        return (MARGIN + (tv - t[0]) / t_span * (WIDTH - 2 * MARGIN),
                HEIGHT - MARGIN - (yv - lo) / (hi - lo) * (HEIGHT - 2 * MARGIN))

    lines = []
    for i, (name, v) in enumerate(values.items()):
        px, py = to_px(t, v)
        lines.append({"name": name, "color": PALETTE[i % len(PALETTE)], "points": _points(px, py)})
    _, zero_y = to_px(t[0], 0.0)
    template = _templates.get_template("paths.svg.j2")
    return template.render(
        width=WIDTH, height=HEIGHT, margin=MARGIN, bottom=HEIGHT - MARGIN, right=WIDTH - MARGIN,
        zero_y=_fmt(zero_y), lines=lines, title=title,
    )
