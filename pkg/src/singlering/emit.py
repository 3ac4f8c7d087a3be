"""CSV / JSON / SVG writers.  Output is a pure function of the inputs."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .domains import DomainGrid, Theta
from .errors import ValidationError
from .outliers import OutlierReport
from .subordination import SubordinationSolution

__all__ = ["emit_outputs", "eigs_csv", "grid_csv", "subord_csv", "to_json", "figure_svg"]

_FILL = {Theta.OUT: "#d6e6f5", Theta.IN: "#fbdcc0", Theta.NEITHER: "#ffffff"}


def _num(x: float) -> str:
    return repr(float(x))


def _csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def eigs_csv(eigs: Sequence[complex]) -> str:
    return _csv(("re", "im"), ((float(z.real), float(z.imag)) for z in np.asarray(eigs, dtype=complex)))


def grid_csv(grid: DomainGrid) -> str:
    return _csv(("x", "y", "class"), ((x, y, c.value) for x, y, c in grid.rows()))


def subord_csv(solutions: Sequence[SubordinationSolution]) -> str:
    header = ("x", "y", "re_omega1", "im_omega1", "re_omega2", "im_omega2", "re_G", "im_G", "residual")
    rows = (
        (s.z.real, s.z.imag, s.omega1.real, s.omega1.imag, s.omega2.real, s.omega2.imag, s.g_value.real, s.g_value.imag, s.residual)
        for s in solutions
    )
    return _csv(header, rows)


def to_json(obj) -> str:
    if hasattr(obj, "to_dict"):
        obj = obj.to_dict()
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def figure_svg(
    grid: DomainGrid | None,
    eigs: Sequence[complex] = (),
    spikes: Sequence[complex] = (),
    bbox: Sequence[float] | None = None,
    width: int = 640,
) -> str:
    """Scatter of eigenvalues (dots) and spikes (crosses) over the domain classes."""
    if bbox is None:
        if grid is None:
            raise ValidationError("bbox required without a grid")
        bbox = grid.bbox
    xmin, xmax, ymin, ymax = (float(v) for v in bbox)
    pad = 40
    scale = (width - 2 * pad) / (xmax - xmin)
    height = int(round((ymax - ymin) * scale)) + 2 * pad

    def px(x):
        return pad + (x - xmin) * scale

    def py(y):
        return height - pad - (y - ymin) * scale

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="#ffffff"/>',
    ]
    if grid is not None:
        xs, ys = grid.xs, grid.ys
        dx = (xs[1] - xs[0]) if xs.size > 1 else 1.0
        dy = (ys[1] - ys[0]) if ys.size > 1 else 1.0
        for iy, y in enumerate(ys):
            ix = 0
            while ix < xs.size:
                cls = grid.label(iy, ix)
                end = ix
                while end + 1 < xs.size and grid.label(iy, end + 1) is cls:
                    end += 1
                if cls is not Theta.NEITHER:
                    x0, x1 = px(xs[ix] - dx / 2), px(xs[end] + dx / 2)
                    y0, y1 = py(y + dy / 2), py(y - dy / 2)
                    out.append(
                        f'<rect x="{x0:.2f}" y="{y0:.2f}" width="{x1 - x0:.2f}" height="{y1 - y0:.2f}" fill="{_FILL[cls]}"/>'
                    )
                ix = end + 1
    out.append(f'<rect x="{pad}" y="{pad}" width="{width - 2 * pad}" height="{height - 2 * pad}" fill="none" stroke="#000000"/>')
    if xmin < 0 < xmax:
        out.append(f'<line x1="{px(0):.2f}" y1="{pad}" x2="{px(0):.2f}" y2="{height - pad}" stroke="#999999" stroke-width="0.5"/>')
    if ymin < 0 < ymax:
        out.append(f'<line x1="{pad}" y1="{py(0):.2f}" x2="{width - pad}" y2="{py(0):.2f}" stroke="#999999" stroke-width="0.5"/>')
    for x, label_x in ((xmin, pad), (xmax, width - pad)):
        out.append(f'<text x="{label_x}" y="{height - pad + 16}" font-size="11" text-anchor="middle">{x:g}</text>')
    for y in (ymin, ymax):
        out.append(f'<text x="{pad - 6}" y="{py(y) + 4:.2f}" font-size="11" text-anchor="end">{y:g}</text>')
    for z in np.asarray(eigs, dtype=complex):
        if xmin <= z.real <= xmax and ymin <= z.imag <= ymax:
            out.append(f'<circle cx="{px(z.real):.2f}" cy="{py(z.imag):.2f}" r="1.3" fill="#1f3b73"/>')
    for z in spikes:
        cx, cy = px(z.real), py(z.imag)
        out.append(
            f'<path d="M{cx - 5:.2f},{cy - 5:.2f}L{cx + 5:.2f},{cy + 5:.2f}M{cx - 5:.2f},{cy + 5:.2f}L{cx + 5:.2f},{cy - 5:.2f}" '
            'stroke="#c0392b" stroke-width="1.6"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_outputs(obj, fmt: str, path: str | Path, **svg_kwargs) -> None:
    """Write ``obj`` to ``path`` as ``csv``, ``json`` or ``svg``.

    ``obj`` may be an eigenvalue array, a :class:`DomainGrid`, an
    :class:`OutlierReport`, a list of subordination solutions, or any
    JSON-serializable mapping.
    """
    if fmt == "json":
        text = to_json(obj)
    elif fmt == "csv":
        if isinstance(obj, DomainGrid):
            text = grid_csv(obj)
        elif isinstance(obj, (list, tuple)) and obj and isinstance(obj[0], SubordinationSolution):
            text = subord_csv(obj)
        elif isinstance(obj, OutlierReport) or isinstance(obj, dict):
            raise ValidationError("reports are emitted as json")
        else:
            text = eigs_csv(obj)
    elif fmt == "svg":
        if isinstance(obj, DomainGrid):
            text = figure_svg(obj, **svg_kwargs)
        else:
            text = figure_svg(None, eigs=obj, **svg_kwargs)
    else:
        raise ValidationError(f"unknown format {fmt!r}")
    Path(path).write_text(text)
