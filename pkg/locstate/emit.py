"""
Writers for densities, comparison reports and trajectory fans.

Every writer produces the same bytes for the same input: floats are
written with 17 significant digits, lines end in LF and JSON keys keep
the order of the model fields.
"""

import json
import xml.etree.ElementTree as ET
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel

from locstate.exceptions import OutputError
from locstate.log import LOGGER
from locstate.shared_types import SampledDensity

SVG_WIDTH = 800
SVG_HEIGHT = 500
SVG_MARGIN = 0.05
OBSERVED_COLOUR = "#1f4fd1"
REFERENCE_COLOUR = "#d62728"


def format_float(value: float) -> str:
    """Round-trip decimal representation with 17 significant digits.

    >>> format_float(0.1)
    '0.10000000000000001'
    """
    return format(float(value), ".17g")


def _write_text(path, text: str) -> Path:
    path = Path(path)
    try:
        with open(path, "w", encoding="utf8", newline="\n") as f:
            f.write(text)
    except OSError as e:
        raise OutputError(str(path), e.strerror or str(e))
    LOGGER.info(f"Wrote {path}")
    return path


def csv_text(header: Sequence[str], rows: Iterable[Sequence[float]]) -> str:
    lines = [",".join(header)]
    lines.extend(",".join(format_float(value) for value in row) for row in rows)
    return "\n".join(lines) + "\n"


def emit_csv(density: SampledDensity, path, x_label: str = "y") -> Path:
    """Write the columns x_label,density with a header row."""
    rows = zip(density.grid_y.tolist(), density.density.tolist())
    return _write_text(path, csv_text((x_label, "density"), rows))


def emit_rows_csv(header: Sequence[str], rows: Iterable[Sequence[float]], path) -> Path:
    return _write_text(path, csv_text(header, rows))


def json_text(data) -> str:
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"


def emit_json(report, path, x_label: str = "y") -> Path:
    """Write a pydantic model (in field order), a density, or plain data as JSON."""
    if isinstance(report, BaseModel):
        data = report.model_dump(mode="json")
    elif isinstance(report, SampledDensity):
        data = density_record(report, x_label)
    else:
        data = report
    return _write_text(path, json_text(data))


def density_record(density: SampledDensity, x_label: str = "y") -> dict:
    return {
        "time": density.time_t,
        "normalized": density.normalized,
        x_label: density.grid_y.tolist(),
        "density": density.density.tolist(),
    }


class _Frame:
    """Maps data coordinates into the SVG canvas with 5% margins."""

    def __init__(self, xs: np.ndarray, ys: np.ndarray):
        self.x_lo, self.x_hi = float(np.min(xs)), float(np.max(xs))
        self.y_lo, self.y_hi = float(np.min(ys)), float(np.max(ys))
        if self.x_hi == self.x_lo:
            self.x_hi = self.x_lo + 1.0
        if self.y_hi == self.y_lo:
            self.y_hi = self.y_lo + 1.0
        self.left = SVG_MARGIN * SVG_WIDTH
        self.right = (1 - SVG_MARGIN) * SVG_WIDTH
        self.top = SVG_MARGIN * SVG_HEIGHT
        self.bottom = (1 - SVG_MARGIN) * SVG_HEIGHT

    def x(self, value):
        return self.left + (value - self.x_lo) / (self.x_hi - self.x_lo) * (self.right - self.left)

    def y(self, value):
        return self.bottom - (value - self.y_lo) / (self.y_hi - self.y_lo) * (self.bottom - self.top)

    def points(self, xs: np.ndarray, ys: np.ndarray) -> str:
        return " ".join(f"{px:.3f},{py:.3f}" for px, py in zip(self.x(xs), self.y(ys)))


def _svg_root() -> ET.Element:
    return ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        version="1.1",
        width=f"{SVG_WIDTH}px",
        height=f"{SVG_HEIGHT}px",
        viewBox=f"0 0 {SVG_WIDTH} {SVG_HEIGHT}",
    )


def _axes(root: ET.Element, frame: _Frame, x_label: str, y_label: str):
    axes = ET.SubElement(root, "g", stroke="black", fill="none")
    ET.SubElement(
        axes, "line", x1=f"{frame.left:.3f}", y1=f"{frame.bottom:.3f}",
        x2=f"{frame.right:.3f}", y2=f"{frame.bottom:.3f}",
    )
    ET.SubElement(
        axes, "line", x1=f"{frame.left:.3f}", y1=f"{frame.top:.3f}",
        x2=f"{frame.left:.3f}", y2=f"{frame.bottom:.3f}",
    )
    labels = ET.SubElement(root, "g", fill="black", **{"font-family": "sans-serif", "font-size": "14"})
    x_text = ET.SubElement(
        labels, "text", x=f"{frame.right:.3f}", y=f"{SVG_HEIGHT - 4:.3f}", **{"text-anchor": "end"}
    )
    x_text.text = x_label
    y_text = ET.SubElement(labels, "text", x="4.000", y=f"{frame.top:.3f}")
    y_text.text = y_label
    for value, anchor_x, anchor_y, text_anchor in (
        (frame.x_lo, frame.left, SVG_HEIGHT - 4, "start"),
        (frame.x_hi, frame.right - 20, SVG_HEIGHT - 4, "end"),
    ):
        tick = ET.SubElement(
            labels, "text", x=f"{anchor_x:.3f}", y=f"{anchor_y:.3f}", **{"text-anchor": text_anchor}
        )
        tick.text = f"{value:.4g}"


def svg_text(
    series: List[Tuple[np.ndarray, np.ndarray, dict]],
    x_label: str = "y",
    y_label: str = "|Ψ|²",
    title: Optional[str] = None,
) -> str:
    """A self-contained SVG line chart of one or more (xs, ys, style) series."""
    xs = np.concatenate([s[0] for s in series])
    ys = np.concatenate([s[1] for s in series] + [np.zeros(1)])
    frame = _Frame(xs, ys)
    root = _svg_root()
    if title:
        ET.SubElement(root, "title").text = title
    _axes(root, frame, x_label, y_label)
    for x_values, y_values, style in series:
        attributes = {"fill": "none", "stroke-width": "1.5"}
        attributes.update(style)
        ET.SubElement(root, "polyline", points=frame.points(x_values, y_values), **attributes)
    return ET.tostring(root, encoding="unicode") + "\n"


def emit_svg(
    density: SampledDensity,
    path,
    reference: Optional[SampledDensity] = None,
    title: Optional[str] = None,
    x_label: str = "y",
    y_label: str = "|Ψ|²",
) -> Path:
    """Plot the density as a solid blue line, with the reference dashed in red."""
    series = [(density.grid_y, density.density, {"stroke": OBSERVED_COLOUR})]
    if reference is not None:
        series.append(
            (
                reference.grid_y,
                reference.density,
                {"stroke": REFERENCE_COLOUR, "stroke-dasharray": "4 3"},
            )
        )
    return _write_text(path, svg_text(series, x_label=x_label, y_label=y_label, title=title))


def emit_fan_svg(times: np.ndarray, paths: np.ndarray, path, title: Optional[str] = None) -> Path:
    """Plot trajectories as y against t."""
    series = [(times, row, {"stroke": OBSERVED_COLOUR, "stroke-width": "0.8"}) for row in paths]
    return _write_text(path, svg_text(series, x_label="t", y_label="y", title=title))
