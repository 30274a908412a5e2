"""
Peak Finder Module
Local extrema of a sweep column with parabolic refinement.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .runner import SweepResult


@dataclass(frozen=True)
class Peak:
    """A refined local extremum."""
    axis_value: float
    height: float
    index: int


def _vertex(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Vertex of the parabola through three points (falls back to the middle point)."""
    if len(np.unique(x)) < 3:
        return float(x[1]), float(y[1])
    a, b, c = np.polyfit(x, y, 2)
    if a == 0:
        return float(x[1]), float(y[1])
    vertex = -b / (2 * a)
    if not x.min() <= vertex <= x.max():
        return float(x[1]), float(y[1])
    return float(vertex), float(np.polyval((a, b, c), vertex))


def find_peaks(
    result: SweepResult,
    observable: str,
    min_height: Optional[float] = None,
    minima: bool = False,
) -> list[Peak]:
    """
    Local maxima (or minima) by three-point comparison.

    A point is a peak when it is strictly above its left neighbour and not
    below its right one, so flat tops resolve to their first sample. Rows
    holding NaN (failed points) never form peaks.

    Args:
        result: Sweep result holding the column
        observable: Column name
        min_height: Drop peaks lower than this (higher, for minima)
        minima: Search for local minima instead

    Returns:
        Peaks in axis order
    """
    xs = np.asarray(result.column(result.axis), dtype=float)
    ys = np.asarray(result.column(observable), dtype=float)
    if ys.size < 3:
        raise ValueError(f"Peak finding needs at least 3 rows, got {ys.size}")
    sign = -1.0 if minima else 1.0
    signed = sign * ys

    left, mid, right = signed[:-2], signed[1:-1], signed[2:]
    finite = ~(np.isnan(left) | np.isnan(mid) | np.isnan(right))
    candidates = np.flatnonzero(finite & (mid > left) & (mid >= right)) + 1

    peaks = []
    for i in candidates:
        x, y = _vertex(xs[i - 1:i + 2], signed[i - 1:i + 2])
        height = sign * y
        if min_height is not None and (height < min_height if not minima else height > min_height):
            continue
        peaks.append(Peak(axis_value=x, height=height, index=int(i)))
    return peaks
