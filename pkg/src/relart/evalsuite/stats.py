"""Trend-line fit and z-score outlier filter shared by all tasks."""

from __future__ import annotations

import numpy as np

__all__ = ["trend_slope", "zscore_filter"]


def _points_xy(series):
    items = getattr(series, "points", series)
    xs, ys = [], []
    for item in items:
        if hasattr(item, "x"):
            xs.append(float(item.x))
            ys.append(float(item.y))
        else:
            xs.append(float(item[0]))
            ys.append(float(item[1]))
    return np.array(xs), np.array(ys), list(items)


def trend_slope(series) -> tuple[float, float]:
    """Ordinary least-squares fit of y on x: (slope, intercept)."""
    xs, ys, _ = _points_xy(series)
    if len(xs) < 2:
        raise ValueError("need at least 2 points for a trend line")
    mx = xs.mean()
    my = ys.mean()
    sxx = float(np.sum((xs - mx) ** 2))
    if sxx == 0.0:
        raise ValueError("x values are all equal; slope undefined")
    slope = float(np.sum((xs - mx) * (ys - my))) / sxx
    return slope, my - slope * mx


def zscore_filter(series, threshold: float = 3.0):
    """Single-pass outlier removal: drop points whose x or y sits more
    than `threshold` population standard deviations from its mean.

    A zero-variance axis never triggers removal; when both axes are
    degenerate the input is returned unchanged. Re-applying the filter can
    remove further points (the statistics are recomputed), so output is a
    subset, not a fixed point.
    """
    xs, ys, items = _points_xy(series)
    if len(items) < 2:
        raise ValueError("need at least 2 points to filter")
    sd_x = float(xs.std())
    sd_y = float(ys.std())
    if sd_x == 0.0 and sd_y == 0.0:
        return series
    mx, my = xs.mean(), ys.mean()
    kept = [
        item
        for item, x, y in zip(items, xs, ys)
        if not (
            (sd_x > 0.0 and abs(x - mx) / sd_x > threshold)
            or (sd_y > 0.0 and abs(y - my) / sd_y > threshold)
        )
    ]
    if hasattr(series, "replace_points"):
        return series.replace_points(kept)
    return type(series)(kept) if isinstance(series, (list, tuple)) else kept
