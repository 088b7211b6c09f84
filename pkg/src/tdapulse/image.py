"""Cluster counting on 2-D piecewise-constant images.

The super-level set of the image is treated as a planar point cloud, and its
MST diagram is split at the widest jump just like the 1-D gap diagram.  There
is no analogue of trimming partial pulses at the window ends, so the result
is the number of components, ``#{d > mu} + 1``.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import EmptySupportError, InsufficientStructureError, InvalidParameterError, ParseError
from .persistence import PersistenceDiagram, diagram_point_cloud
from .step_detect import DEFAULT_RHO_MIN, split_threshold


@dataclass(frozen=True, eq=False)
class ImageGrid:
    values: np.ndarray
    rows: np.ndarray  # coordinate of each row
    cols: np.ndarray  # coordinate of each column

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        r = np.asarray(self.rows, dtype=float)
        c = np.asarray(self.cols, dtype=float)
        if v.ndim != 2 or v.shape != (r.size, c.size):
            raise InvalidParameterError(
                f"values shape {v.shape} does not match axes ({r.size}, {c.size})")
        for axis in (r, c):
            if axis.size > 1 and not np.all(np.diff(axis) > 0):
                raise InvalidParameterError("axis coordinates must be strictly increasing")
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)


@dataclass(frozen=True)
class ImageCount:
    clusters: int
    mu: float
    split_ratio: float
    n_points: int
    diagram: PersistenceDiagram

    def to_record(self):
        ratio = self.split_ratio if np.isfinite(self.split_ratio) else None
        return {"clusters": self.clusters, "mu": self.mu, "split_ratio": ratio,
                "n_points": self.n_points}


def product_image(ts_rows, ts_cols):
    """The image ``Y(s, t) = X1(s) * X2(t)`` of two sampled signals."""
    return ImageGrid(np.outer(ts_rows.values, ts_cols.values), ts_rows.times, ts_cols.times)


def image_points(img, level=0.5):
    i, j = np.nonzero(img.values > level)
    return np.column_stack((img.rows[i], img.cols[j]))


def image_pulse_count(img, level=0.5, rho_min=DEFAULT_RHO_MIN):
    """Number of clusters in the super-level set ``{Y > level}``.

    A single point (empty diagram) is one cluster.  When the widest jump of
    the diagram is weak (ratio below ``rho_min``) every death is treated as
    within-cluster noise and the image holds one cluster; a uniform block
    otherwise would be split on rounding differences between equal spacings.
    """
    pts = image_points(img, level)
    if pts.shape[0] == 0:
        raise EmptySupportError(f"no pixel exceeds level {level}")
    dgm = diagram_point_cloud(pts)
    if len(dgm) == 0:
        return ImageCount(1, float("nan"), float("nan"), 1, dgm)
    if len(dgm) == 1:
        raise InsufficientStructureError("two points cannot be split into clusters")
    split = split_threshold(dgm)
    if split.ratio < rho_min:
        clusters = 1
    else:
        clusters = dgm.count_above(split.mu) + 1
    return ImageCount(clusters, split.mu, split.ratio, pts.shape[0], dgm)


def read_image(path):
    """Grid CSV: first row is ``<label>, col coords...``; other rows ``row coord, values...``."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    if len(rows) < 2:
        raise ParseError("image file needs a header row and at least one data row", 1)
    try:
        cols = [float(c) for c in rows[0][1:]]
        data = [[float(c) for c in r] for r in rows[1:]]
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if any(len(r) != len(cols) + 1 for r in data):
        raise ParseError("ragged image rows")
    arr = np.asarray(data)
    return ImageGrid(arr[:, 1:], arr[:, 0], np.asarray(cols))
