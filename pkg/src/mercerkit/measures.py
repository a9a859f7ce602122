"""Finite Borel measures discretized as weighted point sets.

A DiscreteMeasure is a list of pairwise distinct points with strictly
positive weights.  Positivity is enforced at construction so the support
of the measure is always the whole point set; every spectral statement
downstream relies on that.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import csvio
from .errors import DimensionMismatchError, DuplicatePointError, MeasureError
from .kernels import as_point, as_points


@dataclass(frozen=True)
class DiscreteMeasure:
    """Quadrature points x_i with weights w_i > 0."""

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = as_points(self.points).copy()
        w = np.array(self.weights, dtype=float).reshape(-1)
        if w.size != pts.shape[0]:
            raise DimensionMismatchError(
                f"{pts.shape[0]} points but {w.size} weights"
            )
        if not np.all(np.isfinite(w)):
            raise MeasureError("weights must be finite")
        if np.any(w <= 0.0):
            raise MeasureError("weights must be strictly positive")
        seen = set()
        for row in pts:
            key = row.tobytes()
            if key in seen:
                raise DuplicatePointError(f"duplicate point {row.tolist()} in measure")
            seen.add(key)
        pts.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def m(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.weights))


def uniform_grid(box_low, box_high, steps, total_mass: float = 1.0) -> DiscreteMeasure:
    """Tensor grid of cell midpoints with equal weights total_mass / m.

    `steps` is the cell count per axis (a single integer applies to every
    axis).  Midpoint placement makes the grid a second-order quadrature
    rule for the uniform measure on the box, which is what the empirical
    refinement checks assume.
    """
    low = as_point(box_low)
    high = as_point(box_high)
    if low.size != high.size:
        raise DimensionMismatchError("box corners have different dimensions")
    if not np.all(high > low):
        raise MeasureError("box must satisfy low < high on every axis")
    if not total_mass > 0:
        raise MeasureError("total mass must be positive")
    n = low.size
    steps_arr = np.broadcast_to(np.asarray(steps, dtype=int), (n,))
    if np.any(steps_arr < 1):
        raise MeasureError("need at least one step per axis")
    axes = []
    for lo, hi, s in zip(low, high, steps_arr):
        h = (hi - lo) / s
        axes.append(lo + h * (np.arange(s) + 0.5))
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([g.reshape(-1) for g in mesh], axis=1)
    m = pts.shape[0]
    return DiscreteMeasure(pts, np.full(m, total_mass / m))


def monte_carlo_box(box_low, box_high, count: int, total_mass: float = 1.0,
                    seed: int = 0) -> DiscreteMeasure:
    """Uniform random points in a box with equal weights; seeded, reproducible."""
    low = as_point(box_low)
    high = as_point(box_high)
    if low.size != high.size:
        raise DimensionMismatchError("box corners have different dimensions")
    if not np.all(high > low):
        raise MeasureError("box must satisfy low < high on every axis")
    if count < 1:
        raise MeasureError("need at least one sample point")
    rng = np.random.default_rng(seed)
    pts = low + (high - low) * rng.random((count, low.size))
    return DiscreteMeasure(pts, np.full(count, total_mass / count))


def _aligned(mu: DiscreteMeasure, values, name: str) -> np.ndarray:
    arr = np.asarray(values).reshape(-1)
    if arr.size != mu.m:
        raise DimensionMismatchError(
            f"{name} has {arr.size} values for {mu.m} points"
        )
    return arr


def integrate(mu: DiscreteMeasure, values):
    """Quadrature sum sum_i w_i f(x_i)."""
    f = _aligned(mu, values, "integrand")
    out = np.dot(mu.weights, f)
    return complex(out) if np.iscomplexobj(f) else float(out)


def l2_inner(mu: DiscreteMeasure, f_values, g_values):
    """Weighted inner product sum_i w_i f(x_i) conj(g(x_i))."""
    f = _aligned(mu, f_values, "f")
    g = _aligned(mu, g_values, "g")
    out = np.dot(mu.weights * f, np.conj(g))
    if np.iscomplexobj(f) or np.iscomplexobj(g):
        return complex(out)
    return float(out)


def l2_norm(mu: DiscreteMeasure, f_values) -> float:
    """Norm induced by l2_inner; always real and nonnegative."""
    f = _aligned(mu, f_values, "f")
    return float(np.linalg.norm(np.sqrt(mu.weights) * np.abs(f)))


def save_measure(path: str, mu: DiscreteMeasure) -> None:
    """CSV rows: coordinates, then a final weight column (17 digits, exact)."""
    table = np.column_stack([mu.points, mu.weights])
    csvio.save_matrix(path, table)


def load_measure(path: str) -> DiscreteMeasure:
    """Inverse of save_measure; round-trips bit-identically."""
    table = csvio.load_matrix(path)
    if table.shape[1] < 2:
        raise DimensionMismatchError(
            "measure file needs coordinate columns and a final weight column"
        )
    return DiscreteMeasure(table[:, :-1], table[:, -1])
