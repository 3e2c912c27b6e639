"""Quantitative comparison of eigenspaces against sample data.

The single figure of merit throughout is the cumulative explained-variance
curve: the fraction of total sample variance captured by the first k
components, as a function of k. Curves are computed by projecting samples,
never by forming a d x d matrix, so bases with and without eigenvalues are
measured by the same code path.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .batch import EigenSpace, sym_eig
from .core import DegenerateDataError, DimensionMismatchError, SampleStore


@dataclass
class CurveSeries:
    """Cumulative explained-variance fractions, one entry per component."""

    values: np.ndarray
    label: str = ""
    centered: bool = False

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.ndim != 1 or self.values.size == 0:
            raise ValueError("a curve needs a 1-D, non-empty value list")
        if np.min(self.values) < -1e-12 or np.max(self.values) > 1.0 + 1e-9:
            raise ValueError("curve values must lie in [0, 1]")
        if self.values.size > 1 and np.min(np.diff(self.values)) < -1e-12:
            raise ValueError("curve values must be non-decreasing")

    def __len__(self) -> int:
        return self.values.size


@dataclass
class EigenfunctionMatrix:
    """Per-component score time series: entry (i, t) is <v_i, x_t>."""

    values: np.ndarray

    @property
    def component_count(self) -> int:
        return self.values.shape[0]

    @property
    def step_count(self) -> int:
        return self.values.shape[1]


def _centered_matrix(store: SampleStore, centered: bool) -> np.ndarray:
    x = store.matrix()
    if centered:
        x = x - x.mean(axis=1, keepdims=True)
    return x


def explained_variance(
    space: EigenSpace,
    store: SampleStore,
    centered: bool = False,
    label: str = "",
) -> CurveSeries:
    """Cumulative explained-variance curve of a basis over stored samples.

    Component i contributes e_i = sum_t <v_i, x_t>^2 / sum_t ||x_t||^2
    (samples mean-subtracted first when ``centered``); the curve is the
    running sum of the e_i in component order.
    """
    if space.dim != store.dim:
        raise DimensionMismatchError(
            f"space dim {space.dim} does not match store dim {store.dim}"
        )
    if store.count < 2:
        raise DegenerateDataError(f"need at least 2 samples, have {store.count}")
    x = _centered_matrix(store, centered)
    total = float((x**2).sum())
    if total <= 0.0:
        raise DegenerateDataError("samples carry no variance under this convention")
    scores = space.components @ x
    shares = (scores**2).sum(axis=1) / total
    return CurveSeries(values=np.cumsum(shares), label=label, centered=centered)


def curve_gap(a: CurveSeries, b: CurveSeries) -> float:
    """Largest pointwise curve difference, in percentage points.

    Curves of different lengths are compared on the common prefix.
    """
    m = min(len(a), len(b))
    return float(np.max(np.abs(a.values[:m] - b.values[:m]))) * 100.0


def mean_curve(runs, label: str = "") -> CurveSeries:
    """Pointwise arithmetic mean of equal-length curves."""
    runs = list(runs)
    if not runs:
        raise ValueError("cannot average an empty list of curves")
    length = len(runs[0])
    if any(len(r) != length for r in runs):
        raise DimensionMismatchError("curves must have equal length to average")
    if any(r.centered != runs[0].centered for r in runs):
        raise ValueError("cannot average curves computed under different conventions")
    stacked = np.stack([r.values for r in runs], axis=0)
    return CurveSeries(
        values=stacked.mean(axis=0),
        label=label or f"mean of {len(runs)} runs",
        centered=runs[0].centered,
    )


def eigenfunctions(space: EigenSpace, store: SampleStore) -> EigenfunctionMatrix:
    """Score time series f_i(t) = <v_i, x_t> for every component.

    Summing v_i * f_i(t) over i reproduces the projection of x_t onto the
    spanned subspace, so these are the temporal coefficients of the basis.
    """
    if space.dim != store.dim:
        raise DimensionMismatchError(
            f"space dim {space.dim} does not match store dim {store.dim}"
        )
    return EigenfunctionMatrix(values=space.components @ store.matrix())


def subspace_overlap(a: EigenSpace, b: EigenSpace, k: int) -> float:
    """Mean squared singular value of the top-k cross-projection matrix.

    Equals 1 exactly when the leading k-dimensional spans coincide and 0
    when they are orthogonal.
    """
    if a.dim != b.dim:
        raise DimensionMismatchError(f"space dims differ: {a.dim} vs {b.dim}")
    if k < 1 or k > len(a) or k > len(b):
        raise ValueError(f"k={k} exceeds a component count ({len(a)}, {len(b)})")
    m = a.components[:k] @ b.components[:k].T
    sigma_sq, _ = sym_eig(m @ m.T)
    return float(np.clip(sigma_sq, 0.0, None).mean())
