"""One-step-per-time-step eigenspace tracking.

Each incoming sample updates every maintained component once, using all
second-order correlations between the new sample and (a subset of) the
previous ones, then rebuilds the trailing component from the deflation
residual. Three regimes fall out of two knobs:

* full-dimensional: ``space_limit >= n`` and ``processing_limit >= n``
  keep every component and every previous sample in play;
* limited-dimensional: a constant ``space_limit`` caps the number of
  components, bounding the work per step to O(space_limit * n) inner
  products;
* stochastic: once n exceeds ``processing_limit``, each step draws that
  many previous samples uniformly without replacement, bounding the work
  per step to O(space_limit * processing_limit) = O(1) inner products.

A single-component Oja baseline is included for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .batch import EigenSpace
from .core import (
    DegenerateVectorError,
    DimensionMismatchError,
    OpCounter,
    RngState,
    SampleStore,
    _as_vector,
    normalize,
    sample_indices,
)


@dataclass
class AdaptiveConfig:
    """Knobs for the streaming update.

    space_limit: maximum number of components maintained.
    processing_limit: maximum number of previous samples correlated with
        the new sample per component per step; smaller than n triggers
        the stochastic regime.
    reorthogonalize: re-project each updated component against the ones
        updated before it within the same step. The raw update only
        deflates the sample workspace, so without this the basis slowly
        loses pairwise orthogonality; switch it off to study the
        unmodified update.
    degenerate_tol: norm below which a residual component is dropped.
    seed: seed for the sampling generator (stochastic regime only).
    """

    space_limit: int
    processing_limit: int
    reorthogonalize: bool = True
    degenerate_tol: float = 1e-12
    seed: int = 0

    def __post_init__(self):
        if self.space_limit < 1:
            raise ValueError(f"space_limit must be >= 1, got {self.space_limit}")
        if self.processing_limit < 1:
            raise ValueError(
                f"processing_limit must be >= 1, got {self.processing_limit}"
            )


@dataclass
class AdaptiveState:
    """Everything the streaming update carries between time-steps."""

    config: AdaptiveConfig
    store: SampleStore
    components: list = field(default_factory=list)
    n: int = 0
    rng: RngState = None
    counter: OpCounter = field(default_factory=OpCounter)
    degenerate_events: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.store.dim

    def eigenspace(self) -> EigenSpace:
        """Snapshot of the current components as an EigenSpace."""
        return EigenSpace(
            dim=self.dim,
            components=np.stack(self.components, axis=0),
            eigenvalues=None,
            centered=False,
        )


def initialize(x1, x2, config: AdaptiveConfig) -> AdaptiveState:
    """Start a stream from its first two time-steps.

    The single initial component is the normalized difference
    (x2 - x1) / ||x2 - x1||. Identical first samples are an error; the
    caller should supply the next distinct time-step as x2.
    """
    a = _as_vector(x1)
    b = _as_vector(x2)
    if a.shape[0] != b.shape[0]:
        raise DimensionMismatchError(
            f"first samples disagree in length: {a.shape[0]} vs {b.shape[0]}"
        )
    try:
        v0 = normalize(b - a, tol=config.degenerate_tol)
    except DegenerateVectorError as err:
        raise DegenerateVectorError(
            "first two samples coincide; supply the next distinct time-step as x2"
        ) from err
    store = SampleStore(a.shape[0])
    store.append(a)
    store.append(b)
    return AdaptiveState(
        config=config,
        store=store,
        components=[v0],
        n=2,
        rng=RngState(config.seed),
    )


def update_component(v, new_index: int, indices, workspace, counter: OpCounter | None = None):
    """One raw component update against the deflated workspace.

    Implements

        v~ = v + sum_j <v, x~_j> <x~_j, x~_new>^2 x~_j
               + <v, x~_new> ((sum_j <x~_j, x~_new>) + <x~_new, x~_new>)^2 x~_new

    with j running over ``indices`` into ``workspace`` (columns are the
    deflated samples) and ``new_index`` the column of the new time-step.
    Previous samples are reweighted by their squared correlation with the
    new sample; the new sample's weight squares the total correlation it
    carries. With the full index set the squared single sum equals the
    expanded double sum over all pairs of correlations, so this is the
    cheaper of the two equivalent forms.

    The result is NOT normalized. Inner products consumed:
    2 * len(indices) + 2, tallied in ``counter`` when given.
    """
    vec = _as_vector(v)
    w = np.asarray(workspace, dtype=np.float64)
    idx = np.asarray(indices, dtype=np.intp)
    xs = w[:, idx]
    xn = w[:, new_index]
    scores = vec @ xs
    corrs = xs.T @ xn
    new_score = float(vec @ xn)
    self_corr = float(xn @ xn)
    if counter is not None:
        counter.add(2 * idx.shape[0] + 2)
    weight = (float(corrs.sum()) + self_corr) ** 2
    return vec + xs @ (scores * corrs**2) + new_score * weight * xn


def ingest(state: AdaptiveState, x_new) -> AdaptiveState:
    """Advance the stream by one time-step, updating the state in place.

    The new sample joins the store, a fresh deflation workspace is built
    from the (sampled) previous columns plus the new one, every maintained
    component is updated and re-normalized, and the summed residual of the
    fully deflated workspace becomes the trailing component. A residual
    below ``degenerate_tol`` is dropped and logged in
    ``state.degenerate_events`` as (time-step, component position); the
    space regrows on later steps.
    """
    x = _as_vector(x_new)
    if x.shape[0] != state.dim:
        raise DimensionMismatchError(
            f"sample has {x.shape[0]} elements, stream carries {state.dim}-vectors"
        )
    cfg = state.config
    n = state.n
    state.store.append(x)
    indices = sample_indices(n, cfg.processing_limit, state.rng)
    return _ingest_with_indices(state, indices)


def _ingest_with_indices(state: AdaptiveState, indices) -> AdaptiveState:
    """Deterministic core of ingest, after the sample set is fixed.

    ``state.store`` must already hold the new sample in its last column;
    ``indices`` selects the previous columns entering this step. Kept
    separate so the sampling policy and the arithmetic can be tested
    independently: identical index sets give bit-identical states.
    """
    cfg = state.config
    counter = state.counter
    n = state.n
    k = len(indices)
    # workspace columns: the sampled previous steps, then the new step
    w = state.store.matrix(columns=list(indices) + [n])
    local_idx = np.arange(k)
    updated = min(min(n, cfg.space_limit) - 1, len(state.components))
    for i in range(updated):
        v = state.components[i]
        vt = update_component(v, k, local_idx, w, counter)
        vnew = vt + float(vt @ v) * v
        counter.add(1)
        if cfg.reorthogonalize:
            for m in range(i):
                prev = state.components[m]
                vnew = vnew - float(vnew @ prev) * prev
            counter.add(i)
        nrm = math.sqrt(float(vnew @ vnew))
        counter.add(1)
        if nrm <= cfg.degenerate_tol:
            raise DegenerateVectorError(
                f"component {i + 1} degenerated at time-step {n + 1}"
            )
        vnew = vnew / nrm
        state.components[i] = vnew
        w -= np.outer(vnew, vnew @ w)
        counter.add(k + 1)
    residual = w.sum(axis=1)
    nrm = math.sqrt(float(residual @ residual))
    counter.add(1)
    position = min(n, cfg.space_limit)
    if nrm <= cfg.degenerate_tol:
        state.degenerate_events.append((n + 1, position))
    else:
        residual = residual / nrm
        if len(state.components) < position:
            state.components.append(residual)
        else:
            state.components[position - 1] = residual
    state.n = n + 1
    counter.mark_step(state.n)
    return state


def run_adaptive(samples, config: AdaptiveConfig) -> AdaptiveState:
    """Feed a whole sample sequence through the streaming update.

    ``samples`` is a SampleStore or any iterable of equal-length vectors
    with at least two entries, consumed in time order.
    """
    iterator = iter(samples)
    try:
        x1 = next(iterator)
        x2 = next(iterator)
    except StopIteration:
        raise ValueError("need at least two samples to start a stream") from None
    state = initialize(x1, x2, config)
    for x in iterator:
        ingest(state, x)
    return state


@dataclass
class OjaState:
    """Single-component Oja baseline: v <- normalize(v + lr * <x, v> x)."""

    component: np.ndarray
    learning_rate: float

    def __post_init__(self):
        self.component = _as_vector(self.component)
        if abs(float(np.linalg.norm(self.component)) - 1.0) > 1e-12:
            raise ValueError("Oja component must be unit-norm")
        if self.learning_rate <= 0:
            raise ValueError(f"learning rate must be positive, got {self.learning_rate}")


def oja_update(state: OjaState, x_new) -> OjaState:
    """One Oja step on a new sample; returns a fresh state."""
    x = _as_vector(x_new)
    v = state.component
    if x.shape[0] != v.shape[0]:
        raise DimensionMismatchError(
            f"sample has {x.shape[0]} elements, component has {v.shape[0]}"
        )
    updated = v + state.learning_rate * float(x @ v) * x
    return OjaState(component=normalize(updated), learning_rate=state.learning_rate)
