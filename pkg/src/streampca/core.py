"""Shared numeric primitives: sample storage, seeded randomness, and
dot-product accounting.

Everything downstream (the batch oracle, the streaming updates, the
evaluation tools) builds on the types in this module. All scalars are
64-bit floats; narrower input data is widened on ingest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class StreamPcaError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(StreamPcaError):
    """Vector or matrix dimensions do not agree."""


class DegenerateVectorError(StreamPcaError):
    """A vector whose norm is below tolerance where a direction is needed."""


class InsufficientDataError(StreamPcaError):
    """Fewer samples than the operation requires."""


class RankZeroError(StreamPcaError):
    """No spectral mass above the rank tolerance."""


class DegenerateDataError(StreamPcaError):
    """Data carries no variance under the requested convention."""


class ConvergenceError(StreamPcaError):
    """Iterative solver did not reach its tolerance."""

    def __init__(self, message: str, off_diagonal_norm: float):
        super().__init__(message)
        self.off_diagonal_norm = off_diagonal_norm


def _as_vector(x) -> np.ndarray:
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatchError(f"expected a 1-D vector, got shape {v.shape}")
    return v


class SampleStore:
    """Growable ordered collection of equal-length time-step vectors.

    Insertion order is time order: index ``j`` holds time-step ``j``.
    Stored vectors are float64 copies of whatever was appended; callers
    must treat returned vectors as read-only.
    """

    def __init__(self, dim: int):
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = int(dim)
        self._samples: list[np.ndarray] = []

    @classmethod
    def from_matrix(cls, x) -> "SampleStore":
        """Build a store from a (dim, count) matrix whose columns are time-steps."""
        m = np.asarray(x, dtype=np.float64)
        if m.ndim != 2:
            raise DimensionMismatchError(f"expected a 2-D matrix, got shape {m.shape}")
        store = cls(m.shape[0])
        for j in range(m.shape[1]):
            store.append(m[:, j])
        return store

    @property
    def count(self) -> int:
        return len(self._samples)

    def __len__(self) -> int:
        return len(self._samples)

    def __getitem__(self, j: int) -> np.ndarray:
        return self._samples[j]

    def __iter__(self):
        return iter(self._samples)

    def append(self, v) -> None:
        vec = _as_vector(v)
        if vec.shape[0] != self.dim:
            raise DimensionMismatchError(
                f"sample has {vec.shape[0]} elements, store holds {self.dim}-vectors"
            )
        self._samples.append(vec.copy())

    def matrix(self, columns=None) -> np.ndarray:
        """Fresh (dim, count) array of the stored samples, or of ``columns``."""
        if columns is None:
            cols = self._samples
        else:
            cols = [self._samples[j] for j in columns]
        if not cols:
            return np.empty((self.dim, 0))
        return np.stack(cols, axis=1)


_MASK64 = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_U53 = 2.0 ** -53


class RngState:
    """SplitMix64 pseudo-random generator.

    The state advances by the odd constant 0x9E3779B97F4A7C15 per draw and
    each output is the standard SplitMix64 finalizer of the new state
    (xor-shift 30, multiply, xor-shift 27, multiply, xor-shift 31, all
    modulo 2**64). Identical seeds therefore give identical integer and
    uniform streams on every platform. Gaussian variates use Box-Muller on
    top of the uniform stream; vectorized block draws consume exactly the
    same stream positions as repeated scalar draws would.
    """

    def __init__(self, seed: int):
        self.seed = int(seed) & _MASK64
        self._state = self.seed

    def __repr__(self):
        return f"RngState(seed={self.seed})"

    @staticmethod
    def _mix_scalar(z: int) -> int:
        z = ((z ^ (z >> 30)) * _MIX1) & _MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & _MASK64
        return z ^ (z >> 31)

    def next_u64(self) -> int:
        """Next 64-bit word of the stream."""
        self._state = (self._state + _GAMMA) & _MASK64
        return self._mix_scalar(self._state)

    def _block_u64(self, m: int) -> np.ndarray:
        steps = np.arange(1, m + 1, dtype=np.uint64)
        z = np.uint64(self._state) + steps * np.uint64(_GAMMA)
        self._state = (self._state + m * _GAMMA) & _MASK64
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
        return z ^ (z >> np.uint64(31))

    def uniform(self, size=None):
        """Uniform float64 draws in [0, 1) with 53-bit resolution."""
        if size is None:
            return (self.next_u64() >> 11) * _U53
        words = self._block_u64(int(np.prod(size)))
        u = (words >> np.uint64(11)).astype(np.float64) * _U53
        return u.reshape(size)

    def gaussian(self, size=None):
        """Standard normal draws via Box-Muller on the uniform stream.

        Pairs of stream words produce pairs of variates; the second variate
        of the final pair is discarded for odd counts.
        """
        scalar = size is None
        m = 1 if scalar else int(np.prod(size))
        pairs = (m + 1) // 2
        words = self._block_u64(2 * pairs)
        # u1 in (0, 1] so the log is finite
        u1 = ((words[0::2] >> np.uint64(11)).astype(np.float64) + 1.0) * _U53
        u2 = (words[1::2] >> np.uint64(11)).astype(np.float64) * _U53
        r = np.sqrt(-2.0 * np.log(u1))
        theta = 2.0 * np.pi * u2
        out = np.empty(2 * pairs)
        out[0::2] = r * np.cos(theta)
        out[1::2] = r * np.sin(theta)
        if scalar:
            return float(out[0])
        return out[:m].reshape(size)

    def below(self, bound: int) -> int:
        """Unbiased integer in [0, bound) via rejection sampling."""
        if bound <= 0:
            raise ValueError(f"bound must be positive, got {bound}")
        limit = (_MASK64 + 1) - ((_MASK64 + 1) % bound)
        while True:
            w = self.next_u64()
            if w < limit:
                return w % bound


@dataclass
class OpCounter:
    """Running tally of d-vector inner products.

    Every Euclidean inner product of two data-dimension vectors counts
    once, including squared-norm evaluations; index bookkeeping and scalar
    arithmetic are free. ``mark_step`` closes the current step, logging
    (step_index, products consumed since the previous mark), so the
    per-step log always sums to the total.
    """

    dot_products: int = 0
    per_step_log: list = field(default_factory=list)
    _marked: int = 0

    def add(self, count: int = 1) -> None:
        self.dot_products += count

    def mark_step(self, step_index: int) -> None:
        self.per_step_log.append((step_index, self.dot_products - self._marked))
        self._marked = self.dot_products


def dot(a, b, counter: OpCounter | None = None) -> float:
    """Euclidean inner product of two equal-length vectors.

    Increments ``counter`` by one when counting is enabled.
    """
    av = _as_vector(a)
    bv = _as_vector(b)
    if av.shape[0] != bv.shape[0]:
        raise DimensionMismatchError(
            f"length mismatch: {av.shape[0]} vs {bv.shape[0]}"
        )
    if counter is not None:
        counter.add()
    return float(av @ bv)


def normalize(v, tol: float = 1e-12) -> np.ndarray:
    """Return v / ||v||, raising DegenerateVectorError when ||v|| <= tol."""
    vec = _as_vector(v)
    nrm = math.sqrt(float(vec @ vec))
    if nrm <= tol:
        raise DegenerateVectorError(f"vector norm {nrm:.3e} is at or below tol {tol:.3e}")
    return vec / nrm


def sample_indices(n: int, k: int, rng: RngState) -> np.ndarray:
    """k distinct indices from range(n), uniform without replacement.

    Returned ascending so downstream arithmetic is order-deterministic.
    When k >= n the full index set comes back and the generator is not
    advanced (the deterministic branch of the streaming update).
    """
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be positive, got n={n}, k={k}")
    if k >= n:
        return np.arange(n)
    pool = np.arange(n)
    for i in range(k):
        j = i + rng.below(n - i)
        pool[i], pool[j] = pool[j], pool[i]
    picked = pool[:k]
    picked.sort()
    return picked
