"""Random link power gains.

Two samplers share one output type:

* ``sample_assumption`` draws the laws the closed forms are derived under:
  Gamma(N, lambda) for the IRS cascades and exponential for direct links.
* ``sample_physical`` builds each cascade element by element, as the
  coherent magnitude sum of products of Rayleigh amplitudes (ideal phase
  alignment), and squares it.

Randomness comes from counter-based Philox streams keyed by
``(seed, stream_id)``; sub-streams for parallel partitions use disjoint
counter blocks of the same key, so results never depend on worker count.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .model import SystemParams

__all__ = [
    "RngStream",
    "ChannelRealization",
    "derive_stream",
    "sample_assumption",
    "sample_physical",
    "sample",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Identity of a reproducible random stream."""

    seed: int
    stream_id: int = 0

    def generator(self, partition: int = 0) -> np.random.Generator:
        """Generator for one partition of this stream.

        Partitions start at counter offset ``partition * 2**128`` blocks,
        far beyond anything a single partition consumes.
        """
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64], dtype=np.uint64)
        counter = np.array([0, 0, partition & _MASK64, 0], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key, counter=counter))


def derive_stream(seed: int, point_index: int) -> RngStream:
    """Stream for grid point ``point_index`` of a run seeded with ``seed``."""
    return RngStream(seed=int(seed), stream_id=int(point_index))


RngLike = Union[RngStream, np.random.Generator]


def _as_generator(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    return rng


@dataclass(frozen=True)
class ChannelRealization:
    """Power gains of every link; scalars or equally shaped arrays."""

    g_sr: np.ndarray
    g_rd1: np.ndarray
    g_rd2: np.ndarray
    g_rc: np.ndarray
    g_cr: np.ndarray
    g_cd1: np.ndarray
    g_cd2: np.ndarray

    @classmethod
    def constant(cls, value: float = 1.0, **overrides: float) -> "ChannelRealization":
        gains = {name: value for name in cls.__dataclass_fields__}
        gains.update(overrides)
        return cls(**gains)


def _exponential(gen: np.random.Generator, mean: float, size) -> np.ndarray:
    # inverse CDF; 1 - U lies in (0, 1] so the log is finite
    return -mean * np.log1p(-gen.random(size))


def _direct_links(params: SystemParams, gen: np.random.Generator, size) -> dict:
    return {
        "g_rc": _exponential(gen, params.lambda_rc, size),
        "g_cr": _exponential(gen, params.lambda_cr, size),
        "g_cd1": _exponential(gen, params.lambda_cd1, size),
        "g_cd2": _exponential(gen, params.lambda_cd2, size),
    }


def sample_assumption(
    params: SystemParams, rng: RngLike, size: Optional[int] = None
) -> ChannelRealization:
    """Draw gains from the Gamma/exponential laws used by the closed forms."""
    gen = _as_generator(rng)
    k = params.hop2_elems
    # numpy's standard_gamma is Marsaglia-Tsang rejection, exact for shape >= 1
    g_sr = params.lambda_sr * gen.standard_gamma(params.n_elems, size)
    g_rd1 = params.lambda_rd1 * gen.standard_gamma(k, size)
    g_rd2 = params.lambda_rd2 * gen.standard_gamma(k, size)
    return ChannelRealization(g_sr=g_sr, g_rd1=g_rd1, g_rd2=g_rd2,
                              **_direct_links(params, gen, size))


def _rayleigh(gen: np.random.Generator, shape) -> np.ndarray:
    # |h| with E|h|^2 = 1
    return np.sqrt(_exponential(gen, 1.0, shape))


def _cascade(gen, n: int, size, scale: float, magnitude: Optional[float]) -> np.ndarray:
    shape = (n,) if size is None else (size, n)
    if magnitude is None:
        amp = _rayleigh(gen, shape) * _rayleigh(gen, shape)
    else:
        amp = np.full(shape, magnitude * magnitude)
    return scale * np.square(amp.sum(axis=-1))


def sample_physical(
    params: SystemParams,
    rng: RngLike,
    size: Optional[int] = None,
    magnitude_override: Optional[float] = None,
) -> ChannelRealization:
    """Draw gains from the element-level IRS cascade with ideal phases.

    Each factor is a unit mean-square Rayleigh amplitude and the squared
    coherent sum is multiplied by the link's lambda. The mean of ``g_sr`` is
    therefore ``lambda_sr * (N + N(N-1) pi^2/16)``, not ``N * lambda_sr``;
    the two sampling modes are not normalized to each other.

    ``magnitude_override`` pins every element amplitude (test hook).
    """
    gen = _as_generator(rng)
    m = params.m_elems
    g_sr = _cascade(gen, params.n_elems, size, params.lambda_sr, magnitude_override)
    g_rd1 = _cascade(gen, m, size, params.lambda_rd1, magnitude_override)
    g_rd2 = _cascade(gen, m, size, params.lambda_rd2, magnitude_override)
    return ChannelRealization(g_sr=g_sr, g_rd1=g_rd1, g_rd2=g_rd2,
                              **_direct_links(params, gen, size))


def sample(params: SystemParams, rng: RngLike, size: Optional[int] = None,
           mode: str = "assumption") -> ChannelRealization:
    if mode == "assumption":
        return sample_assumption(params, rng, size)
    if mode == "physical":
        return sample_physical(params, rng, size)
    raise ValueError(f"unknown channel mode {mode!r}")
