"""Monte Carlo outage and throughput estimation.

Trials are split into ``PARTITIONS`` fixed chunks, each drawn from its own
counter block of the run's Philox stream. The split does not depend on the
number of workers, so results are bit-identical however the chunks are
scheduled.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .analytic import link_prelogs
from .channel import RngStream, sample
from .model import SystemParams, Thresholds, legacy_params
from .sinr import compute_sinrs

__all__ = [
    "PARTITIONS",
    "Link",
    "McConfig",
    "OutageResult",
    "ThroughputEstimate",
    "count_outages",
    "estimate_outages",
    "estimate_outage",
    "estimate_throughput",
]

PARTITIONS = 16
MIN_TRIALS = 1000


class Link(str, Enum):
    D1 = "d1"
    D2 = "d2"
    MAIN = "main"
    RC = "rc"
    CR = "cr"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 0
    channel_mode: str = "assumption"
    confidence_z: float = 1.96
    # scheduling only; never changes results
    workers: int = 1

    def __post_init__(self):
        if self.trials <= 0:
            raise ValueError("trials must be positive")
        if self.channel_mode not in ("assumption", "physical"):
            raise ValueError(f"unknown channel mode {self.channel_mode!r}")
        if not (math.isfinite(self.confidence_z) and self.confidence_z > 0):
            raise ValueError("confidence_z must be finite and > 0")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.trials < MIN_TRIALS:
            warnings.warn(f"{self.trials} trials: normal-approximation CI is unreliable",
                          stacklevel=3)


@dataclass(frozen=True)
class OutageResult:
    """Frequency estimate of one link's outage.

    For ``main`` the estimate is the sum of the two users' marginal
    frequencies capped at 1; ``raw`` keeps the uncapped sum and
    ``joint_both``/``joint_any`` record how often both or either user
    failed in the same realization.
    """

    link: Link
    estimate: float
    ci_halfwidth: float
    trials: int
    analytic: Optional[float] = None
    raw: Optional[float] = None
    joint_both: Optional[float] = None
    joint_any: Optional[float] = None


@dataclass(frozen=True)
class ThroughputEstimate:
    value: float
    ci_halfwidth: float


def _partition_sizes(trials: int) -> list[int]:
    base, extra = divmod(trials, PARTITIONS)
    return [base + (1 if i < extra else 0) for i in range(PARTITIONS)]


def _count_chunk(params, thresholds, mode, stream, partition, n) -> np.ndarray:
    if n == 0:
        return np.zeros(6, dtype=np.int64)
    ch = sample(params, stream.generator(partition), size=n, mode=mode)
    s = compute_sinrs(params, ch)
    gd, gc = thresholds.gamma_th_d, thresholds.gamma_th_c
    d1 = s.e2e_d1 < gd
    d2 = s.e2e_d2 < gd
    return np.array([
        d1.sum(), d2.sum(), (d1 & d2).sum(), (d1 | d2).sum(),
        (s.snr_rc_bs < gc).sum(), (s.snr_cr_bs < gc).sum(),
    ], dtype=np.int64)


def count_outages(params: SystemParams, thresholds: Thresholds, mc: McConfig,
                  stream: Optional[RngStream] = None) -> np.ndarray:
    """Outage counts ``[d1, d2, both, any, rc, cr]`` over ``mc.trials`` draws."""
    stream = RngStream(mc.seed, 0) if stream is None else stream
    sizes = _partition_sizes(mc.trials)
    args = [(params, thresholds, mc.channel_mode, stream, i, n) for i, n in enumerate(sizes)]
    if mc.workers > 1:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            parts = list(pool.map(lambda a: _count_chunk(*a), args))
    else:
        parts = [_count_chunk(*a) for a in args]
    # integer sum: order-independent
    return np.sum(parts, axis=0)


def _ci(p: float, n: int, z: float) -> float:
    return z * math.sqrt(max(p * (1.0 - p), 0.0) / n)


def estimate_outages(params: SystemParams, thresholds: Thresholds, mc: McConfig,
                     stream: Optional[RngStream] = None) -> dict[Link, OutageResult]:
    """All link outages from one common set of channel draws."""
    n = mc.trials
    z = mc.confidence_z
    c = count_outages(params, thresholds, mc, stream)
    p1, p2, both, any_, prc, pcr = (float(x) / n for x in c)
    out = {
        Link.D1: OutageResult(Link.D1, p1, _ci(p1, n, z), n),
        Link.D2: OutageResult(Link.D2, p2, _ci(p2, n, z), n),
        Link.RC: OutageResult(Link.RC, prc, _ci(prc, n, z), n),
        Link.CR: OutageResult(Link.CR, pcr, _ci(pcr, n, z), n),
    }
    # variance of the per-trial sum of the two indicators
    var = p1 * (1 - p1) + p2 * (1 - p2) + 2.0 * (both - p1 * p2)
    raw = p1 + p2
    out[Link.MAIN] = OutageResult(
        Link.MAIN, min(raw, 1.0), z * math.sqrt(max(var, 0.0) / n), n,
        raw=raw, joint_both=both, joint_any=any_,
    )
    return out


def estimate_outage(params: SystemParams, thresholds: Thresholds, link, mc: McConfig,
                    stream: Optional[RngStream] = None) -> OutageResult:
    return estimate_outages(params, thresholds, mc, stream)[Link(link)]


def estimate_throughput(params: SystemParams, thresholds: Thresholds, system: str,
                        mc: McConfig, stream: Optional[RngStream] = None,
                        outages: Optional[dict] = None) -> ThroughputEstimate:
    """Throughput from simulated outages, CI by linear propagation.

    ``system`` is ``main``, ``bs`` or ``legacy`` (main link with backscatter
    disabled). Pass precomputed ``outages`` to reuse draws.
    """
    if system == "legacy":
        params = legacy_params(params)
        system = "main"
        outages = None
    if outages is None:
        outages = estimate_outages(params, thresholds, mc, stream)
    w_main, w_rc, w_cr = link_prelogs(params)
    if system == "main":
        u = params.rate_main
        a, b = outages[Link.D1], outages[Link.D2]
        wa = wb = w_main * u
    elif system == "bs":
        u = params.rate_bs
        a, b = outages[Link.RC], outages[Link.CR]
        wa, wb = w_rc * u, w_cr * u
    else:
        raise ValueError(f"unknown system {system!r}")
    value = wa * (1.0 - a.estimate) + wb * (1.0 - b.estimate)
    ci = math.hypot(wa * a.ci_halfwidth, wb * b.ci_halfwidth)
    return ThroughputEstimate(value, ci)
