"""Closed-form outage probabilities and throughputs.

Each user link is a two-hop decode-and-forward chain. The first hop depends
only on g_sr ~ Gamma(N, lambda_sr) and has an exact incomplete-gamma CDF.
The second hop depends on the product g_sr * g_rd, approximated by a
log-normal. The backscatter links are products of g_sr with one or two
exponential gains, also log-normal approximated.

``lognormal_variant`` selects between two forms:

``moment_matched``
    Per-factor moment matching composed by ``lognormal_product``,
    conventional Gamma-scale placement (threshold / lambda), and link
    constants taken from the SINR model so the result is directly
    comparable with simulation.
``as_printed``
    The literal alternative constants: shape-N parameters for every factor,
    the ``2 mu, sqrt(2) sigma`` composition, lambda multiplying the
    first-hop threshold, and (1 - beta) in the R->C threshold.

``noise_normalization = include`` multiplies the second-hop thresholds by
``N0 + E[I]``, with E[I] the mean backscatter interference at that user
(zero at D1 when ``hop2_interference`` is off).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import (
    Hop2Interference,
    LognormalVariant,
    NoiseNormalization,
    SystemParams,
    Thresholds,
    ThroughputPrelog,
    legacy_params,
)
from .sinr import cr_gain, rc_gain
from .specialfns import (
    LogNormalParams,
    lognormal_cdf,
    lognormal_from_moments,
    lognormal_product,
    reg_lower_gamma,
)

__all__ = [
    "OutageBreakdown",
    "MainOutage",
    "gamma_law",
    "exponential_law",
    "expected_interference",
    "op_d1",
    "op_d2",
    "op_main",
    "op_rc",
    "op_cr",
    "op_bs",
    "link_prelogs",
    "throughput_main",
    "throughput_bs",
    "throughput_legacy",
    "boundary_flags",
]


@dataclass(frozen=True)
class OutageBreakdown:
    """Per-hop outage terms of a two-hop user link and their composition."""

    hop1_term: float
    hop2_term: float
    total: float

    @classmethod
    def compose(cls, hop1: float, hop2: float) -> "OutageBreakdown":
        return cls(hop1, hop2, 1.0 - (1.0 - hop1) * (1.0 - hop2))


@dataclass(frozen=True)
class MainOutage:
    """Sum of the two user outages, as defined, and the same value capped at 1."""

    raw: float
    clamped: float


def gamma_law(shape: float, scale: float) -> LogNormalParams:
    return lognormal_from_moments(shape * scale, shape * scale * scale)


def exponential_law(mean: float) -> LogNormalParams:
    return lognormal_from_moments(mean, mean * mean)


def _printed_pair(n: int) -> LogNormalParams:
    # per-factor (mu, sigma^2) = (ln(N^2/sqrt(N^2+N)), ln(1+1/N)), composed x2
    mu = math.log(n * n / math.sqrt(n * n + n))
    return LogNormalParams(2.0 * mu, 2.0 * math.log1p(1.0 / n))


def _mean_sqrt_gamma(shape: float, scale: float) -> float:
    return math.sqrt(scale) * math.exp(math.lgamma(shape + 0.5) - math.lgamma(shape))


def expected_interference(params: SystemParams, user: int) -> float:
    """E[zeta sqrt(P_R) g_rc g_cdk] under the Gamma/exponential channel laws."""
    p = params
    lam_cd = p.lambda_cd1 if user == 1 else p.lambda_cd2
    return (p.zeta * math.sqrt(p.harvest_gain * p.p_s)
            * _mean_sqrt_gamma(p.n_elems, p.lambda_sr) * p.lambda_rc * lam_cd)


def _hop2_noise(params: SystemParams, user: int) -> float:
    if params.noise_normalization is NoiseNormalization.AS_PRINTED:
        return 1.0
    if user == 1 and params.hop2_interference is Hop2Interference.OFF:
        return params.n0
    return params.n0 + expected_interference(params, user)


def _first_hop_cdf(params: SystemParams, t: float) -> float:
    """P(g_sr < t) with the variant's placement of lambda_sr."""
    if params.lognormal_variant is LognormalVariant.AS_PRINTED:
        return reg_lower_gamma(params.n_elems, t * params.lambda_sr)
    return reg_lower_gamma(params.n_elems, t / params.lambda_sr)


def _second_hop(params: SystemParams, user: int, gamma_th: float) -> float:
    p = params
    printed = p.lognormal_variant is LognormalVariant.AS_PRINTED
    b1, b2 = p.hop2_alloc
    if printed:
        alloc = p.a1 if user == 1 else p.a2
    else:
        alloc = b1 if user == 1 else b2
    if gamma_th == 0.0:
        return 0.0
    denom = alloc * p.p_s * (1.0 - p.beta) * p.theta * p.eta
    if denom <= 0.0:
        return 1.0
    tau = (1.0 - p.theta) * gamma_th * _hop2_noise(p, user) / denom
    if printed:
        law = _printed_pair(p.n_elems)
    else:
        lam_rd = p.lambda_rd1 if user == 1 else p.lambda_rd2
        law = lognormal_product([gamma_law(p.n_elems, p.lambda_sr),
                                 gamma_law(p.hop2_elems, lam_rd)])
    return lognormal_cdf(law, tau)


def op_d1(params: SystemParams, thresholds: Thresholds) -> OutageBreakdown:
    """Outage of the near user D1.

    The first hop is an SIC-limited SINR bounded by a1/a2; when
    ``a1 <= a2 * gamma_th`` it can never reach the threshold and the
    outage is exactly 1.
    """
    p = params
    g = thresholds.gamma_th_d
    margin = p.a1 - p.a2 * g
    if g == 0.0:
        hop1 = 0.0
    elif margin <= 0.0:
        return OutageBreakdown(1.0, _second_hop(p, 1, g), 1.0)
    else:
        hop1 = _first_hop_cdf(p, g * p.n0 / (margin * p.p_s))
    return OutageBreakdown.compose(hop1, _second_hop(p, 1, g))


def op_d2(params: SystemParams, thresholds: Thresholds) -> OutageBreakdown:
    """Outage of the far user D2."""
    p = params
    g = thresholds.gamma_th_d
    if g == 0.0:
        hop1 = 0.0
    elif p.a2 <= 0.0:
        hop1 = 1.0
    else:
        hop1 = _first_hop_cdf(p, g * p.n0 / (p.a2 * p.p_s))
    return OutageBreakdown.compose(hop1, _second_hop(p, 2, g))


def op_main(params: SystemParams, thresholds: Thresholds) -> MainOutage:
    raw = op_d1(params, thresholds).total + op_d2(params, thresholds).total
    return MainOutage(raw=raw, clamped=min(raw, 1.0))


def op_rc(params: SystemParams, thresholds: Thresholds) -> float:
    """Outage of the relay-to-C backscatter link (1.0 when it carries no power)."""
    p = params
    g = thresholds.gamma_th_c
    if g == 0.0:
        return 0.0
    if p.lognormal_variant is LognormalVariant.AS_PRINTED:
        coef = p.zeta * (1.0 - p.beta) * p.p_s / p.n0
        if coef <= 0.0:
            return 1.0
        n = p.n_elems
        mu = math.log(n * n / math.sqrt(n * n + 2.0 * n))
        law = LogNormalParams(2.0 * mu, 2.0 * math.log1p(2.0 / n))
    else:
        coef = rc_gain(p)
        if coef <= 0.0:
            return 1.0
        law = lognormal_product([gamma_law(p.n_elems, p.lambda_sr),
                                 exponential_law(p.lambda_rc)])
    return lognormal_cdf(law, g / coef)


def op_cr(params: SystemParams, thresholds: Thresholds) -> float:
    """Outage of the C-to-relay backscatter link (1.0 when it carries no power)."""
    p = params
    g = thresholds.gamma_th_c
    if g == 0.0:
        return 0.0
    n = p.n_elems
    if p.lognormal_variant is LognormalVariant.AS_PRINTED:
        coef = p.zeta * (1.0 - p.theta) * (1.0 - p.beta) * p.p_s / p.n0
        if coef <= 0.0:
            return 1.0
        mu = math.log(n * n / math.sqrt(4.0 * n * n + 4.0 * n))
        law = LogNormalParams(2.0 * mu, 2.0 * math.log(4.0 + 4.0 / n))
    else:
        coef = cr_gain(p)
        if coef <= 0.0:
            return 1.0
        law = lognormal_product([gamma_law(n, p.lambda_sr),
                                 exponential_law(p.lambda_rc),
                                 exponential_law(p.lambda_cr)])
    return lognormal_cdf(law, g / coef)


def op_bs(params: SystemParams, thresholds: Thresholds) -> MainOutage:
    """Backscatter counterpart of ``op_main``: R->C plus C->R outage."""
    raw = op_rc(params, thresholds) + op_cr(params, thresholds)
    return MainOutage(raw=raw, clamped=min(raw, 1.0))


def link_prelogs(params: SystemParams) -> tuple[float, float, float]:
    """Rate weights (main, R->C, C->R) applied by the throughput formulas."""
    if params.throughput_prelog is ThroughputPrelog.TIME_SPLIT:
        rest = 1.0 - params.theta
        return rest, params.theta, rest
    return 1.0, 1.0, 1.0


def throughput_main(params: SystemParams, thresholds: Thresholds) -> float:
    w, _, _ = link_prelogs(params)
    u = params.rate_main
    p1 = op_d1(params, thresholds).total
    p2 = op_d2(params, thresholds).total
    return w * ((1.0 - p1) * u + (1.0 - p2) * u)


def throughput_bs(params: SystemParams, thresholds: Thresholds) -> float:
    _, w_rc, w_cr = link_prelogs(params)
    u = params.rate_bs
    return (w_rc * (1.0 - op_rc(params, thresholds)) * u
            + w_cr * (1.0 - op_cr(params, thresholds)) * u)


def throughput_legacy(params: SystemParams, thresholds: Thresholds) -> float:
    """Main-link throughput with backscatter switched off."""
    return throughput_main(legacy_params(params), thresholds)


def boundary_flags(params: SystemParams, thresholds: Thresholds) -> list[str]:
    """Names of degenerate corners hit at this operating point."""
    p = params
    flags = []
    if thresholds.gamma_th_d > 0 and p.a1 <= p.a2 * thresholds.gamma_th_d:
        flags.append("d1_sic_ceiling")
    printed = p.lognormal_variant is LognormalVariant.AS_PRINTED
    rc = p.zeta * (1.0 - p.beta) if printed else rc_gain(p)
    cr = p.zeta * (1.0 - p.theta) * (1.0 - p.beta) if printed else cr_gain(p)
    if rc <= 0.0:
        flags.append("rc_degenerate")
    if cr <= 0.0:
        flags.append("cr_degenerate")
    return flags
