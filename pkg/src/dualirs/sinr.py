"""Instantaneous SINRs and relay power for one (or a batch of) channel draws.

All functions broadcast over numpy arrays, so a whole Monte Carlo batch is
evaluated in one call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelRealization
from .model import CrPrefactor, Eq15Variant, Hop2Interference, SystemParams

__all__ = [
    "LinkSinrs",
    "harvested_energy",
    "relay_power",
    "rc_gain",
    "cr_gain",
    "compute_sinrs",
]


def harvested_energy(params: SystemParams, g_sr):
    """Energy collected by the relay in one block (block length normalized to 1)."""
    return params.eta * (1.0 - params.beta) * params.p_s * np.asarray(g_sr) * params.theta


def relay_power(params: SystemParams, g_sr):
    """Relay transmit power: harvested energy spread over the (1 - theta) phase."""
    return harvested_energy(params, g_sr) / (1.0 - params.theta)


def rc_gain(params: SystemParams) -> float:
    """SNR of R->C per unit of g_sr * g_rc: beta * zeta * P_S / N0."""
    return params.beta * params.zeta * params.p_s / params.n0


def cr_gain(params: SystemParams) -> float:
    """SNR of C->R per unit of g_sr * g_rc * g_cr, per the selected prefactor."""
    p = params
    if p.cr_prefactor is CrPrefactor.EQ21:
        k = p.eta * p.zeta
    elif p.cr_prefactor is CrPrefactor.APPENDIX_B:
        k = (1.0 - p.beta) * p.zeta * (1.0 - p.theta) * p.a1
    else:
        k = (1.0 - p.beta) * p.zeta * (1.0 - p.theta)
    return k * p.p_s / p.n0


@dataclass(frozen=True)
class LinkSinrs:
    snr_sr_x1: np.ndarray
    snr_sr_x2: np.ndarray
    snr_rd1_x2: np.ndarray
    snr_rd1_x1: np.ndarray
    snr_rd2_x2: np.ndarray
    snr_rc_bs: np.ndarray
    snr_cr_bs: np.ndarray
    e2e_d1: np.ndarray
    e2e_d2: np.ndarray
    p_r: np.ndarray
    e_r: np.ndarray


def compute_sinrs(params: SystemParams, ch: ChannelRealization) -> LinkSinrs:
    """Map channel gains to every SINR of the two-phase protocol.

    Interference from the backscatter node at user k is
    ``zeta * sqrt(P_R) * g_rc * g_cdk``: amplitude-domain in P_R, kept as the
    model states it. D2 always sees it; D1 only when ``hop2_interference``
    is on.
    """
    p = params
    n0 = p.n0
    g_sr = np.asarray(ch.g_sr, dtype=float)
    b1, b2 = p.hop2_alloc

    rx1 = p.p_s * g_sr
    snr_sr_x1 = p.a1 * rx1 / (p.a2 * rx1 + n0)
    snr_sr_x2 = p.a2 * rx1 / n0
    snr_rc_bs = rc_gain(p) * g_sr * ch.g_rc

    e_r = harvested_energy(p, g_sr)
    p_r = e_r / (1.0 - p.theta)
    amp = p.zeta * np.sqrt(p_r)
    i_cd1 = amp * ch.g_rc * ch.g_cd1
    i_cd2 = amp * ch.g_rc * ch.g_cd2
    i_d1 = i_cd1 if p.hop2_interference is Hop2Interference.ON else 0.0 * i_cd1

    rx_d1 = p_r * ch.g_rd1
    if p.eq15_variant is Eq15Variant.AS_PRINTED:
        snr_rd1_x2 = b2 * rx_d1 / (b2 * rx_d1 + n0)
    else:
        snr_rd1_x2 = b2 * rx_d1 / (b1 * rx_d1 + i_d1 + n0)
    snr_rd1_x1 = b1 * rx_d1 / (n0 + i_d1)
    snr_rd2_x2 = b2 * p_r * ch.g_rd2 / (n0 + i_cd2)

    snr_cr_bs = cr_gain(p) * g_sr * ch.g_rc * ch.g_cr

    return LinkSinrs(
        snr_sr_x1=snr_sr_x1,
        snr_sr_x2=snr_sr_x2,
        snr_rd1_x2=snr_rd1_x2,
        snr_rd1_x1=snr_rd1_x1,
        snr_rd2_x2=snr_rd2_x2,
        snr_rc_bs=snr_rc_bs,
        snr_cr_bs=snr_cr_bs,
        e2e_d1=np.minimum(snr_sr_x1, snr_rd1_x1),
        e2e_d2=np.minimum(snr_sr_x2, snr_rd2_x2),
        p_r=p_r,
        e_r=e_r,
    )
