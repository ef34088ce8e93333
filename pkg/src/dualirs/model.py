"""System parameters, validation and the rate-to-threshold map."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Optional

__all__ = [
    "ThresholdMode",
    "Eq15Variant",
    "Hop2Interference",
    "CrPrefactor",
    "LognormalVariant",
    "Hop2Shape",
    "NoiseNormalization",
    "ThroughputPrelog",
    "SystemParams",
    "Thresholds",
    "validate",
    "resolve_thresholds",
    "legacy_params",
    "db_to_linear",
]


class _StrEnum(str, Enum):
    def __str__(self) -> str:
        return self.value


class ThresholdMode(_StrEnum):
    EXPLICIT = "explicit"
    FROM_RATE = "from_rate"


class Eq15Variant(_StrEnum):
    """How D1 sees x1 while decoding x2 (first SIC stage)."""

    AS_PRINTED = "as_printed"
    SIC_CORRECTED = "sic_corrected"


class Hop2Interference(_StrEnum):
    """Whether the backscatter node interferes at D1 (it always does at D2)."""

    OFF = "off"
    ON = "on"


class CrPrefactor(_StrEnum):
    """Constant in front of g_sr * g_rc * g_cr in the C->R backscatter SNR."""

    EQ21 = "eq21"  # eta * zeta
    APPENDIX_B = "appendix_b"  # (1-beta) zeta (1-theta) a1
    EQ35 = "eq35"  # (1-beta) zeta (1-theta)


class LognormalVariant(_StrEnum):
    AS_PRINTED = "as_printed"
    MOMENT_MATCHED = "moment_matched"


class Hop2Shape(_StrEnum):
    USE_N = "use_n"
    USE_M = "use_m"


class NoiseNormalization(_StrEnum):
    AS_PRINTED = "as_printed"
    INCLUDE = "include"


class ThroughputPrelog(_StrEnum):
    """Time fraction multiplying each link's delivered rate.

    ``time_split`` weights the main links and C->R by (1 - theta) and R->C by
    theta, i.e. by the phase in which each link carries information.
    """

    NONE = "none"
    TIME_SPLIT = "time_split"


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class SystemParams:
    """Every scalar the link model needs.

    Defaults are the reference operating point (N = M = 4, eta = 0.7,
    theta = 0.5, beta = 0.7, zeta = 0.3, U = 2, U_bs = 0.5) with a1/a2 =
    0.8/0.2, unit-mean channels and P_S = N0 = 1 (0 dB transmit SNR).

    ``beta`` is the power-splitting ratio routed to the backscatter
    interface, sometimes written rho.
    ``b1``/``b2`` default to ``a1``/``a2`` when left as ``None``.
    """

    p_s: float = 1.0
    n0: float = 1.0
    n_elems: int = 4
    m_elems: int = 4
    a1: float = 0.8
    a2: float = 0.2
    b1: Optional[float] = None
    b2: Optional[float] = None
    eta: float = 0.7
    theta: float = 0.5
    beta: float = 0.7
    zeta: float = 0.3
    lambda_sr: float = 1.0
    lambda_rd1: float = 1.0
    lambda_rd2: float = 1.0
    lambda_rc: float = 1.0
    lambda_cr: float = 1.0
    lambda_cd1: float = 1.0
    lambda_cd2: float = 1.0
    rate_main: float = 2.0
    rate_bs: float = 0.5
    gamma_th_d: Optional[float] = None
    gamma_th_c: Optional[float] = None
    threshold_mode: ThresholdMode = ThresholdMode.FROM_RATE
    eq15_variant: Eq15Variant = Eq15Variant.SIC_CORRECTED
    hop2_interference: Hop2Interference = Hop2Interference.ON
    cr_prefactor: CrPrefactor = CrPrefactor.EQ35
    lognormal_variant: LognormalVariant = LognormalVariant.MOMENT_MATCHED
    hop2_shape: Hop2Shape = Hop2Shape.USE_N
    noise_normalization: NoiseNormalization = NoiseNormalization.INCLUDE
    throughput_prelog: ThroughputPrelog = ThroughputPrelog.NONE

    _ENUMS = {
        "threshold_mode": ThresholdMode,
        "eq15_variant": Eq15Variant,
        "hop2_interference": Hop2Interference,
        "cr_prefactor": CrPrefactor,
        "lognormal_variant": LognormalVariant,
        "hop2_shape": Hop2Shape,
        "noise_normalization": NoiseNormalization,
        "throughput_prelog": ThroughputPrelog,
    }

    def __post_init__(self):
        # accept plain strings from config files
        for name, enum_cls in self._ENUMS.items():
            value = getattr(self, name)
            if not isinstance(value, enum_cls):
                object.__setattr__(self, name, enum_cls(value))

    @property
    def hop2_alloc(self) -> tuple[float, float]:
        """Second-hop power allocation (b1, b2)."""
        b1 = self.a1 if self.b1 is None else self.b1
        b2 = self.a2 if self.b2 is None else self.b2
        return b1, b2

    @property
    def hop2_elems(self) -> int:
        """Gamma shape used for the relay-to-user cascades."""
        return self.n_elems if self.hop2_shape is Hop2Shape.USE_N else self.m_elems

    @property
    def snr_db(self) -> float:
        return 10.0 * math.log10(self.p_s / self.n0)

    @property
    def harvest_gain(self) -> float:
        """P_R / (P_S g_sr) = (1-beta) eta theta / (1-theta)."""
        return (1.0 - self.beta) * self.eta * self.theta / (1.0 - self.theta)

    def replace(self, **changes: Any) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def with_snr_db(self, snr_db: float) -> "SystemParams":
        """Set P_S so that P_S / N0 equals ``snr_db``."""
        return self.replace(p_s=self.n0 * db_to_linear(snr_db))

    def to_dict(self) -> dict[str, Any]:
        out = {}
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            out[f.name] = v.value if isinstance(v, Enum) else v
        return out

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "SystemParams":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise KeyError(f"unknown parameter(s): {', '.join(unknown)}")
        return cls(**data)


@dataclass(frozen=True)
class Thresholds:
    """Linear SNR thresholds for the user links and the backscatter links."""

    gamma_th_d: float
    gamma_th_c: float

    def __post_init__(self):
        for name in ("gamma_th_d", "gamma_th_c"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0.0):
                raise ValueError(f"{name} must be finite and >= 0, got {v}")


def _finite(v: Any) -> bool:
    try:
        return math.isfinite(v)
    except TypeError:
        return False


def validate(params: SystemParams) -> list[str]:
    """Return every violated invariant; an empty list means the set is valid."""
    errs: list[str] = []

    numeric = [
        f.name
        for f in dataclasses.fields(params)
        if f.name not in SystemParams._ENUMS and getattr(params, f.name) is not None
    ]
    bad = [n for n in numeric if not _finite(getattr(params, n))]
    errs.extend(f"{n} is not a finite number" for n in bad)
    if bad:
        return errs

    tol = 1e-9
    a1, a2 = params.a1, params.a2
    if a1 < 0 or a2 < 0:
        errs.append("a1, a2 must be >= 0")
    if abs(a1 + a2 - 1.0) > tol:
        errs.append(f"a1+a2 != 1 (a1={a1}, a2={a2})")
    if (params.b1 is None) != (params.b2 is None):
        errs.append("b1 and b2 must both be set or both be omitted")
    elif params.b1 is not None:
        b1, b2 = params.b1, params.b2
        if b1 < 0 or b2 < 0:
            errs.append("b1, b2 must be >= 0")
        if abs(b1 + b2 - 1.0) > tol:
            errs.append(f"b1+b2 != 1 (b1={b1}, b2={b2})")

    if not 0.0 < params.theta < 1.0:
        errs.append(f"theta out of (0,1): {params.theta}")
    if not 0.0 <= params.beta < 1.0:
        errs.append(f"beta out of [0,1): {params.beta}")
    if not 0.0 < params.eta <= 1.0:
        errs.append(f"eta out of (0,1]: {params.eta}")
    if not 0.0 <= params.zeta <= 1.0:
        errs.append(f"zeta out of [0,1]: {params.zeta}")

    for name in ("p_s", "n0", "lambda_sr", "lambda_rd1", "lambda_rd2",
                 "lambda_rc", "lambda_cr", "lambda_cd1", "lambda_cd2"):
        if getattr(params, name) <= 0:
            errs.append(f"{name} must be > 0")
    for name in ("n_elems", "m_elems"):
        v = getattr(params, name)
        if v < 1 or int(v) != v:
            errs.append(f"{name} must be an integer >= 1, got {v}")
    for name in ("rate_main", "rate_bs"):
        if getattr(params, name) < 0:
            errs.append(f"{name} must be >= 0")

    if params.threshold_mode is ThresholdMode.EXPLICIT:
        for name in ("gamma_th_d", "gamma_th_c"):
            v = getattr(params, name)
            if v is None:
                errs.append(f"{name} required in explicit threshold mode")
            elif v < 0:
                errs.append(f"{name} must be >= 0")
    return errs


def resolve_thresholds(params: SystemParams) -> Thresholds:
    """Thresholds from the explicit fields or from 2^rate - 1."""
    if params.threshold_mode is ThresholdMode.EXPLICIT:
        if params.gamma_th_d is None or params.gamma_th_c is None:
            raise ValueError("explicit threshold mode needs gamma_th_d and gamma_th_c")
        return Thresholds(float(params.gamma_th_d), float(params.gamma_th_c))
    return Thresholds(
        gamma_th_d=math.expm1(params.rate_main * math.log(2.0)),
        gamma_th_c=math.expm1(params.rate_bs * math.log(2.0)),
    )


def legacy_params(params: SystemParams) -> SystemParams:
    """Same network with backscatter disabled: beta = 0 and zeta = 0."""
    return params.replace(beta=0.0, zeta=0.0)
