"""Outage and throughput analysis of a NOMA dual-IRS relay with backscatter links."""

__version__ = "0.1.0"

from .model import SystemParams, Thresholds, resolve_thresholds, validate  # noqa: E402
from .analytic import op_bs, op_cr, op_d1, op_d2, op_main, op_rc  # noqa: E402
from .mc import McConfig, estimate_outage, estimate_outages  # noqa: E402

__all__ = [
    "SystemParams", "Thresholds", "resolve_thresholds", "validate",
    "op_d1", "op_d2", "op_main", "op_rc", "op_cr", "op_bs",
    "McConfig", "estimate_outage", "estimate_outages",
]
