"""Declarative parameter sweeps and the CSV tables they produce."""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

from . import __version__
from . import analytic as an
from .channel import derive_stream
from .mc import Link, McConfig, estimate_outages, estimate_throughput
from .model import (
    SystemParams,
    ThresholdMode,
    ThroughputPrelog,
    resolve_thresholds,
    validate,
)

__all__ = [
    "OUTPUTS",
    "AXES",
    "SweepSpec",
    "SweepTable",
    "grid",
    "apply_setting",
    "run_sweep",
    "preset",
    "PRESETS",
    "format_number",
]

OUTPUTS = ("op_d1", "op_d2", "op_main", "op_rc", "op_cr", "op_bs",
           "tp_main", "tp_bs", "tp_legacy")

_PARAM_FIELDS = {
    f.name for f in dataclasses.fields(SystemParams) if f.name not in SystemParams._ENUMS
}
# pseudo-axes on top of the plain parameter fields
AXES = sorted(_PARAM_FIELDS | {"snr_db", "elements", "rate"})


def grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive arithmetic grid, robust to float accumulation."""
    if step == 0 or (stop - start) / step < 0:
        raise ValueError(f"bad grid {start}:{stop}:{step}")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(n))


def apply_setting(params: SystemParams, name: str, value: Any) -> SystemParams:
    """Return ``params`` with one axis setting applied."""
    if name == "snr_db":
        return params.with_snr_db(value)
    if name == "elements":
        return params.replace(n_elems=int(value), m_elems=int(value))
    if name == "rate":
        return params.replace(rate_main=value, rate_bs=value)
    if name in ("gamma_th_d", "gamma_th_c"):
        thr = resolve_thresholds(params)
        fixed = {"gamma_th_d": thr.gamma_th_d, "gamma_th_c": thr.gamma_th_c, name: value}
        return params.replace(threshold_mode=ThresholdMode.EXPLICIT, **fixed)
    if name in ("n_elems", "m_elems"):
        return params.replace(**{name: int(value)})
    if name in _PARAM_FIELDS:
        return params.replace(**{name: value})
    raise KeyError(f"unknown axis {name!r}")


@dataclass(frozen=True)
class SweepSpec:
    base: SystemParams
    axis: str
    values: tuple[float, ...]
    outputs: tuple[str, ...]
    mc: McConfig = McConfig(trials=100_000)
    secondary: tuple[dict, ...] = ()
    include_analytic: bool = True
    include_mc: bool = True

    def check(self) -> None:
        if self.axis not in AXES:
            raise KeyError(f"unknown axis {self.axis!r}")
        if not self.values:
            raise ValueError("axis has no values")
        d = [b - a for a, b in zip(self.values, self.values[1:])]
        if not (all(x > 0 for x in d) or all(x < 0 for x in d)):
            raise ValueError("axis values must be strictly monotone")
        if not self.outputs:
            raise ValueError("at least one output required")
        bad = [o for o in self.outputs if o not in OUTPUTS]
        if bad:
            raise ValueError(f"unknown output(s): {bad}")
        for s in self.secondary:
            for k in s:
                if k not in AXES:
                    raise KeyError(f"unknown secondary axis {k!r}")
        errs = validate(self.base)
        if errs:
            raise ValueError("invalid base parameters: " + "; ".join(errs))

    def points(self) -> list[tuple[dict, float, SystemParams]]:
        """Grid in row order: secondary settings outer, axis inner."""
        out = []
        for sec in self.secondary or ({},):
            p = self.base
            for k, v in sec.items():
                p = apply_setting(p, k, v)
            for x in self.values:
                out.append((sec, x, apply_setting(p, self.axis, x)))
        return out

    def to_dict(self) -> dict:
        mc = dataclasses.asdict(self.mc)
        mc.pop("workers")
        return {
            "base": self.base.to_dict(),
            "axis": self.axis,
            "values": list(self.values),
            "secondary": [dict(s) for s in self.secondary],
            "outputs": list(self.outputs),
            "mc": mc,
            "include_analytic": self.include_analytic,
            "include_mc": self.include_mc,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "SweepSpec":
        return cls(
            base=SystemParams.from_dict(d["base"]),
            axis=d["axis"],
            values=tuple(d["values"]),
            outputs=tuple(d["outputs"]),
            mc=McConfig(**d["mc"]),
            secondary=tuple(d.get("secondary", ())),
            include_analytic=d.get("include_analytic", True),
            include_mc=d.get("include_mc", True),
        )


def format_number(x: Any) -> str:
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, int)):
        return str(int(x))
    return format(float(x), ".17g")


@dataclass
class SweepTable:
    columns: list[str]
    rows: list[list[Any]]
    metadata: dict = field(default_factory=dict)

    def column(self, name: str) -> list[Any]:
        i = self.columns.index(name)
        return [r[i] for r in self.rows]

    def select(self, **where: Any) -> "SweepTable":
        """Rows whose named columns equal the given values."""
        idx = [(self.columns.index(k), v) for k, v in where.items()]
        rows = [r for r in self.rows if all(r[i] == v for i, v in idx)]
        return SweepTable(list(self.columns), rows, self.metadata)

    def to_csv(self, fh=None) -> str:
        buf = io.StringIO()
        meta = json.dumps(self.metadata, sort_keys=True, indent=1).splitlines()
        for line in meta:
            buf.write("# " + line + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([format_number(x) for x in r])
        text = buf.getvalue()
        if fh is not None:
            fh.write(text)
        return text

    @classmethod
    def from_csv(cls, text: str) -> "SweepTable":
        lines = text.splitlines()
        meta_lines = [ln[2:] for ln in lines if ln.startswith("# ")]
        body = [ln for ln in lines if not ln.startswith("#")]
        metadata = json.loads("\n".join(meta_lines)) if meta_lines else {}
        reader = csv.reader(body)
        columns = next(reader)
        rows = []
        for rec in reader:
            rows.append([_parse_cell(c) for c in rec])
        return cls(columns, rows, metadata)


def _parse_cell(c: str) -> Any:
    try:
        return float(c)
    except ValueError:
        return c


def _columns(spec: SweepSpec) -> list[str]:
    cols = [spec.axis]
    for s in spec.secondary:
        cols.extend(k for k in s if k not in cols)
    for o in spec.outputs:
        if spec.include_analytic:
            cols.append(f"{o}_analytic")
            if o in ("op_main", "op_bs"):
                cols.append(f"{o}_clamped_analytic")
        if spec.include_mc:
            cols += [f"{o}_mc", f"{o}_ci"]
            if o == "op_main":
                cols.append("op_main_joint_mc")
    cols.append("flags")
    return cols


def _analytic_values(o: str, p: SystemParams, thr) -> list[float]:
    if o == "op_d1":
        return [an.op_d1(p, thr).total]
    if o == "op_d2":
        return [an.op_d2(p, thr).total]
    if o == "op_main":
        m = an.op_main(p, thr)
        return [m.raw, m.clamped]
    if o == "op_bs":
        m = an.op_bs(p, thr)
        return [m.raw, m.clamped]
    if o == "op_rc":
        return [an.op_rc(p, thr)]
    if o == "op_cr":
        return [an.op_cr(p, thr)]
    if o == "tp_main":
        return [an.throughput_main(p, thr)]
    if o == "tp_bs":
        return [an.throughput_bs(p, thr)]
    return [an.throughput_legacy(p, thr)]


def _mc_values(o: str, p, thr, mc, stream, outages) -> list[float]:
    if o in ("op_d1", "op_d2", "op_rc", "op_cr"):
        r = outages[Link(o[3:])]
        return [r.estimate, r.ci_halfwidth]
    if o == "op_main":
        r = outages[Link.MAIN]
        return [r.raw, r.ci_halfwidth, r.joint_both]
    if o == "op_bs":
        rc, cr = outages[Link.RC], outages[Link.CR]
        return [rc.estimate + cr.estimate, math.hypot(rc.ci_halfwidth, cr.ci_halfwidth)]
    system = o[3:]
    t = estimate_throughput(p, thr, system, mc, stream,
                            outages=None if system == "legacy" else outages)
    return [t.value, t.ci_halfwidth]


def _evaluate(spec: SweepSpec, index: int, sec: dict, x: float, p: SystemParams) -> list:
    errs = validate(p)
    if errs:
        raise ValueError(f"grid point {index} ({spec.axis}={x}): " + "; ".join(errs))
    thr = resolve_thresholds(p)
    row: list[Any] = [x]
    seen = [spec.axis]
    for s in spec.secondary:
        for k in s:
            if k not in seen:
                seen.append(k)
                row.append(sec.get(k, ""))
    mc = dataclasses.replace(spec.mc, workers=1)
    stream = derive_stream(spec.mc.seed, index)
    outages = estimate_outages(p, thr, mc, stream) if spec.include_mc else None
    for o in spec.outputs:
        if spec.include_analytic:
            row.extend(_analytic_values(o, p, thr))
        if spec.include_mc:
            row.extend(_mc_values(o, p, thr, mc, stream, outages))
    row.append(";".join(an.boundary_flags(p, thr)))
    return row


def run_sweep(spec: SweepSpec) -> SweepTable:
    """Evaluate every grid point; row order is grid order whatever the workers."""
    spec.check()
    pts = spec.points()
    jobs = [(spec, i, sec, x, p) for i, (sec, x, p) in enumerate(pts)]
    if spec.mc.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.mc.workers) as pool:
            rows = list(pool.map(lambda j: _evaluate(*j), jobs))
    else:
        rows = [_evaluate(*j) for j in jobs]
    metadata = {"tool": "dualirs", "version": __version__, "spec": spec.to_dict()}
    return SweepTable(_columns(spec), rows, metadata)


# operating SNRs chosen for the throughput and element-count presets
THROUGHPUT_SNR_DB = 5.0
OP_VS_ELEMENTS_SNR_DB = 20.0

PRESETS = ("fig3", "fig4", "fig5", "fig6", "fig7")


def preset(name: str, mc: Optional[McConfig] = None) -> SweepSpec:
    """Named sweep preset.

    fig3-fig5 (throughput) run at ``THROUGHPUT_SNR_DB`` with the time-split
    prelog; fig7 runs at ``OP_VS_ELEMENTS_SNR_DB``.
    """
    mc = McConfig(trials=100_000) if mc is None else mc
    base = SystemParams()
    tp_base = base.with_snr_db(THROUGHPUT_SNR_DB).replace(
        throughput_prelog=ThroughputPrelog.TIME_SPLIT)
    tps = ("tp_main", "tp_bs", "tp_legacy")
    ops = ("op_d1", "op_d2", "op_main", "op_rc", "op_cr", "op_bs")
    if name == "fig3":
        return SweepSpec(tp_base, "rate", grid(0.25, 6.0, 0.25), tps, mc)
    if name == "fig4":
        return SweepSpec(tp_base, "theta", grid(0.05, 0.95, 0.05), tps, mc)
    if name == "fig5":
        return SweepSpec(tp_base, "beta", grid(0.05, 0.95, 0.05), tps, mc)
    if name == "fig6":
        sec = ({"n_elems": 4, "m_elems": 4}, {"n_elems": 8, "m_elems": 8})
        return SweepSpec(base, "snr_db", grid(0.0, 40.0, 2.5), ops, mc, secondary=sec)
    if name == "fig7":
        b = base.with_snr_db(OP_VS_ELEMENTS_SNR_DB)
        return SweepSpec(b, "elements", grid(2, 16, 1), ops, mc,
                         secondary=({"zeta": 0.3}, {"zeta": 0.5}))
    raise KeyError(f"unknown preset {name!r}; choose from {', '.join(PRESETS)}")
