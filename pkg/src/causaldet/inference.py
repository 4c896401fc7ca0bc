"""Inverse problem: from a measured causal determinant to structure claims.

A determinant above 1/27 cannot come from a shared state alone, so it
witnesses a direct-cause contribution; below -1/27 it witnesses a common
cause.  Under a pure direct-cause hypothesis the value also lower-bounds the
number of unitary terms.  With a boundary table, the feasible mixing
probabilities are read off by inverting the curves.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Union

from .bounds import BoundaryTable

DIRECT_THRESHOLD = 1.0 / 27.0
COMMON_THRESHOLD = -1.0 / 27.0

YES = "yes"
UNDETERMINED = "undetermined"
NOT_PURE_DC = "not pure DC possible"
INFEASIBLE = "infeasible"

# default slack when inverting a boundary table, matching the containment
# tolerance guaranteed by the sampling oracle
P_RANGE_SLACK = 1e-6


@dataclass(frozen=True)
class InferenceReport:
    """Conclusions drawn from one determinant value (optionally with a ci)."""

    delta: float
    ci: Optional[tuple[float, float]]
    direct_cause_present: str
    common_cause_present: str
    ndc_min_pure_dc: Union[int, str]
    p_feasible: Optional[dict[int, Union[tuple[float, float], str]]] = None
    resolution: Optional[float] = None

    def to_json(self) -> dict:
        p_feasible = None
        if self.p_feasible is not None:
            p_feasible = {
                str(cls): (list(v) if isinstance(v, tuple) else v)
                for cls, v in self.p_feasible.items()
            }
        return {
            "delta": self.delta,
            "ci": list(self.ci) if self.ci is not None else None,
            "direct_cause_present": self.direct_cause_present,
            "common_cause_present": self.common_cause_present,
            "ndc_min_pure_dc": self.ndc_min_pure_dc,
            "p_feasible": p_feasible,
            "resolution": self.resolution,
            "thresholds": {"direct": DIRECT_THRESHOLD, "common": COMMON_THRESHOLD},
        }


def _check_delta(delta: float) -> float:
    delta = float(delta)
    if not -1.0 <= delta <= 1.0:
        raise ValueError(f"determinant must lie in [-1, 1], got {delta!r}")
    return delta


def classify(delta: float, ci: Optional[tuple[float, float]] = None) -> InferenceReport:
    """Presence claims and the pure-direct-cause term bound for one value.

    With a confidence interval, presence claims use its conservative end: the
    low end must clear 1/27 to assert a direct cause, the high end must fall
    below -1/27 to assert a common cause.
    """
    delta = _check_delta(delta)
    if ci is not None:
        lo, hi = float(ci[0]), float(ci[1])
        if not lo <= delta <= hi:
            raise ValueError(f"point estimate {delta!r} outside its interval [{lo!r}, {hi!r}]")
        ci = (lo, hi)
    ev_lo = ci[0] if ci is not None else delta
    ev_hi = ci[1] if ci is not None else delta
    direct = YES if ev_lo > DIRECT_THRESHOLD else UNDETERMINED
    common = YES if ev_hi < COMMON_THRESHOLD else UNDETERMINED

    ndc_min: Union[int, str]
    if delta == 1.0:
        ndc_min = 1
    elif delta >= 0.0:
        ndc_min = 2
    elif delta >= COMMON_THRESHOLD:
        ndc_min = 3
    else:
        ndc_min = NOT_PURE_DC
    return InferenceReport(
        delta=delta,
        ci=ci,
        direct_cause_present=direct,
        common_cause_present=common,
        ndc_min_pure_dc=ndc_min,
    )


def p_range(
    delta: float,
    ndc_class: int,
    table: BoundaryTable,
    slack: float = P_RANGE_SLACK,
) -> Optional[tuple[float, float]]:
    """Mixing probabilities whose boundary interval contains `delta`.

    Scans the table with linear interpolation between grid points and returns
    the hull of the feasible set, or None when it is empty.  `slack` widens
    the curves to absorb optimizer precision.
    """
    delta = _check_delta(delta)
    if table.ndc_class != ndc_class:
        raise ValueError(
            f"table is for class {table.ndc_class}, asked about class {ndc_class}"
        )
    grid = table.p_grid
    lower = table.lower - slack
    upper = table.upper + slack
    lo_hit = None
    hi_hit = None
    for i in range(len(grid) - 1):
        p0, p1 = float(grid[i]), float(grid[i + 1])
        span = p1 - p0
        s_lo, s_hi = 0.0, 1.0
        for c0, c1, kind in (
            (float(lower[i]), float(lower[i + 1]), "lower"),
            (float(upper[i]), float(upper[i + 1]), "upper"),
        ):
            # feasible where lower(p) <= delta (kind lower) or upper(p) >= delta
            g0 = delta - c0 if kind == "lower" else c0 - delta
            g1 = delta - c1 if kind == "lower" else c1 - delta
            if g0 >= 0.0 and g1 >= 0.0:
                continue
            if g0 < 0.0 and g1 < 0.0:
                s_lo, s_hi = 1.0, 0.0
                break
            crossing = g0 / (g0 - g1)
            if g0 < 0.0:
                s_lo = max(s_lo, crossing)
            else:
                s_hi = min(s_hi, crossing)
        if s_lo <= s_hi:
            a = p0 + s_lo * span
            b = p0 + s_hi * span
            lo_hit = a if lo_hit is None else min(lo_hit, a)
            hi_hit = b if hi_hit is None else max(hi_hit, b)
    if lo_hit is None:
        return None
    return (lo_hit, hi_hit)


def report(
    delta: float,
    ci: Optional[tuple[float, float]] = None,
    tables: Optional[Mapping[int, BoundaryTable]] = None,
    slack: float = P_RANGE_SLACK,
) -> InferenceReport:
    """classify() plus, when boundary tables are given, the feasible mixing
    probability per channel class."""
    base = classify(delta, ci)
    if tables is None:
        return base
    p_feasible: dict[int, Union[tuple[float, float], str]] = {}
    resolution = 0.0
    for cls in sorted(tables):
        interval = p_range(delta, cls, tables[cls], slack=slack)
        p_feasible[cls] = interval if interval is not None else INFEASIBLE
        resolution = max(resolution, tables[cls].resolution)
    return InferenceReport(
        delta=base.delta,
        ci=base.ci,
        direct_cause_present=base.direct_cause_present,
        common_cause_present=base.common_cause_present,
        ndc_min_pure_dc=base.ndc_min_pure_dc,
        p_feasible=p_feasible,
        resolution=resolution,
    )
