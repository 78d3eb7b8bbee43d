"""Earned-value metrics, S-curves, quantity reconciliation, and MAPE."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import SiteTwinError


class ZeroDenominator(SiteTwinError):
    pass


class ZeroPlanned(SiteTwinError):
    pass


class UnsortedPeriods(SiteTwinError):
    pass


class LengthMismatch(SiteTwinError):
    pass


class ZeroActual(SiteTwinError):
    pass


@dataclass(frozen=True)
class EvmPoint:
    period: int
    pv: float
    ev: float
    ac: float

    def __post_init__(self):
        if min(self.pv, self.ev, self.ac) < 0:
            raise ValueError("pv, ev, ac must be >= 0")


@dataclass(frozen=True)
class EvmMetrics:
    spi: float
    cpi: float
    sv_pct: float
    cv_pct: float


@dataclass(frozen=True)
class QuantityRecord:
    work_package: str
    planned: float
    measured: float
    variance_pct: float


def compute_metrics(point: EvmPoint) -> EvmMetrics:
    """SPI/CPI ratios and signed variance percents for one (cumulative) point.

    cv_pct is relative to EV: (ev - ac) / ev * 100. Values are unrounded;
    rounding is presentation's job.
    """
    if point.pv <= 0 or point.ac <= 0 or point.ev <= 0:
        raise ZeroDenominator(f"period {point.period}: pv, ev, ac must all be > 0")
    spi = point.ev / point.pv
    cpi = point.ev / point.ac
    sv_pct = (point.ev - point.pv) / point.pv * 100.0
    cv_pct = (point.ev - point.ac) / point.ev * 100.0
    return EvmMetrics(spi=spi, cpi=cpi, sv_pct=sv_pct, cv_pct=cv_pct)


def reconcile(planned: float, measured: float, work_package: str = "") -> QuantityRecord:
    """Signed variance percent of measured vs planned quantity."""
    if planned <= 0:
        raise ZeroPlanned(f"{work_package or 'quantity'}: planned must be > 0")
    variance = (measured - planned) / planned * 100.0
    return QuantityRecord(work_package=work_package, planned=planned,
                          measured=measured, variance_pct=variance)


def s_curves(points) -> dict:
    """Cumulative PV/EV/AC series plus the first period where EV >= PV.

    Input points are per-period increments; periods must strictly increase.
    ``crossover`` is None when cumulative EV never reaches cumulative PV.
    """
    periods = [p.period for p in points]
    if any(b <= a for a, b in zip(periods, periods[1:])):
        raise UnsortedPeriods("periods must be strictly increasing")
    pv = ev = ac = 0.0
    out = {"periods": [], "pv": [], "ev": [], "ac": [], "crossover": None}
    for p in points:
        pv += p.pv
        ev += p.ev
        ac += p.ac
        out["periods"].append(p.period)
        out["pv"].append(pv)
        out["ev"].append(ev)
        out["ac"].append(ac)
        if out["crossover"] is None and pv > 0 and ev >= pv:
            out["crossover"] = p.period
    return out


def mape(forecasts, actuals) -> float:
    """Mean absolute percentage error, in percent."""
    if len(forecasts) != len(actuals):
        raise LengthMismatch(f"{len(forecasts)} forecasts vs {len(actuals)} actuals")
    if len(forecasts) == 0:
        raise LengthMismatch("need at least one pair")
    total = 0.0
    for f, a in zip(forecasts, actuals):
        if a == 0:
            raise ZeroActual("actual value of 0 has no percentage error")
        total += abs(f - a) / abs(a)
    return total / len(forecasts) * 100.0
