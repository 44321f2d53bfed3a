"""Seeded synthetic booking-curve generation and censoring.

All generators are pure functions of (parameters, seed).  Randomness comes
from counter-based Philox streams keyed as SeedSequence([seed, op_tag,
curve_index]), so per-curve generation is reproducible across platforms and
identical whether curves are drawn sequentially or in parallel.

Day convention: ``daily[j]`` is the booking count on the day (140 - j) days
before departure, i.e. position j=0 is the first day of the booking horizon
and j=139 the day before departure.  A constrained curve records bookings
normally up to (not including) position ``constrained_from``; from there on
the observed daily values are zero and the observed cumulative curve sits
flat at the censoring value ``limit``.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np

from .errors import WindowTooLong

__all__ = [
    "HORIZON",
    "BookingCurve",
    "RateCurve",
    "DppRates",
    "Scenario",
    "gen_exp1",
    "gen_exp2",
    "exp2_rates",
    "exp2_base_rate",
    "gen_dpp",
    "dpp_rates",
    "booking_day_density",
    "constrain_by_limits",
    "constrain_window",
    "gen_scenario",
    "save_curves",
    "load_curves",
]

HORIZON = 140

# op tags for RNG stream separation
_TAG_EXP1, _TAG_EXP2, _TAG_DPP, _TAG_LIMITS, _TAG_WINDOW, _TAG_SCENARIO = range(1, 7)


def _rng(seed: int, *stream) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def _tilde() -> np.ndarray:
    """Scaled day position over the full horizon, 0 at day 140, 1 at day 1."""
    return np.arange(HORIZON) / (HORIZON - 1.0)


@dataclass(frozen=True)
class BookingCurve:
    """One flight's daily bookings, optionally censored by a limit."""

    daily: np.ndarray
    limit: float | None = None
    constrained_from: int | None = None
    family: str | None = None

    def __post_init__(self):
        daily = np.asarray(self.daily)
        if daily.ndim != 1 or len(daily) == 0:
            raise ValueError("daily must be a non-empty vector")
        if np.any(daily < 0):
            raise ValueError("daily bookings must be non-negative")
        object.__setattr__(self, "daily", daily.astype(np.int64))
        if (self.limit is None) != (self.constrained_from is None):
            raise ValueError("limit and constrained_from must be set together")
        if self.constrained_from is not None:
            if not 0 <= self.constrained_from < len(daily):
                raise ValueError("constrained_from out of range")
            if self.limit < 0:
                raise ValueError("limit must be non-negative")

    @property
    def constrained(self) -> bool:
        return self.constrained_from is not None

    @cached_property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.daily)

    @property
    def total(self) -> int:
        return int(self.cumulative[-1])

    @cached_property
    def observed_daily(self) -> np.ndarray:
        if not self.constrained:
            return self.daily
        out = self.daily.copy()
        out[self.constrained_from:] = 0
        return out

    @cached_property
    def observed_cumulative(self) -> np.ndarray:
        if not self.constrained:
            return self.cumulative.astype(float)
        return np.minimum(self.cumulative.astype(float), self.limit)

    @property
    def prefix_total(self) -> float:
        """Cumulative bookings strictly before the constrained window."""
        cf = self.constrained_from
        if cf is None:
            return float(self.cumulative[-1])
        return float(self.cumulative[cf - 1]) if cf > 0 else 0.0


@dataclass(frozen=True)
class RateCurve:
    """A daily Poisson rate profile."""

    lam: np.ndarray
    family: str
    direction: str

    def __post_init__(self):
        lam = np.asarray(self.lam, float)
        object.__setattr__(self, "lam", lam)
        if np.any(lam <= 0):
            raise ValueError("rates must be strictly positive")


@dataclass(frozen=True)
class DppRates:
    """Booking-magnitude and inter-arrival-gap rates of a double process."""

    lam1: np.ndarray
    lam2: np.ndarray
    family: str = ""

    def __post_init__(self):
        if np.any(np.asarray(self.lam1) <= 0):
            raise ValueError("lam1 must be strictly positive")
        if np.any(np.asarray(self.lam2) < 0):
            raise ValueError("lam2 must be non-negative")


@dataclass(frozen=True)
class Scenario:
    """A changepoint demand curve plus its generating ground truth."""

    curve: BookingCurve
    changepoint: int
    rates: np.ndarray


# ---------------------------------------------------------------------------
# Experiment 1: piecewise-constant rates in 20-day blocks

_EXP1_BLOCKS = {
    "convex": np.arange(2, 9),
    "concave": np.arange(8, 1, -1),
    "homogeneous": np.full(7, 5),
}


def exp1_rate(shape: str) -> np.ndarray:
    if shape not in _EXP1_BLOCKS:
        raise ValueError("shape must be one of %s" % sorted(_EXP1_BLOCKS))
    return np.repeat(_EXP1_BLOCKS[shape].astype(float), HORIZON // 7)


def gen_exp1(shape: str, n: int, seed: int) -> list[BookingCurve]:
    """n independent curves with the block-constant rate profile."""
    lam = exp1_rate(shape)
    return [
        BookingCurve(daily=_rng(seed, _TAG_EXP1, i).poisson(lam), family=shape)
        for i in range(n)
    ]


# ---------------------------------------------------------------------------
# Experiment 2: smooth rate families with per-curve jitter
#
# Convex families follow eps + t^k and concave families their time reversal
# eps + (1-t)^k for degree k = 1, 2, 3, each rescaled to a 700 expected
# total.  Equal totals with different degrees concentrate very different
# shares of demand near departure (the convex tails over a 20-day window run
# roughly 25/34/41% of the total), which is what separates curve-level
# extrapolation from the population-pooling day-level baselines once the
# window is censored.  The eps floor keeps every rate strictly positive.
# Per-curve multiplicative jitter u ~ Uniform(0.85, 1.15) then sets the
# population sd: 700^2 * Var(u) plus Poisson noise gives sd ~= 66.

_EXP2_FAMILIES = ("linear", "quadratic", "cubic")
_EXP2_JITTER = (0.85, 1.15)
_EXP2_EPS = 0.05
EXP2_TARGET_TOTAL = 700.0


def exp2_base_rate(family: str, shape: str) -> np.ndarray:
    """Un-jittered daily rate for one family, normalized to total 700."""
    k = _EXP2_FAMILIES.index(family) + 1
    t = _tilde()
    if shape == "convex":
        base = _EXP2_EPS + t ** k
    elif shape == "concave":
        base = _EXP2_EPS + (1.0 - t) ** k
    else:
        raise ValueError("shape must be convex or concave")
    return base * (EXP2_TARGET_TOTAL / base.sum())


def exp2_rates(shape: str, seed: int, per_family: int = 30) -> list[RateCurve]:
    rates = []
    for fi, family in enumerate(_EXP2_FAMILIES):
        base = exp2_base_rate(family, shape)
        for j in range(per_family):
            rng = _rng(seed, _TAG_EXP2, fi * per_family + j)
            u = rng.uniform(*_EXP2_JITTER)
            rates.append(RateCurve(lam=u * base, family=family, direction=shape))
    return rates


def gen_exp2(shape: str, seed: int, per_family: int = 30) -> list[BookingCurve]:
    """30 linear + 30 quadratic + 30 cubic rate curves, one draw each."""
    curves = []
    for fi, family in enumerate(_EXP2_FAMILIES):
        base = exp2_base_rate(family, shape)
        for j in range(per_family):
            rng = _rng(seed, _TAG_EXP2, fi * per_family + j)
            u = rng.uniform(*_EXP2_JITTER)
            curves.append(BookingCurve(daily=rng.poisson(u * base), family=family))
    return curves


# ---------------------------------------------------------------------------
# Experiment 3: double Poisson process (sparse booking days)
#
# lam2 spaces the booking days (gaps shrink toward departure and the
# booking-day density saturates before the final weeks); lam1 sizes the
# bookings on those days.  The three sub-families share lam2 but differ in
# how sharply lam1 rises (phi + t^k with per-curve convexity jitter on k),
# so equal expected totals still concentrate very different demand shares
# near departure.  Each curve's lam1 is scaled against the exact expected
# booking-day density so the pre-promotion expected total matches the
# calibration target; the zero-redraw promotion on sparse early days then
# inflates realized totals to a population mean of ~182 with sd ~30.

_DPP_FAMILIES = (
    # family label, rate-shape exponent k, shape floor phi
    ("gentle", 1.0, 0.50),
    ("moderate", 2.0, 0.15),
    ("steep", 4.0, 0.06),
)
_DPP_LAM2 = (2.2, 2.5)        # lam2 = scale * (1 - t)^exponent
_DPP_JITTER = (0.60, 1.40)    # per-curve scale jitter on lam1
_DPP_SHAPE_JITTER = 0.35      # per-curve uniform jitter on the exponent k
_DPP_TARGET = 150.0           # expected pre-promotion total per curve


def _dpp_lam2() -> np.ndarray:
    scale, exponent = _DPP_LAM2
    return scale * (1.0 - _tilde()) ** exponent


def booking_day_density(lam2) -> np.ndarray:
    """Exact probability that each day books under the gap walk.

    Propagates the walk's position distribution forward: from position p a
    gap g ~ Poisson(lam2[p]) books the same day when g = 0 and day p+g+1
    otherwise, and the walk resumes one day after the booking.  Mass whose
    next booking day falls beyond the horizon leaves the walk.
    """
    lam2 = np.asarray(lam2, float)
    horizon = len(lam2)
    q = np.zeros(horizon + 1)
    q[0] = 1.0
    dens = np.zeros(horizon)
    for p in range(horizon):
        if q[p] == 0.0:
            continue
        lam = lam2[p]
        pmf = np.exp(-lam)
        same_day = q[p] * pmf
        dens[p] += same_day
        q[p + 1] += same_day
        for g in range(1, horizon - 1 - p):
            pmf = pmf * lam / g
            day = p + g + 1
            mass = q[p] * pmf
            dens[day] += mass
            if day + 1 < horizon:
                q[day + 1] += mass
    return dens


def _dpp_lam1(rng, k: float, phi: float, density: np.ndarray) -> np.ndarray:
    """One curve's jittered booking-size rate, density-normalized."""
    t = _tilde()
    u = rng.uniform(*_DPP_JITTER)
    ki = k + rng.uniform(-_DPP_SHAPE_JITTER, _DPP_SHAPE_JITTER)
    shape = phi + t ** ki
    return (_DPP_TARGET / (density * shape).sum()) * shape * u


def dpp_rates(seed: int, per_family: int = 30) -> list[DppRates]:
    lam2 = _dpp_lam2()
    density = booking_day_density(lam2)
    rates = []
    for fi, (family, k, phi) in enumerate(_DPP_FAMILIES):
        for j in range(per_family):
            rng = _rng(seed, _TAG_DPP, fi * per_family + j)
            rates.append(DppRates(lam1=_dpp_lam1(rng, k, phi, density),
                                  lam2=lam2, family=family))
    return rates


def _dpp_walk(lam1, lam2, rng) -> np.ndarray:
    """Walk the horizon drawing gaps from lam2 and bookings from lam1.

    From the current position a gap g ~ Poisson(lam2) pushes the next booking
    day g+1 days later (same day when g = 0).  A booking day draws
    Poisson(lam1); a zero is redrawn once and promoted to 1 if still zero, so
    designated booking days always book.
    """
    daily = np.zeros(HORIZON, np.int64)
    pos = 0
    while pos < HORIZON:
        g = int(rng.poisson(lam2[pos]))
        book = pos + g + 1 if g > 0 else pos
        if book >= HORIZON:
            break
        x = int(rng.poisson(lam1[book]))
        if x == 0:
            x = int(rng.poisson(lam1[book]))
            if x == 0:
                x = 1
        daily[book] = x
        pos = book + 1
    return daily


def gen_dpp(seed: int, per_family: int = 30) -> list[BookingCurve]:
    """90 sparse curves from three convexity sub-families of (lam1, lam2)."""
    lam2 = _dpp_lam2()
    density = booking_day_density(lam2)
    curves = []
    for fi, (family, k, phi) in enumerate(_DPP_FAMILIES):
        for j in range(per_family):
            rng = _rng(seed, _TAG_DPP, fi * per_family + j)
            lam1 = _dpp_lam1(rng, k, phi, density)
            curves.append(
                BookingCurve(daily=_dpp_walk(lam1, lam2, rng), family=family)
            )
    return curves


# ---------------------------------------------------------------------------
# censoring


def constrain_by_limits(curves, q: float, seed: int):
    """Censor curves with per-curve booking limits.

    Limits are drawn from Normal(mu_b, sd_b) with mu_b the empirical (1-q)
    quantile of the curve totals and sd_b their standard deviation, truncated
    below at 1.  A curve is constrained iff its total exceeds its limit;
    censoring starts the first day the cumulative exceeds the limit.  If the
    realized constrained fraction misses q by more than 10 percentage points
    the limits are redrawn once.

    Returns (curves, realized fraction).
    """
    if not 0.0 < q < 1.0:
        raise ValueError("q must be in (0, 1)")
    totals = np.array([c.total for c in curves], float)
    mu_b = np.quantile(totals, 1.0 - q)
    sd_b = totals.std()
    rng = _rng(seed, _TAG_LIMITS)
    for _ in range(2):
        limits = np.maximum(rng.normal(mu_b, sd_b, len(curves)), 1.0)
        frac = float(np.mean(totals > limits))
        if abs(frac - q) <= 0.10:
            break
    out = []
    for curve, b in zip(curves, limits):
        if curve.total > b:
            cf = int(np.argmax(curve.cumulative > b))
            out.append(replace(curve, limit=float(b), constrained_from=cf))
        else:
            out.append(curve)
    return out, frac


def constrain_window(curves, k_days: int, m: int, seed: int,
                     family_size: int = 30):
    """Censor the final k_days of m randomly chosen curves per rate family.

    The censoring value is the cumulative total on the last observed day, so
    the observed curve sits flat over the whole window.  Curves without a
    family label are grouped into consecutive blocks of ``family_size``.
    """
    if k_days == 0:
        return list(curves)
    if k_days >= HORIZON:
        raise WindowTooLong("k_days=%d leaves no observed days" % k_days)
    if k_days < 0:
        raise ValueError("k_days must be non-negative")
    groups: dict = {}
    for i, c in enumerate(curves):
        key = c.family if c.family is not None else i // family_size
        groups.setdefault(key, []).append(i)
    rng = _rng(seed, _TAG_WINDOW)
    chosen = []
    for key in groups:
        idx = groups[key]
        if m > len(idx):
            raise ValueError("cannot sample %d of %d curves in family %r" % (m, len(idx), key))
        pick = rng.choice(len(idx), size=m, replace=False)
        chosen.extend(idx[j] for j in sorted(pick))
    cf = HORIZON - k_days
    out = list(curves)
    for i in chosen:
        curve = curves[i]
        value = float(curve.cumulative[cf - 1])
        out[i] = replace(curve, limit=value, constrained_from=cf)
    return out


# ---------------------------------------------------------------------------
# changepoint scenarios

SCENARIO_CHANGEPOINT = int(0.6 * HORIZON)  # position 84


def scenario_rates(scenario_id: int) -> np.ndarray:
    xc = SCENARIO_CHANGEPOINT
    lam = np.empty(HORIZON)
    if scenario_id == 1:
        lam[:xc] = 2.0
        lam[xc:] = 8.0
    elif scenario_id == 2:
        lam[:xc] = 8.0
        lam[xc:] = 2.0
    elif scenario_id == 3:
        j = np.arange(xc, dtype=float)
        lam[:xc] = 0.5 + 9.5 * (j / (xc - 1)) ** 2
        lam[xc:] = 1.5
    else:
        raise ValueError("scenario id must be 1, 2 or 3")
    return lam


def gen_scenario(scenario_id: int, seed: int) -> Scenario:
    """One demand curve with a known rate regime change at 60% of horizon."""
    lam = scenario_rates(scenario_id)
    rng = _rng(seed, _TAG_SCENARIO, scenario_id)
    return Scenario(
        curve=BookingCurve(daily=rng.poisson(lam), family="scenario%d" % scenario_id),
        changepoint=SCENARIO_CHANGEPOINT,
        rates=lam,
    )


# ---------------------------------------------------------------------------
# serialization

_CSV_COLUMNS = ("curve_id", "day_before_departure", "daily_bookings",
                "cumulative", "limit", "constrained_from")


def save_curves(path, curves) -> None:
    """Write curves as long-format CSV, one row per (curve, day)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(_CSV_COLUMNS)
        for cid, curve in enumerate(curves):
            cum = curve.cumulative
            limit = "" if curve.limit is None else repr(float(curve.limit))
            cf = ("" if curve.constrained_from is None
                  else str(len(curve.daily) - curve.constrained_from))
            for j, (d, c) in enumerate(zip(curve.daily, cum)):
                writer.writerow(
                    [cid, len(curve.daily) - j, int(d), int(c), limit, cf]
                )


def load_curves(path) -> list[BookingCurve]:
    by_curve: dict = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            rec = by_curve.setdefault(int(row["curve_id"]), {"daily": {}, "limit": None, "cf": None})
            day = int(row["day_before_departure"])
            rec["daily"][day] = int(row["daily_bookings"])
            if row["limit"]:
                rec["limit"] = float(row["limit"])
            if row["constrained_from"]:
                rec["cf"] = int(row["constrained_from"])
    curves = []
    for cid in sorted(by_curve):
        rec = by_curve[cid]
        days = sorted(rec["daily"], reverse=True)
        daily = np.array([rec["daily"][d] for d in days], np.int64)
        cf = None if rec["cf"] is None else len(daily) - rec["cf"]
        curves.append(BookingCurve(daily=daily, limit=rec["limit"], constrained_from=cf))
    return curves
