"""Measurement statistics for detector output.

Everything here is closed-form or seed-pinned: Wilson score intervals
for binomial rates, detector agreement matrices, stratified precision
with population-weighted true-positive estimates, percentile bootstrap
intervals, per-period prevalence, and rate-times-volume extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist
from typing import Iterable, Mapping, Sequence

import numpy as np

from ghostink.errors import EmptyInputError, InvalidCountsError, MissingVolumeError


def _z_value(confidence: float) -> float:
    if not 0.0 < confidence < 1.0:
        raise InvalidCountsError(f"confidence must be in (0, 1), got {confidence}")
    return NormalDist().inv_cdf((1.0 + confidence) / 2.0)


def wilson_interval(
    successes: int, trials: int, confidence: float = 0.95
) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion.

    Behaves sensibly at the boundaries: zero successes still yields a
    positive upper bound, and the interval never leaves [0, 1] beyond
    floating-point noise.
    """
    if trials <= 0:
        raise InvalidCountsError(f"trials must be positive, got {trials}")
    if not 0 <= successes <= trials:
        raise InvalidCountsError(
            f"successes must be within [0, {trials}], got {successes}"
        )
    z = _z_value(confidence)
    n = float(trials)
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = (z / denom) * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n))
    return (center - half, center + half)


@dataclass(frozen=True, slots=True)
class AgreementMatrix:
    """2x2 contingency table over paired boolean detector verdicts."""

    both_flagged: int
    first_only: int
    second_only: int
    neither: int
    first: str = "hcd"
    second: str = "vda"

    def __post_init__(self) -> None:
        for name in ("both_flagged", "first_only", "second_only", "neither"):
            if getattr(self, name) < 0:
                raise InvalidCountsError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.both_flagged + self.first_only + self.second_only + self.neither

    @property
    def neither_fraction(self) -> float:
        if self.total == 0:
            raise EmptyInputError("agreement matrix has no observations")
        return self.neither / self.total

    @property
    def agreement_fraction(self) -> float:
        if self.total == 0:
            raise EmptyInputError("agreement matrix has no observations")
        return (self.both_flagged + self.neither) / self.total

    def flagged_by(self, detector: str) -> int:
        if detector == self.first:
            return self.both_flagged + self.first_only
        if detector == self.second:
            return self.both_flagged + self.second_only
        raise KeyError(detector)

    def to_dict(self) -> dict:
        return {
            "detectors": [self.first, self.second],
            "both_flagged": self.both_flagged,
            "first_only": self.first_only,
            "second_only": self.second_only,
            "neither": self.neither,
            "total": self.total,
            "neither_fraction": self.neither_fraction,
            "agreement_fraction": self.agreement_fraction,
        }


def agreement_matrix(
    pairs: Iterable[tuple[bool, bool]],
    first: str = "hcd",
    second: str = "vda",
) -> AgreementMatrix:
    """Tally paired verdicts (first detector, second detector)."""
    counts = {(True, True): 0, (True, False): 0, (False, True): 0, (False, False): 0}
    for a, b in pairs:
        counts[(bool(a), bool(b))] += 1
    matrix = AgreementMatrix(
        both_flagged=counts[(True, True)],
        first_only=counts[(True, False)],
        second_only=counts[(False, True)],
        neither=counts[(False, False)],
        first=first,
        second=second,
    )
    if matrix.total == 0:
        raise EmptyInputError("no verdict pairs supplied")
    return matrix


@dataclass(frozen=True, slots=True)
class Stratum:
    """One audit stratum: a flagged population, the audited sample from
    it, and how many audited items were true positives."""

    name: str
    population: int
    sampled: int
    true_positives: int

    def __post_init__(self) -> None:
        if self.population < 0:
            raise InvalidCountsError("population must be non-negative")
        if not 0 <= self.sampled <= self.population:
            raise InvalidCountsError(
                f"sampled must be within [0, {self.population}], got {self.sampled}"
            )
        if not 0 <= self.true_positives <= self.sampled:
            raise InvalidCountsError(
                f"true_positives must be within [0, {self.sampled}], "
                f"got {self.true_positives}"
            )

    @property
    def sample_precision(self) -> float:
        if self.sampled == 0:
            raise EmptyInputError(f"stratum {self.name!r} has no audited items")
        return self.true_positives / self.sampled

    @property
    def estimated_true_positives(self) -> float:
        """Population true positives under the audited-rate projection."""
        return self.population * self.sample_precision

    @property
    def is_census(self) -> bool:
        return self.sampled == self.population


@dataclass(frozen=True, slots=True)
class StratifiedPrecision:
    strata: tuple[Stratum, ...]
    estimated_true_positives: float
    flagged_population: int
    precision: float

    def to_dict(self) -> dict:
        return {
            "strata": [
                {
                    "name": s.name,
                    "population": s.population,
                    "sampled": s.sampled,
                    "true_positives": s.true_positives,
                    "sample_precision": s.sample_precision,
                    "estimated_true_positives": s.estimated_true_positives,
                }
                for s in self.strata
            ],
            "estimated_true_positives": self.estimated_true_positives,
            "flagged_population": self.flagged_population,
            "precision": self.precision,
        }


def stratified_precision(strata: Sequence[Stratum]) -> StratifiedPrecision:
    """Population precision from per-stratum audits.

    Each stratum's audited true-positive rate is projected onto its full
    population; the overall precision is the summed estimate divided by
    the total flagged population.
    """
    strata = tuple(strata)
    if not strata:
        raise EmptyInputError("no strata supplied")
    total_population = sum(s.population for s in strata)
    if total_population == 0:
        raise EmptyInputError("strata cover an empty population")
    estimated = sum(s.estimated_true_positives for s in strata)
    return StratifiedPrecision(
        strata=strata,
        estimated_true_positives=estimated,
        flagged_population=total_population,
        precision=estimated / total_population,
    )


def bootstrap_precision_interval(
    strata: Sequence[Stratum],
    iterations: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap for the stratified precision.

    Audited samples are resampled with replacement within each stratum.
    A census stratum (every flagged item audited) has no sampling
    variance, so its contribution is held fixed rather than resampled.
    """
    strata = tuple(strata)
    point = stratified_precision(strata)  # validates inputs
    if iterations <= 0:
        raise InvalidCountsError("iterations must be positive")
    z_check = _z_value(confidence)  # validates confidence
    del z_check

    rng = np.random.default_rng(seed)
    total_population = point.flagged_population
    fixed = sum(
        s.estimated_true_positives for s in strata if s.is_census
    )
    variable = [s for s in strata if not s.is_census]

    samples = np.empty(iterations, dtype=np.float64)
    for it in range(iterations):
        estimated = fixed
        for s in variable:
            resampled = rng.binomial(s.sampled, s.sample_precision)
            estimated += s.population * (resampled / s.sampled)
        samples[it] = estimated / total_population

    alpha = (1.0 - confidence) / 2.0 * 100.0
    lo, hi = np.percentile(samples, [alpha, 100.0 - alpha])
    return (float(lo), float(hi))


def weighted_rate(
    values: Sequence[float], weights: Sequence[float] | None = None
) -> float:
    """Weighted mean of indicator values; uniform weights reduce it to
    the plain fraction."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("no values supplied")
    if weights is None:
        return float(values.sum() / values.size)
    weights = np.asarray(weights, dtype=np.float64)
    if weights.shape != values.shape:
        raise InvalidCountsError("weights must match values in length")
    if (weights < 0).any():
        raise InvalidCountsError("weights must be non-negative")
    total = weights.sum()
    if total <= 0:
        raise InvalidCountsError("weights sum to zero")
    return float((values * weights).sum() / total)


def bootstrap_rate_interval(
    values: Sequence[float],
    weights: Sequence[float] | None = None,
    iterations: int = 1000,
    confidence: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap for a (weighted) rate over observations."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise EmptyInputError("no values supplied")
    if iterations <= 0:
        raise InvalidCountsError("iterations must be positive")
    _z_value(confidence)
    if weights is None:
        weights = np.ones_like(values)
    else:
        weights = np.asarray(weights, dtype=np.float64)
        if weights.shape != values.shape:
            raise InvalidCountsError("weights must match values in length")

    rng = np.random.default_rng(seed)
    n = values.size
    samples = np.empty(iterations, dtype=np.float64)
    for it in range(iterations):
        idx = rng.integers(0, n, size=n)
        w = weights[idx]
        total = w.sum()
        samples[it] = (values[idx] * w).sum() / total if total > 0 else 0.0

    alpha = (1.0 - confidence) / 2.0 * 100.0
    lo, hi = np.percentile(samples, [alpha, 100.0 - alpha])
    return (float(lo), float(hi))


@dataclass(frozen=True, slots=True)
class PrevalencePoint:
    period: str
    positives: int
    total: int
    rate: float
    ci_low: float
    ci_high: float

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "positives": self.positives,
            "total": self.total,
            "rate": self.rate,
            "ci_low": self.ci_low,
            "ci_high": self.ci_high,
        }


def prevalence_point(
    period: str, positives: int, total: int, confidence: float = 0.95
) -> PrevalencePoint:
    if total <= 0:
        raise InvalidCountsError(f"total must be positive, got {total}")
    if not 0 <= positives <= total:
        raise InvalidCountsError(
            f"positives must be within [0, {total}], got {positives}"
        )
    low, high = wilson_interval(positives, total, confidence)
    return PrevalencePoint(period, positives, total, positives / total, low, high)


def period_key(date_like: str, granularity: str = "month") -> str:
    """Bucket key for a date: "YYYY-MM" or "YYYY-H1"/"YYYY-H2".

    Accepts "YYYY-MM", "YYYY-MM-DD", or an existing half key.
    """
    date_like = date_like.strip()
    if granularity not in ("month", "half"):
        raise ValueError(f"unknown granularity {granularity!r}")
    parts = date_like.split("-")
    if len(parts) >= 2 and parts[1].startswith("H"):
        if granularity == "half":
            return f"{parts[0]}-{parts[1]}"
        raise ValueError(f"cannot refine half-year key {date_like!r} to months")
    year = parts[0]
    month = int(parts[1])
    if not 1 <= month <= 12:
        raise ValueError(f"bad month in {date_like!r}")
    if granularity == "month":
        return f"{year}-{month:02d}"
    return f"{year}-H1" if month <= 6 else f"{year}-H2"


def prevalence_by_period(
    observations: Iterable[tuple[str, bool]],
    granularity: str = "month",
    confidence: float = 0.95,
) -> dict[str, PrevalencePoint]:
    """Per-period prevalence with Wilson bounds, plus a pooled row.

    Observations are (date-like, flagged) pairs; the pooled row under
    the key "all" aggregates every period.
    """
    counts: dict[str, list[int]] = {}
    pooled = [0, 0]
    for date_like, flagged in observations:
        key = period_key(date_like, granularity)
        bucket = counts.setdefault(key, [0, 0])
        bucket[1] += 1
        pooled[1] += 1
        if flagged:
            bucket[0] += 1
            pooled[0] += 1
    if pooled[1] == 0:
        raise EmptyInputError("no observations supplied")
    out = {
        key: prevalence_point(key, positives, total, confidence)
        for key, (positives, total) in sorted(counts.items())
    }
    out["all"] = prevalence_point("all", pooled[0], pooled[1], confidence)
    return out


def extrapolate_exposure(
    rates: Mapping[str, float], volumes: Mapping[str, int]
) -> dict[str, float]:
    """Scale per-period rates by submission volumes.

    Every rate period must have a volume; the "total" key sums the
    per-period products.
    """
    out: dict[str, float] = {}
    total = 0.0
    for period, rate in rates.items():
        if period == "all":
            continue
        if period not in volumes:
            raise MissingVolumeError(f"no submission volume for period {period!r}")
        volume = volumes[period]
        if volume < 0:
            raise InvalidCountsError(f"volume for {period!r} must be non-negative")
        expected = rate * volume
        out[period] = expected
        total += expected
    if not out:
        raise EmptyInputError("no periods to extrapolate")
    out["total"] = total
    return out
