"""Numeric self-checks.

Recomputes the pinned reference statistics from their raw counts and
compares against stored expected values at fixed tolerances. These are
the same numbers the measurement pipeline must reproduce, so a passing
run certifies the statistics code end to end without any documents.
"""

from __future__ import annotations

from dataclasses import dataclass

from ghostink.metrics import (
    AgreementMatrix,
    Stratum,
    bootstrap_precision_interval,
    bootstrap_rate_interval,
    prevalence_by_period,
    stratified_precision,
    weighted_rate,
    wilson_interval,
)

# Audit strata for the two detectors: (population, sampled, true positives).
HCD_STRATA = (
    Stratum("both_flagged", 517, 100, 100),
    Stratum("hcd_only", 276, 100, 60),
)
VDA_STRATA = (
    Stratum("both_flagged", 517, 100, 100),
    Stratum("vda_only", 85, 85, 41),
)

AGREEMENT_COUNTS = dict(
    both_flagged=517, first_only=276, second_only=85, neither=61151
)

PREVALENCE_COUNTS = {
    "2025-H1": (993, 83277),
    "2025-H2": (1037, 113405),
}

WILSON_CASES = {
    (0, 10): (2.7755575615628914e-17, 0.27753279986288915),
    (50, 100): (0.4038315303659957, 0.5961684696340044),
    (5, 500): (0.004278753896590498, 0.023193099755730702),
    (993, 83277): (0.011209034549936756, 0.012684113309341265),
}


@dataclass(frozen=True, slots=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _check(name: str, passed: bool, detail: str) -> CheckResult:
    return CheckResult(name, passed, detail)


def run_selfchecks() -> list[CheckResult]:
    results: list[CheckResult] = []

    hcd = stratified_precision(HCD_STRATA)
    results.append(_check(
        "stratified_precision_hcd",
        abs(hcd.estimated_true_positives - 682.6) < 1e-9
        and abs(hcd.precision - 0.860782) < 0.0005,
        f"TP={hcd.estimated_true_positives:.1f} "
        f"precision={hcd.precision * 100:.4f}% (expect 682.6, 86.08%)",
    ))

    vda = stratified_precision(VDA_STRATA)
    results.append(_check(
        "stratified_precision_vda",
        abs(vda.estimated_true_positives - 558.0) < 1e-9
        and abs(vda.precision - 0.926910) < 0.0005,
        f"TP={vda.estimated_true_positives:.1f} "
        f"precision={vda.precision * 100:.4f}% (expect 558.0, 92.69%)",
    ))

    matrix = AgreementMatrix(**AGREEMENT_COUNTS)
    results.append(_check(
        "agreement_matrix",
        matrix.total == 62029
        and abs(matrix.neither_fraction - 0.9858453) < 0.0005,
        f"total={matrix.total} neither={matrix.neither_fraction * 100:.4f}% "
        "(expect 62029, 98.58%)",
    ))

    observations = []
    for period, (positives, total) in PREVALENCE_COUNTS.items():
        month = f"{period[:4]}-{'01' if period.endswith('H1') else '07'}"
        observations.extend([(month, True)] * positives)
        observations.extend([(month, False)] * (total - positives))
    points = prevalence_by_period(observations, granularity="half")
    expected = {"2025-H1": 0.0119241, "2025-H2": 0.0091442, "all": 0.0103212}
    tolerance = {"2025-H1": 0.00005, "2025-H2": 0.00005, "all": 0.0001}
    prevalence_ok = all(
        abs(points[key].rate - expected[key]) < tolerance[key] for key in expected
    )
    results.append(_check(
        "prevalence_rates",
        prevalence_ok,
        " ".join(
            f"{key}={points[key].rate * 100:.5f}%" for key in sorted(expected)
        ),
    ))

    wilson_ok = True
    for (successes, trials), (low, high) in WILSON_CASES.items():
        got = wilson_interval(successes, trials)
        if abs(got[0] - low) >= 1e-9 or abs(got[1] - high) >= 1e-9:
            wilson_ok = False
    results.append(_check(
        "wilson_reference_cases",
        wilson_ok,
        f"{len(WILSON_CASES)} fixed intervals at 95% within 1e-9",
    ))

    values = [1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.0]
    rate = weighted_rate(values)
    fraction = sum(values) / len(values)
    ci_a = bootstrap_rate_interval(values, seed=11)
    ci_b = bootstrap_rate_interval(values, seed=11)
    results.append(_check(
        "weighted_rate_degenerate",
        abs(rate - fraction) < 1e-12 and ci_a == ci_b and ci_a[0] <= rate <= ci_a[1],
        f"rate={rate} fraction={fraction} ci={ci_a}",
    ))

    ci_hcd = bootstrap_precision_interval(HCD_STRATA, seed=0)
    ci_hcd_again = bootstrap_precision_interval(HCD_STRATA, seed=0)
    results.append(_check(
        "bootstrap_precision",
        ci_hcd == ci_hcd_again and ci_hcd[0] <= hcd.precision <= ci_hcd[1],
        f"ci=({ci_hcd[0]:.6f}, {ci_hcd[1]:.6f}) contains "
        f"{hcd.precision:.6f}, reproducible",
    ))

    return results
