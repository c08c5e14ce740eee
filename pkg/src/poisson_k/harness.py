"""The cross-verification suite run by ``poisson-k verify``."""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from typing import Iterable

from .combinatorics import script_S
from .config import Settings
from .distribution import (
    OrderKParams,
    mean,
    pmf_poly_recurrence,
    pmf_poly_sum,
    pmf_table,
    truncation_point,
    variance,
)
from .moments import (
    Method,
    MomentKind,
    factorial_moment_sum,
    moment,
    touchard_raw_moment,
)
from .polynomial import LambdaPolynomial
from .verification import (
    DEFAULT_MGF_STEPS,
    OracleReport,
    TruncationError,
    mgf_derivative_check,
    moment_by_truncated_pmf,
    monte_carlo_standard_error,
    sample,
    sample_variance_standard_error,
)

log = logging.getLogger(__name__)

NORMALIZATION_LOW = 1e-10
NORMALIZATION_HIGH = 1e-12


def exact_report(quantity: str, expected: LambdaPolynomial, got: LambdaPolynomial) -> OracleReport:
    """Exact polynomial equality, phrased as a report with zero tolerance.

    The values are both polynomials at lambda = 1; the error is the largest
    coefficient difference.
    """
    width = max(len(expected.coeffs), len(got.coeffs))
    diff = max((abs(float(expected.coeff(i) - got.coeff(i))) for i in range(width)), default=0.0)
    if expected != got and diff == 0.0:
        diff = math.ulp(1.0)
    return OracleReport(quantity, float(expected(1)), float(got(1)), diff, diff, 0.0, expected == got)


def method_agreement(k_max: int, n_max: int) -> Iterable[OracleReport]:
    for k in range(1, k_max + 1):
        for n in range(n_max + 1):
            yield exact_report(f"pmf poly sum==recurrence n={n} k={k}", pmf_poly_recurrence(n, k).q, pmf_poly_sum(n, k).q)
            for kind in MomentKind:
                ref = moment(kind, n, k, Method.RECURRENCE).poly
                for method in (Method.SUM, Method.CONVERSION):
                    got = moment(kind, n, k, method).poly
                    yield exact_report(f"{kind.value} {method.value}==recurrence n={n} k={k}", ref, got)
            yield exact_report(
                f"factorial sum binomial==falling form n={n} k={k}",
                factorial_moment_sum(n, k, "binomial").poly,
                factorial_moment_sum(n, k, "falling").poly,
            )
    for n in range(n_max + 1):
        yield exact_report(f"touchard==raw k=1 n={n}", touchard_raw_moment(n), moment(MomentKind.RAW, n, 1).poly)


def closed_forms(k_max: int) -> Iterable[OracleReport]:
    for k in range(1, k_max + 1):
        yield exact_report(
            f"mean k={k}", LambdaPolynomial.monomial(1, Fraction(k * (k + 1), 2)), moment(MomentKind.RAW, 1, k).poly
        )
        yield exact_report(
            f"variance k={k}",
            LambdaPolynomial.monomial(1, Fraction(k * (k + 1) * (2 * k + 1), 6)),
            moment(MomentKind.CENTRAL, 2, k).poly,
        )


def central_structure(k_max: int, n_max: int) -> Iterable[OracleReport]:
    """Degree floor(n/2), no constant term, lambda-coefficient S_n, no gaps."""
    for k in range(2, k_max + 1):
        for n in range(2, n_max + 1):
            p = moment(MomentKind.CENTRAL, n, k).poly
            ok = (
                p.degree == n // 2
                and p.coeff(0) == 0
                and p.coeff(1) == script_S(n, k)
                and all(p.coeff(i) != 0 for i in range(1, n // 2 + 1))
            )
            yield OracleReport(
                f"central structure n={n} k={k}", float(script_S(n, k)), float(p.coeff(1)),
                0.0 if ok else 1.0, 0.0 if ok else 1.0, 0.0, ok,
            )


def normalization_report(params: OrderKParams) -> OracleReport:
    N = truncation_point(params, 0)
    total = math.fsum(pmf_table(params, N))
    ok = 1.0 - NORMALIZATION_LOW <= total <= 1.0 + NORMALIZATION_HIGH
    err = abs(total - 1.0)
    return OracleReport(f"normalization k={params.k} lambda={params.lam} N={N}", 1.0, total, err, err, NORMALIZATION_LOW, ok)


def oracle_reports(params: OrderKParams, n_max: int, tolerance: float) -> Iterable[OracleReport]:
    for kind in MomentKind:
        for n in range(n_max + 1):
            label = f"{kind.value} n={n} k={params.k} lambda={params.lam} vs truncated pmf"
            exact = float(moment(kind, n, params.k).poly(params.lam))
            try:
                oracle = moment_by_truncated_pmf(kind, n, params, tolerance)
            except TruncationError as exc:
                log.warning("%s", exc)
                yield OracleReport(label, exact, math.nan, math.inf, math.inf, tolerance, False)
                continue
            yield OracleReport.compare(label, exact, oracle, tolerance)


def mgf_reports(params: OrderKParams, n_max: int, tolerance: float) -> Iterable[OracleReport]:
    for n in range(1, min(4, n_max) + 1):
        yield mgf_derivative_check(n, params, DEFAULT_MGF_STEPS[n], tolerance)


def monte_carlo_reports(params: OrderKParams, count: int, seed: int, settings: Settings) -> Iterable[OracleReport]:
    batch = sample(params, count, seed, chunk_size=settings.mc_chunk_size)
    x = batch.values
    mu = float(mean(params))
    var = float(variance(params))
    label = f"k={params.k} lambda={params.lam} count={count} seed={seed}"
    if mu == 0:
        yield OracleReport.compare(f"mc mean {label}", 0.0, float(x.mean()), 0.0)
        return
    se_mean = monte_carlo_standard_error(MomentKind.RAW, 1, params, count)
    yield OracleReport.compare(f"mc mean {label}", mu, float(x.mean()), settings.mc_sigmas * se_mean / mu)
    se_var = sample_variance_standard_error(params, count)
    yield OracleReport.compare(f"mc variance {label}", var, float(x.var()), settings.mc_sigmas * se_var / var)


def run_verification(
    k_max: int,
    n_max: int,
    lambdas: Iterable[Fraction],
    mc_count: int = 0,
    seed: int | None = None,
    settings: Settings | None = None,
) -> list[OracleReport]:
    """Every check, in a fixed order.  The Monte Carlo part is skipped when ``mc_count == 0``."""
    settings = settings or Settings()
    seed = settings.seed if seed is None else seed
    lambdas = list(lambdas)
    reports: list[OracleReport] = []
    reports.extend(method_agreement(k_max, n_max))
    reports.extend(closed_forms(k_max))
    reports.extend(central_structure(k_max, n_max))
    for lam in lambdas:
        for k in range(1, k_max + 1):
            params = OrderKParams(k, lam)
            if lam == 0:
                continue
            reports.append(normalization_report(params))
            reports.extend(oracle_reports(params, n_max, settings.oracle_tolerance))
            reports.extend(mgf_reports(params, n_max, settings.mgf_tolerance))
            if mc_count > 0:
                reports.extend(monte_carlo_reports(params, mc_count, seed, settings))
    return reports
