"""Exact PMF and moments of the Poisson distribution of order k."""

from .combinatorics import (
    Composition,
    binomial,
    enumerate_compositions,
    falling_factorial,
    script_F,
    script_S,
    stirling2,
)
from .distribution import (
    OrderKParams,
    PmfWeight,
    cdf,
    mean,
    mgf,
    pgf,
    pmf,
    pmf_poly_recurrence,
    pmf_poly_sum,
    variance,
)
from .moments import (
    Method,
    MomentKind,
    MomentResult,
    central_from_raw,
    central_moment_recurrence,
    central_moment_sum,
    factorial_from_raw,
    factorial_moment_recurrence,
    factorial_moment_sum,
    moment,
    raw_from_factorial,
    raw_moment_recurrence,
    raw_moment_sum,
    touchard_raw_moment,
)
from .polynomial import LambdaPolynomial, poly_add, poly_eval, poly_mul, poly_scale

__version__ = "0.1.0"
