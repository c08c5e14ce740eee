"""Poisson distribution of order k: exact PMF weights, CDF, mean, variance, MGF/PGF.

The PMF is kept exact as ``P_n = exp(-k*lam) * Q_n(lam)`` where ``Q_n`` is a
rational polynomial.  ``Q_n`` is built two ways, by the Adelson-type
recurrence and by summing over restricted compositions of n.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .combinatorics import enumerate_compositions, script_S
from .polynomial import LambdaPolynomial, parse_rational

RateLike = Union[int, float, str, Fraction]

#: above this value of n*k, floating evaluation switches to log space
LOG_SPACE_THRESHOLD = 300


def as_rate(value: RateLike) -> Fraction:
    """Coerce a rate to an exact non-negative Fraction.

    Floats convert exactly (their binary value); strings go through
    :func:`~poisson_k.polynomial.parse_rational`, so ``"0.1"`` is ``1/10``.
    """
    if isinstance(value, bool):
        raise TypeError("rate must be a number, not bool")
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"rate must be finite, got {value}")
        lam = Fraction(value)
    elif isinstance(value, str):
        lam = parse_rational(value)
    else:
        lam = Fraction(value)
    if lam < 0:
        raise ValueError(f"rate must be >= 0, got {value}")
    return lam


@dataclass(frozen=True)
class OrderKParams:
    """Order ``k >= 1`` and rate ``lam >= 0`` (exact).

    ``lam == 0`` is the point mass at zero; the PMF, CDF and moment
    functions all accept it.
    """

    k: int
    lam: Fraction

    def __post_init__(self) -> None:
        if not isinstance(self.k, int) or isinstance(self.k, bool) or self.k < 1:
            raise ValueError(f"order k must be an integer >= 1, got {self.k!r}")
        object.__setattr__(self, "lam", as_rate(self.lam))

    @property
    def lam_float(self) -> float:
        return float(self.lam)

    def to_json(self) -> dict:
        return {"k": self.k, "lambda": f"{self.lam.numerator}/{self.lam.denominator}"}


@dataclass(frozen=True)
class PmfWeight:
    """``P_n = exp(-k*lam) * q(lam)``."""

    n: int
    q: LambdaPolynomial


def _check_nk(n: int, k: int) -> None:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if k < 1:
        raise ValueError(f"order k must be >= 1, got {k}")


class _ScaledQTable:
    """Rows ``R_n = n! * Q_n`` for one k, as lists of ints.

    Scaling by n! turns the recurrence into integer arithmetic:
    ``R_n = sum_j j * (n-1)!/(n-j)! * lam * R_{n-j}``.
    """

    def __init__(self, k: int) -> None:
        self.k = k
        self._rows: list[list[int]] = [[1]]
        self._polys: list[LambdaPolynomial] = [LambdaPolynomial.one()]
        self._lock = threading.Lock()

    def _grow(self, n: int) -> None:
        with self._lock:
            rows, polys = list(self._rows), list(self._polys)
            while len(rows) <= n:
                m = len(rows)
                row = [0] * (m + 1)
                for j in range(1, min(m, self.k) + 1):
                    w = j * math.perm(m - 1, j - 1)
                    for i, c in enumerate(rows[m - j]):
                        row[i + 1] += w * c
                rows.append(row)
                fact = math.factorial(m)
                polys.append(LambdaPolynomial.from_coeffs(Fraction(c, fact) for c in row))
            self._polys = polys
            self._rows = rows

    def poly(self, n: int) -> LambdaPolynomial:
        if n >= len(self._polys):
            self._grow(n)
        return self._polys[n]


_q_tables: dict[int, _ScaledQTable] = {}
_q_tables_lock = threading.Lock()


def _q_table(k: int) -> _ScaledQTable:
    table = _q_tables.get(k)
    if table is None:
        with _q_tables_lock:
            table = _q_tables.setdefault(k, _ScaledQTable(k))
    return table


def pmf_poly_recurrence(n: int, k: int) -> PmfWeight:
    """``Q_n`` from ``Q_n = (lam/n) * sum_{j<=min(n,k)} j Q_{n-j}``, ``Q_0 = 1``."""
    _check_nk(n, k)
    return PmfWeight(n, _q_table(k).poly(n))


def pmf_poly_sum(n: int, k: int) -> PmfWeight:
    """``Q_n`` as a sum over compositions of ``prod_j lam^{n_j} / n_j!``."""
    _check_nk(n, k)
    coeffs: dict[int, Fraction] = {}
    for comp in enumerate_compositions(n, k):
        denom = 1
        for nj in comp.parts:
            denom *= math.factorial(nj)
        w = comp.weight()
        coeffs[w] = coeffs.get(w, Fraction(0)) + Fraction(1, denom)
    top = max(coeffs)
    return PmfWeight(n, LambdaPolynomial.from_coeffs(coeffs.get(i, 0) for i in range(top + 1)))


@lru_cache(maxsize=4096)
def _float_coeffs(n: int, k: int) -> tuple[float, ...]:
    return tuple(float(c) for c in _q_table(k).poly(n).coeffs)


def _pmf_float(n: int, k: int, lam: float) -> float:
    if lam == 0.0:
        return 1.0 if n == 0 else 0.0
    if n * k > LOG_SPACE_THRESHOLD:
        q = _q_table(k).poly(n)
        return math.exp(q.log_evalf(lam) - k * lam)
    terms = [c * lam**i for i, c in enumerate(_float_coeffs(n, k)) if c]
    return math.exp(-k * lam) * math.fsum(terms)


def pmf(n: int, params: OrderKParams) -> float:
    """P(X = n) in double precision."""
    _check_nk(n, params.k)
    return _pmf_float(n, params.k, params.lam_float)


def cdf(n: int, params: OrderKParams) -> float:
    """P(X <= n)."""
    _check_nk(n, params.k)
    return min(1.0, math.fsum(pmf_table(params, n)))


_pmf_rows: dict[tuple[int, Fraction], list[float]] = {}
_pmf_rows_lock = threading.Lock()


def pmf_table(params: OrderKParams, upto: int) -> tuple[float, ...]:
    """``(pmf(0), ..., pmf(upto))``; rows are cached and extended per (k, lam)."""
    key = (params.k, params.lam)
    row = _pmf_rows.get(key, ())
    if len(row) <= upto:
        lam_f = params.lam_float
        with _pmf_rows_lock:
            row = list(_pmf_rows.get(key, ()))
            row.extend(_pmf_float(m, params.k, lam_f) for m in range(len(row), upto + 1))
            _pmf_rows[key] = row
    return tuple(row[: upto + 1])


def clear_cache() -> None:
    """Drop memoized Q_n tables and floating PMF rows."""
    with _q_tables_lock:
        _q_tables.clear()
    with _pmf_rows_lock:
        _pmf_rows.clear()
    _float_coeffs.cache_clear()


def mean(params: OrderKParams) -> Fraction:
    """``k(k+1)/2 * lam``."""
    return script_S(1, params.k) * params.lam


def variance(params: OrderKParams) -> Fraction:
    """``k(k+1)(2k+1)/6 * lam``."""
    return script_S(2, params.k) * params.lam


def truncation_point(params: OrderKParams, moment_order: int = 0) -> int:
    """Support cutoff ``ceil(mu + 12 sigma + 8 n k + 20)`` for infinite sums."""
    mu = float(mean(params))
    sigma = math.sqrt(float(variance(params)))
    return math.ceil(mu + 12.0 * sigma + 8 * moment_order * params.k + 20)


def mgf(t: float, params: OrderKParams) -> float:
    """``exp(-k lam) * exp(lam * (e^t + ... + e^{kt}))``."""
    if not math.isfinite(t):
        raise ValueError(f"t must be finite, got {t}")
    lam = params.lam_float
    try:
        expo = lam * math.fsum(math.expm1(s * t) for s in range(1, params.k + 1))
        return math.exp(expo)
    except OverflowError:
        raise OverflowError(f"mgf overflows double precision at t={t}, k={params.k}") from None


def log_mgf(t: float, params: OrderKParams) -> float:
    """Natural log of :func:`mgf`, finite wherever ``e^{kt}`` is."""
    lam = params.lam_float
    try:
        return lam * math.fsum(math.expm1(s * t) for s in range(1, params.k + 1))
    except OverflowError:
        raise OverflowError(f"log mgf overflows double precision at t={t}, k={params.k}") from None


def pgf(z: float, params: OrderKParams) -> float:
    """``exp(-k lam) * exp(lam * (z + ... + z^k))``."""
    lam = params.lam_float
    return math.exp(lam * math.fsum(z**s - 1.0 for s in range(1, params.k + 1)))


__all__ = [
    "LOG_SPACE_THRESHOLD",
    "OrderKParams",
    "PmfWeight",
    "as_rate",
    "cdf",
    "log_mgf",
    "mean",
    "mgf",
    "pgf",
    "pmf",
    "pmf_poly_recurrence",
    "pmf_poly_sum",
    "pmf_table",
    "truncation_point",
    "variance",
]
