"""Independent oracles for the exact engines.

Three of them, none of which touch the moment recurrences or sums:

* direct summation of ``g(x) * pmf(x)`` over a truncated support, with a
  Chernoff-type certificate for the discarded tail,
* Monte Carlo draws of ``X = sum_j j * Y_j`` with ``Y_j ~ Poisson(lam)``
  independent (this is what the PGF ``exp(lam * sum_j (z^j - 1))`` factors into),
* finite differences of the closed-form MGF at t = 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .distribution import OrderKParams, log_mgf, mean, mgf, pmf_table, truncation_point
from .moments import MomentKind, raw_moment_recurrence


class TruncationError(RuntimeError):
    """The truncated support cannot certify the tail below the tolerance."""


@dataclass(frozen=True)
class OracleReport:
    """Exact value vs. oracle value.

    ``rel_error`` falls back to ``abs_error`` when the exact value is zero, so
    ``passed`` always reads ``rel_error <= tolerance``.
    """

    quantity: str
    exact_value: float
    oracle_value: float
    abs_error: float
    rel_error: float
    tolerance: float
    passed: bool

    @classmethod
    def compare(cls, quantity: str, exact: float, oracle: float, tolerance: float) -> "OracleReport":
        exact, oracle = float(exact), float(oracle)
        abs_err = abs(oracle - exact)
        rel_err = abs_err / abs(exact) if exact != 0 else abs_err
        return cls(quantity, exact, oracle, abs_err, rel_err, tolerance, rel_err <= tolerance)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class SampleBatch:
    values: np.ndarray
    seed: int
    count: int


# --- truncated PMF summation ----------------------------------------------


def _g_exact(kind: MomentKind, n: int, x: int, mu: Fraction):
    if kind is MomentKind.RAW:
        return x**n
    if kind is MomentKind.FACTORIAL:
        return math.perm(x, n) if n <= x else 0
    return (x - mu) ** n


def log_tail_bound(params: OrderKParams, n: int, start: int) -> float:
    """log of an upper bound on ``sum_{x >= start} x^n pmf(x)``.

    Uses ``x^n <= (n/(e t))^n e^{tx}`` and ``1{x >= start} <= e^{s(x - start)}``,
    so the tail is at most ``(n/(e t))^n e^{-s start} M(t + s)``, minimized
    over a grid of ``u = t + s`` and ``t/u``.
    """
    best = math.inf
    for u in np.geomspace(1e-3, 5.0, 80):
        u = float(u)
        try:
            lm = log_mgf(u, params)
        except OverflowError:
            break
        if n == 0:
            best = min(best, lm - u * start)
            continue
        for frac in np.linspace(0.02, 0.98, 49):
            t = u * float(frac)
            bound = n * math.log(n / (math.e * t)) - (u - t) * start + lm
            best = min(best, bound)
    return best


def moment_by_truncated_pmf(
    kind: MomentKind, n: int, params: OrderKParams, tolerance: float = 1e-8
) -> float:
    """``E[g(X)]`` summed over ``0..N`` with N from :func:`truncation_point`.

    ``g`` is ``x^n``, the falling factorial ``x_(n)`` or ``(x - mu)^n``.  All
    three are bounded by ``x^n`` beyond N (N exceeds the mean), so one tail
    bound covers them.  Raises :class:`TruncationError` if that bound is above
    ``tolerance / 10`` relative to the summed ``|g(x)| * pmf(x)``.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    kind = MomentKind(kind)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if params.lam == 0:
        return 1.0 if n == 0 else 0.0
    N = truncation_point(params, n)
    probs = pmf_table(params, N)
    mu = mean(params)
    terms = [float(_g_exact(kind, n, x, mu)) * p for x, p in enumerate(probs)]
    total = math.fsum(terms)
    tail = log_tail_bound(params, n, N + 1)
    scale = math.fsum(abs(v) for v in terms) or 1.0
    if tail > math.log(0.1 * tolerance * scale):
        raise TruncationError(
            f"tail bound exp({tail:.1f}) too large for {kind.value} moment n={n} at "
            f"k={params.k}, lambda={params.lam} with N={N}"
        )
    return total


# --- Monte Carlo -----------------------------------------------------------


def poisson_cdf_table(lam: float) -> np.ndarray:
    """Cumulative Poisson(lam) probabilities until they stop increasing in double precision."""
    if not 0 <= lam <= 700:
        raise ValueError(f"inversion sampler supports 0 <= lam <= 700, got {lam}")
    p = math.exp(-lam)
    acc = p
    cdf = [acc]
    m = 0
    while True:
        m += 1
        p *= lam / m
        nxt = acc + p
        if m > lam and nxt == acc:
            break
        acc = nxt
        cdf.append(acc)
    return np.array(cdf)


def poisson_by_inversion(u: np.ndarray, lam: float, table: np.ndarray | None = None) -> np.ndarray:
    """Poisson(lam) variates by inversion: smallest m with ``u <= F(m)``.

    Sequential search over the CDF is done for all of ``u`` at once with a
    sorted lookup into the precomputed table.
    """
    table = poisson_cdf_table(lam) if table is None else table
    idx = np.searchsorted(table, u, side="left")
    # u above the last representable CDF value (probability ~1e-16)
    return np.minimum(idx, len(table) - 1).astype(np.int64)


def _sample_chunk(params: OrderKParams, size: int, seed_seq: np.random.SeedSequence, table) -> np.ndarray:
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    u = rng.random((params.k, size))
    out = np.zeros(size, dtype=np.int64)
    for j in range(1, params.k + 1):
        out += j * poisson_by_inversion(u[j - 1], params.lam_float, table)
    return out


def sample(
    params: OrderKParams,
    count: int,
    seed: int,
    *,
    chunk_size: int = 1 << 16,
    workers: int | None = None,
) -> SampleBatch:
    """``count`` draws of ``X = sum_j j * Y_j``.

    The stream is split into fixed-size chunks, each with its own PCG64
    generator spawned from ``SeedSequence(seed)``, so the batch depends only on
    ``(seed, count, chunk_size, params)``; ``workers`` only changes speed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if seed < 0:
        raise ValueError("seed must be non-negative")
    sizes = [chunk_size] * (count // chunk_size)
    if count % chunk_size:
        sizes.append(count % chunk_size)
    children = np.random.SeedSequence(seed).spawn(len(sizes))
    table = poisson_cdf_table(params.lam_float)
    if workers and workers > 1 and len(sizes) > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda a: _sample_chunk(params, a[0], a[1], table), zip(sizes, children)))
    else:
        parts = [_sample_chunk(params, s, c, table) for s, c in zip(sizes, children)]
    return SampleBatch(np.concatenate(parts), seed, count)


def _g_array(kind: MomentKind, n: int, x: np.ndarray, mu: float) -> np.ndarray:
    xf = x.astype(np.float64)
    if kind is MomentKind.RAW:
        return xf**n
    if kind is MomentKind.CENTRAL:
        return (xf - mu) ** n
    out = np.ones_like(xf)
    for i in range(n):
        out *= xf - i
    return out


def monte_carlo_moment(kind: MomentKind, n: int, batch: SampleBatch, params: OrderKParams) -> float:
    """Sample mean of ``g(X)``; central moments use the exact mean, not the sample mean."""
    kind = MomentKind(kind)
    if n == 0:
        return 1.0
    if batch.values.size == 0:
        raise ValueError("empty batch")
    return float(np.mean(_g_array(kind, n, batch.values, float(mean(params)))))


def _g_poly_in_x(kind: MomentKind, n: int, mu: Fraction) -> list[Fraction]:
    """Coefficients of ``g`` as a polynomial in x."""
    coeffs = [Fraction(1)]
    root = {MomentKind.RAW: lambda i: Fraction(0), MomentKind.CENTRAL: lambda i: mu}.get(
        kind, lambda i: Fraction(i)
    )
    for i in range(n):
        r = root(i)
        nxt = [Fraction(0)] * (len(coeffs) + 1)
        for d, c in enumerate(coeffs):
            nxt[d + 1] += c
            nxt[d] -= r * c
        coeffs = nxt
    return coeffs


def exact_expectation_of_x_poly(coeffs: list[Fraction], params: OrderKParams) -> Fraction:
    """``E[sum_i c_i X^i]`` from the exact raw moments."""
    return sum(
        (c * raw_moment_recurrence(i, params.k).poly(params.lam) for i, c in enumerate(coeffs) if c),
        Fraction(0),
    )


def monte_carlo_standard_error(kind: MomentKind, n: int, params: OrderKParams, count: int) -> float:
    """``sqrt(Var[g(X)] / count)`` with the variance taken from exact moments."""
    kind = MomentKind(kind)
    g = _g_poly_in_x(kind, n, mean(params))
    g2 = [Fraction(0)] * (2 * len(g) - 1)
    for i, a in enumerate(g):
        for j, b in enumerate(g):
            g2[i + j] += a * b
    var = exact_expectation_of_x_poly(g2, params) - exact_expectation_of_x_poly(g, params) ** 2
    return math.sqrt(max(float(var), 0.0) / count)


def sample_variance_standard_error(params: OrderKParams, count: int) -> float:
    """Approximate standard error of the sample variance, ``sqrt((mu_4 - sigma^4)/count)``."""
    mu = mean(params)
    m4 = exact_expectation_of_x_poly(_g_poly_in_x(MomentKind.CENTRAL, 4, mu), params)
    m2 = exact_expectation_of_x_poly(_g_poly_in_x(MomentKind.CENTRAL, 2, mu), params)
    return math.sqrt(float(m4 - m2 * m2) / count)


# --- MGF finite differences -----------------------------------------------

_STENCILS = {
    1: ((-1, -0.5), (1, 0.5)),
    2: ((-1, 1.0), (0, -2.0), (1, 1.0)),
    3: ((-2, -0.5), (-1, 1.0), (1, -1.0), (2, 0.5)),
    4: ((-2, 1.0), (-1, -4.0), (0, 6.0), (1, -4.0), (2, 1.0)),
}


def _central_difference(f, n: int, h: float) -> float:
    return math.fsum(w * f(i * h) for i, w in _STENCILS[n]) / h**n


def mgf_derivative(n: int, params: OrderKParams, step: float) -> float:
    """n-th derivative of the MGF at 0 by second-order central differences.

    For n >= 3 one Richardson step combines ``step`` and ``step/2``.
    """
    if n not in _STENCILS:
        raise ValueError(f"derivative order must be 1..4, got {n}")
    f = lambda t: mgf(t, params)  # noqa: E731
    d = _central_difference(f, n, step)
    if n >= 3:
        d = (4.0 * _central_difference(f, n, step / 2) - d) / 3.0
    return d


def mgf_derivative_check(
    n: int, params: OrderKParams, step: float, tolerance: float = 1e-3
) -> OracleReport:
    """Compare the finite-difference MGF derivative with the exact raw moment.

    Warns (``RuntimeWarning``) when the rounding error of the stencil could
    reach a tenth of the tolerance.
    """
    if n not in _STENCILS:
        raise ValueError(f"derivative order must be 1..4, got {n}")
    if not 0 < step <= 1e-2:
        raise ValueError(f"step must be in (0, 1e-2], got {step}")
    exact = float(raw_moment_recurrence(n, params.k).poly(params.lam))
    h = step / 2 if n >= 3 else step
    weight = sum(abs(w) for _, w in _STENCILS[n]) * (5.0 / 3.0 if n >= 3 else 1.0)
    rounding = 2.2e-16 * weight * mgf(2 * step, params) / h**n
    if exact != 0 and rounding > 0.1 * tolerance * abs(exact):
        warnings.warn(
            f"step {step} too small for derivative order {n}: rounding error ~{rounding:.2e} "
            f"against value {exact:.6g}",
            RuntimeWarning,
            stacklevel=2,
        )
    oracle = mgf_derivative(n, params, step)
    return OracleReport.compare(f"mgf d^{n}/dt^{n} k={params.k} lambda={params.lam}", exact, oracle, tolerance)


#: step used per derivative order by the harness
DEFAULT_MGF_STEPS = {1: 1e-4, 2: 1e-3, 3: 1e-2, 4: 1e-2}
