"""Raw, factorial and central moments as exact polynomials in lam.

Every family has a recurrence and a combinatorial-sum route, plus a
conversion route through another family.  The power sums ``script_S(j, k)``
and falling factorial sums ``script_F(j, k)`` are evaluated to integers for
the requested k, so every result is a plain :class:`LambdaPolynomial`.

For k = 1 the raw moments are the Touchard polynomials.

The sum routes for raw and central moments run over compositions whose part
sizes go up to n, not just up to k: ``script_S(j, k) != 0`` for every j, so
parts larger than k still contribute (with k = 1 a bound of k would give
``M_2 = lam^2`` instead of ``lam^2 + lam``).  Factorial moments can bound
parts by k because ``script_F(j, k) = 0`` for ``j > k``.
"""

from __future__ import annotations

import enum
import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterator

from .combinatorics import (
    Composition,
    binomial,
    enumerate_compositions,
    script_F,
    script_S,
    stirling2,
)
from .polynomial import LambdaPolynomial


class MomentKind(enum.Enum):
    RAW = "raw"
    FACTORIAL = "factorial"
    CENTRAL = "central"


class Method(enum.Enum):
    RECURRENCE = "recurrence"
    SUM = "sum"
    CONVERSION = "convert"


@dataclass(frozen=True)
class MomentResult:
    kind: MomentKind
    n: int
    k: int
    poly: LambdaPolynomial
    method: Method

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "n": self.n,
            "k": self.k,
            "method": self.method.value,
            "coefficients": self.poly.to_json(),
        }


def _check(n: int, k: int) -> None:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if k < 1:
        raise ValueError(f"order k must be >= 1, got {k}")


# --- recurrences -----------------------------------------------------------

StepFn = Callable[[int, int, list], LambdaPolynomial]


def _raw_step(n: int, k: int, prev: list) -> LambdaPolynomial:
    acc = [Fraction(0)] * (n + 1)
    for j in range(1, n + 1):
        w = binomial(n - 1, j - 1) * script_S(j, k)
        for i, c in enumerate(prev[n - j].coeffs):
            acc[i + 1] += w * c
    return LambdaPolynomial.from_coeffs(acc)


def _factorial_step(n: int, k: int, prev: list) -> LambdaPolynomial:
    acc = [Fraction(0)] * (n + 1)
    for j in range(1, min(n, k) + 1):
        w = binomial(n - 1, j - 1) * script_F(j, k)
        for i, c in enumerate(prev[n - j].coeffs):
            acc[i + 1] += w * c
    return LambdaPolynomial.from_coeffs(acc)


def _central_step(n: int, k: int, prev: list) -> LambdaPolynomial:
    if n == 1:
        return LambdaPolynomial.zero()
    acc = [Fraction(0)] * (n + 1)
    for j in range(2, n + 1):
        w = binomial(n - 1, j - 1) * script_S(j, k)
        for i, c in enumerate(prev[n - j].coeffs):
            acc[i + 1] += w * c
    return LambdaPolynomial.from_coeffs(acc)


_STEPS: dict[MomentKind, StepFn] = {
    MomentKind.RAW: _raw_step,
    MomentKind.FACTORIAL: _factorial_step,
    MomentKind.CENTRAL: _central_step,
}


class _MomentTable:
    """M_0..M_n for one (kind, k); grows on demand, readers never block."""

    def __init__(self, kind: MomentKind, k: int) -> None:
        self.kind = kind
        self.k = k
        self._polys: list[LambdaPolynomial] = [LambdaPolynomial.one()]
        self._lock = threading.Lock()

    def get(self, n: int) -> LambdaPolynomial:
        polys = self._polys
        if n < len(polys):
            return polys[n]
        step = _STEPS[self.kind]
        with self._lock:
            polys = list(self._polys)
            while len(polys) <= n:
                polys.append(step(len(polys), self.k, polys))
            self._polys = polys
        return polys[n]


_tables: dict[tuple[MomentKind, int], _MomentTable] = {}
_tables_lock = threading.Lock()


def _table(kind: MomentKind, k: int) -> _MomentTable:
    key = (kind, k)
    table = _tables.get(key)
    if table is None:
        with _tables_lock:
            table = _tables.setdefault(key, _MomentTable(kind, k))
    return table


def raw_moment_recurrence(n: int, k: int) -> MomentResult:
    """``M_n = lam * sum_{j=1}^{n} C(n-1, j-1) S_j M_{n-j}``."""
    _check(n, k)
    return MomentResult(MomentKind.RAW, n, k, _table(MomentKind.RAW, k).get(n), Method.RECURRENCE)


def factorial_moment_recurrence(n: int, k: int) -> MomentResult:
    """``M_(n) = lam * sum_{j=1}^{min(n,k)} C(n-1, j-1) F_j M_(n-j)``."""
    _check(n, k)
    poly = _table(MomentKind.FACTORIAL, k).get(n)
    return MomentResult(MomentKind.FACTORIAL, n, k, poly, Method.RECURRENCE)


def central_moment_recurrence(n: int, k: int) -> MomentResult:
    """``Mc_n = lam * sum_{j=2}^{n} C(n-1, j-1) S_j Mc_{n-j}``, ``Mc_0 = 1``, ``Mc_1 = 0``."""
    _check(n, k)
    poly = _table(MomentKind.CENTRAL, k).get(n)
    return MomentResult(MomentKind.CENTRAL, n, k, poly, Method.RECURRENCE)


# --- combinatorial sums ----------------------------------------------------


def _accumulate(n: int, terms: Iterator[tuple[Composition, Fraction]]) -> LambdaPolynomial:
    """Sum ``n! * c * lam^weight`` over (composition, c) pairs."""
    coeffs = [Fraction(0)] * (n + 1)
    scale = math.factorial(n)
    for comp, c in terms:
        coeffs[comp.weight()] += scale * c
    return LambdaPolynomial.from_coeffs(coeffs)


def _weighted(n: int, max_part: int, per_part: Callable[[int], Fraction], *, skip_ones: bool = False):
    """Yield ``(comp, prod_j per_part(j)^{n_j} / n_j!)`` for compositions of n."""
    weights = [Fraction(0)] + [per_part(j) for j in range(1, max_part + 1)]
    for comp in enumerate_compositions(n, max_part):
        if skip_ones and comp.parts[0]:
            continue
        c = Fraction(1)
        for j, nj in enumerate(comp.parts, start=1):
            if nj:
                c *= Fraction(weights[j] ** nj, math.factorial(nj))
        if c:
            yield comp, c


def power_sum_terms(n: int, k: int, *, skip_ones: bool = False):
    """Composition terms of the raw-moment sum, with weights ``S_j / j!``.

    With ``skip_ones`` the compositions having ``n_1 > 0`` are dropped,
    which leaves exactly the central-moment sum.
    """
    return _weighted(
        n,
        max(n, k, 1),
        lambda j: Fraction(script_S(j, k), math.factorial(j)),
        skip_ones=skip_ones,
    )


def raw_moment_sum(n: int, k: int) -> MomentResult:
    """``M_n = n! * sum prod_j (lam^{n_j}/n_j!) (S_j/j!)^{n_j}``."""
    _check(n, k)
    poly = _accumulate(n, power_sum_terms(n, k))
    return MomentResult(MomentKind.RAW, n, k, poly, Method.SUM)


def factorial_moment_sum(n: int, k: int, form: str = "binomial") -> MomentResult:
    """``M_(n) = n! * sum prod_j (lam^{n_j}/n_j!) C(k+1, j+1)^{n_j}``.

    ``form="falling"`` uses the equivalent weight ``F_j / j!`` instead of the
    binomial; both must give the same polynomial.
    """
    _check(n, k)
    if form == "binomial":
        per_part = lambda j: Fraction(binomial(k + 1, j + 1))  # noqa: E731
    elif form == "falling":
        per_part = lambda j: Fraction(script_F(j, k), math.factorial(j))  # noqa: E731
    else:
        raise ValueError(f"unknown form {form!r}")
    poly = _accumulate(n, _weighted(n, k, per_part))
    return MomentResult(MomentKind.FACTORIAL, n, k, poly, Method.SUM)


def central_moment_sum(n: int, k: int) -> MomentResult:
    """Raw-moment sum restricted to compositions with ``n_1 = 0``.

    ``n`` in {0, 1} fall out of the same sum: the empty composition gives 1,
    and n = 1 has no composition without a part of size one.
    """
    _check(n, k)
    poly = _accumulate(n, power_sum_terms(n, k, skip_ones=True))
    return MomentResult(MomentKind.CENTRAL, n, k, poly, Method.SUM)


# --- conversions -----------------------------------------------------------


def raw_from_factorial(n: int, k: int) -> MomentResult:
    """``M_n = sum_j {n,j} M_(j)``."""
    _check(n, k)
    table = _table(MomentKind.FACTORIAL, k)
    acc = LambdaPolynomial.zero()
    for j in range(n + 1):
        s = stirling2(n, j)
        if s:
            acc = acc + table.get(j) * s
    return MomentResult(MomentKind.RAW, n, k, acc, Method.CONVERSION)


def factorial_from_raw(n: int, k: int) -> MomentResult:
    """Invert ``M_n = sum_j {n,j} M_(j)`` by forward substitution ({n,n} = 1)."""
    _check(n, k)
    raw = _table(MomentKind.RAW, k)
    fac: list[LambdaPolynomial] = []
    for m in range(n + 1):
        acc = raw.get(m)
        for j in range(m):
            s = stirling2(m, j)
            if s:
                acc = acc - fac[j] * s
        fac.append(acc)
    return MomentResult(MomentKind.FACTORIAL, n, k, fac[n], Method.CONVERSION)


def central_from_raw(n: int, k: int) -> MomentResult:
    """``Mc_n = sum_j C(n,j) (-mu)^{n-j} M_j`` with ``mu = S_1 lam``."""
    _check(n, k)
    raw = _table(MomentKind.RAW, k)
    neg_mu = LambdaPolynomial.monomial(1, -script_S(1, k))
    acc = LambdaPolynomial.zero()
    power = LambdaPolynomial.one()
    for j in range(n, -1, -1):
        acc = acc + raw.get(j) * power * binomial(n, j)
        power = power * neg_mu
    return MomentResult(MomentKind.CENTRAL, n, k, acc, Method.CONVERSION)


def touchard_raw_moment(n: int) -> LambdaPolynomial:
    """k = 1 raw moment, ``sum_{j=0}^{n} {n,j} lam^j``."""
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    return LambdaPolynomial.from_coeffs(stirling2(n, j) for j in range(n + 1))


# --- dispatch --------------------------------------------------------------

_RECURRENCE = {
    MomentKind.RAW: raw_moment_recurrence,
    MomentKind.FACTORIAL: factorial_moment_recurrence,
    MomentKind.CENTRAL: central_moment_recurrence,
}
_SUM = {
    MomentKind.RAW: raw_moment_sum,
    MomentKind.FACTORIAL: factorial_moment_sum,
    MomentKind.CENTRAL: central_moment_sum,
}
_CONVERSION = {
    MomentKind.RAW: raw_from_factorial,
    MomentKind.FACTORIAL: factorial_from_raw,
    MomentKind.CENTRAL: central_from_raw,
}
_BY_METHOD = {Method.RECURRENCE: _RECURRENCE, Method.SUM: _SUM, Method.CONVERSION: _CONVERSION}


def moment(kind: MomentKind, n: int, k: int, method: Method = Method.RECURRENCE) -> MomentResult:
    """Moment polynomial of the given family, by the chosen route."""
    return _BY_METHOD[Method(method)][MomentKind(kind)](n, k)


def all_methods(kind: MomentKind, n: int, k: int) -> list[MomentResult]:
    return [moment(kind, n, k, m) for m in Method]


def clear_cache() -> None:
    """Drop all memoized moment tables."""
    with _tables_lock:
        _tables.clear()
