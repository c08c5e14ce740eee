"""Exact integer building blocks for the order-k Poisson engines.

Everything here returns Python ints (arbitrary precision).  The Stirling
triangle is memoized as a whole table that only ever grows; growth happens
under a lock, reads of finished rows do not need one.
"""

from __future__ import annotations

import math
import threading
from typing import Iterator, NamedTuple


class Composition(NamedTuple):
    """A vector ``(n_1, ..., n_k)`` with ``sum(j * n_j) == n``."""

    parts: tuple[int, ...]
    n: int
    k: int

    def weight(self) -> int:
        """Number of summands, ``n_1 + ... + n_k``."""
        return sum(self.parts)


def binomial(n: int, j: int) -> int:
    """C(n, j), zero outside ``0 <= j <= n``."""
    if n < 0:
        raise ValueError(f"binomial requires n >= 0, got {n}")
    if j < 0 or j > n:
        return 0
    return math.comb(n, j)


class _StirlingTriangle:
    def __init__(self) -> None:
        self._rows: list[list[int]] = [[1]]
        self._lock = threading.Lock()

    def row(self, n: int) -> list[int]:
        rows = self._rows
        if n < len(rows):
            return rows[n]
        with self._lock:
            rows = self._rows
            while len(rows) <= n:
                prev = rows[-1]
                m = len(rows)
                new = [0] * (m + 1)
                for j in range(1, m + 1):
                    left = prev[j] if j < m else 0
                    new[j] = j * left + prev[j - 1]
                # publish a new list object so readers never see a half-built table
                rows = rows + [new]
                self._rows = rows
            return rows[n]


_stirling = _StirlingTriangle()


def stirling2(n: int, j: int) -> int:
    """Stirling number of the second kind {n, j}.

    Rows come from the triangle recurrence {n,j} = j{n-1,j} + {n-1,j-1},
    cached up to the largest n seen so far.
    """
    if n < 0 or j < 0:
        raise ValueError(f"stirling2 requires n, j >= 0, got ({n}, {j})")
    if j > n:
        return 0
    return _stirling.row(n)[j]


def falling_factorial(s: int, j: int) -> int:
    """s (s-1) ... (s-j+1); 1 for j == 0 and 0 for j > s."""
    if s < 0 or j < 0:
        raise ValueError(f"falling_factorial requires s, j >= 0, got ({s}, {j})")
    if j > s:
        return 0
    return math.perm(s, j)


def _check_k(k: int) -> None:
    if k < 1:
        raise ValueError(f"order k must be >= 1, got {k}")


def script_F_direct(j: int, k: int) -> int:
    """Sum of falling factorials ``s_(j)`` for ``s = j..k``."""
    _check_k(k)
    if j == 0:
        return k
    return sum(falling_factorial(s, j) for s in range(j, k + 1))


def script_F(j: int, k: int) -> int:
    """Falling factorial sum at z = 1, ``j! * C(k+1, j+1)``.

    ``script_F(0, k)`` is taken to be ``k``, the value of ``z + ... + z^k`` at
    z = 1.  Vanishes for ``j > k``.
    """
    _check_k(k)
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    if j == 0:
        return k
    return math.factorial(j) * binomial(k + 1, j + 1)


def script_S(j: int, k: int) -> int:
    """Power sum ``1^j + 2^j + ... + k^j``."""
    _check_k(k)
    if j < 0:
        raise ValueError(f"j must be >= 0, got {j}")
    return sum(s**j for s in range(1, k + 1))


def script_S_stirling(j: int, k: int) -> int:
    """The same power sum written through Stirling numbers.

    ``sum_s {j,s} * s! * C(k+1, s+1)``; terms with ``s > j`` vanish, so the
    sum runs to ``min(j, k)``.  Only meaningful for ``j >= 1``.
    """
    _check_k(k)
    if j < 1:
        raise ValueError(f"Stirling form needs j >= 1, got {j}")
    return sum(
        stirling2(j, s) * math.factorial(s) * binomial(k + 1, s + 1)
        for s in range(1, min(j, k) + 1)
    )


def _compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        yield (n,)
        return
    for top in range(n // k + 1):
        for rest in _compositions(n - k * top, k - 1):
            yield rest + (top,)


def enumerate_compositions(n: int, k: int) -> Iterator[Composition]:
    """Yield every ``(n_1, ..., n_k) >= 0`` with ``n_1 + 2 n_2 + ... + k n_k == n``.

    Order is ascending in ``n_k``, then ``n_{k-1}``, and so on down to
    ``n_2`` (``n_1`` is then fixed).  Streams; nothing is materialized.

    >>> [c.parts for c in enumerate_compositions(4, 2)]
    [(4, 0), (2, 1), (0, 2)]
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    _check_k(k)
    for parts in _compositions(n, k):
        yield Composition(parts, n, k)
