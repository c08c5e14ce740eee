from fractions import Fraction
from functools import lru_cache

import pytest
import sympy as sp

from poisson_k.polynomial import LambdaPolynomial

ACCEPTANCE_LINES: list[str] = []

_t, _z, _lam = sp.symbols("t z lam")


def _to_poly(expr) -> LambdaPolynomial:
    p = sp.Poly(sp.expand(expr), _lam)
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]
    return LambdaPolynomial.from_coeffs(coeffs)


@lru_cache(maxsize=None)
def sympy_moment(kind: str, n: int, k: int) -> LambdaPolynomial:
    """n-th derivative of the closed-form generating function, by sympy."""
    if kind == "raw":
        f, var, at = sp.exp(_lam * sum(sp.exp(s * _t) - 1 for s in range(1, k + 1))), _t, 0
    elif kind == "central":
        f, var, at = sp.exp(_lam * sum(sp.exp(s * _t) - 1 - s * _t for s in range(1, k + 1))), _t, 0
    elif kind == "factorial":
        f, var, at = sp.exp(_lam * sum(_z**s - 1 for s in range(1, k + 1))), _z, 1
    else:
        raise ValueError(kind)
    return _to_poly(sp.diff(f, var, n).subs(var, at))


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
