"""Dense polynomials in the rate parameter with exact rational coefficients."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


def _trim(coeffs: Iterable[Rational]) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in coeffs]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def format_rational(x: Rational) -> str:
    """Render as ``"num/den"``, always with an explicit denominator."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"``, an integer, or a decimal string exactly.

    Decimals map to a power-of-ten denominator (``"0.1"`` is ``1/10``), never
    through binary floating point.
    """
    text = text.strip()
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational number: {text!r}") from exc
    return value


@dataclass(frozen=True)
class LambdaPolynomial:
    """``coeffs[i]`` is the coefficient of lambda**i.

    Stored trimmed: the zero polynomial has an empty tuple and every other
    polynomial has a nonzero last coefficient.  Construct through
    :meth:`from_coeffs` to get that normalization.
    """

    coeffs: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        if self.coeffs and self.coeffs[-1] == 0:
            raise ValueError("coefficients must be trimmed; use LambdaPolynomial.from_coeffs")

    @classmethod
    def from_coeffs(cls, coeffs: Iterable[Rational]) -> "LambdaPolynomial":
        return cls(_trim(coeffs))

    @classmethod
    def zero(cls) -> "LambdaPolynomial":
        return cls(())

    @classmethod
    def one(cls) -> "LambdaPolynomial":
        return cls((Fraction(1),))

    @classmethod
    def monomial(cls, power: int, coeff: Rational = 1) -> "LambdaPolynomial":
        if power < 0:
            raise ValueError("power must be >= 0")
        return cls.from_coeffs([0] * power + [coeff])

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, i: int) -> Fraction:
        return self.coeffs[i] if 0 <= i < len(self.coeffs) else Fraction(0)

    def __add__(self, other: "LambdaPolynomial") -> "LambdaPolynomial":
        if not isinstance(other, LambdaPolynomial):
            return NotImplemented
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return LambdaPolynomial.from_coeffs(out)

    def __neg__(self) -> "LambdaPolynomial":
        return LambdaPolynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "LambdaPolynomial") -> "LambdaPolynomial":
        if not isinstance(other, LambdaPolynomial):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LambdaPolynomial):
            return poly_mul(self, other)
        if isinstance(other, (int, Fraction)):
            return poly_scale(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __call__(self, lam: Rational) -> Fraction:
        return poly_eval(self, lam)

    def shift(self, power: int = 1) -> "LambdaPolynomial":
        """Multiply by lambda**power."""
        if self.is_zero():
            return self
        return LambdaPolynomial((Fraction(0),) * power + self.coeffs)

    def evalf(self, lam: float) -> float:
        """Horner evaluation in double precision."""
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * lam + float(c)
        return acc

    def log_evalf(self, lam: float) -> float:
        """log of the value at ``lam > 0``, for polynomials with non-negative coefficients.

        Each term's log is formed separately (exact big-int logs for the
        coefficient) and combined around the largest term, so value ranges far
        outside double precision are fine.
        """
        if lam <= 0:
            raise ValueError("log_evalf needs lam > 0")
        log_lam = math.log(lam)
        logs = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if c < 0:
                raise ValueError("log_evalf needs non-negative coefficients")
            logs.append(math.log(c.numerator) - math.log(c.denominator) + i * log_lam)
        if not logs:
            return -math.inf
        top = max(logs)
        return top + math.log(math.fsum(math.exp(v - top) for v in logs))

    def to_json(self) -> list[str]:
        return [format_rational(c) for c in self.coeffs]

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, items: Sequence[str]) -> "LambdaPolynomial":
        return cls.from_coeffs(parse_rational(s) for s in items)

    @classmethod
    def loads(cls, text: str) -> "LambdaPolynomial":
        return cls.from_json(json.loads(text))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(self.degree, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            body = "" if i == 0 else ("lam" if i == 1 else f"lam^{i}")
            if body and c == 1:
                terms.append(body)
            elif body:
                terms.append(f"{c}*{body}")
            else:
                terms.append(str(c))
        return " + ".join(terms).replace("+ -", "- ")


def poly_add(a: LambdaPolynomial, b: LambdaPolynomial) -> LambdaPolynomial:
    return a + b


def poly_mul(a: LambdaPolynomial, b: LambdaPolynomial) -> LambdaPolynomial:
    if a.is_zero() or b.is_zero():
        return LambdaPolynomial.zero()
    out = [Fraction(0)] * (len(a.coeffs) + len(b.coeffs) - 1)
    for i, x in enumerate(a.coeffs):
        if x == 0:
            continue
        for j, y in enumerate(b.coeffs):
            out[i + j] += x * y
    return LambdaPolynomial.from_coeffs(out)


def poly_scale(a: LambdaPolynomial, c: Rational) -> LambdaPolynomial:
    if c == 0:
        return LambdaPolynomial.zero()
    return LambdaPolynomial(tuple(x * c for x in a.coeffs))


def poly_eval(a: LambdaPolynomial, lam: Rational) -> Fraction:
    acc = Fraction(0)
    for c in reversed(a.coeffs):
        acc = acc * lam + c
    return acc
