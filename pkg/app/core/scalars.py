"""Exact Gaussian-rational scalars and their JSON encodings.

Scalars live in sympy's ``QQ_I`` domain. Weights and LP data use
``fractions.Fraction``; ``from_fraction`` bridges the two.
"""
from fractions import Fraction
from typing import Any, Dict, Union

from sympy.polys.domains import QQ, QQ_I

Scalar = Any  # an element of QQ_I

ZERO = QQ_I(0, 0)
ONE = QQ_I(1, 0)
I = QQ_I(0, 1)


def rational(value: Union[int, str, Fraction]) -> Any:
    """Parse ``value`` ("p/q", int or Fraction) into a ``QQ`` element."""
    frac = Fraction(value) if not isinstance(value, Fraction) else value
    return QQ(frac.numerator, frac.denominator)


def gaussian(re: Union[int, str, Fraction] = 0, im: Union[int, str, Fraction] = 0) -> Scalar:
    return QQ_I(rational(re), rational(im))


def from_fraction(value: Fraction) -> Scalar:
    return QQ_I(QQ(value.numerator, value.denominator), QQ(0))


def to_fraction(q: Any) -> Fraction:
    return Fraction(int(q.numerator), int(q.denominator))


def conj(z: Scalar) -> Scalar:
    return QQ_I(z.x, -z.y)


def format_rational(q: Any) -> str:
    frac = q if isinstance(q, Fraction) else to_fraction(q)
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def format_scalar(z: Scalar) -> Dict[str, str]:
    return {"re": format_rational(z.x), "im": format_rational(z.y)}


def parse_scalar(value: Any) -> Scalar:
    """Accept "p/q", an int, or {"re": "p/q", "im": "r/s"}."""
    if isinstance(value, dict):
        return gaussian(value.get("re", 0), value.get("im", 0))
    if isinstance(value, bool):
        raise ValueError("booleans are not scalars")
    if isinstance(value, float):
        raise ValueError("exact scalars must be written as rational strings")
    return gaussian(value)


def format_float(value: float) -> float:
    """Round-trip safe float with 17 significant digits."""
    return float(f"{value:.17g}")
