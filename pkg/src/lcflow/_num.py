"""Small exact-arithmetic helpers shared by the flow modules."""
from __future__ import annotations

import math
from fractions import Fraction

INF = math.inf


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError("non-finite value cannot be made exact")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


def frac_ceil(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def frac_floor(x: Fraction) -> int:
    return x.numerator // x.denominator


def is_power_of_two(m) -> bool:
    return isinstance(m, int) and m >= 1 and m & (m - 1) == 0


def next_power_of_two(x) -> int:
    """Smallest power of two that is >= x (x may be rational)."""
    x = as_fraction(x)
    p = 1
    while p < x:
        p <<= 1
    return p


def dyadic_up(x: Fraction, bits: int = 60) -> Fraction:
    """Round x > 0 up to a dyadic rational with about `bits` significant bits."""
    if x <= 0:
        return x
    e = x.numerator.bit_length() - x.denominator.bit_length()
    shift = bits - e
    if shift >= 0:
        num = -((-(x.numerator << shift)) // x.denominator)
        return Fraction(num, 1 << shift)
    num = -((-x.numerator) // (x.denominator << -shift))
    return Fraction(num << -shift)


def dyadic_down(x: Fraction, bits: int = 60) -> Fraction:
    if x <= 0:
        return x
    e = x.numerator.bit_length() - x.denominator.bit_length()
    shift = bits - e
    if shift >= 0:
        return Fraction((x.numerator << shift) // x.denominator, 1 << shift)
    return Fraction((x.numerator // (x.denominator << -shift)) << -shift)


def fmt(x) -> str:
    """Serialize a rational (or inf) as 'p/q' text."""
    if x == INF:
        return "inf"
    x = as_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def parse_value(s: str):
    s = s.strip()
    if s.lower() in ("inf", "infinity"):
        return INF
    return Fraction(s)


def lcm_denominators(values) -> int:
    d = 1
    for v in values:
        d = math.lcm(d, as_fraction(v).denominator)
    return d
