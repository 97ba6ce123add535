"""Canonical text forms for rationals, vectors, elements and classes."""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def rat(a) -> str:
    """Exact rational as "p/q" (integers without denominator)."""
    f = Fraction(a)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def parse_rat(s: str) -> Fraction:
    return Fraction(s.strip())


def vec(v: Sequence) -> list[str]:
    return [rat(a) for a in v]


def parse_vec(text: str) -> tuple:
    return tuple(parse_rat(a) for a in text.split(",") if a.strip() != "")
