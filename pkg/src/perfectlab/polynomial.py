"""Exact univariate polynomials over the rationals.

Coefficients are stored lowest degree first as :class:`fractions.Fraction`
values; the zero polynomial is the empty tuple.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

RationalLike = Union[int, Fraction, str]


def as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact coefficients; pass a Fraction or 'num/den' string")
    return Fraction(x)


def fraction_to_str(x: Fraction) -> str:
    """Always ``num/den``, including integers (``-2/1``)."""
    return f"{x.numerator}/{x.denominator}"


class RationalPoly:
    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[RationalLike] = ()):
        cs = [as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs: tuple[Fraction, ...] = tuple(cs)

    @classmethod
    def T(cls) -> "RationalPoly":
        return cls((0, 1))

    @classmethod
    def constant(cls, c: RationalLike) -> "RationalPoly":
        return cls((c,))

    @classmethod
    def from_strings(cls, coeffs: Sequence[str]) -> "RationalPoly":
        return cls(Fraction(c) for c in coeffs)

    def to_strings(self) -> list[str]:
        return [fraction_to_str(c) for c in self.coeffs]

    @property
    def degree(self) -> int:
        """Degree; ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, RationalPoly):
            return self.coeffs == other.coeffs
        if isinstance(other, (int, Fraction)):
            return self.coeffs == RationalPoly.constant(other).coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.coeffs)

    def __repr__(self) -> str:
        return f"RationalPoly({[str(c) for c in self.coeffs]})"

    def __str__(self) -> str:
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            mono = "" if i == 0 else ("T" if i == 1 else f"T^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' + mono if mono else ''}"
            terms.append(("-" if c < 0 else "+", body))
        sign, body = terms[0]
        out = ("-" if sign == "-" else "") + body
        for sign, body in terms[1:]:
            out += f" {sign} {body}"
        return out

    def _coerce(self, other) -> "RationalPoly":
        if isinstance(other, RationalPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPoly.constant(other)
        raise TypeError(f"cannot combine RationalPoly with {type(other).__name__}")

    def __neg__(self) -> "RationalPoly":
        return RationalPoly(-c for c in self.coeffs)

    def __add__(self, other) -> "RationalPoly":
        other = self._coerce(other)
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return RationalPoly(out)

    __radd__ = __add__

    def __sub__(self, other) -> "RationalPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RationalPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "RationalPoly":
        other = self._coerce(other)
        if not self.coeffs or not other.coeffs:
            return RationalPoly()
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RationalPoly(out)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "RationalPoly":
        if k < 0:
            raise ValueError("negative powers are not polynomials")
        result, base = RationalPoly.constant(1), self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def derivative(self) -> "RationalPoly":
        return RationalPoly(i * c for i, c in enumerate(self.coeffs) if i > 0)

    def __call__(self, x: RationalLike) -> Fraction:
        """Exact Horner evaluation."""
        x = as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_float(self, x):
        """Horner evaluation in binary64; works elementwise on numpy arrays."""
        acc = 0.0 * x
        for c in reversed(self.coeffs):
            acc = acc * x + float(c)
        return acc

    def divide_linear(self, r: RationalLike) -> tuple["RationalPoly", Fraction]:
        """Synthetic division by ``T - r``; returns ``(quotient, remainder)``."""
        r = as_fraction(r)
        if not self.coeffs:
            return RationalPoly(), Fraction(0)
        acc = Fraction(0)
        quot = []
        for c in reversed(self.coeffs):
            acc = acc * r + c
            quot.append(acc)
        rem = quot.pop()
        return RationalPoly(reversed(quot)), rem


def poly_derivative(P: RationalPoly) -> RationalPoly:
    return P.derivative()


def poly_mul(P: RationalPoly, Q: RationalPoly) -> RationalPoly:
    return P * Q


def poly_eval(P: RationalPoly, x: RationalLike) -> Fraction:
    return P(x)


def root_multiplicity(P: RationalPoly, r: RationalLike) -> int:
    """Largest ``m`` such that ``(T - r)**m`` divides ``P``."""
    return factor_root(P, r)[1]


def factor_root(P: RationalPoly, r: RationalLike) -> tuple[RationalPoly, int]:
    """Split ``P = Q * (T - r)**m`` with ``Q(r) != 0``; returns ``(Q, m)``."""
    if P.is_zero():
        raise ValueError("root multiplicity is undefined for the zero polynomial")
    m = 0
    Q = P
    while True:
        quot, rem = Q.divide_linear(r)
        if rem != 0:
            return Q, m
        Q = quot
        m += 1
