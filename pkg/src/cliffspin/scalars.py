"""Exact scalar arithmetic.

Real scalars are plain ``int`` or ``gmpy2.mpq``; a value only becomes an
:class:`ExactComplex` when its imaginary part is nonzero, so real-only
computations never pay for complex bookkeeping.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational as _Rational

from gmpy2 import mpq

__all__ = ["ExactComplex", "I", "Q", "as_scalar", "conj", "div", "fmt_rational", "is_real", "parse_rational", "re_im"]


def Q(p, q=1):
    """Exact rational ``p/q``; integers stay ``int`` when ``q`` divides ``p``."""
    if isinstance(p, str):
        return _demote(mpq(p))
    if q == 1 and isinstance(p, int):
        return p
    return _demote(mpq(p, q))


def _demote(x):
    if isinstance(x, type(mpq())) and x.denominator == 1:
        return int(x.numerator)
    return x


_MPQ = type(mpq())
_REAL = (int, _MPQ, Fraction)


class ExactComplex:
    """Complex number with exact rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re
        self.im = im

    @staticmethod
    def make(re, im):
        # Collapse to a real scalar whenever the imaginary part vanishes.
        if im == 0:
            return re
        return ExactComplex(re, im)

    def __add__(self, o):
        if not isinstance(o, (ExactComplex,) + _REAL):
            return NotImplemented
        if isinstance(o, ExactComplex):
            return ExactComplex.make(self.re + o.re, self.im + o.im)
        return ExactComplex(self.re + o, self.im)

    __radd__ = __add__

    def __sub__(self, o):
        if not isinstance(o, (ExactComplex,) + _REAL):
            return NotImplemented
        if isinstance(o, ExactComplex):
            return ExactComplex.make(self.re - o.re, self.im - o.im)
        return ExactComplex(self.re - o, self.im)

    def __rsub__(self, o):
        if not isinstance(o, _REAL):
            return NotImplemented
        return ExactComplex(o - self.re, -self.im)

    def __neg__(self):
        return ExactComplex(-self.re, -self.im)

    def __mul__(self, o):
        if not isinstance(o, (ExactComplex,) + _REAL):
            return NotImplemented
        if isinstance(o, ExactComplex):
            return ExactComplex.make(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
        if o == 0:
            return 0
        return ExactComplex(self.re * o, self.im * o)

    __rmul__ = __mul__

    def __truediv__(self, o):
        if not isinstance(o, (ExactComplex,) + _REAL):
            return NotImplemented
        if isinstance(o, ExactComplex):
            d = o.re * o.re + o.im * o.im
            return ExactComplex.make(
                _rdiv(self.re * o.re + self.im * o.im, d), _rdiv(self.im * o.re - self.re * o.im, d)
            )
        return ExactComplex.make(_rdiv(self.re, o), _rdiv(self.im, o))

    def __rtruediv__(self, o):
        if not isinstance(o, _REAL):
            return NotImplemented
        return ExactComplex(o, 0) / self

    def conjugate(self):
        return ExactComplex(self.re, -self.im)

    def __eq__(self, o):
        if isinstance(o, ExactComplex):
            return self.re == o.re and self.im == o.im
        if isinstance(o, (int, _Rational, _MPQ)):
            return self.im == 0 and self.re == o
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __repr__(self):
        return f"ExactComplex({fmt_rational(self.re)}, {fmt_rational(self.im)})"


I = ExactComplex(0, 1)


def _rdiv(a, b):
    # both real
    if b == 0:
        raise ZeroDivisionError("exact division by zero")
    if isinstance(a, int) and isinstance(b, int):
        return Q(a, b)
    return _demote(mpq(a) / mpq(b))


def div(a, b):
    """Exact quotient ``a/b`` for any pair of exact scalars."""
    if isinstance(a, ExactComplex):
        return a / b
    if isinstance(b, ExactComplex):
        return ExactComplex(a, 0) / b
    return _rdiv(a, b)


def conj(c):
    return c.conjugate() if isinstance(c, ExactComplex) else c


def is_real(c):
    return not isinstance(c, ExactComplex)


def re_im(c):
    if isinstance(c, ExactComplex):
        return c.re, c.im
    return c, 0


def as_scalar(x):
    """Coerce ints, Fractions, mpq, strings "p/q" and ``complex`` with integral parts."""
    if isinstance(x, ExactComplex):
        return x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    if isinstance(x, type(mpq())):
        return _demote(x)
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, complex):
        if x.real != int(x.real) or x.imag != int(x.imag):
            raise TypeError("only integral Python complex values are accepted; use ExactComplex")
        return ExactComplex.make(int(x.real), int(x.imag))
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def parse_rational(s):
    s = s.strip()
    try:
        return Q(s)
    except ValueError as exc:
        raise ValueError(f"not a rational literal: {s!r}") from exc


def fmt_rational(x):
    """Render an exact rational as ``"p/q"`` (or ``"p"``)."""
    if isinstance(x, int):
        return str(x)
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"
