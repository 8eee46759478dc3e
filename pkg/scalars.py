#!/usr/bin/env python
"""
Scalar backends

All state values range over one backend: exact rationals (fractions.Fraction),
double-precision reals or complex numbers. Dual numbers carry a tangent vector
next to a primal value and give exact Jacobians when the primal values are
rational, which is what the Poisson and 2-form checks are built on.

External representation:
    rational  "p/q", or "p" when q = 1
    real      decimal literal
    complex   {"re": ..., "im": ...}
"""

import logging
import math
import os
from enum import Enum
from fractions import Fraction
from numbers import Complex, Integral, Number, Rational, Real
from typing import Callable, List, Sequence, Union

import numpy as np
from dotenv import load_dotenv

from errors import InvalidState, PoleEncountered, SizeLimitExceeded

load_dotenv()

logger = logging.getLogger(__name__)

DEFAULT_MAX_BITS = 1_000_000
DEFAULT_FLOAT_TOL = 1e-9


def max_bits() -> int:
    """Bit-length cap for rational numerators and denominators"""
    return int(os.getenv("PENTALAB_MAX_BITS", str(DEFAULT_MAX_BITS)))


def float_tol() -> float:
    """Relative tolerance for float and complex comparisons"""
    return float(os.getenv("PENTALAB_FLOAT_TOL", str(DEFAULT_FLOAT_TOL)))


class Dual:
    """Forward-mode dual number: primal value plus a fixed-width tangent"""

    __slots__ = ("primal", "tangent")

    def __init__(self, primal, tangent: Sequence = ()):
        self.primal = primal
        self.tangent = tuple(tangent)

    @classmethod
    def seed(cls, values: Sequence) -> List["Dual"]:
        """Seed each value with its own unit tangent direction"""
        width = len(values)
        return [cls(v, [1 if j == i else 0 for j in range(width)]) for i, v in enumerate(values)]

    def __add__(self, other):
        if not isinstance(other, (Dual, Number)):
            return NotImplemented
        if isinstance(other, Dual):
            return Dual(self.primal + other.primal, _zip_add(self.tangent, other.tangent))
        return Dual(self.primal + other, self.tangent)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, (Dual, Number)):
            return NotImplemented
        if isinstance(other, Dual):
            return Dual(self.primal - other.primal, _zip_sub(self.tangent, other.tangent))
        return Dual(self.primal - other, self.tangent)

    def __rsub__(self, other):
        if not isinstance(other, (Dual, Number)):
            return NotImplemented
        return Dual(other - self.primal, tuple(-t for t in self.tangent))

    def __neg__(self):
        return Dual(-self.primal, tuple(-t for t in self.tangent))

    def __pos__(self):
        return self

    def __mul__(self, other):
        if not isinstance(other, (Dual, Number)):
            return NotImplemented
        if isinstance(other, Dual):
            a, b = self.primal, other.primal
            return Dual(a * b, _zip_lin(b, self.tangent, a, other.tangent))
        return Dual(self.primal * other, tuple(t * other for t in self.tangent))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, (Dual, Number)):
            return NotImplemented
        if isinstance(other, Dual):
            if other.primal == 0:
                raise PoleEncountered("division by a dual number with zero primal")
            b = other.primal
            value = self.primal / b
            # d(a/b) = (da - (a/b) db) / b
            return Dual(value, tuple((da - value * db) / b
                                     for da, db in zip(_widen(self.tangent, other.tangent),
                                                       _widen(other.tangent, self.tangent))))
        if other == 0:
            raise PoleEncountered("division of a dual number by zero")
        return Dual(self.primal / other, tuple(t / other for t in self.tangent))

    def __rtruediv__(self, other):
        if not isinstance(other, (Dual, Number)):
            return NotImplemented
        if self.primal == 0:
            raise PoleEncountered("division by a dual number with zero primal")
        value = other / self.primal
        factor = -value / self.primal
        return Dual(value, tuple(factor * t for t in self.tangent))

    def __pow__(self, exponent: int):
        if not isinstance(exponent, Integral):
            raise TypeError("dual numbers support integer powers only")
        if exponent == 0:
            return Dual(self.primal ** 0, (0,) * len(self.tangent))
        if exponent < 0:
            return 1 / (self ** (-exponent))
        result = self
        for _ in range(exponent - 1):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Dual):
            return self.primal == other.primal and all(
                a == b for a, b in zip(_widen(self.tangent, other.tangent),
                                       _widen(other.tangent, self.tangent)))
        return self.primal == other and all(t == 0 for t in self.tangent)

    __hash__ = None

    def __repr__(self):
        return f"Dual({self.primal!r}, {list(self.tangent)!r})"


def _widen(a: tuple, b: tuple) -> tuple:
    # constants enter dual arithmetic with an empty tangent
    if len(a) >= len(b):
        return a
    return a + (0,) * (len(b) - len(a))


def _zip_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(_widen(a, b), _widen(b, a)))


def _zip_sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(_widen(a, b), _widen(b, a)))


def _zip_lin(alpha, a: tuple, beta, b: tuple) -> tuple:
    return tuple(alpha * x + beta * y for x, y in zip(_widen(a, b), _widen(b, a)))


Scalar = Union[Fraction, float, complex, Dual]


def primal_of(value):
    """Primal part of a dual number, the value itself otherwise"""
    return value.primal if isinstance(value, Dual) else value


def tangent_of(value, width: int) -> tuple:
    if isinstance(value, Dual):
        return _widen(value.tangent, (0,) * width)
    return (0,) * width


def is_zero(value) -> bool:
    """Exact zero test on the primal value"""
    return primal_of(value) == 0


def is_exact(value) -> bool:
    return isinstance(primal_of(value), Rational)


class Backend(Enum):
    """Scalar field a state lives over"""
    RATIONAL = "rational"
    FLOAT = "float"
    COMPLEX = "complex"

    @classmethod
    def of(cls, value) -> "Backend":
        value = primal_of(value)
        if isinstance(value, Rational):
            return cls.RATIONAL
        if isinstance(value, Real):
            return cls.FLOAT
        if isinstance(value, Complex):
            return cls.COMPLEX
        raise InvalidState(f"unsupported scalar {value!r}")

    @classmethod
    def of_values(cls, values: Sequence) -> "Backend":
        kinds = {cls.of(v) for v in values}
        for kind in (cls.COMPLEX, cls.FLOAT, cls.RATIONAL):
            if kind in kinds:
                return kind
        return cls.RATIONAL

    def coerce(self, value):
        """Convert a plain number into this backend"""
        if isinstance(value, Dual):
            return value
        if self is Backend.RATIONAL:
            if isinstance(value, Rational):
                return Fraction(value)
            if isinstance(value, float):
                return Fraction(value)
            raise InvalidState(f"cannot represent {value!r} exactly")
        if self is Backend.FLOAT:
            if isinstance(value, complex):
                if value.imag != 0:
                    raise InvalidState(f"complex value {value!r} on the float backend")
                value = value.real
            return float(value)
        return complex(value)

    def parse(self, token):
        """Parse an external scalar representation"""
        try:
            if isinstance(token, dict):
                return self.coerce(complex(float(token.get("re", 0)), float(token.get("im", 0))))
            if isinstance(token, str):
                text = token.strip()
                if self is Backend.RATIONAL:
                    return Fraction(text)
                if self is Backend.COMPLEX and ("j" in text):
                    return complex(text)
                if "/" in text:
                    return self.coerce(float(Fraction(text)))
                return self.coerce(float(text))
            if isinstance(token, bool):
                raise InvalidState(f"not a scalar: {token!r}")
            return self.coerce(token)
        except (ValueError, ZeroDivisionError) as e:
            if isinstance(e, InvalidState):
                raise
            raise InvalidState(f"cannot parse scalar {token!r}: {e}")


def format_scalar(value):
    """External representation of a scalar (JSON-ready)"""
    value = primal_of(value)
    if isinstance(value, Rational):
        value = Fraction(value)
        if value.denominator == 1:
            return str(value.numerator)
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, Real):
        return repr(float(value))
    return {"re": float(value.real), "im": float(value.imag)}


def decimal_of(value) -> str:
    """Approximate decimal string, used for optional CSV columns"""
    value = primal_of(value)
    if isinstance(value, Complex) and not isinstance(value, Real):
        return f"{value.real:.12g}{value.imag:+.12g}j"
    return f"{float(value):.12g}"


def check_finite(value, name: str = "value"):
    value = primal_of(value)
    if isinstance(value, Rational):
        return
    if isinstance(value, Real):
        if not math.isfinite(value):
            raise InvalidState(f"{name} is not finite")
        return
    if not (math.isfinite(value.real) and math.isfinite(value.imag)):
        raise InvalidState(f"{name} is not finite")


def check_size(values: Sequence) -> None:
    """Raise SizeLimitExceeded when a rational outgrows PENTALAB_MAX_BITS"""
    limit = max_bits()
    for value in values:
        value = primal_of(value)
        if isinstance(value, Fraction):
            bits = max(value.numerator.bit_length(), value.denominator.bit_length())
            if bits > limit:
                raise SizeLimitExceeded(
                    f"rational value needs {bits} bits, limit is {limit} (PENTALAB_MAX_BITS)")


# --- field operations -----------------------------------------------------

def product(values, start=1):
    result = start
    for v in values:
        result = result * v
    return result


def close(a, b, tol: float = None) -> bool:
    """Exact equality on rationals, relative closeness otherwise"""
    a, b = primal_of(a), primal_of(b)
    if isinstance(a, Rational) and isinstance(b, Rational):
        return a == b
    tol = float_tol() if tol is None else tol
    scale = max(1.0, abs(a), abs(b))
    return abs(a - b) <= tol * scale


def all_close(xs: Sequence, ys: Sequence, tol: float = None) -> bool:
    return len(xs) == len(ys) and all(close(a, b, tol) for a, b in zip(xs, ys))


# --- differentiation ----------------------------------------------------------

def jacobian(f: Callable[[List], Sequence], at: Sequence) -> List[List]:
    """Jacobian of f at a point, one dual-number evaluation

    Exact when the point is rational. Raises PoleEncountered when an
    intermediate division hits zero.
    """
    width = len(at)
    try:
        outputs = f(Dual.seed(list(at)))
    except ZeroDivisionError as e:
        raise PoleEncountered(f"pole hit while differentiating: {e}")
    return [list(tangent_of(out, width)) for out in outputs]


def gradient(f: Callable[[List], object], at: Sequence) -> List:
    """Gradient of a scalar function"""
    return jacobian(lambda v: [f(v)], at)[0]


def finite_difference_jacobian(f: Callable[[List], Sequence], at: Sequence,
                               h: float = 1e-6) -> List[List[float]]:
    """Central-difference Jacobian on floats, the oracle for dual numbers"""
    point = np.array([complex(v) if isinstance(v, complex) else float(v) for v in at])
    columns = []
    for j in range(len(point)):
        step = np.zeros_like(point)
        step[j] = h
        forward = np.array(list(f(list(point + step))))
        backward = np.array(list(f(list(point - step))))
        columns.append((forward - backward) / (2 * h))
    return np.array(columns).T.tolist()


# --- randomness -----------------------------------------------------------------

def random_rational(rng: np.random.Generator, bound: int = 9) -> Fraction:
    """Nonzero p/q with |p| <= bound and 1 <= q <= bound"""
    numerator = 0
    while numerator == 0:
        numerator = int(rng.integers(-bound, bound + 1))
    denominator = int(rng.integers(1, bound + 1))
    return Fraction(numerator, denominator)


def random_scalar(rng: np.random.Generator, backend: Backend, bound: int = 9):
    """Random nonzero scalar for the given backend"""
    if backend is Backend.RATIONAL:
        return random_rational(rng, bound)
    if backend is Backend.FLOAT:
        value = 0.0
        while abs(value) < 0.1:
            value = float(rng.uniform(-2.0, 2.0))
        return value
    return complex(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0))
