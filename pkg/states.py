#!/usr/bin/env python
"""
Coordinate systems for higher pentagram maps

States are immutable, n-periodic sequences of scalars. The public data model
is 1-based and cyclic (x_1 ... x_n, x_0 = x_n); storage is 0-based tuples and
`cyclic()` is the only place where the two conventions meet.

    XYState      (x, y)        network weights, sigma_i = x_i + y_i
    PQState      (p, q)        tau-coordinates on the quiver Q_{k,n}
    CornerState  (X, Y)        corner invariants, k = 3 only
    EdgeWeights  (a, b, c, d)  edge weights around the faces of the network
"""

from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from errors import BadSpan, InvalidState, NotOnCasimirLevel, WrongSpan
from scalars import (Backend, check_finite, check_size, close, is_zero, primal_of,
                     product, random_scalar)


def cyclic(seq: Sequence, i: int):
    """Entry i (1-based, taken mod n) of a stored 0-based sequence"""
    return seq[(i - 1) % len(seq)]


def down_product(seq: Sequence, start: int, stop: int):
    """seq_start * seq_{start-1} * ... * seq_stop; empty (= 1) when stop > start"""
    return product(cyclic(seq, j) for j in range(start, stop - 1, -1))


def _validate(name: str, values: Tuple, n: int) -> None:
    if len(values) != n:
        raise InvalidState(f"{name} has length {len(values)}, expected n = {n}")
    for i, v in enumerate(values, start=1):
        check_finite(v, f"{name}_{i}")
        if is_zero(v):
            raise InvalidState(f"{name}_{i} is zero", index=i)


@dataclass(frozen=True)
class MapParams:
    """Span k and period n with the index offsets r and r'"""
    k: int  # span
    n: int  # period

    def __post_init__(self):
        if not (2 <= self.k <= self.n):
            raise BadSpan(f"need 2 <= k <= n, got k = {self.k}, n = {self.n}")

    @property
    def r(self) -> int:
        return self.k // 2 - 1

    @property
    def rprime(self) -> int:
        return self.k - 2 - self.r

    @property
    def stable(self) -> bool:
        """n >= 2k - 1, where the xy bracket is known"""
        return self.n >= 2 * self.k - 1

    @property
    def odd(self) -> bool:
        return self.k % 2 == 1


@dataclass(frozen=True)
class XYState:
    """Weights (x_i, y_i) of the cylindric network"""
    params: MapParams
    x: Tuple
    y: Tuple

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "y", tuple(self.y))
        _validate("x", self.x, self.params.n)
        _validate("y", self.y, self.params.n)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    def x_(self, i: int):
        return cyclic(self.x, i)

    def y_(self, i: int):
        return cyclic(self.y, i)

    def sigma(self, i: int):
        return cyclic(self.x, i) + cyclic(self.y, i)

    @property
    def backend(self) -> Backend:
        return Backend.of_values(self.x + self.y)

    def values(self) -> list:
        return list(self.x) + list(self.y)

    @classmethod
    def from_values(cls, params: MapParams, values: Sequence) -> "XYState":
        n = params.n
        return cls(params, tuple(values[:n]), tuple(values[n:2 * n]))

    @classmethod
    def constant(cls, params: MapParams, a, b) -> "XYState":
        return cls(params, (a,) * params.n, (b,) * params.n)

    def scaled(self, t) -> "XYState":
        return XYState(self.params, tuple(t * v for v in self.x), tuple(t * v for v in self.y))

    def shifted(self, s: int = 1) -> "XYState":
        """State with entries i -> i + s"""
        idx = range(1 + s, self.n + 1 + s)
        return XYState(self.params, tuple(self.x_(i) for i in idx), tuple(self.y_(i) for i in idx))


@dataclass(frozen=True)
class PQState:
    """tau-coordinates p_i, q_i"""
    params: MapParams
    p: Tuple
    q: Tuple

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(self.p))
        object.__setattr__(self, "q", tuple(self.q))
        _validate("p", self.p, self.params.n)
        _validate("q", self.q, self.params.n)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def k(self) -> int:
        return self.params.k

    def p_(self, i: int):
        return cyclic(self.p, i)

    def q_(self, i: int):
        return cyclic(self.q, i)

    @property
    def backend(self) -> Backend:
        return Backend.of_values(self.p + self.q)

    def casimir(self):
        """prod p_i q_i"""
        return product(self.p) * product(self.q)

    def values(self) -> list:
        return list(self.p) + list(self.q)

    @classmethod
    def from_values(cls, params: MapParams, values: Sequence) -> "PQState":
        n = params.n
        return cls(params, tuple(values[:n]), tuple(values[n:2 * n]))

    def shifted(self, s: int = 1) -> "PQState":
        idx = range(1 + s, self.n + 1 + s)
        return PQState(self.params, tuple(self.p_(i) for i in idx), tuple(self.q_(i) for i in idx))


@dataclass(frozen=True)
class CornerState:
    """Corner invariants (X_i, Y_i) of a twisted polygon in the plane"""
    n: int
    X: Tuple
    Y: Tuple

    def __post_init__(self):
        object.__setattr__(self, "X", tuple(self.X))
        object.__setattr__(self, "Y", tuple(self.Y))
        if self.n < 3:
            raise BadSpan(f"corner coordinates need n >= 3, got {self.n}")
        _validate("X", self.X, self.n)
        _validate("Y", self.Y, self.n)

    def X_(self, i: int):
        return cyclic(self.X, i)

    def Y_(self, i: int):
        return cyclic(self.Y, i)

    @property
    def backend(self) -> Backend:
        return Backend.of_values(self.X + self.Y)

    def values(self) -> list:
        return list(self.X) + list(self.Y)

    @classmethod
    def from_values(cls, n: int, values: Sequence) -> "CornerState":
        return cls(n, tuple(values[:n]), tuple(values[n:2 * n]))

    def rescaled(self, t) -> "CornerState":
        """The R^* action (X, Y) -> (t X, Y / t)"""
        return CornerState(self.n, tuple(t * v for v in self.X), tuple(v / t for v in self.Y))

    def shifted(self, s: int = 1) -> "CornerState":
        idx = range(1 + s, self.n + 1 + s)
        return CornerState(self.n, tuple(self.X_(i) for i in idx), tuple(self.Y_(i) for i in idx))


@dataclass(frozen=True)
class EdgeWeights:
    """Weights a_i, b_i, c_i, d_i on the edges around face p_i"""
    params: MapParams
    a: Tuple
    b: Tuple
    c: Tuple
    d: Tuple

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
            _validate(name, getattr(self, name), self.params.n)

    @property
    def n(self) -> int:
        return self.params.n


# --- conversions -----------------------------------------------------------------

def xy_to_pq(s: XYState) -> PQState:
    """p_i = y_i / x_i,  q_i = x_{i+r+1} / y_{i+r}"""
    r = s.params.r
    n = s.n
    p = tuple(s.y_(i) / s.x_(i) for i in range(1, n + 1))
    q = tuple(s.x_(i + r + 1) / s.y_(i + r) for i in range(1, n + 1))
    return PQState(s.params, p, q)


def pq_to_xy(s: PQState, x1) -> XYState:
    """Inverse of xy_to_pq on the level set prod p_i q_i = 1, fibre coordinate x1"""
    if not close(s.casimir(), 1):
        raise NotOnCasimirLevel(f"prod p_i q_i = {primal_of(s.casimir())}, expected 1")
    if is_zero(x1):
        raise InvalidState("x1 must be nonzero")
    r = s.params.r
    xs = [x1]
    for i in range(1, s.n):
        xs.append(xs[-1] * s.p_(i) * s.q_(i - r))
    ys = [xs[i - 1] * s.p_(i) for i in range(1, s.n + 1)]
    check_size(xs + ys)
    return XYState(s.params, tuple(xs), tuple(ys))


def xy_to_corner(s: XYState) -> CornerState:
    """Y_i = x_i,  X_{i+1} = -y_i / (x_i x_{i+1}); k = 3 only"""
    if s.k != 3:
        raise WrongSpan(f"corner coordinates exist for k = 3 only, got k = {s.k}")
    n = s.n
    Y = tuple(s.x)
    X = tuple(-s.y_(i - 1) / (s.x_(i - 1) * s.x_(i)) for i in range(1, n + 1))
    return CornerState(n, X, Y)


def corner_to_xy(s: CornerState) -> XYState:
    """x_i = Y_i,  y_i = -Y_i X_{i+1} Y_{i+1}"""
    n = s.n
    x = tuple(s.Y)
    y = tuple(-s.Y_(i) * s.X_(i + 1) * s.Y_(i + 1) for i in range(1, n + 1))
    return XYState(MapParams(3, n), x, y)


def edgeweights_to_xy(w: EdgeWeights) -> XYState:
    """Face weights of the elementary networks glued into (x, y)"""
    k, n = w.params.k, w.params.n
    x, y = [], []
    for i in range(1, n + 1):
        x.append(cyclic(w.a, i) / (down_product(w.b, i - 1, i - k + 2) *
                                   down_product(w.c, i - 1, i - k + 1)))
        y.append(cyclic(w.d, i) / (down_product(w.b, i, i - k + 2) *
                                   down_product(w.c, i, i - k + 1)))
    return XYState(w.params, tuple(x), tuple(y))


def gauge_transform(w: EdgeWeights, g: Sequence, h: Sequence) -> EdgeWeights:
    """Gauge action: b_i -> b_i g_i, c_i -> c_i h_i, a and d compensate

    a_i -> a_i (g_{i-1}...g_{i-k+2}) (h_{i-1}...h_{i-k+1})
    d_i -> d_i (g_i...g_{i-k+2}) (h_i...h_{i-k+1})
    """
    k, n = w.params.k, w.params.n
    idx = range(1, n + 1)
    a = tuple(cyclic(w.a, i) * down_product(g, i - 1, i - k + 2) * down_product(h, i - 1, i - k + 1)
              for i in idx)
    d = tuple(cyclic(w.d, i) * down_product(g, i, i - k + 2) * down_product(h, i, i - k + 1)
              for i in idx)
    b = tuple(cyclic(w.b, i) * cyclic(g, i) for i in idx)
    c = tuple(cyclic(w.c, i) * cyclic(h, i) for i in idx)
    return EdgeWeights(w.params, a, b, c, d)


# --- random states -------------------------------------------------------------------

def random_xy_state(rng: np.random.Generator, params: MapParams,
                    backend: Backend = Backend.RATIONAL, bound: int = 9) -> XYState:
    """Random state with sigma_i != 0"""
    while True:
        x = [random_scalar(rng, backend, bound) for _ in range(params.n)]
        y = [random_scalar(rng, backend, bound) for _ in range(params.n)]
        if all(not is_zero(a + b) for a, b in zip(x, y)):
            return XYState(params, tuple(x), tuple(y))


def random_pq_state(rng: np.random.Generator, params: MapParams,
                    backend: Backend = Backend.RATIONAL, bound: int = 9) -> PQState:
    """Random state with 1 + p_i != 0 (not on any particular Casimir level)"""
    while True:
        p = [random_scalar(rng, backend, bound) for _ in range(params.n)]
        q = [random_scalar(rng, backend, bound) for _ in range(params.n)]
        if all(not is_zero(1 + v) for v in p):
            return PQState(params, tuple(p), tuple(q))


def random_corner_state(rng: np.random.Generator, n: int,
                        backend: Backend = Backend.RATIONAL, bound: int = 9) -> CornerState:
    """Random corner invariants with X_i Y_i != 1"""
    while True:
        X = [random_scalar(rng, backend, bound) for _ in range(n)]
        Y = [random_scalar(rng, backend, bound) for _ in range(n)]
        if all(not is_zero(1 - a * b) for a, b in zip(X, Y)):
            return CornerState(n, tuple(X), tuple(Y))
