#!/usr/bin/env python
"""
The discrete maps

    tk_step                 T_k on (x, y)
    tbar_step               the induced map on (p, q), both parity branches
    dk_apply / dbar_apply   the auxiliary map D_k and its (p, q) shadow
    tk_inverse              D_k . T_k . D_k
    pentagram_corner_step   the classical map on corner invariants (k = 3)

All maps are pure functions on immutable states. A vanishing denominator
raises a GenericityError subclass carrying the 1-based offending index.
"""

import logging
from typing import Callable, List, TypeVar

from errors import CornerDenominatorVanishes, PDenominatorVanishes, SigmaVanishes
from scalars import check_size, is_zero, product
from states import (CornerState, MapParams, PQState, XYState, corner_to_xy, cyclic,
                    xy_to_corner)

logger = logging.getLogger(__name__)

State = TypeVar("State")


def _check_sigmas(s: XYState) -> None:
    for j in range(1, s.n + 1):
        if is_zero(s.sigma(j)):
            raise SigmaVanishes(j)


def _check_one_plus_p(s: PQState) -> None:
    for i in range(1, s.n + 1):
        if is_zero(1 + s.p_(i)):
            raise PDenominatorVanishes(i)


def tk_step(s: XYState) -> XYState:
    """One step of T_k

    x*_i = x_{i-r'-1} sigma_{i+r} / sigma_{i-r'-1}
    y*_i = y_{i-r'} sigma_{i+r+1} / sigma_{i-r'}
    """
    _check_sigmas(s)
    r, rp = s.params.r, s.params.rprime
    x, y = [], []
    for i in range(1, s.n + 1):
        x.append(s.x_(i - rp - 1) * s.sigma(i + r) / s.sigma(i - rp - 1))
        y.append(s.y_(i - rp) * s.sigma(i + r + 1) / s.sigma(i - rp))
    check_size(x + y)
    return XYState(s.params, tuple(x), tuple(y))


def tbar_step(s: PQState) -> PQState:
    """One step of the induced map on (p, q)

    even k:  q*_i = 1/p_i,
             p*_i = q_i (1+p_{i-r-1})(1+p_{i+r+1}) p_{i-r} p_{i+r} / ((1+p_{i-r})(1+p_{i+r}))
    odd k:   q*_i = 1/p_{i-1},
             p*_i = q_i (1+p_{i-r-2})(1+p_{i+r+1}) p_{i-r-1} p_{i+r} / ((1+p_{i-r-1})(1+p_{i+r}))
    """
    _check_one_plus_p(s)
    r = s.params.r
    P = s.p_
    p, q = [], []
    for i in range(1, s.n + 1):
        if s.params.odd:
            q.append(1 / P(i - 1))
            p.append(s.q_(i) * (1 + P(i - r - 2)) * (1 + P(i + r + 1)) * P(i - r - 1) * P(i + r)
                     / ((1 + P(i - r - 1)) * (1 + P(i + r))))
        else:
            q.append(1 / P(i))
            p.append(s.q_(i) * (1 + P(i - r - 1)) * (1 + P(i + r + 1)) * P(i - r) * P(i + r)
                     / ((1 + P(i - r)) * (1 + P(i + r))))
    check_size(p + q)
    return PQState(s.params, tuple(p), tuple(q))


def dk_apply(s: XYState) -> XYState:
    """The auxiliary map D_k

    x*_i = (y_{i-r} ... y_{i+r'-1}) / (x_{i-r} ... x_{i+r'})
    y*_i = (y_{i-r} ... y_{i+r'})   / (x_{i-r} ... x_{i+r'+1})
    """
    r, rp = s.params.r, s.params.rprime
    x, y = [], []
    for i in range(1, s.n + 1):
        ys = product(s.y_(j) for j in range(i - r, i + rp))
        xs = product(s.x_(j) for j in range(i - r, i + rp + 1))
        x.append(ys / xs)
        y.append(ys * s.y_(i + rp) / (xs * s.x_(i + rp + 1)))
    check_size(x + y)
    return XYState(s.params, tuple(x), tuple(y))


def dbar_apply(s: PQState) -> PQState:
    """even k: p_i -> 1/q_i, q_i -> 1/p_i;  odd k: p_i -> 1/q_{i+1}, q_i -> 1/p_i"""
    offset = 1 if s.params.odd else 0
    p = tuple(1 / s.q_(i + offset) for i in range(1, s.n + 1))
    q = tuple(1 / s.p_(i) for i in range(1, s.n + 1))
    return PQState(s.params, p, q)


def tk_inverse(s: XYState) -> XYState:
    return dk_apply(tk_step(dk_apply(s)))


def tbar_inverse(s: PQState) -> PQState:
    return dbar_apply(tbar_step(dbar_apply(s)))


def pentagram_corner_step(s: CornerState) -> CornerState:
    """The pentagram map in corner invariants

    X*_i = X_i (1 - X_{i-1} Y_{i-1}) / (1 - X_{i+1} Y_{i+1})
    Y*_i = Y_{i+1} (1 - X_{i+2} Y_{i+2}) / (1 - X_i Y_i)
    """
    u = [1 - a * b for a, b in zip(s.X, s.Y)]
    for j, value in enumerate(u, start=1):
        if is_zero(value):
            raise CornerDenominatorVanishes(j)
    X = tuple(s.X_(i) * cyclic(u, i - 1) / cyclic(u, i + 1) for i in range(1, s.n + 1))
    Y = tuple(s.Y_(i + 1) * cyclic(u, i + 2) / cyclic(u, i) for i in range(1, s.n + 1))
    check_size(X + Y)
    return CornerState(s.n, X, Y)


def corner_conjugate_step(s: CornerState) -> CornerState:
    """T_3 read in corner invariants; equals pentagram_corner_step(s).shifted(-1)"""
    return xy_to_corner(tk_step(corner_to_xy(s)))


def q_dynamics_span(params: MapParams) -> int:
    """Span k' = n + 2 - k whose p-dynamics is the q-dynamics of span k"""
    return params.n + 2 - params.k


def orbit(step: Callable[[State], State], state: State, steps: int) -> List[State]:
    """[state, step(state), ..., step^steps(state)]"""
    states = [state]
    for _ in range(steps):
        states.append(step(states[-1]))
    logger.debug("orbit of %s: %d steps", getattr(step, "__name__", step), steps)
    return states
