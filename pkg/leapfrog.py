#!/usr/bin/env python
"""
Leapfrog dynamics on the projective line (k = 2)

An S-pair is two twisted n-gons (S-, S) in the projective line sharing one
Moebius monodromy. The leapfrog map F_2 sends (S-, S) to (S, S+), where S+_i
is the image of S-_i under the projective involution fixing S_i and
swapping S_{i-1}, S_{i+1}. Over the complex numbers the same point comes
out of two pairs of tangent circles (H_2).

Points are scalars or INFINITY. Every projective formula is evaluated in an
affine chart z -> 1/(z - c) chosen so that no operand is infinite.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from dynamics import orbit
from errors import (DegenerateConfiguration, DegenerateQuadruple, InconsistentSeed,
                    InvalidState)
from scalars import (Backend, check_finite, check_size, float_tol, is_zero, jacobian, primal_of,
                     random_scalar)
from states import MapParams, PQState, XYState

logger = logging.getLogger(__name__)


class _Infinity:
    """The point at infinity of the projective line"""
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    def __reduce__(self):
        return (_Infinity, ())


INFINITY = _Infinity()

Point = Union[Fraction, float, complex, _Infinity]


def is_infinite(z) -> bool:
    return z is INFINITY


def _same(a, b) -> bool:
    if is_infinite(a) or is_infinite(b):
        return a is b
    return is_zero(a - b)


@dataclass(frozen=True)
class Mobius:
    """z -> (a z + b) / (c z + d), total on the projective line"""
    a: object
    b: object
    c: object
    d: object

    def __post_init__(self):
        if is_zero(self.a * self.d - self.b * self.c):
            raise DegenerateConfiguration("Moebius map with ad - bc = 0")

    @classmethod
    def identity(cls, one=1) -> "Mobius":
        return cls(one, one * 0, one * 0, one)

    def __call__(self, z):
        if is_infinite(z):
            return INFINITY if is_zero(self.c) else self.a / self.c
        denominator = self.c * z + self.d
        if is_zero(denominator):
            return INFINITY
        return (self.a * z + self.b) / denominator

    def compose(self, other: "Mobius") -> "Mobius":
        """self after other"""
        return Mobius(self.a * other.a + self.b * other.c,
                      self.a * other.b + self.b * other.d,
                      self.c * other.a + self.d * other.c,
                      self.c * other.b + self.d * other.d)

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def power(self, e: int) -> "Mobius":
        base = self if e >= 0 else self.inverse()
        result = Mobius.identity(_unit(self.a, self.d))
        for _ in range(abs(e)):
            result = base.compose(result)
        return result

    def matrix(self) -> List[List]:
        return [[self.a, self.b], [self.c, self.d]]

    @classmethod
    def to_zero_inf_one(cls, z1, z2, z3) -> "Mobius":
        """Map sending z1, z2, z3 to 0, INFINITY, 1"""
        if _same(z1, z2) or _same(z2, z3) or _same(z1, z3):
            raise DegenerateConfiguration("triple of points is not distinct")
        if is_infinite(z1):
            return cls(0, z3 - z2, 1, -z2)
        if is_infinite(z2):
            return cls(1, -z1, 0, z3 - z1)
        if is_infinite(z3):
            return cls(1, -z1, 1, -z2)
        return cls(z3 - z2, -z1 * (z3 - z2), z3 - z1, -z2 * (z3 - z1))


def _unit(*values):
    for v in values:
        if not is_infinite(v):
            return v * 0 + 1
    return 1


def mobius_from_triples(source: Sequence, target: Sequence) -> Mobius:
    """The unique Moebius map sending source[j] to target[j]"""
    return Mobius.to_zero_inf_one(*target).inverse().compose(Mobius.to_zero_inf_one(*source))


def _chart(points: Sequence) -> Optional["Mobius"]:
    """z -> 1/(z - c) with c an integer off all finite points, or None when all are finite"""
    if not any(is_infinite(z) for z in points):
        return None
    finite = [z for z in points if not is_infinite(z)]
    one = _unit(*finite)
    c = 0
    while any(is_zero(z - c) for z in finite):
        c += 1
    return Mobius(one * 0, one, one, -c * one)


def _in_chart(points: Sequence) -> Tuple[List, Optional[Mobius]]:
    shift = _chart(points)
    if shift is None:
        return list(points), None
    return [shift(z) for z in points], shift


def cross_ratio(a, b, c, d):
    """[a, b, c, d] = (a - b)(c - d) / ((a - d)(b - c))"""
    if _same(a, d) or _same(b, c):
        raise DegenerateQuadruple(f"cross-ratio of {a!r}, {b!r}, {c!r}, {d!r} is undefined")
    (a, b, c, d), _ = _in_chart([a, b, c, d])
    return (a - b) * (c - d) / ((a - d) * (b - c))


# --- S-pairs ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SPairState:
    """Pair (S-, S) of twisted n-gons with S_{i+n} = monodromy(S_i), indices 1-based"""
    n: int
    s_minus: Tuple
    s: Tuple
    monodromy: Mobius

    def __post_init__(self):
        object.__setattr__(self, "s_minus", tuple(self.s_minus))
        object.__setattr__(self, "s", tuple(self.s))
        if self.n < 1:
            raise InvalidState(f"an S-pair needs n >= 1, got {self.n}")
        for name, points in (("s_minus", self.s_minus), ("s", self.s)):
            if len(points) != self.n:
                raise InvalidState(f"{name} has {len(points)} points, expected {self.n}")
            for j, z in enumerate(points, start=1):
                if not is_infinite(z):
                    check_finite(z, f"{name}[{j}]")

    def _twisted(self, points: Tuple, i: int):
        q, r = divmod(i - 1, self.n)
        z = points[r]
        return z if q == 0 else self.monodromy.power(q)(z)

    def sminus_(self, i: int):
        return self._twisted(self.s_minus, i)

    def s_(self, i: int):
        return self._twisted(self.s, i)

    @property
    def backend(self) -> Backend:
        finite = [z for z in self.s_minus + self.s if not is_infinite(z)]
        return Backend.of_values(finite + [self.monodromy.a, self.monodromy.d])

    def values(self) -> List:
        return list(self.s_minus) + list(self.s)

    @classmethod
    def from_values(cls, n: int, values: Sequence, monodromy: Mobius) -> "SPairState":
        return cls(n, tuple(values[:n]), tuple(values[n:]), monodromy)

    def transformed(self, g: Mobius) -> "SPairState":
        """Image under the Moebius map g; the monodromy is conjugated"""
        return SPairState(self.n, tuple(g(z) for z in self.s_minus), tuple(g(z) for z in self.s),
                          g.compose(self.monodromy).compose(g.inverse()))


def random_spair_state(rng: np.random.Generator, n: int, backend: Backend = Backend.RATIONAL,
                       bound: int = 9, attempts: int = 100) -> SPairState:
    """Random S-pair with distinct points and an invertible monodromy; resampled until phi and f2_step are defined"""
    for _ in range(attempts):
        draw = [random_scalar(rng, backend, bound) for _ in range(2 * n + 4)]
        try:
            mono = Mobius(*draw[2 * n:])
            state = SPairState(n, tuple(draw[:n]), tuple(draw[n:2 * n]), mono)
            f2_step(state)
            if n >= 2:
                phi(state)
                phi(f2_step(state))
        except (DegenerateConfiguration, DegenerateQuadruple, InvalidState, ZeroDivisionError):
            continue
        return state
    raise DegenerateConfiguration(f"no generic S-pair found in {attempts} attempts")


# --- phi ---------------------------------------------------------------------------------

def _difference_ratio(i: int, numerator: Sequence[Tuple], denominator: Sequence[Tuple]):
    points = [z for pair in list(numerator) + list(denominator) for z in pair]
    values, _ = _in_chart(points)
    it = iter(values)
    top = 1
    for _ in numerator:
        top = top * (next(it) - next(it))
    bottom = 1
    for _ in denominator:
        diff = next(it) - next(it)
        if is_zero(diff):
            raise DegenerateConfiguration(f"coincident points in the formula for index {i}", i)
        bottom = bottom * diff
    return top / bottom


def phi(s: SPairState) -> XYState:
    """(x, y) coordinates of an S-pair; invariant under Moebius maps"""
    params = MapParams(2, s.n)
    x, y = [], []
    S, M = s.s_, s.sminus_
    for i in range(1, s.n + 1):
        x.append(_difference_ratio(
            i,
            [(S(i + 1), M(i + 2)), (M(i), M(i + 1))],
            [(M(i), S(i + 1)), (M(i + 1), M(i + 2))]))
        y.append(_difference_ratio(
            i,
            [(M(i + 1), S(i + 1)), (M(i + 2), S(i + 2)), (M(i), M(i + 1))],
            [(M(i + 1), S(i + 2)), (M(i), S(i + 1)), (M(i + 1), M(i + 2))]))
    check_size(x + y)
    return XYState(params, tuple(x), tuple(y))


def phi_pq(s: SPairState) -> PQState:
    """(p, q) of an S-pair as cross-ratios; equals xy_to_pq(phi(s))"""
    params = MapParams(2, s.n)
    S, M = s.s_, s.sminus_
    p, q = [], []
    for i in range(1, s.n + 1):
        p.append(cross_ratio(M(i + 1), S(i + 1), M(i + 2), S(i + 2)))
        q.append(cross_ratio(M(i), S(i + 1), S(i + 2), M(i + 3))
                 * cross_ratio(M(i + 1), M(i + 2), S(i + 2), M(i + 3))
                 / (cross_ratio(M(i), M(i + 1), M(i + 2), M(i + 3))
                    * cross_ratio(M(i + 1), S(i + 1), S(i + 2), M(i + 3))))
    return PQState(params, tuple(p), tuple(q))


# --- the leapfrog map -------------------------------------------------------------------------

def _local_chart(i: int, prev, center, nxt, minus) -> Tuple[List, Optional[Mobius]]:
    if _same(prev, center) or _same(nxt, center) or _same(minus, center):
        raise DegenerateConfiguration(f"a neighbour of S_{i} coincides with it", i)
    return _in_chart([prev, center, nxt, minus])


def _back(point, shift: Optional[Mobius]):
    return point if shift is None else shift.inverse()(point)


def leap(prev, center, nxt, minus, i: int = 0):
    """S+ from 1/(S+ - S) + 1/(S- - S) = 1/(S_{i+1} - S) + 1/(S_{i-1} - S)"""
    (prev, center, nxt, minus), shift = _local_chart(i, prev, center, nxt, minus)
    w_plus = 1 / (prev - center) + 1 / (nxt - center) - 1 / (minus - center)
    plus = INFINITY if is_zero(w_plus) else center + 1 / w_plus
    return _back(plus, shift)


def menelaus_residual(prev, center, nxt, minus, plus):
    """Left side of the product form plus one; zero exactly when plus is the leapfrog image"""
    points, _ = _in_chart([plus, nxt, center, minus, prev])
    plus, nxt, center, minus, prev = points
    denominator = (plus - center) * (nxt - center) * (minus - prev)
    if is_zero(denominator):
        raise DegenerateConfiguration("coincident points in the product form")
    return (plus - nxt) * (center - minus) * (center - prev) / denominator + 1


def f2_step(s: SPairState) -> SPairState:
    """(S-, S) -> (S, S+)"""
    plus = tuple(leap(s.s_(i - 1), s.s_(i), s.s_(i + 1), s.sminus_(i), i) for i in range(1, s.n + 1))
    check_size([z for z in plus if not is_infinite(z)])
    return SPairState(s.n, s.s, plus, s.monodromy)


def leapfrog_orbit(s: SPairState, steps: int) -> List[SPairState]:
    return orbit(f2_step, s, steps)


def _complex(z) -> complex:
    return complex(primal_of(z))


def _parallelogram_vertex(a: complex, b: complex, m: complex) -> complex:
    """Intersection of the line through b parallel to (a, m) and the line through a parallel to (b, m)"""
    d1, d2 = m - a, m - b
    system = np.array([[d1.real, -d2.real], [d1.imag, -d2.imag]])
    rhs = np.array([(a - b).real, (a - b).imag])
    scale = max(1.0, abs(d1) * abs(d2))
    if abs(np.linalg.det(system)) <= float_tol() * scale:
        # a, b, m collinear: the circles are lines through S_i
        return a + b - m
    s, _ = np.linalg.solve(system, rhs)
    return b + s * d1


def h2_step(s: SPairState) -> SPairState:
    """F_2 by tangent circles, computed in the chart w = 1/(z - S_i)

    Circles through S_i become lines there and tangency at S_i becomes
    parallelism, so S+ is the fourth vertex of a parallelogram.
    """
    plus = []
    for i in range(1, s.n + 1):
        points, shift = _local_chart(i, s.s_(i - 1), s.s_(i), s.s_(i + 1), s.sminus_(i))
        prev, center, nxt, minus = (_complex(z) for z in points)
        w_plus = _parallelogram_vertex(1 / (prev - center), 1 / (nxt - center), 1 / (minus - center))
        point = INFINITY if w_plus == 0 else center + 1 / w_plus
        plus.append(_back(point, shift))
    return SPairState(s.n, s.s, tuple(plus), s.monodromy)


@dataclass(frozen=True)
class Circle:
    center: complex
    radius: float


@dataclass(frozen=True)
class Line:
    point: complex
    direction: complex


def circle_through(a: complex, b: complex, c: complex) -> Union[Circle, Line]:
    """Circumcircle of three points, or the line through them when collinear"""
    system = 2 * np.array([[(b - a).real, (b - a).imag], [(c - a).real, (c - a).imag]])
    rhs = np.array([abs(b) ** 2 - abs(a) ** 2, abs(c) ** 2 - abs(a) ** 2])
    if abs(np.linalg.det(system)) <= float_tol() * max(1.0, abs(b - a) * abs(c - a)):
        if a == b and b == c:
            raise DegenerateConfiguration("circle through a single point")
        far = max((b, c), key=lambda z: abs(z - a))
        return Line(a, far - a)
    x, y = np.linalg.solve(system, rhs)
    center = complex(x, y)
    return Circle(center, float(abs(a - center)))


def circle_pattern(s: SPairState, i: int) -> Dict[str, object]:
    """The four circles of the construction at site i and the points involved"""
    prev, center, nxt, minus = (s.s_(i - 1), s.s_(i), s.s_(i + 1), s.sminus_(i))
    plus = h2_step(s).s_(i)
    points = [prev, center, nxt, minus, plus]
    if any(is_infinite(z) for z in points):
        raise DegenerateConfiguration(f"circle pattern at site {i} passes through infinity", i)
    prev, center, nxt, minus, plus = (_complex(z) for z in points)
    return {
        "site": i,
        "points": {"S_prev": prev, "S": center, "S_next": nxt, "S_minus": minus, "S_plus": plus},
        "circles": [
            circle_through(prev, minus, center),
            circle_through(center, nxt, plus),
            circle_through(nxt, minus, center),
            circle_through(center, prev, plus),
        ],
    }


# --- the invariant 2-form ----------------------------------------------------------------------

def omega_eval(s: SPairState, u: Sequence, v: Sequence):
    """sum (u-_i v_i - v-_i u_i) / (S-_i - S_i)^2; tangents are flat (dS-, dS) lists"""
    n = s.n
    if len(u) != 2 * n or len(v) != 2 * n:
        raise InvalidState(f"tangent vectors must have {2 * n} components")
    total = 0
    for i in range(n):
        a, b = s.s_minus[i], s.s[i]
        if is_infinite(a) or is_infinite(b) or is_zero(a - b):
            raise DegenerateConfiguration(f"omega is singular at site {i + 1}", i + 1)
        total = total + (u[i] * v[n + i] - v[i] * u[n + i]) / (a - b) ** 2
    return total


def pushforward(s: SPairState, u: Sequence) -> List:
    """Image of the tangent vector u under the differential of f2_step (monodromy held fixed)"""

    def step(values):
        image = f2_step(SPairState.from_values(s.n, values, s.monodromy))
        return image.values()

    if any(is_infinite(z) for z in s.values()):
        raise DegenerateConfiguration("tangent vectors at infinity are not supported")
    jac = jacobian(step, s.values())
    return [sum(row[j] * u[j] for j in range(len(u))) for row in jac]


# --- lattice ----------------------------------------------------------------------------------

@dataclass(frozen=True)
class LatticeField:
    """Values z[m][n] on a rectangle; None where not yet known"""
    values: Tuple[Tuple, ...]
    q: Optional[object] = None

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(tuple(row) for row in self.values))

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.values), len(self.values[0]) if self.values else 0

    def at(self, m: int, n: int):
        rows, cols = self.shape
        if 0 <= m < rows and 0 <= n < cols:
            return self.values[m][n]
        return None

    def rows(self) -> List[Dict]:
        """Flat records (m, n, re, im) for CSV export"""
        records = []
        for m, row in enumerate(self.values):
            for n, z in enumerate(row):
                if z is None or is_infinite(z):
                    continue
                z = _complex(z)
                records.append({"m": m, "n": n, "re": z.real, "im": z.imag})
        return records


def lattice_from_orbit(states: Sequence[SPairState], rows: int, cols: int, q=None) -> LatticeField:
    """Even sublattice from a leapfrog orbit: z[m][n] = P^t_i with t = (m+n)/2, i = (m-n)/2

    P^0 is S- of the first state and P^{t+1} is S of state t.
    """
    layers = [states[0].sminus_] + [state.s_ for state in states]
    values = []
    for m in range(rows):
        row = []
        for n in range(cols):
            if (m + n) % 2:
                row.append(None)
                continue
            t, i = (m + n) // 2, (m - n) // 2
            if t >= len(layers):
                raise InvalidState(f"orbit too short for a {rows}x{cols} lattice")
            row.append(layers[t](i))
        values.append(row)
    return LatticeField(values, q)


def toda_terms(field: LatticeField, m: int, n: int) -> Tuple:
    """The four reciprocal differences of the five-point equation at (m, n), signed so they sum to the residual"""
    z = field.at(m, n)
    stencil = [field.at(m + 1, n + 1), field.at(m - 1, n - 1), field.at(m + 1, n - 1), field.at(m - 1, n + 1)]
    if z is None or any(w is None for w in stencil):
        raise InvalidState(f"five-point stencil at ({m}, {n}) leaves the field")
    (z, *stencil), _ = _in_chart([z] + stencil)
    if any(is_zero(z - w) for w in stencil):
        raise DegenerateConfiguration(f"coincident lattice points around ({m}, {n})")
    ne, sw, se, nw = stencil
    return 1 / (z - ne), 1 / (z - sw), -1 / (z - se), -1 / (z - nw)


def toda_residual(field: LatticeField, m: int, n: int):
    """Left minus right side of the five-point equation at (m, n)"""
    return sum(toda_terms(field, m, n))


def solve_cross_ratio(z00, z10, z11, q):
    """z01 with [z00, z10, z11, z01] = q"""
    (a, b, c), shift = _in_chart([z00, z10, z11])
    denominator = q * (b - c) - (a - b)
    numerator = q * a * (b - c) - c * (a - b)
    if is_zero(denominator) and is_zero(numerator):
        raise DegenerateQuadruple("cross-ratio equation does not determine the fourth point")
    d = INFINITY if is_zero(denominator) else numerator / denominator
    return _back(d, shift)


def _solve_corner(corners: List, missing: int, q):
    a, b, c, d = corners
    if missing == 3:
        return solve_cross_ratio(a, b, c, q)
    if missing == 1:
        return solve_cross_ratio(c, d, a, q)
    if missing == 2:
        return solve_cross_ratio(b, a, d, q)
    return solve_cross_ratio(d, c, b, q)


def crossratio_extend(field: LatticeField, z01, tol: Optional[float] = None) -> LatticeField:
    """Fill the odd sublattice from the even one and z[0][1] using [z_mn, z_m+1n, z_m+1n+1, z_mn+1] = q

    Propagation is breadth-first from (0, 1) across unit squares.
    """
    q = field.q
    if q is None or is_zero(q) or is_zero(q - 1):
        raise InvalidState(f"cross-ratio constant must be set and differ from 0 and 1, got {q!r}")
    rows, cols = field.shape
    if rows < 2 or cols < 2:
        raise InvalidState("lattice needs at least 2x2 sites")
    tol = float_tol() * 1e3 if tol is None else tol
    for m in range(1, rows - 1):
        for n in range(1, cols - 1):
            if (m + n) % 2 == 0:
                terms = toda_terms(field, m, n)
                residual = sum(terms)
                if abs(primal_of(residual)) > tol * max(1.0, sum(abs(primal_of(t)) for t in terms)):
                    raise InconsistentSeed(f"five-point equation fails at ({m}, {n}): {residual}")
    grid = [list(row) for row in field.values]
    grid[0][1] = z01
    queue = [(0, 1)]
    while queue:
        m, n = queue.pop(0)
        # squares with (m, n) as a corner, and its odd partner across each
        for m0, n0 in ((m, n), (m - 1, n), (m, n - 1), (m - 1, n - 1)):
            if not (0 <= m0 < rows - 1 and 0 <= n0 < cols - 1):
                continue
            square = [(m0, n0), (m0 + 1, n0), (m0 + 1, n0 + 1), (m0, n0 + 1)]
            corners = [grid[a][b] for a, b in square]
            unknown = [j for j, z in enumerate(corners) if z is None]
            if len(unknown) != 1:
                continue
            j = unknown[0]
            a, b = square[j]
            grid[a][b] = _solve_corner(corners, j, q)
            queue.append((a, b))
    missing = [(m, n) for m in range(rows) for n in range(cols) if grid[m][n] is None]
    if missing:
        raise InconsistentSeed(f"sites {missing[:3]} were not reached by the extension")
    logger.debug("extended %dx%d lattice with q=%s", rows, cols, q)
    return LatticeField(grid, q)
