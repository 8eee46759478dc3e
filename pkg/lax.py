#!/usr/bin/env python
"""
Lax matrices, monodromy and spectral invariants

    L_i(λ)       the boundary measurement matrix of one elementary network
    M(λ)         L_1 ... L_n
    char_poly    det(M(λ) - z Id) = sum I_ij z^i λ^j   (this sign convention)
    P_i(λ)       the auxiliary matrix of the zero curvature representation

Entries are Laurent polynomials in λ (P_i has λ^-1 terms). The characteristic
polynomial is computed as a polynomial in z whose coefficients are themselves
Poly objects in λ, so the same cofactor determinant serves both cases.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from dynamics import tk_step
from errors import NonHomogeneous, SigmaVanishes, UnsupportedSpan
from linalg import det
from poisson import PoissonTensor, bracket_matrix, xy_tensor
from scalars import Backend, close, is_zero, primal_of
from states import MapParams, XYState, random_xy_state

logger = logging.getLogger(__name__)


class Poly:
    """Laurent polynomial sum_j coeffs[j] λ^(low + j)

    Coefficients may be any ring elements that mix with int (Fraction, float,
    complex, Dual, or Poly for bivariate use). Zero coefficients at either end
    are trimmed; the zero polynomial has no coefficients.
    """

    __slots__ = ("coeffs", "low")

    def __init__(self, coeffs: Sequence = (), low: int = 0):
        coeffs = list(coeffs)
        start, end = 0, len(coeffs)
        while start < end and coeffs[start] == 0:
            start += 1
        while end > start and coeffs[end - 1] == 0:
            end -= 1
        self.coeffs = tuple(coeffs[start:end])
        self.low = low + start if self.coeffs else 0

    @classmethod
    def constant(cls, c) -> "Poly":
        return cls((c,))

    @classmethod
    def monomial(cls, c, power: int) -> "Poly":
        return cls((c,), power)

    @classmethod
    def from_terms(cls, terms: Dict[int, object]) -> "Poly":
        if not terms:
            return cls()
        lo, hi = min(terms), max(terms)
        return cls([terms.get(j, 0) for j in range(lo, hi + 1)], lo)

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def high(self) -> Optional[int]:
        return self.low + len(self.coeffs) - 1 if self.coeffs else None

    def terms(self) -> Dict[int, object]:
        return {self.low + j: c for j, c in enumerate(self.coeffs)}

    def coefficient(self, power: int):
        j = power - self.low
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def _combine(self, other, negate: bool) -> "Poly":
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        terms = self.terms()
        for power, c in other.terms().items():
            if power in terms:
                terms[power] = terms[power] - c if negate else terms[power] + c
            else:
                terms[power] = -c if negate else c
        return Poly.from_terms(terms)

    def __add__(self, other):
        return self._combine(other, False)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, True)

    def __rsub__(self, other):
        return (-self)._combine(other, False)

    def __neg__(self):
        return Poly([-c for c in self.coeffs], self.low)

    def __mul__(self, other):
        if isinstance(other, Poly):
            acc: Dict[int, object] = {}
            for i, a in enumerate(self.coeffs):
                for j, b in enumerate(other.coeffs):
                    term = a * b
                    power = i + j
                    acc[power] = term if power not in acc else acc[power] + term
            shifted = {p + self.low + other.low: c for p, c in acc.items()}
            return Poly.from_terms(shifted)
        return Poly([c * other for c in self.coeffs], self.low)

    def __rmul__(self, other):
        return Poly([other * c for c in self.coeffs], self.low)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            other = Poly.constant(other)
        return (self.low == other.low and len(self.coeffs) == len(other.coeffs)
                and all(a == b for a, b in zip(self.coeffs, other.coeffs)))

    __hash__ = None

    def __call__(self, lam):
        total = 0
        for power, c in self.terms().items():
            total = total + c * lam ** power
        return total

    def __repr__(self):
        if not self.coeffs:
            return "Poly(0)"
        parts = [f"({c!r})λ^{p}" for p, c in self.terms().items()]
        return "Poly(" + " + ".join(parts) + ")"


LAMBDA = Poly.monomial(1, 1)
# random points used to read off homogeneity degrees
HOMOGENEITY_DRAWS = 3


class PolyMatrix:
    """Square matrix of Poly entries"""

    __slots__ = ("rows",)

    def __init__(self, rows: Sequence[Sequence]):
        self.rows = tuple(tuple(e if isinstance(e, Poly) else Poly.constant(e) for e in row)
                          for row in rows)

    @property
    def size(self) -> int:
        return len(self.rows)

    def entry(self, a: int, b: int) -> Poly:
        return self.rows[a][b]

    def __matmul__(self, other: "PolyMatrix") -> "PolyMatrix":
        size = self.size
        result = []
        for a in range(size):
            row = []
            for b in range(size):
                total = Poly()
                for c in range(size):
                    left, right = self.rows[a][c], other.rows[c][b]
                    if left.is_zero or right.is_zero:
                        continue
                    total = total + left * right
                row.append(total)
            result.append(row)
        return PolyMatrix(result)

    def det(self) -> Poly:
        return det(self.rows)

    def __eq__(self, other):
        return isinstance(other, PolyMatrix) and self.rows == other.rows

    __hash__ = None

    def evaluate(self, lam) -> List[List]:
        return [[e(lam) for e in row] for row in self.rows]

    def max_degree(self) -> int:
        return max((e.high for row in self.rows for e in row if not e.is_zero), default=0)

    def __repr__(self):
        return f"PolyMatrix({self.rows!r})"


@dataclass(frozen=True)
class BivarPoly:
    """sum I_ij z^i λ^j; zero coefficients are not stored"""
    coefficients: Dict[Tuple[int, int], object]

    def coefficient(self, i: int, j: int):
        return self.coefficients.get((i, j), 0)

    def keys(self) -> List[Tuple[int, int]]:
        return sorted(self.coefficients)

    def z_degree(self) -> int:
        return max(i for i, _ in self.coefficients)


# --- Lax matrices -----------------------------------------------------------------------

def lax_det_sign(k: int) -> int:
    """det L_i = lax_det_sign(k) * λ * y_i"""
    return (-1) ** (k + 1)


def lax_matrix(s: XYState, i: int) -> PolyMatrix:
    """L_i(λ)

    k = 2:  [[λ x_i, σ_i], [λ, 1]]
    k >= 3: first row (0, ..., 0, x_i, σ_i), λ at (2, 1), ones on the rest of
            the subdiagonal and in the bottom-right corner.
    """
    k = s.k
    x, sigma = s.x_(i), s.sigma(i)
    if k == 2:
        return PolyMatrix([[Poly.monomial(x, 1), sigma], [LAMBDA, 1]])
    rows = [[0] * k for _ in range(k)]
    rows[0][k - 2] = x
    rows[0][k - 1] = sigma
    rows[1][0] = LAMBDA
    for a in range(2, k):
        rows[a][a - 1] = 1
    rows[k - 1][k - 1] = 1
    return PolyMatrix(rows)


def monodromy(s: XYState) -> PolyMatrix:
    """M(λ) = L_1 ... L_n"""
    m = lax_matrix(s, 1)
    for i in range(2, s.n + 1):
        m = m @ lax_matrix(s, i)
    return m


def char_poly(s: XYState) -> BivarPoly:
    """det(M(λ) - z Id) with all coefficients, constant terms included"""
    m = monodromy(s)
    k = m.size
    minus_one = Poly.constant(-1)
    shifted = [[Poly([m.entry(a, b), minus_one]) if a == b else Poly([m.entry(a, b)])
                for b in range(k)] for a in range(k)]
    d = det(shifted)
    coefficients = {}
    for i, inner in d.terms().items():
        if not isinstance(inner, Poly):
            continue
        for j, c in inner.terms().items():
            if c != 0:
                coefficients[(i, j)] = c
    return BivarPoly(coefficients)


def integrals(s: XYState) -> List[Tuple[Tuple[int, int], object]]:
    """Nonzero I_ij as ((i, j), value) rows, sorted by (i, j)"""
    cp = char_poly(s)
    return [(key, cp.coefficient(*key)) for key in cp.keys()]


def integrals_in_involution(s: XYState, tensor: Optional[PoissonTensor] = None,
                            tol: float = 1e-8) -> bool:
    """{I_ab, I_cd} = 0 at s for every pair, with the xy bracket by default"""
    tensor = tensor or xy_tensor(s.params)
    keys = [key for key, _ in integrals(s)]
    params = s.params

    def values_of(values: List) -> List:
        cp = char_poly(XYState.from_values(params, values))
        return [cp.coefficient(*key) for key in keys]

    brackets = bracket_matrix(values_of, tensor, s.values())
    for a, row in enumerate(brackets):
        for b, value in enumerate(row):
            if not close(value, 0, tol):
                logger.debug("{I%s, I%s} = %s", keys[a], keys[b], value)
                return False
    return True


def _exponent(base: int, ratio) -> Optional[int]:
    """d with ratio == base ** d, None if there is none"""
    ratio = Fraction(primal_of(ratio))
    if ratio <= 0:
        return None
    sign = 1
    if ratio < 1:
        ratio, sign = 1 / ratio, -1
    d = 0
    while ratio > 1 and ratio.denominator == 1 and ratio.numerator % base == 0:
        ratio /= base
        d += 1
    return sign * d if ratio == 1 else None


def homogeneity_degrees(params: MapParams, seed: int = 0,
                        draws: int = HOMOGENEITY_DRAWS) -> Dict[Tuple[int, int], int]:
    """d_ij with I_ij(t x, t y) = t^d_ij I_ij(x, y), checked at t = 2 and t = 3

    A coefficient that happens to vanish at one random point is read from
    another draw; one that never shows a nonzero value raises.
    """
    rng = np.random.default_rng(seed)
    degrees = {}
    seen = set()
    for _ in range(draws):
        s = random_xy_state(rng, params, Backend.RATIONAL)
        base, twice, thrice = char_poly(s), char_poly(s.scaled(2)), char_poly(s.scaled(3))
        keys = set(base.keys()) | set(twice.keys()) | set(thrice.keys())
        seen |= keys
        for key in sorted(keys):
            value = base.coefficient(*key)
            if is_zero(value):
                logger.debug("I_%d,%d vanishes at this draw", *key)
                continue
            d = _exponent(2, twice.coefficient(*key) / value)
            if d is None or thrice.coefficient(*key) != value * Fraction(3) ** d:
                raise NonHomogeneous(*key)
            if degrees.setdefault(key, d) != d:
                raise NonHomogeneous(*key)
    missing = sorted(seen - set(degrees))
    if missing:
        raise NonHomogeneous(*missing[0])
    logger.debug("homogeneity degrees for k=%d n=%d: %s", params.k, params.n, degrees)
    return dict(sorted(degrees.items()))


def degree_zero_ratios(s: XYState, degrees: Optional[Dict[Tuple[int, int], int]] = None
                       ) -> Dict[Tuple[Tuple[int, int], Tuple[int, int]], object]:
    """Scaling-invariant combinations I_a^(d_ref/g) / I_ref^(d_a/g), g = gcd(d_a, d_ref)

    The reference is the first integral of nonzero degree. These are functions
    of (p, q) alone.
    """
    degrees = degrees if degrees is not None else homogeneity_degrees(s.params)
    values = dict(integrals(s))
    ref = next((key for key in sorted(values) if degrees.get(key)), None)
    if ref is None:
        return {}
    ratios = {}
    for key in sorted(values):
        if key == ref or key not in degrees:
            continue
        g = gcd(degrees[key], degrees[ref])
        ratios[(key, ref)] = values[key] ** (degrees[ref] // g) / values[ref] ** (degrees[key] // g)
    return ratios


# --- zero curvature -------------------------------------------------------------------------

def _inverse_sigma(s: XYState, j: int):
    sigma = s.sigma(j)
    if is_zero(sigma):
        raise SigmaVanishes(((j - 1) % s.n) + 1)
    return 1 / sigma


def p_matrix(s: XYState, i: int) -> PolyMatrix:
    """Auxiliary matrix P_i(λ) with L*_{i+r'+1} P_{i+1} = P_i L_{i+k-2}

    k >= 4, rows 1..k-3: x_{i+m-1}/σ at column m+1 and y_{i+m}/σ at column m+2
    (both divided by λ in row 1); row k-2: (-1/σ_{i+k-2}, 0, ..., x_{i+k-3}/σ_{i+k-3}, 1);
    row k-1: (1/σ_{i+k-2}, -1/(λσ_{i+k-1}), 0, ...); row k: (0, 1/(λσ_{i+k-1}), 0, ...).
    k = 3 folds the first pattern row into row k-2, which is then divided by λ.
    """
    k = s.k
    if k == 2:
        raise UnsupportedSpan("no auxiliary matrix P_i for k = 2")
    inv = lambda j: _inverse_sigma(s, j)
    over_lambda = lambda c: Poly.monomial(c, -1)
    rows = [[Poly() for _ in range(k)] for _ in range(k)]
    if k == 3:
        rows[0][0] = over_lambda(-inv(i + 1))
        rows[0][1] = over_lambda(s.x_(i) * inv(i))
        rows[0][2] = over_lambda(1)
    else:
        for m in range(1, k - 2):
            a = s.x_(i + m - 1) * inv(i + m - 1)
            b = s.y_(i + m) * inv(i + m)
            if m == 1:
                rows[0][1], rows[0][2] = over_lambda(a), over_lambda(b)
            else:
                rows[m - 1][m] = Poly.constant(a)
                rows[m - 1][m + 1] = Poly.constant(b)
        rows[k - 3][0] = Poly.constant(-inv(i + k - 2))
        rows[k - 3][k - 2] = Poly.constant(s.x_(i + k - 3) * inv(i + k - 3))
        rows[k - 3][k - 1] = Poly.constant(1)
    rows[k - 2][0] = Poly.constant(inv(i + k - 2))
    rows[k - 2][1] = over_lambda(-inv(i + k - 1))
    rows[k - 1][1] = over_lambda(inv(i + k - 1))
    return PolyMatrix(rows)


def _product(matrices: Sequence[PolyMatrix]) -> PolyMatrix:
    result = matrices[0]
    for m in matrices[1:]:
        result = result @ m
    return result


def zero_curvature_report(s: XYState, image: Optional[XYState] = None) -> Dict[str, object]:
    """Which zero curvature identities hold

    local[i-1]: P_i L_{i+k-2} = L*_{i+r'+1} P_{i+1}
    monodromy:  P_1 (L_{k-1} ... L_{k-2+n}) = (L*_{r'+2} ... L*_{r'+1+n}) P_1
    `image` defaults to tk_step(s); pass a corrupted one for negative controls.
    """
    star = image if image is not None else tk_step(s)
    k, n, rp = s.k, s.n, s.params.rprime
    local = []
    # P_i L_{i+r-1} = L*_i P_{i+1} with both Lax indices raised by r' + 1 = k - 1 - r
    for i in range(1, n + 1):
        lhs = p_matrix(s, i) @ lax_matrix(s, i + k - 2)
        rhs = lax_matrix(star, i + rp + 1) @ p_matrix(s, i + 1)
        local.append(lhs == rhs)
    p1 = p_matrix(s, 1)
    before = _product([lax_matrix(s, j) for j in range(k - 1, k - 1 + n)])
    after = _product([lax_matrix(star, j) for j in range(rp + 2, rp + 2 + n)])
    conjugation = (p1 @ before) == (after @ p1)
    report = {"k": k, "n": n, "local": local, "monodromy": conjugation,
              "ok": all(local) and conjugation}
    logger.debug("zero curvature k=%d n=%d: %s", k, n, report["ok"])
    return report


def zero_curvature_check(s: XYState, image: Optional[XYState] = None) -> bool:
    return zero_curvature_report(s, image)["ok"]
