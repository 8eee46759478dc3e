#!/usr/bin/env python
"""
Corrugated polygons, plane polygons and the diagonal maps

A twisted polygon is stored through n + k lifted vertices Ṽ_0 ... Ṽ_{n+k-1}
and a monodromy matrix M with Ṽ_{i+n} proportional to M Ṽ_i. The (x, y)
coordinates come from the window relations

    Ṽ_{i+k} = A_i Ṽ_i + B_i Ṽ_{i+1} + C_i Ṽ_{i+k-1}

after rescaling the lifts so that C_i = 1 and the coefficients become
n-periodic:

    Ṽ_{i+k} = y_{i-1} Ṽ_i + x_i Ṽ_{i+1} + Ṽ_{i+k-1}

Corrugated polygons live in k-space (projective dimension k - 1); plane
polygons live in 3-space and carry the span k of the diagonals used by G_k.
Exact on Fraction data; float and complex data are compared with
PENTALAB_FLOAT_TOL.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import sympy

from dynamics import dk_apply
from errors import (DegenerateConfiguration, DegenerateHyperplane, DegenerateIntersection,
                    DegenerateSeed, GenericityLost, InvalidState, NoRationalSection,
                    NonPeriodicCoefficients, UnsupportedSpan)
from linalg import (cross3, det, from_columns, generalized_cross, identity, inverse, matmul,
                    matvec, rank, scale_vector, solve_consistent, transpose)
from scalars import (Backend, close, float_tol, is_exact, is_zero, primal_of, random_rational,
                     random_scalar)
from states import MapParams, XYState

logger = logging.getLogger(__name__)

Vector = Tuple
Matrix = Tuple[Tuple, ...]


def _freeze(vectors: Sequence[Sequence]) -> Tuple[Tuple, ...]:
    return tuple(tuple(v) for v in vectors)


@dataclass(frozen=True)
class CorrugatedPolygon:
    """Twisted n-gon in RP^{k-1} given by n + k lifts and the monodromy"""
    params: MapParams
    lifts: Tuple[Vector, ...]
    monodromy: Matrix

    def __post_init__(self):
        object.__setattr__(self, "lifts", _freeze(self.lifts))
        object.__setattr__(self, "monodromy", _freeze(self.monodromy))
        _check_shape(self.lifts, self.monodromy, self.params.n + self.params.k, self.params.k)

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def n(self) -> int:
        return self.params.n

    def transformed(self, g: Sequence[Sequence]) -> "CorrugatedPolygon":
        """Image under the linear map g: lifts g V_i, monodromy g M g^-1"""
        lifts, mono = _transform(self.lifts, self.monodromy, g)
        return CorrugatedPolygon(self.params, lifts, mono)

    def rescaled(self, factors: Sequence) -> "CorrugatedPolygon":
        """Same projective polygon with lift i multiplied by factors[i]"""
        return CorrugatedPolygon(self.params, [scale_vector(t, v) for t, v in zip(factors, self.lifts)],
                                 self.monodromy)


@dataclass(frozen=True)
class PlanePolygon:
    """Twisted n-gon in RP^2 with the diagonal span k of G_k"""
    n: int
    k: int
    lifts: Tuple[Vector, ...]
    monodromy: Matrix

    def __post_init__(self):
        object.__setattr__(self, "lifts", _freeze(self.lifts))
        object.__setattr__(self, "monodromy", _freeze(self.monodromy))
        if not (3 <= self.k <= self.n):
            raise UnsupportedSpan(f"plane polygons need 3 <= k <= n, got k = {self.k}, n = {self.n}")
        _check_shape(self.lifts, self.monodromy, self.n + self.k, 3)

    @property
    def params(self) -> MapParams:
        return MapParams(self.k, self.n)

    def transformed(self, g: Sequence[Sequence]) -> "PlanePolygon":
        lifts, mono = _transform(self.lifts, self.monodromy, g)
        return PlanePolygon(self.n, self.k, lifts, mono)

    def rescaled(self, factors: Sequence) -> "PlanePolygon":
        return PlanePolygon(self.n, self.k, [scale_vector(t, v) for t, v in zip(factors, self.lifts)],
                            self.monodromy)


def _check_shape(lifts, monodromy, count: int, dim: int) -> None:
    if len(lifts) != count:
        raise InvalidState(f"expected {count} lifts, got {len(lifts)}")
    for i, v in enumerate(lifts):
        if len(v) != dim:
            raise InvalidState(f"lift {i} has dimension {len(v)}, expected {dim}", index=i)
    if len(monodromy) != dim or any(len(row) != dim for row in monodromy):
        raise InvalidState(f"monodromy must be {dim}x{dim}")


def _transform(lifts, monodromy, g):
    g = [list(row) for row in g]
    if rank(g) != len(g):
        raise DegenerateSeed("frame matrix is singular")
    return ([matvec(g, v) for v in lifts],
            matmul(matmul(g, monodromy), inverse(g)))


def _one(backend: Backend):
    return backend.coerce(1)


# --- building from (x, y) ------------------------------------------------------------------

def _run_recurrence(s: XYState, seed: Sequence[Sequence]) -> List[List]:
    lifts = [list(v) for v in seed]
    for i in range(s.n):
        nxt = [s.y_(i - 1) * a + s.x_(i) * b + c
               for a, b, c in zip(lifts[i], lifts[i + 1], lifts[i + s.k - 1])]
        lifts.append(nxt)
    return lifts


def _monodromy_from(lifts: Sequence[Sequence], n: int, dim: int) -> List[List]:
    first = from_columns(lifts[:dim])
    last = from_columns(lifts[n:n + dim])
    return matmul(last, inverse(first))


def polygon_from_xy(s: XYState, seed: Optional[Sequence[Sequence]] = None) -> CorrugatedPolygon:
    """Corrugated polygon whose normalised lifts satisfy the recurrence with (x, y)"""
    k = s.k
    if k < 3:
        raise UnsupportedSpan("corrugated polygons need k >= 3")
    if seed is None:
        one = _one(s.backend)
        seed = identity(k, one, one * 0)
    seed = [list(v) for v in seed]
    if len(seed) != k or any(len(v) != k for v in seed) or rank(seed) != k:
        raise DegenerateSeed(f"seed must be {k} independent vectors in {k}-space")
    lifts = _run_recurrence(s, seed)
    return CorrugatedPolygon(s.params, lifts, _monodromy_from(lifts, s.n, k))


# --- reading (x, y) back ----------------------------------------------------------------------

def _relation(lifts: Sequence[Sequence], k: int, i: int) -> Optional[List]:
    return solve_consistent([lifts[i], lifts[i + 1], lifts[i + k - 1]], lifts[i + k])


def window_relation(P, i: int) -> Tuple:
    """(A_i, B_i, C_i) with Ṽ_{i+k} = A_i Ṽ_i + B_i Ṽ_{i+1} + C_i Ṽ_{i+k-1}, 0 <= i < n"""
    coefficients = _relation(P.lifts, P.k, i)
    if coefficients is None:
        raise GenericityLost(i, "window is not a dependent quadruple with independent triples")
    return tuple(coefficients)


def _twist_ratio(target: Sequence, image: Sequence, j: int, n: int):
    """kappa with target = kappa * image"""
    c = max(range(len(image)), key=lambda a: abs(primal_of(image[a])))
    if is_zero(image[c]):
        raise NonPeriodicCoefficients(f"monodromy kills lift {j}")
    kappa = target[c] / image[c]
    scale = max(abs(primal_of(v)) for v in image)
    for a, b in zip(target, image):
        if is_exact(a) and is_exact(b):
            ok = a == kappa * b
        else:
            ok = abs(primal_of(a - kappa * b)) <= 1e3 * float_tol() * max(1.0, abs(kappa) * scale)
        if not ok:
            raise NonPeriodicCoefficients(f"lift {j + n} is not twisted by the monodromy")
    return kappa


def _extract(lifts, monodromy, k: int, n: int) -> XYState:
    A, B, C = [], [], []
    for i in range(n):
        relation = _relation(lifts, k, i)
        if relation is None:
            raise GenericityLost(i, "window is not a dependent quadruple with independent triples")
        a, b, c = relation
        if is_zero(a) or is_zero(b) or is_zero(c):
            raise GenericityLost(i, "three of the four window vertices are dependent")
        A.append(a)
        B.append(b)
        C.append(c)
    # R_j = t_j relative to t_{k-1} = 1, from t_{j} = t_{j-1} / C_{j-k}
    t = {k - 1: 1}
    for j in range(k, n + k):
        t[j] = t[j - 1] / C[j - k]
    kappa = [_twist_ratio(lifts[n + j], matvec(monodromy, lifts[j]), j, n) for j in range(k)]
    c = t[n + k - 1] * kappa[k - 1]
    for j in range(k - 1):
        t[j] = t[n + j] * kappa[j] / c
    x = [None] * n
    y = [None] * n
    for i in range(n):
        y[(i - 2) % n] = t[i + k] * A[i] / t[i]
        x[(i - 1) % n] = t[i + k] * B[i] / t[i + 1]
    return XYState(MapParams(k, n), tuple(x), tuple(y))


def extract_xy(P: CorrugatedPolygon) -> XYState:
    """(x, y) of a corrugated polygon; independent of the lift gauge and the frame"""
    return _extract(P.lifts, P.monodromy, P.k, P.n)


def psi(P: PlanePolygon) -> XYState:
    """(x, y) of a plane polygon read with diagonal span k"""
    return _extract(P.lifts, P.monodromy, P.k, P.n)


def _window_ok(lifts, k: int, i: int) -> bool:
    window = [lifts[i], lifts[i + 1], lifts[i + k - 1], lifts[i + k]]
    if rank(window) != 3:
        logger.debug("window %d has rank %d", i, rank(window))
        return False
    for triple in itertools.combinations(window, 3):
        if rank(list(triple)) != 3:
            logger.debug("window %d has a dependent triple", i)
            return False
    return True


def first_non_corrugated(P: CorrugatedPolygon) -> Optional[int]:
    """Smallest i whose k lifts from i are dependent or whose window fails; None if corrugated"""
    k = P.k
    for i in range(P.n):
        if rank(P.lifts[i:i + k]) != k:
            logger.debug("lifts %d..%d are dependent", i, i + k - 1)
            return i
        if not _window_ok(P.lifts, k, i):
            return i
    return None


def check_corrugated(P: CorrugatedPolygon) -> bool:
    """Every k consecutive lifts independent; every window a plane with independent triples"""
    return first_non_corrugated(P) is None


def check_general_position(P: PlanePolygon) -> bool:
    """No three of V_i, V_{i+1}, V_{i+k-1}, V_{i+k} collinear"""
    return all(_window_ok(P.lifts, P.k, i) for i in range(P.n))


# --- diagonal maps ------------------------------------------------------------------------------

def _diagonal_lifts(lifts, monodromy, k: int, n: int, meet: Callable[[int], List]) -> List[List]:
    """New lift m is the meeting point of window j = m - r' - 1, extended by the twist"""
    rp = MapParams(k, n).rprime
    points = {}
    for j in range(n):
        w = meet(j)
        if all(is_zero(v) for v in w):
            raise DegenerateIntersection(j)
        points[j] = w
    inverse_m = None
    result = []
    for m in range(n + k):
        j = m - rp - 1
        if j < 0:
            if inverse_m is None:
                inverse_m = inverse(monodromy)
            result.append(matvec(inverse_m, points[j + n]))
        elif j >= n:
            result.append(matvec(monodromy, points[j - n]))
        else:
            result.append(points[j])
    return result


def _meet_by_relation(lifts, k: int) -> Callable[[int], List]:
    def meet(j: int) -> List:
        relation = _relation(lifts, k, j)
        if relation is None:
            raise DegenerateIntersection(j)
        a, _, c = relation
        return [a * u + c * v for u, v in zip(lifts[j], lifts[j + k - 1])]
    return meet


def fk_step(P: CorrugatedPolygon) -> CorrugatedPolygon:
    """(k-1)-diagonal map: vertex m of the image is (V_j, V_{j+k-1}) ∩ (V_{j+1}, V_{j+k}), j = m - r' - 1"""
    lifts = _diagonal_lifts(P.lifts, P.monodromy, P.k, P.n, _meet_by_relation(P.lifts, P.k))
    image = CorrugatedPolygon(P.params, lifts, P.monodromy)
    bad = first_non_corrugated(image)
    if bad is not None:
        raise GenericityLost(bad, "image of the diagonal map is not corrugated")
    return image


def gk_step(P: PlanePolygon) -> PlanePolygon:
    """Higher pentagram map on plane polygons, labelled like fk_step"""
    lifts = _diagonal_lifts(P.lifts, P.monodromy, P.k, P.n, _meet_by_relation(P.lifts, P.k))
    return PlanePolygon(P.n, P.k, lifts, P.monodromy)


def classical_pentagram(P: CorrugatedPolygon) -> CorrugatedPolygon:
    """k = 3 construction through cross products: (V_j x V_{j+2}) x (V_{j+1} x V_{j+3})"""
    if P.k != 3:
        raise UnsupportedSpan("the cross-product construction is for k = 3")
    lifts = P.lifts

    def meet(j: int) -> List:
        return cross3(cross3(lifts[j], lifts[j + 2]), cross3(lifts[j + 1], lifts[j + 3]))

    return CorrugatedPolygon(P.params, _diagonal_lifts(lifts, P.monodromy, 3, P.n, meet), P.monodromy)


# --- projective duality ----------------------------------------------------------------------------

def DUALITY_SHIFT(params: MapParams) -> int:
    """extract_xy(dual_polygon(P)) = (-1)^k D_k(extract_xy(P)) shifted by this amount"""
    return params.r


def dual_polygon(P: CorrugatedPolygon) -> CorrugatedPolygon:
    """Polygon of hyperplanes spanned by V_i ... V_{i+k-2}

    Dual lift i is the covector w -> det(Ṽ_i, ..., Ṽ_{i+k-2}, w); the dual
    monodromy is det(M) M^{-T}.
    """
    k, n = P.k, P.n
    normals = []
    for i in range(n):
        u = generalized_cross(P.lifts[i:i + k - 1])
        if all(is_zero(v) for v in u):
            raise DegenerateHyperplane(i)
        normals.append(u)
    m = [list(row) for row in P.monodromy]
    dual_m = [[det(m) * v for v in row] for row in transpose(inverse(m))]
    for i in range(n, n + k):
        normals.append(matvec(dual_m, normals[i - n]))
    return CorrugatedPolygon(P.params, normals, dual_m)


def find_duality_shift(P: CorrugatedPolygon) -> Optional[int]:
    """Smallest s with extract(dual) = (-1)^k D_k(extract(P)) shifted by s"""
    dual_xy = extract_xy(dual_polygon(P))
    target = dk_apply(extract_xy(P)).scaled((-1) ** P.k)
    for s in range(P.n):
        candidate = target.shifted(s)
        if all(close(a, b) for a, b in zip(candidate.values(), dual_xy.values())):
            logger.debug("duality shift for k=%d n=%d is %d", P.k, P.n, s)
            return s
    return None


# --- plane polygons from (x, y) ----------------------------------------------------------------------

def _to_fraction(value) -> Fraction:
    value = sympy.Rational(value)
    return Fraction(int(value.p), int(value.q))


def _rational_sections(m: Sequence[Sequence]) -> List[List[List[Fraction]]]:
    """3-row bases of kernels ker f(M^T) for rational cubic factors f of the char poly"""
    k = len(m)
    mt = sympy.Matrix(k, k, lambda a, b: sympy.Rational(m[b][a].numerator, m[b][a].denominator))
    t = sympy.Symbol("t")
    _, factors = sympy.factor_list(mt.charpoly(t).as_expr(), t)
    pool = [f for f, mult in factors for _ in range(mult)]
    seen, sections = set(), []
    for size in (1, 2, 3):
        for combo in itertools.combinations(range(len(pool)), size):
            f = sympy.expand(sympy.Mul(*[pool[c] for c in combo]))
            if sympy.degree(f, t) != 3 or str(f) in seen:
                continue
            seen.add(str(f))
            fm = sympy.zeros(k, k)
            for coefficient in sympy.Poly(f, t).all_coeffs():
                fm = fm * mt + coefficient * sympy.eye(k)
            kernel = fm.nullspace()
            if len(kernel) != 3:
                continue
            sections.append([[_to_fraction(v) for v in vec] for vec in kernel])
    return sections


def _float_sections(m: Sequence[Sequence], complex_field: bool) -> List[np.ndarray]:
    """Orthonormal 3-row bases of monodromy-invariant quotients, one per eigenvalue triple"""
    mat = np.array(m, dtype=complex if complex_field else float)
    eigenvalues = np.linalg.eigvals(mat)
    k = len(eigenvalues)
    tol = 1e3 * float_tol() * max(1.0, float(np.max(np.abs(eigenvalues))))
    candidates = []
    for combo in itertools.combinations(range(k), 3):
        chosen = eigenvalues[list(combo)]
        if not complex_field:
            closed = all(np.min(np.abs(chosen - np.conj(z))) <= tol for z in chosen)
            if not closed:
                continue
        candidates.append(sorted(chosen.tolist(), key=lambda z: (round(z.real, 9), round(z.imag, 9))))
    candidates.sort(key=lambda zs: [(round(z.real, 9), round(z.imag, 9)) for z in zs])
    sections = []
    for triple in candidates:
        coefficients = np.poly(triple)
        if not complex_field:
            coefficients = coefficients.real
        fm = np.zeros_like(mat)
        for c in coefficients:
            fm = fm @ mat.T + c * np.eye(k)
        _, _, vh = np.linalg.svd(fm)
        sections.append(vh[-3:].conj())
    return sections


def plane_polygon_from_xy(s: XYState, seed: Optional[Sequence[Sequence]] = None, branch: int = 0,
                          backend: Optional[Backend] = None) -> PlanePolygon:
    """Plane polygon with psi(P) = s

    The k-space solution of the recurrence is projected onto a 3-dimensional
    quotient invariant under its monodromy. `branch` selects the quotient
    when there are several; `seed` is the 3x3 frame of the result.
    """
    k, n = s.k, s.n
    backend = backend or s.backend
    if k < 3:
        raise UnsupportedSpan("plane polygons need k >= 3")
    lifts = _run_recurrence(s, identity(k, _one(backend), _one(backend) * 0))
    mono = _monodromy_from(lifts, n, k)
    if k == 3:
        projected, mono3 = lifts, mono
    elif backend is Backend.RATIONAL:
        sections = _rational_sections(mono)
        if not sections:
            raise NoRationalSection(f"monodromy char poly of k={k}, n={n} has no rational cubic factor")
        if branch >= len(sections):
            raise InvalidState(f"branch {branch} out of range, {len(sections)} available")
        pi = sections[branch]
        projected = [matvec(pi, v) for v in lifts]
        image_rows = matmul(pi, mono)
        mono3 = [solve_consistent(pi, row) for row in image_rows]
        if any(row is None for row in mono3):
            raise NoRationalSection("quotient is not invariant under the monodromy")
    else:
        sections = _float_sections(mono, backend is Backend.COMPLEX)
        if not sections:
            raise NoRationalSection(f"no real 3-dimensional invariant quotient for k={k}, n={n}")
        if branch >= len(sections):
            raise InvalidState(f"branch {branch} out of range, {len(sections)} available")
        pi = sections[branch]
        mat = np.array(mono, dtype=pi.dtype)
        mono3_np = pi @ mat @ pi.conj().T
        projected_np = [pi @ np.array(v, dtype=pi.dtype) for v in lifts]
        if backend is Backend.FLOAT:
            mono3 = mono3_np.real.tolist()
            projected = [v.real.tolist() for v in projected_np]
        else:
            mono3 = mono3_np.tolist()
            projected = [v.tolist() for v in projected_np]
    polygon = PlanePolygon(n, k, projected, mono3)
    if seed is not None:
        polygon = polygon.transformed(seed)
    return polygon


def random_plane_polygon(rng: np.random.Generator, k: int, n: int, backend: Backend = Backend.RATIONAL,
                         bound: int = 9, attempts: int = 100) -> PlanePolygon:
    """Random twisted plane polygon in general position"""
    def draw():
        if backend is Backend.RATIONAL:
            return random_rational(rng, bound)
        return random_scalar(rng, backend, bound)

    for _ in range(attempts):
        vertices = [[draw() for _ in range(3)] for _ in range(n)]
        mono = [[draw() for _ in range(3)] for _ in range(3)]
        if rank(mono) != 3:
            continue
        lifts = vertices + [matvec(mono, vertices[j]) for j in range(k)]
        polygon = PlanePolygon(n, k, lifts, mono)
        if check_general_position(polygon):
            return polygon
    raise DegenerateConfiguration(f"no generic plane polygon found in {attempts} attempts")


def to_affine(P, count: Optional[int] = None) -> List[Tuple[float, float]]:
    """Vertices in the chart z = 1 as floats"""
    count = P.n if count is None else count
    points = []
    for i, v in enumerate(P.lifts[:count]):
        if abs(complex(primal_of(v[2]))) == 0:
            raise DegenerateConfiguration(f"vertex {i} lies on the line at infinity", i)
        points.append((float(np.real(complex(v[0] / v[2]))), float(np.real(complex(v[1] / v[2])))))
    return points
