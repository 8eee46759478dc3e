#!/usr/bin/env python
"""
Quiver Q_{k,n}, log-canonical Poisson tensors and their checks

Vertices are ordered p_1 ... p_n, q_1 ... q_n. The skew-adjacency matrix has
a_uv = (arrows u -> v) - (arrows v -> u). The arrows

    p_i -> q_{i+r'},   p_i -> q_{i-r},   q_i -> p_{i+r+1},   q_i -> p_{i-r'-1}

are the ones for which the simultaneous tau-mutation at all p-vertices,

    p_i -> 1/p_i,   q_j -> q_j * prod_i p_i^{[a_ij]+} (1 + p_i)^{-a_ij},

reproduces the transformation whose composition with the parity relabelling
is T̄_k: the two incoming arrows p_{j-r'} -> q_j, p_{j+r} -> q_j give the
factors p/(1+p), the two outgoing arrows q_j -> p_{j+r+1}, q_j -> p_{j-r'-1}
give the factors (1+p).

A PoissonTensor stores a constant coefficient matrix B with
{v_i, v_j} = B_ij v_i v_j. All checks evaluate Jacobians with dual numbers, so
on rational points they are exact.
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, Type

from errors import OutsideStableRange, PDenominatorVanishes
from linalg import matmul, transpose
from scalars import close, gradient, is_zero, jacobian, primal_of, product
from states import MapParams, PQState

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Quiver:
    """Bipartite quiver on p_1..p_n, q_1..q_n given by its skew-adjacency matrix"""
    params: MapParams
    matrix: Tuple[Tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return 2 * self.params.n

    def p(self, i: int) -> int:
        """Row of vertex p_i (1-based cyclic i)"""
        return (i - 1) % self.params.n

    def q(self, i: int) -> int:
        return self.params.n + (i - 1) % self.params.n

    @property
    def labels(self) -> Tuple[str, ...]:
        n = self.params.n
        return tuple(f"p{i}" for i in range(1, n + 1)) + tuple(f"q{i}" for i in range(1, n + 1))

    def arrows(self) -> List[Tuple[str, str, int]]:
        """(tail, head, multiplicity) for every positive entry"""
        labels = self.labels
        return [(labels[u], labels[v], self.matrix[u][v])
                for u in range(self.size) for v in range(self.size) if self.matrix[u][v] > 0]

    def out_degree(self, u: int) -> int:
        return sum(a for a in self.matrix[u] if a > 0)

    def in_degree(self, u: int) -> int:
        return sum(-a for a in self.matrix[u] if a < 0)

    def is_skew(self) -> bool:
        return all(self.matrix[u][v] == -self.matrix[v][u]
                   for u in range(self.size) for v in range(self.size))

    def is_bipartite(self) -> bool:
        n = self.params.n
        return all(self.matrix[u][v] == 0
                   for u in range(self.size) for v in range(self.size)
                   if (u < n) == (v < n))

    def permuted(self, new_index: Sequence[int]) -> "Quiver":
        """Quiver with old vertex u renamed to position new_index[u]"""
        m = [[0] * self.size for _ in range(self.size)]
        for u in range(self.size):
            for v in range(self.size):
                m[new_index[u]][new_index[v]] = self.matrix[u][v]
        return Quiver(self.params, tuple(tuple(row) for row in m))

    def shifted(self, s: int = 1) -> "Quiver":
        """Relabel i -> i + s on both vertex families"""
        n = self.params.n
        return self.permuted([self.p(u + 1 + s) if u < n else self.q(u - n + 1 + s)
                              for u in range(self.size)])


def build_quiver(k: int, n: int) -> Quiver:
    params = MapParams(k, n)
    r, rp = params.r, params.rprime
    size = 2 * n
    m = [[0] * size for _ in range(size)]

    def arrow(u: int, v: int) -> None:
        m[u][v] += 1
        m[v][u] -= 1

    p = lambda i: (i - 1) % n
    q = lambda i: n + (i - 1) % n
    for i in range(1, n + 1):
        arrow(p(i), q(i + rp))
        arrow(p(i), q(i - r))
        arrow(q(i), p(i + r + 1))
        arrow(q(i), p(i - rp - 1))
    return Quiver(params, tuple(tuple(row) for row in m))


def mutate_quiver(quiver: Quiver, vertices: Sequence[int]) -> Quiver:
    """Matrix mutation at each vertex in turn"""
    b = [list(row) for row in quiver.matrix]
    size = quiver.size
    for k in vertices:
        nb = [row[:] for row in b]
        for i in range(size):
            for j in range(size):
                if i == k or j == k:
                    nb[i][j] = -b[i][j]
                elif b[i][k] * b[k][j] > 0:
                    sign = 1 if b[i][k] > 0 else -1
                    nb[i][j] = b[i][j] + sign * b[i][k] * b[k][j]
        b = nb
    return Quiver(quiver.params, tuple(tuple(row) for row in b))


def _relabel_index(params: MapParams) -> List[int]:
    # even: p_i -> q_i, q_i -> p_i;  odd: p_i -> q_{i+1}, q_i -> p_i
    n = params.n
    offset = 1 if params.odd else 0
    return ([n + (i + offset) % n for i in range(n)] +
            [i for i in range(n)])


def relabel_quiver(quiver: Quiver) -> Quiver:
    """The parity relabelling applied to vertex names"""
    return quiver.permuted(_relabel_index(quiver.params))


def exchange_roles(quiver: Quiver) -> Quiver:
    """Read the q-vertices as p-vertices

    New p_j is old q_j and new q_j is old p_{j+c} with c = r + 1 + R, where R
    belongs to the span k' = n + 2 - k. The result equals build_quiver(k', n).
    """
    params = quiver.params
    n = params.n
    other = MapParams(n + 2 - params.k, n)
    c = params.r + 1 + other.r
    index = [n + (i - c) % n for i in range(n)] + [i for i in range(n)]
    return Quiver(other, quiver.permuted(index).matrix)


# --- tau-mutation --------------------------------------------------------------------

def tau_mutation_all_p(s: PQState, quiver: Quiver) -> PQState:
    """Simultaneous y-seed mutation at every p-vertex"""
    n = s.n
    for i in range(1, n + 1):
        if is_zero(1 + s.p_(i)):
            raise PDenominatorVanishes(i)
    a = quiver.matrix
    q = []
    for j in range(1, n + 1):
        value = s.q_(j)
        for i in range(1, n + 1):
            exponent = a[quiver.p(i)][quiver.q(j)]
            if exponent > 0:
                value = value * s.p_(i) ** exponent
            if exponent:
                value = value * (1 + s.p_(i)) ** (-exponent)
        q.append(value)
    p = tuple(1 / v for v in s.p)
    return PQState(s.params, p, tuple(q))


def relabel_after_mutation(s: PQState) -> PQState:
    """even k: {p <-> q};  odd k: {p_i -> q_{i+1}, q_i -> p_i}"""
    if s.params.odd:
        return PQState(s.params, s.q, tuple(s.p_(i - 1) for i in range(1, s.n + 1)))
    return PQState(s.params, s.q, s.p)


# --- log-canonical tensors ------------------------------------------------------------

@dataclass(frozen=True)
class PoissonTensor:
    """{v_i, v_j} = B_ij v_i v_j"""
    params: MapParams
    kind: str  # "pq" or "xy"
    labels: Tuple[str, ...]
    matrix: Tuple[Tuple[int, ...], ...]

    @property
    def size(self) -> int:
        return len(self.labels)

    def entry(self, u: int, v: int) -> int:
        return self.matrix[u][v]

    def is_skew(self) -> bool:
        return all(self.matrix[u][v] == -self.matrix[v][u]
                   for u in range(self.size) for v in range(self.size))

    def flipped(self, u: int, v: int) -> "PoissonTensor":
        """Copy with the sign of B_uv and B_vu reversed"""
        m = [list(row) for row in self.matrix]
        m[u][v], m[v][u] = -m[u][v], -m[v][u]
        return PoissonTensor(self.params, self.kind, self.labels, tuple(tuple(row) for row in m))


def pq_tensor(quiver: Quiver) -> PoissonTensor:
    return PoissonTensor(quiver.params, "pq", quiver.labels, quiver.matrix)


def xy_tensor(params: MapParams) -> PoissonTensor:
    """The bracket on (x, y), known in the stable range n >= 2k - 1

    {x_i, x_{i+l}} = -x_i x_{i+l}   1 <= l <= k-2
    {y_i, y_{i+l}} = -y_i y_{i+l}   1 <= l <= k-1
    {y_i, x_{i+l}} = -y_i x_{i+l}   1 <= l <= k-1
    {y_i, x_{i-l}} =  y_i x_{i-l}   0 <= l <= k-2
    """
    if not params.stable:
        raise OutsideStableRange(params.k, params.n)
    k, n = params.k, params.n
    x = lambda i: (i - 1) % n
    y = lambda i: n + (i - 1) % n
    m = [[0] * (2 * n) for _ in range(2 * n)]

    def put(u: int, v: int, value: int) -> None:
        m[u][v] = value
        m[v][u] = -value

    for i in range(1, n + 1):
        for l in range(1, k - 1):
            put(x(i), x(i + l), -1)
        for l in range(1, k):
            put(y(i), y(i + l), -1)
            put(y(i), x(i + l), -1)
        for l in range(0, k - 1):
            put(y(i), x(i - l), 1)
    labels = tuple(f"x{i}" for i in range(1, n + 1)) + tuple(f"y{i}" for i in range(1, n + 1))
    return PoissonTensor(params, "xy", labels, tuple(tuple(row) for row in m))


def bivector_at(tensor: PoissonTensor, at: Sequence) -> List[List]:
    """B̂_uv = B_uv u v"""
    return [[tensor.matrix[u][v] * at[u] * at[v] for v in range(tensor.size)]
            for u in range(tensor.size)]


def bracket_of(f: Callable[[List], object], g: Callable[[List], object],
               tensor: PoissonTensor, at: Sequence):
    """{f, g}(at) = sum_uv B_uv u v d_u f d_v g"""
    df, dg = gradient(f, at), gradient(g, at)
    total = 0
    for u in range(tensor.size):
        if df[u] == 0:
            continue
        for v in range(tensor.size):
            b = tensor.matrix[u][v]
            if b and dg[v] != 0:
                total = total + b * at[u] * at[v] * df[u] * dg[v]
    return total


def bracket_matrix(f: Callable[[List], Sequence], tensor: PoissonTensor, at: Sequence) -> List[List]:
    """All pairwise brackets {f_a, f_b} at a point, as J B̂ J^T"""
    jac = jacobian(f, at)
    return matmul(matmul(jac, bivector_at(tensor, at)), transpose(jac))


def check_map_invariance(fn: Callable[[List], Sequence], tensor: PoissonTensor, at: Sequence,
                         tol: float = None) -> bool:
    """True iff J B̂(s) J^T = B̂(fn(s)), J the Jacobian of fn at s"""
    lhs = bracket_matrix(fn, tensor, at)
    rhs = bivector_at(tensor, [primal_of(v) for v in fn(list(at))])
    for u, (row_l, row_r) in enumerate(zip(lhs, rhs)):
        for v, (a, b) in enumerate(zip(row_l, row_r)):
            if not close(a, b, tol):
                logger.debug("invariance fails at (%s, %s): %s != %s",
                             tensor.labels[u], tensor.labels[v], a, b)
                return False
    return True


def vector_map(step: Callable, state_type: Type, params: MapParams) -> Callable[[List], List]:
    """Flat-vector form of a state map: values -> step(State(values)).values()"""
    def fn(values: List) -> List:
        return step(state_type.from_values(params, values)).values()
    fn.__name__ = getattr(step, "__name__", "step")
    return fn


# --- Casimirs -----------------------------------------------------------------------------

@dataclass(frozen=True)
class Monomial:
    """prod_u v_u^{e_u} over the tensor coordinates"""
    name: str
    exponents: Tuple[int, ...]

    def __call__(self, values: Sequence):
        return product(v ** e for v, e in zip(values, self.exponents) if e)


def casimirs(tensor: PoissonTensor, params: MapParams) -> List[Monomial]:
    """Monomial Casimirs of a tensor

    pq: prod p_i q_i.  xy: four parity products when n is even and k odd,
    otherwise prod x_i and prod y_i.
    """
    n = params.n
    if tensor.kind == "pq":
        return [Monomial("prod p_i q_i", (1,) * (2 * n))]
    if n % 2 == 0 and params.odd:
        found = []
        for family, base in (("x", 0), ("y", n)):
            for parity, label in ((0, "even"), (1, "odd")):
                exps = [0] * (2 * n)
                for i in range(1, n + 1):
                    if i % 2 == parity:
                        exps[base + i - 1] = 1
                found.append(Monomial(f"prod {family}_i, i {label}", tuple(exps)))
        return found
    return [Monomial("prod x_i", (1,) * n + (0,) * n),
            Monomial("prod y_i", (0,) * n + (1,) * n)]


def coordinate(u: int) -> Callable[[Sequence], object]:
    return lambda values: values[u]


def jacobi_defect(tensor: PoissonTensor, at: Sequence, triple: Tuple[int, int, int]):
    """{u,{v,w}} + {v,{w,u}} + {w,{u,v}} for coordinate functions u, v, w"""
    def inner(a: int, b: int) -> Callable[[Sequence], object]:
        return lambda values: tensor.matrix[a][b] * values[a] * values[b]

    u, v, w = triple
    return (bracket_of(coordinate(u), inner(v, w), tensor, at) +
            bracket_of(coordinate(v), inner(w, u), tensor, at) +
            bracket_of(coordinate(w), inner(u, v), tensor, at))
