#!/usr/bin/env python
"""
Randomised verification suites

Each suite draws random states (small rationals by default), evaluates a
group of identities and records one PropertyResult per identity and trial.
Trials whose random draw hits a singular configuration are redrawn; a trial
that stays singular after MAX_RESAMPLES draws raises the last
GenericityError. Trials are independent, seeded from (seed, trial, attempt),
so a thread pool gives the same report as a sequential run.
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from dynamics import (corner_conjugate_step, dbar_apply, dk_apply, pentagram_corner_step,
                      q_dynamics_span, tbar_inverse, tbar_step, tk_inverse, tk_step)
from errors import GenericityError, UnknownSuite, UnsupportedSpan, WrongSpan
from geometry import (DUALITY_SHIFT, check_corrugated, extract_xy, find_duality_shift, fk_step,
                      gk_step, polygon_from_xy, psi, random_plane_polygon)
from lax import degree_zero_ratios, homogeneity_degrees, integrals, integrals_in_involution, zero_curvature_check
from leapfrog import (Mobius, crossratio_extend, f2_step, h2_step, lattice_from_orbit, leapfrog_orbit,
                      menelaus_residual, omega_eval, phi, phi_pq, pushforward, random_spair_state,
                      toda_terms)
from poisson import (bracket_of, build_quiver, casimirs, check_map_invariance, coordinate,
                     exchange_roles, mutate_quiver, pq_tensor, relabel_after_mutation, relabel_quiver,
                     tau_mutation_all_p, vector_map, xy_tensor)
from scalars import Backend, close, is_exact, primal_of, random_scalar
from state_io import state_to_document
from states import (MapParams, PQState, XYState, random_corner_state, random_pq_state,
                    random_xy_state, xy_to_pq)

logger = logging.getLogger(__name__)

MAX_RESAMPLES = 25
FLOAT_TOL = 1e-9
CIRCLE_TOL = 1e-10
LATTICE_SIZE = 6


@dataclass
class PropertyResult:
    suite: str
    name: str
    trial: int
    passed: bool
    detail: str = ''
    counterexample: Optional[Dict] = None


@dataclass
class SuiteReport:
    suite: str
    k: int
    n: int
    trials: int
    results: List[PropertyResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> List[PropertyResult]:
        return [r for r in self.results if not r.passed]

    def summary(self) -> Dict[str, Dict[str, int]]:
        """property name -> {'passed': count, 'failed': count}, in first-seen order"""
        table: Dict[str, Dict[str, int]] = {}
        for r in self.results:
            row = table.setdefault(r.name, {'passed': 0, 'failed': 0})
            row['passed' if r.passed else 'failed'] += 1
        return table


class Trial:
    """Collects the results of one trial"""

    def __init__(self, suite: str, index: int, rng: np.random.Generator, backend: Backend,
                 inject_fault: bool = False):
        self.suite = suite
        self.index = index
        self.rng = rng
        self.backend = backend
        self.inject_fault = inject_fault
        self.results: List[PropertyResult] = []
        self.witness = None

    def _record(self, name: str, passed: bool, detail: str = ''):
        example = None
        if not passed and self.witness is not None:
            example = state_to_document(self.witness)
        self.results.append(PropertyResult(self.suite, name, self.index, passed, detail, example))

    def expect_equal(self, name: str, lhs: Sequence, rhs: Sequence, tol: Optional[float] = None):
        lhs = list(lhs)
        if self.inject_fault and lhs:
            lhs[0] = -lhs[0]
        tol = FLOAT_TOL if tol is None else tol
        if len(lhs) != len(rhs):
            self._record(name, False, f"length {len(lhs)} != {len(rhs)}")
            return
        for j, (a, b) in enumerate(zip(lhs, rhs)):
            if not close(a, b, tol):
                self._record(name, False, f"entry {j}: {primal_of(a)} != {primal_of(b)}")
                return
        self._record(name, True)

    def expect(self, name: str, ok: bool, detail: str = ''):
        self._record(name, bool(ok), '' if ok else detail)


def _trial_rng(seed: int, trial: int, attempt: int) -> np.random.Generator:
    return np.random.default_rng([seed, trial, attempt])


# --- suites ----------------------------------------------------------------------------

def _suite_dynamics(t: Trial, params: MapParams):
    s = random_xy_state(t.rng, params, t.backend)
    t.witness = s
    t.expect_equal("pi . T_k = Tbar_k . pi", xy_to_pq(tk_step(s)).values(), tbar_step(xy_to_pq(s)).values())
    t.expect_equal("pi . D_k = Dbar_k . pi", xy_to_pq(dk_apply(s)).values(), dbar_apply(xy_to_pq(s)).values())
    t.expect_equal("D T D = T^-1 on (x, y)", tk_inverse(tk_step(s)).values(), s.values())
    pq = random_pq_state(t.rng, params, t.backend)
    t.witness = pq
    t.expect_equal("Dbar Tbar Dbar = Tbar^-1 on (p, q)", tbar_inverse(tbar_step(pq)).values(), pq.values())
    if params.k == 3:
        c = random_corner_state(t.rng, params.n, t.backend)
        t.witness = c
        t.expect_equal("T_3 in corner invariants = pentagram map shifted",
                       corner_conjugate_step(c).values(), pentagram_corner_step(c).shifted(-1).values())
        scale = random_scalar(t.rng, t.backend)
        t.expect_equal("scaling commutes with the pentagram map",
                       pentagram_corner_step(c.rescaled(scale)).values(),
                       pentagram_corner_step(c).rescaled(scale).values())


def _suite_quiver(t: Trial, params: MapParams):
    quiver = build_quiver(params.k, params.n)
    t.expect("quiver is skew and bipartite", quiver.is_skew() and quiver.is_bipartite())
    mutated = mutate_quiver(quiver, [quiver.p(i) for i in range(1, params.n + 1)])
    t.expect("mutation at all p then relabelling returns the quiver", relabel_quiver(mutated) == quiver)
    other = q_dynamics_span(params)
    if 2 <= other <= params.n:
        t.expect("q-vertices carry the quiver of span n + 2 - k",
                 exchange_roles(quiver) == build_quiver(other, params.n))
    s = random_pq_state(t.rng, params, t.backend)
    t.witness = s
    t.expect_equal("tau-mutation at all p then relabelling = Tbar_k",
                   relabel_after_mutation(tau_mutation_all_p(s, quiver)).values(), tbar_step(s).values())


def _faulty(tensor, inject_fault: bool):
    """The tensor with its first nonzero entry negated when a fault is injected"""
    if not inject_fault:
        return tensor
    u, v = next((u, v) for u in range(tensor.size) for v in range(u + 1, tensor.size) if tensor.entry(u, v))
    return tensor.flipped(u, v)


def _suite_pq_bracket(t: Trial, params: MapParams):
    tensor = _faulty(pq_tensor(build_quiver(params.k, params.n)), t.inject_fault)
    s = random_pq_state(t.rng, params, t.backend)
    t.witness = s
    t.expect("Tbar_k preserves the pq bracket",
             check_map_invariance(vector_map(tbar_step, PQState, params), tensor, s.values()))


def _suite_xy_bracket(t: Trial, params: MapParams):
    tensor = _faulty(xy_tensor(params), t.inject_fault)
    s = random_xy_state(t.rng, params, t.backend)
    t.witness = s
    t.expect("T_k preserves the xy bracket",
             check_map_invariance(vector_map(tk_step, XYState, params), tensor, s.values()))


def _suite_casimirs(t: Trial, params: MapParams):
    s = random_pq_state(t.rng, params, t.backend)
    t.witness = s
    t.expect_equal("prod p_i q_i is preserved by Tbar_k", [tbar_step(s).casimir()], [s.casimir()])
    tensor = pq_tensor(build_quiver(params.k, params.n))
    for c in casimirs(tensor, params):
        brackets = [bracket_of(c, coordinate(u), tensor, s.values()) for u in range(tensor.size)]
        t.expect_equal(f"{{{c.name}, .}} = 0 for the pq bracket", brackets, [0] * tensor.size)
    if params.stable:
        x = random_xy_state(t.rng, params, t.backend)
        t.witness = x
        tensor = xy_tensor(params)
        found = casimirs(tensor, params)
        expected = 4 if params.n % 2 == 0 and params.odd else 2
        t.expect("number of xy Casimirs", len(found) == expected, f"found {len(found)}, expected {expected}")
        for c in found:
            brackets = [bracket_of(c, coordinate(u), tensor, x.values()) for u in range(tensor.size)]
            t.expect_equal(f"{{{c.name}, .}} = 0 for the xy bracket", brackets, [0] * tensor.size)


def _suite_integrals(t: Trial, params: MapParams):
    s = random_xy_state(t.rng, params, t.backend)
    t.witness = s
    before, after = integrals(s), integrals(tk_step(s))
    t.expect("same nonzero integrals after T_k", [k for k, _ in before] == [k for k, _ in after])
    t.expect_equal("integrals preserved by T_k", [v for _, v in after], [v for _, v in before])
    if is_exact(s.x[0]):
        degrees = homogeneity_degrees(params)
        scale = random_scalar(t.rng, t.backend)
        ratios, scaled = degree_zero_ratios(s, degrees), degree_zero_ratios(s.scaled(scale), degrees)
        t.expect_equal("degree-zero ratios are constant on scaling orbits",
                       [scaled[key] for key in sorted(ratios)], [ratios[key] for key in sorted(ratios)])


def _suite_involution(t: Trial, params: MapParams):
    xy_tensor(params)
    s = random_xy_state(t.rng, params, t.backend)
    t.witness = s
    t.expect("integrals Poisson-commute", integrals_in_involution(s))


def _suite_zero_curvature(t: Trial, params: MapParams):
    s = random_xy_state(t.rng, params, t.backend)
    t.witness = s
    t.expect("P_i L = L* P_{i+1} and the monodromy conjugation", zero_curvature_check(s))


def _suite_geometry(t: Trial, params: MapParams):
    s = random_xy_state(t.rng, params, t.backend)
    t.witness = s
    P = polygon_from_xy(s)
    t.expect_equal("extract_xy inverts polygon_from_xy", extract_xy(P).values(), s.values())
    image = fk_step(P)
    t.expect("F_k image is corrugated", check_corrugated(image))
    t.expect_equal("extract_xy . F_k = T_k . extract_xy", extract_xy(image).values(), tk_step(s).values())
    plane = random_plane_polygon(t.rng, params.k, params.n, t.backend)
    t.witness = plane
    t.expect_equal("psi . G_k = T_k . psi", psi(gk_step(plane)).values(), tk_step(psi(plane)).values())


def _suite_duality(t: Trial, params: MapParams):
    s = random_xy_state(t.rng, params, t.backend)
    t.witness = s
    P = polygon_from_xy(s)
    shift = find_duality_shift(P)
    t.expect("duality shift is the pinned value", shift == DUALITY_SHIFT(params),
             f"found {shift}, expected {DUALITY_SHIFT(params)}")


def _suite_leapfrog(t: Trial, params: MapParams):
    s = random_spair_state(t.rng, params.n, t.backend)
    t.witness = s
    image = f2_step(s)
    t.expect_equal("phi . F_2 = T_2 . phi", phi(image).values(), tk_step(phi(s)).values())
    pq = phi_pq(s)
    t.expect_equal("cross-ratio form of pi . phi", pq.values(), xy_to_pq(phi(s)).values())
    t.expect_equal("pi . phi lies on prod p_i q_i = 1", [pq.casimir()], [1])
    residuals = [menelaus_residual(s.s_(i - 1), s.s_(i), s.s_(i + 1), s.sminus_(i), image.s_(i))
                 for i in range(1, s.n + 1)]
    t.expect_equal("both forms of the leapfrog relation agree", residuals, [0] * s.n)
    g = Mobius(*[random_scalar(t.rng, t.backend) for _ in range(4)])
    t.expect_equal("phi is Moebius invariant", phi(s.transformed(g)).values(), phi(s).values())
    u = [random_scalar(t.rng, t.backend) for _ in range(2 * s.n)]
    v = [random_scalar(t.rng, t.backend) for _ in range(2 * s.n)]
    t.expect_equal("omega is F_2 invariant",
                   [omega_eval(image, pushforward(s, u), pushforward(s, v))], [omega_eval(s, u, v)])


def _suite_circles(t: Trial, params: MapParams):
    s = random_spair_state(t.rng, params.n, Backend.COMPLEX)
    t.witness = s
    t.expect_equal("tangent circles reproduce F_2", h2_step(s).s, f2_step(s).s, CIRCLE_TOL)


def _suite_lattice(t: Trial, params: MapParams):
    s = random_spair_state(t.rng, params.n, Backend.COMPLEX)
    t.witness = s
    size = LATTICE_SIZE
    field_ = lattice_from_orbit(leapfrog_orbit(s, size - 2), size, size, q=-1)
    extended = crossratio_extend(field_, random_scalar(t.rng, Backend.COMPLEX))
    residuals, scales = [], []
    for m in range(1, size - 1):
        for n in range(1, size - 1):
            if (m + n) % 2 == 1:
                terms = toda_terms(extended, m, n)
                residuals.append(abs(sum(terms)))
                scales.append(max(1.0, sum(abs(x) for x in terms)))
    worst = max(r / c for r, c in zip(residuals, scales))
    t.expect("odd sublattice satisfies the five-point equation", worst < FLOAT_TOL, f"residual {worst:.3e}")


@dataclass(frozen=True)
class Suite:
    run: Callable[[Trial, MapParams], None]
    min_k: int = 2
    leapfrog: bool = False
    backend: Optional[Backend] = None


SUITES: Dict[str, Suite] = {
    'dynamics': Suite(_suite_dynamics),
    'quiver': Suite(_suite_quiver),
    'pq-bracket': Suite(_suite_pq_bracket),
    'xy-bracket': Suite(_suite_xy_bracket),
    'casimirs': Suite(_suite_casimirs),
    'integrals': Suite(_suite_integrals),
    'involution': Suite(_suite_involution),
    'zero-curvature': Suite(_suite_zero_curvature, min_k=3),
    'geometry': Suite(_suite_geometry, min_k=3),
    'duality': Suite(_suite_duality, min_k=3),
    'leapfrog': Suite(_suite_leapfrog, leapfrog=True),
    'circles': Suite(_suite_circles, leapfrog=True, backend=Backend.COMPLEX),
    'lattice': Suite(_suite_lattice, leapfrog=True, backend=Backend.COMPLEX),
}


def applicable_suites(params: MapParams) -> List[str]:
    """Suites that accept (k, n), in registration order"""
    names = []
    for name, suite in SUITES.items():
        if suite.leapfrog and params.k != 2:
            continue
        if params.k < suite.min_k:
            continue
        if name in ('xy-bracket', 'involution') and not params.stable:
            continue
        names.append(name)
    return names


def _check_parameters(name: str, suite: Suite, params: MapParams):
    if suite.leapfrog and params.k != 2:
        raise WrongSpan(f"suite '{name}' is about k = 2, got k = {params.k}")
    if params.k < suite.min_k:
        raise UnsupportedSpan(f"suite '{name}' needs k >= {suite.min_k}, got k = {params.k}")
    if name in ('xy-bracket', 'involution'):
        xy_tensor(params)


def run_trial(name: str, params: MapParams, index: int, seed: int, backend: Backend,
              inject_fault: bool = False) -> List[PropertyResult]:
    """One trial, redrawn on genericity failures"""
    suite = SUITES[name]
    last_error = None
    for attempt in range(MAX_RESAMPLES):
        trial = Trial(name, index, _trial_rng(seed, index, attempt), suite.backend or backend, inject_fault)
        try:
            suite.run(trial, params)
        except GenericityError as e:
            logger.debug("suite %s trial %d attempt %d singular: %s", name, index, attempt, e)
            last_error = e
            continue
        return trial.results
    raise last_error


def run_suite(name: str, k: int, n: int, trials: int = 10, seed: int = 42,
              backend: Backend = Backend.RATIONAL, workers: int = 1,
              inject_fault: bool = False) -> SuiteReport:
    """Run `trials` trials of a suite; results are ordered by trial index"""
    if name not in SUITES:
        raise UnknownSuite(f"unknown suite '{name}' (known: {', '.join(SUITES)})")
    params = MapParams(k, n)
    _check_parameters(name, SUITES[name], params)
    report = SuiteReport(name, k, n, trials)

    def work(index: int) -> List[PropertyResult]:
        return run_trial(name, params, index, seed, backend, inject_fault)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            batches = list(executor.map(work, range(trials)))
    else:
        batches = [work(index) for index in range(trials)]
    for batch in batches:
        report.results.extend(batch)
    logger.debug("suite %s k=%d n=%d: %d results, passed=%s", name, k, n, len(report.results), report.passed)
    return report
