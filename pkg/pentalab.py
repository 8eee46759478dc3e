#!/usr/bin/env python
"""
pentalab

Iterates the higher pentagram maps, exports orbits and integrals, runs the
verification suites and renders polygons and circle patterns.

Usage:
    python pentalab.py iterate --state s.json --steps 10 --out orbit.csv
    python pentalab.py integrals --state s.json --out integrals.csv
    python pentalab.py verify --suite integrals --k 3 --n 7 --trials 20 --seed 42
    python pentalab.py render --backend float --k 3 --n 5 --steps 2 --out pentagon.svg
    python pentalab.py convert --state s.json --to pq --out s_pq.json

Exit codes: 0 success, 1 verification failure, 2 invalid input, 3 singular
configuration.
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from dotenv import load_dotenv

from dynamics import pentagram_corner_step, tbar_step, tk_step
from errors import (BackendMismatch, DivisionByZero, GenericityError, InvalidState, PentalabError,
                    exit_code_for)
from geometry import PlanePolygon, gk_step, plane_polygon_from_xy
from lax import integrals
from leapfrog import SPairState, circle_pattern, f2_step, lattice_from_orbit, random_spair_state
from render import circle_pattern_svg, polygon_orbit_svg, write_svg
from scalars import Backend
from state_io import (coords_of, export_integrals_csv, export_lattice_csv, export_orbit_csv, load_state,
                      save_state)
from states import (CornerState, EdgeWeights, MapParams, PQState, XYState, corner_to_xy,
                    edgeweights_to_xy, pq_to_xy, random_corner_state, random_pq_state,
                    random_xy_state, xy_to_corner, xy_to_pq)
from verification import SUITES, applicable_suites, run_suite

load_dotenv()

COMMANDS = ['iterate', 'integrals', 'verify', 'render', 'convert']
MAPS = {'tk': tk_step, 'tbar': tbar_step, 'pentagram': pentagram_corner_step, 'leapfrog': f2_step}
DEFAULT_MAP = {'xy': 'tk', 'pq': 'tbar', 'corner': 'pentagram', 'spair': 'leapfrog'}
MAP_STATE = {'tk': XYState, 'tbar': PQState, 'pentagram': CornerState, 'leapfrog': SPairState}
# sends the standard basis to (1, 0), (0, 1), (0, 0) in the chart z = 1
AFFINE_FRAME = [[1, 0, 0], [0, 1, 0], [1, 1, 1]]


@dataclass
class RunConfig:
    """Everything a command needs, built from the command line"""
    command: str
    k: int = 3
    n: int = 5
    backend: Backend = Backend.RATIONAL
    steps: int = 1
    seed: int = 42
    state: Optional[str] = None
    out: Optional[str] = None
    suite: Optional[str] = None
    trials: int = 10
    decimal: bool = False
    map: Optional[str] = None
    to: Optional[str] = None
    x1: str = '1'
    workers: int = 1
    verbose: bool = False
    inject_fault: bool = False
    lattice_csv: Optional[str] = None
    explicit_backend: bool = False  # --backend given; overrides the backend of --state

    def __post_init__(self):
        if self.steps < 0:
            raise InvalidState(f"--steps must be >= 0, got {self.steps}")
        if self.trials < 1:
            raise InvalidState(f"--trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise InvalidState(f"--workers must be >= 1, got {self.workers}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Higher pentagram maps: iterate, verify and render")
    parser.add_argument("command", choices=COMMANDS, help="What to do")
    parser.add_argument("--k", type=int, default=3, help="Span k (default: 3)")
    parser.add_argument("--n", type=int, default=5, help="Period n (default: 5)")
    parser.add_argument("--steps", type=int, default=1, help="Number of map steps (default: 1)")
    parser.add_argument("--trials", type=int, default=10, help="Random trials per suite (default: 10)")
    parser.add_argument("--seed", type=int, default=None,
                        help="Seed for random states (default: PENTALAB_DEFAULT_SEED or 42)")
    parser.add_argument("--backend", choices=[b.value for b in Backend], default=None,
                        help="Scalar field (default: PENTALAB_DEFAULT_BACKEND or rational)")
    parser.add_argument("--state", type=str, help="Input state document (JSON)")
    parser.add_argument("--out", type=str, help="Output file")
    parser.add_argument("--suite", type=str, help="Verification suite: " + ", ".join(SUITES))
    parser.add_argument("--decimal", action="store_true", help="Add decimal columns to orbit CSVs")
    parser.add_argument("--lattice-csv", type=str,
                        help="Also write the leapfrog orbit as an even-sublattice CSV (m, n, re, im)")
    parser.add_argument("--map", choices=list(MAPS), help="Map to iterate (default: from the state)")
    parser.add_argument("--to", choices=['xy', 'pq', 'corner'], help="Target coordinates for convert")
    parser.add_argument("--x1", type=str, default='1', help="Fibre coordinate x_1 for pq -> xy (default: 1)")
    parser.add_argument("--workers", type=int, default=1, help="Threads for verify (default: 1)")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    parser.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    backend = args.backend or os.getenv('PENTALAB_DEFAULT_BACKEND', 'rational')
    try:
        backend = Backend(backend)
    except ValueError:
        raise InvalidState(f"unknown backend '{backend}'")
    seed = args.seed if args.seed is not None else int(os.getenv('PENTALAB_DEFAULT_SEED', '42'))
    return RunConfig(
        command=args.command, k=args.k, n=args.n, backend=backend, steps=args.steps, seed=seed,
        state=args.state, out=args.out, suite=args.suite, trials=args.trials, decimal=args.decimal,
        map=args.map, to=args.to, x1=args.x1, workers=args.workers, verbose=args.verbose,
        inject_fault=args.inject_fault, lattice_csv=args.lattice_csv,
        explicit_backend=args.backend is not None,
    )


def _banner(title: str):
    print("=" * 60)
    print(title)
    print("=" * 60)


def _load(cfg: RunConfig):
    return load_state(cfg.state, cfg.backend if cfg.explicit_backend else None)


def _input_state(cfg: RunConfig, coords: str):
    """The --state document, or a random state of the requested kind"""
    if cfg.state:
        return _load(cfg)
    rng = np.random.default_rng(cfg.seed)
    if coords == 'spair':
        return random_spair_state(rng, cfg.n, cfg.backend)
    if coords == 'corner':
        return random_corner_state(rng, cfg.n, cfg.backend)
    params = MapParams(cfg.k, cfg.n)
    if coords == 'pq':
        return random_pq_state(rng, params, cfg.backend)
    return random_xy_state(rng, params, cfg.backend)


# --- commands ---------------------------------------------------------------------

def cmd_iterate(cfg: RunConfig) -> int:
    map_name = cfg.map or 'tk'
    state = _input_state(cfg, {v: k for k, v in DEFAULT_MAP.items()}[map_name])
    if cfg.state and not cfg.map:
        map_name = DEFAULT_MAP.get(coords_of(state))
        if map_name is None:
            raise InvalidState(f"no map acts on {coords_of(state)} documents")
    if not isinstance(state, MAP_STATE[map_name]):
        raise InvalidState(f"map '{map_name}' does not act on {coords_of(state)} documents")
    if cfg.lattice_csv and map_name != 'leapfrog':
        raise InvalidState(f"--lattice-csv needs a leapfrog orbit, got map '{map_name}'")
    step = MAPS[map_name]
    print(f"Iterating {map_name} for {cfg.steps} steps (n = {state.n})...")
    orbit = [state]
    for t in range(1, cfg.steps + 1):
        try:
            orbit.append(step(orbit[-1]))
        except GenericityError as e:
            raise _at_step(e, t)
    out = cfg.out or 'orbit.csv'
    export_orbit_csv(orbit, out, cfg.decimal)
    print(f"✅ Wrote {len(orbit)} rows to {out}")
    if cfg.lattice_csv:
        _export_lattice(orbit, cfg.lattice_csv)
    return 0


def _export_lattice(orbit: List[SPairState], path: str):
    """Square even-sublattice window filled by the orbit: steps + 2 rows and columns"""
    size = len(orbit) + 1
    lattice = lattice_from_orbit(orbit, size, size)
    export_lattice_csv(lattice, path)
    print(f"✅ Wrote a {size}x{size} lattice to {path}")


def _at_step(error: GenericityError, step: int) -> GenericityError:
    """Prefix the message with the step at which the orbit became singular"""
    error.args = (f"step {step}: {error}",)
    return error


def cmd_integrals(cfg: RunConfig) -> int:
    state = _input_state(cfg, 'xy')
    if not isinstance(state, XYState):
        raise InvalidState(f"integrals need an xy document, got {coords_of(state)}")
    values = integrals(state)
    out = cfg.out or 'integrals.csv'
    export_integrals_csv(values, out)
    print(f"📊 {len(values)} nonzero integrals I_ij for k = {state.k}, n = {state.n}")
    print(f"✅ Wrote {out}")
    return 0


def cmd_verify(cfg: RunConfig) -> int:
    suites = [cfg.suite] if cfg.suite else applicable_suites(MapParams(cfg.k, cfg.n))
    all_passed = True
    for name in suites:
        print(f"\n🎯 Suite {name}: k = {cfg.k}, n = {cfg.n}, {cfg.trials} trials, seed {cfg.seed}")
        report = run_suite(name, cfg.k, cfg.n, cfg.trials, cfg.seed, cfg.backend, cfg.workers,
                           cfg.inject_fault)
        for prop, counts in report.summary().items():
            mark = "✅" if counts['failed'] == 0 else "❌"
            print(f"  {mark} {prop}: {counts['passed']}/{counts['passed'] + counts['failed']}")
        for failure in report.failures()[:1]:
            print(f"  ❌ trial {failure.trial}: {failure.name} ({failure.detail})")
            if failure.counterexample is not None:
                print("  Counterexample:")
                print(json.dumps(failure.counterexample, indent=2))
        all_passed = all_passed and report.passed
    print("\n" + "=" * 60)
    print("✅ All properties hold" if all_passed else "❌ Verification failed")
    return 0 if all_passed else 1


def cmd_render(cfg: RunConfig) -> int:
    if cfg.backend is Backend.RATIONAL:
        raise BackendMismatch("rendering needs --backend float or complex")
    out = cfg.out or 'render.svg'
    state = _input_state(cfg, 'spair' if cfg.map == 'leapfrog' else 'xy')
    if isinstance(state, SPairState):
        svg = circle_pattern_svg(circle_pattern(state, 1))
        print(f"Rendering the circle pattern at site 1 of an S-pair with n = {state.n}")
    else:
        if isinstance(state, XYState):
            polygon = plane_polygon_from_xy(state, seed=AFFINE_FRAME, backend=cfg.backend)
        elif isinstance(state, PlanePolygon):
            polygon = state
        else:
            raise InvalidState(f"cannot render {coords_of(state)} documents")
        layers = [polygon]
        for _ in range(cfg.steps):
            layers.append(gk_step(layers[-1]))
        svg = polygon_orbit_svg(layers)
        print(f"Rendering {len(layers)} layers of G_{polygon.k} on a twisted {polygon.n}-gon")
    write_svg(svg, out)
    print(f"✅ Wrote {out}")
    return 0


def cmd_convert(cfg: RunConfig) -> int:
    if not cfg.state:
        raise InvalidState("convert needs --state")
    if not cfg.to:
        raise InvalidState("convert needs --to")
    state = _load(cfg)
    source = coords_of(state)
    if isinstance(state, EdgeWeights):
        state, source = edgeweights_to_xy(state), 'xy'
    if isinstance(state, CornerState) and cfg.to != 'corner':
        state, source = corner_to_xy(state), 'xy'
    if source == cfg.to:
        result = state
    elif source == 'xy' and cfg.to == 'pq':
        result = xy_to_pq(state)
    elif source == 'xy' and cfg.to == 'corner':
        result = xy_to_corner(state)
    elif source == 'pq':
        xy = pq_to_xy(state, state.backend.parse(cfg.x1))
        result = xy if cfg.to == 'xy' else xy_to_corner(xy)
    else:
        raise InvalidState(f"cannot convert {source} documents to {cfg.to}")
    out = cfg.out or f"state_{cfg.to}.json"
    save_state(result, out)
    print(f"✅ Converted {coords_of(state)} -> {cfg.to}: {out}")
    return 0


HANDLERS = {
    'iterate': cmd_iterate,
    'integrals': cmd_integrals,
    'verify': cmd_verify,
    'render': cmd_render,
    'convert': cmd_convert,
}


def main(argv: Optional[List[str]] = None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)

    _banner(f"PENTALAB {args.command.upper()}")
    try:
        cfg = config_from_args(args)
        code = HANDLERS[cfg.command](cfg)
    except PentalabError as e:
        print(f"❌ {e}")
        sys.exit(exit_code_for(e))
    except ArithmeticError as e:
        # float overflow or a division the exact checks did not anticipate
        error = DivisionByZero(str(e) or "division by zero") if isinstance(e, ZeroDivisionError) else e
        print(f"❌ {error}")
        sys.exit(exit_code_for(error))
    sys.exit(code)


if __name__ == "__main__":
    main()
