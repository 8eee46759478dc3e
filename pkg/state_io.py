#!/usr/bin/env python
"""
State files for pentalab

Reads and writes the JSON documents the CLI works on (map states, polygons
and S-pairs) and exports orbits, integrals and lattices as CSV.
"""

import json
import logging
import os
from typing import Dict, Optional, Sequence

import pandas as pd

from errors import InvalidState, StateFileError
from geometry import CorrugatedPolygon, PlanePolygon
from leapfrog import INFINITY, LatticeField, Mobius, SPairState, is_infinite
from scalars import Backend, decimal_of, format_scalar
from states import CornerState, EdgeWeights, MapParams, PQState, XYState

logger = logging.getLogger(__name__)

# coordinate system -> array fields of the document
ARRAY_FIELDS = {
    'xy': ('x', 'y'),
    'pq': ('p', 'q'),
    'corner': ('X', 'Y'),
    'edge': ('a', 'b', 'c', 'd'),
    'spair': ('s_minus', 's'),
}

State = object


def coords_of(state: State) -> str:
    if isinstance(state, XYState):
        return 'xy'
    if isinstance(state, PQState):
        return 'pq'
    if isinstance(state, CornerState):
        return 'corner'
    if isinstance(state, EdgeWeights):
        return 'edge'
    if isinstance(state, SPairState):
        return 'spair'
    if isinstance(state, PlanePolygon):
        return 'plane-polygon'
    if isinstance(state, CorrugatedPolygon):
        return 'polygon'
    raise InvalidState(f"no document format for {type(state).__name__}")


def _point_out(z):
    return 'inf' if is_infinite(z) else format_scalar(z)


def _point_in(backend: Backend, token):
    return INFINITY if token == 'inf' else backend.parse(token)


def state_to_document(state: State) -> Dict:
    """JSON-ready document of a state, polygon or S-pair"""
    coords = coords_of(state)
    if coords == 'spair':
        m = state.monodromy
        return {
            'n': state.n,
            'coords': coords,
            'backend': state.backend.value,
            's_minus': [_point_out(z) for z in state.s_minus],
            's': [_point_out(z) for z in state.s],
            'monodromy': [format_scalar(v) for v in (m.a, m.b, m.c, m.d)],
        }
    if coords in ('polygon', 'plane-polygon'):
        values = [v for lift in state.lifts for v in lift]
        return {
            'k': state.k,
            'n': state.n,
            'coords': coords,
            'backend': Backend.of_values(values).value,
            'lifts': [[format_scalar(v) for v in lift] for lift in state.lifts],
            'monodromy': [[format_scalar(v) for v in row] for row in state.monodromy],
        }
    k = 3 if coords == 'corner' else state.params.k
    document = {'k': k, 'n': state.n, 'coords': coords, 'backend': _backend_of(state).value}
    for name in ARRAY_FIELDS[coords]:
        document[name] = [format_scalar(v) for v in getattr(state, name)]
    return document


def _backend_of(state: State) -> Backend:
    values = [v for name in ARRAY_FIELDS[coords_of(state)] for v in getattr(state, name)]
    return Backend.of_values(values)


def _require(document: Dict, key: str):
    if key not in document:
        raise StateFileError(f"state document is missing '{key}'")
    return document[key]


def _int_field(document: Dict, key: str) -> int:
    value = _require(document, key)
    if not isinstance(value, int) or isinstance(value, bool):
        raise StateFileError(f"'{key}' must be an integer, got {value!r}")
    return value


def document_to_state(document: Dict, backend: Optional[Backend] = None) -> State:
    """Parse a document; reports the first violated invariant"""
    if not isinstance(document, dict):
        raise StateFileError("state document must be a JSON object")
    coords = _require(document, 'coords')
    if backend is None:
        name = document.get('backend', os.getenv('PENTALAB_DEFAULT_BACKEND', 'rational'))
        try:
            backend = Backend(name)
        except ValueError:
            raise StateFileError(f"unknown backend '{name}'")
    n = _int_field(document, 'n')

    if coords == 'spair':
        arrays = {name: [_point_in(backend, t) for t in _require(document, name)]
                  for name in ARRAY_FIELDS['spair']}
        entries = [backend.parse(t) for t in _require(document, 'monodromy')]
        if len(entries) != 4:
            raise StateFileError("S-pair monodromy must have four entries a, b, c, d")
        return SPairState(n, tuple(arrays['s_minus']), tuple(arrays['s']), Mobius(*entries))

    k = _int_field(document, 'k')
    if coords in ('polygon', 'plane-polygon'):
        lifts = [[backend.parse(t) for t in lift] for lift in _require(document, 'lifts')]
        mono = [[backend.parse(t) for t in row] for row in _require(document, 'monodromy')]
        if coords == 'polygon':
            return CorrugatedPolygon(MapParams(k, n), lifts, mono)
        return PlanePolygon(n, k, lifts, mono)

    if coords not in ARRAY_FIELDS:
        raise StateFileError(f"unknown coordinate system '{coords}'")
    arrays = [tuple(backend.parse(t) for t in _require(document, name)) for name in ARRAY_FIELDS[coords]]
    if coords == 'corner':
        if k != 3:
            raise InvalidState(f"corner documents need k = 3, got k = {k}")
        return CornerState(n, *arrays)
    params = MapParams(k, n)
    if coords == 'xy':
        return XYState(params, *arrays)
    if coords == 'pq':
        return PQState(params, *arrays)
    return EdgeWeights(params, *arrays)


def save_state(state: State, path: str):
    """Write a state document as indented JSON"""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w') as f:
        json.dump(state_to_document(state), f, indent=2)
    logger.debug("saved %s state to %s", coords_of(state), path)


def load_state(path: str, backend: Optional[Backend] = None) -> State:
    """Load a state document; a missing or malformed file raises StateFileError naming the path"""
    if not os.path.exists(path):
        raise StateFileError(f"state file not found: {path}")
    try:
        with open(path, 'r') as f:
            document = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise StateFileError(f"cannot read state file {path}: {e}")
    try:
        return document_to_state(document, backend)
    except StateFileError as e:
        raise StateFileError(f"{path}: {e}")


# --- CSV exports ------------------------------------------------------------------

def _cell(value) -> str:
    if is_infinite(value):
        return 'inf'
    formatted = format_scalar(value)
    if isinstance(formatted, dict):
        return decimal_of(value)
    return formatted


def orbit_frame(states: Sequence[State], decimal: bool = False) -> pd.DataFrame:
    """One row per step: step, then every coordinate (x1..xn, y1..yn, ...)"""
    if not states:
        return pd.DataFrame(columns=['step'])
    coords = coords_of(states[0])
    if coords not in ARRAY_FIELDS:
        raise InvalidState(f"orbits of {coords} documents cannot be tabulated")
    names = ARRAY_FIELDS[coords]
    rows = []
    for step, state in enumerate(states):
        row = {'step': step}
        for name in names:
            for i, value in enumerate(getattr(state, name), start=1):
                row[f"{name}{i}"] = _cell(value)
        if decimal:
            for name in names:
                for i, value in enumerate(getattr(state, name), start=1):
                    row[f"{name}{i}_decimal"] = 'inf' if is_infinite(value) else decimal_of(value)
        if coords == 'pq':
            row['casimir'] = _cell(state.casimir())
        rows.append(row)
    return pd.DataFrame(rows)


def export_orbit_csv(states: Sequence[State], path: str, decimal: bool = False):
    _write_csv(orbit_frame(states, decimal), path)


def integrals_frame(values: Sequence) -> pd.DataFrame:
    return pd.DataFrame([{'i': i, 'j': j, 'value': _cell(v)} for (i, j), v in values],
                        columns=['i', 'j', 'value'])


def export_integrals_csv(values: Sequence, path: str):
    _write_csv(integrals_frame(values), path)


def export_lattice_csv(field: LatticeField, path: str):
    _write_csv(pd.DataFrame(field.rows(), columns=['m', 'n', 're', 'im']), path)


def _write_csv(frame: pd.DataFrame, path: str):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.debug("wrote %d rows to %s", len(frame), path)
