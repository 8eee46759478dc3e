"""
Unit tests for state_io.py
State documents, state files and CSV exports
"""

import json
import os
from fractions import Fraction

import pandas as pd
import pytest

from dynamics import orbit, tbar_step, tk_step
from errors import InvalidState, StateFileError
from geometry import polygon_from_xy
from lax import integrals
from leapfrog import INFINITY, Mobius, SPairState, lattice_from_orbit, leapfrog_orbit
from scalars import Backend, format_scalar
from state_io import (coords_of, document_to_state, export_integrals_csv, export_lattice_csv,
                      export_orbit_csv, integrals_frame, load_state, orbit_frame,
                      save_state, state_to_document)
from states import CornerState, EdgeWeights, MapParams, XYState
from tests.conftest import positive_pq

F = Fraction


class TestDocuments:
    """state_to_document and document_to_state"""

    def test_xy_document_layout(self, sample_xy):
        """Keys k, n, coords, backend and the coordinate arrays as strings"""
        document = state_to_document(sample_xy)
        assert document == {'k': 3, 'n': 5, 'coords': 'xy', 'backend': 'rational',
                            'x': ['2', '1', '1', '1', '1'], 'y': ['1'] * 5}

    def test_rational_strings(self):
        """Non-integers are written as p/q"""
        s = XYState(MapParams(2, 2), (F(1, 2), F(-3, 4)), (F(1), F(5)))
        assert state_to_document(s)['x'] == ['1/2', '-3/4']

    def test_round_trips(self, sample_xy, sample_pq):
        """Every coordinate system survives a round trip"""
        corner = CornerState(4, (F(1), F(2), F(3), F(4)), (F(1, 2),) * 4)
        ones = (F(1),) * 4
        edge = EdgeWeights(MapParams(3, 4), (F(2),) * 4, ones, ones, ones)
        for state in (sample_xy, sample_pq, corner, edge):
            assert document_to_state(state_to_document(state)) == state

    def test_spair_with_infinity(self):
        """Points at infinity are written as 'inf'"""
        s = SPairState(2, (INFINITY, F(1)), (F(0), F(2)), Mobius(F(2), F(0), F(0), F(1)))
        document = state_to_document(s)
        assert document['s_minus'] == ['inf', '1']
        assert document['monodromy'] == ['2', '0', '0', '1']
        assert document_to_state(document) == s

    def test_complex_spair(self, reflection_pair):
        """Complex scalars are written as re/im objects"""
        document = state_to_document(reflection_pair)
        assert document['backend'] == 'complex'
        assert document['s_minus'] == [{'re': 0.0, 'im': 1.0}]
        assert document_to_state(document) == reflection_pair

    def test_polygon_round_trip(self, sample_xy):
        """Lifts and monodromy are stored as nested lists"""
        P = polygon_from_xy(sample_xy)
        document = state_to_document(P)
        assert document['coords'] == 'polygon'
        assert len(document['lifts']) == 8
        assert document_to_state(document) == P

    def test_coords_of(self, sample_xy):
        """Unknown objects have no document format"""
        assert coords_of(sample_xy) == 'xy'
        with pytest.raises(InvalidState):
            coords_of(object())

    def test_default_backend_from_env(self, clean_env):
        """Without a 'backend' key PENTALAB_DEFAULT_BACKEND decides"""
        clean_env.setenv('PENTALAB_DEFAULT_BACKEND', 'float')
        document = {'k': 2, 'n': 2, 'coords': 'xy', 'x': ['1/2', '1'], 'y': ['1', '2']}
        s = document_to_state(document)
        assert s.x == (0.5, 1.0)
        assert s.backend is Backend.FLOAT

    def test_backend_override(self, sample_xy):
        """An explicit backend wins over the document"""
        s = document_to_state(state_to_document(sample_xy), Backend.FLOAT)
        assert s.backend is Backend.FLOAT

    @pytest.mark.parametrize("document", [
        {'k': 3, 'n': 5, 'coords': 'xy', 'x': ['1'] * 5},
        {'k': 3, 'n': 'five', 'coords': 'xy', 'x': ['1'] * 5, 'y': ['1'] * 5},
        {'k': 3, 'n': 5, 'coords': 'uv', 'u': ['1'] * 5},
        {'k': 3, 'n': 5, 'coords': 'xy', 'backend': 'quaternion', 'x': ['1'] * 5, 'y': ['1'] * 5},
        ['not', 'an', 'object'],
    ])
    def test_malformed_documents(self, document):
        """Structural problems raise StateFileError"""
        with pytest.raises(StateFileError):
            document_to_state(document)

    def test_invalid_values(self):
        """A zero coordinate is an invalid state, not a malformed file"""
        document = {'k': 2, 'n': 2, 'coords': 'pq', 'p': ['1', '0'], 'q': ['1', '1']}
        with pytest.raises(InvalidState) as exc:
            document_to_state(document)
        assert exc.value.index == 2

    def test_corner_needs_k3(self):
        """Corner documents carry k = 3"""
        document = {'k': 4, 'n': 4, 'coords': 'corner', 'X': ['1'] * 4, 'Y': ['2'] * 4}
        with pytest.raises(InvalidState):
            document_to_state(document)


class TestStateFiles:
    """save_state and load_state"""

    def test_save_and_load(self, tmp_path, sample_pq):
        """Files are indented JSON and load back to the same state"""
        path = str(tmp_path / 'nested' / 'pq.json')
        save_state(sample_pq, path)
        with open(path) as f:
            assert json.load(f)['coords'] == 'pq'
        assert load_state(path) == sample_pq

    def test_missing_file(self, tmp_path):
        """The message names the path"""
        path = str(tmp_path / 'missing.json')
        with pytest.raises(StateFileError) as exc:
            load_state(path)
        assert path in str(exc.value)

    def test_malformed_json(self, tmp_path):
        """Unparseable JSON is a state file error"""
        path = tmp_path / 'broken.json'
        path.write_text('{"k": 3,')
        with pytest.raises(StateFileError):
            load_state(str(path))

    def test_malformed_document_names_path(self, tmp_path):
        """Document errors are prefixed with the file name"""
        path = tmp_path / 'partial.json'
        path.write_text(json.dumps({'n': 3, 'k': 2}))
        with pytest.raises(StateFileError) as exc:
            load_state(str(path))
        assert str(path) in str(exc.value)


class TestCsvExports:
    """Orbits, integrals and lattices as CSV"""

    def test_orbit_columns(self, ones_state):
        """step, x1..xn, y1..yn"""
        frame = orbit_frame(orbit(tk_step, ones_state, 2))
        assert list(frame.columns) == ['step'] + [f'x{i}' for i in range(1, 6)] + [f'y{i}' for i in range(1, 6)]
        assert len(frame) == 3

    def test_pq_orbit_has_casimir(self, rng):
        """pq orbits carry the Casimir, constant along the orbit"""
        s = positive_pq(rng, 3, 5)
        frame = orbit_frame(orbit(tbar_step, s, 3))
        assert len(set(frame["casimir"])) == 1
        assert frame.loc[0, "casimir"] == format_scalar(s.casimir())

    def test_decimal_columns(self, sample_xy):
        """Optional approximate columns next to the exact ones"""
        frame = orbit_frame([tk_step(sample_xy)], decimal=True)
        assert frame.loc[0, 'x1'] == '3/2'
        assert frame.loc[0, 'x1_decimal'] == '1.5'

    def test_empty_orbit(self):
        """No states, only the step column"""
        assert list(orbit_frame([]).columns) == ['step']

    def test_write_and_read(self, tmp_path, sample_xy):
        """Exported orbits keep exact strings"""
        path = str(tmp_path / 'out' / 'orbit.csv')
        export_orbit_csv(orbit(tk_step, sample_xy, 1), path)
        rows = pd.read_csv(path, dtype=str).to_dict(orient='records')
        assert len(rows) == 2
        assert rows[1]['x1'] == '3/2'
        assert rows[0]['step'] == '0'

    def test_integrals(self, tmp_path, ones_state):
        """i, j, value rows"""
        values = integrals(ones_state)
        frame = integrals_frame(values)
        assert list(frame.columns) == ['i', 'j', 'value']
        assert len(frame) == len(values)
        path = str(tmp_path / 'integrals.csv')
        export_integrals_csv(values, path)
        assert len(pd.read_csv(path)) == len(values)

    def test_lattice(self, tmp_path, reflection_pair):
        """m, n, re, im rows for the known sites"""
        field = lattice_from_orbit(leapfrog_orbit(reflection_pair, 1), 2, 2)
        path = str(tmp_path / 'lattice.csv')
        export_lattice_csv(field, path)
        frame = pd.read_csv(path)
        assert list(frame.columns) == ['m', 'n', 're', 'im']
        assert len(frame) == 2
        assert os.path.exists(path)
