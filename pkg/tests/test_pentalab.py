"""
Unit tests for pentalab.py
The command-line surface: commands, outputs and exit codes
"""

import json
from fractions import Fraction

import pandas as pd
import pytest

from errors import InvalidState
from pentalab import RunConfig, main
from states import MapParams, XYState
from verification import run_suite
from tests.conftest import positive_pq

F = Fraction


def run(argv, capsys):
    """(exit code, stdout) of one CLI invocation"""
    with pytest.raises(SystemExit) as exc:
        main(argv)
    return exc.value.code, capsys.readouterr().out


@pytest.fixture(autouse=True)
def no_settings(clean_env):
    """Every CLI test starts from the documented defaults"""
    return clean_env


class TestVerify:
    """pentalab verify"""

    def test_passing_suite(self, capsys):
        """A passing suite exits 0"""
        code, out = run(['verify', '--suite', 'integrals', '--k', '3', '--n', '7', '--trials', '5',
                         '--seed', '42'], capsys)
        assert code == 0
        assert 'All properties hold' in out

    def test_outside_stable_range(self, capsys):
        """The xy bracket below n = 2k - 1 is invalid input"""
        code, out = run(['verify', '--suite', 'xy-bracket', '--k', '4', '--n', '6'], capsys)
        assert code == 2
        assert 'outside stable range n ≥ 2k−1 = 7' in out

    def test_unknown_suite(self, capsys):
        """Unknown suite names are invalid input"""
        code, _ = run(['verify', '--suite', 'nonsense'], capsys)
        assert code == 2

    def test_injected_fault(self, capsys):
        """A failing property exits 1 and prints the counterexample"""
        code, out = run(['verify', '--suite', 'pq-bracket', '--k', '3', '--n', '5', '--trials', '2',
                         '--inject-fault'], capsys)
        assert code == 1
        assert 'Counterexample' in out
        assert 'Verification failed' in out

    def test_workers_are_passed_through(self, capsys, mocker):
        """--workers reaches run_suite"""
        spy = mocker.patch("pentalab.run_suite", wraps=run_suite)
        code, _ = run(['verify', '--suite', 'quiver', '--trials', '2', '--workers', '2'], capsys)
        assert code == 0
        assert spy.call_args.args[6] == 2

    def test_bad_trials(self, capsys):
        """--trials must be positive"""
        code, _ = run(['verify', '--trials', '0'], capsys)
        assert code == 2

    @pytest.mark.slow
    @pytest.mark.parametrize("k, n", [(3, 5), (2, 4)])
    def test_all_suites_by_default(self, capsys, k, n):
        """Without --suite every suite that accepts (k, n) runs and passes"""
        code, out = run(['verify', '--k', str(k), '--n', str(n), '--trials', '1'], capsys)
        assert code == 0
        assert 'All properties hold' in out
        assert ('Suite leapfrog' in out) == (k == 2)
        assert ('Suite geometry' in out) == (k == 3)


class TestIterate:
    """pentalab iterate"""

    def test_fixed_point(self, capsys, tmp_path, state_file, ones_state):
        """The all-ones state is fixed by T_3"""
        out = str(tmp_path / 'orbit.csv')
        code, _ = run(['iterate', '--state', state_file(ones_state), '--steps', '10', '--out', out], capsys)
        assert code == 0
        frame = pd.read_csv(out, dtype=str)
        assert len(frame) == 11
        assert len(frame.drop(columns='step').drop_duplicates()) == 1

    def test_pq_orbit(self, capsys, tmp_path, state_file, rng):
        """pq documents iterate Tbar_k and keep their Casimir"""
        out = str(tmp_path / 'orbit.csv')
        code, _ = run(['iterate', '--state', state_file(positive_pq(rng, 4, 7)), '--steps', '3', '--out', out],
                      capsys)
        assert code == 0
        frame = pd.read_csv(out, dtype=str)
        assert frame['casimir'].nunique() == 1

    def test_missing_state(self, capsys, tmp_path):
        """A missing file exits 2 and names the path"""
        path = str(tmp_path / 'absent.json')
        code, out = run(['iterate', '--state', path], capsys)
        assert code == 2
        assert path in out

    def test_map_does_not_act(self, capsys, tmp_path, state_file, sample_xy):
        """Tbar_k does not act on xy documents"""
        code, _ = run(['iterate', '--state', state_file(sample_xy), '--map', 'tbar',
                       '--out', str(tmp_path / 'o.csv')], capsys)
        assert code == 2

    def test_singular_orbit(self, capsys, tmp_path, state_file):
        """A vanishing sigma exits 3 and names the step"""
        s = XYState(MapParams(3, 5), (F(1),) * 5, (F(1), F(-1), F(1), F(1), F(1)))
        code, out = run(['iterate', '--state', state_file(s), '--out', str(tmp_path / 'o.csv')], capsys)
        assert code == 3
        assert 'step 1' in out

    def test_decimal_columns(self, capsys, tmp_path, state_file, sample_xy):
        """--decimal adds approximate columns"""
        out = str(tmp_path / 'orbit.csv')
        run(['iterate', '--state', state_file(sample_xy), '--decimal', '--out', out], capsys)
        assert 'x1_decimal' in pd.read_csv(out).columns

    def test_arithmetic_error_exits_3(self, capsys, tmp_path, mocker, sample_xy, state_file):
        """A bare division by zero inside a map is reported, not raised"""
        def broken(s):
            return 1 / 0

        mocker.patch.dict("pentalab.MAPS", {'tk': broken})
        code, out = run(['iterate', '--state', state_file(sample_xy), '--out', str(tmp_path / 'o.csv')], capsys)
        assert code == 3
        assert '❌ division by zero' in out

    def test_lattice_csv(self, capsys, tmp_path):
        """A leapfrog orbit of 2 steps fills the even sites of a 4x4 window"""
        orbit, lattice = str(tmp_path / 'orbit.csv'), str(tmp_path / 'lattice.csv')
        code, _ = run(['iterate', '--map', 'leapfrog', '--backend', 'complex', '--n', '3', '--steps', '2',
                       '--out', orbit, '--lattice-csv', lattice], capsys)
        assert code == 0
        frame = pd.read_csv(lattice)
        assert list(frame.columns) == ['m', 'n', 're', 'im']
        assert len(frame) == 8
        assert ((frame['m'] + frame['n']) % 2 == 0).all()

    def test_lattice_csv_needs_leapfrog(self, capsys, tmp_path, state_file, sample_xy):
        """Other maps have no lattice"""
        code, _ = run(['iterate', '--state', state_file(sample_xy), '--out', str(tmp_path / 'o.csv'),
                       '--lattice-csv', str(tmp_path / 'l.csv')], capsys)
        assert code == 2
        assert not (tmp_path / 'o.csv').exists()


class TestIntegrals:
    """pentalab integrals"""

    def test_writes_csv(self, capsys, tmp_path, state_file, ones_state):
        """One row per nonzero coefficient"""
        out = str(tmp_path / 'integrals.csv')
        code, text = run(['integrals', '--state', state_file(ones_state), '--out', out], capsys)
        assert code == 0
        assert list(pd.read_csv(out).columns) == ['i', 'j', 'value']
        assert 'nonzero integrals' in text

    def test_needs_xy(self, capsys, tmp_path, state_file, sample_pq):
        """pq documents are refused"""
        code, _ = run(['integrals', '--state', state_file(sample_pq), '--out', str(tmp_path / 'i.csv')],
                      capsys)
        assert code == 2


class TestRender:
    """pentalab render"""

    def test_rational_is_refused(self, capsys, tmp_path):
        """Rendering needs floating point"""
        code, _ = run(['render', '--out', str(tmp_path / 'x.svg')], capsys)
        assert code == 2

    def test_polygon_layers(self, capsys, tmp_path):
        """One layer per step plus the initial polygon"""
        out = tmp_path / 'pentagon.svg'
        code, _ = run(['render', '--backend', 'float', '--k', '3', '--n', '5', '--steps', '2',
                       '--out', str(out)], capsys)
        assert code == 0
        assert out.read_text().count('<g class="layer"') == 3

    def test_circle_pattern(self, capsys, tmp_path, state_file, reflection_pair):
        """Leapfrog rendering draws four construction circles, byte for byte the same each time"""
        path = state_file(reflection_pair)
        first, second = tmp_path / 'a.svg', tmp_path / 'b.svg'
        for out in (first, second):
            code, _ = run(['render', '--backend', 'complex', '--map', 'leapfrog', '--state', path,
                           '--out', str(out)], capsys)
            assert code == 0
        assert first.read_text().count('<circle class="construction"') == 4
        assert first.read_bytes() == second.read_bytes()


class TestConvert:
    """pentalab convert"""

    def test_xy_to_pq(self, capsys, tmp_path, state_file, sample_xy):
        """p_i = y_i / x_i"""
        out = tmp_path / 'pq.json'
        code, _ = run(['convert', '--state', state_file(sample_xy), '--to', 'pq', '--out', str(out)], capsys)
        assert code == 0
        document = json.loads(out.read_text())
        assert document['coords'] == 'pq'
        assert document['p'] == ['1/2', '1', '1', '1', '1']

    def test_pq_off_level(self, capsys, tmp_path, state_file, sample_pq):
        """pq -> xy needs prod p_i q_i = 1"""
        code, _ = run(['convert', '--state', state_file(sample_pq), '--to', 'xy',
                       '--out', str(tmp_path / 'xy.json')], capsys)
        assert code == 2

    def test_needs_target(self, capsys, state_file, sample_xy):
        """--to is required"""
        code, _ = run(['convert', '--state', state_file(sample_xy)], capsys)
        assert code == 2


class TestRunConfig:
    """RunConfig validation"""

    def test_negative_steps(self):
        """--steps must be >= 0"""
        with pytest.raises(InvalidState):
            RunConfig(command='iterate', steps=-1)

    def test_default_seed_from_env(self, capsys, no_settings, tmp_path):
        """PENTALAB_DEFAULT_SEED replaces 42"""
        no_settings.setenv('PENTALAB_DEFAULT_SEED', '7')
        code, out = run(['verify', '--suite', 'quiver', '--trials', '1'], capsys)
        assert code == 0
        assert 'seed 7' in out
