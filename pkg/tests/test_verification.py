"""
Unit tests for verification.py
Randomised suites, resampling and reports
"""

import numpy as np
import pytest

import verification
from errors import OutsideStableRange, SigmaVanishes, UnknownSuite, UnsupportedSpan, WrongSpan
from scalars import Backend
from verification import (MAX_RESAMPLES, SUITES, PropertyResult, Suite, SuiteReport, Trial, applicable_suites,
                          run_suite, run_trial)
from states import MapParams


class TestSuites:
    """Every suite passes on small parameters"""

    @pytest.mark.parametrize("name, k, n", [
        ('dynamics', 3, 5),
        ('dynamics', 4, 7),
        ('quiver', 3, 5),
        ('quiver', 4, 7),
        ('pq-bracket', 3, 5),
        ('xy-bracket', 3, 5),
        ('casimirs', 3, 6),
        ('integrals', 3, 7),
        ('zero-curvature', 4, 7),
        ('geometry', 3, 5),
        ('duality', 4, 7),
        ('leapfrog', 2, 3),
        ('circles', 2, 4),
    ])
    def test_passes(self, name, k, n):
        """No property fails"""
        report = run_suite(name, k, n, trials=3, seed=7)
        assert report.results
        assert report.passed, report.failures()

    @pytest.mark.slow
    @pytest.mark.parametrize("name, k, n", [('involution', 3, 5), ('lattice', 2, 3)])
    def test_slow_suites_pass(self, name, k, n):
        """The expensive suites pass too"""
        assert run_suite(name, k, n, trials=2, seed=3).passed

    def test_float_backend(self):
        """Suites also run over floats"""
        assert run_suite('dynamics', 3, 5, trials=3, backend=Backend.FLOAT).passed

    def test_every_suite_registered(self):
        """The suite table covers all groups of identities"""
        assert set(SUITES) == {'dynamics', 'quiver', 'pq-bracket', 'xy-bracket', 'casimirs', 'integrals',
                               'involution', 'zero-curvature', 'geometry', 'duality', 'leapfrog',
                               'circles', 'lattice'}


class TestParameters:
    """Bad suite names and spans are refused before any trial runs"""

    def test_unknown_suite(self):
        """The message lists the known suites"""
        with pytest.raises(UnknownSuite) as exc:
            run_suite('nonsense', 3, 5)
        assert 'dynamics' in str(exc.value)

    def test_leapfrog_needs_k2(self):
        """Leapfrog suites are about k = 2"""
        with pytest.raises(WrongSpan):
            run_suite('leapfrog', 3, 5)

    def test_zero_curvature_needs_k3(self):
        """k = 2 has no auxiliary matrix"""
        with pytest.raises(UnsupportedSpan):
            run_suite('zero-curvature', 2, 5)

    def test_xy_bracket_needs_stable_range(self):
        """n < 2k - 1 is refused"""
        with pytest.raises(OutsideStableRange):
            run_suite('xy-bracket', 4, 6)

    def test_applicable_k2(self):
        """k = 2 runs the leapfrog family but not the polygon suites"""
        names = applicable_suites(MapParams(2, 3))
        assert {'leapfrog', 'circles', 'lattice', 'xy-bracket', 'involution'} <= set(names)
        assert not {'zero-curvature', 'geometry', 'duality'} & set(names)

    def test_applicable_k3(self):
        """k = 3 drops the leapfrog family; n = 5 is stable"""
        names = applicable_suites(MapParams(3, 5))
        assert not {'leapfrog', 'circles', 'lattice'} & set(names)
        assert {'xy-bracket', 'involution', 'geometry'} <= set(names)
        assert names == [name for name in SUITES if name in names]

    def test_applicable_below_stable_range(self):
        """Without a known xy bracket its two suites are skipped"""
        names = applicable_suites(MapParams(4, 6))
        assert 'xy-bracket' not in names
        assert 'involution' not in names
        assert 'casimirs' in names

    @pytest.mark.parametrize("k, n", [(2, 3), (3, 5), (4, 6), (5, 9)])
    def test_applicable_suites_accept_their_parameters(self, k, n):
        """Every listed suite passes the parameter checks"""
        params = MapParams(k, n)
        for name in applicable_suites(params):
            verification._check_parameters(name, SUITES[name], params)


class TestReports:
    """Determinism, fault injection and summaries"""

    def test_workers_do_not_change_the_report(self):
        """A thread pool gives the same results as a sequential run"""
        sequential = run_suite('dynamics', 3, 5, trials=4, seed=11)
        parallel = run_suite('dynamics', 3, 5, trials=4, seed=11, workers=2)
        assert parallel.results == sequential.results

    def test_seed_is_reproducible(self):
        """The same seed draws the same states"""
        a = run_suite('quiver', 3, 5, trials=2, seed=5, inject_fault=True)
        b = run_suite('quiver', 3, 5, trials=2, seed=5, inject_fault=True)
        assert a.results == b.results

    def test_inject_fault(self):
        """A negated entry fails and records the witness"""
        report = run_suite('pq-bracket', 3, 5, trials=2, inject_fault=True)
        assert not report.passed
        failure = report.failures()[0]
        assert failure.counterexample['coords'] == 'pq'
        assert failure.counterexample['k'] == 3

    def test_summary(self):
        """Counts per property in first-seen order"""
        report = run_suite('dynamics', 4, 7, trials=3)
        summary = report.summary()
        assert list(summary)[0] == "pi . T_k = Tbar_k . pi"
        assert all(row == {'passed': 3, 'failed': 0} for row in summary.values())

    def test_summary_counts_failures(self):
        """Failed results land in the failed column"""
        report = SuiteReport('x', 3, 5, 2, [PropertyResult('x', 'a', 0, True),
                                            PropertyResult('x', 'a', 1, False, 'bad')])
        assert report.summary() == {'a': {'passed': 1, 'failed': 1}}
        assert not report.passed


class TestTrial:
    """Comparison helpers and resampling"""

    def make_trial(self):
        return Trial('t', 0, np.random.default_rng(0), Backend.RATIONAL)

    def test_length_mismatch(self):
        """Vectors of different length never match"""
        t = self.make_trial()
        t.expect_equal('lengths', [1, 2], [1])
        assert not t.results[0].passed
        assert 'length' in t.results[0].detail

    def test_tolerance(self):
        """Floats compare within the tolerance"""
        t = self.make_trial()
        t.expect_equal('close', [1.0 + 1e-12], [1.0])
        t.expect_equal('far', [1.0 + 1e-3], [1.0])
        assert [r.passed for r in t.results] == [True, False]

    def test_resamples_then_gives_up(self, monkeypatch):
        """A suite that is always singular raises after MAX_RESAMPLES draws"""
        calls = []

        def singular(trial, params):
            calls.append(trial.rng)
            raise SigmaVanishes(1)

        monkeypatch.setitem(verification.SUITES, 'always-singular', Suite(singular))
        with pytest.raises(SigmaVanishes):
            run_trial('always-singular', MapParams(3, 5), 0, 42, Backend.RATIONAL)
        assert len(calls) == MAX_RESAMPLES

    def test_resample_recovers(self, monkeypatch):
        """A singular first draw is replaced by a fresh one"""
        attempts = []

        def flaky(trial, params):
            attempts.append(1)
            if len(attempts) == 1:
                raise SigmaVanishes(1)
            trial.expect('ok', True)

        monkeypatch.setitem(verification.SUITES, 'flaky', Suite(flaky))
        results = run_trial('flaky', MapParams(3, 5), 0, 42, Backend.RATIONAL)
        assert [r.name for r in results] == ['ok']
        assert len(attempts) == 2
