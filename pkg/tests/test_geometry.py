"""
Unit tests for geometry.py
Corrugated and plane polygons, the diagonal maps and projective duality
"""

from fractions import Fraction

import numpy as np
import pytest

from dynamics import tk_step
from errors import DegenerateConfiguration, DegenerateSeed, GenericityLost, InvalidState, UnsupportedSpan
from geometry import (DUALITY_SHIFT, CorrugatedPolygon, PlanePolygon, check_corrugated,
                      check_general_position, classical_pentagram, dual_polygon, extract_xy,
                      find_duality_shift, first_non_corrugated, fk_step, gk_step,
                      plane_polygon_from_xy, polygon_from_xy, psi, random_plane_polygon, to_affine,
                      window_relation)
from linalg import rank
from scalars import Backend, all_close, random_rational
from states import MapParams, XYState, random_xy_state
from tests.conftest import draw_generic, positive_xy

F = Fraction


def generic_polygon(rng, k, n):
    """(s, P) with extract_xy and fk_step defined at P"""
    def draw():
        s = random_xy_state(rng, MapParams(k, n))
        return s, polygon_from_xy(s)

    def check(pair):
        extract_xy(pair[1])
        fk_step(pair[1])

    return draw_generic(draw, check)


def random_frame(rng, size):
    while True:
        g = [[random_rational(rng) for _ in range(size)] for _ in range(size)]
        if rank(g) == size:
            return g


class TestCorrugatedPolygons:
    """Building polygons from (x, y) and reading them back"""

    @pytest.mark.parametrize("k, n", [(3, 5), (3, 8), (4, 7), (5, 9)])
    def test_round_trip(self, rng, k, n):
        """extract_xy(polygon_from_xy(s)) = s"""
        s, P = generic_polygon(rng, k, n)
        assert extract_xy(P) == s

    def test_window_relation(self, sample_xy):
        """Ṽ_k = y_{n-1} Ṽ_0 + x_n Ṽ_1 + Ṽ_{k-1} for the standard seed"""
        P = polygon_from_xy(sample_xy)
        assert window_relation(P, 0) == (sample_xy.y_(-1), sample_xy.x_(0), 1)

    def test_corrugated(self, rng):
        """Positive weights give a corrugated polygon"""
        assert check_corrugated(polygon_from_xy(positive_xy(rng, 4, 7)))

    def test_gauge_independence(self, rng):
        """Rescaling the lifts does not change (x, y)"""
        s, P = generic_polygon(rng, 4, 7)
        factors = [random_rational(rng) for _ in range(P.n + P.k)]
        assert extract_xy(P.rescaled(factors)) == s

    def test_frame_independence(self, rng):
        """A projective change of frame does not change (x, y)"""
        s, P = generic_polygon(rng, 3, 6)
        assert extract_xy(P.transformed(random_frame(rng, 3))) == s

    def test_custom_seed(self, rng):
        """Any independent seed gives the same (x, y)"""
        s = positive_xy(rng, 3, 5)
        assert extract_xy(polygon_from_xy(s, seed=random_frame(rng, 3))) == s

    def test_singular_seed(self, sample_xy):
        """Dependent seed vectors are refused"""
        seed = [[F(1), F(0), F(0)], [F(2), F(0), F(0)], [F(0), F(0), F(1)]]
        with pytest.raises(DegenerateSeed):
            polygon_from_xy(sample_xy, seed=seed)

    def test_k2_has_no_polygon(self):
        """Corrugated polygons start at k = 3"""
        with pytest.raises(UnsupportedSpan):
            polygon_from_xy(XYState.constant(MapParams(2, 4), F(1), F(2)))

    def test_wrong_number_of_lifts(self, sample_xy):
        """n + k lifts are required"""
        P = polygon_from_xy(sample_xy)
        with pytest.raises(InvalidState):
            type(P)(P.params, P.lifts[:-1], P.monodromy)


    def test_non_corrugated_polygon(self):
        """Four lifts on the moment curve span 3-space, so window 0 is no plane"""
        lifts = [(F(1), F(i), F(i * i), F(i ** 3)) for i in range(11)]
        identity = [[F(int(a == b)) for b in range(4)] for a in range(4)]
        P = CorrugatedPolygon(MapParams(4, 7), lifts, identity)
        assert first_non_corrugated(P) == 0
        assert not check_corrugated(P)
        with pytest.raises(GenericityLost) as exc:
            extract_xy(P)
        assert exc.value.index == 0

    def test_first_failing_window(self, rng):
        """A repeated vertex breaks the first window that contains both copies"""
        P = polygon_from_xy(positive_xy(rng, 4, 7))
        lifts = list(P.lifts)
        lifts[6] = lifts[5]
        broken = CorrugatedPolygon(P.params, lifts, P.monodromy)
        assert first_non_corrugated(P) is None
        assert first_non_corrugated(broken) == 2


class TestDiagonalMaps:
    """F_k, G_k and the classical cross-product construction"""

    @pytest.mark.parametrize("k, n", [(3, 5), (3, 7), (4, 7), (4, 9), (5, 10)])
    def test_fk_is_tk(self, rng, k, n):
        """extract_xy . F_k = T_k . extract_xy"""
        s, P = generic_polygon(rng, k, n)
        image = fk_step(P)
        assert check_corrugated(image)
        assert extract_xy(image) == tk_step(s)

    def test_classical_construction_agrees(self, rng):
        """For k = 3 the cross-product construction gives the same polygon"""
        s, P = generic_polygon(rng, 3, 6)
        assert extract_xy(classical_pentagram(P)) == extract_xy(fk_step(P))

    def test_classical_construction_needs_k3(self, rng):
        """Cross products only make sense in 3-space"""
        s, P = generic_polygon(rng, 4, 7)
        with pytest.raises(UnsupportedSpan):
            classical_pentagram(P)

    def test_image_failure_names_the_window(self, rng, mocker):
        """A non-corrugated image is reported at its first failing window"""
        s, P = generic_polygon(rng, 4, 7)
        mocker.patch("geometry.first_non_corrugated", return_value=4)
        with pytest.raises(GenericityLost) as exc:
            fk_step(P)
        assert exc.value.index == 4

    @pytest.mark.parametrize("k, n", [(3, 6), (4, 7), (5, 9)])
    def test_gk_is_tk(self, rng, k, n):
        """psi . G_k = T_k . psi on random plane polygons"""
        def check(P):
            psi(P)
            psi(gk_step(P))

        P = draw_generic(lambda: random_plane_polygon(rng, k, n), check)
        assert psi(gk_step(P)) == tk_step(psi(P))


class TestDuality:
    """The dual polygon reads as D_k up to sign and shift"""

    @pytest.mark.parametrize("k, n", [(3, 5), (4, 7), (5, 9), (6, 11)])
    def test_shift_is_r(self, rng, k, n):
        """The pinned shift is r"""
        s = positive_xy(rng, k, n)
        P = polygon_from_xy(s)
        assert find_duality_shift(P) == DUALITY_SHIFT(MapParams(k, n)) == MapParams(k, n).r

    @pytest.mark.parametrize("k, n", [(3, 5), (4, 7), (5, 9)])
    def test_double_dual(self, rng, k, n):
        """Dual of the dual is P with labels moved by k - 2"""
        s, P = generic_polygon(rng, k, n)
        twice = dual_polygon(dual_polygon(P))
        for i in range(n):
            assert rank([twice.lifts[i], P.lifts[i + k - 2]]) == 1
        assert extract_xy(twice) == s.shifted(k - 2)


class TestPlanePolygons:
    """psi and the construction of plane polygons from (x, y)"""

    def test_k3_round_trip(self, rng):
        """For k = 3 no projection is needed"""
        s = draw_generic(lambda: random_xy_state(rng, MapParams(3, 7)),
                         lambda s: psi(plane_polygon_from_xy(s)))
        assert psi(plane_polygon_from_xy(s)) == s

    def test_k4_complex_round_trip(self, rng):
        """For k = 4 the invariant quotient reproduces (x, y) up to rounding"""
        def build(s):
            return psi(plane_polygon_from_xy(s, backend=Backend.COMPLEX))

        s = draw_generic(lambda: positive_xy(rng, 4, 5), build)
        recovered = build(s)
        assert all_close(recovered.values(), [complex(v) for v in s.values()], 1e-6)

    def test_k4_rational_round_trip(self, rng):
        """(x, y) read off a rational plane polygon comes back exactly through a rational quotient"""
        def check(P):
            psi(plane_polygon_from_xy(psi(P)))

        P = draw_generic(lambda: random_plane_polygon(rng, 4, 7), check)
        s = psi(P)
        rebuilt = plane_polygon_from_xy(s)
        assert all(isinstance(v, Fraction) for lift in rebuilt.lifts for v in lift)
        assert psi(rebuilt) == s

    def test_k4_branches_are_different_polygons(self, rng):
        """Two invariant quotients give the same (x, y) but projectively different polygons"""
        def build(s):
            return [plane_polygon_from_xy(s, branch=b, backend=Backend.COMPLEX) for b in (0, 1)]

        def invariant(P):
            v = [np.array(P.lifts[i], dtype=complex) for i in range(5)]

            def d(a, b, c):
                return np.linalg.det(np.array([v[a], v[b], v[c]]))

            return d(0, 1, 2) * d(0, 3, 4) / (d(0, 1, 3) * d(0, 2, 4))

        s = draw_generic(lambda: positive_xy(rng, 4, 5), lambda s: [psi(P) for P in build(s)])
        first, second = build(s)
        expected = [complex(v) for v in s.values()]
        assert all_close(psi(first).values(), expected, 1e-6)
        assert all_close(psi(second).values(), expected, 1e-6)
        assert abs(invariant(first) - invariant(second)) > 1e-6

    def test_branch_out_of_range(self, rng):
        """Asking for a quotient that does not exist is invalid input"""
        s = positive_xy(rng, 4, 7)
        with pytest.raises(InvalidState):
            plane_polygon_from_xy(s, branch=99, backend=Backend.COMPLEX)

    def test_random_polygon_general_position(self, rng):
        """random_plane_polygon returns a polygon in general position"""
        P = random_plane_polygon(rng, 4, 8)
        assert check_general_position(P)
        assert len(P.lifts) == 12

    def test_span_bounds(self):
        """Plane polygons need 3 <= k <= n"""
        lifts = [(F(1), F(0), F(1))] * 6
        identity = ((F(1), F(0), F(0)), (F(0), F(1), F(0)), (F(0), F(0), F(1)))
        with pytest.raises(UnsupportedSpan):
            PlanePolygon(4, 2, lifts, identity)


class TestAffineChart:
    """to_affine"""

    def test_chart(self):
        """(a, b, c) -> (a/c, b/c)"""
        lifts = [(F(2), F(4), F(2)), (F(3), F(3), F(3)), (F(0), F(1), F(1))] * 2
        identity = ((F(1), F(0), F(0)), (F(0), F(1), F(0)), (F(0), F(0), F(1)))
        P = PlanePolygon(3, 3, lifts, identity)
        assert to_affine(P) == [(1.0, 2.0), (1.0, 1.0), (0.0, 1.0)]
        assert len(to_affine(P, count=5)) == 5

    def test_point_at_infinity(self):
        """z = 0 cannot be drawn"""
        lifts = [(F(1), F(0), F(0))] + [(F(1), F(1), F(1))] * 5
        identity = ((F(1), F(0), F(0)), (F(0), F(1), F(0)), (F(0), F(0), F(1)))
        with pytest.raises(DegenerateConfiguration):
            to_affine(PlanePolygon(3, 3, lifts, identity))
