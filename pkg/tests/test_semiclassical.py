"""Tests for the two-kink dispersion, confinement dynamics, and mean front."""

import numpy as np
import pytest
from scipy.integrate import simpson

from confine_sim import semiclassical as sc
from confine_sim.units import from_mhz2pi

HX = 0.25
U_NN = from_mhz2pi(18.5)


class TestDispersion:
    def test_band_edges(self):
        # eps(0) = 2(1 - hx), eps(pi) = 2(1 + hx) for hx in [0, 1)
        assert sc.dispersion(0.0, HX) == pytest.approx(1.5, abs=1e-14)
        assert sc.dispersion(np.pi, HX) == pytest.approx(2.5, abs=1e-14)
        assert sc.dispersion(np.pi / 2, HX) == pytest.approx(
            2.0 * np.sqrt(1.0 + HX * HX), abs=1e-14
        )

    def test_j_scaling_and_parity(self):
        k = np.linspace(0.1, 3.0, 7)
        np.testing.assert_allclose(
            sc.dispersion(k, HX, j=3.0), 3.0 * sc.dispersion(k, HX), rtol=1e-14
        )
        np.testing.assert_allclose(sc.dispersion(-k, HX), sc.dispersion(k, HX), rtol=1e-14)

    @pytest.mark.parametrize("j", [1.0, U_NN / 4.0])
    def test_group_velocity_is_derivative(self, j):
        dk = 1e-6
        for k in (0.3, 1.0, 2.0, 3.0):
            numeric = (sc.dispersion(k + dk, HX, j) - sc.dispersion(k - dk, HX, j)) / (2 * dk)
            assert sc.group_velocity(k, HX, j) == pytest.approx(numeric, rel=1e-7)

    def test_group_velocity_vanishes_at_band_edges(self):
        assert sc.group_velocity(0.0, HX) == 0.0
        assert abs(sc.group_velocity(np.pi, HX)) < 1e-15

    def test_bogoliubov_angle_free_limit(self):
        # at hx = 0 the angle is just k itself
        k = np.linspace(0.0, np.pi, 11)
        np.testing.assert_allclose(sc.bogoliubov_angle(k, 0.0), k, atol=1e-14)


class TestSigmaBar:
    def test_pinned_value(self):
        assert sc.sigma_bar(HX) == pytest.approx(0.9919651383152107, abs=1e-15)

    def test_closed_form(self):
        for hx in (0.0, 0.1, 0.5, 0.9):
            assert sc.sigma_bar(hx) == pytest.approx((1 - hx * hx) ** 0.125, abs=1e-15)

    @pytest.mark.parametrize("hx", [1.0, -1.0, 1.5])
    def test_domain(self, hx):
        with pytest.raises(ValueError, match="hx"):
            sc.sigma_bar(hx)


class TestMaxGroupVelocity:
    def test_against_closed_form(self):
        # the maximum sits at cos k* = hx where v = 2 j hx
        k_star, v_max = sc.max_group_velocity(HX)
        assert k_star == pytest.approx(np.arccos(HX), abs=1e-6)
        assert v_max == pytest.approx(2.0 * HX, abs=1e-10)

    def test_against_dense_grid(self):
        k = np.linspace(1e-9, np.pi, 200_001)
        grid_max = float(np.max(sc.group_velocity(k, HX)))
        _, v_max = sc.max_group_velocity(HX)
        assert v_max == pytest.approx(grid_max, abs=1e-9)
        assert v_max >= grid_max - 1e-12

    def test_physical_front_speed(self):
        # twice the maximal kink velocity at J = U_nn/4 equals U_nn * hx
        _, v_max = sc.max_group_velocity(HX, j=U_NN / 4.0)
        assert 2.0 * v_max == pytest.approx(U_NN * HX, rel=1e-12)
        assert 2.0 * v_max == pytest.approx(29.05973204570558, abs=1e-9)


class TestMesonModel:
    def test_chi(self):
        m = sc.MesonModel(hx=HX, hz=0.04, j=1.0)
        assert m.chi == pytest.approx(0.04 * sc.sigma_bar(HX), rel=1e-14)

    def test_hz_sign_folded(self):
        m = sc.MesonModel(hx=HX, hz=-0.04, j=1.0)
        assert m.hz == 0.04

    @pytest.mark.parametrize("kwargs", [
        dict(hx=1.0, hz=0.0, j=1.0),
        dict(hx=-0.1, hz=0.0, j=1.0),
        dict(hx=HX, hz=0.0, j=0.0),
        dict(hx=HX, hz=0.0, j=-2.0),
        dict(hx=HX, hz=0.0, j=1.0, hx_pre=1.0),
        dict(hx=HX, hz=0.0, j=1.0, n_panels=3),
        dict(hx=HX, hz=0.0, j=1.0, n_panels=0),
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            sc.MesonModel(**kwargs)


class TestOccupation:
    def test_no_quench_no_kinks(self):
        m = sc.MesonModel(hx=HX, hz=0.0, j=1.0, hx_pre=HX)
        k = np.linspace(0.0, np.pi, 101)
        np.testing.assert_allclose(sc.kink_amplitude(k, m), 0.0, atol=1e-14)
        with pytest.raises(sc.UndefinedFrontError, match="no kink modes"):
            sc.mean_front(1.0, m)

    def test_density_bounded(self):
        m = sc.MesonModel(hx=HX, hz=0.04, j=1.0)
        k = np.linspace(0.0, np.pi, 513)
        n = sc.excitation_density(k, m)
        assert np.all(n >= 0.0)
        assert np.all(n < 1.0)
        assert n[0] == pytest.approx(0.0, abs=1e-20)


class TestMesonDistance:
    free = sc.MesonModel(hx=HX, hz=0.0, j=1.0)
    conf = sc.MesonModel(hx=HX, hz=0.04, j=1.0)

    def test_ballistic_when_unconfined(self):
        k = np.linspace(0.1, np.pi, 9)
        for t in (0.0, 0.7, 3.0):
            np.testing.assert_allclose(
                sc.meson_distance(t, k, self.free),
                2.0 * sc.group_velocity(k, HX) * t,
                rtol=1e-14, atol=1e-14,
            )

    def test_breathing_period(self):
        k = 1.0
        period = k / self.conf.chi
        for t in (0.3, 2.0, 11.0):
            assert sc.meson_distance(t, k, self.conf) == pytest.approx(
                sc.meson_distance(t + period, k, self.conf), abs=1e-9
            )

    def test_turning_point(self):
        # maximal separation at half period: [eps(k) - eps(0)] / chi
        k = 1.3
        chi = self.conf.chi
        d_max = (sc.dispersion(k, HX) - sc.dispersion(0.0, HX)) / chi
        assert sc.meson_distance(0.5 * k / chi, k, self.conf) == pytest.approx(
            float(d_max), rel=1e-12
        )
        # and never exceeded on a dense time scan
        ts = np.linspace(0.0, 2.0 * k / chi, 2001)
        ds = np.array([sc.meson_distance(t, k, self.conf) for t in ts])
        assert np.max(ds) <= d_max + 1e-9

    def test_short_time_is_ballistic(self):
        k = 1.0
        t = 1e-3
        free = 2.0 * float(sc.group_velocity(k, HX)) * t
        assert sc.meson_distance(t, k, self.conf) == pytest.approx(free, rel=1e-2)

    def test_zero_momentum_and_zero_time(self):
        assert sc.meson_distance(5.0, 0.0, self.conf) == 0.0
        np.testing.assert_allclose(
            sc.meson_distance(0.0, np.linspace(0.1, 3.0, 5), self.conf), 0.0, atol=1e-12
        )

    def test_negative_time_rejected(self):
        with pytest.raises(ValueError, match="time"):
            sc.meson_distance(-0.1, 1.0, self.conf)


class TestMeanFront:
    free = sc.MesonModel(hx=HX, hz=0.0, j=1.0)
    conf = sc.MesonModel(hx=HX, hz=0.04, j=1.0)

    def test_ballistic_pin(self):
        assert sc.mean_front(1.0, self.free) == pytest.approx(
            0.84950753525386, abs=1e-10
        )

    def test_confined_pin(self):
        assert sc.mean_front(29.0, self.conf) == pytest.approx(
            8.967828639319606, abs=1e-9
        )

    def test_ballistic_linear_in_time(self):
        d1 = sc.mean_front(1.0, self.free)
        assert sc.mean_front(2.0, self.free) == pytest.approx(2.0 * d1, rel=1e-12)
        assert sc.mean_front(0.0, self.free) == 0.0

    def test_small_time_slope_matches_weighted_velocity(self):
        # d<d>/dt -> integral n 2v / integral n as t -> 0
        k = np.linspace(0.0, np.pi, self.conf.n_panels + 1)
        n = sc.excitation_density(k, self.conf)
        n[0] = 0.0
        weighted = simpson(n * 2.0 * sc.group_velocity(k, HX), x=k) / simpson(n, x=k)
        slope = sc.mean_front(1e-4, self.conf) / 1e-4
        assert slope == pytest.approx(weighted, rel=1e-2)

    def test_grid_doubling_converged(self):
        conf4k = sc.MesonModel(hx=HX, hz=0.04, j=1.0, n_panels=4096)
        free4k = sc.MesonModel(hx=HX, hz=0.0, j=1.0, n_panels=4096)
        assert abs(sc.mean_front(29.0, self.conf) - sc.mean_front(29.0, conf4k)) < 1e-4
        assert abs(sc.mean_front(1.0, self.free) - sc.mean_front(1.0, free4k)) < 1e-4

    def test_confined_front_stays_below_ballistic(self):
        for t in (2.0, 10.0, 29.0):
            assert sc.mean_front(t, self.conf) < sc.mean_front(t, self.free)


class TestFrontOverlay:
    def test_zero_until_quench(self):
        m = sc.MesonModel(hx=HX, hz=0.04, j=U_NN / 4.0)
        t1 = 0.65
        times = np.array([0.0, 0.3, t1, 0.66, 1.0])
        out = sc.front_overlay(m, times, t1_us=t1)
        assert out.shape == (5,)
        np.testing.assert_array_equal(out[:3], 0.0)
        assert out[3] == pytest.approx(sc.mean_front(m.j * 0.01, m), rel=1e-12)
        assert out[4] == pytest.approx(sc.mean_front(m.j * 0.35, m), rel=1e-12)

    def test_scalar_time(self):
        m = sc.MesonModel(hx=HX, hz=0.0, j=1.0)
        out = sc.front_overlay(m, 2.0)
        assert out.shape == (1,)
        assert out[0] == pytest.approx(sc.mean_front(2.0, m), rel=1e-12)
