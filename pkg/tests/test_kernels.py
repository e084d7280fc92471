"""Tests for src.models.kernels."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.detector_schema import (
    EinsteinCylinder,
    Minkowski,
    PoincareAdS2,
    TimeMachine,
    TrajectoryParams,
)
from src.errors import (
    ChronologyViolationError,
    InvalidGeometryError,
    InvalidRegulatorError,
    UndefinedSplitError,
)
from src.models.kernels import (
    ec_image_sum,
    kernel_ads2,
    kernel_einstein_cylinder,
    kernel_minkowski,
    kernel_regular_part,
    kernel_tm_image,
    kernel_tm_sum,
    kernel_tm_term,
    regular_part_at,
    regular_part_poles,
    series_threshold,
    stationary_kernel,
    tm_image_pole_spacing,
    tm_image_poles,
    wightman_ads2,
)


# ============ Stationary Kernel Tests ============


class TestMinkowskiKernel:
    """Flat-space derivative kernel -1/(2 pi (dtau - i eps)^2)."""

    def test_unit_separation(self):
        value = kernel_minkowski(1.0, 1e-12).value
        assert value == pytest.approx(-1.0 / (2.0 * math.pi), rel=1e-10)

    def test_coincidence_is_real_positive(self):
        eps = 1e-3
        value = complex(kernel_minkowski(0.0, eps).value)
        assert value.real == pytest.approx(1.0 / (2.0 * math.pi * eps**2), rel=1e-12)
        assert value.imag == 0.0

    def test_hermiticity(self):
        forward = complex(kernel_minkowski(2.0 - 1.0, 1e-2).value)
        backward = complex(kernel_minkowski(1.0 - 2.0, 1e-2).value)
        assert forward == pytest.approx(backward.conjugate(), abs=1e-15)

    @pytest.mark.parametrize("eps", [0.0, -1e-3, float("nan")])
    def test_bad_regulator(self, eps):
        with pytest.raises(InvalidRegulatorError):
            kernel_minkowski(1.0, eps)

    def test_broadcasts_over_arrays(self):
        values = kernel_minkowski(np.array([0.5, 1.0, 2.0]), 1e-2).value
        assert values.shape == (3,)


class TestEinsteinCylinderKernel:
    """Oscillator csc^2 plus zero-mode constant."""

    def test_zero_mode_constant(self):
        kv = kernel_einstein_cylinder(1.0, EinsteinCylinder(L=2.0, gamma=0.01), 1e-3)
        assert kv.components["zero_mode"] == pytest.approx(0.00125)

    def test_large_circumference_limit(self):
        flat = complex(kernel_minkowski(1.0, 1e-9).value)
        cyl = complex(
            kernel_einstein_cylinder(1.0, EinsteinCylinder(L=1e4, gamma=0.01), 1e-9).value
        )
        assert abs(cyl - flat) < 1e-6 * abs(flat)

    def test_matches_flat_image_sum(self):
        geom = EinsteinCylinder(L=2.0, gamma=0.01)
        for dtau in (0.3, 1.0):
            osc = complex(kernel_einstein_cylinder(dtau, geom, 1e-10).components["oscillator"])
            images = ec_image_sum(dtau, geom, 1e-10, n_max=50)
            assert abs(osc - images) < 1e-8

    def test_image_sum_without_tail_is_worse(self):
        geom = EinsteinCylinder(L=2.0)
        osc = complex(kernel_einstein_cylinder(0.3, geom, 1e-10).components["oscillator"])
        bare = ec_image_sum(0.3, geom, 1e-10, n_max=50, with_tail=False)
        assert abs(osc - bare) > 1e-6

    def test_rejects_nonpositive_circumference(self):
        with pytest.raises(InvalidGeometryError):
            EinsteinCylinder(L=0.0)


class TestAdS2Kernel:
    """Poincare-AdS2 kernel with double poles at +-2/W."""

    def test_flat_limit_is_exact_at_small_w(self):
        flat = complex(kernel_minkowski(1.0, 1e-3).value)
        ads = complex(kernel_ads2(1.0, PoincareAdS2(W=1e-8), 1e-3).value)
        assert ads == pytest.approx(flat, rel=1e-12)

    def test_leading_coincidence_behaviour(self):
        geom = PoincareAdS2(W=0.05)
        dtau = 1e-3
        ads = complex(kernel_ads2(dtau, geom, 1e-12).value)
        assert ads.real == pytest.approx(-1.0 / (2.0 * math.pi * dtau**2), rel=1e-5)

    def test_pole_location(self):
        geom = PoincareAdS2(W=0.05)
        assert regular_part_poles(geom, 100.0) == pytest.approx([-40.0, 40.0])
        assert abs(complex(kernel_ads2(40.0, geom, 1e-6).value)) > 1e6

    def test_rejects_nonpositive_curvature(self):
        with pytest.raises(InvalidGeometryError):
            PoincareAdS2(W=0.0)

    def test_wrong_geometry_type(self):
        with pytest.raises(InvalidGeometryError):
            kernel_ads2(1.0, EinsteinCylinder(L=2.0), 1e-3)

    def test_dispatch(self):
        geom = PoincareAdS2(W=0.1)
        assert stationary_kernel(geom, 1.0, 1e-3).value == kernel_ads2(1.0, geom, 1e-3).value
        with pytest.raises(UndefinedSplitError):
            stationary_kernel(TimeMachine(A=2.0, L=10.0), 1.0, 1e-3)


# ============ Regular Part Tests ============


class TestRegularPart:
    """A_geom - A_M with the coincidence singularity removed."""

    def test_ec_value_at_coincidence(self):
        geom = EinsteinCylinder(L=2.0, gamma=0.01)
        value = complex(kernel_regular_part(geom, 0.0).value)
        expected = 0.01 / (2.0 * 4.0) - math.pi / (6.0 * 4.0)
        assert value.real == pytest.approx(expected, rel=1e-12)

    def test_ads2_value_at_coincidence(self):
        W = 0.05
        value = complex(kernel_regular_part(PoincareAdS2(W=W), 0.0).value)
        assert value.real == pytest.approx(W * W / (8.0 * math.pi), rel=1e-12)

    def test_ec_continuous_across_series_threshold(self):
        geom = EinsteinCylinder(L=2.0, gamma=0.01)
        eta = series_threshold(geom)
        below = complex(regular_part_at(geom, eta * (1.0 - 1e-9)))
        above = complex(regular_part_at(geom, eta * (1.0 + 1e-9)))
        assert abs(below - above) < 1e-9

    def test_ads2_continuous_across_series_threshold(self):
        geom = PoincareAdS2(W=0.05)
        eta = series_threshold(geom)
        below = complex(regular_part_at(geom, eta * (1.0 - 1e-9)))
        above = complex(regular_part_at(geom, eta * (1.0 + 1e-9)))
        assert abs(below - above) < 1e-10

    def test_ads2_scaling_with_curvature(self):
        def deviation(w):
            return abs(complex(kernel_regular_part(PoincareAdS2(W=w), 1.0).value))

        assert deviation(0.02) / deviation(0.01) == pytest.approx(4.0, rel=0.2)

    def test_ec_scaling_with_circumference(self):
        def deviation(ell):
            geom = EinsteinCylinder(L=ell, gamma=0.01)
            return abs(complex(kernel_regular_part(geom, 1.0).value))

        assert deviation(100.0) / deviation(200.0) == pytest.approx(4.0, rel=0.2)

    def test_large_circumference_vanishes(self):
        value = complex(kernel_regular_part(EinsteinCylinder(L=1e4), 0.5).value)
        assert abs(value) < 1e-7

    def test_minkowski_needs_flag(self):
        with pytest.raises(UndefinedSplitError):
            kernel_regular_part(Minkowski(), 1.0)
        zero = kernel_regular_part(Minkowski(), 1.0, allow_minkowski=True)
        assert zero.value == 0

    def test_time_machine_has_no_split(self):
        with pytest.raises(UndefinedSplitError):
            kernel_regular_part(TimeMachine(A=2.0, L=10.0), 1.0)

    def test_ec_poles_are_image_points(self):
        poles = regular_part_poles(EinsteinCylinder(L=5.0), 13.0)
        assert poles == pytest.approx([-10.0, -5.0, 5.0, 10.0])


# ============ Time Machine Kernel Tests ============


class TestTimeMachineKernel:
    """Image terms of the quotient of Poincare-AdS2."""

    def test_zero_image_is_covering_kernel(self):
        geom = TimeMachine.from_curvature(0.05, 100.0)
        eps = 1e-2
        for xi in (1.0, 3.7):
            term = complex(
                kernel_tm_term(0, 0.3, -0.2, geom, TrajectoryParams(xi=xi), eps).value
            )
            ads = complex(kernel_ads2(0.5, PoincareAdS2(W=geom.W), eps).value)
            assert term == pytest.approx(ads, rel=1e-10)

    def test_xi_independence(self):
        geom = TimeMachine(A=1.5, L=10.0)
        one = complex(kernel_tm_term(2, 0.5, -0.5, geom, TrajectoryParams(xi=1.0), 1e-2).value)
        other = complex(
            kernel_tm_term(2, 0.5, -0.5, geom, TrajectoryParams(xi=7.3), 1e-2).value
        )
        assert one == pytest.approx(other, rel=1e-12)

    def test_swap_conjugates_opposite_image(self):
        geom = TimeMachine(A=2.0, L=10.0)
        traj = TrajectoryParams()
        for n in (1, 2, 3):
            forward = complex(kernel_tm_term(n, 0.4, -1.1, geom, traj, 1e-2).value)
            backward = complex(kernel_tm_term(-n, -1.1, 0.4, geom, traj, 1e-2).value)
            assert forward == pytest.approx(backward.conjugate(), rel=1e-12)

    def test_depends_on_scale_ratio_only(self):
        geom = TimeMachine(A=2.0, L=10.0)
        traj = TrajectoryParams()
        a = complex(kernel_tm_image(0.2, 0.7, geom, traj, 1e-2, 1.0, 3.0).value)
        b = complex(kernel_tm_image(0.2, 0.7, geom, traj, 1e-2, 2.0, 6.0).value)
        assert a == pytest.approx(b, rel=1e-12)

    def test_index_shift(self):
        geom = TimeMachine(A=2.0, L=10.0)
        traj = TrajectoryParams()
        N = 6
        shifted = complex(
            kernel_tm_sum(0.4, 0.1, geom, traj, 1e-2, -N + 1, N + 1, scale=geom.A).value
        )
        plain = complex(kernel_tm_sum(0.4, 0.1, geom, traj, 1e-2, -N, N).value)
        assert abs(shifted - plain) < 1e-12 * max(1.0, abs(plain))

    def test_full_sum_is_not_stationary(self):
        geom = TimeMachine(A=2.0, L=10.0)
        traj = TrajectoryParams()
        first = complex(kernel_tm_sum(0.4, 0.1, geom, traj, 1e-2, -10, 10).value)
        second = complex(kernel_tm_sum(0.3, 0.0, geom, traj, 1e-2, -10, 10).value)
        assert abs(first - second) > 1e-8

    def test_wightman_scale_invariance(self):
        x, x2, a = (1.2, 0.8), (0.9, 1.1), 1.5
        scaled = wightman_ads2(x, (a * x2[0], a * x2[1]), 1e-3)
        moved = wightman_ads2((x[0] / a, x[1] / a), x2, 1e-3 / a)
        assert complex(scaled) == pytest.approx(complex(moved), rel=1e-12)

    def test_chronology_window(self):
        geom = TimeMachine.from_curvature(0.05, 100.0)
        with pytest.raises(ChronologyViolationError):
            kernel_tm_term(1, 25.0, 0.0, geom, TrajectoryParams(), 1e-2)

    def test_untwisted_identification_rejected(self):
        with pytest.raises(InvalidGeometryError):
            TimeMachine(A=1.0, L=10.0)

    def test_regimes(self):
        assert TimeMachine.from_delta(0.1, 10.0).regime() == "slow"
        assert TimeMachine.from_curvature(0.05, 100.0).regime() == "fast"


class TestTimeMachinePoles:
    """Null lines where an image term is singular at eps -> 0."""

    def test_zero_image_poles_sit_on_the_diagonal(self):
        geom = TimeMachine(A=1.5, L=10.0)
        assert tm_image_poles(0, 0.7, geom) == pytest.approx((0.7, 0.7))

    def test_kernel_blows_up_on_both_lines(self):
        geom = TimeMachine(A=1.5, L=10.0)
        traj = TrajectoryParams()
        for pole in tm_image_poles(1, 0.5, geom):
            assert abs(pole) < 1.0 / geom.W
            at_pole = abs(complex(kernel_tm_term(1, 0.5, pole, geom, traj, 1e-6).value))
            nearby = abs(complex(kernel_tm_term(1, 0.5, pole + 1.0, geom, traj, 1e-6).value))
            assert at_pole > 1e10
            assert nearby < 1.0

    def test_spacing(self):
        geom = TimeMachine.from_delta(0.005, 3.0)
        for n in (-2, -1, 1, 2):
            first, second = tm_image_poles(n, 0.3, geom)
            assert abs(second - first) == pytest.approx(tm_image_pole_spacing(n, geom))
        # slow machines put the first pair about one circumference either side
        assert tm_image_pole_spacing(1, geom) == pytest.approx(6.0, rel=0.01)

    def test_accepts_complex_tau_prime(self):
        geom = TimeMachine(A=1.5, L=10.0)
        value = complex(
            kernel_tm_term(1, 0.5, 0.2 + 0.1j, geom, TrajectoryParams(), 1e-3).value
        )
        assert math.isfinite(value.real) and math.isfinite(value.imag)


# ============ Hermiticity Tests ============

times = st.floats(-5.0, 5.0, allow_nan=False)
regulators = st.floats(1e-3, 1e-1, allow_nan=False)


class TestHermiticity:
    """A(tau', tau) = conj A(tau, tau') for every kernel."""

    @given(tau=times, tau2=times, eps=regulators)
    @settings(max_examples=100, deadline=None)
    def test_minkowski(self, tau, tau2, eps):
        forward = complex(kernel_minkowski(tau - tau2, eps).value)
        backward = complex(kernel_minkowski(tau2 - tau, eps).value)
        assert backward == pytest.approx(forward.conjugate(), rel=1e-12, abs=1e-15)

    @given(tau=times, tau2=times, eps=regulators)
    @settings(max_examples=100, deadline=None)
    def test_einstein_cylinder(self, tau, tau2, eps):
        geom = EinsteinCylinder(L=20.0, gamma=0.01)
        forward = complex(kernel_einstein_cylinder(tau - tau2, geom, eps).value)
        backward = complex(kernel_einstein_cylinder(tau2 - tau, geom, eps).value)
        assert backward == pytest.approx(forward.conjugate(), rel=1e-10, abs=1e-14)

    @given(tau=times, tau2=times, eps=regulators)
    @settings(max_examples=100, deadline=None)
    def test_ads2(self, tau, tau2, eps):
        geom = PoincareAdS2(W=0.05)
        forward = complex(kernel_ads2(tau - tau2, geom, eps).value)
        backward = complex(kernel_ads2(tau2 - tau, geom, eps).value)
        assert backward == pytest.approx(forward.conjugate(), rel=1e-10, abs=1e-14)

    @given(tau=times, tau2=times, eps=regulators)
    @settings(max_examples=100, deadline=None)
    def test_time_machine_sum(self, tau, tau2, eps):
        geom = TimeMachine(A=2.0, L=10.0)
        traj = TrajectoryParams()
        forward = complex(kernel_tm_sum(tau, tau2, geom, traj, eps, -6, 6).value)
        backward = complex(kernel_tm_sum(tau2, tau, geom, traj, eps, -6, 6).value)
        assert backward == pytest.approx(forward.conjugate(), rel=1e-9, abs=1e-12)
