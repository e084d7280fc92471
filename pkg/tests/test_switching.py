"""Tests for src.models.switching."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.detector_schema import QuadratureConfig
from src.models.quadrature import integrate_1d
from src.models.switching import (
    GaussianSwitching,
    TruncatedGaussianSwitching,
    erfc,
)

CFG = QuadratureConfig()


class TestErfc:
    def test_zero(self):
        assert erfc(0.0) == 1.0

    def test_reflection(self):
        assert erfc(-0.7) == pytest.approx(2.0 - erfc(0.7), rel=1e-15)

    def test_one(self):
        assert erfc(1.0) == pytest.approx(0.157299207050285, rel=1e-13)

    @given(st.floats(-10.0, 10.0, allow_nan=False))
    @settings(max_examples=200, deadline=None)
    def test_matches_high_precision(self, x):
        with mpmath.workdps(40):
            expected = float(mpmath.erfc(x))
        assert erfc(x) == pytest.approx(expected, rel=1e-12)


class TestGaussianSwitching:
    def test_profile(self):
        chi = GaussianSwitching()
        assert chi(0.0) == 1.0
        assert chi(1.0) == pytest.approx(math.exp(-1.0))

    def test_autocorrelation_matches_quadrature(self):
        chi = GaussianSwitching()
        for u in (0.0, 0.7, 2.5):
            direct = integrate_1d(lambda s: chi(s + u) * chi(s), -13.0, 13.0, CFG)
            assert chi.autocorrelation(u) == pytest.approx(direct, rel=1e-10)

    def test_increment_is_accurate_near_zero(self):
        chi = GaussianSwitching()
        u = 1e-6
        expected = -math.sqrt(math.pi / 2.0) * u * u / 2.0
        assert chi.autocorrelation_increment(u) == pytest.approx(expected, rel=1e-6)

    def test_fourier_power_normalisation(self):
        assert GaussianSwitching().fourier_power(0.0) == pytest.approx(math.pi)


class TestTruncatedGaussianSwitching:
    def test_inside_and_outside_window(self):
        chi = TruncatedGaussianSwitching(eps_uv=0.05)
        assert chi(0.0) == pytest.approx(1.0)
        assert chi(1.5) == pytest.approx(math.exp(-2.25), rel=1e-12)
        assert chi(3.0) < 1e-8

    def test_edge_is_half_height(self):
        chi = TruncatedGaussianSwitching(eps_uv=0.05)
        assert chi(2.5) == pytest.approx(0.5 * math.exp(-6.25), rel=1e-6)

    def test_increment_agrees_with_autocorrelation(self):
        chi = TruncatedGaussianSwitching(eps_uv=0.1)
        c0 = chi.autocorrelation(0.0, CFG)
        for u in (0.3, 1.7):
            difference = chi.autocorrelation(u, CFG) - c0
            assert chi.autocorrelation_increment(u, CFG) == pytest.approx(
                difference, abs=1e-10
            )

    def test_support_reaches_padded_window(self):
        chi = TruncatedGaussianSwitching(eps_uv=0.05)
        assert chi.tau_halfwidth(CFG) == pytest.approx(3.5)
        assert chi.lag_halfwidth(CFG) == pytest.approx(7.0)
        assert chi.edges() == (-2.5, 2.5)

    def test_rejects_nonpositive_regulator(self):
        with pytest.raises(ValueError):
            TruncatedGaussianSwitching(eps_uv=0.0)

    def test_vectorised(self):
        chi = TruncatedGaussianSwitching(eps_uv=0.05)
        assert chi(np.linspace(-3.0, 3.0, 7)).shape == (7,)
