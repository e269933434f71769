"""Bivariate Mittag-Leffler evaluator tests.

Frozen reference values come from a 40-digit arbitrary-precision double
sum computed independently; the contour route is cross-checked against
the series route in the region where both are reliable, and against the
single-mode relaxation ODE integrated with a graded history scheme.
"""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from cimfem.mlf import (
    MLError,
    MLQuery,
    SpectralProblem,
    ml_biv,
    ml_biv_contour,
    ml_biv_series,
    mode_value,
    spectral_reference,
)

# (alpha', beta', gamma, z1, z2) -> value, 40-digit double-sum oracle
FROZEN_SERIES = [
    ((0.5, 1.0, 1.0, -0.3, -0.7), 0.39472116036538535),
    ((0.25, 1.0, 1.75, -1.2, -2.0), 0.29399807248145853),
    ((0.75, 1.0, 2.0, 0.4, -1.5), 0.62301991023507253),
    ((0.5, 1.0, 1.5, -2.0, -3.0), 0.16417168319862503),
]


class TestSeries:
    @pytest.mark.parametrize("args,expected", FROZEN_SERIES)
    def test_frozen_values(self, args, expected):
        assert ml_biv_series(MLQuery(*args)) == pytest.approx(expected, rel=1e-12)

    def test_origin_is_reciprocal_gamma(self):
        for g in (1.0, 1.5, 2.0):
            assert ml_biv_series(MLQuery(0.5, 1.0, g, 0.0, 0.0)) == pytest.approx(
                1.0 / math.gamma(g), rel=1e-15
            )

    def test_exponential_reduction(self):
        # z1 = 0, beta' = 1, gamma = 1 collapses to sum w^l / l! = e^w
        for w in (-2.5, -0.3, 1.7):
            assert ml_biv_series(MLQuery(0.5, 1.0, 1.0, 0.0, w)) == pytest.approx(
                math.exp(w), rel=1e-12
            )

    def test_univariate_reduction(self):
        # z2 = 0: one-parameter series, frozen from the same oracle
        assert ml_biv_series(MLQuery(0.5, 1.0, 1.0, -1.1, 0.0)) == pytest.approx(
            0.40173046063649507, rel=1e-12
        )

    def test_cancellation_guard_raises(self):
        # large negative arguments with a slowly growing gamma argument:
        # the alternating sum loses far more digits than double precision has
        with pytest.raises(MLError):
            ml_biv_series(MLQuery(0.25, 1.0, 1.0, -3.0, -15.0))

    def test_invalid_query_rejected(self):
        with pytest.raises((MLError, ValueError)):
            MLQuery(-0.5, 1.0, 1.0, 0.0, 0.0)
        with pytest.raises((MLError, ValueError)):
            MLQuery(0.5, 1.0, 0.0, 0.0, 0.0)

    @given(
        z1=st.floats(min_value=-1.5, max_value=0.0),
        z2=st.floats(min_value=-1.5, max_value=0.0),
    )
    def test_positive_and_bounded_small_args(self, z1, z2):
        # relaxation kernel values stay in (0, 1] for nonpositive arguments
        val = ml_biv_series(MLQuery(0.5, 1.0, 1.0, z1, z2))
        assert 0.0 < val <= 1.0 + 1e-12


class TestContour:
    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_overlap_with_series(self, t):
        q = MLQuery(0.5, 1.0, 1.0, -(t ** 0.5), -t)
        s = ml_biv_series(q)
        c = ml_biv_contour(q, t)
        assert c == pytest.approx(s, rel=1e-8)

    def test_requires_positive_time(self):
        with pytest.raises(ValueError):
            ml_biv_contour(MLQuery(0.5, 1.0, 1.0, -1.0, -1.0), 0.0)

    def test_requires_nonpositive_arguments(self):
        with pytest.raises(MLError):
            ml_biv_contour(MLQuery(0.5, 1.0, 1.0, 1.0, -1.0), 1.0)


class TestDispatch:
    def test_falls_back_to_contour_on_cancellation(self):
        # same query the series rejects; with t available a value comes back
        t = 15.0
        q = MLQuery(0.25, 1.0, 1.0, -(t ** 0.25), -t)
        val = ml_biv(q, t)
        assert 0.0 < val < 1.0

    def test_series_failure_without_time_propagates(self):
        with pytest.raises(MLError):
            ml_biv(MLQuery(0.25, 1.0, 1.0, -3.0, -15.0), None)

    def test_decay_bound_sweep(self):
        # |E(w1 t^a, w2 t^b)| * (1 + |w2 t^b|) stays O(1) for all t
        worst = 0.0
        for beta in (0.25, 0.5, 0.75):
            ap = 1.0 - beta
            for w1, w2 in ((-1.0, -1.0), (-2.0, -5.0)):
                for t in np.geomspace(0.01, 100.0, 10):
                    q = MLQuery(ap, 1.0, 1.0, w1 * t ** ap, w2 * t)
                    val = ml_biv(q, float(t))
                    worst = max(worst, abs(val) * (1.0 + abs(w2) * t))
        assert worst <= 10.0

    def test_integrated_shift_identity(self):
        # int_0^t E_gamma(w1 s^a, w2 s^b) s^(gamma-1) ds
        #     = t^gamma E_{gamma+1}(w1 t^a, w2 t^b)
        ap, bp, g = 0.5, 1.0, 1.0
        w1, w2 = -1.0, -2.0
        t = 1.3

        def integrand(s):
            return ml_biv(MLQuery(ap, bp, g, w1 * s ** ap, w2 * s ** bp), s) * s ** (g - 1.0)

        lhs, _ = quad(integrand, 0.0, t, limit=200)
        rhs = t ** g * ml_biv(MLQuery(ap, bp, g + 1.0, w1 * t ** ap, w2 * t ** bp), t)
        assert lhs == pytest.approx(rhs, abs=1e-6)


class TestModeAndSpectral:
    def test_mode_value_initial_condition(self):
        assert mode_value(1.0, 0.5, math.pi ** 2, 0.0) == 1.0

    def test_mode_value_against_history_stepping(self):
        # independent oracle: backward-Euler step of K v' + d_t^beta v + lam v = 0
        # with an L1 discretization of the fractional history term
        K, beta, lam, t_end = 1.0, 0.5, math.pi ** 2, 0.5
        n = 4000
        dt = t_end / n
        c = dt ** (-beta) / math.gamma(2.0 - beta)
        w = (np.arange(1, n + 1) ** (1.0 - beta)) - (np.arange(n) ** (1.0 - beta))
        v = np.empty(n + 1)
        v[0] = 1.0
        for m in range(1, n + 1):
            hist = 0.0
            if m > 1:
                dw = w[1:m] - w[: m - 1]
                hist = float(np.dot(dw, v[m - 1 : 0 : -1]))
            rhs = K / dt * v[m - 1] - c * hist + c * w[m - 1] * v[0]
            v[m] = rhs / (K / dt + c * w[0] + lam)
        assert mode_value(K, beta, lam, t_end) == pytest.approx(v[-1], abs=2e-3)

    def test_mode_value_decays(self):
        vals = [mode_value(1.0, 0.5, math.pi ** 2, t) for t in (0.1, 0.5, 2.0, 10.0)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
        assert all(0.0 < v <= 1.0 for v in vals)

    def test_spectral_reference_at_zero_is_partial_sum(self):
        coeffs = lambda j: 1.0 / j ** 2 if j <= 5 else 0.0
        sp = SpectralProblem(K=1.0, beta=0.5, mode_coefficients=coeffs, j_max=50)
        x = np.linspace(0.0, 1.0, 11)
        expected = sum(
            coeffs(j) * math.sqrt(2.0) * np.sin(j * math.pi * x) for j in range(1, 6)
        )
        assert np.allclose(spectral_reference(sp, x, 0.0), expected, atol=1e-14)

    def test_single_mode_monotone_decay(self):
        sp = SpectralProblem(
            K=1.0, beta=0.5, mode_coefficients=lambda j: 1.0 if j == 1 else 0.0, j_max=10
        )
        x = np.array([0.5])
        vals = [float(spectral_reference(sp, x, t)[0]) for t in np.linspace(0.1, 10.0, 12)]
        assert all(b < a for a, b in zip(vals, vals[1:]))
