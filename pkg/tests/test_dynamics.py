import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import simpson

from thermalbures.dynamics import (
    DampedOscillatorParams,
    adaptive_simpson,
    beta_from_coth,
    bures_path_length,
    evolve,
    speed,
    speed_squared,
    thermal_speed_component,
    trajectory,
)
from thermalbures.errors import ConvergenceError, DomainError
from thermalbures.geometry import line_element
from thermalbures.states import DisplacedThermalState, bures_distance

WARM = DampedOscillatorParams(1.0, 0.75, 0.25)  # k = 1/2, beta_inf = ln 3


def _bath(k, beta_inf, omega=1.0):
    # gamma_down - gamma_up = k, gamma_down / gamma_up = exp(beta_inf)
    up = k / math.expm1(beta_inf)
    return DampedOscillatorParams(omega, k + up, up)


class TestParams:

    def test_derived(self):
        assert WARM.k == 0.5
        assert WARM.beta_inf == pytest.approx(math.log(3), rel=1e-15)
        assert WARM.coth_inf == pytest.approx(2.0, rel=1e-15)

    def test_zero_temperature_bath(self):
        p = DampedOscillatorParams(2.0, 0.3)
        assert p.beta_inf == math.inf and p.coth_inf == 1.0

    @pytest.mark.parametrize("args", [(0.0, 1.0, 0.5), (-1.0, 1.0, 0.0), (1.0, 0.5, 0.5),
                                      (1.0, 0.2, 0.5), (1.0, 1.0, -0.1), (math.nan, 1.0, 0.0)])
    def test_invalid(self, args):
        with pytest.raises(DomainError):
            DampedOscillatorParams(*args)


class TestEvolve:

    def test_t_zero_is_identity(self):
        s = DisplacedThermalState(1.7, 0.3, -0.2)
        assert evolve(s, WARM, 0.0) is s

    def test_rotation_and_decay(self):
        params = DampedOscillatorParams(math.pi / 2, math.log(2.0))
        s = evolve(DisplacedThermalState(1.0, p=0.0, q=1.0), params, 1.0)
        assert s.q == pytest.approx(0.0, abs=1e-15)
        assert s.p == pytest.approx(-0.5, rel=1e-14)

    def test_pure_start_temperature(self):
        # coth(beta_t/2) = (1 + 2)/2 = 3/2 at exp(-2kt) = 1/2
        s = evolve(DisplacedThermalState.coherent(), WARM, math.log(2.0))
        assert s.beta == pytest.approx(math.log(5.0), rel=1e-14)

    def test_relaxes_to_bath(self):
        s = evolve(DisplacedThermalState(0.2, 3.0, 1.0), WARM, 80.0)
        assert s.beta == pytest.approx(WARM.beta_inf, rel=1e-12)
        assert abs(s.p) < 1e-15 and abs(s.q) < 1e-15

    def test_zero_temperature_bath_stays_pure(self):
        s = evolve(DisplacedThermalState.coherent(1.0, 0.0), DampedOscillatorParams(1.0, 0.4), 2.0)
        assert s.pure_limit

    def test_negative_time(self):
        with pytest.raises(DomainError):
            evolve(DisplacedThermalState(1.0), WARM, -1.0)

    @given(st.floats(0.05, 10), st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 5))
    def test_radius_decay(self, beta, p, q, t):
        s = evolve(DisplacedThermalState(beta, p, q), WARM, t)
        want = (p * p + q * q) * math.exp(-2 * WARM.k * t)
        assert s.p ** 2 + s.q ** 2 == pytest.approx(want, rel=1e-12, abs=1e-300)

    @given(st.floats(0.05, 10), st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 3), st.floats(0, 3))
    def test_semigroup(self, beta, p, q, t1, t2):
        s = DisplacedThermalState(beta, p, q)
        a = evolve(evolve(s, WARM, t1), WARM, t2)
        b = evolve(s, WARM, t1 + t2)
        assert a.beta == pytest.approx(b.beta, rel=1e-12)
        assert a.p == pytest.approx(b.p, rel=1e-12, abs=1e-14)
        assert a.q == pytest.approx(b.q, rel=1e-12, abs=1e-14)

    @pytest.mark.parametrize("beta0", [0.3, 5.0, math.inf])
    def test_beta_monotone_to_bath(self, beta0):
        s = DisplacedThermalState(beta0)
        betas = [evolve(s, WARM, t).beta for t in np.linspace(0.01, 20, 300)]
        d = np.diff(betas)
        assert np.all(d <= 0) if beta0 > WARM.beta_inf else np.all(d >= 0)
        lo, hi = sorted((beta0, WARM.beta_inf))
        assert all(lo <= b <= hi for b in betas)

    def test_coth_linear_in_decay(self):
        s0 = DisplacedThermalState(2.5)
        for t in (0.1, 0.7, 3.0):
            e = math.exp(-2 * WARM.k * t)
            want = e * s0.coth_half_beta + (1 - e) * WARM.coth_inf
            assert evolve(s0, WARM, t).coth_half_beta == pytest.approx(want, rel=1e-13)


class TestBetaFromCoth:

    def test_round_trip(self):
        # c - 1 ~ 2 exp(-beta) carries the information, so precision drops with beta
        for beta, rel in ((0.01, 1e-12), (1.0, 1e-12), (20.0, 1e-7)):
            assert beta_from_coth(1 / math.tanh(beta / 2)) == pytest.approx(beta, rel=rel)

    def test_clamps(self):
        assert beta_from_coth(1.0) == math.inf
        assert beta_from_coth(1.0 - 1e-15) == math.inf
        assert beta_from_coth(1.0 + 1e-13) == math.inf


class TestSpeed:

    def test_stationary(self):
        params = _bath(0.8, 1.4)
        assert speed(DisplacedThermalState(params.beta_inf), params) == pytest.approx(0.0, abs=1e-15)

    def test_example(self):
        params = DampedOscillatorParams(1.0, 1.0)  # k = 1, zero-temperature bath
        s = DisplacedThermalState(math.log(3.0), p=0.6, q=0.8)
        assert speed(s, params) == pytest.approx(math.sqrt(5 / 6), rel=1e-14)
        assert thermal_speed_component(s, params) == pytest.approx(1 / 3, rel=1e-14)

    def test_pure_state_diverges(self):
        s = DisplacedThermalState.coherent(1.0, 0.0)
        assert math.isinf(speed(s, WARM))
        assert math.isinf(thermal_speed_component(s, WARM))

    def test_pure_state_cold_bath(self):
        params = DampedOscillatorParams(1.0, 0.5)
        s = DisplacedThermalState.coherent(1.0, 0.0)
        assert thermal_speed_component(s, params) == 0.0
        assert speed(s, params) == pytest.approx(math.sqrt(0.5 * (0.25 + 1.0)), rel=1e-14)

    def test_matches_direct_formula(self):
        params = _bath(0.6, 0.9, omega=1.3)
        s = DisplacedThermalState(2.2, 0.4, -0.3)
        b = s.beta
        want = (0.5 * math.tanh(b / 2) * (0.36 + 1.69) * 0.25
                + 0.36 * math.sinh(b / 2) ** 2 * (1 / math.tanh(b / 2) - 1 / math.tanh(0.45)) ** 2)
        assert speed_squared(s, params) == pytest.approx(want, rel=1e-12)

    def test_large_beta_thermal_term(self):
        # sinh(b/2)(coth(b/2) - 1) = exp(-b/2) for a zero-temperature bath
        params = DampedOscillatorParams(1.0, 1.0)
        assert thermal_speed_component(DisplacedThermalState(1500.0), params) == 0.0
        assert thermal_speed_component(DisplacedThermalState(40.0), params) == pytest.approx(math.exp(-40.0), rel=1e-14)
        assert math.isinf(thermal_speed_component(DisplacedThermalState(1500.0), WARM))

    @pytest.mark.parametrize("start", [DisplacedThermalState(2.0, 1.0, 1.0),
                                       DisplacedThermalState(0.4, -2.0, 0.5)])
    def test_line_element_consistency(self, start):
        params = _bath(0.7, 1.1, omega=1.9)
        h = 1e-5
        for t in (0.2, 1.0, 3.0):
            a, b = evolve(start, params, t - h), evolve(start, params, t + h)
            s = evolve(start, params, t)
            ds2 = line_element(s.beta, (b.p - a.p) / (2 * h), (b.q - a.q) / (2 * h),
                               (b.beta - a.beta) / (2 * h))
            assert ds2 == pytest.approx(speed_squared(s, params), rel=1e-6)

    def test_thermal_component_vanishes(self):
        start = DisplacedThermalState(0.5, 1.0, 1.0)
        times = np.linspace(0.0, 10 / WARM.k, 200)
        thermal = [thermal_speed_component(evolve(start, WARM, t), WARM) for t in times]
        assert np.all(np.diff(thermal) <= 0)
        assert thermal[-1] < 1e-6

    def test_trajectory_rows(self):
        rows = list(trajectory(DisplacedThermalState.coherent(1.0, 0.0), WARM, [0.0, 0.5]))
        assert rows[0].divergent and rows[0].beta == math.inf
        assert not rows[1].divergent
        assert rows[1].speed ** 2 == pytest.approx(
            speed_squared(evolve(DisplacedThermalState.coherent(1.0, 0.0), WARM, 0.5), WARM))


class TestAdaptiveSimpson:

    def test_polynomial_exact(self):
        assert adaptive_simpson(lambda x: x ** 3 - x, 0.0, 2.0, 1e-12) == pytest.approx(2.0, rel=1e-14)

    def test_sin(self):
        assert adaptive_simpson(math.sin, 0.0, math.pi, 1e-10) == pytest.approx(2.0, abs=1e-10)

    def test_sqrt_singular_endpoint(self):
        assert adaptive_simpson(math.sqrt, 0.0, 1.0, 1e-9) == pytest.approx(2 / 3, abs=1e-8)

    def test_empty_interval(self):
        assert adaptive_simpson(math.exp, 1.0, 1.0, 1e-8) == 0.0

    def test_budget(self):
        with pytest.raises(ConvergenceError) as info:
            adaptive_simpson(lambda x: 1 / math.sqrt(x) if x > 0 else 1e8, 0.0, 1.0, 1e-12,
                             max_evals=200)
        assert info.value.estimate is not None
        assert info.value.estimate == pytest.approx(2.0, rel=0.5)


def _dense_length(start, params, t0, t1, n=200_001):
    t = np.linspace(t0, t1, n)
    v = [speed(evolve(start, params, x), params) for x in t]
    return simpson(v, x=t)


class TestPathLength:

    def test_stationary(self):
        params = _bath(1.0, 2.0)
        assert bures_path_length(DisplacedThermalState(2.0), params, 0.0, 5.0) == pytest.approx(0.0, abs=1e-12)

    def test_against_dense_quadrature(self):
        params = _bath(1.0, 1.0)
        start = DisplacedThermalState(2.0, 1.0, 1.0)
        tol = 1e-8
        got = bures_path_length(start, params, 0.0, 2.0, tol)
        assert got == pytest.approx(_dense_length(start, params, 0.0, 2.0), abs=tol)

    def test_offset_interval(self):
        params = _bath(1.0, 1.0)
        start = DisplacedThermalState(2.0, 1.0, 1.0)
        whole = bures_path_length(start, params, 0.0, 2.0, 1e-10)
        parts = (bures_path_length(start, params, 0.0, 0.7, 1e-10)
                 + bures_path_length(start, params, 0.7, 2.0, 1e-10))
        assert parts == pytest.approx(whole, abs=1e-9)

    def test_pure_start(self):
        start = DisplacedThermalState.coherent(1.0, 1.0)
        tol = 1e-7
        got = bures_path_length(start, WARM, 0.0, 2.0, tol)
        # dense check in u = sqrt(t), where the integrand is bounded
        u = np.linspace(1e-9, math.sqrt(2.0), 200_001)
        v = [2 * x * speed(evolve(start, WARM, x * x), WARM) for x in u]
        assert got == pytest.approx(simpson(v, x=u), abs=10 * tol)

    @pytest.mark.parametrize("start", [DisplacedThermalState(2.0, 1.0, 1.0),
                                       DisplacedThermalState(0.3, -1.0, 2.0),
                                       DisplacedThermalState.coherent(0.5, 0.0)])
    @pytest.mark.parametrize("T", [0.1, 1.0, 6.0])
    def test_dominates_distance(self, start, T):
        length = bures_path_length(start, WARM, 0.0, T, 1e-9)
        assert length >= bures_distance(start, evolve(start, WARM, T)) - 1e-9

    def test_invalid(self):
        s = DisplacedThermalState(1.0)
        with pytest.raises(DomainError):
            bures_path_length(s, WARM, 1.0, 0.5)
        with pytest.raises(DomainError):
            bures_path_length(s, WARM, 0.0, 1.0, tol=0.0)
