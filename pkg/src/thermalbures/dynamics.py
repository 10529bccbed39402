"""Displaced thermal states under the damped oscillator master equation.

The bath drives the displacement on a damped spiral towards the origin and
relaxes ``coth(beta/2)`` linearly in ``exp(-2 k t)`` towards the bath value.
With ``c = coth(beta/2)`` the trajectory is::

    q_t = (q0 cos wt + p0 sin wt) exp(-kt)
    p_t = (-q0 sin wt + p0 cos wt) exp(-kt)
    c_t = exp(-2kt) c0 + (1 - exp(-2kt)) c_inf

and the Bures speed along it is::

    (ds/dt)^2 = tanh(beta/2)/2 (k^2 + w^2)(q^2 + p^2)
                + k^2 sinh(beta/2)^2 (c - c_inf)^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from .errors import ConvergenceError, DomainError
from .states import DisplacedThermalState

__all__ = [
    "DampedOscillatorParams",
    "TrajectorySample",
    "beta_from_coth",
    "evolve",
    "speed",
    "speed_squared",
    "thermal_speed_component",
    "trajectory",
    "bures_path_length",
    "adaptive_simpson",
]


@dataclass(frozen=True)
class DampedOscillatorParams:
    """Oscillator frequency and the downward/upward bath rates.

    ``gamma_up = 0`` is a zero-temperature bath, ``beta_inf = inf``.
    """

    omega: float
    gamma_down: float
    gamma_up: float = 0.0

    def __post_init__(self):
        w, gd, gu = float(self.omega), float(self.gamma_down), float(self.gamma_up)
        if not all(math.isfinite(v) for v in (w, gd, gu)):
            raise DomainError("oscillator parameters must be finite")
        if w <= 0:
            raise DomainError(f"omega must be positive, got {w!r}")
        if gu < 0:
            raise DomainError(f"gamma_up must be non-negative, got {gu!r}")
        if gd <= gu:
            raise DomainError(f"gamma_down ({gd!r}) must exceed gamma_up ({gu!r})")
        object.__setattr__(self, "omega", w)
        object.__setattr__(self, "gamma_down", gd)
        object.__setattr__(self, "gamma_up", gu)

    @property
    def k(self) -> float:
        """Amplitude damping rate ``gamma_down - gamma_up``."""
        return self.gamma_down - self.gamma_up

    @property
    def beta_inf(self) -> float:
        """Bath inverse temperature ``ln(gamma_down / gamma_up)``."""
        if self.gamma_up == 0:
            return math.inf
        return math.log(self.gamma_down / self.gamma_up)

    @property
    def coth_inf(self) -> float:
        """``coth(beta_inf / 2) = (gamma_down + gamma_up) / (gamma_down - gamma_up)``."""
        return (self.gamma_down + self.gamma_up) / self.k

    @property
    def stationary_state(self) -> DisplacedThermalState:
        return DisplacedThermalState(self.beta_inf)


@dataclass(frozen=True)
class TrajectorySample:
    t: float
    p: float
    q: float
    beta: float
    speed: float
    thermal_speed: float

    @property
    def divergent(self) -> bool:
        return math.isinf(self.speed)


def beta_from_coth(c: float) -> float:
    """Invert ``c = coth(beta/2)``; values within ``1e-12`` of 1 map to ``inf``."""
    if c <= 1.0 + 1e-12:
        return math.inf
    return math.log((c + 1.0) / (c - 1.0))


def _coth_minus_one(state):
    # c - 1 = 2 / (exp(beta) - 1), exact for the pure limit
    if state.pure_limit:
        return 0.0
    return 2.0 / math.expm1(state.beta)


def evolve(initial: DisplacedThermalState, params: DampedOscillatorParams,
           t: float) -> DisplacedThermalState:
    """State reached from ``initial`` after time ``t`` under the damped oscillator.

    ``c - 1`` is propagated rather than ``c`` itself, so states just leaving
    the pure limit keep full precision in ``beta``.
    """
    t = float(t)
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"t must be finite and non-negative, got {t!r}")
    if t == 0:
        return initial
    k, w = params.k, params.omega
    decay = math.exp(-k * t)
    cos, sin = math.cos(w * t), math.sin(w * t)
    q = (initial.q * cos + initial.p * sin) * decay
    p = (-initial.q * sin + initial.p * cos) * decay
    relax = -math.expm1(-2.0 * k * t)
    cm1 = (1.0 - relax) * _coth_minus_one(initial) + relax * (params.coth_inf - 1.0)
    if cm1 <= 0.0:
        return DisplacedThermalState.coherent(p, q)
    return DisplacedThermalState(math.log1p(2.0 / cm1), p, q)


def _thermal_amplitude(state, params):
    # sinh(b/2) (coth(b/2) - c_inf) = cosh(b/2) - c_inf sinh(b/2), split into
    # exponentials so neither factor overflows
    c_inf = params.coth_inf
    if state.pure_limit:
        return 0.0 if c_inf == 1.0 else math.inf
    x = 0.5 * state.beta
    if c_inf == 1.0:
        return math.exp(-x)
    if x > 700.0:
        return math.inf
    return 0.5 * math.exp(-x) * (1.0 + c_inf) + 0.5 * math.exp(x) * (1.0 - c_inf)


def thermal_speed_component(state_at_t: DisplacedThermalState,
                            params: DampedOscillatorParams) -> float:
    """Thermal term ``k^2 sinh(b/2)^2 (coth(b/2) - coth(b_inf/2))^2`` of ``(ds/dt)^2``.

    Returns ``inf`` for a pure state in a bath at finite temperature.
    """
    amp = _thermal_amplitude(state_at_t, params)
    return (params.k * amp) ** 2


def speed_squared(state_at_t: DisplacedThermalState, params: DampedOscillatorParams) -> float:
    k, w = params.k, params.omega
    tanh = 1.0 if state_at_t.pure_limit else math.tanh(0.5 * state_at_t.beta)
    r2 = state_at_t.p ** 2 + state_at_t.q ** 2
    return 0.5 * tanh * (k * k + w * w) * r2 + thermal_speed_component(state_at_t, params)


def speed(state_at_t: DisplacedThermalState, params: DampedOscillatorParams) -> float:
    """Rate ``ds/dt`` at which the Bures distance grows along the trajectory.

    A pure state in a finite-temperature bath has divergent speed; ``inf`` is
    returned rather than raising.
    """
    return math.sqrt(speed_squared(state_at_t, params))


def trajectory(initial: DisplacedThermalState, params: DampedOscillatorParams,
               times: Iterable[float]) -> Iterator[TrajectorySample]:
    """Yield a :class:`TrajectorySample` for each time in ``times``."""
    for t in times:
        s = evolve(initial, params, t)
        thermal = thermal_speed_component(s, params)
        yield TrajectorySample(float(t), s.p, s.q, s.beta, speed(s, params), math.sqrt(thermal))


def adaptive_simpson(fn: Callable[[float], float], a: float, b: float, tol: float,
                     max_evals: int = 1_000_000) -> float:
    """Adaptive Simpson quadrature of ``fn`` over ``[a, b]`` to absolute ``tol``.

    Intervals are bisected until the two-level Simpson estimates agree to
    ``15 * tol_i``, where ``tol_i`` is the interval's share of ``tol``; the
    accepted value carries the Richardson correction.

    Raises:
        ConvergenceError: if more than ``max_evals`` evaluations are needed.
            The partial sum plus the unresolved intervals' best estimates is
            attached as ``estimate``.
    """
    if b < a:
        raise DomainError("integration bounds must satisfy a <= b")
    if b == a:
        return 0.0
    fa, fm, fb = fn(a), fn(0.5 * (a + b)), fn(b)
    evals = 3
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    stack = [(a, b, fa, fm, fb, whole, tol)]
    total = 0.0
    while stack:
        lo, hi, flo, fmid, fhi, s, eps = stack.pop()
        mid = 0.5 * (lo + hi)
        fl, fr = fn(0.5 * (lo + mid)), fn(0.5 * (mid + hi))
        evals += 2
        left = (mid - lo) / 6.0 * (flo + 4.0 * fl + fmid)
        right = (hi - mid) / 6.0 * (fmid + 4.0 * fr + fhi)
        diff = left + right - s
        if abs(diff) <= 15.0 * eps or mid - lo <= 4 * math.ulp(mid):
            total += left + right + diff / 15.0
            continue
        if evals >= max_evals:
            rest = left + right + sum(item[5] for item in stack)
            raise ConvergenceError(
                f"adaptive Simpson exceeded {max_evals} evaluations",
                estimate=total + rest,
                error_estimate=abs(diff) + sum(item[6] for item in stack))
        stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps))
        stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps))
    return total


def bures_path_length(initial: DisplacedThermalState, params: DampedOscillatorParams,
                      t0: float, t1: float, tol: float = 1e-8,
                      max_evals: int = 1_000_000) -> float:
    """Length of the Bures-metric path traced between times ``t0`` and ``t1``.

    Integrates :func:`speed` along :func:`evolve` with :func:`adaptive_simpson`.
    Starting from a pure state in a warm bath, the speed diverges like
    ``sqrt(A / t)`` with ``A = k (c_inf - 1) / 4``; the first ``eps`` of the
    interval is skipped, with ``eps`` chosen so the dropped ``2 sqrt(A eps)``
    stays below ``tol / 4``, and the remainder is integrated in ``u = sqrt(t)``
    to remove the square-root singularity.
    """
    t0, t1, tol = float(t0), float(t1), float(tol)
    if not (0 <= t0 <= t1) or not math.isfinite(t1):
        raise DomainError(f"need 0 <= t0 <= t1, got t0={t0!r}, t1={t1!r}")
    if not tol > 0:
        raise DomainError(f"tol must be positive, got {tol!r}")
    start = evolve(initial, params, t0)

    def rate(t):
        return speed(evolve(start, params, t), params)

    span = t1 - t0
    if start.pure_limit and params.coth_inf > 1.0:
        amp = params.k * (params.coth_inf - 1.0) / 4.0
        # factor 2 safety margin on the asymptotic tail estimate
        eps = min(span, (0.125 * tol) ** 2 / amp)
        return adaptive_simpson(
            lambda u: 2.0 * u * rate(u * u), math.sqrt(eps), math.sqrt(span),
            0.5 * tol, max_evals)
    return adaptive_simpson(rate, 0.0, span, tol, max_evals)
