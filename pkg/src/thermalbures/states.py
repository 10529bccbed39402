"""Closed-form fidelity and Bures distance between displaced thermal states.

A displaced thermal state of the unit oscillator ``H = (P**2 + Q**2) / 2`` is
labelled by its inverse temperature ``beta`` and the phase-space displacement
``(p, q)``. Units are ``hbar = omega = 1``.

Every temperature-dependent ratio is evaluated through ``log sinh`` so that
``beta`` in the thousands does not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import DomainError

__all__ = [
    "BETA_MIN",
    "DisplacedThermalState",
    "FGPair",
    "partition_function",
    "log_partition_function",
    "fg_pair",
    "transition_probability",
    "log_transition_probability",
    "bures_distance",
    "bures_distance_squared",
]

#: Smallest inverse temperature accepted; below it the state is too close to
#: the non-normalisable infinite-temperature limit.
BETA_MIN = 1e-8

_LN2 = math.log(2.0)


def _log_sinh(x: float) -> float:
    # log(sinh x) for x > 0, accurate at both ends
    return x + math.log(-math.expm1(-2.0 * x)) - _LN2


def _log_cosh(x: float) -> float:
    return x + math.log1p(math.exp(-2.0 * x)) - _LN2


def _check_beta(beta, name="beta"):
    try:
        beta = float(beta)
    except (TypeError, ValueError):
        raise DomainError(f"{name} must be a real number, got {beta!r}") from None
    if not math.isfinite(beta) or beta < BETA_MIN:
        raise DomainError(f"{name} must be finite and >= {BETA_MIN:g}, got {beta!r}")
    return beta


def _check_gamma(gamma, name):
    gamma = float(gamma)
    if not math.isfinite(gamma) or gamma <= 0.0:
        raise DomainError(f"{name} must be finite and positive, got {gamma!r}")
    return gamma


@dataclass(frozen=True)
class DisplacedThermalState:
    """Point ``(beta, p, q)`` on the manifold of displaced thermal states.

    ``pure_limit=True`` denotes the coherent state reached as ``beta -> inf``;
    the stored ``beta`` is then ``math.inf`` whatever was passed in. Passing
    ``beta=math.inf`` directly sets the flag.
    """

    beta: float
    p: float = 0.0
    q: float = 0.0
    pure_limit: bool = False

    def __post_init__(self):
        p, q = float(self.p), float(self.q)
        if not (math.isfinite(p) and math.isfinite(q)):
            raise DomainError(f"displacements must be finite, got p={self.p!r}, q={self.q!r}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)
        if self.pure_limit or self.beta == math.inf:
            object.__setattr__(self, "pure_limit", True)
            object.__setattr__(self, "beta", math.inf)
        else:
            object.__setattr__(self, "beta", _check_beta(self.beta))

    @classmethod
    def coherent(cls, p: float = 0.0, q: float = 0.0) -> "DisplacedThermalState":
        """Pure coherent state displaced by ``(p, q)``."""
        return cls(math.inf, p, q, pure_limit=True)

    @property
    def coth_half_beta(self) -> float:
        """``coth(beta/2)``, equal to twice the quadrature variance."""
        if self.pure_limit:
            return 1.0
        return 1.0 / math.tanh(0.5 * self.beta)

    @property
    def mean_occupation(self) -> float:
        """Thermal occupation ``1/(exp(beta) - 1)`` of the undisplaced state."""
        if self.pure_limit:
            return 0.0
        return 1.0 / math.expm1(self.beta)

    def displaced(self, dp: float, dq: float) -> "DisplacedThermalState":
        return DisplacedThermalState(self.beta, self.p + dp, self.q + dq, self.pure_limit)


class FGPair(NamedTuple):
    """The pair of hyperbolic ratios appearing in the Gaussian product rule."""

    f: float
    g: float


def log_partition_function(beta: float) -> float:
    """``log Z(beta) = -log(2 sinh(beta/2))``."""
    beta = _check_beta(beta)
    return -(_LN2 + _log_sinh(0.5 * beta))


def partition_function(beta: float) -> float:
    """Oscillator partition function ``Z(beta) = 1 / (2 sinh(beta/2))``.

    Raises:
        DomainError: if ``beta`` is not finite or below :data:`BETA_MIN`.
    """
    return math.exp(log_partition_function(beta))


def fg_pair(gamma1: float, gamma2: float) -> FGPair:
    """Return ``f = sh1 sh2 / sh12`` and ``g = sh1 ch2 / sh12``.

    Here ``shN = sinh(gammaN)``, ``chN = cosh(gammaN)`` and
    ``sh12 = sinh(gamma1 + gamma2)``. ``g`` is not symmetric in its
    arguments, but ``g(a, b) + g(b, a) == 1``.
    """
    a = _check_gamma(gamma1, "gamma1")
    b = _check_gamma(gamma2, "gamma2")
    ls_sum = _log_sinh(a + b)
    f = math.exp(_log_sinh(a) + _log_sinh(b) - ls_sum)
    g = math.exp(_log_sinh(a) + _log_cosh(b) - ls_sum)
    return FGPair(f, g)


def _same_state(s1: DisplacedThermalState, s2: DisplacedThermalState) -> bool:
    return (s1.pure_limit == s2.pure_limit and s1.p == s2.p and s1.q == s2.q
            and (s1.pure_limit or s1.beta == s2.beta))


def log_transition_probability(s1: DisplacedThermalState, s2: DisplacedThermalState) -> float:
    """Natural log of :func:`transition_probability`.

    With ``a = beta1/2`` and ``b = beta2/2`` the exponent coefficient
    ``Z(beta1+beta2) / (2 Z(beta1) Z(beta2))`` reduces to ``f(a, b)`` and the
    prefactor ``Z((beta1+beta2)/2)**2 / (Z(beta1) Z(beta2))`` to
    ``sinh(a) sinh(b) / sinh((a+b)/2)**2``.
    """
    if _same_state(s1, s2):
        return 0.0
    r2 = (s2.p - s1.p) ** 2 + (s2.q - s1.q) ** 2
    if s1.pure_limit and s2.pure_limit:
        return -0.5 * r2
    if s1.pure_limit or s2.pure_limit:
        beta = s2.beta if s1.pure_limit else s1.beta
        # 1 - exp(-beta), kept as expm1 for small beta
        weight = -math.expm1(-beta)
        return math.log(weight) - 0.5 * weight * r2
    a, b = 0.5 * s1.beta, 0.5 * s2.beta
    ls_a, ls_b = _log_sinh(a), _log_sinh(b)
    coeff = math.exp(ls_a + ls_b - _log_sinh(a + b))
    return _log_prefactor(a, b, ls_a, ls_b) - coeff * r2


def _log_prefactor(a, b, ls_a, ls_b):
    # sinh(m+d) sinh(m-d) = sinh(m)^2 - sinh(d)^2, so the prefactor is
    # 1 - (sinh d / sinh m)^2; this form keeps nearby temperatures from
    # cancelling to zero, the three-term log form is used when the ratio nears 1
    m, d = 0.5 * (a + b), 0.5 * abs(a - b)
    if d == 0.0:
        return 0.0
    ratio_sq = math.exp(2.0 * (_log_sinh(d) - _log_sinh(m)))
    if ratio_sq <= 0.5:
        return math.log1p(-ratio_sq)
    return min(ls_a + ls_b - 2.0 * _log_sinh(m), 0.0)


def transition_probability(s1: DisplacedThermalState, s2: DisplacedThermalState) -> float:
    """Uhlmann transition probability ``(Tr sqrt(sqrt(r1) r2 sqrt(r1)))**2``.

    Only the displacement difference ``(p2 - p1, q2 - q1)`` and the two
    temperatures enter. Coherent (``pure_limit``) states use the analytic
    ``beta -> inf`` limits; identical states return exactly 1.

    Example:
        >>> s1 = DisplacedThermalState(math.log(2))
        >>> s2 = DisplacedThermalState(math.log(2), math.sqrt(3), math.sqrt(3))
        >>> round(transition_probability(s1, s2), 6)
        0.367879
    """
    return math.exp(log_transition_probability(s1, s2))


def bures_distance_squared(s1: DisplacedThermalState, s2: DisplacedThermalState) -> float:
    """``2 (1 - sqrt(P))``, computed without cancellation for close states."""
    # + 0.0 turns the -0.0 of identical states into 0.0
    return -2.0 * math.expm1(0.5 * log_transition_probability(s1, s2)) + 0.0


def bures_distance(s1: DisplacedThermalState, s2: DisplacedThermalState) -> float:
    """Bures distance ``sqrt(2 (1 - sqrt(P)))``, a value in ``[0, sqrt(2))``."""
    return math.sqrt(bures_distance_squared(s1, s2))
