"""Bures metric, volume element and scalar curvature on the (p, q, beta) manifold.

Coordinates are ordered ``(p, q, beta)`` everywhere in this module. The
metric is diagonal in these coordinates and depends on ``beta`` only::

    ds^2 = tanh(beta/2)/2 * (dp^2 + dq^2) + dbeta^2 / (16 sinh(beta/2)^2)

Besides the closed forms, two reconstructions are provided that use nothing
but lower-level objects: :func:`metric_from_distance` differentiates the
Bures distance itself, and :func:`scalar_curvature_numeric` builds the
Christoffel symbols and Ricci tensor of :func:`metric_at` by finite
differences.

Curvature convention: ``R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + ...`` and
``R_{bd} = R^a_{bad}``, so a round sphere has positive scalar curvature. With
this convention the Bures metric above has ``R = -6 + 14 tanh(beta/2)^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.optimize import bisect

from .errors import AccuracyWarning, DomainError
from .states import BETA_MIN, DisplacedThermalState, bures_distance_squared

__all__ = [
    "BuresMetric",
    "CURVATURE_ZERO_BETA",
    "metric_at",
    "line_element",
    "volume_element",
    "scalar_curvature",
    "scalar_curvature_numeric",
    "ricci_scalar",
    "metric_from_distance",
    "curvature_zero",
]

#: Inverse temperature at which the scalar curvature vanishes.
CURVATURE_ZERO_BETA = 2.0 * math.atanh(math.sqrt(3.0 / 7.0))


def _default_step(beta):
    # the metric varies on an O(1) scale in beta at any temperature
    return 1e-3 * min(1.0, beta)


def _check_beta(beta):
    beta = float(beta)
    if math.isnan(beta) or beta < BETA_MIN:
        raise DomainError(f"beta must be >= {BETA_MIN:g}, got {beta!r}")
    return beta


@dataclass(frozen=True)
class BuresMetric:
    """Diagonal Bures metric at inverse temperature ``beta``.

    Off-diagonal entries vanish identically in ``(p, q, beta)`` coordinates,
    so only the diagonal is stored.
    """

    g_pp: float
    g_qq: float
    g_bb: float
    beta: float

    def as_array(self) -> np.ndarray:
        return np.diag([self.g_pp, self.g_qq, self.g_bb])

    @property
    def det(self) -> float:
        return self.g_pp * self.g_qq * self.g_bb

    @property
    def displacement_deficit(self) -> float:
        """``1/2 - g_pp = 1/(exp(beta) + 1)``, kept to full relative precision."""
        if not math.isfinite(self.beta):
            return 0.0
        return 1.0 / (math.exp(self.beta) + 1.0)


def _g_bb(beta):
    if beta == math.inf:
        return 0.0
    # 1 / (16 sinh(b/2)^2) written with exp(-b) so large b underflows cleanly
    e = math.exp(-beta)
    return e / (4.0 * math.expm1(-beta) ** 2)


def metric_at(beta: float) -> BuresMetric:
    """Closed-form Bures metric; ``beta = inf`` gives the coherent-state limit."""
    beta = _check_beta(beta)
    g = 0.5 * math.tanh(0.5 * beta)
    return BuresMetric(g, g, _g_bb(beta), beta)


def line_element(beta: float, dp: float, dq: float, dbeta: float) -> float:
    """Squared infinitesimal Bures distance ``ds^2`` for a displacement."""
    m = metric_at(beta)
    return m.g_pp * dp * dp + m.g_qq * dq * dq + m.g_bb * dbeta * dbeta


def volume_element(beta: float) -> float:
    """Density ``sech(beta/2) / 8`` of the Riemannian volume ``dp dq dbeta``.

    This is ``sqrt(det g)``, i.e. the (unnormalised) quantum Jeffreys prior.
    """
    beta = _check_beta(beta)
    if beta == math.inf:
        return 0.0
    x = 0.5 * beta
    # sech x = 2 e^{-x} / (1 + e^{-2x})
    return 0.25 * math.exp(-x) / (1.0 + math.exp(-2.0 * x))


def scalar_curvature(beta: float) -> float:
    """Closed-form scalar curvature ``-6 + 14 tanh(beta/2)^2``."""
    beta = _check_beta(beta)
    return -6.0 + 14.0 * math.tanh(0.5 * beta) ** 2


def curvature_zero(lo: float = 0.5, hi: float = 3.0, xtol: float = 1e-14) -> float:
    """Locate the zero of :func:`scalar_curvature` by bisection on ``[lo, hi]``."""
    return bisect(scalar_curvature, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


_DISPLACEMENT_REFERENCE = np.diag([0.5, 0.5, 0.0])


def _metric_deviation(x):
    # metric_at(beta) minus diag(1/2, 1/2, 0), without the cancellation
    m = metric_at(x[2])
    d = m.displacement_deficit
    return np.diag([-d, -d, m.g_bb])


def ricci_scalar(metric: Callable[[np.ndarray], np.ndarray], x, h: float,
                 reference: np.ndarray | None = None) -> float:
    """Scalar curvature of a metric at ``x`` from central finite differences.

    ``metric`` maps a coordinate vector to an ``n x n`` matrix. If
    ``reference`` is given, ``metric`` returns the deviation from that
    constant matrix; derivatives are then taken of the deviation alone, which
    matters when the metric approaches a constant and plain differences would
    cancel. Christoffel symbols come from first differences with step ``h``
    and are differenced again with the same step, so the metric is sampled
    within ``2h`` of ``x`` and the truncation error is ``O(h^2)``.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    eye = np.eye(n)
    ref = np.zeros((n, n)) if reference is None else np.asarray(reference, dtype=float)

    def full(y):
        return ref + metric(y)

    def christoffel(y):
        # dg[k, i, j] = d_k g_ij
        dg = np.array([(metric(y + h * eye[k]) - metric(y - h * eye[k])) / (2 * h)
                       for k in range(n)])
        ginv = np.linalg.inv(full(y))
        # lowered[d, i, j] = (d_i g_dj + d_j g_di - d_d g_ij) / 2
        lowered = 0.5 * (np.einsum("idj->dij", dg) + np.einsum("jdi->dij", dg) - dg)
        return np.einsum("ad,dij->aij", ginv, lowered)

    gam = christoffel(x)
    # dgam[k, a, i, j] = d_k Gamma^a_ij
    dgam = np.array([(christoffel(x + h * eye[k]) - christoffel(x - h * eye[k])) / (2 * h)
                     for k in range(n)])
    # Pair each term with its partner before summing over k (and l): at low
    # temperature the pairs cancel to O(eps) and g^{bb} ~ exp(beta) would
    # amplify any summation-order residue.
    deriv = np.einsum("kkij->ijk", dgam) - np.einsum("jkik->ijk", dgam)
    quad = np.einsum("kkl,lij->ijkl", gam, gam) - np.einsum("kjl,lik->ijkl", gam, gam)
    ricci = deriv.sum(axis=2) + quad.sum(axis=(2, 3))
    ginv = np.linalg.inv(full(x))
    return float(np.einsum("ij,ij->", ginv, ricci))


def scalar_curvature_numeric(beta: float, h: float | None = None,
                             p: float = 0.0, q: float = 0.0,
                             richardson: bool = False) -> float:
    """Scalar curvature rebuilt from :func:`metric_at` alone.

    Args:
        beta: Inverse temperature, must exceed ``2 h``.
        h: Finite-difference step; defaults to ``1e-3 * min(1, beta)``.
        p, q: Base point displacement. The metric does not depend on it, so
            the result should not either.
        richardson: Combine steps ``h`` and ``h/2`` to cancel the ``h^2``
            error term.

    Warns:
        AccuracyWarning: if ``h`` exceeds a twentieth of ``beta``.
    """
    beta = _check_beta(beta)
    if not math.isfinite(beta):
        raise DomainError("numeric curvature needs a finite beta")
    if h is None:
        h = _default_step(beta)
    h = float(h)
    if not h > 0:
        raise DomainError(f"step h must be positive, got {h!r}")
    if beta <= 2 * h:
        raise DomainError(f"beta={beta:g} must exceed 2h={2 * h:g}")
    if h > 0.05 * beta:
        warnings.warn(f"step h={h:g} is large relative to beta={beta:g}",
                      AccuracyWarning, stacklevel=2)
    x = [p, q, beta]
    r = ricci_scalar(_metric_deviation, x, h, reference=_DISPLACEMENT_REFERENCE)
    if richardson:
        r_half = ricci_scalar(_metric_deviation, x, 0.5 * h, reference=_DISPLACEMENT_REFERENCE)
        r = (4.0 * r_half - r) / 3.0
    return r


def _second_derivative_at_zero(fn, h):
    # fn(0) == 0 for a squared distance, so the centre sample drops out
    return (fn(h) + fn(-h)) / (h * h)


def metric_from_distance(beta: float, p: float = 0.0, q: float = 0.0,
                         h: float | None = None, richardson: bool = True) -> np.ndarray:
    """Reconstruct the full 3x3 metric from second derivatives of ``D_B^2``.

    For a direction ``u`` in ``(p, q, beta)`` the quadratic form is
    ``g(u, u) = 1/2 d^2/dt^2 D_B^2(rho(x), rho(x + t u))`` at ``t = 0``;
    off-diagonal entries follow by polarisation. Central differences with
    step ``h`` (default ``1e-3 * min(1, beta)``) are used, optionally
    Richardson-extrapolated with ``h/2``.
    """
    beta = _check_beta(beta)
    if not math.isfinite(beta):
        raise DomainError("distance reconstruction needs a finite beta")
    if h is None:
        h = _default_step(beta)
    if beta <= 2 * h:
        raise DomainError(f"beta={beta:g} must exceed 2h={2 * h:g}")
    base = DisplacedThermalState(beta, p, q)

    def quad_form(u):
        def d2(t):
            moved = DisplacedThermalState(beta + t * u[2], p + t * u[0], q + t * u[1])
            return bures_distance_squared(base, moved)

        s = _second_derivative_at_zero(d2, h)
        if richardson:
            s = (4.0 * _second_derivative_at_zero(d2, 0.5 * h) - s) / 3.0
        return 0.5 * s

    eye = np.eye(3)
    g = np.empty((3, 3))
    for i in range(3):
        g[i, i] = quad_form(eye[i])
    for i in range(3):
        for j in range(i + 1, 3):
            g[i, j] = g[j, i] = 0.5 * (quad_form(eye[i] + eye[j]) - g[i, i] - g[j, j])
    return g
