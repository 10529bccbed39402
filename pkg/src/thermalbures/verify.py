"""Closed-form versus reference comparisons, packaged as reusable suites.

Each suite returns a :class:`SuiteResult` with the largest deviation seen,
the tolerance it was judged against and the parameter point where the
deviation peaked. ``run_all`` is what ``thermalbures verify`` executes.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import geometry, oracle
from .dynamics import DampedOscillatorParams, evolve
from .states import DisplacedThermalState, transition_probability

__all__ = [
    "SuiteResult",
    "FIDELITY_BETAS",
    "FIDELITY_SHIFTS",
    "fidelity_suite",
    "coherent_limit_suite",
    "metric_suite",
    "curvature_suite",
    "lindblad_suite",
    "run_all",
]

FIDELITY_BETAS = (0.5, 1.0, 2.0 * math.log(2.0), 2.0, 3.0)
FIDELITY_SHIFTS = (0.0, 1.0, -1.0, 2.0, -2.0)
METRIC_BETAS = (0.5, math.log(2.0), 1.0, 2.0, 4.0)
CURVATURE_BETAS = (0.5, math.log(2.0), 1.0, 2.0, 4.0)
LINDBLAD_TIMES = (0.25, 0.5, 1.0)


@dataclass
class SuiteResult:
    name: str
    max_deviation: float
    tolerance: float
    worst_point: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.max_deviation <= self.tolerance)

    def summary(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        line = (f"{self.name:<10} max_dev={self.max_deviation:.3e} "
                f"tol={self.tolerance:.1e} {status}")
        if not self.passed and self.worst_point:
            where = ", ".join(f"{k}={v:.6g}" for k, v in self.worst_point.items())
            line += f"  worst at {where}"
        return line


def _grid(values, lo, hi, grid_size):
    if grid_size is None:
        return tuple(values)
    if grid_size < 1:
        raise ValueError("grid_size must be at least 1")
    if grid_size == 1:
        return (0.5 * (lo + hi),)
    return tuple(np.linspace(lo, hi, grid_size))


def fidelity_suite(dim: int = oracle.DEFAULT_DIM, grid_size: int | None = None,
                   tol: float = 1e-6) -> SuiteResult:
    """Fock-space Uhlmann fidelity against the closed form on a parameter grid.

    The default grid is ``beta1, beta2`` in :data:`FIDELITY_BETAS` and
    ``dp, dq`` in :data:`FIDELITY_SHIFTS`. ``grid_size=n`` replaces each axis
    with ``n`` evenly spaced points (``n = 1`` is the single interior point
    ``beta = 1.75, dp = dq = 0``).
    """
    betas = _grid(FIDELITY_BETAS, 0.5, 3.0, grid_size)
    shifts = _grid(FIDELITY_SHIFTS, -2.0, 2.0, grid_size)
    result = SuiteResult("fidelity", 0.0, tol)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", oracle.TruncationWarning)
        for b1 in betas:
            rho1 = oracle.thermal_density_matrix(b1, dim)
            s1 = DisplacedThermalState(b1)
            for b2, dp, dq in itertools.product(betas, shifts, shifts):
                fock = oracle.uhlmann_fidelity(rho1, oracle.displaced_thermal_matrix(b2, dp, dq, dim))
                exact = transition_probability(s1, DisplacedThermalState(b2, dp, dq))
                dev = abs(fock - exact)
                if dev > result.max_deviation or not np.isfinite(dev):
                    result.max_deviation = dev
                    result.worst_point = {"beta1": b1, "beta2": b2, "dp": dp, "dq": dq}
    if any(issubclass(w.category, oracle.TruncationWarning) for w in caught):
        result.notes.append(f"truncation warning: dim={dim} is too small for part of the grid")
    return result


def coherent_limit_suite(tol: float = 1e-8) -> SuiteResult:
    """``beta2 = 50`` against the analytic coherent branch, and both-pure states."""
    result = SuiteResult("coherent", 0.0, tol)
    shifts = (0.0, 0.5, -1.0, 2.0)
    for b1, dp, dq in itertools.product((0.5, 1.0, 2.0, 3.0), shifts, shifts):
        near = transition_probability(DisplacedThermalState(b1), DisplacedThermalState(50.0, dp, dq))
        w = -math.expm1(-b1)
        limit = w * math.exp(-0.5 * w * (dp * dp + dq * dq))
        dev = abs(near - limit)
        if dev > result.max_deviation:
            result.max_deviation = dev
            result.worst_point = {"beta1": b1, "dp": dp, "dq": dq}
    for dp, dq in itertools.product(shifts, shifts):
        both = transition_probability(DisplacedThermalState.coherent(),
                                      DisplacedThermalState.coherent(dp, dq))
        dev = abs(both - math.exp(-0.5 * (dp * dp + dq * dq)))
        if dev > result.max_deviation:
            result.max_deviation = dev
            result.worst_point = {"dp": dp, "dq": dq}
    return result


def metric_suite(tol: float = 1e-5) -> SuiteResult:
    """Relative error of the metric rebuilt from ``D_B^2`` against the closed form.

    Off-diagonal entries are judged relative to the smallest diagonal entry.
    """
    result = SuiteResult("metric", 0.0, tol)
    for beta in METRIC_BETAS:
        for p, q in ((0.0, 0.0), (1.0, -0.5)):
            fd = geometry.metric_from_distance(beta, p, q)
            exact = np.diag(geometry.metric_at(beta).as_array())
            rel = np.abs(np.diag(fd) / exact - 1.0)
            off = np.abs(fd - np.diag(np.diag(fd))).max() / exact.min()
            dev = max(rel.max(), off)
            if dev > result.max_deviation:
                result.max_deviation = dev
                result.worst_point = {"beta": beta, "p": p, "q": q}
    return result


def curvature_suite(tol: float = 1e-4) -> SuiteResult:
    """Finite-difference Ricci scalar against the closed form.

    Also folds in the bisection root (must sit within ``1e-9`` of the exact
    zero) and the numeric value at ``beta = 30`` (within ``1e-3`` of 8),
    each scaled to this suite's tolerance.
    """
    result = SuiteResult("curvature", 0.0, tol)
    for beta in CURVATURE_BETAS:
        dev = abs(geometry.scalar_curvature_numeric(beta) - geometry.scalar_curvature(beta))
        if dev > result.max_deviation:
            result.max_deviation = dev
            result.worst_point = {"beta": beta}
    root_dev = abs(geometry.curvature_zero() - geometry.CURVATURE_ZERO_BETA)
    asym_dev = abs(geometry.scalar_curvature_numeric(30.0) - 8.0)
    result.notes.append(f"zero at beta={geometry.curvature_zero():.12f} (dev {root_dev:.1e}); "
                        f"R(30)-8 = {asym_dev:.1e}")
    for dev, limit, point in ((root_dev, 1e-9, {"root": 1.0}), (asym_dev, 1e-3, {"beta": 30.0})):
        scaled = dev / limit * tol
        if scaled > result.max_deviation:
            result.max_deviation = scaled
            result.worst_point = point
    return result


def lindblad_suite(dim: int = oracle.DEFAULT_DIM, dt: float = 1e-4,
                   tol: float = 1e-4) -> SuiteResult:
    """Moments of the integrated master equation against the closed-form trajectory.

    Start ``(beta, p, q) = (2, 1, 1)``, ``omega = 1``, ``gamma_down = 0.75``,
    ``gamma_up = 0.25``; compares ``(p, q, beta)`` at :data:`LINDBLAD_TIMES`.
    """
    params = DampedOscillatorParams(1.0, 0.75, 0.25)
    start = DisplacedThermalState(2.0, 1.0, 1.0)
    result = SuiteResult("lindblad", 0.0, tol)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", oracle.TruncationWarning)
        rho = oracle.displaced_thermal_matrix(start.beta, start.p, start.q, dim)
    if caught:
        result.notes.append(f"truncation warning: dim={dim} is too small for the start state")
    t_prev = 0.0
    for t in LINDBLAD_TIMES:
        try:
            rho = oracle.lindblad_integrate(rho, params, t - t_prev, dt)
            got = oracle.extract_params(rho)
        except (RuntimeError, ValueError) as exc:
            result.max_deviation = math.inf
            result.worst_point = {"t": t}
            result.notes.append(str(exc))
            return result
        t_prev = t
        want = evolve(start, params, t)
        dev = max(abs(got.p - want.p), abs(got.q - want.q), abs(got.beta - want.beta))
        if dev > result.max_deviation:
            result.max_deviation = dev
            result.worst_point = {"t": t}
    return result


def run_all(dim: int = oracle.DEFAULT_DIM, grid_size: int | None = None,
            tol: float | None = None) -> list[SuiteResult]:
    """Run every suite. ``tol`` overrides the fidelity tolerance only."""
    fid_tol = 1e-6 if tol is None else tol
    return [
        fidelity_suite(dim, grid_size, fid_tol),
        coherent_limit_suite(),
        metric_suite(),
        curvature_suite(),
        lindblad_suite(dim),
    ]
