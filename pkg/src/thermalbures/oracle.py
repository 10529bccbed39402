"""Truncated Fock-space reference computations.

Everything here works with explicit ``N x N`` density matrices in the number
basis and shares no formulas with the closed-form modules: square roots come
from Hermitian eigendecompositions, the fidelity from singular values, the
dynamics from stepping the master equation, and the state parameters from
first and second moments of the quadratures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .dynamics import DampedOscillatorParams
from .errors import DomainError, ModelMismatchError, StabilityError
from .states import DisplacedThermalState

__all__ = [
    "DEFAULT_DIM",
    "FockDensityMatrix",
    "LadderOperators",
    "TruncationWarning",
    "ladder_operators",
    "recommended_dim",
    "thermal_density_matrix",
    "displacement_matrix",
    "displaced_thermal_matrix",
    "coherent_density_matrix",
    "fock_projector",
    "psd_sqrt",
    "uhlmann_fidelity",
    "fock_transition_probability",
    "state_matrix",
    "lindblad_rhs",
    "lindblad_integrate",
    "extract_params",
]

DEFAULT_DIM = 80

HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10


class TruncationWarning(UserWarning):
    """The Fock cutoff is too small for the requested state."""


@dataclass(frozen=True)
class LadderOperators:
    """Lowering operator and quadratures ``Q = (a + a^+)/sqrt2``, ``P = (a - a^+)/(i sqrt2)``."""

    a: np.ndarray
    q_op: np.ndarray
    p_op: np.ndarray

    @property
    def dim(self) -> int:
        return self.a.shape[0]


@lru_cache(maxsize=16)
def ladder_operators(dim: int) -> LadderOperators:
    if dim < 2:
        raise DomainError(f"dim must be at least 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    ad = a.conj().T
    q_op = (a + ad) / math.sqrt(2.0)
    p_op = (a - ad) / (1j * math.sqrt(2.0))
    for m in (a, q_op, p_op):
        m.setflags(write=False)
    return LadderOperators(a, q_op, p_op)


class FockDensityMatrix:
    """Immutable density matrix in a truncated number basis.

    The constructor checks Hermiticity (max elementwise asymmetry
    ``<= 1e-12``) and positivity (eigenvalues ``>= -1e-10``) unless
    ``validate=False``. The trace may fall short of 1 by the probability mass
    beyond the cutoff.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries, validate: bool = True):
        m = np.array(entries, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise DomainError(f"density matrix must be square, got shape {m.shape}")
        if validate:
            asym = np.max(np.abs(m - m.conj().T))
            if asym > HERMITIAN_TOL:
                raise DomainError(f"matrix is not Hermitian (asymmetry {asym:.3g})")
            lo = np.linalg.eigvalsh(m).min()
            if lo < -PSD_TOL:
                raise DomainError(f"matrix is not positive semidefinite (eigenvalue {lo:.3g})")
        m.setflags(write=False)
        self._entries = m

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    @property
    def trace(self) -> float:
        return float(np.trace(self._entries).real)

    def __array__(self, dtype=None, copy=None):
        return self._entries if dtype is None else self._entries.astype(dtype)

    def __repr__(self):
        return f"FockDensityMatrix(dim={self.dim}, trace={self.trace:.12g})"


def recommended_dim(beta: float, p: float = 0.0, q: float = 0.0) -> int:
    """Rule-of-thumb cutoff ``8 (nbar + (p^2 + q^2)/2) + 20``."""
    nbar = 0.0 if math.isinf(beta) else 1.0 / math.expm1(beta)
    return int(math.ceil(8.0 * (nbar + 0.5 * (p * p + q * q)) + 20))


def _warn_if_short(dim, beta, p=0.0, q=0.0):
    need = recommended_dim(beta, p, q)
    if dim < need:
        warnings.warn(f"dim={dim} is below the recommended {need} for beta={beta:g}, "
                      f"p={p:g}, q={q:g}", TruncationWarning, stacklevel=3)


def thermal_density_matrix(beta: float, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    """Diagonal thermal state ``(1 - e^-beta) e^{-n beta}``, ``n < dim``.

    Normalised to the untruncated trace, so the trace is short of 1 by the
    tail ``e^{-dim beta}``.
    """
    beta = float(beta)
    if not (math.isfinite(beta) and beta > 0):
        raise DomainError(f"beta must be finite and positive, got {beta!r}")
    if dim < 2:
        raise DomainError(f"dim must be at least 2, got {dim}")
    n = np.arange(dim)
    return FockDensityMatrix(np.diag(-math.expm1(-beta) * np.exp(-beta * n)), validate=False)


def fock_projector(n: int, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    """Pure number state ``|n><n|``."""
    m = np.zeros((dim, dim), dtype=complex)
    m[n, n] = 1.0
    return FockDensityMatrix(m, validate=False)


def displacement_matrix(p: float, q: float, dim: int = DEFAULT_DIM) -> np.ndarray:
    """``exp(i (p Q - q P))`` on the truncated space.

    The Hermitian generator ``p Q - q P`` is diagonalised and exponentiated,
    so the result is exactly unitary on the truncated space; it matches the
    true operator away from the cutoff.
    """
    ops = ladder_operators(dim)
    gen = p * ops.q_op - q * ops.p_op
    w, v = np.linalg.eigh(gen)
    return (v * np.exp(1j * w)) @ v.conj().T


def displaced_thermal_matrix(beta: float, p: float, q: float,
                             dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    """``D(p, q) rho(beta) D(p, q)^+``."""
    _warn_if_short(dim, beta, p, q)
    d = displacement_matrix(p, q, dim)
    rho = d @ thermal_density_matrix(beta, dim).entries @ d.conj().T
    return FockDensityMatrix(0.5 * (rho + rho.conj().T), validate=False)


def coherent_density_matrix(p: float, q: float, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    """Pure coherent state ``D(p, q)|0><0|D(p, q)^+``."""
    _warn_if_short(dim, math.inf, p, q)
    col = displacement_matrix(p, q, dim)[:, 0]
    return FockDensityMatrix(np.outer(col, col.conj()), validate=False)


def state_matrix(state: DisplacedThermalState, dim: int = DEFAULT_DIM) -> FockDensityMatrix:
    """Fock representation of a :class:`DisplacedThermalState`."""
    if state.pure_limit:
        return coherent_density_matrix(state.p, state.q, dim)
    return displaced_thermal_matrix(state.beta, state.p, state.q, dim)


def psd_sqrt(matrix) -> np.ndarray:
    """Square root of a Hermitian PSD matrix via ``eigh``.

    Eigenvalues in ``(-1e-10, 0)`` are treated as roundoff and zeroed; anything
    more negative raises :class:`DomainError`.
    """
    m = np.asarray(matrix)
    w, v = np.linalg.eigh(0.5 * (m + m.conj().T))
    if w.min() < -PSD_TOL:
        raise DomainError(f"matrix has eigenvalue {w.min():.3g} below -{PSD_TOL:g}")
    w = np.sqrt(np.clip(w, 0.0, None))
    return (v * w) @ v.conj().T


def _as_density(rho):
    if isinstance(rho, FockDensityMatrix):
        return rho
    return FockDensityMatrix(rho)


def uhlmann_fidelity(rho1, rho2) -> float:
    """Transition probability ``(||sqrt(rho1) sqrt(rho2)||_1)^2``.

    The nuclear norm of ``sqrt(rho1) sqrt(rho2)`` equals
    ``Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))`` but avoids a second square root.
    """
    rho1, rho2 = _as_density(rho1), _as_density(rho2)
    if rho1.dim != rho2.dim:
        raise DomainError(f"dimension mismatch: {rho1.dim} vs {rho2.dim}")
    prod = psd_sqrt(rho1.entries) @ psd_sqrt(rho2.entries)
    return float(np.linalg.svd(prod, compute_uv=False).sum() ** 2)


def fock_transition_probability(s1: DisplacedThermalState, s2: DisplacedThermalState,
                                dim: int = DEFAULT_DIM) -> float:
    """Build both states in the Fock basis and return their Uhlmann fidelity."""
    return uhlmann_fidelity(state_matrix(s1, dim), state_matrix(s2, dim))


class _Liouvillian:
    # coefficient arrays for lindblad_rhs at fixed (params, dim)

    def __init__(self, params: DampedOscillatorParams, dim: int):
        n = np.arange(dim, dtype=float)
        s = np.sqrt(n[1:])  # a[m, m+1] = sqrt(m+1)
        aad = np.append(n[1:], 0.0)  # diagonal of truncated a a^+
        self.diag = ((-1j * params.omega) * (n[:, None] - n[None, :])
                     - params.gamma_down * (n[:, None] + n[None, :])
                     - params.gamma_up * (aad[:, None] + aad[None, :]))
        ss = np.outer(s, s)
        self.down = 2.0 * params.gamma_down * ss
        self.up = 2.0 * params.gamma_up * ss

    def __call__(self, rho):
        out = self.diag * rho
        # (a rho a^+)[m, n] = sqrt(m+1) sqrt(n+1) rho[m+1, n+1]
        out[:-1, :-1] += self.down * rho[1:, 1:]
        # (a^+ rho a)[m, n] = sqrt(m) sqrt(n) rho[m-1, n-1]
        out[1:, 1:] += self.up * rho[:-1, :-1]
        return out


def lindblad_rhs(rho: np.ndarray, params: DampedOscillatorParams) -> np.ndarray:
    """Right-hand side of the damped-oscillator master equation.

    ``-i w [a^+a, rho] + g_dn (2 a rho a^+ - {a^+a, rho})
    + g_up (2 a^+ rho a - {a a^+, rho})``, evaluated with index shifts since
    ``a`` is a scaled superdiagonal. Uses the truncated ``a a^+``, which keeps
    the trace exactly conserved.
    """
    rho = np.asarray(rho)
    return _Liouvillian(params, rho.shape[0])(rho)


def lindblad_integrate(rho0, params: DampedOscillatorParams, t: float,
                       dt: float = 1e-4, check_every: int = 1000) -> FockDensityMatrix:
    """Evolve ``rho0`` for time ``t`` with fixed-step classical RK4.

    The step is shortened to divide ``t`` evenly. ``rho`` is re-Hermitised
    after each step. A stable step satisfies roughly
    ``dt <= 1e-3 / (omega + gamma_down) / sqrt(dim)``; much larger steps
    drive the high Fock levels unstable.

    Raises:
        StabilityError: if the trace drifts by more than ``1e-6`` or an
            eigenvalue drops below ``-1e-6``.
    """
    rho0 = _as_density(rho0)
    t, dt = float(t), float(dt)
    if not (math.isfinite(t) and t >= 0):
        raise DomainError(f"t must be finite and non-negative, got {t!r}")
    if not dt > 0:
        raise DomainError(f"dt must be positive, got {dt!r}")
    if t == 0:
        return rho0
    steps = max(1, int(math.ceil(t / dt - 1e-9)))
    h = t / steps
    rho = np.array(rho0.entries)
    tr0 = np.trace(rho).real
    rhs = _Liouvillian(params, rho0.dim)

    def check(r):
        drift = abs(np.trace(r).real - tr0)
        if not np.isfinite(drift) or drift > 1e-6:
            raise StabilityError(f"trace drifted by {drift:.3g}; reduce dt or raise dim")

    for i in range(1, steps + 1):
        k1 = rhs(rho)
        k2 = rhs(rho + 0.5 * h * k1)
        k3 = rhs(rho + 0.5 * h * k2)
        k4 = rhs(rho + h * k3)
        rho = rho + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if i % check_every == 0:
            check(rho)
    check(rho)
    lo = np.linalg.eigvalsh(rho).min()
    if lo < -1e-6:
        raise StabilityError(f"state lost positivity (eigenvalue {lo:.3g}); reduce dt")
    return FockDensityMatrix(rho, validate=False)


def extract_params(rho, asymmetry_tol: float = 1e-3) -> DisplacedThermalState:
    """Recover ``(beta, p, q)`` from quadrature moments.

    ``q = <Q>``, ``p = <P>`` and the mean variance
    ``v = (Var Q + Var P)/2 = <a^+a> + 1/2 - |<a>|^2`` equals
    ``coth(beta/2)/2``. Moments are normalised by the trace. A variance at or
    below the vacuum value 1/2 yields the pure limit.

    Raises:
        ModelMismatchError: if ``|Var Q - Var P|`` exceeds ``asymmetry_tol``
            (a squeezed or otherwise non-thermal state).
    """
    rho = _as_density(rho).entries
    dim = rho.shape[0]
    tr = np.trace(rho).real
    # <a> = sum_m sqrt(m+1) rho[m+1, m]
    s = np.sqrt(np.arange(1, dim))
    mean_a = np.sum(s * np.diagonal(rho, offset=-1)) / tr
    mean_aa = np.sum(s[:-1] * s[1:] * np.diagonal(rho, offset=-2)) / tr
    mean_n = np.sum(np.arange(dim) * np.diagonal(rho).real) / tr
    q = math.sqrt(2.0) * mean_a.real
    p = math.sqrt(2.0) * mean_a.imag
    # Var Q - Var P = 2 Re(<a^2> - <a>^2)
    asym = abs(2.0 * (mean_aa - mean_a * mean_a).real)
    if asym > asymmetry_tol:
        raise ModelMismatchError(f"quadrature variances differ by {asym:.3g}")
    excess = mean_n - abs(mean_a) ** 2  # v - 1/2
    if excess <= 1e-10:
        return DisplacedThermalState.coherent(p, q)
    return DisplacedThermalState(math.log1p(1.0 / excess), p, q)
