"""Photon statistics, fidelity and Wigner functions of Fock-space states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameter
from .fock import DiagonalState, FieldState, PureState, padded
from .special import (
    assoc_laguerre_table,
    neg_polylog_table,
    poly_eval,
    poly_mul,
    poly_sub,
)


@dataclass(frozen=True)
class MomentSummary:
    """Photon-number moments. ``mandel_q`` is ``None`` when the mean is zero."""

    mean: float
    second_moment: float
    variance: float
    mandel_q: float | None


def moments(state: FieldState) -> MomentSummary:
    w = state.populations
    n = np.arange(w.size, dtype=float)
    total = w.sum()
    mean = float(np.dot(n, w) / total)
    second = float(np.dot(n * n, w) / total)
    variance = float(np.dot((n - mean) ** 2, w) / total)
    q = variance / mean - 1.0 if mean > 0 else None
    return MomentSummary(mean, second, variance, q)


def mandel_q(state: FieldState) -> float | None:
    return moments(state).mandel_q


def ladder_expectations(state: FieldState) -> tuple[float, float]:
    """``(<a^+ a>, <a a^+>)`` from the number-basis populations."""
    w = state.populations
    w = w / w.sum()
    n = np.arange(w.size, dtype=float)
    return float(np.dot(n, w)), float(np.dot(n + 1, w))


# -- closed-form moments of repeated AC / CA on a thermal state ------------

def _thermal_ratio(nbar: float) -> float:
    if not nbar > 0:
        raise InvalidParameter(f"nbar must be > 0, got {nbar}")
    return nbar / (1.0 + nbar)


def _check_k(k: int) -> int:
    if int(k) != k or k < 1:
        raise InvalidParameter(f"k must be a positive integer, got {k}")
    return int(k)


def thermal_ack_moments(nbar: float, k: int) -> tuple[float, float]:
    """Mean and variance of the thermal state after ``(a^+ a)**k``.

    Weights are ``n**(2k) z**n``, so the moments are ratios of ``Li_{-2k}``,
    ``Li_{-2k-1}`` and ``Li_{-2k-2}`` at ``z = nbar / (1 + nbar)``.  The
    variance uses the exact Hankel numerator ``P2 P0 - P1**2`` to avoid
    cancellation.
    """
    z = _thermal_ratio(nbar)
    m = 2 * _check_k(k)
    p0, p1, p2 = (neg_polylog_table(j).numerator_coeffs for j in (m, m + 1, m + 2))
    d0 = poly_eval(p0, z)
    mean = poly_eval(p1, z) / (d0 * (1.0 - z))
    hankel = poly_sub(poly_mul(p2, p0), poly_mul(p1, p1))
    variance = poly_eval(hankel, z) / (d0 * d0 * (1.0 - z) ** 2)
    return mean, variance


def thermal_cak_moments(nbar: float, k: int) -> tuple[float, float]:
    """Mean and variance of the thermal state after ``(a a^+)**k``.

    With ``m = n + 1`` the weights are ``m**(2k) z**m`` over ``m >= 1``, so
    ``<n> = <m> - 1`` and ``Var n = E[(m-1)**2] - <m - 1>**2``; both are built
    on integer numerators before a single float evaluation.
    """
    z = _thermal_ratio(nbar)
    m = 2 * _check_k(k)
    p0, p1, p2 = (neg_polylog_table(j).numerator_coeffs for j in (m, m + 1, m + 2))
    one_minus_z = (1, -1)
    # Li_{m+j} share the denominator (1-z)^(m+3) once scaled by (1-z)^(2-j)
    l0 = poly_mul(p0, poly_mul(one_minus_z, one_minus_z))
    l1 = poly_mul(p1, one_minus_z)
    l2 = p2
    first = poly_sub(l1, l0)                        # sum (m-1) m^2k z^m
    second = poly_sub(poly_sub(l2, l1), first)      # sum (m-1)^2 m^2k z^m
    d0 = poly_eval(l0, z)
    mean = poly_eval(first, z) / d0
    hankel = poly_sub(poly_mul(second, l0), poly_mul(first, first))
    variance = poly_eval(hankel, z) / (d0 * d0)
    return mean, variance


# -- fidelity --------------------------------------------------------------

def fidelity(a: FieldState, b: FieldState) -> float:
    """Uhlmann fidelity, squared convention (``F(rho, rho) = 1``).

    Number-diagonal states commute, so the diagonal case reduces to the
    squared Bhattacharyya overlap.  Dimensions are aligned by zero padding.
    """
    dim = max(a.trunc_dim, b.trunc_dim)
    if isinstance(a, PureState) and isinstance(b, PureState):
        f = abs(np.vdot(padded(a.amplitudes, dim), padded(b.amplitudes, dim))) ** 2
    elif isinstance(a, DiagonalState) and isinstance(b, DiagonalState):
        f = np.sum(np.sqrt(padded(a.weights, dim) * padded(b.weights, dim))) ** 2
    else:
        pure, diag = (a, b) if isinstance(a, PureState) else (b, a)
        f = np.dot(padded(pure.populations, dim), padded(diag.weights, dim))
    return float(min(max(f, 0.0), 1.0))


# -- Wigner function -------------------------------------------------------

def _wigner_diagonal(weights: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    r2 = np.abs(alpha) ** 2
    x = 4.0 * r2
    # (-1)^n L_n(x) e^{-x/2} is bounded by 1, so the sum never cancels badly
    acc = np.zeros_like(r2)
    if weights.size:
        prev = np.ones_like(x)
        acc += weights[0] * prev
    if weights.size > 1:
        cur = 1.0 - x
        acc -= weights[1] * cur
        for j in range(1, weights.size - 1):
            prev, cur = cur, ((2 * j + 1 - x) * cur - j * prev) / (j + 1)
            acc += (-1) ** (j + 1) * weights[j + 1] * cur
    return (2.0 / np.pi) * np.exp(-2.0 * r2) * acc


def _wigner_pure(amps: np.ndarray, alpha: np.ndarray) -> np.ndarray:
    """Parity expectation in the displaced frame.

    Uses the displaced-parity matrix elements, for ``n >= m``
    ``<m|D(a) P D(a)^+|n> = (-1)^m sqrt(m!/n!) (2 a*)^(n-m) e^{-2|a|^2} L_m^(n-m)(4|a|^2)``.
    """
    dim = amps.size
    x = 4.0 * np.abs(alpha) ** 2
    two_conj = 2.0 * np.conj(alpha)
    acc = np.zeros(alpha.shape, dtype=complex)
    sign = (-1.0) ** np.arange(dim)
    log_fact = np.array([math.lgamma(j + 1) for j in range(dim)])
    for d in range(dim):
        lag = assoc_laguerre_table(dim - d, d, x)
        m = np.arange(dim - d)
        coef = np.conj(amps[m]) * amps[m + d] * sign[m] * np.exp(0.5 * (log_fact[m] - log_fact[m + d]))
        if not np.any(coef):
            continue
        term = np.tensordot(coef, lag, axes=(0, 0)) * two_conj ** d
        acc += term if d == 0 else 2.0 * term.real
    return (2.0 / np.pi) * np.exp(-0.5 * x) * acc.real


def wigner_at(state: FieldState, alpha):
    """Wigner function ``(2/pi) Tr[rho D(alpha) P D(alpha)^+]`` at ``alpha``.

    Normalised so that the integral over ``x = Re alpha, y = Im alpha`` is
    one; the vacuum peaks at ``2/pi``.  ``alpha`` may be an array.
    """
    arr = np.asarray(alpha, dtype=complex)
    w = state.populations
    if isinstance(state, DiagonalState):
        out = _wigner_diagonal(w / w.sum(), arr)
    else:
        amps = state.amplitudes / math.sqrt(w.sum())
        out = _wigner_pure(amps, arr)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class GridSpec:
    x_min: float = -3.0
    x_max: float = 3.0
    y_min: float = -3.0
    y_max: float = 3.0
    nx: int = 121
    ny: int = 121

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise InvalidParameter("grid resolution must be >= 2 per axis")
        if not (self.x_max > self.x_min and self.y_max > self.y_min):
            raise InvalidParameter("grid bounds must satisfy min < max")

    @classmethod
    def square(cls, lo: float, hi: float, n: int) -> "GridSpec":
        return cls(lo, hi, lo, hi, n, n)


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """Wigner values on a lattice; ``values[iy, ix]`` sits at ``(x[ix], y[iy])``."""

    x: np.ndarray
    y: np.ndarray
    values: np.ndarray

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    @property
    def dy(self) -> float:
        return float(self.y[1] - self.y[0])

    @property
    def min_value(self) -> float:
        return float(self.values.min())

    @property
    def min_location(self) -> tuple[float, float]:
        iy, ix = np.unravel_index(np.argmin(self.values), self.values.shape)
        return float(self.x[ix]), float(self.y[iy])

    def quadrature(self) -> float:
        return float(self.values.sum() * self.dx * self.dy)


def wigner_grid(state: FieldState, spec: GridSpec | None = None) -> WignerGrid:
    spec = spec or GridSpec()
    x = np.linspace(spec.x_min, spec.x_max, spec.nx)
    y = np.linspace(spec.y_min, spec.y_max, spec.ny)
    xx, yy = np.meshgrid(x, y)
    return WignerGrid(x, y, np.asarray(wigner_at(state, xx + 1j * yy)))
