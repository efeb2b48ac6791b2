"""Constructors for thermal, coherent and number states."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import poisson

from .errors import InvalidParameter
from .fock import DEFAULT_TAIL_TOL, DiagonalState, PureState


@dataclass(frozen=True)
class ThermalSpec:
    nbar: float

    def __post_init__(self):
        if not (self.nbar >= 0 and math.isfinite(self.nbar)):
            raise InvalidParameter(f"nbar must be finite and >= 0, got {self.nbar}")

    @property
    def ratio(self) -> float:
        """Geometric ratio ``z = nbar / (1 + nbar)``."""
        return self.nbar / (1.0 + self.nbar)


@dataclass(frozen=True)
class CoherentSpec:
    alpha: complex

    def __post_init__(self):
        if not math.isfinite(abs(self.alpha)):
            raise InvalidParameter(f"alpha must be finite, got {self.alpha}")

    @property
    def mean(self) -> float:
        return abs(self.alpha) ** 2


def _check_tol(tail_tol: float) -> None:
    if not 0.0 < tail_tol < 1.0:
        raise InvalidParameter(f"tail_tol must lie in (0, 1), got {tail_tol}")


def thermal_cutoff(z: float, tail_tol: float) -> int:
    """Cutoff whose discarded geometric tail is below ``tail_tol`` in mass and
    in second moment.

    Starts from ``ceil(ln(tail_tol) / ln z) + 1`` (mass bound ``z**N``) and
    grows until ``sum_{j>=N} j**2 (1 - z) z**j`` is also below ``tail_tol``.
    """
    n = math.ceil(math.log(tail_tol) / math.log(z)) + 1
    q = 1.0 - z
    while True:
        second = z**n * (n * n + 2 * n * z / q + z * (1 + z) / q**2)
        if second < tail_tol:
            return n
        n += 1


def make_thermal(spec: ThermalSpec | float, tail_tol: float = DEFAULT_TAIL_TOL) -> DiagonalState:
    """Thermal state with weights ``nbar**n / (1 + nbar)**(n + 1)``, cut at
    :func:`thermal_cutoff`."""
    if not isinstance(spec, ThermalSpec):
        spec = ThermalSpec(float(spec))
    _check_tol(tail_tol)
    z = spec.ratio
    if z == 0.0:
        return DiagonalState(np.array([1.0]), tail_tol)
    log_z, log_p0 = math.log(z), -math.log1p(spec.nbar)

    def source(dim: int) -> np.ndarray:
        return np.exp(np.arange(dim) * log_z + log_p0)

    w = source(thermal_cutoff(z, tail_tol))
    total = w.sum()
    return DiagonalState(w / total, tail_tol, None, lambda d: source(d) / total)


def _coherent_source(alpha: complex):
    mean = abs(alpha) ** 2
    log_a = np.log(complex(alpha)) if alpha != 0 else None

    def source(dim: int) -> np.ndarray:
        if log_a is None:
            out = np.zeros(dim, dtype=complex)
            out[0] = 1.0
            return out
        # c_n = c_{n-1} alpha / sqrt(n), accumulated as a sum of logs
        steps = np.empty(dim, dtype=complex)
        steps[0] = -mean / 2
        steps[1:] = log_a - 0.5 * np.log(np.arange(1, dim))
        return np.exp(np.cumsum(steps))

    return source


def _poisson_tail(n: int, mean: float) -> float:
    """Larger of ``P(j >= n)`` and ``sum_{j>=n} j**2 P(j)`` for Poisson(mean)."""
    mass = poisson.sf(n - 1, mean)
    # j P(j) = mean P(j - 1) gives the second-moment tail in closed form
    second = mean * (mean * poisson.sf(n - 3, mean) + poisson.sf(n - 2, mean))
    return max(mass, second)


def coherent_cutoff(mean: float, tail_tol: float) -> int:
    """Smallest ``N`` whose Poisson tail (mass and second moment) is < ``tail_tol``.

    Doubling search for an upper bracket, then bisection.
    """
    hi = 8
    while _poisson_tail(hi, mean) >= tail_tol:
        hi *= 2
    lo = hi // 2
    while lo < hi:
        mid = (lo + hi) // 2
        if _poisson_tail(mid, mean) < tail_tol:
            hi = mid
        else:
            lo = mid + 1
    return max(hi, 1)


def make_coherent(spec: CoherentSpec | complex, tail_tol: float = DEFAULT_TAIL_TOL) -> PureState:
    """Coherent state ``|alpha>`` truncated where the Poisson tail is < ``tail_tol``."""
    if not isinstance(spec, CoherentSpec):
        spec = CoherentSpec(complex(spec))
    _check_tol(tail_tol)
    if spec.alpha == 0:
        return PureState(np.array([1.0 + 0j]), tail_tol)
    source = _coherent_source(spec.alpha)
    dim = coherent_cutoff(spec.mean, tail_tol)
    amps = source(dim)
    norm = np.sqrt(np.sum(np.abs(amps) ** 2))
    return PureState(amps / norm, tail_tol, None, lambda d: source(d) / norm)


def make_coherent_mean(alpha_sq: float, tail_tol: float = DEFAULT_TAIL_TOL) -> PureState:
    """Coherent state with real ``alpha = sqrt(alpha_sq)``."""
    if alpha_sq < 0:
        raise InvalidParameter(f"alpha_sq must be >= 0, got {alpha_sq}")
    return make_coherent(CoherentSpec(math.sqrt(alpha_sq)), tail_tol)


def make_number(n: int, tail_tol: float = DEFAULT_TAIL_TOL) -> PureState:
    if int(n) != n or n < 0:
        raise InvalidParameter(f"photon number must be a non-negative integer, got {n}")
    amps = np.zeros(int(n) + 1, dtype=complex)
    amps[int(n)] = 1.0
    return PureState(amps, tail_tol)
