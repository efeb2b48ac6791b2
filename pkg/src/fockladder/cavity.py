"""Post-selected two-atom cavity realisation of AC and CA.

Pair geometry for AC: atom 1 enters in ``|g>`` and atom 2 in ``|e>``; the run
is kept when they leave in ``|e>`` and ``|g>``.  The kept branch multiplies
``C_n`` by ``sin(sqrt(n) g t1) sin(sqrt(n) g t2)``.  CA swaps the atomic
preparations and uses ``sqrt(n + 1)``.  Only these branch amplitudes are
applied; the full Jaynes-Cummings evolution is never built.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InvalidParameter, ZeroSuccessProbability
from .fock import (
    DiagonalState,
    FieldState,
    LadderOp,
    LadderPipeline,
    PureState,
    apply_pipeline,
)
from .observables import fidelity, moments
from .states import make_coherent_mean

MIN_SUCCESS = 1e-14


@dataclass(frozen=True)
class CavityConfig:
    g: float
    t1: float
    t2: float
    mode: LadderOp = LadderOp.AC
    pairs: int = 1

    def __post_init__(self):
        if isinstance(self.mode, str):
            object.__setattr__(self, "mode", LadderOp(self.mode.lower()))
        if self.mode not in (LadderOp.AC, LadderOp.CA):
            raise InvalidParameter(f"cavity mode must be AC or CA, got {self.mode}")
        if not self.g > 0:
            raise InvalidParameter(f"coupling g must be > 0, got {self.g}")
        if self.t1 < 0 or self.t2 < 0:
            raise InvalidParameter("interaction times must be >= 0")
        if not (math.isfinite(self.g * self.t1) and math.isfinite(self.g * self.t2)):
            raise InvalidParameter("g*t must be finite")
        if int(self.pairs) != self.pairs or self.pairs < 1:
            raise InvalidParameter(f"pairs must be a positive integer, got {self.pairs}")

    def scaled(self, lam: float) -> "CavityConfig":
        return CavityConfig(self.g, lam * self.t1, lam * self.t2, self.mode, self.pairs)


@dataclass(frozen=True, eq=False)
class CavityOutcome:
    conditioned_state: FieldState
    success_prob: float
    ideal_state: FieldState
    realized_fidelity: float


def branch_factor(n: np.ndarray, cfg: CavityConfig) -> np.ndarray:
    """Amplitude factor of the kept branch for photon numbers ``n``."""
    rabi = np.sqrt(n + (1.0 if cfg.mode is LadderOp.CA else 0.0))
    return np.sin(rabi * cfg.g * cfg.t1) * np.sin(rabi * cfg.g * cfg.t2)


def _condition_once(state: FieldState, cfg: CavityConfig, min_success: float) -> tuple[FieldState, float]:
    pure = isinstance(state, PureState)
    pops = state.populations
    total = pops.sum()
    src = state.source

    def raw(dim: int) -> np.ndarray:
        f = branch_factor(np.arange(dim, dtype=float), cfg)
        return np.asarray(src(dim)) * (f if pure else f * f)

    vals = raw(state.trunc_dim)
    kept = np.abs(vals) ** 2 if pure else vals
    prob = float(kept.sum() / total)
    if not prob > 0.0 or prob < min_success:
        raise ZeroSuccessProbability(f"post-selection probability {prob:.3g} is below {min_success:g}")
    scale = math.sqrt(prob * total) if pure else prob * total
    cls = PureState if pure else DiagonalState
    out = cls(vals / scale, state.tail_tol, state.support, lambda dim: raw(dim) / scale)
    return out, prob


def conditional_map_repeated(state: FieldState, cfg: CavityConfig,
                             min_success: float = MIN_SUCCESS) -> CavityOutcome:
    """Pass ``cfg.pairs`` atom pairs through the cavity, post-selecting each.

    Every pair uses the same ``(t1, t2)``.  The overall success probability is
    the product of the per-pair probabilities; the ideal comparison state is
    ``(a^+ a)**k`` or ``(a a^+)**k`` applied to the input.

    Raises:
        ZeroSuccessProbability: if any stage keeps less than ``min_success``.
    """
    current, prob = state, 1.0
    for _ in range(cfg.pairs):
        current, p = _condition_once(current, cfg, min_success)
        prob *= p
    if prob < min_success:
        raise ZeroSuccessProbability(f"overall success probability {prob:.3g} is below {min_success:g}")
    ideal = apply_pipeline(state, LadderPipeline(cfg.mode, cfg.pairs))
    return CavityOutcome(current, prob, ideal, fidelity(current, ideal))


def conditional_map(state: FieldState, cfg: CavityConfig, min_success: float = MIN_SUCCESS) -> CavityOutcome:
    """Single atom pair; ``cfg.pairs`` is ignored."""
    single = CavityConfig(cfg.g, cfg.t1, cfg.t2, cfg.mode, 1)
    return conditional_map_repeated(state, single, min_success)


def pi_half_times(mean_n: float, g: float, mode: LadderOp | str) -> tuple[float, float]:
    """Equal interaction times giving a pi/2 Rabi angle at the mean photon number."""
    mode = LadderOp(mode.lower()) if isinstance(mode, str) else mode
    if not g > 0:
        raise InvalidParameter(f"coupling g must be > 0, got {g}")
    if mode is LadderOp.AC:
        if not mean_n > 0:
            raise InvalidParameter("AC timing needs mean_n > 0 (the time diverges at zero)")
        rabi = math.sqrt(mean_n)
    elif mode is LadderOp.CA:
        if mean_n < 0:
            raise InvalidParameter(f"mean_n must be >= 0, got {mean_n}")
        rabi = math.sqrt(mean_n + 1.0)
    else:
        raise InvalidParameter(f"mode must be AC or CA, got {mode}")
    t = (math.pi / 2) / (g * rabi)
    return t, t


@dataclass(frozen=True)
class ScalingReport:
    """``ratios[i] = P(scales[i] * t) / scales[i]**(4 * pairs)``."""

    scales: tuple[float, ...]
    ratios: tuple[float, ...]
    fidelities: tuple[float, ...]
    relative_spread: float


def short_time_scaling_probe(state: FieldState, cfg: CavityConfig, scales: Sequence[float]) -> ScalingReport:
    scales = tuple(float(s) for s in scales)
    if len(scales) < 2 or any(b >= a for a, b in zip(scales, scales[1:])) or scales[-1] <= 0:
        raise InvalidParameter("scales must be positive and strictly decreasing, at least two")
    ratios, fids = [], []
    for lam in scales:
        # the probe deliberately works far below the usual success floor
        out = conditional_map_repeated(state, cfg.scaled(lam), min_success=0.0)
        ratios.append(out.success_prob / lam ** (4 * cfg.pairs))
        fids.append(out.realized_fidelity)
    spread = abs(ratios[-1] - ratios[-2]) / abs(ratios[-1])
    return ScalingReport(scales, tuple(ratios), tuple(fids), spread)


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("FOCKLADDER_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items: Sequence) -> list:
    """Ordered map honouring ``FOCKLADDER_THREADS``."""
    threads = thread_count()
    if threads == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def fig9_point(alpha_sq: float, g: float, mode: LadderOp | str, tail_tol: float = 1e-12) -> tuple[float, float, float]:
    state = make_coherent_mean(alpha_sq, tail_tol)
    t1, t2 = pi_half_times(moments(state).mean, g, mode)
    out = conditional_map(state, CavityConfig(g, t1, t2, mode))
    return alpha_sq, out.success_prob, out.realized_fidelity


def fig9_sweep(alpha_sq: Sequence[float], g: float = 1.0, mode: LadderOp | str = LadderOp.AC,
               tail_tol: float = 1e-12) -> list[tuple[float, float, float]]:
    """Success probability and fidelity of the pi/2 strategy for coherent inputs."""
    return parallel_map(lambda a: fig9_point(a, g, mode, tail_tol), list(alpha_sq))
