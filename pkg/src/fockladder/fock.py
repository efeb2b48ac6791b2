"""Truncated Fock-space states and ladder-operator pipelines.

Two state flavours share one interface.  ``PureState`` holds complex
amplitudes ``c_n`` and ``DiagonalState`` holds number-diagonal weights
``p_n``.  Every state also carries a *source*, a function ``dim -> vector``
that regenerates its (unnormalised) entries at any cutoff.  Ladder operations
compose sources rather than arrays, so the truncation can be widened after an
operation pushes weight towards large ``n`` without losing the analytic tail.
"""

from __future__ import annotations

import math
import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Union

import numpy as np

from .errors import InvalidParameter, TruncationOverflow, ZeroNormState

DEFAULT_TAIL_TOL = 1e-12
ZERO_NORM = 1e-14
MAX_DIM = 2**16

Source = Callable[[int], np.ndarray]


def array_source(values: np.ndarray) -> Source:
    """Source for a vector with finite support: zero-padded or clipped."""
    values = np.array(values)

    def src(dim: int) -> np.ndarray:
        out = np.zeros(dim, dtype=values.dtype)
        m = min(dim, values.size)
        out[:m] = values[:m]
        return out

    return src


@dataclass(frozen=True, eq=False)
class PureState:
    """Pure state ``sum_n c_n |n>`` truncated to ``n < trunc_dim``.

    ``support`` is the exact support size when it is finite, or ``None`` when
    the source has an infinite (analytically decaying) tail.
    """

    amplitudes: np.ndarray
    tail_tol: float = DEFAULT_TAIL_TOL
    support: int | None = None
    source: Source | None = field(default=None, repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise InvalidParameter("amplitudes must be a non-empty 1-D vector")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.source is None:
            object.__setattr__(self, "source", array_source(amps))
            object.__setattr__(self, "support", amps.size)

    @property
    def trunc_dim(self) -> int:
        return self.amplitudes.size

    @property
    def populations(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


@dataclass(frozen=True, eq=False)
class DiagonalState:
    """Number-diagonal mixed state ``sum_n p_n |n><n|``."""

    weights: np.ndarray
    tail_tol: float = DEFAULT_TAIL_TOL
    support: int | None = None
    source: Source | None = field(default=None, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InvalidParameter("weights must be a non-empty 1-D vector")
        if np.any(w < 0):
            raise InvalidParameter("diagonal weights must be non-negative")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.source is None:
            object.__setattr__(self, "source", array_source(w))
            object.__setattr__(self, "support", w.size)

    @property
    def trunc_dim(self) -> int:
        return self.weights.size

    @property
    def populations(self) -> np.ndarray:
        return self.weights


FieldState = Union[PureState, DiagonalState]


class LadderOp(enum.Enum):
    CREATE = "create"
    ANNIHILATE = "annihilate"
    AC = "ac"  # a^+ a
    CA = "ca"  # a a^+


@dataclass(frozen=True)
class LadderPipeline:
    op: LadderOp
    repetitions: int = 1

    def __post_init__(self):
        if isinstance(self.op, str):
            object.__setattr__(self, "op", LadderOp(self.op.lower()))
        if int(self.repetitions) != self.repetitions or self.repetitions < 1:
            raise InvalidParameter(f"repetitions must be a positive integer, got {self.repetitions}")


def populations_of(values: np.ndarray, pure: bool) -> np.ndarray:
    return np.abs(values) ** 2 if pure else np.asarray(values, dtype=float)


def _is_pure(state: FieldState) -> bool:
    if isinstance(state, PureState):
        return True
    if isinstance(state, DiagonalState):
        return False
    raise TypeError(f"expected PureState or DiagonalState, got {type(state).__name__}")


def _values(state: FieldState) -> np.ndarray:
    return state.amplitudes if isinstance(state, PureState) else state.weights


def _rebuild(state: FieldState, values, source, support) -> FieldState:
    if isinstance(state, PureState):
        return PureState(values, state.tail_tol, support, source)
    return DiagonalState(values, state.tail_tol, support, source)


def normalize(state: FieldState) -> tuple[FieldState, float]:
    """Return the unit-norm state and the pre-normalisation norm.

    The norm is the squared 2-norm for pure states and the trace for
    diagonal ones.
    """
    pure = _is_pure(state)
    vals = _values(state)
    norm = float(np.sum(populations_of(vals, pure)))
    if not norm >= ZERO_NORM:
        raise ZeroNormState(f"state norm {norm:.3g} is below {ZERO_NORM:g}")
    scale = np.sqrt(norm) if pure else norm
    src = state.source
    return _rebuild(state, vals / scale, lambda dim: src(dim) / scale, state.support), norm


def fit_truncation(source: Source, start_dim: int, tail_tol: float, pure: bool,
                   support: int | None = None, max_dim: int = MAX_DIM) -> tuple[np.ndarray, float]:
    """Materialise ``source`` at a cutoff whose last bin carries < ``tail_tol``.

    Returns ``(values / peak, peak)`` with ``peak`` the largest magnitude, so
    populations stay finite even when the raw values approach 1e308.

    Finite-support sources are evaluated on exactly their support.  Otherwise
    the cutoff doubles from ``start_dim`` until the last-bin relative weight
    drops below ``tail_tol`` and is then trimmed back (never below
    ``start_dim``) to where the discarded suffix mass is below ``tail_tol``.
    """
    if support is not None:
        if support > max_dim:
            raise TruncationOverflow(f"support {support} exceeds hard cap {max_dim}")
        vals = np.asarray(source(max(support, 1)))
        if not np.all(np.isfinite(vals)):
            raise TruncationOverflow("weights overflowed double precision")
        peak = float(np.max(np.abs(vals), initial=0.0)) or 1.0
        return vals / peak, peak
    dim = max(int(start_dim), 1)
    while True:
        if dim > max_dim:
            raise TruncationOverflow(f"adaptive cutoff exceeds hard cap {max_dim}")
        vals = np.asarray(source(dim))
        if not np.all(np.isfinite(vals)):
            raise TruncationOverflow("weights overflowed double precision")
        peak = float(np.max(np.abs(vals), initial=0.0)) or 1.0
        vals = vals / peak
        w = populations_of(vals, pure)
        total = w.sum()
        if total <= 0.0:
            return vals, peak
        if w[-1] / total < tail_tol:
            break
        dim *= 2
    suffix = np.cumsum(w[::-1])[::-1] / total
    keep = max(int(start_dim), int(np.count_nonzero(suffix >= tail_tol)) + 1)
    return vals[: min(keep, dim)], peak


def _power_factor(base: np.ndarray, power: float, vals: np.ndarray) -> np.ndarray:
    """``vals * base**power`` evaluated in log space to dodge overflow."""
    mag = np.abs(vals)
    # inf past double range is reported by fit_truncation as TruncationOverflow
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        logmag = np.log(mag) + power * np.log(base)
        out = np.exp(logmag)
        out[mag == 0] = 0.0
        if np.iscomplexobj(vals):
            return out * np.exp(1j * np.angle(vals))
    return out


def _apply(state: FieldState, raw: Source, dim_hint: int, support: int | None,
           max_dim: int) -> FieldState:
    pure = _is_pure(state)
    vals, peak = fit_truncation(raw, dim_hint, state.tail_tol, pure, support, max_dim)
    norm = float(np.sum(populations_of(vals, pure)))
    if pure:
        norm_raw, scale = norm * peak * peak, math.sqrt(norm) * peak
    else:
        norm_raw, scale = norm * peak, norm * peak
    if not norm_raw >= ZERO_NORM:
        raise ZeroNormState(f"operation produced norm {norm_raw:.3g} below {ZERO_NORM:g}")
    return _rebuild(state, vals * (peak / scale), lambda dim: raw(dim) / scale, support)


def _create_raw(src: Source, pure: bool, times: int) -> Source:
    power = 0.5 if pure else 1.0

    def raw(dim: int) -> np.ndarray:
        n = np.arange(dim, dtype=float)
        head = src(max(dim - times, 0))
        out = np.zeros(dim, dtype=head.dtype)
        out[times:] = head
        # a^+^k |m> = sqrt((m+1)...(m+k)) |m+k>
        fac = np.ones(dim)
        for j in range(times):
            fac *= np.clip(n - j, 0, None)
        return _power_factor(fac, power, out)

    return raw


def _annihilate_raw(src: Source, pure: bool, times: int) -> Source:
    power = 0.5 if pure else 1.0

    def raw(dim: int) -> np.ndarray:
        n = np.arange(dim, dtype=float)
        out = np.asarray(src(dim + times))[times:]
        fac = np.ones(dim)
        for j in range(1, times + 1):
            fac *= n + j
        return _power_factor(fac, power, out)

    return raw


def _number_raw(src: Source, pure: bool, shift: int, reps: int) -> Source:
    power = reps if pure else 2 * reps

    def raw(dim: int) -> np.ndarray:
        n = np.arange(dim, dtype=float)
        return _power_factor(n + shift, power, np.asarray(src(dim)))

    return raw


def apply_pipeline(state: FieldState, pipeline: LadderPipeline, max_dim: int = MAX_DIM) -> FieldState:
    """Apply ``op**k`` to ``state`` with a single renormalisation.

    Pure amplitudes pick up ``n**k`` (AC) or ``(n+1)**k`` (CA); diagonal
    weights pick up the squares.  ``CREATE``/``ANNIHILATE`` shift the index
    ``k`` times with the matching square-root factors.
    """
    pure = _is_pure(state)
    k = int(pipeline.repetitions)
    src, dim, support = state.source, state.trunc_dim, state.support
    op = pipeline.op
    if op is LadderOp.CREATE:
        raw = _create_raw(src, pure, k)
        dim += k
        support = None if support is None else support + k
    elif op is LadderOp.ANNIHILATE:
        raw = _annihilate_raw(src, pure, k)
        support = None if support is None else max(support - k, 1)
        if support is not None:
            dim = support
    elif op is LadderOp.AC:
        raw = _number_raw(src, pure, 0, k)
    elif op is LadderOp.CA:
        raw = _number_raw(src, pure, 1, k)
    else:  # pragma: no cover
        raise InvalidParameter(f"unknown ladder op {op!r}")
    return _apply(state, raw, dim, support, max_dim)


def apply_create(state: FieldState) -> FieldState:
    """Normalised ``a^+ |psi>`` (or ``a^+ rho a``)."""
    return apply_pipeline(state, LadderPipeline(LadderOp.CREATE))


def apply_annihilate(state: FieldState) -> FieldState:
    """Normalised ``a |psi>``; raises ``ZeroNormState`` on the vacuum."""
    return apply_pipeline(state, LadderPipeline(LadderOp.ANNIHILATE))


def apply_ac(state: FieldState) -> FieldState:
    return apply_pipeline(state, LadderPipeline(LadderOp.AC))


def apply_ca(state: FieldState) -> FieldState:
    return apply_pipeline(state, LadderPipeline(LadderOp.CA))


def extend(state: FieldState, dim: int) -> FieldState:
    """Re-materialise ``state`` at cutoff ``dim`` from its source."""
    vals = np.asarray(state.source(dim))
    return replace(state, **{"amplitudes" if isinstance(state, PureState) else "weights": vals})


def freeze(state: FieldState) -> FieldState:
    """Drop the analytic source: the stored vector becomes the exact state."""
    if isinstance(state, PureState):
        return PureState(state.amplitudes, state.tail_tol)
    return DiagonalState(state.weights, state.tail_tol)


def padded(values: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros(dim, dtype=values.dtype)
    out[: values.size] = values[:dim]
    return out
