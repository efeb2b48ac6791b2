"""Negative-order polylogarithms and Laguerre polynomials.

``Li_{-m}(z)`` is a rational function ``P_m(z) / (1 - z)**(m + 1)`` whose
numerator has integer (Eulerian) coefficients.  The numerators are built
exactly with Python integers, so identities between neighbouring orders hold
to floating-point evaluation accuracy only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import InvalidParameter, TruncationOverflow

#: Highest polylog order with a tabulated numerator (``2k + 2`` for k = 25).
MAX_ORDER = 52


@dataclass(frozen=True)
class NegPolylogTable:
    """Numerator of ``Li_{-m}``; the denominator is ``(1 - z)**(order + 1)``.

    ``numerator_coeffs[i]`` multiplies ``z**i``.
    """

    order: int
    numerator_coeffs: tuple[int, ...]

    def __call__(self, z: float) -> float:
        return poly_eval(self.numerator_coeffs, z) / (1.0 - z) ** (self.order + 1)


def poly_mul(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return _trim(out)


def poly_sub(a: tuple[int, ...], b: tuple[int, ...]) -> tuple[int, ...]:
    n = max(len(a), len(b))
    out = [(a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0) for i in range(n)]
    return _trim(out)


def poly_eval(coeffs: tuple[int, ...], z: float) -> float:
    """Horner evaluation of an integer-coefficient polynomial at float ``z``."""
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * z + float(c)
    return acc


def _trim(coeffs: list[int]) -> tuple[int, ...]:
    while len(coeffs) > 1 and coeffs[-1] == 0:
        coeffs.pop()
    return tuple(coeffs)


@lru_cache(maxsize=None)
def _numerators() -> list[tuple[int, ...]]:
    # P_0 = z; z d/dz [P / (1-z)^(m+1)] = z [P'(1-z) + (m+1) P] / (1-z)^(m+2)
    table: list[tuple[int, ...]] = [(0, 1)]
    for m in range(MAX_ORDER):
        p = table[-1]
        q = [0] * (len(p) + 2)
        for i, c in enumerate(p):
            if i:
                q[i] += i * c  # z * (i c z^(i-1)) lands at z^i
                q[i + 1] -= i * c
            q[i + 1] += (m + 1) * c
        table.append(_trim(q))
    return table


def neg_polylog_table(m: int) -> NegPolylogTable:
    """Exact numerator table for ``Li_{-m}``, ``0 <= m <= MAX_ORDER``."""
    if m < 0:
        raise InvalidParameter(f"polylog order must be >= 0, got {m}")
    if m > MAX_ORDER:
        raise TruncationOverflow(f"polylog order {m} exceeds tabulated maximum {MAX_ORDER}")
    return NegPolylogTable(m, _numerators()[m])


def polylog_neg(m: int, z: float) -> float:
    """Evaluate ``Li_{-m}(z) = sum_{j>=1} j**m z**j`` for ``|z| < 1``."""
    if not abs(z) < 1.0:
        raise InvalidParameter(f"|z| must be < 1, got {z}")
    return neg_polylog_table(m)(z)


def laguerre(n: int, x):
    """Laguerre polynomial ``L_n(x)``; vectorised over ``x``."""
    return assoc_laguerre(n, 0, x)


def assoc_laguerre(n: int, k: int, x):
    """Associated Laguerre polynomial ``L_n^(k)(x)`` by upward recurrence.

    ``(j + 1) L_{j+1} = (2j + 1 + k - x) L_j - (j + k) L_{j-1}``
    """
    if n < 0 or k < 0:
        raise InvalidParameter(f"need n >= 0 and k >= 0, got n={n}, k={k}")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 1.0 + k - x
    for j in range(1, n):
        prev, cur = cur, ((2 * j + 1 + k - x) * cur - (j + k) * prev) / (j + 1)
    return cur if cur.ndim else float(cur)


def assoc_laguerre_table(n_max: int, k: int, x: np.ndarray) -> np.ndarray:
    """Rows ``L_0^(k)(x) .. L_{n_max-1}^(k)(x)`` stacked along axis 0."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max,) + x.shape)
    if n_max == 0:
        return out
    out[0] = 1.0
    if n_max > 1:
        out[1] = 1.0 + k - x
    for j in range(1, n_max - 1):
        out[j + 1] = ((2 * j + 1 + k - x) * out[j] - (j + k) * out[j - 1]) / (j + 1)
    return out
