"""Truncated geometric distribution and the tail-count corrections built on it.

TG(p, s) lives on {0, ..., s-1} with mass proportional to p (1-p)^k.  It models
how many occurrences of a vertex the tail sampler misses before it starts
counting.  Powers of (1-p) are evaluated in log space so tiny p and huge s are
safe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "TruncGeomParams",
    "tg_pdf",
    "tg_cdf",
    "tg_expectation",
    "loss_correction",
    "loss_correction_array",
    "reduced_degree",
    "step_cdf_approx",
    "step_min_x",
]

ROUNDING = ("ceil", "floor")


@dataclass(frozen=True)
class TruncGeomParams:
    p: float
    s: int

    def __post_init__(self):
        if not 0.0 < self.p <= 1.0:
            raise ValueError(f"p must lie in (0, 1], got {self.p!r}")
        if int(self.s) != self.s or self.s < 1:
            raise ValueError(f"s must be a positive integer, got {self.s!r}")


def _log_q(p: float) -> float:
    return -math.inf if p == 1.0 else math.log1p(-p)


def _pow_q(p: float, n: float) -> float:
    """(1-p)**n, with 0**0 == 1."""
    if n == 0:
        return 1.0
    return math.exp(n * _log_q(p))


def _one_minus_pow_q(p: float, n: float) -> float:
    """1 - (1-p)**n without cancellation for small p."""
    if n == 0:
        return 0.0
    if p == 1.0:
        return 1.0
    return -math.expm1(n * _log_q(p))


def _check_support(params: TruncGeomParams, k: int) -> None:
    if int(k) != k or not 0 <= k <= params.s - 1:
        raise ValueError(f"k={k!r} outside support 0..{params.s - 1}")


def tg_pdf(params: TruncGeomParams, k: int) -> float:
    _check_support(params, k)
    p = params.p
    return p * _pow_q(p, k) / _one_minus_pow_q(p, params.s)


def tg_cdf(params: TruncGeomParams, k: int) -> float:
    """Pr[X <= k]."""
    _check_support(params, k)
    if k == params.s - 1:
        return 1.0
    return _one_minus_pow_q(params.p, k + 1) / _one_minus_pow_q(params.p, params.s)


def _raw_mean(p: float, s: int) -> tuple[float, float]:
    # closed form rearranged as (1-p)/p - s (1-p)^s / (1-(1-p)^s); also returns
    # (1-p)/p, which sets the scale of the cancellation error
    head = (1.0 - p) / p
    return head - s * _pow_q(p, s) / _one_minus_pow_q(p, s), head


def tg_expectation(params: TruncGeomParams) -> float:
    if params.s == 1 or params.p == 1.0:
        return 0.0
    mean, head = _raw_mean(params.p, params.s)
    # the two terms cancel for small s; anything within rounding of zero is zero
    if mean < _cancel_tol(head):
        return 0.0
    return mean


def _cancel_tol(head: float) -> float:
    return 1e-12 * (1.0 + head)


def _round(mean: float, head: float, rounding: str) -> int:
    tol = _cancel_tol(head)
    if rounding == "ceil":
        return max(0, math.ceil(mean - tol))
    if rounding == "floor":
        return max(0, math.floor(mean + tol))
    raise ValueError(f"rounding must be one of {ROUNDING}, got {rounding!r}")


def loss_correction(p_t: float, r: int, rounding: str = "ceil") -> int:
    """Expected number of occurrences the tail sampler misses for a count-r vertex.

    ``rounding="floor"`` switches to the rounded-down variant for sensitivity runs.
    """
    TruncGeomParams(p_t, r)
    if r == 1 or p_t == 1.0:
        if rounding not in ROUNDING:
            raise ValueError(f"rounding must be one of {ROUNDING}, got {rounding!r}")
        return 0
    mean, head = _raw_mean(p_t, r)
    return _round(mean, head, rounding)


def loss_correction_array(p_t: float, r_max: int, rounding: str = "ceil") -> np.ndarray:
    """``loss_correction(p_t, r)`` for r = 1..r_max; entry 0 is r = 1.

    Delegates to the scalar routine so both agree bit for bit.
    """
    if r_max < 1:
        return np.zeros(0, dtype=np.int64)
    out = np.empty(r_max, dtype=np.int64)
    if p_t == 1.0:
        out[:] = 0
        return out
    # ceil((1-p)/p) bounds every value; once reached the sequence is flat
    cap = _round((1.0 - p_t) / p_t, (1.0 - p_t) / p_t, rounding)
    for i in range(r_max):
        v = loss_correction(p_t, i + 1, rounding)
        out[i] = v
        if v == cap:
            out[i:] = cap
            break
    return out


def reduced_degree(p_t: float, d: int, rounding: str = "ceil") -> int:
    return d - loss_correction(p_t, d, rounding)


def step_min_x(k: float) -> float:
    """Smallest admissible x for :func:`step_cdf_approx`; the curve is 0 there."""
    return k - 1.0 + k * math.exp(-k)


def step_cdf_approx(k: float, x: float) -> float:
    """Small-p limit of the tail-cdf coefficient, written with x = p_t * r.

    Near 0 just above ``k - 1 + k e^-k`` and rising to 1 as x grows; for large
    k it is close to a unit step at x = k.
    """
    if k <= 0 or x <= 0:
        raise ValueError("k and x must be positive")
    x0 = step_min_x(k)
    if x < x0 - 1e-12 * max(1.0, abs(x0)):
        raise ValueError(f"x={x!r} below the minimum {x0!r}")
    num = -math.expm1(-(x - x0))
    den = -math.expm1(-x)
    return min(1.0, max(0.0, num / den))
