"""Relative Hausdorff (RH) distance between ccdhs, and the KS baseline.

F and G are (eps, delta)-close when every degree d with F(d) > 0 has some
integer d' >= 1 in [(1-eps) d, (1+eps) d] with |F(d) - G(d')| <= delta F(d),
and the same holds with F and G swapped.  Values past a ccdh's last degree
read as 0.  The RH distance is the smallest eps with (eps, eps)-closeness.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .histogram import Ccdh, TrivialHistogramError

__all__ = [
    "ClosenessParams",
    "RhReport",
    "is_close",
    "rh_distance",
    "delta_profile",
    "min_relative_gaps",
    "ks_statistic",
]

# slack for float noise in window bounds and relative comparisons
_WIN_SLACK = 1e-9
_CMP_SLACK = 1e-12
_MAX_RUNS = 64


@dataclass(frozen=True)
class ClosenessParams:
    epsilon: float
    delta: float

    def __post_init__(self):
        if self.epsilon < 0 or self.delta < 0:
            raise ValueError("epsilon and delta must be non-negative")


@dataclass
class RhReport:
    distance: float
    tolerance: float
    lower: float
    ks: float | None = None
    delta_profile: dict[int, float] = field(default_factory=dict)


def _values(c) -> np.ndarray:
    if not isinstance(c, Ccdh):
        c = Ccdh(c)
    if c.is_trivial:
        raise TrivialHistogramError("ccdh")
    return c.values


def _runs(g: np.ndarray) -> list[tuple[int, int]]:
    """Maximal non-increasing runs of g as inclusive 0-based index pairs."""
    cuts = np.flatnonzero(np.diff(g) > 0) + 1
    starts = np.concatenate(([0], cuts))
    ends = np.concatenate((cuts - 1, [len(g) - 1]))
    return list(zip(starts.tolist(), ends.tolist()))


def _windows(n: int, eps: float):
    d = np.arange(1, n + 1, dtype=float)
    lo = np.maximum(1, np.ceil((1.0 - eps) * d - _WIN_SLACK)).astype(np.int64)
    hi = np.floor((1.0 + eps) * d + _WIN_SLACK).astype(np.int64)
    return lo, hi


def _abs_gaps(f: np.ndarray, g: np.ndarray, eps: float) -> np.ndarray:
    """min over the eps-window of |f(d) - g(d')| for every d = 1..len(f)."""
    lo, hi = _windows(len(f), eps)
    best = np.where(hi > len(g), f, np.inf)
    runs = _runs(g)
    if len(runs) > _MAX_RUNS and len(f) * len(runs) > 10**6:
        return np.minimum(best, _abs_gaps_scan(f, g, lo, hi))
    for a, b in runs:
        ql = np.maximum(lo, a + 1)
        qr = np.minimum(hi, b + 1)
        ok = ql <= qr
        if not ok.any():
            continue
        neg = -g[a : b + 1]
        j1 = a + 1 + np.searchsorted(neg, -f, side="left")
        for j in (j1, j1 - 1):
            jj = np.clip(j, ql, qr)
            gap = np.abs(f - g[np.clip(jj, 1, len(g)) - 1])
            best = np.where(ok, np.minimum(best, gap), best)
    return best


def _abs_gaps_scan(f, g, lo, hi):
    out = np.full(len(f), np.inf)
    for i in range(len(f)):
        a, b = lo[i], min(hi[i], len(g))
        if a <= b:
            out[i] = np.min(np.abs(f[i] - g[a - 1 : b]))
    return out


def min_relative_gaps(F, G, eps: float) -> np.ndarray:
    """Per-degree minimal delta for the F-to-G direction at degree slack eps.

    Entry d-1 is NaN where F(d) = 0 (outside the quantified domain).
    """
    f, g = _values(F), _values(G)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = _abs_gaps(f, g, eps) / f
    rel[f == 0] = np.nan
    return rel


def _max_gap(f, g, eps) -> float:
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = _abs_gaps(f, g, eps) / f
    rel = rel[f > 0]
    return float(rel.max()) if rel.size else 0.0


def _close(f, g, eps, delta) -> bool:
    lim = delta + _CMP_SLACK * max(1.0, delta)
    return _max_gap(f, g, eps) <= lim and _max_gap(g, f, eps) <= lim


def is_close(F, G, eps: float, delta: float) -> bool:
    ClosenessParams(eps, delta)
    return _close(_values(F), _values(G), eps, delta)


def rh_distance(F, G, tolerance: float = 1e-4, profile_eps: float | None = None) -> RhReport:
    """Bisection for the smallest eps with (eps, eps)-closeness.

    The returned ``distance`` is a verified close point and ``lower`` a verified
    far point (or 0 when the ccdhs are identical up to the comparison slack),
    with ``distance - lower <= tolerance``.
    """
    if not tolerance > 0:
        raise ValueError("tolerance must be positive")
    f, g = _values(F), _values(G)
    rep = None
    if _close(f, g, 0.0, 0.0):
        rep = RhReport(0.0, tolerance, 0.0)
    else:
        lo, hi = 0.0, 1.0
        while not _close(f, g, hi, hi):
            lo, hi = hi, hi * 2.0
        while hi - lo > tolerance:
            mid = 0.5 * (lo + hi)
            if _close(f, g, mid, mid):
                hi = mid
            else:
                lo = mid
        rep = RhReport(hi, tolerance, lo)
    if profile_eps is not None:
        rep.delta_profile = delta_profile(F, G, profile_eps)
    return rep


def delta_profile(F, G, eps: float) -> dict[int, float]:
    """Minimal value slack per degree at fixed degree slack, both directions.

    For a degree in both domains the larger of the two directional gaps is
    kept, so the profile maximum is the smallest delta giving closeness.
    """
    if eps < 0:
        raise ValueError("eps must be non-negative")
    a = min_relative_gaps(F, G, eps)
    b = min_relative_gaps(G, F, eps)
    n = max(len(a), len(b))
    a = np.pad(a, (0, n - len(a)), constant_values=np.nan)
    b = np.pad(b, (0, n - len(b)), constant_values=np.nan)
    both = np.fmax(a, b)
    return {d: float(x) for d, x in enumerate(both, start=1) if not math.isnan(x)}


def ks_statistic(F, G) -> float:
    """Largest gap between the two ccdhs after scaling each by its N(1)."""
    f, g = _values(F), _values(G)
    if f[0] == 0 or g[0] == 0:
        raise ValueError("N(1) must be positive to normalize")
    n = max(len(f), len(g))
    fn = np.pad(f / f[0], (0, n - len(f)))
    gn = np.pad(g / g[0], (0, n - len(g)))
    return float(np.max(np.abs(fn - gn)))
