"""Competing estimators: counter-based heavy hitters, the plain head
estimator, and head + heavy-hitter splices.

Heavy-hitter summaries see the stream as a sequence of endpoint occurrences,
two per edge, so a vertex's frequency is its degree.  Storage is counted in
stored ``(label, count)`` pairs.
"""

from __future__ import annotations

import heapq
from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import _labels as L
from .histogram import Ccdh, DegreeHistogram, TrivialHistogramError, dh_to_ccdh
from .rh import _CMP_SLACK, _abs_gaps, _windows, rh_distance
from .stream import DEFAULT_CHUNK, as_edge_chunks

__all__ = [
    "HeavyHitterSummary",
    "Frequent",
    "LossyCounting",
    "SpaceSaving",
    "HH_KINDS",
    "make_summary",
    "hh_update",
    "head_estimate",
    "scale_head_sample",
    "head_sample",
    "hh_to_tail_ccdh",
    "HybridEstimate",
    "hybrid_estimate",
]


def _endpoints(X, chunk_size=DEFAULT_CHUNK):
    for u, v in as_edge_chunks(X, chunk_size):
        ends = np.empty(2 * len(u), dtype=f"S{max(u.dtype.itemsize, v.dtype.itemsize)}")
        ends[0::2] = u
        ends[1::2] = v
        yield ends.tolist()


class HeavyHitterSummary(BaseEstimator):
    """Common driver; subclasses implement ``_add`` and ``entries``."""

    kind = None

    def __init__(self, capacity=1000):
        self.capacity = capacity

    def _reset(self):
        if int(self.capacity) != self.capacity or self.capacity < 1:
            raise ValueError(f"capacity must be a positive integer, got {self.capacity!r}")
        self.items_processed_ = 0
        self.peak_entries_ = 0
        self._init_state()
        return self

    def _ensure_state(self):
        if not hasattr(self, "items_processed_"):
            self._reset()

    def fit(self, X, y=None):
        self._reset()
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        """Feed the endpoint occurrences of an edge stream."""
        self._ensure_state()
        for items in _endpoints(X):
            self.partial_fit_items(items)
        return self

    def partial_fit_items(self, items):
        self._ensure_state()
        add = self._add
        for w in items:
            add(w)
        return self

    def update(self, w):
        self._ensure_state()
        self._add(L.as_label(w) if not isinstance(w, bytes) else w)

    def estimate(self, w) -> int:
        return self.entries().get(L.as_label(w), (0, 0))[0]

    def storage(self) -> int:
        return len(self.entries())


class Frequent(HeavyHitterSummary):
    """Misra-Gries: at most ``capacity`` counters, decrement-all on overflow.

    Undercounts any item by at most ``items_processed / (capacity + 1)``.
    """

    kind = "frequent"

    def _init_state(self):
        self._counts: dict = {}

    def _add(self, w):
        self.items_processed_ += 1
        c = self._counts
        if w in c:
            c[w] += 1
        elif len(c) < self.capacity:
            c[w] = 1
            if len(c) > self.peak_entries_:
                self.peak_entries_ = len(c)
        else:
            self._counts = {x: k - 1 for x, k in c.items() if k > 1}

    def entries(self):
        self._ensure_state()
        return {x: (k, 0) for x, k in self._counts.items()}


class LossyCounting(HeavyHitterSummary):
    """Manku-Motwani lossy counting with window width ``capacity``.

    Entries carry ``(count, max_error)``; counts undercount by at most
    ``items_processed / capacity``.  The number of entries may exceed
    ``capacity`` (bounded by capacity * log(items / capacity)).
    """

    kind = "lossy_counting"

    def _init_state(self):
        self._counts: dict = {}
        self._delta: dict = {}
        self._bucket = 1

    def _add(self, w):
        self.items_processed_ += 1
        c = self._counts
        if w in c:
            c[w] += 1
        else:
            c[w] = 1
            self._delta[w] = self._bucket - 1
            if len(c) > self.peak_entries_:
                self.peak_entries_ = len(c)
        if self.items_processed_ % self.capacity == 0:
            b, dl = self._bucket, self._delta
            for x in [x for x, k in c.items() if k + dl[x] <= b]:
                del c[x]
                del dl[x]
            self._bucket += 1

    def entries(self):
        self._ensure_state()
        return {x: (k, self._delta[x]) for x, k in self._counts.items()}


class SpaceSaving(HeavyHitterSummary):
    """Metwally et al. space saving with ``capacity`` counters.

    The stored counts always sum to ``items_processed`` and never undercount.
    A newcomer takes over a minimum-count entry and inherits its count as error.
    The minimum is found through a lazy heap holding one entry per tracked
    item; entries go stale as counts grow and are refreshed when they surface.
    """

    kind = "space_saving"

    def _init_state(self):
        self._counts: dict = {}
        self._err: dict = {}
        self._heap: list = []
        self._seq = 0

    def _add(self, w):
        self.items_processed_ += 1
        c = self._counts
        if w in c:
            c[w] += 1
            return
        self._seq += 1
        if len(c) < self.capacity:
            c[w] = 1
            self._err[w] = 0
            heapq.heappush(self._heap, (1, self._seq, w))
            if len(c) > self.peak_entries_:
                self.peak_entries_ = len(c)
            return
        heap = self._heap
        while True:
            k, _, victim = heap[0]
            now = c[victim]
            if now == k:
                break
            heapq.heapreplace(heap, (now, self._seq, victim))
            self._seq += 1
        del c[victim]
        del self._err[victim]
        c[w] = k + 1
        self._err[w] = k
        heapq.heapreplace(heap, (k + 1, self._seq, w))

    def entries(self):
        self._ensure_state()
        return {x: (k, self._err[x]) for x, k in self._counts.items()}


HH_KINDS = {cls.kind: cls for cls in (Frequent, LossyCounting, SpaceSaving)}
_ALIASES = {"lossy": "lossy_counting", "spacesaving": "space_saving", "space-saving": "space_saving"}


def make_summary(kind: str, capacity: int) -> HeavyHitterSummary:
    kind = _ALIASES.get(kind, kind)
    if kind not in HH_KINDS:
        raise ValueError(f"unknown heavy-hitter kind {kind!r}")
    return HH_KINDS[kind](capacity=capacity)._reset()


def hh_update(summary: HeavyHitterSummary, w) -> None:
    summary.update(w)


def hh_to_tail_ccdh(summary: HeavyHitterSummary) -> Ccdh:
    """Unscaled ccdh that treats every tracked count as a vertex degree."""
    degrees = [k for k, _ in summary.entries().values() if k > 0]
    if not degrees:
        raise TrivialHistogramError("ccdh")
    return dh_to_ccdh(DegreeHistogram.from_degrees(degrees))


def head_sample(stream, p_h: float, seed: int = 0) -> dict[bytes, int]:
    """The head set alone: vertices with seeded hash below p_h, exact degrees.

    Uses the same hash and seed derivation as the full sketch, so for equal
    seeds the two head sets coincide.
    """
    if not 0.0 < p_h <= 1.0:
        raise ValueError("p_h must lie in (0, 1]")
    key = L.seed_key(seed, L.HEAD_SALT)
    counts: Counter = Counter()
    for u, v in as_edge_chunks(stream):
        ends = np.concatenate([u, v])
        keep = ends[L.unit_np(L.label_hash_np(ends, key)) < p_h]
        counts.update(keep.tolist())
    return dict(counts)


def head_estimate(stream, p_h: float, seed: int = 0) -> Ccdh:
    """Scaled head-sample ccdh over all degrees, with no switch to the tail."""
    return scale_head_sample(head_sample(stream, p_h, seed), p_h)


def scale_head_sample(sample: dict, p_h: float) -> Ccdh:
    c = Counter(sample.values())
    if not c:
        return Ccdh([])
    n = np.zeros(max(c))
    for r, k in c.items():
        n[r - 1] = k
    return Ccdh(np.cumsum(n[::-1])[::-1] / p_h)


# splicing -------------------------------------------------------------------

@dataclass
class HybridEstimate:
    nhat: Ccdh
    d_thr: int
    rh: float
    head_storage: int = 0
    hh_storage: int = 0


def _splice(head: np.ndarray, tail: np.ndarray, d_thr: int) -> np.ndarray:
    n = max(len(head), len(tail), d_thr)
    h = np.pad(head, (0, n - len(head)))
    t = np.pad(tail, (0, n - len(tail)))
    return np.concatenate([h[:d_thr], t[d_thr:]])


def _band_ranges(vals: np.ndarray, target: np.ndarray, eps: float):
    """For non-increasing ``vals`` (degree j at index j-1, 0 beyond the end),
    the inclusive degree range whose values lie in target * [1-eps, 1+eps]."""
    slack = _CMP_SLACK * max(1.0, eps)
    upper = target * (1 + eps + slack)
    lower = target * (1 - eps - slack)
    neg = -vals
    first = 1 + np.searchsorted(neg, -upper, side="left")   # first j with vals <= upper
    last = np.searchsorted(neg, -lower, side="right")       # last j with vals >= lower
    # past the end the value is 0, which is in the band whenever lower <= 0
    last = np.where(lower <= 0, np.iinfo(np.int64).max, last)
    return first, last


def _splice_feasible(h: np.ndarray, t: np.ndarray, tv: np.ndarray, eps: float) -> np.ndarray:
    """Boolean over d_thr = 1..d_max: is the splice (eps, eps)-close to the truth?

    Needs monotone head and tail.  A truth point is matched through the head
    iff d_thr reaches the first matching head degree in its window, and
    through the tail iff d_thr lies below the last matching tail degree, so
    each truth point rules out one interval of thresholds.
    """
    d_max = max(len(h), len(t))
    lim = eps + _CMP_SLACK * max(1.0, eps)
    bad = np.zeros(d_max + 2, dtype=np.int64)

    # splice points against the truth: head points 1..d_thr, tail points d_thr+1..
    with np.errstate(divide="ignore", invalid="ignore"):
        bh = (_abs_gaps(h, tv, eps) > lim * h) & (h > 0)
        bt = (_abs_gaps(t, tv, eps) > lim * t) & (t > 0)
    bh = np.pad(bh, (0, d_max - len(bh)))
    bt = np.pad(bt, (0, d_max - len(bt)))
    head_bad = np.cumsum(bh) > 0                         # index k-1: any bad in 1..k
    tail_bad = np.append(np.cumsum(bt[::-1])[::-1] > 0, False)  # index k: any bad in k+1..

    # truth points against the splice
    lo, hi = _windows(len(tv), eps)
    hf, hl = _band_ranges(h, tv, eps)
    tf, tl = _band_ranges(t, tv, eps)
    jh = np.maximum(lo, hf)
    jh = np.where(jh <= np.minimum(hi, hl), jh, d_max + 1)   # first head match, else never
    jt = np.minimum(hi, tl)
    jt = np.where(jt >= np.maximum(lo, tf), jt, 0)           # last tail match, else none
    a = np.clip(jt, 0, d_max + 1)
    b = np.clip(jh - 1, -1, d_max)
    keep = a <= b
    np.add.at(bad, a[keep], 1)
    np.add.at(bad, b[keep] + 1, -1)
    truth_bad = np.cumsum(bad)[1 : d_max + 1] > 0

    k = np.arange(1, d_max + 1)
    return ~(head_bad[k - 1] | tail_bad[k] | truth_bad)


def _hybrid_scan(h, t, truth, tolerance):
    """Exhaustive per-threshold RH; used when inputs are not monotone."""
    best = None
    for d_thr in range(1, max(len(h), len(t)) + 1):
        vals = _splice(h, t, d_thr)
        if not vals.any():
            continue
        dist = rh_distance(Ccdh(vals), truth, tolerance).distance
        if best is None or dist < best[1]:
            best = (d_thr, dist)
    return best[0]


def hybrid_estimate(head: Ccdh, tail: Ccdh, truth: Ccdh, tolerance: float = 1e-4,
                    head_storage: int = 0, hh_storage: int = 0) -> HybridEstimate:
    """Best splice of head (d <= d_thr) and tail (d > d_thr) against the truth.

    Evaluation device only: it looks at the true ccdh.  Every d_thr in
    1..d_max is considered.  For monotone inputs all thresholds are tested at
    once per eps and eps is bisected; otherwise each splice is scored in turn.
    """
    h, t = head.require_nontrivial().values, tail.require_nontrivial().values
    tv = truth.require_nontrivial().values
    if head.is_monotone() and tail.is_monotone():
        lo, hi = 0.0, 1.0
        ok = _splice_feasible(h, t, tv, 0.0)
        if ok.any():
            hi = 0.0
        else:
            while not (ok := _splice_feasible(h, t, tv, hi)).any():
                lo, hi = hi, 2.0 * hi
            while hi - lo > tolerance / 2:
                mid = 0.5 * (lo + hi)
                got = _splice_feasible(h, t, tv, mid)
                if got.any():
                    hi, ok = mid, got
                else:
                    lo = mid
        d_thr = int(np.flatnonzero(ok)[0]) + 1
    else:
        d_thr = _hybrid_scan(h, t, truth, tolerance)
    vals = _splice(h, t, d_thr)
    dist = rh_distance(Ccdh(vals), truth, tolerance).distance
    return HybridEstimate(Ccdh(vals), d_thr, dist, head_storage, hh_storage)
