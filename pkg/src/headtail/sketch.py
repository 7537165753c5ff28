"""The head/tail streaming sketch for degree-distribution estimation.

Two samplers share one pass over the edge stream:

* the head set keeps every vertex whose seeded label hash falls below ``p_h``;
  such a vertex is counted from its first occurrence, so its counter is its
  exact degree and the set is independent of stream order;
* the tail set flips a ``p_t`` coin at each occurrence of a vertex it does not
  hold yet, so high-degree vertices are favoured but miss a truncated
  geometric number of their first occurrences.

``estimate`` scales head counts by ``1/p_h`` for the well-sampled low degrees
and, above a data-driven threshold, shifts tail counts by the expected loss
and rescales them by the inclusion probability.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from . import _labels as L
from .histogram import Ccdh, monotone_clamp
from .stream import DEFAULT_CHUNK, as_edge_chunks
from .tgmath import ROUNDING, loss_correction

__all__ = [
    "HeadTailSketch",
    "ObservedCounts",
    "EstimateConfig",
    "EstimateResult",
    "ThresholdWarning",
    "sketch_new",
    "update",
    "observed_counts",
    "estimate",
    "storage",
    "corrected_tail_counts",
]

TAIL_READS = ("shift", "literal")


class ThresholdWarning(UserWarning):
    """The head sample never reaches the threshold mass; the tail is used everywhere."""


def _check_prob(name, p):
    if not isinstance(p, (int, float, np.floating)) or not 0.0 < float(p) <= 1.0:
        raise ValueError(f"{name} must lie in (0, 1], got {p!r}")


@dataclass(frozen=True)
class EstimateConfig:
    """Knobs for :func:`estimate`.

    ``threshold_constant`` is the head-sample mass (in sampled vertices) that
    must lie at or above a degree for the head estimate to be trusted there.
    ``tail_read`` picks how shifted tail buckets are read: ``"shift"`` moves
    each observed count c to the largest r with r - loss(r) = c, so every
    tail vertex is counted once; ``"literal"`` reads C_t(r - loss(r)) for
    every r, counting a bucket twice wherever the loss steps up.
    """

    threshold_constant: float = 50.0
    monotone_clamp: bool = False
    rounding: str = "ceil"
    tail_read: str = "shift"

    def __post_init__(self):
        if not self.threshold_constant > 0:
            raise ValueError("threshold_constant must be positive")
        if self.rounding not in ROUNDING:
            raise ValueError(f"rounding must be one of {ROUNDING}")
        if self.tail_read not in TAIL_READS:
            raise ValueError(f"tail_read must be one of {TAIL_READS}")


@dataclass(frozen=True)
class ObservedCounts:
    head: dict[int, int]
    tail: dict[int, int]


@dataclass
class EstimateResult:
    nhat: Ccdh
    d_thr: int
    g_h: np.ndarray
    g_t: np.ndarray
    c_t_tilde: np.ndarray
    storage_used: int

    def head_ccdh(self) -> np.ndarray:
        return np.cumsum(self.g_h[::-1])[::-1]

    def tail_ccdh(self) -> np.ndarray:
        return np.cumsum(self.g_t[::-1])[::-1]


class HeadTailSketch(BaseEstimator):
    """Small-space estimator of the ccdh of an edge stream.

    Parameters
    ----------
    p_h : float
        Head sampling rate; each vertex enters the head set with this probability.
    p_t : float
        Tail sampling rate, a per-occurrence insertion probability.
    seed : int
        Seeds both the label hash and the counter-based tail coins.
    threshold_constant : float
        Head mass required below the switch-over degree (default 50).
    chunk_size : int
        Edges per vectorized batch in :meth:`partial_fit`.

    Examples
    --------
    >>> from headtail.stream import SyntheticSpec, generate
    >>> sk = HeadTailSketch(p_h=1.0, p_t=1.0, threshold_constant=0.5)
    >>> sk.fit(generate(SyntheticSpec("clique", n=4))).estimate().nhat.values.tolist()
    [4.0, 4.0, 4.0]
    """

    def __init__(self, p_h=0.01, p_t=0.04, seed=0, threshold_constant=50.0,
                 rounding="ceil", tail_read="shift", chunk_size=DEFAULT_CHUNK):
        self.p_h = p_h
        self.p_t = p_t
        self.seed = seed
        self.threshold_constant = threshold_constant
        self.rounding = rounding
        self.tail_read = tail_read
        self.chunk_size = chunk_size

    # -- state ---------------------------------------------------------

    def _reset(self):
        _check_prob("p_h", self.p_h)
        _check_prob("p_t", self.p_t)
        self.head_counts_: dict[bytes, int] = {}
        self.tail_counts_: dict[bytes, int] = {}
        self.n_edges_ = 0
        self.peak_storage_ = 0
        self._head_key = L.seed_key(self.seed, L.HEAD_SALT)
        self._tail_key = L.seed_key(self.seed, L.TAIL_SALT)
        return self

    def _ensure_state(self):
        if not hasattr(self, "head_counts_"):
            self._reset()

    def fit(self, X, y=None):
        """Consume a whole edge stream from scratch."""
        self._reset()
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        """Consume more edges; state carries over between calls."""
        self._ensure_state()
        for u, v in as_edge_chunks(X, self.chunk_size):
            self._consume_chunk(u, v)
        return self

    # -- per-edge update ------------------------------------------------

    def update(self, u, v) -> None:
        """Process one edge, endpoint ``u`` before ``v``."""
        self._ensure_state()
        base = 2 * self.n_edges_
        for slot, w in enumerate((u, v)):
            w = L.as_label(w)
            head = self.head_counts_
            if w in head:
                head[w] += 1
            elif L.unit(L.label_hash(w, self._head_key)) < self.p_h:
                head[w] = 1
            tail = self.tail_counts_
            if w in tail:
                tail[w] += 1
            elif L.coin(self._tail_key, base + slot) < self.p_t:
                tail[w] = 1
        self.n_edges_ += 1
        self._note_storage()

    # -- vectorized update ------------------------------------------------

    def _consume_chunk(self, u: np.ndarray, v: np.ndarray) -> None:
        m = len(u)
        if m == 0:
            return
        width = max(u.dtype.itemsize, v.dtype.itemsize)
        ends = np.empty(2 * m, dtype=f"S{width}")
        ends[0::2] = u
        ends[1::2] = v
        pos = 2 * self.n_edges_ + np.arange(2 * m, dtype=np.int64)

        h = L.label_hash_np(ends, self._head_key)
        uniq_h, first, inv, cnt = np.unique(h, return_index=True, return_inverse=True,
                                            return_counts=True)
        labels = ends[first]
        if not np.array_equal(labels[inv], ends):
            # 64-bit hash collision inside the chunk: fall back to exact keys
            labels, first, inv, cnt = np.unique(ends, return_index=True,
                                                return_inverse=True, return_counts=True)
            uniq_h = h[first]
        names = labels.tolist()
        cnt_l = cnt.tolist()

        head = self.head_counts_
        for i in np.flatnonzero(L.unit_np(uniq_h) < self.p_h).tolist():
            w = names[i]
            head[w] = head.get(w, 0) + cnt_l[i]

        tail = self.tail_counts_
        present = np.fromiter((w in tail for w in names), dtype=bool, count=len(names))
        for i in np.flatnonzero(present).tolist():
            tail[names[i]] += cnt_l[i]
        hits = np.flatnonzero(L.coin_np(self._tail_key, pos) < self.p_t)
        hits = hits[~present[inv[hits]]]
        if hits.size:
            ids, at = np.unique(inv[hits], return_index=True)
            first_hit = hits[at]
            # occurrences of the same vertex earlier in the chunk were missed
            order = np.argsort(inv, kind="stable")
            starts = np.concatenate(([0], np.cumsum(cnt)[:-1]))
            rank = np.empty(2 * m, dtype=np.int64)
            rank[order] = np.arange(2 * m) - starts[inv[order]]
            kept = cnt[ids] - rank[first_hit]
            for i, c in zip(ids.tolist(), kept.tolist()):
                tail[names[i]] = c
        self.n_edges_ += m
        self._note_storage()

    def _note_storage(self):
        # the two maps are the only state that grows with the stream
        self.peak_storage_ = max(self.peak_storage_,
                                 len(self.head_counts_) + len(self.tail_counts_))

    # -- queries ---------------------------------------------------------

    def observed_counts(self) -> ObservedCounts:
        self._ensure_state()
        return ObservedCounts(dict(Counter(self.head_counts_.values())),
                              dict(Counter(self.tail_counts_.values())))

    def storage(self) -> tuple[int, int]:
        self._ensure_state()
        return len(self.head_counts_), len(self.tail_counts_)

    def estimate(self, config: EstimateConfig | None = None) -> EstimateResult:
        if config is None:
            config = EstimateConfig(self.threshold_constant, rounding=self.rounding,
                                    tail_read=self.tail_read)
        self._ensure_state()
        res = _estimate(self.observed_counts(), float(self.p_h), float(self.p_t), config)
        res.storage_used = sum(self.storage())
        self.estimate_ = res
        return res

    def predict(self, degrees):
        """Estimated N(d) at the given degrees (0 beyond the estimate's support)."""
        res = self.estimate()
        d = np.asarray(degrees, dtype=np.int64)
        if np.any(d < 1):
            raise ValueError("degrees start at 1")
        vals = np.append(res.nhat.values, 0.0)
        return vals[np.minimum(d, res.nhat.d_max + 1) - 1]


def corrected_tail_counts(c_t: dict[int, int], p_t: float, r_max: int | None = None,
                          rounding: str = "ceil", tail_read: str = "shift") -> np.ndarray:
    """Loss-shifted tail bucket counts for r = 1..r_max (entry 0 is r = 1)."""
    top = max(c_t, default=0)
    # r - loss(r) never decreases and steps by at most 1, so walk r until the
    # read index passes the largest observed count
    ell = []
    r = 1
    while True:
        ell.append(loss_correction(p_t, r, rounding))
        if r - ell[-1] > top and (r_max is None or r >= r_max):
            break
        r += 1
    ell.append(loss_correction(p_t, r + 1, rounding))
    ell = np.asarray(ell, dtype=np.int64)
    n_r = len(ell) - 1 if r_max is None else r_max
    rs = np.arange(1, n_r + 1)
    src = rs - ell[:n_r]
    bucket = np.zeros(top + 1)
    for c, k in c_t.items():
        bucket[c] = k
    ok = (src >= 1) & (src <= top)
    out = np.zeros(n_r)
    out[ok] = bucket[src[ok]]
    if tail_read == "shift":
        # only the last r of a run sharing one source index reads the bucket
        last = ell[1 : n_r + 1] == ell[:n_r]
        out[~last] = 0.0
    elif tail_read != "literal":
        raise ValueError(f"tail_read must be one of {TAIL_READS}")
    return out


def _estimate(obs: ObservedCounts, p_h: float, p_t: float, config: EstimateConfig) -> EstimateResult:
    r_max = max(max(obs.head, default=0), 1)
    c_tilde = corrected_tail_counts(obs.tail, p_t, None, config.rounding, config.tail_read)
    n = max(r_max, len(c_tilde))
    c_tilde = np.pad(c_tilde, (0, n - len(c_tilde)))

    c_h = np.zeros(n)
    for r, k in obs.head.items():
        c_h[r - 1] = k
    rs = np.arange(1, n + 1)
    g_h = c_h / p_h
    incl = 1.0 if p_t == 1.0 else -np.expm1(rs * np.log1p(-p_t))
    g_t = c_tilde / incl

    # head mass test on integer sample counts: sum C_h >= c  <=>  sum g_h >= c / p_h
    head_mass = np.cumsum(c_h[::-1])[::-1]
    d_thr = int(np.count_nonzero(head_mass >= config.threshold_constant))
    if d_thr == 0:
        warnings.warn("head sample below threshold mass at every degree; "
                      "using the tail estimate throughout", ThresholdWarning, stacklevel=3)
    head_cum = np.cumsum(g_h[::-1])[::-1]
    tail_cum = np.cumsum(g_t[::-1])[::-1]
    nhat = np.where(rs <= d_thr, head_cum, tail_cum)
    est = Ccdh(nhat)
    if config.monotone_clamp:
        est = monotone_clamp(est)
    return EstimateResult(est, d_thr, g_h, g_t, c_tilde, 0)


# functional surface ---------------------------------------------------------

def sketch_new(p_h: float, p_t: float, seed: int = 0) -> HeadTailSketch:
    return HeadTailSketch(p_h=p_h, p_t=p_t, seed=seed)._reset()


def update(sketch: HeadTailSketch, u, v) -> None:
    sketch.update(u, v)


def observed_counts(sketch: HeadTailSketch) -> ObservedCounts:
    return sketch.observed_counts()


def estimate(sketch: HeadTailSketch, config: EstimateConfig | None = None) -> EstimateResult:
    return sketch.estimate(config)


def storage(sketch: HeadTailSketch) -> tuple[int, int]:
    return sketch.storage()
