"""Edge streams: parsing, replayable re-orderings and synthetic generators.

Edges are unordered pairs of byte-token labels.  An :class:`EdgeStream` yields
them either one at a time or as chunks of two aligned numpy ``S`` arrays,
which is what the vectorized sketch path consumes.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from itertools import islice
from pathlib import Path

import numpy as np

from ._labels import as_label, as_label_array

__all__ = [
    "EdgeListParseError",
    "EdgeStream",
    "ORDERINGS",
    "SyntheticSpec",
    "parse_edgelist",
    "reorder",
    "generate",
    "havel_hakimi",
    "as_edge_chunks",
    "write_edgelist",
]

ORDERINGS = (
    "as_is",
    "random",
    "edgelist_degree_desc",
    "edgelist_degree_asc",
    "edgelist_random",
)

DEFAULT_CHUNK = 1 << 18


class EdgeListParseError(ValueError):
    def __init__(self, lineno: int, line: str, source: str = "<input>"):
        self.lineno = lineno
        super().__init__(f"{source}:{lineno}: expected two vertex tokens, got {line!r}")


def _parse_lines(lines, source):
    """Yield ``(u, v)`` byte pairs from edge-list lines."""
    for lineno, line in enumerate(lines, start=1):
        parts = line.split()
        if len(parts) >= 2:
            if parts[0].startswith(b"#"):
                continue
            yield parts[0], parts[1]
        elif parts and not parts[0].startswith(b"#"):
            raise EdgeListParseError(lineno, line.decode("utf-8", "replace").rstrip(), source)


@dataclass
class EdgeStream:
    """A replayable edge sequence backed by a file or by in-memory arrays.

    File-backed streams are read front to back on every pass, one chunk at a
    time.  ``source='-'`` reads standard input and can be consumed only once.
    """

    source: str | Path | None = None
    u: np.ndarray | None = field(default=None, repr=False)
    v: np.ndarray | None = field(default=None, repr=False)
    ordering: str = "as_is"
    seed: int | None = None

    def __post_init__(self):
        if (self.source is None) == (self.u is None):
            raise ValueError("give exactly one of a file source or in-memory arrays")
        if self.u is not None:
            self.u = as_label_array(self.u)
            self.v = as_label_array(self.v)
            if self.u.shape != self.v.shape or self.u.ndim != 1:
                raise ValueError("endpoint arrays must be 1-d and aligned")

    @classmethod
    def from_edges(cls, edges, **kw) -> "EdgeStream":
        edges = list(edges)
        u = np.array([as_label(a) for a, _ in edges], dtype="S") if edges else np.array([], dtype="S1")
        v = np.array([as_label(b) for _, b in edges], dtype="S") if edges else np.array([], dtype="S1")
        return cls(u=u, v=v, **kw)

    @property
    def in_memory(self) -> bool:
        return self.u is not None

    def __len__(self):
        if not self.in_memory:
            raise TypeError("length of a file-backed stream is unknown before reading it")
        return len(self.u)

    def _open(self):
        if str(self.source) == "-":
            return sys.stdin.buffer, False
        return open(self.source, "rb"), True

    def iter_chunks(self, chunk_size: int = DEFAULT_CHUNK):
        if self.in_memory:
            for i in range(0, len(self.u), chunk_size):
                yield self.u[i : i + chunk_size], self.v[i : i + chunk_size]
            return
        fh, close = self._open()
        try:
            pairs = _parse_lines(fh, str(self.source))
            while True:
                block = list(islice(pairs, chunk_size))
                if not block:
                    break
                us, vs = zip(*block)
                yield np.array(us, dtype="S"), np.array(vs, dtype="S")
        finally:
            if close:
                fh.close()

    def __iter__(self):
        for u, v in self.iter_chunks():
            yield from zip(u.tolist(), v.tolist())

    def materialize(self) -> "EdgeStream":
        if self.in_memory:
            return self
        chunks = list(self.iter_chunks())
        if not chunks:
            return EdgeStream(u=np.array([], dtype="S1"), v=np.array([], dtype="S1"))
        return EdgeStream(
            u=np.concatenate([c[0] for c in chunks]),
            v=np.concatenate([c[1] for c in chunks]),
        )

    def edge_multiset(self) -> list[tuple[bytes, bytes]]:
        """Sorted list of edges with endpoints sorted, for permutation checks."""
        return sorted(tuple(sorted(e)) for e in self)


def parse_edgelist(path) -> EdgeStream:
    """Lazy stream over a whitespace edge list; '#' lines are comments.

    Extra columns after the two endpoints (timestamps, weights) are ignored.
    Direction is dropped: every line becomes one unordered edge.
    """
    if str(path) != "-" and not Path(path).is_file():
        raise FileNotFoundError(f"no such edge list: {path}")
    return EdgeStream(source=path)


def write_edgelist(stream, fh) -> None:
    for u, v in as_edge_chunks(stream):
        for a, b in zip(u.tolist(), v.tolist()):
            fh.write(a + b" " + b + b"\n")


def as_edge_chunks(X, chunk_size: int = DEFAULT_CHUNK):
    """Validate edge input and yield aligned ``(u, v)`` label arrays.

    Accepts an :class:`EdgeStream`, an ``(m, 2)`` array, or an iterable of pairs.
    """
    if isinstance(X, EdgeStream):
        yield from X.iter_chunks(chunk_size)
        return
    if isinstance(X, np.ndarray):
        if X.ndim != 2 or X.shape[1] != 2:
            raise ValueError(f"edge array must have shape (m, 2), got {X.shape}")
        for i in range(0, len(X), chunk_size):
            block = X[i : i + chunk_size]
            yield as_label_array(block[:, 0]), as_label_array(block[:, 1])
        return
    it = iter(X)
    while True:
        block = list(islice(it, chunk_size))
        if not block:
            return
        for e in block:
            if len(e) != 2:
                raise ValueError(f"edges must be pairs, got {e!r}")
        yield (
            np.array([as_label(a) for a, _ in block], dtype="S"),
            np.array([as_label(b) for _, b in block], dtype="S"),
        )


# orderings ---------------------------------------------------------------

def reorder(stream: EdgeStream, ordering: str = "as_is", seed: int | None = None) -> EdgeStream:
    """Return the same edge multiset in another order.

    Materializes the stream; this is a test-harness facility.  Edgelist
    orderings emit each edge once, in the block of whichever endpoint comes
    first in the node order.  Degree ties are broken by label.
    """
    if ordering not in ORDERINGS:
        raise ValueError(f"unknown ordering {ordering!r}; choose from {ORDERINGS}")
    s = stream.materialize()
    u, v = s.u, s.v
    m = len(u)
    if ordering == "as_is":
        perm = np.arange(m)
    elif ordering == "random":
        perm = np.random.default_rng(seed).permutation(m)
    else:
        labels, inv = np.unique(np.concatenate([u, v]), return_inverse=True)
        deg = np.bincount(inv, minlength=len(labels))
        # np.unique sorts labels, so index order is label order
        idx = np.arange(len(labels))
        if ordering == "edgelist_degree_desc":
            node_order = np.lexsort((idx, -deg))
        elif ordering == "edgelist_degree_asc":
            node_order = np.lexsort((idx, deg))
        else:
            node_order = np.random.default_rng(seed).permutation(len(labels))
        rank = np.empty(len(labels), dtype=np.int64)
        rank[node_order] = np.arange(len(labels))
        owner = np.minimum(rank[inv[:m]], rank[inv[m:]])
        perm = np.argsort(owner, kind="stable")
    return EdgeStream(u=u[perm], v=v[perm], ordering=ordering, seed=seed)


# generators --------------------------------------------------------------

@dataclass(frozen=True)
class SyntheticSpec:
    """``family`` is one of clique, star, matching, chung_lu.

    clique uses ``n``; star and matching use ``edges``; chung_lu uses ``n``,
    ``exponent``, ``avg_degree`` and ``seed``.
    """

    family: str
    n: int | None = None
    edges: int | None = None
    exponent: float = 2.5
    avg_degree: float = 20.0
    seed: int = 0


def _int_stream(u, v) -> EdgeStream:
    return EdgeStream(u=np.asarray(u, dtype=np.int64), v=np.asarray(v, dtype=np.int64))


def generate(spec: SyntheticSpec) -> EdgeStream:
    fam = spec.family
    if fam == "clique":
        if spec.n is None or spec.n < 2:
            raise ValueError("clique needs n >= 2")
        u, v = np.triu_indices(spec.n, k=1)
        return _int_stream(u, v)
    if fam == "star":
        if spec.edges is None or spec.edges < 1:
            raise ValueError("star needs edges >= 1")
        return _int_stream(np.zeros(spec.edges, dtype=np.int64), np.arange(1, spec.edges + 1))
    if fam == "matching":
        if spec.edges is None or spec.edges < 1:
            raise ValueError("matching needs edges >= 1")
        k = np.arange(spec.edges)
        return _int_stream(2 * k, 2 * k + 1)
    if fam == "chung_lu":
        return _chung_lu(spec)
    raise ValueError(f"unknown family {fam!r}")


def _chung_lu(spec: SyntheticSpec) -> EdgeStream:
    """Chung-Lu graph with power-law expected degrees, by edge sampling.

    Draws Poisson(W/2) endpoint pairs with probability proportional to the
    weights, then drops self-loops and repeated pairs so the graph is simple.
    The edge order is a seeded shuffle.
    """
    n, gamma, avg = spec.n, spec.exponent, spec.avg_degree
    if n is None or n < 2 or gamma <= 1 or avg <= 0:
        raise ValueError("chung_lu needs n >= 2, exponent > 1, avg_degree > 0")
    rng = np.random.default_rng(spec.seed)
    w = np.arange(1, n + 1, dtype=float) ** (-1.0 / (gamma - 1.0))
    w *= avg * n / w.sum()
    m = rng.poisson(w.sum() / 2.0)
    cdf = np.cumsum(w)
    cdf /= cdf[-1]
    a = np.searchsorted(cdf, rng.random(m), side="right")
    b = np.searchsorted(cdf, rng.random(m), side="right")
    keep = a != b
    lo, hi = np.minimum(a[keep], b[keep]), np.maximum(a[keep], b[keep])
    key = np.unique(lo.astype(np.int64) * n + hi)
    key = key[rng.permutation(len(key))]
    return _int_stream(key // n, key % n)


def havel_hakimi(degrees) -> EdgeStream:
    """Deterministic simple graph realizing a graphical degree sequence."""
    degrees = [int(d) for d in degrees]
    if sum(degrees) % 2:
        raise ValueError("degree sum must be even")
    remaining = sorted(((d, i) for i, d in enumerate(degrees) if d > 0), reverse=True)
    us, vs = [], []
    while remaining:
        d, i = remaining.pop(0)
        if d > len(remaining):
            raise ValueError("degree sequence is not graphical")
        for j in range(d):
            dj, k = remaining[j]
            us.append(i)
            vs.append(k)
            remaining[j] = (dj - 1, k)
        remaining = sorted(((dj, k) for dj, k in remaining if dj > 0), reverse=True)
    return _int_stream(us, vs)
