"""Exact degree histograms and complementary cumulative degree histograms.

A degree histogram (dh) maps degree d to n(d), the number of vertices of that
degree.  The ccdh is N(d) = sum_{r >= d} n(r), kept dense for d = 1..d_max.
Counts are raw, never normalized.
"""

from __future__ import annotations

import io
from collections import Counter
from collections.abc import Iterable, Mapping

import numpy as np

__all__ = [
    "TrivialHistogramError",
    "CcdhParseError",
    "DegreeHistogram",
    "Ccdh",
    "degrees_from_edges",
    "exact_dh",
    "dh_to_ccdh",
    "ccdh_to_dh",
    "monotone_clamp",
    "read_ccdh_tsv",
    "write_ccdh_tsv",
]


class TrivialHistogramError(ValueError):
    """Raised when a histogram has no non-zero point."""

    def __init__(self, what="histogram"):
        super().__init__(f"trivial {what}")


class CcdhParseError(ValueError):
    """Malformed ccdh TSV input."""


class DegreeHistogram(dict):
    """Sparse ``{degree: count}`` mapping; zero counts are never stored."""

    def __init__(self, counts: Mapping[int, int] | Iterable = ()):
        super().__init__()
        for d, c in dict(counts).items():
            d, c = int(d), int(c)
            if d < 1:
                raise ValueError(f"degrees must be positive, got {d}")
            if c < 0:
                raise ValueError(f"negative count {c} at degree {d}")
            if c:
                self[d] = c

    @property
    def n_vertices(self) -> int:
        return sum(self.values())

    @property
    def d_max(self) -> int:
        return max(self) if self else 0

    @classmethod
    def from_degrees(cls, degrees: Iterable[int]) -> "DegreeHistogram":
        return cls(Counter(int(d) for d in degrees))


class Ccdh:
    """Dense N(1..d_max); reads beyond d_max return 0.

    Values are floats because estimates are scaled sample counts.  Trailing
    zeros are trimmed so that ``N(d_max) > 0`` whenever the ccdh is non-trivial.
    Estimates may be non-monotone; ``is_monotone`` reports it, nothing enforces it.
    """

    __slots__ = ("values",)

    def __init__(self, values):
        v = np.array(values, dtype=float).ravel()
        if np.any(~np.isfinite(v)) or np.any(v < 0):
            raise ValueError("ccdh values must be finite and non-negative")
        nz = np.flatnonzero(v)
        self.values = v[: nz[-1] + 1] if nz.size else v[:0]
        self.values.setflags(write=False)

    @property
    def d_max(self) -> int:
        return len(self.values)

    @property
    def is_trivial(self) -> bool:
        return self.d_max == 0

    def __call__(self, d: int) -> float:
        if d < 1:
            raise ValueError("degrees start at 1")
        return float(self.values[d - 1]) if d <= self.d_max else 0.0

    def __len__(self):
        return self.d_max

    def __eq__(self, other):
        if not isinstance(other, Ccdh):
            return NotImplemented
        return np.array_equal(self.values, other.values)

    def __repr__(self):
        head = ", ".join(f"{x:g}" for x in self.values[:6])
        more = ", ..." if self.d_max > 6 else ""
        return f"Ccdh([{head}{more}], d_max={self.d_max})"

    def is_monotone(self) -> bool:
        return bool(np.all(np.diff(self.values) <= 0))

    def require_nontrivial(self) -> "Ccdh":
        if self.is_trivial:
            raise TrivialHistogramError("ccdh")
        return self

    def to_dict(self) -> dict[int, float]:
        return {d: float(x) for d, x in enumerate(self.values, start=1)}


def degrees_from_edges(edges: Iterable[tuple]) -> Counter:
    """Endpoint-occurrence counts; parallel edges count twice, a self-loop adds 2."""
    deg: Counter = Counter()
    for u, v in edges:
        deg[u] += 1
        deg[v] += 1
    return deg


def exact_dh(stream) -> DegreeHistogram:
    """Degree histogram of an edge stream (anything iterable as ``(u, v)`` pairs
    or exposing ``iter_chunks``)."""
    chunks = getattr(stream, "iter_chunks", None)
    if chunks is None:
        deg = degrees_from_edges(stream)
        return DegreeHistogram.from_degrees(deg.values())
    deg: Counter = Counter()
    for u, v in chunks():
        labels, counts = np.unique(np.concatenate([u, v]), return_counts=True)
        deg.update(dict(zip(labels.tolist(), counts.tolist())))
    return DegreeHistogram.from_degrees(deg.values())


def dh_to_ccdh(dh: Mapping[int, int]) -> Ccdh:
    dh = DegreeHistogram(dh)
    if not dh:
        raise TrivialHistogramError()
    n = np.zeros(dh.d_max, dtype=np.int64)
    for d, c in dh.items():
        n[d - 1] = c
    return Ccdh(np.cumsum(n[::-1])[::-1])


def ccdh_to_dh(ccdh: Ccdh) -> DegreeHistogram:
    if not ccdh.is_monotone():
        raise ValueError("ccdh is not monotone non-increasing")
    v = ccdh.values
    n = v - np.append(v[1:], 0.0)
    rounded = np.rint(n)
    if not np.allclose(n, rounded, rtol=0, atol=1e-9):
        raise ValueError("ccdh differences are not integral")
    return DegreeHistogram({d: int(c) for d, c in enumerate(rounded, start=1) if c})


def monotone_clamp(ccdh: Ccdh) -> Ccdh:
    """Running maximum from the right, making the estimate non-increasing."""
    return Ccdh(np.maximum.accumulate(ccdh.values[::-1])[::-1])


def write_ccdh_tsv(ccdh: Ccdh, fh) -> None:
    fh.write("degree\tcount\n")
    for d, x in enumerate(ccdh.values, start=1):
        fh.write(f"{d}\t{x:.17g}\n")


def read_ccdh_tsv(fh) -> Ccdh:
    """Read ``degree<TAB>count`` rows; missing degrees inside the range are 0."""
    if isinstance(fh, (str, bytes)):
        fh = io.StringIO(fh if isinstance(fh, str) else fh.decode())
    rows: dict[int, float] = {}
    for lineno, line in enumerate(fh, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if lineno == 1 and parts[0] == "degree":
            continue
        if len(parts) < 2:
            raise CcdhParseError(f"line {lineno}: expected 'degree<TAB>count'")
        try:
            d, x = int(parts[0]), float(parts[1])
        except ValueError as exc:
            raise CcdhParseError(f"line {lineno}: {exc}") from None
        rows[d] = x
    if not rows:
        return Ccdh([])
    if min(rows) < 1:
        raise CcdhParseError(f"degree {min(rows)} < 1")
    vals = np.zeros(max(rows))
    for d, x in rows.items():
        vals[d - 1] = x
    try:
        return Ccdh(vals)
    except ValueError as exc:
        raise CcdhParseError(str(exc)) from None
