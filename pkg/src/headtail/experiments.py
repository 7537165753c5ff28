"""Experiment harness: single runs, parameter sweeps, profiles, ordering studies.

Every function here takes an explicit seed and is deterministic given its
inputs.  Ground truth is always computed in its own pass over the stream and
never touches a sketch.
"""

from __future__ import annotations

import csv
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _labels as L
from .baselines import head_estimate
from .histogram import Ccdh, dh_to_ccdh, exact_dh
from .rh import delta_profile, ks_statistic, rh_distance
from .sketch import EstimateConfig, HeadTailSketch
from .stream import EdgeStream, reorder
from .tgmath import TruncGeomParams, reduced_degree, step_cdf_approx, step_min_x, tg_cdf

__all__ = [
    "RunRecord",
    "SweepSpec",
    "OrderingStudy",
    "TABLE_ORDERINGS",
    "cell_seed",
    "exact_ccdh",
    "run_once",
    "sweep",
    "summarize_cells",
    "write_records_csv",
    "write_scatter_tsv",
    "write_lines_tsv",
    "write_profile_tsv",
    "ordering_study",
    "step_plot_rows",
]

RECORD_FIELDS = ("ph", "pt", "run", "seed", "storage", "head_size", "tail_size",
                 "rh_distance", "ks", "d_thr")


@dataclass
class RunRecord:
    ph: float
    pt: float
    seed: int
    storage: int
    rh_distance: float
    ks: float
    d_thr: int
    wall_time_ms: float
    head_size: int = 0
    tail_size: int = 0
    run: int = 0
    nhat: Ccdh | None = field(default=None, repr=False, compare=False)


@dataclass(frozen=True)
class SweepSpec:
    """A grid of (p_h, p_t) cells, each run ``runs_per_cell`` times.

    ``extra_cells`` holds additional ``(p_h, p_t, runs)`` triples outside the grid.
    """

    ph_grid: tuple
    pt_grid: tuple
    runs_per_cell: int = 5
    seed_base: int = 0
    extra_cells: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "ph_grid", tuple(float(p) for p in self.ph_grid))
        object.__setattr__(self, "pt_grid", tuple(float(p) for p in self.pt_grid))
        object.__setattr__(self, "extra_cells",
                           tuple((float(a), float(b), int(r)) for a, b, r in self.extra_cells))
        if not self.ph_grid or not self.pt_grid:
            raise ValueError("grids must be non-empty")
        for p in self.ph_grid + self.pt_grid + tuple(c[k] for c in self.extra_cells for k in (0, 1)):
            if not 0.0 < p <= 1.0:
                raise ValueError(f"probability {p!r} outside (0, 1]")
        if int(self.runs_per_cell) < 1 or any(c[2] < 1 for c in self.extra_cells):
            raise ValueError("runs per cell must be positive")

    @classmethod
    def full_preset(cls, seed_base: int = 0) -> "SweepSpec":
        """p_h from 0.01 to 0.1, p_t from 0.01 to 0.16, five runs each, plus
        ten runs at (0.005, 0.01)."""
        ph = [round(0.01 * i, 2) for i in range(1, 11)]
        pt = [round(0.01 * i, 2) for i in range(1, 17)]
        return cls(ph, pt, 5, seed_base, extra_cells=((0.005, 0.01, 10),))

    def jobs(self):
        """``(ph_index, pt_index, run, ph, pt)`` in report order."""
        for i, ph in enumerate(self.ph_grid):
            for j, pt in enumerate(self.pt_grid):
                for r in range(self.runs_per_cell):
                    yield i, j, r, ph, pt
        base_i, base_j = len(self.ph_grid), len(self.pt_grid)
        for k, (ph, pt, runs) in enumerate(self.extra_cells):
            for r in range(runs):
                yield base_i + k, base_j + k, r, ph, pt


def cell_seed(seed_base: int, ph_index: int, pt_index: int, run: int) -> int:
    """Derived seed for one run of one sweep cell."""
    h = L.mix64(int(seed_base) & L.MASK64)
    for x in (ph_index, pt_index, run):
        h = L.mix64(h ^ ((int(x) + 1) * L.GOLDEN & L.MASK64))
    return h


def exact_ccdh(stream) -> Ccdh:
    """Ground-truth ccdh, from its own full pass over the stream."""
    if isinstance(stream, EdgeStream) and str(stream.source) == "-":
        raise ValueError("standard input cannot be replayed for ground truth; supply a truth ccdh")
    return dh_to_ccdh(exact_dh(stream))


def run_once(stream, ph: float, pt: float, seed: int = 0, config: EstimateConfig | None = None,
             truth: Ccdh | None = None, tolerance: float = 1e-4) -> RunRecord:
    """One sketch pass, one estimate, and its distances to the truth."""
    config = config or EstimateConfig()
    t0 = time.perf_counter()
    sk = HeadTailSketch(p_h=ph, p_t=pt, seed=seed, threshold_constant=config.threshold_constant,
                        rounding=config.rounding, tail_read=config.tail_read).fit(stream)
    res = sk.estimate(config)
    wall = (time.perf_counter() - t0) * 1000.0
    if truth is None:
        truth = exact_ccdh(stream)
    rh = rh_distance(res.nhat, truth, tolerance).distance
    ks = ks_statistic(res.nhat, truth)
    hs, ts = sk.storage()
    return RunRecord(ph=float(ph), pt=float(pt), seed=int(seed), storage=hs + ts,
                     rh_distance=rh, ks=ks, d_thr=res.d_thr, wall_time_ms=wall,
                     head_size=hs, tail_size=ts, nhat=res.nhat)


def _sweep_job(args):
    stream, truth, config, tolerance, (i, j, r, ph, pt), seed_base = args
    rec = run_once(stream, ph, pt, cell_seed(seed_base, i, j, r), config, truth, tolerance)
    rec.run = r
    rec.nhat = None
    return rec


def sweep(stream, spec: SweepSpec, config: EstimateConfig | None = None, truth: Ccdh | None = None,
          tolerance: float = 1e-4, workers: int = 1) -> list[RunRecord]:
    """Run every cell of the grid; records come back in grid order."""
    if truth is None:
        truth = exact_ccdh(stream)
    jobs = [(stream, truth, config, tolerance, job, spec.seed_base) for job in spec.jobs()]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(_sweep_job, jobs))
    return [_sweep_job(j) for j in jobs]


def summarize_cells(records) -> list[dict]:
    """Median storage and median RH per (p_h, p_t), in first-seen order."""
    cells: dict[tuple, list] = {}
    for rec in records:
        cells.setdefault((rec.ph, rec.pt), []).append(rec)
    out = []
    for (ph, pt), recs in cells.items():
        out.append({
            "ph": ph,
            "pt": pt,
            "runs": len(recs),
            "median_storage": float(np.median([r.storage for r in recs])),
            "median_rh": float(np.median([r.rh_distance for r in recs])),
        })
    return out


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_records_csv(records, fh, timing: bool = False) -> None:
    cols = RECORD_FIELDS + (("wall_time_ms",) if timing else ())
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(cols)
    for rec in records:
        w.writerow([_fmt(getattr(rec, c)) for c in cols])


def write_scatter_tsv(records, fh) -> None:
    """One (storage, RH) point per run."""
    fh.write("storage\trh_distance\tph\tpt\n")
    for rec in records:
        fh.write(f"{rec.storage}\t{rec.rh_distance!r}\t{rec.ph!r}\t{rec.pt!r}\n")


def write_lines_tsv(records, fh) -> None:
    """Per-cell medians grouped by p_h, one plotted line per p_h value."""
    fh.write("ph\tpt\tmedian_storage\tmedian_rh\n")
    rows = sorted(summarize_cells(records), key=lambda c: (c["ph"], c["pt"]))
    for c in rows:
        fh.write(f"{c['ph']!r}\t{c['pt']!r}\t{c['median_storage']!r}\t{c['median_rh']!r}\n")


def write_profile_tsv(estimate, truth, fh, eps: float = 0.1) -> dict[int, float]:
    prof = delta_profile(estimate, truth, eps)
    fh.write("degree\tdelta\n")
    for d, x in prof.items():
        fh.write(f"{d}\t{x!r}\n")
    return prof


# ordering study ------------------------------------------------------------

# (row name, ordering, offset added to the ordering seed)
TABLE_ORDERINGS = (
    ("random1", "random", 1),
    ("random2", "random", 2),
    ("random3", "random", 3),
    ("edgelist_degree_desc", "edgelist_degree_desc", 0),
    ("edgelist_degree_asc", "edgelist_degree_asc", 0),
    ("edgelist_random", "edgelist_random", 4),
)


@dataclass
class OrderingStudy:
    rows: list  # (name, rh_distance, storage)
    mean: float
    std: float
    head_invariant: bool

    def to_dict(self) -> dict:
        return {
            "rows": [{"ordering": n, "rh_distance": rh, "storage": s} for n, rh, s in self.rows],
            "mean": self.mean,
            "std": self.std,
            "head_invariant": self.head_invariant,
        }


def ordering_study(stream, ph: float = 0.01, pt: float = 0.04, seed: int = 0, order_seed: int = 0,
                   config: EstimateConfig | None = None, truth: Ccdh | None = None,
                   tolerance: float = 1e-4) -> OrderingStudy:
    """RH of the sketch under the six stream orderings at a fixed sketch seed.

    Also checks that the head-only estimate is the same array under every
    ordering.  ``std`` is the sample standard deviation across orderings.
    """
    base = stream.materialize() if isinstance(stream, EdgeStream) else stream
    if truth is None:
        truth = exact_ccdh(base)
    rows, heads = [], []
    for name, ordering, off in TABLE_ORDERINGS:
        s = reorder(base, ordering, seed=order_seed + off)
        rec = run_once(s, ph, pt, seed, config, truth, tolerance)
        rows.append((name, rec.rh_distance, rec.storage))
        heads.append(head_estimate(s, ph, seed).values)
    rhs = np.array([r[1] for r in rows])
    invariant = all(np.array_equal(heads[0], h) for h in heads[1:])
    return OrderingStudy(rows, float(rhs.mean()), float(rhs.std(ddof=1)), invariant)


# step plot -----------------------------------------------------------------

def step_plot_rows(k: float, pt: float | None = None, x_min: float | None = None,
                   x_max: float | None = None, points: int = 1000) -> list[tuple]:
    """Grid of ``(x, approx[, exact])`` for the tail-cdf coefficient at d = k/p_t.

    ``approx`` is the small-p limit; with ``pt`` given, ``exact`` evaluates the
    truncated-geometric cdf at r = round(x/p_t), or 0 where r is below the
    reduced degree.
    """
    if points < 2:
        raise ValueError("points must be at least 2")
    lo = step_min_x(k) if x_min is None else max(float(x_min), step_min_x(k))
    hi = k + 10.0 if x_max is None else float(x_max)
    if not hi > lo:
        raise ValueError("x-max must exceed the curve's minimum x")
    xs = np.linspace(lo, hi, points)
    rows = []
    red = None
    if pt is not None:
        if not 0.0 < pt <= 1.0:
            raise ValueError("pt must lie in (0, 1]")
        red = reduced_degree(pt, max(1, round(k / pt)))
    for x in xs.tolist():
        row = (x, step_cdf_approx(k, x))
        if red is not None:
            r = max(1, round(x / pt))
            row += (tg_cdf(TruncGeomParams(pt, r), r - red) if r >= red else 0.0,)
        rows.append(row)
    return rows

