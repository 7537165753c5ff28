"""Slow, independent reference computations used by the tests."""

import math
from collections import Counter

import mpmath


def tg_pdf_ref(p, s, k):
    return p * (1 - p) ** k / (1 - (1 - p) ** s)


def loss_ref(p, r):
    """Ceiling of the truncated-geometric mean by direct summation."""
    return loss_ref_table(p, [r])[r]


def loss_ref_table(p, rs, dps=60):
    """Ceiling of sum_k k * pdf(k) for every r in ``rs``, summed at high precision.

    The numerator sum over k < r is grown one term at a time, so a whole range
    of r costs one pass; the float value of ``p`` is taken exactly.
    """
    want = set(rs)
    out = {}
    with mpmath.workdps(dps):
        pm = mpmath.mpf(p)
        q = 1 - pm
        num, qk = mpmath.mpf(0), mpmath.mpf(1)
        for r in range(1, max(want) + 1):
            # num = sum_{k<r} k p q^k, qk = q^r after the update
            num += (r - 1) * pm * qk
            qk *= q
            if r in want:
                mean = num / (1 - qk) if qk != 1 else mpmath.mpf(0)
                out[r] = int(mpmath.ceil(mean))
    return out


def ccdh_ref(degrees):
    """N(d) for d = 1..max as a plain list."""
    degrees = [d for d in degrees if d > 0]
    top = max(degrees, default=0)
    return [sum(1 for x in degrees if x >= d) for d in range(1, top + 1)]


def degrees_ref(edges):
    c = Counter()
    for u, v in edges:
        c[u] += 1
        c[v] += 1
    return c


def _directed(F, G):
    worst = 0.0
    top = max(len(F), len(G)) + 1
    for d in range(1, len(F) + 1):
        f = F[d - 1]
        if f <= 0:
            continue
        best = math.inf
        for e in range(1, top + 1):
            g = G[e - 1] if e <= len(G) else 0.0
            best = min(best, max(abs(e - d) / d, abs(f - g) / f))
        worst = max(worst, best)
    return worst


def rh_ref(F, G):
    """RH distance as a max-min over degree pairs.

    At a single eps, the point (d, F(d)) is matched by d' iff both the relative
    degree gap and the relative value gap are at most eps, so the smallest
    admissible eps is the worst point's best partner.
    """
    F, G = list(map(float, F)), list(map(float, G))
    return max(_directed(F, G), _directed(G, F))


def ks_ref(F, G):
    n = max(len(F), len(G))
    f = [F[i] / F[0] if i < len(F) else 0.0 for i in range(n)]
    g = [G[i] / G[0] if i < len(G) else 0.0 for i in range(n)]
    return max(abs(a - b) for a, b in zip(f, g))
