import sys
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from headtail import _labels as L
from headtail.histogram import dh_to_ccdh, exact_dh
from headtail.sketch import (
    EstimateConfig,
    HeadTailSketch,
    ThresholdWarning,
    corrected_tail_counts,
    estimate,
    observed_counts,
    sketch_new,
    storage,
    update,
)
from headtail.stream import EdgeStream, SyntheticSpec, generate, reorder
from headtail.tgmath import loss_correction
from oracles import degrees_ref

edge_lists = st.lists(st.tuples(st.integers(0, 40), st.integers(0, 40)), min_size=1, max_size=120)


def reference_sketch(edges, p_h, p_t, seed):
    """Direct transcription of the two samplers, one endpoint at a time."""
    hk, tk = L.seed_key(seed, L.HEAD_SALT), L.seed_key(seed, L.TAIL_SALT)
    head, tail = {}, {}
    pos = 0
    for u, v in edges:
        for w in (L.as_label(u), L.as_label(v)):
            if w in head:
                head[w] += 1
            elif L.unit(L.label_hash(w, hk)) < p_h:
                head[w] = 1
            if w in tail:
                tail[w] += 1
            elif L.coin(tk, pos) < p_t:
                tail[w] = 1
            pos += 1
    return head, tail


@settings(max_examples=80, deadline=None)
@given(edge_lists, st.floats(0.05, 1.0), st.floats(0.05, 1.0), st.integers(0, 2**32),
       st.integers(1, 9))
def test_chunked_matches_reference(edges, p_h, p_t, seed, chunk):
    head, tail = reference_sketch(edges, p_h, p_t, seed)
    sk = HeadTailSketch(p_h=p_h, p_t=p_t, seed=seed, chunk_size=chunk).fit(edges)
    assert sk.head_counts_ == head
    assert sk.tail_counts_ == tail
    one = HeadTailSketch(p_h=p_h, p_t=p_t, seed=seed)
    for u, v in edges:
        one.update(u, v)
    assert one.head_counts_ == head and one.tail_counts_ == tail


def test_partial_fit_resumes():
    g = generate(SyntheticSpec("chung_lu", n=3000, seed=5))
    edges = list(g)
    whole = HeadTailSketch(0.1, 0.1, seed=4).fit(g)
    part = HeadTailSketch(0.1, 0.1, seed=4)
    part.partial_fit(edges[:1234]).partial_fit(edges[1234:])
    assert part.head_counts_ == whole.head_counts_
    assert part.tail_counts_ == whole.tail_counts_
    assert part.n_edges_ == whole.n_edges_ == len(edges)


def test_head_counts_are_exact_degrees_and_order_free():
    g = generate(SyntheticSpec("chung_lu", n=5000, seed=6))
    deg = degrees_ref(list(g))
    key = L.seed_key(11, L.HEAD_SALT)
    expect = {w: d for w, d in deg.items() if L.unit(L.label_hash(w, key)) < 0.2}
    for ordering in ("as_is", "random", "edgelist_degree_desc"):
        sk = HeadTailSketch(0.2, 0.05, seed=11).fit(reorder(g, ordering, seed=3))
        assert sk.head_counts_ == expect


def test_tail_counts_bounded_by_degree():
    g = generate(SyntheticSpec("chung_lu", n=5000, seed=7))
    deg = degrees_ref(list(g))
    sk = HeadTailSketch(0.01, 0.05, seed=2).fit(g)
    assert all(1 <= c <= deg[w] for w, c in sk.tail_counts_.items())


@pytest.mark.parametrize("family,kw", [("clique", {"n": 50}), ("star", {"edges": 99}),
                                       ("matching", {"edges": 100}),
                                       ("chung_lu", {"n": 10_000, "seed": 3})])
def test_exact_regime(family, kw):
    g = generate(SyntheticSpec(family, **kw))
    truth = dh_to_ccdh(exact_dh(g))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdWarning)
        res = HeadTailSketch(1.0, 1.0).fit(g).estimate()
    assert res.nhat == truth


def test_four_clique_doc_example():
    res = HeadTailSketch(1.0, 1.0, threshold_constant=0.5).fit(
        generate(SyntheticSpec("clique", n=4))).estimate()
    assert res.nhat.values.tolist() == [4.0, 4.0, 4.0] and res.d_thr == 3


def test_threshold_rule():
    # head sample: 60 vertices of degree 1 and 5 of degree 3, p_h = 1
    edges = [(f"a{i}", f"b{i}") for i in range(30)]
    edges += [("x", "y"), ("y", "z"), ("z", "x"), ("x", "w"), ("w", "v"), ("v", "y"),
              ("z", "w"), ("v", "x")]
    sk = HeadTailSketch(1.0, 1.0, threshold_constant=3).fit(edges)
    res = sk.estimate()
    deg = degrees_ref(edges)
    mass = [sum(1 for d in deg.values() if d >= k) for k in range(1, max(deg.values()) + 1)]
    assert res.d_thr == sum(1 for m in mass if m >= 3)
    assert res.nhat.values.tolist() == [float(m) for m in mass]


def test_threshold_warning_when_head_is_thin():
    g = generate(SyntheticSpec("star", edges=30))
    with pytest.warns(ThresholdWarning):
        res = HeadTailSketch(1.0, 1.0, threshold_constant=1000).fit(g).estimate()
    assert res.d_thr == 0
    assert res.nhat == dh_to_ccdh(exact_dh(g))


def test_estimate_components():
    g = generate(SyntheticSpec("chung_lu", n=20_000, seed=8))
    sk = HeadTailSketch(0.05, 0.05, seed=1).fit(g)
    res = sk.estimate()
    obs = sk.observed_counts()
    assert obs.head == {r: k for r, k in obs.head.items()}
    n_h = sum(obs.head.values())
    assert res.head_ccdh()[0] == pytest.approx(n_h / 0.05)
    rs = np.arange(1, len(res.g_t) + 1)
    assert np.allclose(res.g_t * (1 - 0.95 ** rs), res.c_t_tilde)
    d = res.d_thr
    assert res.nhat(d) == pytest.approx(res.head_ccdh()[d - 1])
    assert res.nhat(d + 1) == pytest.approx(res.tail_ccdh()[d])
    assert res.storage_used == sum(sk.storage())
    assert sk.predict([1, d, 10**9]).tolist() == [res.nhat(1), res.nhat(d), 0.0]
    with pytest.raises(ValueError):
        sk.predict([0])


def test_monotone_clamp_option():
    g = generate(SyntheticSpec("chung_lu", n=20_000, seed=8))
    sk = HeadTailSketch(0.02, 0.02, seed=5).fit(g)
    raw = sk.estimate().nhat
    clamped = sk.estimate(EstimateConfig(monotone_clamp=True)).nhat
    assert clamped.is_monotone()
    assert np.all(clamped.values >= raw.values[: clamped.d_max])


def test_corrected_tail_counts_shift_vs_literal():
    p = 0.2
    ell = [loss_correction(p, r) for r in range(1, 30)]
    c_t = {1: 7, 2: 5, 3: 4, 6: 1}
    lit = corrected_tail_counts(c_t, p, 25, tail_read="literal")
    sh = corrected_tail_counts(c_t, p, 25, tail_read="shift")
    for r in range(1, 26):
        src = r - ell[r - 1]
        assert lit[r - 1] == c_t.get(src, 0)
        last = ell[r] == ell[r - 1]
        assert sh[r - 1] == (c_t.get(src, 0) if last else 0)
    # every observed bucket is read exactly once under the shift read
    assert sh.sum() == sum(c_t.values())
    with pytest.raises(ValueError):
        corrected_tail_counts(c_t, p, tail_read="sideways")


def test_corrected_tail_counts_identity_at_full_rate():
    c_t = {1: 3, 4: 2}
    got = corrected_tail_counts(c_t, 1.0)
    assert got[:4].tolist() == [3, 0, 0, 2] and not got[4:].any()


def test_estimate_config_validation():
    with pytest.raises(ValueError):
        EstimateConfig(threshold_constant=0)
    with pytest.raises(ValueError):
        EstimateConfig(rounding="round")
    with pytest.raises(ValueError):
        EstimateConfig(tail_read="x")


@pytest.mark.parametrize("kw", [{"p_h": 0}, {"p_h": 1.5}, {"p_t": -0.1}, {"p_t": "a"}])
def test_invalid_rates(kw):
    with pytest.raises(ValueError):
        HeadTailSketch(**kw).fit([(1, 2)])


def test_sklearn_protocol():
    sk = HeadTailSketch(p_h=0.3, p_t=0.2, seed=9)
    params = sk.get_params()
    assert params["p_h"] == 0.3 and params["seed"] == 9
    c = clone(sk)
    assert c.get_params() == params and not hasattr(c, "head_counts_")
    sk.set_params(p_t=0.5)
    assert sk.p_t == 0.5
    assert sk.fit(np.array([[1, 2], [2, 3]])) is sk


def test_functional_surface():
    sk = sketch_new(1.0, 1.0, seed=0)
    for u, v in [(1, 2), (2, 3), (3, 1)]:
        update(sk, u, v)
    assert storage(sk) == (3, 3)
    assert observed_counts(sk).head == {2: 3}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThresholdWarning)
        assert estimate(sk).nhat.values.tolist() == [3.0, 3.0]


def test_storage_is_bounded_by_the_two_maps():
    g = generate(SyntheticSpec("chung_lu", n=20_000, seed=2))
    sk = HeadTailSketch(0.01, 0.01, seed=1, chunk_size=4096).fit(g)
    h, t = sk.storage()
    assert sk.peak_storage_ == h + t
    # per-entry footprint of the retained maps stays constant-sized
    labels = list(sk.head_counts_) + list(sk.tail_counts_)
    per_entry = (sys.getsizeof(sk.head_counts_) + sys.getsizeof(sk.tail_counts_)
                 + sum(sys.getsizeof(w) for w in labels)) / (h + t)
    assert per_entry < 200
    assert h + t < len(degrees_ref(list(g))) / 4


def test_file_input_read_once(tmp_path, monkeypatch):
    p = tmp_path / "g.txt"
    p.write_text("".join(f"{i} {i + 1}\n" for i in range(100)))
    opened = []
    orig = EdgeStream._open

    def counting(self):
        opened.append(self.source)
        return orig(self)

    monkeypatch.setattr(EdgeStream, "_open", counting)
    from headtail.stream import parse_edgelist
    HeadTailSketch(0.5, 0.5).fit(parse_edgelist(p))
    assert len(opened) == 1
