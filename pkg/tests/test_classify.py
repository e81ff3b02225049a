import itertools
import random

import pytest

from okgraph.classify import BOUNDED, MINIMAL, NOT_MINIMAL, NOT_SIMPLE, PURELY_INFINITE, \
    SIMPLE_AT, UNBOUNDED, UNKNOWN, check_potential_certificate, check_unbounded_certificate, \
    classify_report, dichotomy, minimality, p_unbounded, replay, valuation
from okgraph.graph import Edge, InfiniteEdgeFamily, build_graph, has_loop, one_vertex_graph

import oracles


def two_vertex():
    return build_graph(["1", "2"], [Edge("a", "1", "1", 2, 1), Edge("b", "1", "2", 6, 3),
                                    Edge("c", "2", "1", 1, 1), Edge("d", "2", "2", 5, 1)])


def all_paths(g, source, target, max_len):
    """Range-leftmost edge lists from source to target, by plain recursion."""
    out = []

    def grow(edges):
        if edges[-1].dom == source:
            out.append(list(edges))
        if len(edges) < max_len:
            for e in g.all_edges():
                if e.ran == edges[-1].dom:
                    grow(edges + [e])

    for e in g.all_edges():
        if e.ran == target:
            grow([e])
    return out


def test_one_vertex_examples():
    v = p_unbounded(one_vertex_graph(2, 3), "v", "v")
    assert v.status == UNBOUNDED
    assert v.certificate["prime"] == 2 and v.certificate["surplus"] == 1
    assert check_unbounded_certificate(one_vertex_graph(2, 3), v)
    assert p_unbounded(one_vertex_graph(2, 4), "v", "v").status == BOUNDED


def test_unknown_vertex_rejected():
    with pytest.raises(KeyError):
        p_unbounded(one_vertex_graph(2, 3), "v", "w")


def test_acyclic_chain_exact_max():
    g = build_graph(["a", "b", "c"], [Edge("x", "a", "b", 2, 1), Edge("y", "b", "c", 3, 2),
                                      Edge("z", "a", "b", 4, 2)])
    v = p_unbounded(g, "a", "c")
    assert v.status == BOUNDED and v.certificate["proof"] == "acyclic"
    brute = [oracles.p_of(p) for p in all_paths(g, "a", "c", 5)]
    assert v.certificate["max_p"] == max(brute)
    assert v.certificate["path_count"] == len(brute)


def test_one_vertex_minimality_is_exact():
    for n in range(1, 7):
        for m in range(-6, 7):
            status = minimality(one_vertex_graph(n, m)).status
            assert status == (MINIMAL if m % n else NOT_MINIMAL), (n, m)


def test_dichotomy_examples():
    assert dichotomy(one_vertex_graph(2, 3)).label == PURELY_INFINITE
    assert dichotomy(one_vertex_graph(2, 3)).kirchberg
    assert dichotomy(one_vertex_graph(2, 4)).label == NOT_SIMPLE
    assert minimality(two_vertex()).status == MINIMAL
    assert dichotomy(two_vertex()).label == PURELY_INFINITE


def test_not_minimal_witnesses():
    chain = build_graph(["1", "2", "3"], [Edge("a", "1", "2", 2, 1), Edge("b", "2", "3", 2, 1)])
    v = minimality(chain)
    assert v.status == NOT_MINIMAL
    assert v.evidence["witness"]["kind"] == "singular_vertex"
    m0 = one_vertex_graph(3, 0)
    assert minimality(m0).evidence["witness"]["kind"] == "regular_not_m"
    assert minimality(one_vertex_graph(2, 4)).evidence["witness"]["kind"] == "cycle"
    lonely = build_graph(["v"])
    assert minimality(lonely).status == NOT_MINIMAL


def test_search_bound_gives_unknown(monkeypatch):
    ring = build_graph(["1", "2", "3", "4"], [Edge("a", "1", "2", 2, 1), Edge("b", "2", "3", 1, 1),
                                              Edge("c", "3", "4", 1, 1), Edge("d", "4", "1", 1, 1)])
    assert p_unbounded(ring, "1", "1", bound=2).status == UNKNOWN
    assert p_unbounded(ring, "1", "1", bound=2).certificate["search_bound"] == 2
    assert minimality(ring, bound=2).status == UNKNOWN
    assert dichotomy(ring, bound=2).label == UNKNOWN
    monkeypatch.setenv("OKGRAPH_SEARCH_BOUND", "3")
    assert minimality(ring).status == UNKNOWN
    monkeypatch.setenv("OKGRAPH_SEARCH_BOUND", "4")
    assert minimality(ring).status == MINIMAL


def test_families_in_classification():
    # vertex 2 receives only a family with m = 0: singular, so not minimal
    g = build_graph(["1", "2"], [Edge("a", "1", "1", 2, 1), Edge("b", "2", "1", 1, 1)],
                    [InfiniteEdgeFamily("1", "2", 1, 0)])
    assert minimality(g).status == NOT_MINIMAL


def random_graphs(seed, count, **kw):
    rng = random.Random(seed)
    for _ in range(count):
        yield oracles.random_graph(rng, nv=rng.randint(1, 4), ne=rng.randint(1, 7), **kw)


def test_unbounded_certificates_replay():
    seen = 0
    for g in random_graphs(31, 80):
        for s, t in itertools.product(g.vertices, repeat=2):
            v = p_unbounded(g, s, t)
            if v.status != UNBOUNDED:
                continue
            seen += 1
            assert check_unbounded_certificate(g, v)
            q = v.certificate["prime"]
            vals = [valuation(oracles.p_of(replay(g, v, k)), q) for k in range(1, 6)]
            assert vals == sorted(vals)
            # the post-cycle segment may clip small valuations, but growth resumes
            far = [valuation(oracles.p_of(replay(g, v, k)), q) for k in (30, 31, 32)]
            assert far[0] < far[1] < far[2]
    assert seen > 20


def test_bounded_certificates_hold_on_enumerated_paths():
    checked = 0
    for g in random_graphs(32, 60, n_max=3, m_range=3):
        for s, t in itertools.product(g.vertices, repeat=2):
            v = p_unbounded(g, s, t)
            if v.status != BOUNDED:
                continue
            proof = v.certificate["proof"]
            ps = [oracles.p_of(p) for p in all_paths(g, s, t, 6)]
            if proof == "unreachable":
                assert ps == []
            elif proof == "acyclic":
                assert max(ps + ([1] if s == t else [])) == v.certificate["max_p"]
            elif proof == "valuation_potential":
                assert check_potential_certificate(g, v)
                assert all(p <= v.certificate["p_bound"] for p in ps)
                assert all(v.certificate["p_bound"] % p == 0 for p in ps)
            checked += 1
    assert checked > 50


def test_monotone_consistency():
    for g in random_graphs(33, 40):
        verdicts = {(s, t): p_unbounded(g, s, t).status
                    for s, t in itertools.product(g.vertices, repeat=2)}
        for e in g.edges:
            if e.m == 0:
                continue
            for a in g.vertices:
                if verdicts[a, e.dom] == UNBOUNDED:
                    assert verdicts[a, e.ran] != BOUNDED


def test_dichotomy_respects_loops():
    for g in random_graphs(34, 60):
        label = dichotomy(g).label
        loop = has_loop(g)
        if loop is not None:
            assert label != SIMPLE_AT
        else:
            assert label != PURELY_INFINITE


def test_report_is_serializable():
    import json
    rep = classify_report(one_vertex_graph(2, 3))
    assert rep["algebra"]["label"] == PURELY_INFINITE
    assert json.loads(json.dumps(rep)) == rep
