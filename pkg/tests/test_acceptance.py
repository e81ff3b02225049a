"""End-to-end acceptance checks, each with an exact expected value and a time limit."""

import itertools
import random
import time
from fractions import Fraction
from math import gcd

from okgraph.classify import MINIMAL, NOT_MINIMAL, NOT_SIMPLE, PURELY_INFINITE, UNKNOWN, \
    dichotomy, minimality
from okgraph.graph import Edge, Path, build_graph, fiber_image, has_loop, m_vertices, \
    one_vertex_graph, p_value, regular_vertices
from okgraph.intlin import AbelianGroup, IntMatrix, cokernel_group, kernel_basis, \
    smith_normal_form
from okgraph.ktheory import k_invariants, one_vertex_reference, one_vertex_table
from okgraph.present import Block, one_vertex_reduced, relative_profile, star_presentation, \
    toeplitz_profile
from okgraph.realize import GroupSpec, parse_group_spec, realize

import oracles

GRID = [(n, m) for n in range(1, 7) for m in range(-6, 7)]


class Timer:
    def __init__(self, limit):
        self.limit = limit

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.limit, f"took {self.elapsed:.2f}s, limit {self.limit}s"


def test_k_theory_table(criterion):
    criterion(1)
    with Timer(1.0):
        for n, m in GRID:
            inv = k_invariants(one_vertex_graph(n, m))
            assert inv.same_as(one_vertex_reference(n, m)), (n, m)
            k0_text, k1_text, _ = one_vertex_table(n, m)
            assert inv.k0 == AbelianGroup.parse(k0_text), (n, m)
            assert inv.k1 == AbelianGroup.parse(k1_text), (n, m)
            # [1] = 1 in the cyclic group when m != 1, (0, 1) in Z + Z/(n-1) when m = 1
            if m == 1:
                want = [0, 1] if n != 2 else [0]
            else:
                want = [] if inv.k0.is_trivial() else [1]
            assert inv.unit.vector == want, (n, m)


def test_one_vertex_minimality(criterion):
    criterion(2)
    with Timer(1.0):
        for n, m in GRID:
            status = minimality(one_vertex_graph(n, m)).status
            assert status != UNKNOWN
            assert status == (MINIMAL if m % n else NOT_MINIMAL), (n, m)


def test_dichotomy(criterion):
    criterion(3)
    with Timer(1.0):
        v = dichotomy(one_vertex_graph(2, 3))
        assert v.label == PURELY_INFINITE and v.kirchberg
        assert dichotomy(one_vertex_graph(2, 4)).label == NOT_SIMPLE
        rng = random.Random(3)
        for _ in range(10):
            dag = oracles.random_dag(rng, nv=5, ne=7)
            assert has_loop(dag) is None
            assert dichotomy(dag).label != PURELY_INFINITE


def random_spec_pair(rng, with_unit):
    r0 = rng.randint(0, 3)
    r1 = rng.randint(0, r0)
    o0 = [0] * r0 + [rng.randint(2, 12) for _ in range(rng.randint(0, 3))]
    o1 = [0] * r1 + [rng.randint(2, 12) for _ in range(rng.randint(0, 3))]
    rng.shuffle(o0)
    rng.shuffle(o1)
    unit = None
    if with_unit:
        unit = tuple(rng.randrange(o) if o else rng.randint(-5, 5) for o in o0)
    return GroupSpec(tuple(o0), unit), GroupSpec(tuple(o1))


def test_realization_round_trip(criterion):
    criterion(4)
    rng = random.Random(4)
    zero = nonzero = 0
    with Timer(30.0):
        for i in range(100):
            k0, k1 = random_spec_pair(rng, with_unit=i % 3 != 0)
            r = realize(k0, k1)
            assert r.ok, (k0, k1, r.failures)
            assert r.verified["factors_match"] and r.verified["unit_match"]
            assert r.verified["minimal"]
            assert minimality(r.graph).status == MINIMAL
            zero += k0.unit_is_zero()
            nonzero += not k0.unit_is_zero()
    assert zero >= 10 and nonzero >= 10


def test_named_realizations(criterion):
    criterion(5)
    r = realize(parse_group_spec("Z/2", "0"), parse_group_spec("Z/3"))
    km = r.computed.matrices
    n, m = km.n_matrix.to_rows(), km.m_matrix.to_rows()
    assert n == [[2, 6], [1, 5]] and m == [[1, 3], [1, 1]]
    i_n = [[int(a == b) - n[a][b] for b in range(2)] for a in range(2)]
    i_m = [[int(a == b) - m[a][b] for b in range(2)] for a in range(2)]
    assert oracles.det(i_n) == -2 and oracles.det(i_m) == -3
    assert oracles.invariant_factors(i_n, 2) == [1, 2]
    assert oracles.invariant_factors(i_m, 2) == [1, 3]
    assert r.ok
    for p, q in [(2, 3), (3, 2), (5, 4)]:
        r = realize(parse_group_spec(f"Z/{p}", "1"), parse_group_spec(f"Z/{q}"),
                    route="one_vertex")
        assert r.ok
        (e,) = r.graph.edges
        assert e.n == 1 + p and e.m in (1 + q, 1 - q) and e.m % e.n != 0
        inv = k_invariants(r.graph)
        assert inv.k0 == AbelianGroup(0, (p,)) and inv.k1 == AbelianGroup(0, (q,))
        assert inv.unit.vector == [1]
        assert dichotomy(r.graph).label == PURELY_INFINITE


def test_smith_property_suite(criterion):
    criterion(6)
    rng = random.Random(6)
    with Timer(10.0):
        for _ in range(1000):
            r, c = rng.randint(1, 6), rng.randint(1, 6)
            a = IntMatrix.from_rows([[rng.randint(-20, 20) for _ in range(c)] for _ in range(r)], c)
            diags = []
            for order in ("rows", "cols"):
                snf = smith_normal_form(a, order)
                assert snf.u @ a @ snf.v == snf.d
                assert abs(snf.u.det()) == 1 and abs(snf.v.det()) == 1
                d = snf.diagonal
                assert all(d[i] != 0 or d[j] == 0 for i, j in zip(range(len(d)), range(1, len(d))))
                assert all(y % x == 0 for x, y in zip(d, d[1:]) if x)
                assert all(snf.d[i, j] == 0 for i in range(r) for j in range(c) if i != j)
                diags.append(d)
            assert diags[0] == diags[1]
            assert cokernel_group(a, "rows") == cokernel_group(a, "cols")
            k_rows, k_cols = kernel_basis(a, "rows"), kernel_basis(a, "cols")
            assert (a @ k_rows).is_zero() and (a @ k_cols).is_zero()
            assert k_rows.cols == k_cols.cols == c - oracles.rank(a.to_rows(), c)


def test_circle_fibers(criterion):
    criterion(7)
    rng = random.Random(7)
    with Timer(5.0):
        for _ in range(200):
            length = rng.randint(1, 4)
            vs = [rng.choice("abc") for _ in range(length + 1)]
            edges = [Edge(f"e{i}", vs[i + 1], vs[i], rng.randint(1, 4), rng.randint(-4, 4))
                     for i in range(length)]
            path = Path(tuple(edges))
            p = p_value(path)
            assert p == oracles.p_of(edges)
            assert fiber_image(path, 1) == {Fraction(j, p) for j in range(p)}
            assert fiber_image(path, 1) == oracles.fiber_grid(edges, Fraction(0))
            for k in range(1, length):
                assert p % p_value(edges[:k]) == 0


def test_toeplitz_profiles(criterion):
    criterion(8)
    with Timer(5.0):
        for n in range(1, 5):
            for m in (1, -2, 3):
                e = build_graph(["a", "v"], [Edge("x", "a", "v", n, m)])
                assert relative_profile(e, e).blocks == (Block("a", n + 1, True),)
            e = build_graph(["a", "v"], [Edge("x", "a", "v", n, 0)])
            assert relative_profile(e, e).blocks == (Block("a", n + 1, True), Block("v", 1, True))
        rng = random.Random(8)
        for _ in range(20):
            dag = oracles.random_dag(rng, nv=rng.randint(1, 5), ne=rng.randint(0, 7))
            want = oracles.simple_paths_lambda(list(dag.vertices), list(dag.edges))
            assert {b.vertex: b.dim for b in toeplitz_profile(dag).blocks} == want


def test_presentation_emission(criterion):
    criterion(9)
    for n, m in itertools.product(range(1, 7), range(-6, 7)):
        if m == 0 or gcd(n, abs(m)) != 1:
            continue
        r = one_vertex_reduced(n, m)
        assert r.kind == "two_generator" and r.generators == ["u", "s"]
        assert [x["text"] for x in r.relations] == [
            f"u^*u = uu^* = s^*s = sum_{{k=0}}^{{{n - 1}}} u^k ss^* (u^*)^k = 1",
            f"u^{n} s = s u^{m}",
        ]
    rng = random.Random(9)
    for _ in range(20):
        g = oracles.random_graph(rng, nv=rng.randint(1, 4), ne=rng.randint(0, 7))
        p = star_presentation(g)
        rg, mv = regular_vertices(g), m_vertices(g)
        assert len(p.unitaries) == len(g.vertices)
        assert len(p.isometries) == sum(e.n for e in g.edges)
        assert p.count("vi") == len(p.isometries)
        assert p.count("vii") == len(rg & mv) and p.count("viii") == len(mv - rg)

