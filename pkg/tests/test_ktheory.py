import random

from okgraph.graph import Edge, build_graph, one_vertex_graph
from okgraph.intlin import AbelianGroup
from okgraph.ktheory import assemble, k_invariants, k_report, one_vertex_reference, \
    one_vertex_table

import oracles


def two_vertex():
    return build_graph(["1", "2"], [Edge("a", "1", "1", 2, 1), Edge("b", "1", "2", 6, 3),
                                    Edge("c", "2", "1", 1, 1), Edge("d", "2", "2", 5, 1)])


def test_assemble_examples():
    km = assemble(one_vertex_graph(4, 3))
    assert km.n_matrix.to_rows() == [[4]] and km.m_matrix.to_rows() == [[3]]
    km = assemble(one_vertex_graph(5, 0))
    assert km.n_matrix.shape == (1, 0) and km.m_matrix.shape == (1, 0)
    km = assemble(two_vertex())
    assert km.n_matrix.to_rows() == [[2, 6], [1, 5]]
    assert km.m_matrix.to_rows() == [[1, 3], [1, 1]]


def test_k_examples():
    inv = k_invariants(one_vertex_graph(4, 3))
    assert inv.k0 == AbelianGroup(0, (3,)) and inv.k1 == AbelianGroup(0, (2,))
    assert inv.unit.vector == [1]
    inv = k_invariants(one_vertex_graph(1, 1))
    assert inv.k0 == AbelianGroup(2) and inv.k1 == AbelianGroup(2)
    assert inv.unit.vector == [0, 1]
    inv = k_invariants(two_vertex())
    assert inv.k0 == AbelianGroup(0, (2,)) and inv.k1 == AbelianGroup(0, (3,))
    assert inv.unit.is_zero()


def test_reference_table_cells():
    ref = one_vertex_reference(2, 1)
    assert ref.k0 == AbelianGroup(1) and ref.k1 == AbelianGroup(1) and ref.unit.vector == [0]
    assert one_vertex_table(2, 1) == ("Z + Z/1", "Z", (0, 1))
    ref = one_vertex_reference(1, 5)
    assert ref.k0 == AbelianGroup(1) and ref.k1 == AbelianGroup(1, (4,))
    ref = one_vertex_reference(3, 0)
    assert ref.k0 == AbelianGroup(1) and ref.k1 == AbelianGroup(1)


def test_one_vertex_grid_matches_reference():
    for n in range(1, 7):
        for m in range(-6, 7):
            inv = k_invariants(one_vertex_graph(n, m))
            assert inv.same_as(one_vertex_reference(n, m)), (n, m)


def test_one_vertex_grid_matches_table_strings():
    # raw closed-form entries, with Z/1 dropped and Z/d + Z/e merged canonically
    for n in range(1, 7):
        for m in range(-6, 7):
            k0_text, k1_text, unit = one_vertex_table(n, m)
            inv = k_invariants(one_vertex_graph(n, m))
            assert inv.k0 == AbelianGroup.parse(k0_text)
            assert inv.k1 == AbelianGroup.parse(k1_text)
            # the printed unit, reduced into the canonical group (Z/1 coordinates vanish)
            if m == 1:
                want = [0, 1] if n != 2 else [0]
            else:
                want = [] if inv.k0.is_trivial() else [1]
            assert inv.unit.vector == want, (n, m)
            assert len(unit) == (2 if m == 1 else 1)


def test_rank_bound_and_relabeling():
    rng = random.Random(21)
    for _ in range(40):
        g = oracles.random_graph(rng, nv=rng.randint(1, 4), ne=rng.randint(0, 7))
        inv = k_invariants(g)
        assert inv.k1.free_rank <= inv.k0.free_rank
        names = {v: f"x{v}" for v in g.vertices}
        h = build_graph([names[v] for v in reversed(g.vertices)],
                        [Edge(e.id, names[e.dom], names[e.ran], e.n, e.m) for e in g.edges])
        other = k_invariants(h)
        assert other.k0 == inv.k0 and other.k1 == inv.k1
        assert other.unit.is_zero() == inv.unit.is_zero()


def test_k_groups_match_minor_oracle():
    rng = random.Random(22)
    for _ in range(30):
        g = oracles.random_graph(rng, nv=3, ne=6, n_max=3, m_range=3)
        km = assemble(g)
        inv = k_invariants(g)
        a0 = km.i0_minus_n
        a1 = km.i1_minus_m
        f0 = oracles.invariant_factors(a0.to_rows(), a0.cols)
        f1 = oracles.invariant_factors(a1.to_rows(), a1.cols)
        r0 = a0.cols - len(f0)  # kernel rank of I0 - N
        r1 = a1.cols - len(f1)
        want0 = AbelianGroup(a0.rows - len(f0) + r1, tuple(d for d in f0 if d != 1))
        want1 = AbelianGroup(r0 + a1.rows - len(f1), tuple(d for d in f1 if d != 1))
        assert inv.k0 == want0 and inv.k1 == want1


def test_parallel_edge_linearity():
    g = two_vertex()
    h = build_graph(g.vertices, list(g.edges) + [Edge("extra", "2", "1", 3, -2)])
    a, b = assemble(g), assemble(h)
    diff_n = (b.n_matrix - a.n_matrix).to_rows()
    diff_m = (b.m_matrix - a.m_matrix).to_rows()
    assert diff_n == [[0, 0], [3, 0]] and diff_m == [[0, 0], [-2, 0]]


def test_report_shape():
    rep = k_report(one_vertex_graph(4, 3))
    assert rep["k0"] == "Z/3" and rep["k1"] == "Z/2" and rep["unit"] == [1]
    assert rep["n_matrix"] == [[4]] and rep["m_matrix"] == [[3]]
    assert rep["rg_m_columns"] == ["v"] and rep["m_columns"] == ["v"]
