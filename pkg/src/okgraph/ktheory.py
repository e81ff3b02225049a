"""K-groups and unit class of O(E x_{n,m} T) for a finite weighted graph.

With I0, I1 the coordinate embeddings,

    K0 = coker(I0 - N) + ker(I1 - M),    K1 = ker(I0 - N) + coker(I1 - M),

where N has rows E^0 and columns E^0_rg & E^0_m, and M has rows E^0 and
columns E^0_m.  Coordinates of K0 elements list the ker(I1 - M) part first,
then the free and torsion coordinates of coker(I0 - N); the unit class sits
entirely in the cokernel part.
"""

from __future__ import annotations

from dataclasses import dataclass

from .graph import WeightedGraph, json_int, m_vertices, one_vertex_graph, regular_vertices, \
    sorted_vertices
from .intlin import AbelianGroup, GroupElement, IntMatrix, cokernel_group, coset_class, \
    kernel_basis


@dataclass(frozen=True)
class KMatrices:
    rows: tuple[str, ...]
    rg_m_columns: tuple[str, ...]
    m_columns: tuple[str, ...]
    n_matrix: IntMatrix
    m_matrix: IntMatrix

    def embedding(self, columns) -> IntMatrix:
        return IntMatrix.from_rows(
            [[int(v == w) for w in columns] for v in self.rows], len(columns))

    @property
    def i0_minus_n(self) -> IntMatrix:
        return self.embedding(self.rg_m_columns) - self.n_matrix

    @property
    def i1_minus_m(self) -> IntMatrix:
        return self.embedding(self.m_columns) - self.m_matrix


@dataclass(frozen=True)
class KInvariants:
    k0: AbelianGroup
    k1: AbelianGroup
    unit: GroupElement | None
    matrices: KMatrices | None = None

    def same_as(self, other: KInvariants) -> bool:
        """Equality of canonical factors and unit coordinates."""
        return (self.k0 == other.k0 and self.k1 == other.k1
                and (self.unit.vector if self.unit else None)
                == (other.unit.vector if other.unit else None))


def assemble(g: WeightedGraph) -> KMatrices:
    rows = sorted_vertices(g.vertices)
    mv = m_vertices(g)
    rg_m = sorted_vertices(regular_vertices(g) & mv)
    m_cols = sorted_vertices(mv)
    n_cols = {w: j for j, w in enumerate(rg_m)}
    mm_cols = {w: j for j, w in enumerate(m_cols)}
    row_of = {v: i for i, v in enumerate(rows)}
    n_data = [[0] * len(rg_m) for _ in rows]
    m_data = [[0] * len(m_cols) for _ in rows]
    # families never land in either column set, so only finite edges count
    for e in g.edges:
        i = row_of[e.dom]
        if e.ran in n_cols:
            n_data[i][n_cols[e.ran]] += e.n
        if e.ran in mm_cols:
            m_data[i][mm_cols[e.ran]] += e.m
    return KMatrices(tuple(rows), tuple(rg_m), tuple(m_cols),
                     IntMatrix.from_rows(n_data, len(rg_m)),
                     IntMatrix.from_rows(m_data, len(m_cols)))


def k_invariants(g: WeightedGraph) -> KInvariants:
    km = assemble(g)
    a0 = km.i0_minus_n
    a1 = km.i1_minus_m
    coker0 = cokernel_group(a0)
    ker0 = kernel_basis(a0).cols
    coker1 = cokernel_group(a1)
    ker1 = kernel_basis(a1).cols
    k0 = AbelianGroup(coker0.free_rank + ker1, coker0.torsion)
    k1 = AbelianGroup(ker0 + coker1.free_rank, coker1.torsion)
    cls = coset_class(a0, [1] * len(km.rows))
    unit = k0.element((0,) * ker1 + cls.free_coords, cls.torsion_coords)
    return KInvariants(k0, k1, unit, km)


def one_vertex_reference(n: int, m: int) -> KInvariants:
    """Closed-form K-theory of O(E_{n,m}) by cases on m."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if m == 0:
        k0, k1 = AbelianGroup(1), AbelianGroup(1)
        return KInvariants(k0, k1, k0.element([1]))
    if m == 1:
        if n == 1:
            k0 = AbelianGroup(2)
            return KInvariants(k0, AbelianGroup(2), k0.element([0, 1]))
        k0 = AbelianGroup.from_cyclic([0, n - 1])
        unit = k0.element([0], [1] * len(k0.torsion))
        return KInvariants(k0, AbelianGroup(1), unit)
    k1 = AbelianGroup.from_cyclic([0, m - 1]) if n == 1 else AbelianGroup.from_cyclic([m - 1])
    if n == 1:
        k0 = AbelianGroup(1)
        return KInvariants(k0, k1, k0.element([1]))
    k0 = AbelianGroup.from_cyclic([n - 1])
    return KInvariants(k0, k1, k0.element([], [1] * len(k0.torsion)))


def one_vertex_table(n: int, m: int) -> tuple[str, str, tuple[int, ...]]:
    """The closed-form entry in raw form, before dropping Z/1 summands."""
    if m == 0:
        return "Z", "Z", (1,)
    if m == 1:
        if n == 1:
            return "Z + Z", "Z + Z", (0, 1)
        return f"Z + Z/{n - 1}", "Z", (0, 1)
    if n == 1:
        return "Z", f"Z + Z/{abs(m - 1)}", (1,)
    return f"Z/{n - 1}", f"Z/{abs(m - 1)}", (1,)


def k_report(g: WeightedGraph, inv: KInvariants | None = None) -> dict:
    inv = inv or k_invariants(g)
    km = inv.matrices or assemble(g)
    return {
        "k0": str(inv.k0),
        "k1": str(inv.k1),
        "unit": [json_int(x) for x in inv.unit.vector],
        "n_matrix": [[json_int(x) for x in r] for r in km.n_matrix.to_rows()],
        "m_matrix": [[json_int(x) for x in r] for r in km.m_matrix.to_rows()],
        "rg_m_columns": list(km.rg_m_columns),
        "m_columns": list(km.m_columns),
        "rows": list(km.rows),
    }


def check_one_vertex(n: int, m: int) -> bool:
    return k_invariants(one_vertex_graph(n, m)).same_as(one_vertex_reference(n, m))
