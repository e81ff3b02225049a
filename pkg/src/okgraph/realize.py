"""Graphs whose algebras are unital Kirchberg algebras with prescribed (K0, [1], K1).

Two routes:

* ``matrix``: choose diagonal T (L x (L - l0)) and S (L x L) with
  coker T + ker S = G0 and ker T + coker S = G1, embed them in the 2L x 2L
  matrices N~ = [[2I, T~+S+X], [I, I+S+X]] and M = [[I, S], [I, I]], and, for a
  nonzero unit target, extend by one vertex that moves the class of the unit.
* ``one_vertex``: for (Z/p, generator, Z/q) a single loop with n = 1 + p and
  m = 1 + q or 1 - q.

Every construction carries an explicit homomorphism pi from Z^{E^0} onto the
target group, written as an integer matrix into the summands of the requested group as
typed.  Verification re-derives everything from the graph.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from math import gcd

from .classify import MINIMAL, minimality
from .graph import Edge, GraphError, InfiniteEdgeFamily, WeightedGraph, build_graph, \
    graph_to_dict, has_loop, json_int
from .intlin import AbelianGroup, GroupElement, IntMatrix, cokernel_group, coset_class, \
    kernel_basis, parse_cyclic_orders, solve_in_image
from .ktheory import KInvariants, assemble, k_invariants, k_report


class RealizationError(ValueError):
    """The requested invariants cannot be built (bad group text or rank constraint)."""


class VerificationError(RuntimeError):
    """A construction failed its own round-trip check."""


@dataclass(frozen=True)
class GroupSpec:
    """A group as typed, summand by summand (order 0 = Z), with an optional element."""

    orders: tuple[int, ...]
    unit: tuple[int, ...] | None = None

    def __post_init__(self):
        for o in self.orders:
            if o < 0 or o == 1:
                raise RealizationError(f"summand order {o} is not 0 or >= 2")
        if self.unit is not None:
            if len(self.unit) != len(self.orders):
                raise RealizationError(
                    f"unit has {len(self.unit)} coordinates, group has {len(self.orders)} summands")
            object.__setattr__(self, "unit", tuple(
                c % o if o else c for c, o in zip(self.unit, self.orders)))

    @property
    def group(self) -> AbelianGroup:
        return AbelianGroup.from_cyclic(self.orders)

    @property
    def relations(self) -> IntMatrix:
        return IntMatrix.diag(self.orders)

    @property
    def free_rank(self) -> int:
        return sum(1 for o in self.orders if o == 0)

    @property
    def torsion_orders(self) -> list[int]:
        return [o for o in self.orders if o]

    def unit_vector(self) -> list[int]:
        return list(self.unit) if self.unit is not None else [0] * len(self.orders)

    def unit_is_zero(self) -> bool:
        return not any(self.unit_vector())

    def canonical_unit(self) -> GroupElement:
        return coset_class(self.relations, self.unit_vector())

    def __str__(self) -> str:
        return str(self.group)


def parse_group_spec(text: str, unit_text: str | None = None) -> GroupSpec:
    """Parse "Z^2+Z/4+Z/2" and an optional unit "0,0,1,0" in the same summand order."""
    try:
        orders = parse_cyclic_orders(text)
    except ValueError as exc:
        raise RealizationError(str(exc)) from exc
    unit = None
    if unit_text is not None and unit_text.strip() != "":
        parts = [p for p in re.split(r"[,\s]+", unit_text.strip()) if p]
        try:
            unit = tuple(int(p) for p in parts)
        except ValueError as exc:
            raise RealizationError(f"bad unit coordinates {unit_text!r}") from exc
        if not orders and unit == (0,):
            unit = ()
    return GroupSpec(tuple(orders), unit)


def diag_presentation(spec: GroupSpec | AbelianGroup, square: bool = False) -> IntMatrix:
    """Nonnegative diagonal matrix with the given cokernel.

    By default Z summands become rows without a column (so Z -> a 1 x 0
    matrix).  With ``square=True`` they become zero diagonal entries instead,
    which also makes each Z show up in the kernel (Z -> [[0]]).
    """
    if isinstance(spec, AbelianGroup):
        orders = [0] * spec.free_rank + list(spec.torsion)
    else:
        orders = list(spec.orders)
    torsion = [o for o in orders if o]
    free = len(orders) - len(torsion)
    if square:
        return IntMatrix.diag(torsion + [0] * free)
    return IntMatrix.diag(torsion, len(orders), len(torsion))


def band(size: int) -> IntMatrix:
    """The tridiagonal all-ones matrix X."""
    return IntMatrix.from_rows([[int(abs(k - l) <= 1) for l in range(size)]
                                for k in range(size)], size)


def block_embed(t: IntMatrix, s: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """N~ = [[2I, T~+S+X], [I, I+S+X]] and M = [[I, S], [I, I]] (both 2L x 2L)."""
    L = t.rows
    if s.shape != (L, L):
        raise RealizationError(f"S must be {L}x{L}, got {s.rows}x{s.cols}")
    if t.cols > L:
        raise RealizationError(f"T has {t.cols} columns, more than its {L} rows")
    if any(x < 0 for x in t.entries + s.entries):
        raise RealizationError("T and S must have nonnegative entries")
    t_pad = t.hstack(IntMatrix.zeros(L, L - t.cols))
    i, x = IntMatrix.identity(L), band(L)
    n_big = (i + i).hstack(t_pad + s + x).vstack(i.hstack(i + s + x))
    m_big = i.hstack(s).vstack(i.hstack(i))
    return n_big, m_big


def graph_from_matrices(n_big: IntMatrix, m_big: IntMatrix, l0: int = 0,
                        first_label: int = 1) -> WeightedGraph:
    """One edge k -> l per positive entry N_{k,l}, with n = N_{k,l} and m = M_{k,l}.

    The last ``l0`` vertices also receive an infinite family with n = 1, m = 0
    from the vertex labelled ``1``, which removes them from the regular set.
    """
    size = n_big.rows
    if n_big.shape != (size, size) or m_big.shape != (size, size):
        raise RealizationError("N and M must be square of the same size")
    if not 0 <= l0 <= size:
        raise RealizationError(f"rank deficit {l0} out of range")
    labels = [str(first_label + k) for k in range(size)]
    edges = []
    for k in range(size):
        for l in range(size):
            nk, mk = n_big[k, l], m_big[k, l]
            if nk < 0:
                raise RealizationError(f"negative entry N[{k},{l}]")
            if nk == 0:
                if mk != 0:
                    raise RealizationError(f"N[{k},{l}] = 0 but M[{k},{l}] = {mk}")
                continue
            edges.append(Edge(f"e{labels[k]}_{labels[l]}", labels[k], labels[l], nk, mk))
    families = []
    if l0:
        if "1" not in labels:
            raise RealizationError("infinite families need a vertex labelled 1")
        families = [InfiniteEdgeFamily("1", labels[l], 1, 0) for l in range(size - l0, size)]
    return build_graph(labels, edges, families)


@dataclass
class RealizationReport:
    k0_spec: GroupSpec
    k1_spec: GroupSpec
    route: str
    graph: WeightedGraph
    witness: IntMatrix  # pi: Z^{E^0} -> summands listed in witness_summands
    witness_summands: list[int]  # indices into k0_spec.orders
    l0: int = 0
    t: IntMatrix | None = None
    s: IntMatrix | None = None
    shift: list[int] | None = None  # the representative a with pi(a) = g, min a = 0
    pivot: int | None = None  # k0, an index with a_{k0} = 0
    computed: KInvariants | None = None
    verified: dict = field(default_factory=dict)
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return bool(self.verified) and all(self.verified.values())

    def to_dict(self) -> dict:
        rows = lambda m: [[json_int(x) for x in r] for r in m.to_rows()] if m is not None else None
        out = {
            "k0": str(self.k0_spec),
            "unit": self.k0_spec.unit_vector(),
            "k1": str(self.k1_spec),
            "k0_summands": list(self.k0_spec.orders),
            "k1_summands": list(self.k1_spec.orders),
            "route": self.route,
            "vertex_order": list(self.graph.vertices),
            "l0": self.l0,
            "t": rows(self.t),
            "s": rows(self.s),
            "a": self.shift,
            "k0_index": self.pivot,
            "witness": {"matrix": rows(self.witness), "summands": self.witness_summands},
            "computed": k_report(self.graph, self.computed) if self.computed else None,
            "verified": dict(self.verified),
            "failures": list(self.failures),
        }
        return out


def _summand_split(spec: GroupSpec, free_in_coker: int):
    """Indices of the summands placed in coker T: torsion ones plus some free ones."""
    free = [j for j, o in enumerate(spec.orders) if o == 0]
    torsion = [j for j, o in enumerate(spec.orders) if o]
    return torsion, free[:free_in_coker]


def _coker_scheme(spec0: GroupSpec, spec1: GroupSpec, injective: bool):
    """Choose T, S and the row -> summand map for coker T."""
    r0, r1 = spec0.free_rank, spec1.free_rank
    l0 = r0 - r1
    tors0, tors1 = spec0.torsion_orders, spec1.torsion_orders
    t0, t1 = len(tors0), len(tors1)
    if injective:
        L = max(r0 + t0, t1, 1)
        nonzero = tors0 + [1] * (L - r0 - t0)
        t = IntMatrix.diag(nonzero, L, L - l0)  # trailing r1 columns are zero
        s = IntMatrix.diag(tors1 + [1] * (L - t1))
        torsion_idx, free_idx = _summand_split(spec0, r0)
    else:
        L = max(t0 + l0, t1 + r1, 1)
        nonzero = tors0 + [1] * (L - l0 - t0)
        t = IntMatrix.diag(nonzero, L, L - l0)
        s = IntMatrix.diag(tors1 + [1] * (L - t1 - r1) + [0] * r1)
        torsion_idx, free_idx = _summand_split(spec0, l0)
    free_rows = list(range(L - len(free_idx), L))
    row_of = dict(zip(torsion_idx, range(t0)))
    row_of.update(zip(free_idx, free_rows))
    summands = sorted(row_of)
    p_t = IntMatrix.from_rows([[int(row_of[j] == i) for i in range(L)] for j in summands], L)
    return t, s, l0, p_t, summands


def _solve_mod(p: IntMatrix, rel: IntMatrix, g: list[int]) -> list[int]:
    """Some x with p x = g modulo the image of rel."""
    y = solve_in_image(p.hstack(rel), g)
    if y is None:
        raise VerificationError("the witness does not reach the unit target")
    return y[:p.cols]


def adjust_unit_class(n_big: IntMatrix, m_big: IntMatrix, witness: IntMatrix,
                      relations: IntMatrix, g: list[int]):
    """Grow N~, M by one vertex (index 0) so that the unit maps to g under the new witness.

    Returns (N~', M', witness', a, k0).  Requires pi(1, ..., 1) = 0 and g != 0
    modulo ``relations``.
    """
    if coset_class(relations, g).is_zero():
        raise RealizationError("unit adjustment needs a nonzero target; use the base graph")
    size = n_big.rows
    orders = [relations[i, i] for i in range(relations.rows)]
    if any(_reduced(witness.apply([1] * size), orders)):
        raise RealizationError("the base witness does not kill (1, ..., 1)")
    a = _solve_mod(witness, relations, g)
    low = min(a)
    a = [x - low for x in a]
    k0 = a.index(0)
    rows = [[0] * (size + 1) for _ in range(size + 1)]
    rows[0][0] = 2
    for l in range(size):
        rows[0][l + 1] = 2 * n_big[k0, l] - (2 if l == k0 else 0)
    for k in range(size):
        rows[k + 1][0] = a[k]
        for l in range(size):
            rows[k + 1][l + 1] = n_big[k, l]
    m_rows = [[0] * (size + 1) for _ in range(size + 1)]
    m_rows[0][0] = 2
    for k in range(size):
        # an edge k -> 0 exists only when a_k >= 1
        m_rows[k + 1][0] = 1 if a[k] else 0
        for l in range(size):
            m_rows[k + 1][l + 1] = m_big[k, l]
    new_witness = []
    for j in range(witness.rows):
        row = [-g[j]] + witness.row(j)
        row[k0 + 1] += 2 * g[j]
        new_witness.append(row)
    return (IntMatrix.from_rows(rows, size + 1), IntMatrix.from_rows(m_rows, size + 1),
            IntMatrix.from_rows(new_witness, size + 1), a, k0 + 1)


def one_vertex_parameters(p: int, q: int) -> tuple[int, int]:
    """(n, m) with coker [1-n] = Z/p, coker [1-m] = Z/q and m outside nZ."""
    n = 1 + p
    for m in (1 + q, 1 - q):
        if m % n:
            return n, m
    raise RealizationError(f"no admissible winding number for p={p}, q={q}")


def _one_vertex_applies(k0: GroupSpec, k1: GroupSpec) -> bool:
    return (len(k0.orders) == 1 and k0.orders[0] >= 2 and len(k1.orders) == 1
            and k1.orders[0] >= 2 and gcd(k0.unit_vector()[0], k0.orders[0]) == 1)


def realize(k0_spec: GroupSpec, k1_spec: GroupSpec, route: str = "auto",
            verify: bool = True) -> RealizationReport:
    if k1_spec.free_rank > k0_spec.free_rank:
        raise RealizationError(
            f"rank of K1 ({k1_spec.free_rank}) exceeds rank of K0 ({k0_spec.free_rank})")
    if route not in ("auto", "matrix", "one_vertex"):
        raise RealizationError(f"unknown route {route!r}")
    if route == "one_vertex" and not _one_vertex_applies(k0_spec, k1_spec):
        raise RealizationError("the one-vertex route needs (Z/p, generator, Z/q) with p, q >= 2")
    if route == "one_vertex" or (route == "auto" and _one_vertex_applies(k0_spec, k1_spec)):
        p, q = k0_spec.orders[0], k1_spec.orders[0]
        n, m = one_vertex_parameters(p, q)
        graph = build_graph(["v"], [Edge("e", "v", "v", n, m)])
        witness = IntMatrix.from_rows([[k0_spec.unit_vector()[0]]], 1)
        report = RealizationReport(k0_spec, k1_spec, "one_vertex", graph, witness, [0])
    else:
        injective = not k0_spec.unit_is_zero()
        t, s, l0, p_t, summands = _coker_scheme(k0_spec, k1_spec, injective)
        L = t.rows
        n_big, m_big = block_embed(t, s)
        minus_plus = (-IntMatrix.identity(L)).hstack(IntMatrix.identity(L))
        witness = p_t @ minus_plus
        report = RealizationReport(k0_spec, k1_spec, "matrix", None, witness, summands,
                                   l0=l0, t=t, s=s)
        if injective:
            rel = _witness_relations(k0_spec, summands)
            g = [k0_spec.unit_vector()[j] for j in summands]
            n_big, m_big, witness, a, k0 = adjust_unit_class(n_big, m_big, witness, rel, g)
            report.witness, report.shift, report.pivot = witness, a, k0
            report.graph = graph_from_matrices(n_big, m_big, l0, first_label=0)
        else:
            report.graph = graph_from_matrices(n_big, m_big, l0, first_label=1)
    if verify:
        verify_realization(report)
        if not report.ok:
            raise VerificationError("; ".join(report.failures))
    return report


def _witness_relations(spec: GroupSpec, summands: list[int]) -> IntMatrix:
    return IntMatrix.diag([spec.orders[j] for j in summands])


def _reduced(vec, orders):
    return [x % o if o else x for x, o in zip(vec, orders)]


def verify_realization(report: RealizationReport, bound: int | None = None) -> RealizationReport:
    """Recompute everything from the graph and record which checks pass."""
    g = report.graph
    k0_spec, k1_spec = report.k0_spec, report.k1_spec
    inv = k_invariants(g)
    report.computed = inv
    km = inv.matrices or assemble(g)
    a0 = km.i0_minus_n
    orders = [k0_spec.orders[j] for j in report.witness_summands]
    rel = IntMatrix.diag(orders)
    P = report.witness
    checks = {}
    checks["factors_match"] = inv.k0 == k0_spec.group and inv.k1 == k1_spec.group
    if P.cols != len(km.rows):
        checks["witness_well_defined"] = False
        checks["witness_surjective"] = False
        checks["witness_injective"] = False
        unit_hit = False
    else:
        image = P @ a0
        checks["witness_well_defined"] = all(
            not any(_reduced(image.col(c), orders)) for c in range(image.cols))
        checks["witness_surjective"] = cokernel_group(P.hstack(rel)).is_trivial()
        kernel = kernel_basis(P.hstack(rel))
        checks["witness_injective"] = all(
            solve_in_image(a0, kernel.col(c)[:P.cols]) is not None for c in range(kernel.cols))
        target = [k0_spec.unit_vector()[j] for j in report.witness_summands]
        unit_hit = _reduced(P.apply([1] * P.cols), orders) == _reduced(target, orders)
    outside = [j for j in range(len(k0_spec.orders)) if j not in report.witness_summands]
    unit_outside_zero = not any(k0_spec.unit_vector()[j] for j in outside)
    checks["unit_match"] = (unit_hit and unit_outside_zero
                            and inv.unit.is_zero() == k0_spec.unit_is_zero())
    minimal = minimality(g, bound)
    checks["minimal"] = minimal.status == MINIMAL
    checks["has_loop"] = has_loop(g) is not None
    checks["kirchberg"] = checks["minimal"] and checks["has_loop"]
    report.verified = checks
    report.failures = [name for name, ok in checks.items() if not ok]
    return report


def realization_outputs(report: RealizationReport) -> tuple[dict, dict]:
    """(graph JSON, report JSON)."""
    return graph_to_dict(report.graph), report.to_dict()
