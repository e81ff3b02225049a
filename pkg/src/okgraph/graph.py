"""Weighted directed graphs (E, n, m) and the path machinery on them.

An edge ``e`` carries ``dom = d(e)``, ``ran = r(e)``, a covering degree
``n >= 1`` and a winding number ``m``.  Paths are written range-leftmost:
``(e1, ..., ek)`` is composable when ``dom(e_i) == ran(e_{i+1})``, so the
path runs from ``dom(ek)`` to ``ran(e1)``.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

Vertex = str
CirclePoint = Fraction  # theta in [0, 1), standing for exp(2 pi i theta)


class GraphError(ValueError):
    pass


def vertex_key(v: Vertex):
    """Sort key: numeric ids by value, then everything else lexicographically."""
    if re.fullmatch(r"-?\d+", v):
        return (0, int(v), v)
    return (1, 0, v)


def sorted_vertices(vs: Iterable[Vertex]) -> list[Vertex]:
    return sorted(vs, key=vertex_key)


def circle_point(x) -> CirclePoint:
    return Fraction(x) % 1


@dataclass(frozen=True)
class Edge:
    id: str
    dom: Vertex
    ran: Vertex
    n: int
    m: int


@dataclass(frozen=True)
class InfiniteEdgeFamily:
    """Countably many parallel edges dom -> ran sharing (n, m); never materialized."""

    dom: Vertex
    ran: Vertex
    n: int
    m: int


@dataclass(frozen=True)
class WeightedGraph:
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...] = ()
    families: tuple[InfiniteEdgeFamily, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        object.__setattr__(self, "_index", {e.id: e for e in self.edges})

    def edge(self, edge_id: str) -> Edge:
        if edge_id in self._index:
            return self._index[edge_id]
        for rep in self.family_edges():
            if rep.id == edge_id:
                return rep
        raise KeyError(edge_id)

    def family_edges(self) -> list[Edge]:
        """One representative edge per infinite family."""
        return [Edge(f"family[{i}]", f.dom, f.ran, f.n, f.m)
                for i, f in enumerate(self.families)]

    def all_edges(self) -> list[Edge]:
        return list(self.edges) + self.family_edges()

    def incoming(self, v: Vertex) -> list[Edge]:
        return [e for e in self.edges if e.ran == v]

    def sorted_vertices(self) -> list[Vertex]:
        return sorted_vertices(self.vertices)


def _check_weight(n, m, where):
    if isinstance(n, bool) or not isinstance(n, int):
        raise GraphError(f"{where}: n must be an integer, got {n!r}")
    if isinstance(m, bool) or not isinstance(m, int):
        raise GraphError(f"{where}: m must be an integer, got {m!r}")
    if n < 1:
        raise GraphError(f"{where}: n = {n} < 1")


def build_graph(vertices: Iterable[Vertex], edges: Iterable[Edge] = (),
                families: Iterable[InfiniteEdgeFamily] = ()) -> WeightedGraph:
    vertices = tuple(vertices)
    edges = tuple(edges)
    families = tuple(families)
    if not vertices:
        raise GraphError("a graph needs at least one vertex")
    seen = set()
    for v in vertices:
        if not isinstance(v, str) or not v:
            raise GraphError(f"bad vertex id {v!r}")
        if v in seen:
            raise GraphError(f"duplicate vertex id {v!r}")
        seen.add(v)
    ids = set()
    for e in edges:
        if e.id in ids:
            raise GraphError(f"duplicate edge id {e.id!r}")
        ids.add(e.id)
        _check_weight(e.n, e.m, f"edge {e.id!r}")
        for end in (e.dom, e.ran):
            if end not in seen:
                raise GraphError(f"edge {e.id!r} references unknown vertex {end!r}")
    for i, f in enumerate(families):
        _check_weight(f.n, f.m, f"family {i}")
        for end in (f.dom, f.ran):
            if end not in seen:
                raise GraphError(f"family {i} references unknown vertex {end!r}")
    return WeightedGraph(vertices, edges, families)


def one_vertex_graph(n: int, m: int, vertex: Vertex = "v", edge: str = "e") -> WeightedGraph:
    """The graph E_{n,m}: one vertex and one loop."""
    return build_graph([vertex], [Edge(edge, vertex, vertex, n, m)])


def regular_vertices(g: WeightedGraph) -> set[Vertex]:
    """Vertices receiving finitely many, and at least one, edges."""
    infinite = {f.ran for f in g.families}
    receiving = {e.ran for e in g.edges}
    return receiving - infinite


def m_vertices(g: WeightedGraph) -> set[Vertex]:
    """Vertices receiving finitely many, and at least one, edges with m != 0."""
    infinite = {f.ran for f in g.families if f.m != 0}
    receiving = {e.ran for e in g.edges if e.m != 0}
    return receiving - infinite


@dataclass(frozen=True)
class Path:
    edges: tuple[Edge, ...]

    def __post_init__(self):
        if not self.edges:
            raise GraphError("a path has at least one edge")
        for a, b in zip(self.edges, self.edges[1:]):
            if a.dom != b.ran:
                raise GraphError(f"edges {a.id!r}, {b.id!r} are not composable")

    @property
    def range(self) -> Vertex:
        return self.edges[0].ran

    @property
    def domain(self) -> Vertex:
        return self.edges[-1].dom

    def __len__(self) -> int:
        return len(self.edges)

    @property
    def ids(self) -> list[str]:
        return [e.id for e in self.edges]

    def __add__(self, other: Path) -> Path:
        return Path(self.edges + other.edges)


def path_of(g: WeightedGraph, ids: Sequence[str]) -> Path:
    return Path(tuple(g.edge(i) for i in ids))


def _p_step(p: int, n: int, m: int) -> int:
    if m == 0:
        return 1
    np_ = n * p
    return np_ // gcd(np_, abs(m))


def p_value(path: Path | Sequence[Edge]) -> int:
    """The gcd invariant p(mu); the range-side edge is the outermost."""
    edges = path.edges if isinstance(path, Path) else tuple(path)
    p = 1
    for e in reversed(edges):
        p = _p_step(p, e.n, e.m)
    return p


def fiber_image(path: Path, z0=0) -> frozenset[CirclePoint]:
    """The exact set r_mu(d_mu^{-1}(z0)) for a rational point z0 of the circle."""
    current = {circle_point(z0)}
    for e in reversed(path.edges):
        lifts = {(t + j) / e.n for t in current for j in range(e.n)}
        current = {(e.m * x) % 1 for x in lifts}
    return frozenset(current)


def adjacency(g: WeightedGraph, include_families: bool = True) -> dict[Vertex, list[Edge]]:
    """Outgoing edges (dom -> ran) per vertex, in declaration order."""
    out = {v: [] for v in g.vertices}
    for e in (g.all_edges() if include_families else g.edges):
        out[e.dom].append(e)
    return out


def enumerate_paths(g: WeightedGraph, from_dom: Vertex, to_ran: Vertex,
                    max_len: int) -> list[Path]:
    """All paths from ``from_dom`` to ``to_ran`` of length 1..max_len."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    for v in (from_dom, to_ran):
        if v not in g.vertices:
            raise GraphError(f"unknown vertex {v!r}")
    into = {v: [] for v in g.vertices}
    for e in g.all_edges():
        into[e.ran].append(e)
    found = []
    stack = [(e,) for e in reversed(into[to_ran])]
    while stack:
        edges = stack.pop()
        if edges[-1].dom == from_dom:
            found.append(Path(edges))
        if len(edges) < max_len:
            for e in reversed(into[edges[-1].dom]):
                stack.append(edges + (e,))
    found.sort(key=lambda p: (len(p), p.ids))
    return found


def _bfs_path(out, sources, target, allowed=None):
    """Shortest edge walk (in travel order) from any of ``sources`` to ``target``."""
    prev = {s: None for s in sources}
    queue = deque(sources)
    while queue:
        x = queue.popleft()
        if x == target:
            walk = []
            while prev[x] is not None:
                e = prev[x]
                walk.append(e)
                x = e.dom
            return walk[::-1]
        for e in out[x]:
            if allowed is not None and not allowed(e):
                continue
            if e.ran not in prev:
                prev[e.ran] = e
                queue.append(e.ran)
    return None


def shortest_path(g: WeightedGraph, from_dom: Vertex, to_ran: Vertex,
                  allowed=None) -> Path | None:
    """A shortest path of length >= 1 from ``from_dom`` to ``to_ran``."""
    out = adjacency(g)
    best = None
    for e in out[from_dom]:
        if allowed is not None and not allowed(e):
            continue
        rest = _bfs_path(out, [e.ran], to_ran, allowed)
        if rest is not None and (best is None or len(rest) + 1 < len(best)):
            best = [e] + rest
    return Path(tuple(reversed(best))) if best else None


def has_loop(g: WeightedGraph) -> Path | None:
    """A shortest loop (path with equal range and domain), if any."""
    best = None
    for v in g.sorted_vertices():
        p = shortest_path(g, v, v)
        if p is not None and (best is None or len(p) < len(best)):
            best = p
    return best


def reachable_set(g: WeightedGraph, from_dom: Vertex, allowed=None) -> set[Vertex]:
    """Vertices reachable from ``from_dom`` by paths of length >= 0."""
    out = adjacency(g)
    seen = {from_dom}
    queue = deque([from_dom])
    while queue:
        x = queue.popleft()
        for e in out[x]:
            if (allowed is None or allowed(e)) and e.ran not in seen:
                seen.add(e.ran)
                queue.append(e.ran)
    return seen


def reachable(g: WeightedGraph, from_dom: Vertex, to_ran: Vertex) -> bool:
    """Whether some path of length >= 1 runs from ``from_dom`` to ``to_ran``."""
    for v in (from_dom, to_ran):
        if v not in g.vertices:
            raise GraphError(f"unknown vertex {v!r}")
    return any(to_ran in reachable_set(g, e.ran) for e in adjacency(g)[from_dom])


# -- JSON -------------------------------------------------------------------

_SAFE = 2 ** 53


def json_int(x: int):
    """JSON-safe integer: a number when small, a decimal string otherwise."""
    return x if -_SAFE <= x <= _SAFE else str(x)


def parse_int(x) -> int:
    if isinstance(x, bool):
        raise GraphError(f"expected an integer, got {x!r}")
    if isinstance(x, int):
        return x
    if isinstance(x, str) and re.fullmatch(r"-?\d+", x.strip()):
        return int(x)
    raise GraphError(f"expected an integer, got {x!r}")


def graph_from_dict(data: dict) -> WeightedGraph:
    try:
        vertices = [str(v) for v in data["vertices"]]
        edges = [Edge(str(e["id"]), str(e["dom"]), str(e["ran"]),
                      parse_int(e["n"]), parse_int(e["m"]))
                 for e in data.get("edges", [])]
        families = [InfiniteEdgeFamily(str(f["dom"]), str(f["ran"]),
                                       parse_int(f["n"]), parse_int(f["m"]))
                    for f in data.get("families", [])]
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph JSON: {exc!r}") from exc
    return build_graph(vertices, edges, families)


def graph_to_dict(g: WeightedGraph) -> dict:
    return {
        "vertices": list(g.vertices),
        "edges": [{"id": e.id, "dom": e.dom, "ran": e.ran,
                   "n": json_int(e.n), "m": json_int(e.m)} for e in g.edges],
        "families": [{"dom": f.dom, "ran": f.ran, "n": json_int(f.n), "m": json_int(f.m)}
                     for f in g.families],
    }
