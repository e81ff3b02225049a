"""Minimality certificates and the Kirchberg / AT dichotomy.

For a prime q write x = v_q(p).  Walking a path from its domain to its range,
an edge e maps x to max(0, x + v_q(n(e)) - v_q(|m(e)|)), or to 0 when
m(e) = 0.  Hence sup p(mu) over paths from a to b is infinite exactly when,
for some prime q dividing a covering degree, the m != 0 edges contain a cycle
of positive q-surplus that is reachable from a and reaches b along m != 0
edges.  Both outcomes come with certificates that can be re-checked:
a cycle plus connecting paths, or integer potentials bounding every cycle.
"""

from __future__ import annotations

import os
from collections import deque
from dataclasses import dataclass, field

from .graph import Edge, Path, Vertex, WeightedGraph, _bfs_path, _p_step, adjacency, \
    has_loop, m_vertices, p_value, regular_vertices, sorted_vertices

UNBOUNDED, BOUNDED, UNKNOWN = "Unbounded", "Bounded", "Unknown"
MINIMAL, NOT_MINIMAL = "Minimal", "NotMinimal"
PURELY_INFINITE, SIMPLE_AT, NOT_SIMPLE = "SimplePurelyInfinite", "SimpleAT", "NotSimple"

DEFAULT_SEARCH_BOUND = 12


def default_search_bound() -> int:
    raw = os.environ.get("OKGRAPH_SEARCH_BOUND")
    if raw is None or raw.strip() == "":
        return DEFAULT_SEARCH_BOUND
    bound = int(raw)
    if bound < 1:
        raise ValueError("OKGRAPH_SEARCH_BOUND must be >= 1")
    return bound


def prime_factors(n: int) -> list[int]:
    n = abs(n)
    out, q = [], 2
    while q * q <= n:
        if n % q == 0:
            out.append(q)
            while n % q == 0:
                n //= q
        q += 1 if q == 2 else 2
    if n > 1:
        out.append(n)
    return out


def valuation(x: int, q: int) -> int:
    x = abs(x)
    if x == 0:
        raise ValueError("valuation of zero")
    k = 0
    while x % q == 0:
        x //= q
        k += 1
    return k


def surplus(e: Edge, q: int) -> int:
    return valuation(e.n, q) - valuation(e.m, q)


@dataclass(frozen=True)
class PUnboundedVerdict:
    status: str
    source: Vertex
    target: Vertex
    certificate: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"from": self.source, "to": self.target, "status": self.status,
                "certificate": self.certificate}


@dataclass(frozen=True)
class MinimalityVerdict:
    status: str
    evidence: dict

    def to_dict(self) -> dict:
        return {"status": self.status, **self.evidence}


@dataclass(frozen=True)
class AlgebraVerdict:
    label: str
    justification: dict

    @property
    def kirchberg(self) -> bool:
        return self.label == PURELY_INFINITE

    def to_dict(self) -> dict:
        return {"label": self.label, "kirchberg": self.kirchberg, **self.justification}


class _Analysis:
    """Per-graph caches shared by the pairwise queries."""

    def __init__(self, g: WeightedGraph, bound: int | None = None):
        self.g = g
        self.bound = default_search_bound() if bound is None else bound
        self.edges = g.all_edges()
        self.out = adjacency(g)
        self.into = {v: [] for v in g.vertices}
        for e in self.edges:
            self.into[e.ran].append(e)
        self._reach, self._coreach, self._coreach_m = {}, {}, {}
        self._dag, self._cycles = {}, {}

    def _sweep(self, start, step):
        seen = {start}
        queue = deque([start])
        while queue:
            for y in step(queue.popleft()):
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def reach(self, s):
        if s not in self._reach:
            self._reach[s] = self._sweep(s, lambda x: (e.ran for e in self.out[x]))
        return self._reach[s]

    def coreach(self, t):
        if t not in self._coreach:
            self._coreach[t] = self._sweep(t, lambda x: (e.dom for e in self.into[x]))
        return self._coreach[t]

    def coreach_m(self, t):
        if t not in self._coreach_m:
            self._coreach_m[t] = self._sweep(
                t, lambda x: (e.dom for e in self.into[x] if e.m != 0))
        return self._coreach_m[t]

    # -- pairwise verdict ---------------------------------------------------

    def verdict(self, source: Vertex, target: Vertex) -> PUnboundedVerdict:
        for v in (source, target):
            if v not in self.out:
                raise KeyError(f"unknown vertex {v!r}")
        R = self.reach(source)
        if target not in R:
            return PUnboundedVerdict(BOUNDED, source, target,
                                     {"proof": "unreachable", "max_p": None})
        region = R & self.coreach(target)
        region_edges = [e for e in self.edges if e.dom in region and e.ran in region]
        key = frozenset(region)
        if key not in self._dag:
            self._dag[key] = _topological(region, region_edges)
        order = self._dag[key]
        if order is not None:
            max_p, count = _dag_max_p(order, region_edges, source, target)
            return PUnboundedVerdict(BOUNDED, source, target,
                                     {"proof": "acyclic", "max_p": max_p, "path_count": count})
        g = self.g
        if len(g.vertices) == 1 and len(g.edges) == 1 and not g.families:
            e = g.edges[0]
            if e.m % e.n == 0:
                return PUnboundedVerdict(BOUNDED, source, target,
                                         {"proof": "one_vertex", "n": e.n, "m": e.m, "max_p": 1})
        W = R & self.coreach_m(target)
        too_long = []
        potentials = {}
        for q, cycle, pot in self._cycle_search(W):
            if cycle is None:
                potentials[q] = pot
                continue
            if len(cycle) > self.bound:
                too_long.append({"prime": q, "cycle_length": len(cycle)})
                continue
            return PUnboundedVerdict(UNBOUNDED, source, target,
                                     self._unbounded_certificate(source, target, cycle, q))
        if too_long:
            return PUnboundedVerdict(UNKNOWN, source, target,
                                     {"search_bound": self.bound, "long_cycles": too_long})
        cert = {"proof": "valuation_potential", "primes": {}, "p_bound": 1}
        for q, pot in potentials.items():
            b = max(0, max(pot[target] - pot[u] for u in W))
            cert["primes"][str(q)] = {"bound": b,
                                      "potential": {v: pot[v] for v in sorted_vertices(W)}}
            cert["p_bound"] *= q ** b
        return PUnboundedVerdict(BOUNDED, source, target, cert)

    def _cycle_search(self, W):
        key = frozenset(W)
        if key not in self._cycles:
            H = [e for e in self.edges if e.m != 0 and e.dom in W and e.ran in W]
            found = []
            for q in sorted({q for e in H for q in prime_factors(e.n)}):
                w = {e.id: surplus(e, q) for e in H}
                found.append((q, *_positive_cycle(W, H, w)))
            self._cycles[key] = found
        return self._cycles[key]

    def _unbounded_certificate(self, source, target, cycle, q):
        on_cycle = [e.ran for e in cycle]
        walk = _bfs_path(self.out, on_cycle, target, allowed=lambda e: e.m != 0)
        base = walk[0].dom if walk else target
        i = next(i for i, e in enumerate(cycle) if e.ran == base)
        cycle = cycle[i:] + cycle[:i]
        access = _bfs_path(self.out, [source], base)
        return {
            "prime": q,
            "base": base,
            "cycle": [e.id for e in cycle],
            "valuations": [[valuation(e.n, q), valuation(e.m, q)] for e in cycle],
            "surplus": sum(surplus(e, q) for e in cycle),
            "connect": [e.id for e in reversed(walk)],
            "access": [e.id for e in reversed(access)],
        }


def _topological(vertices, edges):
    """Topological order of the subgraph, or None when it has a cycle."""
    indeg = {v: 0 for v in vertices}
    out = {v: [] for v in vertices}
    for e in edges:
        indeg[e.ran] += 1
        out[e.dom].append(e)
    queue = deque(sorted_vertices(v for v in vertices if indeg[v] == 0))
    order = []
    while queue:
        x = queue.popleft()
        order.append(x)
        for e in out[x]:
            indeg[e.ran] -= 1
            if indeg[e.ran] == 0:
                queue.append(e.ran)
    return order if len(order) == len(indeg) else None


def _dag_max_p(order, edges, source, target):
    values = {v: {} for v in order}  # p value -> number of paths
    values[source] = {1: 1}  # the empty path
    out = {v: [] for v in order}
    for e in edges:
        out[e.dom].append(e)
    for x in order:
        for e in out[x]:
            bucket = values[e.ran]
            for p, c in values[x].items():
                p2 = _p_step(p, e.n, e.m)
                bucket[p2] = bucket.get(p2, 0) + c
    final = values[target]
    return max(final), sum(final.values())


def _positive_cycle(W, H, w):
    """A simple cycle of positive weight (range-leftmost), or None plus potentials."""
    for e in H:
        if e.dom == e.ran and w[e.id] > 0:
            return [e], None
    dist = {v: 0 for v in W}
    pred = {v: None for v in W}
    last = None
    for _ in range(len(W)):
        last = None
        for e in H:
            if dist[e.dom] + w[e.id] > dist[e.ran]:
                dist[e.ran] = dist[e.dom] + w[e.id]
                pred[e.ran] = e
                last = e.ran
        if last is None:
            return None, dist
    x = last
    for _ in range(len(W)):
        x = pred[x].dom
    cycle, y = [], x
    while True:
        e = pred[y]
        cycle.append(e)
        y = e.dom
        if y == x:
            break
    if sum(w[e.id] for e in cycle) <= 0:
        raise ArithmeticError("predecessor cycle is not positive")
    return cycle, None


def p_unbounded(g: WeightedGraph, source: Vertex, target: Vertex,
                bound: int | None = None) -> PUnboundedVerdict:
    """Decide whether sup{p(mu) : d*(mu) = source, r*(mu) = target} is infinite."""
    return _Analysis(g, bound).verdict(source, target)


def check_unbounded_certificate(g: WeightedGraph, verdict: PUnboundedVerdict) -> bool:
    """Replay an Unbounded certificate against the graph."""
    c = verdict.certificate
    q = c["prime"]
    try:
        cycle = [g.edge(i) for i in c["cycle"]]
        connect = [g.edge(i) for i in c["connect"]]
        access = [g.edge(i) for i in c["access"]]
    except KeyError:
        return False
    base = c["base"]
    if not cycle or cycle[0].ran != base or cycle[-1].dom != base:
        return False
    if any(e.m == 0 for e in cycle + connect):
        return False
    try:
        Path(tuple(cycle))
        full = Path(tuple(connect + cycle + access))
    except ValueError:
        return False
    if full.range != verdict.target or full.domain != verdict.source:
        return False
    if (connect and connect[-1].dom != base) or (access and access[0].ran != base):
        return False
    return sum(surplus(e, q) for e in cycle) == c["surplus"] > 0


def check_potential_certificate(g: WeightedGraph, verdict: PUnboundedVerdict) -> bool:
    """Every m != 0 edge inside the certified region respects the potentials."""
    for q, data in verdict.certificate["primes"].items():
        pot = data["potential"]
        for e in g.all_edges():
            if e.m != 0 and e.dom in pot and e.ran in pot:
                if surplus(e, int(q)) > pot[e.ran] - pot[e.dom]:
                    return False
    return True


def replay(g: WeightedGraph, verdict: PUnboundedVerdict, k: int) -> list[Edge]:
    """connect + cycle^k + access, the path family behind an Unbounded certificate."""
    c = verdict.certificate
    return ([g.edge(i) for i in c["connect"]] + [g.edge(i) for i in c["cycle"]] * k
            + [g.edge(i) for i in c["access"]])


def _orbit_witness(g, S, singular, rg_not_m, edges):
    """A negative orbit whose vertices all lie in S, if one exists."""
    for v in sorted_vertices(S & singular):
        return {"kind": "singular_vertex", "vertex": v}
    for v in sorted_vertices(S & rg_not_m):
        return {"kind": "regular_not_m", "vertex": v}
    inside = [e for e in edges if e.dom in S and e.ran in S]
    if _topological(S, inside) is None:
        sub = WeightedGraph(tuple(sorted_vertices(S)),
                            tuple(e for e in inside))
        loop = has_loop(sub)
        return {"kind": "cycle", "cycle": loop.ids}
    return None


def minimality(g: WeightedGraph, bound: int | None = None) -> MinimalityVerdict:
    """Decide minimality of E x_{n,m} T from the pairwise p-verdicts.

    The graph fails to be minimal exactly when, for some target v, the set of
    vertices w with bounded sup p over paths w -> v contains a whole negative
    orbit (a singular vertex or a cycle) or a vertex of E^0_rg \\ E^0_m.
    """
    an = _Analysis(g, bound)
    vs = sorted_vertices(g.vertices)
    pairs = {(s, t): an.verdict(s, t) for t in vs for s in vs}
    rg = regular_vertices(g)
    singular = set(vs) - rg
    rg_not_m = rg - m_vertices(g)
    witness, open_targets = None, []
    for t in vs:
        bounded = {s for s in vs if pairs[s, t].status == BOUNDED}
        hit = _orbit_witness(g, bounded, singular, rg_not_m, an.edges)
        if hit is not None:
            hit["target"] = t
            hit["bounded_from"] = sorted_vertices(bounded)
            witness = hit
            break
        maybe = bounded | {s for s in vs if pairs[s, t].status == UNKNOWN}
        if _orbit_witness(g, maybe, singular, rg_not_m, an.edges) is not None:
            open_targets.append(t)
    evidence = {"search_bound": an.bound,
                "pairs": [pairs[s, t].to_dict() for t in vs for s in vs]}
    if witness is not None:
        return MinimalityVerdict(NOT_MINIMAL, {"witness": witness, **evidence})
    if open_targets:
        return MinimalityVerdict(UNKNOWN, {"undecided_targets": open_targets, **evidence})
    return MinimalityVerdict(MINIMAL, evidence)


def dichotomy(g: WeightedGraph, bound: int | None = None,
              minimal: MinimalityVerdict | None = None) -> AlgebraVerdict:
    minimal = minimal or minimality(g, bound)
    loop = has_loop(g)
    why = {"minimality": minimal.status, "loop": loop.ids if loop else None}
    if minimal.status == MINIMAL:
        return AlgebraVerdict(PURELY_INFINITE if loop else SIMPLE_AT, why)
    if minimal.status == NOT_MINIMAL:
        why["witness"] = minimal.evidence["witness"]
        return AlgebraVerdict(NOT_SIMPLE, why)
    return AlgebraVerdict(UNKNOWN, why)


def classify_report(g: WeightedGraph, bound: int | None = None) -> dict:
    minimal = minimality(g, bound)
    verdict = dichotomy(g, bound, minimal)
    return {"minimality": minimal.to_dict(), "algebra": verdict.to_dict()}
