"""Generator-relation presentations and circle-algebra block profiles.

Relation records are typed with the numbering of the generating family
{p_v, u_v, s_{e,k}}:

    i     u_v is a partial unitary
    ii    the ranges of the u_v are orthogonal
    iii   s_{e,k}^* s_{e,k} = u_{d(e)}^* u_{d(e)}
    iv    the ranges of the s_{e,k}, 0 <= k < n(e), are orthogonal
    v     s_{e,k} u_{d(e)} = s_{e,k+n(e)}          (generating form only)
    vi    u_{r(e)} s_{e,k} = s_{e,k+m(e)} = s_{e,k'} u_{d(e)}^l
    vii   u_v^* u_v = sum_{r(e)=v} sum_k s_{e,k} s_{e,k}^*        (v regular, in E^0_m)
    viii  u_v^* u_v - u_v = sum_{r(e)=v, m(e)!=0} sum_k (s_{e,k} - s_{e,k+m(e)}) s_{e,k}^*
                                                                (v singular, in E^0_m)

The reduced form keeps only 0 <= k < n(e) and rewrites k + m(e) = k' + n(e) l.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

from .graph import GraphError, WeightedGraph, has_loop, json_int, m_vertices, \
    one_vertex_graph, regular_vertices, sorted_vertices


def euclid(k: int, m: int, n: int) -> tuple[int, int]:
    """(k', l) with k + m = k' + n l and 0 <= k' < n."""
    l, k_prime = divmod(k + m, n)
    return k_prime, l


@dataclass
class StarPresentation:
    unitaries: list[str]
    isometries: list[dict]
    relations: list[dict]
    form: str = "reduced"
    toeplitz: bool = False
    family_isometries: list[dict] = field(default_factory=list)

    def count(self, kind: str) -> int:
        return sum(1 for r in self.relations if r["type"] == kind)

    def to_dict(self) -> dict:
        return {"form": self.form, "toeplitz": self.toeplitz, "unitaries": self.unitaries,
                "isometries": self.isometries, "family_isometries": self.family_isometries,
                "relations": self.relations}


def _s(edge, k):
    return f"S_{{{edge},{k}}}"


def _u(v, power=1):
    if power == 1:
        return f"U_{v}"
    if power == 0:
        return f"U_{v}^*U_{v}"
    return f"U_{v}^{power}"


def star_presentation(g: WeightedGraph, toeplitz: bool = False,
                      form: str = "reduced") -> StarPresentation:
    """Generators and typed relations; ``toeplitz`` drops the covariance relations vii, viii."""
    if form == "generating":
        return _generating_presentation(g, toeplitz)
    if form != "reduced":
        raise ValueError(f"unknown presentation form {form!r}")
    vs = sorted_vertices(g.vertices)
    rg = regular_vertices(g)
    mv = m_vertices(g)
    unitaries = [f"u_{v}" for v in vs]
    isometries = [{"edge": e.id, "k": k} for e in g.edges for k in range(e.n)]
    family_isometries = [{"family": i, "dom": f.dom, "ran": f.ran, "k": k, "copies": "countable"}
                         for i, f in enumerate(g.families) for k in range(f.n)]
    rel = []
    for v in vs:
        rel.append({"type": "i", "vertex": v, "text": f"{_u(v)}^*{_u(v)} = {_u(v)}{_u(v)}^*"})
    rel.append({"type": "ii", "vertices": vs, "text": "the ranges of the U_v are orthogonal"})
    for e in g.edges:
        for k in range(e.n):
            rel.append({"type": "iii", "edge": e.id, "k": k,
                        "text": f"{_s(e.id, k)}^*{_s(e.id, k)} = {_u(e.dom, 0)}"})
    rel.append({"type": "iv", "isometries": isometries,
                "text": "the ranges of the S_{e,k} are orthogonal"})
    for e in g.edges:
        for k in range(e.n):
            kp, l = euclid(k, e.m, e.n)
            rel.append({"type": "vi", "edge": e.id, "k": k, "k_prime": kp, "l": json_int(l),
                        "text": f"{_u(e.ran)} {_s(e.id, k)} = {_s(e.id, kp)} U_{e.dom}^{l}"})
    if not toeplitz:
        for v in vs:
            if v not in mv:
                continue
            if v in rg:
                terms = [{"edge": e.id, "k": k} for e in g.edges if e.ran == v
                         for k in range(e.n)]
                rhs = " + ".join(f"{_s(t['edge'], t['k'])}{_s(t['edge'], t['k'])}^*"
                                 for t in terms)
                rel.append({"type": "vii", "vertex": v, "terms": terms,
                            "text": f"{_u(v, 0)} = {rhs}"})
            else:
                terms = []
                for e in g.edges:
                    if e.ran == v and e.m != 0:
                        for k in range(e.n):
                            kp, l = euclid(k, e.m, e.n)
                            terms.append({"edge": e.id, "k": k, "k_prime": kp, "l": json_int(l)})
                rhs = " + ".join(
                    f"({_s(t['edge'], t['k'])} - {_s(t['edge'], t['k_prime'])} "
                    f"U^{t['l']}){_s(t['edge'], t['k'])}^*" for t in terms)
                rel.append({"type": "viii", "vertex": v, "terms": terms,
                            "text": f"{_u(v, 0)} - {_u(v)} = {rhs}"})
    return StarPresentation(unitaries, isometries, rel, "reduced", toeplitz, family_isometries)


def _generating_presentation(g: WeightedGraph, toeplitz: bool) -> StarPresentation:
    """Schema records over the full family {p_v, u_v, s_{e,k} : k in Z}."""
    vs = sorted_vertices(g.vertices)
    rg = regular_vertices(g)
    mv = m_vertices(g)
    unitaries = [f"u_{v}" for v in vs]
    isometries = [{"edge": e.id, "k": "Z"} for e in g.edges]
    rel = [{"type": "i", "vertex": v, "text": f"u_{v}^*u_{v} = u_{v}u_{v}^* = p_{v}"} for v in vs]
    rel.append({"type": "ii", "vertices": vs, "text": "the p_v are mutually orthogonal projections"})
    for e in g.edges:
        rel.append({"type": "iii", "edge": e.id, "k": "Z",
                    "text": f"s_{{{e.id},k}}^*s_{{{e.id},k}} = p_{e.dom}"})
    rel.append({"type": "iv", "isometries": [{"edge": e.id, "k": k} for e in g.edges
                                             for k in range(e.n)],
                "text": "the s_{e,k}s_{e,k}^*, 0 <= k < n(e), are mutually orthogonal"})
    for e in g.edges:
        rel.append({"type": "v", "edge": e.id, "k": "Z", "n": json_int(e.n),
                    "text": f"s_{{{e.id},k}} u_{e.dom} = s_{{{e.id},k+{e.n}}}"})
    for e in g.edges:
        rel.append({"type": "vi", "edge": e.id, "k": "Z", "m": json_int(e.m),
                    "text": f"u_{e.ran} s_{{{e.id},k}} = s_{{{e.id},k+{e.m}}}"})
    if not toeplitz:
        for v in vs:
            if v not in mv:
                continue
            kind = "vii" if v in rg else "viii"
            into = [e.id for e in g.edges if e.ran == v and (kind == "vii" or e.m != 0)]
            rel.append({"type": kind, "vertex": v, "edges": into,
                        "text": (f"p_{v} = sum s_{{e,k}}s_{{e,k}}^*" if kind == "vii" else
                                 f"p_{v} - u_{v} = sum (s_{{e,k}} - s_{{e,k+m(e)}})s_{{e,k}}^*")})
    return StarPresentation(unitaries, isometries, rel, "generating", toeplitz)


@dataclass
class ReducedPresentation:
    kind: str  # "two_generator", "grouped" or "general"
    n: int
    m: int
    d: int | None
    generators: list[str]
    relations: list[dict]
    index_map: list[dict] = field(default_factory=list)
    general: StarPresentation | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "n": json_int(self.n), "m": json_int(self.m), "d": self.d,
               "generators": self.generators, "relations": self.relations}
        if self.index_map:
            out["index_map"] = self.index_map
        if self.general is not None:
            out["general"] = self.general.to_dict()
        return out


def one_vertex_reduced(n: int, m: int) -> ReducedPresentation:
    """Fewer generators for the one-loop graph E_{n,m}.

    gcd(n, |m|) = 1 leaves u and s with u^n s = s u^m.  Otherwise, with
    d = gcd(n, |m|), the isometries regroup as s_{i,k} = s_{i+mk}.  For m = 0
    no regrouping is available and the general presentation is returned.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if m == 0:
        return ReducedPresentation("general", n, m, None, [], [],
                                   general=star_presentation(one_vertex_graph(n, m)))
    d = gcd(n, abs(m))
    if d == 1:
        rels = [
            {"type": "i", "text": f"u^*u = uu^* = s^*s = sum_{{k=0}}^{{{n - 1}}} u^k ss^* (u^*)^k = 1",
             "sum_range": n},
            {"type": "ii", "text": f"u^{n} s = s u^{m}", "lhs": {"u_power": n},
             "rhs": {"u_power": m}},
        ]
        return ReducedPresentation("two_generator", n, m, 1, ["u", "s"], rels)
    width = n // d
    index_map = []
    for i in range(d):
        for k in range(width):
            kp, l = euclid(i, m * k, n)
            index_map.append({"i": i, "k": k, "index": i + m * k, "k_prime": kp, "l": l})
    gens = ["u"] + [f"s_{{{i},{k}}}" for i in range(d) for k in range(width)]
    rels = [{"type": "unitary", "text": "u^*u = uu^* = 1"},
            {"type": "isometries",
             "text": "s_{i,k}^*s_{i,k} = 1 and sum_{i,k} s_{i,k}s_{i,k}^* = 1"}]
    for i in range(d):
        for k in range(width - 1):
            rels.append({"type": "shift", "i": i, "k": k,
                         "text": f"u s_{{{i},{k}}} = s_{{{i},{k + 1}}}"})
        rels.append({"type": "wrap", "i": i, "k": width - 1, "exponent": m // d,
                     "text": f"u s_{{{i},{width - 1}}} = s_{{{i},0}} u^{m // d}"})
    return ReducedPresentation("grouped", n, m, d, gens, rels, index_map)


# -- circle-algebra profiles ------------------------------------------------

@dataclass(frozen=True)
class Block:
    vertex: str
    dim: int
    circle: bool

    def __str__(self) -> str:
        core = f"M_{self.dim}" if self.dim > 1 else "C"
        if self.circle:
            return f"{core}⊗C(T)" if self.dim > 1 else "C(T)"
        return core


@dataclass(frozen=True)
class CircleAlgebraProfile:
    blocks: tuple[Block, ...]

    @property
    def total_dim(self) -> int:
        return sum(b.dim for b in self.blocks)

    def to_dict(self) -> dict:
        return {"blocks": [{"vertex": b.vertex, "dim": json_int(b.dim), "circle": b.circle}
                           for b in self.blocks]}

    def __str__(self) -> str:
        return " + ".join(str(b) for b in self.blocks) if self.blocks else "0"


def path_weights(f: WeightedGraph) -> dict[str, int]:
    """k_v = sum of n(mu) over paths mu (the empty one included) with domain v."""
    if f.families:
        raise GraphError("profiles need a finite graph without infinite families")
    loop = has_loop(f)
    if loop is not None:
        raise GraphError(f"graph has a loop {loop.ids}; its path set is infinite")
    out = {v: [] for v in f.vertices}
    for e in f.edges:
        out[e.dom].append(e)
    memo = {}

    def weight(v):
        if v not in memo:
            memo[v] = 1 + sum(e.n * weight(e.ran) for e in out[v])
        return memo[v]

    # depth is bounded by the vertex count, and the graph has no loops
    for v in sorted_vertices(f.vertices):
        weight(v)
    return memo


def toeplitz_profile(f: WeightedGraph) -> CircleAlgebraProfile:
    k = path_weights(f)
    return CircleAlgebraProfile(tuple(Block(v, k[v], True) for v in sorted_vertices(f.vertices)))


def relative_profile(e: WeightedGraph, f: WeightedGraph) -> CircleAlgebraProfile:
    """Blocks of the subalgebra generated by a loop-free finite piece F of E."""
    ids = {x.id: x for x in e.edges}
    if not set(f.vertices) <= set(e.vertices):
        raise GraphError("F has vertices outside E")
    for x in f.edges:
        if ids.get(x.id) != x:
            raise GraphError(f"edge {x.id!r} of F is not an edge of E")
        if x.dom not in f.vertices or x.ran not in f.vertices:
            raise GraphError(f"edge {x.id!r} leaves the vertex set of F")
    k = path_weights(f)
    mv = m_vertices(e)
    f_ids = {x.id for x in f.edges}
    blocks = []
    for v in sorted_vertices(f.vertices):
        outside = [x for x in e.all_edges() if x.ran == v and x.id not in f_ids]
        zero_outside = all(x.m == 0 for x in outside)
        if v in mv and zero_outside:
            if outside:
                blocks.append(Block(v, k[v], False))
            continue
        blocks.append(Block(v, k[v], True))
    return CircleAlgebraProfile(tuple(blocks))


def render_presentation(p: StarPresentation | ReducedPresentation) -> str:
    lines = []
    if isinstance(p, ReducedPresentation):
        lines.append(f"E_{{{p.n},{p.m}}}: {p.kind}")
        if p.general is not None:
            return "\n".join(lines + [render_presentation(p.general)])
        lines.append("generators: " + ", ".join(p.generators))
    else:
        lines.append(f"{p.form} presentation" + (" (Toeplitz)" if p.toeplitz else ""))
        lines.append("unitaries: " + ", ".join(p.unitaries))
        lines.append("isometries: " + ", ".join(_s(i["edge"], i["k"]) for i in p.isometries))
    for r in p.relations:
        lines.append(f"  ({r['type']}) {r['text']}")
    return "\n".join(lines)
