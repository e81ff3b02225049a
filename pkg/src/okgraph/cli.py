"""okgraph command line: inspect, ktheory, classify, realize, present, toeplitz, oracle."""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path as FsPath

from .classify import classify_report
from .graph import GraphError, Path, fiber_image, graph_from_dict, graph_to_dict, has_loop, \
    json_int, m_vertices, one_vertex_graph, p_value, regular_vertices, sorted_vertices
from .ktheory import check_one_vertex, k_report
from .present import one_vertex_reduced, relative_profile, render_presentation, \
    star_presentation, toeplitz_profile
from .realize import RealizationError, VerificationError, parse_group_spec, realize, \
    realization_outputs, verify_realization

EXIT_OK, EXIT_INVALID, EXIT_VERIFY = 0, 1, 2


def _jsonable(x):
    if isinstance(x, bool) or x is None or isinstance(x, (str, float)):
        return x
    if isinstance(x, int):
        return json_int(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2)


def load_graph(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise GraphError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise GraphError(f"{path}: {exc.strerror}") from exc
    return graph_from_dict(data)


# -- per-graph reports ---------------------------------------------------------

def inspect_report(g, args=None) -> dict:
    loop = has_loop(g)
    return {
        "vertices": sorted_vertices(g.vertices),
        "edges": [{"id": e.id, "dom": e.dom, "ran": e.ran, "n": e.n, "m": e.m} for e in g.edges],
        "families": graph_to_dict(g)["families"],
        "regular": sorted_vertices(regular_vertices(g)),
        "m_vertices": sorted_vertices(m_vertices(g)),
        "loop": loop.ids if loop else None,
    }


def ktheory_report(g, args=None) -> dict:
    return k_report(g)


def classify_cmd_report(g, args=None) -> dict:
    return classify_report(g, getattr(args, "bound", None))


def present_report(g, args) -> dict:
    out = star_presentation(g, toeplitz=args.toeplitz, form=args.form).to_dict()
    if len(g.vertices) == 1 and len(g.edges) == 1 and not g.families:
        e = g.edges[0]
        out["one_vertex_reduced"] = one_vertex_reduced(e.n, e.m).to_dict()
    return out


def toeplitz_report(g, args) -> dict:
    if args.sub:
        return relative_profile(g, load_graph(args.sub)).to_dict()
    return toeplitz_profile(g).to_dict()


GRAPH_COMMANDS = {
    "inspect": inspect_report,
    "ktheory": ktheory_report,
    "classify": classify_cmd_report,
    "present": present_report,
    "toeplitz": toeplitz_report,
}


def oracle_report(n_max: int, m_max: int) -> dict:
    """Reference one-vertex table and fiber-image cross-checks."""
    mismatches = []
    for n in range(1, n_max + 1):
        for m in range(-m_max, m_max + 1):
            if not check_one_vertex(n, m):
                mismatches.append({"n": n, "m": m})
    fiber_bad = []
    for n in range(1, n_max + 1):
        for m in range(-m_max, m_max + 1):
            g = one_vertex_graph(n, m)
            for length in (1, 2, 3):
                path = Path((g.edges[0],) * length)
                p = p_value(path)
                want = frozenset(Fraction(j, p) for j in range(p))
                if fiber_image(path, 0) != want:
                    fiber_bad.append({"n": n, "m": m, "length": length})
    return {"k_table": {"checked": n_max * (2 * m_max + 1), "mismatches": mismatches},
            "fiber": {"mismatches": fiber_bad},
            "ok": not mismatches and not fiber_bad}


# -- text rendering ---------------------------------------------------------------

def render_text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    lines = []
    if isinstance(obj, dict):
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _flat(v):
                lines.append(f"{pad}{k}:")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
    elif isinstance(obj, list):
        for v in obj:
            if isinstance(v, (dict, list)) and not _flat(v):
                lines.append(f"{pad}-")
                lines.append(render_text(v, indent + 1))
            else:
                lines.append(f"{pad}- {_inline(v)}")
    else:
        lines.append(f"{pad}{_inline(obj)}")
    return "\n".join(lines)


def _flat(v) -> bool:
    if isinstance(v, list):
        return all(not isinstance(x, (dict, list)) or (isinstance(x, list) and _flat(x)) for x in v)
    return False


def _inline(v) -> str:
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if v is None:
        return "-"
    return str(v)


def emit(obj, fmt: str, out) -> None:
    obj = _jsonable(obj)
    if fmt == "json":
        out.write(json.dumps(obj, indent=2) + "\n")
    else:
        out.write(render_text(obj) + "\n")


# -- argument parsing ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["json", "text"], default="json")
    graph_in = argparse.ArgumentParser(add_help=False)
    graph_in.add_argument("graph", nargs="?", help="graph JSON file")
    graph_in.add_argument("--batch", metavar="DIR", help="process every *.json in DIR")

    parser = argparse.ArgumentParser(prog="okgraph", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("inspect", parents=[common, graph_in], help="vertex and edge tables")
    sub.add_parser("ktheory", parents=[common, graph_in], help="K-groups and unit class")
    c = sub.add_parser("classify", parents=[common, graph_in], help="minimality and dichotomy")
    c.add_argument("--bound", type=int, default=None, help="cycle length search bound")
    r = sub.add_parser("realize", parents=[common], help="build a graph with given invariants")
    r.add_argument("--k0", required=True)
    r.add_argument("--unit", default=None)
    r.add_argument("--k1", required=True)
    r.add_argument("--route", choices=["auto", "matrix", "one_vertex"], default="auto")
    r.add_argument("--out-graph")
    r.add_argument("--out-report")
    p = sub.add_parser("present", parents=[common, graph_in], help="generator-relation data")
    p.add_argument("--toeplitz", action="store_true")
    p.add_argument("--form", choices=["reduced", "generating"], default="reduced")
    t = sub.add_parser("toeplitz", parents=[common, graph_in], help="circle-algebra profile")
    t.add_argument("--sub", help="loop-free subgraph JSON for the relative profile")
    o = sub.add_parser("oracle", parents=[common], help="one-vertex reference checks")
    o.add_argument("--n-max", type=int, default=6)
    o.add_argument("--m-max", type=int, default=6)
    return parser


def _run_graph_command(args, out) -> int:
    fn = GRAPH_COMMANDS[args.command]
    if args.batch:
        files = sorted(FsPath(args.batch).glob("*.json"))

        def one(path):
            try:
                return path.name, fn(load_graph(path), args)
            except (GraphError, ValueError) as exc:
                return path.name, {"error": str(exc)}

        with ThreadPoolExecutor() as pool:
            results = dict(pool.map(one, files))
        emit({"files": results}, args.format, out)
        return EXIT_INVALID if any("error" in v for v in results.values()) else EXIT_OK
    if not args.graph:
        raise GraphError("a graph file or --batch DIR is required")
    g = load_graph(args.graph)
    if args.command == "present" and args.format == "text":
        pres = star_presentation(g, toeplitz=args.toeplitz, form=args.form)
        out.write(render_presentation(pres) + "\n")
        return EXIT_OK
    emit(fn(g, args), args.format, out)
    return EXIT_OK


def _run_realize(args, out) -> int:
    k0 = parse_group_spec(args.k0, args.unit)
    k1 = parse_group_spec(args.k1)
    report = verify_realization(realize(k0, k1, route=args.route, verify=False))
    graph_json, report_json = realization_outputs(report)
    if args.out_graph:
        FsPath(args.out_graph).write_text(dumps(graph_json) + "\n")
    if args.out_report:
        FsPath(args.out_report).write_text(dumps(report_json) + "\n")
    emit({"graph": graph_json, "report": report_json}, args.format, out)
    return EXIT_OK if report.ok else EXIT_VERIFY


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        if args.command == "realize":
            return _run_realize(args, out)
        if args.command == "oracle":
            report = oracle_report(args.n_max, args.m_max)
            emit(report, args.format, out)
            return EXIT_OK if report["ok"] else EXIT_VERIFY
        return _run_graph_command(args, out)
    except VerificationError as exc:
        err.write(f"verification failed: {exc}\n")
        return EXIT_VERIFY
    except (GraphError, RealizationError, ValueError, KeyError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INVALID


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
