"""Command-line interface: ``funclust <command> ...``.

Usage errors exit with status 2, library errors with status 1 and the error
class name on stderr. Numbers are printed with 12 significant digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import networkx as nx

from .convergence import convergence_experiment, parse_shape, rows_to_csv, stability_experiment
from .errors import FunclustError
from .functorial import check_conditions, counterexample_search, cover_cluster_graph, get_scheme
from .gh import EXACT_LIMIT, gh_exact, gh_lower_bound
from .io import metric_to_csv, read_metric_csv, read_points_csv
from .linkage import LinkageRule, agglomerate
from .metric import from_points
from .persistence import fmt_num, to_dot, to_json, to_text
from .ultrametric import epsilon_metric
from .zigzag import bootstrap_zigzag, interval_decomposition, linearize


def _ints(text: str) -> list[int]:
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _rounded(doc):
    """Round every float in a JSON document to 12 significant digits."""
    if isinstance(doc, float):
        return float(fmt_num(doc)) if doc == doc and abs(doc) != float("inf") else None
    if isinstance(doc, dict):
        return {k: _rounded(v) for k, v in doc.items()}
    if isinstance(doc, (list, tuple)):
        return [_rounded(v) for v in doc]
    return doc


def _json(doc) -> str:
    return json.dumps(_rounded(doc), indent=2) + "\n"


# commands -------------------------------------------------------------------------

def cmd_cluster(args) -> int:
    X = read_metric_csv(args.input)
    D = agglomerate(X, LinkageRule(args.linkage))
    fmt = args.format or "text"
    if fmt == "text":
        _emit(to_text(D), args.out)
    elif fmt == "json":
        _emit(to_json(D), args.out)
    else:
        _emit(to_dot(D), args.out)
    return 0


def cmd_ultrametric(args) -> int:
    X = read_metric_csv(args.input, pseudo=True)
    U = epsilon_metric(X)
    if (args.format or "csv") == "json":
        _emit(_json({"labels": [str(x) for x in U.labels],
                     "dist": [[float(fmt_num(v)) for v in row] for row in U.dist]}), args.out)
    else:
        _emit(metric_to_csv(U), args.out)
    return 0


def cmd_gh(args) -> int:
    X, Y = read_metric_csv(args.a, pseudo=True), read_metric_csv(args.b, pseudo=True)
    if args.bound:
        value, result = gh_lower_bound(X, Y), None
    else:
        result = gh_exact(X, Y, args.limit, witness=True)
        value = result.value
    if (args.format or "text") == "json":
        doc = {"value": float(fmt_num(value)), "kind": "lower-bound" if args.bound else "exact"}
        if args.witness and result is not None:
            doc["correspondence"] = [[str(x), str(y)] for x, y in result.correspondence]
        _emit(_json(doc), args.out)
        return 0
    lines = [fmt_num(value)]
    if args.witness and result is not None:
        lines += [f"{x} {y}" for x, y in result.correspondence]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def cmd_stability(args) -> int:
    rows = stability_experiment(parse_shape(args.spec), args.sizes, args.seeds)
    _emit(rows_to_csv(rows), args.out)
    return 0 if all(r.passed for r in rows) else 1


def cmd_converge(args) -> int:
    rows = convergence_experiment(parse_shape(args.spec), args.sizes, args.seeds)
    _emit(rows_to_csv(rows), args.out)
    return 0 if all(r.passed for r in rows) else 1


def cmd_zigzag(args) -> int:
    X = read_metric_csv(args.input)
    D = bootstrap_zigzag(X, args.n, args.N, args.eps, args.seed)
    B = interval_decomposition(linearize(D))
    if (args.format or "text") == "json":
        _emit(_json({"diagram": D.to_dict(), "barcode": [list(b) for b in B]}), args.out)
    else:
        _emit(B.to_text(), args.out)
    if args.diagram:
        Path(args.diagram).write_text(_json(D.to_dict()))
    return 0


def cmd_check(args) -> int:
    scheme = get_scheme(args.scheme)
    doc = {"scheme": scheme.name}
    if args.conditions or not args.search:
        rep = check_conditions(scheme, trials=args.trials, seed=args.seed)
        doc["conditions"] = rep.to_dict()["conditions"]
    if args.search:
        w = counterexample_search(scheme, max_n=args.max_n, trials=args.trials, seed=args.seed,
                                  morphisms=args.morphisms, threads=args.threads)
        doc["search"] = {"morphisms": args.morphisms, "trials": args.trials,
                         "witness": None if w is None else w.to_dict()}
    _emit(_json(doc), args.out)
    return 0


def cmd_mapper(args) -> int:
    pts = read_points_csv(args.input)
    X = from_points(pts)
    lens = pts[:, args.lens_column]
    lo, hi = float(lens.min()), float(lens.max())
    width = (hi - lo) / args.intervals if hi > lo else 1.0
    pad = args.overlap * width / 2
    intervals = [(lo + k * width - pad, lo + (k + 1) * width + pad) for k in range(args.intervals)]
    G = cover_cluster_graph(X, lens, intervals, args.eps)
    names = {v: f"{v[0]}:{v[1] if v[0] == 'cover' else '-'.join(map(str, v[1]))}:{','.join(map(str, v[2]))}"
             for v in G.nodes}
    if (args.format or "json") == "dot":
        H = nx.relabel_nodes(G, names)
        lines = ["graph cover_clusters {"] + [f'  "{v}";' for v in sorted(H.nodes)]
        lines += [f'  "{a}" -- "{b}";' for a, b in sorted(tuple(sorted(e)) for e in H.edges)]
        _emit("\n".join(lines + ["}"]) + "\n", args.out)
    else:
        doc = {
            "intervals": [[float(fmt_num(a)), float(fmt_num(b))] for a, b in intervals],
            "nodes": sorted(names.values()),
            "edges": sorted(sorted((names[a], names[b])) for a, b in G.edges),
            "components": nx.number_connected_components(G),
        }
        _emit(_json(doc), args.out)
    return 0


# parser -----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="funclust", description="Functorial hierarchical clustering tools.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats):
        sp.add_argument("--format", choices=formats, help="output format")
        sp.add_argument("--out", help="write output to this file instead of stdout")
        sp.add_argument("--threads", type=int, default=1, help="worker cap for parallel stages")

    sp = sub.add_parser("cluster", help="dendrogram of a metric CSV")
    sp.add_argument("input", help="metric or point-cloud CSV")
    sp.add_argument("--linkage", choices=[r.value for r in LinkageRule], default="single")
    common(sp, ["text", "json", "dot"])
    sp.set_defaults(func=cmd_cluster)

    sp = sub.add_parser("ultrametric", help="minimax ultrametric of a metric CSV")
    sp.add_argument("input")
    common(sp, ["csv", "json"])
    sp.set_defaults(func=cmd_ultrametric)

    sp = sub.add_parser("gh", help="Gromov-Hausdorff distance (no 1/2 factor) between two metric CSVs")
    sp.add_argument("a")
    sp.add_argument("b")
    mode = sp.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="exhaustive search (default)")
    mode.add_argument("--bound", action="store_true", help="cheap lower bound")
    sp.add_argument("--witness", action="store_true", help="also print an optimal correspondence")
    sp.add_argument("--limit", type=int, default=EXACT_LIMIT, help="largest |X|+|Y| for --exact")
    common(sp, ["text", "json"])
    sp.set_defaults(func=cmd_gh)

    for name, func, helptext in (("stability", cmd_stability, "stability bound table"),
                                 ("converge", cmd_converge, "convergence to the component space")):
        sp = sub.add_parser(name, help=helptext)
        sp.add_argument("--spec", required=True,
                        help="shape, e.g. circle:radius=1 or disks3:w13=4,w23=6,w12=11,radius=1")
        sp.add_argument("--sizes", type=_ints, required=True, help="comma-separated sample sizes")
        sp.add_argument("--seeds", type=_ints, required=True, help="comma-separated seeds")
        common(sp, ["csv"])
        sp.set_defaults(func=func)

    sp = sub.add_parser("zigzag", help="bootstrap zig-zag barcode")
    sp.add_argument("input", help="metric or point-cloud CSV")
    sp.add_argument("--n", type=int, required=True, help="points per sample (drawn with replacement)")
    sp.add_argument("--N", type=int, required=True, help="number of samples")
    sp.add_argument("--eps", type=float, required=True, help="single-linkage threshold")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--diagram", help="also write the set diagram as JSON to this file")
    common(sp, ["text", "json"])
    sp.set_defaults(func=cmd_zigzag)

    sp = sub.add_parser("check", help="functoriality checks for a clustering scheme")
    sp.add_argument("--scheme", required=True, help="rgen, single, complete, average or cardinality-<m>")
    sp.add_argument("--conditions", action="store_true", help="run the three normalisation checks")
    sp.add_argument("--search", action="store_true", help="search for a non-preserved morphism")
    sp.add_argument("--morphisms", choices=["general", "monic"], default="general")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--max-n", type=int, default=8)
    sp.add_argument("--seed", type=int, required=True)
    common(sp, ["json"])
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("mapper", help="cluster graph of an interval cover of one coordinate")
    sp.add_argument("input", help="point-cloud CSV")
    sp.add_argument("--lens-column", type=int, default=0, help="coordinate used as the lens")
    sp.add_argument("--intervals", type=int, default=4)
    sp.add_argument("--overlap", type=float, default=0.25, help="overlap as a fraction of interval width")
    sp.add_argument("--eps", type=float, required=True)
    common(sp, ["json", "dot"])
    sp.set_defaults(func=cmd_mapper)
    return p


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "threads", 1) < 1:
        parser.error("--threads must be at least 1")
    try:
        return args.func(args)
    except FunclustError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
