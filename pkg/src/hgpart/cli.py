"""Command-line entry point: ``hgpart <subcommand> [flags]``.

Exit status is 0 on success, 1 on domain errors (bad input files,
infeasible results) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io as hio
from .bench import Comparison, ComponentSpec, dumps_json, emit_report, generate_mixture, run_trials
from .coarsening import CoarseningConfig
from .embedding import FOBEEmbedding, HOBEEmbedding
from .embedding.table import EmbeddingTable
from .initial import InitialConfig
from .partitioner import VCycleConfig, run

FORMATS = ("hgr", "mtx")


class DomainError(Exception):
    pass


def _format_of(path: str, explicit: str | None = None) -> str:
    if explicit:
        return explicit
    return "mtx" if Path(path).suffix.lower() == ".mtx" else "hgr"


def _load_hypergraph(path: str, transpose: bool = False, fmt: str | None = None):
    if _format_of(path, fmt) == "mtx":
        return hio.load_matrix_market(path, transpose=transpose)
    if transpose:
        raise DomainError("--transpose only applies to MatrixMarket input")
    return hio.load_hmetis(path)


def _write_text(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(text)


def _component(text: str) -> ComponentSpec:
    try:
        nodes, edges, size = text.split(":")
        return ComponentSpec(int(nodes), int(edges), float(size))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NODES:EDGES:MEAN_SIZE, got {text!r}") from None


def _add_input(p: argparse.ArgumentParser, required: bool = True) -> None:
    p.add_argument("--hypergraph", required=required, help=".hgr (hMetis) or .mtx (MatrixMarket) file")
    p.add_argument("--transpose", action="store_true", help="treat MatrixMarket columns as nodes")


def _add_partition_flags(p: argparse.ArgumentParser, with_strategy: bool) -> None:
    _add_input(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--objective", choices=("cut", "km1"), default="km1")
    p.add_argument("--coarsener", choices=("embedding", "heavy-edge"), default="embedding")
    p.add_argument("--embedding", help="embedding file (required by the embedding coarsener)")
    p.add_argument("--imbalance", type=float, default=0.03)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("logn", "nlevel"), default="logn")
    p.add_argument("--attempts", type=int, default=10, help="initial partitioning attempts")
    p.add_argument("--out", help="partition file (default: stdout)")
    p.add_argument("--report", help="JSON report path")
    if with_strategy:
        group = p.add_mutually_exclusive_group()
        group.add_argument("--kway", dest="strategy", action="store_const", const="kway")
        group.add_argument("--rb", dest="strategy", action="store_const", const="rb")
        p.set_defaults(strategy="kway")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hgpart", description="Multilevel hypergraph partitioning.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")

    p = sub.add_parser("convert", help="convert between .hgr and .mtx")
    p.add_argument("--from", dest="src_format", choices=FORMATS)
    p.add_argument("--to", dest="dst_format", choices=FORMATS, required=True)
    p.add_argument("--in", dest="src", required=True)
    p.add_argument("--out")
    p.add_argument("--transpose", action="store_true")

    p = sub.add_parser("embed", help="train a node embedding")
    _add_input(p)
    p.add_argument("--method", choices=("hobe", "fobe"), default="hobe")
    p.add_argument("--dims", type=int, default=100)
    p.add_argument("--epochs", type=int, default=10)
    p.add_argument("--learning-rate", type=float, default=0.025)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")

    _add_partition_flags(sub.add_parser("partition", help="k-way partition"), with_strategy=True)
    _add_partition_flags(sub.add_parser("bisect", help="partition by recursive bisection"), with_strategy=False)

    p = sub.add_parser("bench", help="embedding vs heavy-edge coarsening over seeded trials")
    p.add_argument("--hypergraph", nargs="+", required=True)
    p.add_argument("--embedding", nargs="+", help="one embedding file per hypergraph; trained with HOBE if omitted")
    p.add_argument("--transpose", action="store_true")
    p.add_argument("--k", type=int, nargs="+", default=[2, 4, 8])
    p.add_argument("--objective", choices=("cut", "km1"), nargs="+", default=["km1"])
    p.add_argument("--imbalance", type=float, default=0.03)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--dims", type=int, default=100)
    p.add_argument("--mode", choices=("logn", "nlevel"), default="logn")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--csv", help="per-trial CSV (default: stdout)")
    p.add_argument("--json", dest="json_path", help="improvement report JSON")

    p = sub.add_parser("gen-mixture", help="generate a synthetic mixture hypergraph")
    p.add_argument("--component", type=_component, action="append", required=True, metavar="N:E:SIZE")
    p.add_argument("--cross", type=float, default=0.005)
    p.add_argument("--noise", type=float, default=0.005)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help=".hgr path; parameters go to a .json sidecar")
    return parser


def _partition(args, strategy: str) -> int:
    if args.coarsener == "embedding" and not args.embedding:
        raise _UsageError("--coarsener embedding requires --embedding")
    h = _load_hypergraph(args.hypergraph, args.transpose)
    eps = hio.load_embedding(args.embedding, h.num_nodes) if args.coarsener == "embedding" else None
    cfg = VCycleConfig(
        k=args.k,
        objective=args.objective,
        alpha=args.imbalance,
        coarsening=CoarseningConfig(mode=args.mode, scorer=args.coarsener),
        initial=InitialConfig(attempts=args.attempts),
        seed=args.seed,
        mode="recursive-bisection" if strategy == "rb" else "direct-kway",
    )
    rep = run(h, eps, cfg)
    _write_text(hio.format_partition(rep.labels), args.out)
    if args.report:
        _write_text(dumps_json(rep.as_dict(include_times=False)) + "\n", args.report)
    print(
        f"{rep.objective}={rep.objective_value} imbalance={rep.imbalance:.4f} levels={rep.levels}",
        file=sys.stderr,
    )
    if not rep.feasible:
        raise DomainError(f"no partition within imbalance {args.imbalance} was found")
    return 0


def _convert(args) -> int:
    src_format = _format_of(args.src, args.src_format)
    if args.transpose and src_format != "mtx":
        raise _UsageError("--transpose only applies to --from mtx")
    h = _load_hypergraph(args.src, args.transpose, src_format)
    text = hio.format_matrix_market(h) if args.dst_format == "mtx" else hio.format_hmetis(h)
    _write_text(text, args.out)
    return 0


def _embed(args) -> int:
    h = _load_hypergraph(args.hypergraph, args.transpose)
    cls = HOBEEmbedding if args.method == "hobe" else FOBEEmbedding
    est = cls(dims=args.dims, epochs=args.epochs, learning_rate=args.learning_rate, random_state=args.seed)
    _write_text(hio.format_embedding(EmbeddingTable(est.fit_transform(h))), args.out)
    return 0


def _bench(args) -> int:
    if args.embedding and len(args.embedding) != len(args.hypergraph):
        raise _UsageError("--embedding needs one file per --hypergraph")
    records = []
    for i, path in enumerate(args.hypergraph):
        h = _load_hypergraph(path, args.transpose)
        if args.embedding:
            eps = hio.load_embedding(args.embedding[i], h.num_nodes)
        else:
            eps = EmbeddingTable(HOBEEmbedding(dims=args.dims, random_state=args.seed).fit_transform(h))
        graph_id = Path(path).stem
        for objective in args.objective:
            for k in args.k:
                for scorer in ("embedding", "heavy-edge"):
                    cfg = VCycleConfig(
                        k=k,
                        objective=objective,
                        alpha=args.imbalance,
                        coarsening=CoarseningConfig(mode=args.mode, scorer=scorer),
                    )
                    records += run_trials(h, cfg, args.trials, args.seed, eps, graph_id, scorer, args.jobs)
    csv_text, _ = emit_report(records, [Comparison("embedding", "heavy-edge")], None, args.json_path)
    _write_text(csv_text, args.csv)
    return 0


def _gen_mixture(args) -> int:
    h = generate_mixture(args.component, args.cross, args.noise, args.seed)
    hio.write_hmetis(h, args.out)
    sidecar = {
        "components": [[c.nodes, c.edges, c.mean_edge_size] for c in args.component],
        "cross_fraction": args.cross,
        "noise_fraction": args.noise,
        "seed": args.seed,
        "num_nodes": h.num_nodes,
        "num_edges": h.num_edges,
    }
    _write_text(dumps_json(sidecar) + "\n", str(Path(args.out).with_suffix(".json")))
    return 0


class _UsageError(Exception):
    pass


COMMANDS = {
    "convert": _convert,
    "embed": _embed,
    "partition": lambda a: _partition(a, a.strategy),
    "bisect": lambda a: _partition(a, "rb"),
    "bench": _bench,
    "gen-mixture": _gen_mixture,
}


def run_cli(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except _UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"hgpart {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, ValueError, OSError) as exc:
        print(f"hgpart {args.command}: {exc}", file=sys.stderr)
        return 1


def main(argv: list[str] | None = None) -> None:
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
