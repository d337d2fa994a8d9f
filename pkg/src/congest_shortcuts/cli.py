"""Command-line experiment driver.

Exit codes: 0 success, 1 a check failed or a simulation fault occurred,
2 usage or input errors. Column and schema definitions live in
docs/formats.md.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import audit, instances, shortcuts
from .cliquewidth import build_g_gamma_p, coord_edges_of
from .congest.aggregation import AGG_OPS, min_bandwidth_factor, partwise_aggregate
from .congest.construction import dist_build_shortcut
from .congest.programs import PROGRAMS
from .congest.sim import SimConfig, run
from .errors import InvalidArgument, ShortcutError, SimulationFault
from .graph import diameter, is_infinite, read_edge_list, write_edge_list
from .mst import CHORDAL, WeightedGraph, assign_random_weights, boruvka_distributed, kruskal_oracle, \
    mst_bandwidth_factor, phase_bound

FORMAT_VERSION = 1
SCHEMES = ("onehop", "d3", "d4")

QUALITY_COLUMNS = ["seed", "scheme", "n", "m", "parts", "large_parts", "diameter", "dilation", "congestion",
                   "quality", "congestion_le_2", "kd2_bound", "kd2_ok"]
MST_COLUMNS = ["seed", "scheme", "n", "m", "weight", "oracle_weight", "match", "phases", "phase_bound", "rounds"]
SIM_COLUMNS = ["seed", "scheme", "n", "rounds", "identify_rounds", "step1_rounds", "seed_rounds",
               "sample_rounds", "aggregate_rounds", "max_edge_bits", "B", "large_parts", "ok"]


class UsageError(Exception):
    pass


# --- helpers -------------------------------------------------------------------

def _seeds(args) -> list[int]:
    if getattr(args, "seeds", None):
        try:
            seeds = sorted({int(s) for s in args.seeds.split(",") if s.strip()})
        except ValueError:
            raise UsageError("--seeds takes a comma-separated list of integers") from None
    else:
        seeds = [args.seed]
    if not seeds:
        raise UsageError("no seeds given")
    return seeds


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("CONGEST_SHORTCUTS_THREADS", "1")))
    except ValueError:
        return 1


def _per_seed(fn, seeds):
    """Run ``fn`` for every seed; results come back sorted by seed."""
    with ThreadPoolExecutor(max_workers=min(_workers(), len(seeds))) as pool:
        results = list(pool.map(fn, seeds))
    return [r for _, r in sorted(zip(seeds, results), key=lambda sr: sr[0])]


def _load_graph(path, weighted=False):
    try:
        with open(path) as fh:
            return read_edge_list(fh, weighted=weighted)
    except (OSError, InvalidArgument) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _load_partition(path, g):
    if path is None:
        return instances.singleton_partition(g.n)
    try:
        with open(path) as fh:
            parts = instances.read_partition(fh, g.n)
        parts.validate(g)
    except (OSError, InvalidArgument) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None
    return parts


def _emit(args, command, rows, columns, extra=None):
    fmt = getattr(args, "format", "json")
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow(row)
        text = buf.getvalue()
    else:
        doc = {"version": FORMAT_VERSION, "command": command, "rows": rows}
        if extra:
            doc.update(extra)
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _num(x):
    return "INFINITE" if is_infinite(x) else x


def _sc_config(args, seed):
    return shortcuts.ShortcutConfig(seed=seed, large_threshold_override=args.large_threshold,
                                    strict_diameter=not getattr(args, "allow_diameter_mismatch", False))


def _build(g, parts, scheme, cfg):
    if scheme == "onehop":
        return shortcuts.one_hop_extension(g, parts), set(range(len(parts)))
    d = 3 if scheme == "d3" else 4
    large = shortcuts.identify_large_parts(g, parts, d, cfg)
    builder = shortcuts.build_shortcut_d3 if d == 3 else shortcuts.build_shortcut_d4
    return builder(g, parts, cfg, large=large), large


# --- subcommands -----------------------------------------------------------------

def cmd_generate(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    witness = None
    if args.family == "kchordal":
        inst = instances.gen_k_chordal(args.k, args.x, args.N)
        g, id_map_json = inst.graph, inst.id_map_json()
        D = args.x + inst.K
        if D > 2 * inst.K:
            witness = audit.build_lb_witness_kchordal(inst, D)
        part_src = inst
    elif args.family == "cliquewidth6":
        if args.via_expression:
            lg = build_g_gamma_p(args.gamma, args.p)
            ng = instances.gen_clique_width_direct(args.gamma, args.p)
            if lg.coord_edges() != coord_edges_of(ng.graph, ng.id_map):
                print("error: expression build disagrees with the direct construction", file=sys.stderr)
                return 1
        ng = instances.gen_clique_width_direct(args.gamma, args.p)
        g, id_map_json = ng.graph, ng.id_map_json()
        witness = audit.build_lb_witness_cw(args.gamma, args.p)
        part_src = None
    else:
        g = instances.gen_diameter_d_graph(args.n, args.d, seed=args.seed)
        id_map_json = json.dumps({"version": FORMAT_VERSION, "ids": {str(v): v for v in range(g.n)}})
        part_src = None
    with open(out / "graph.txt", "w") as fh:
        write_edge_list(g, fh)
    (out / "id_map.json").write_text(id_map_json + "\n")
    if witness is not None:
        (out / "witness.json").write_text(json.dumps(witness.to_dict()) + "\n")
    if args.weights_seed is not None:
        wg = assign_random_weights(g, args.weights_seed)
        with open(out / "weighted.txt", "w") as fh:
            write_edge_list(g, fh, wg.weights)
    if args.parts is not None:
        if args.parts == 0 and part_src is not None:
            parts = instances.partition_into_path_parts(part_src, 1)
        else:
            parts = instances.gen_random_connected_partition(g, args.parts, args.seed)
        with open(out / "partition.txt", "w") as fh:
            instances.write_partition(parts, fh)
    print(json.dumps({"version": FORMAT_VERSION, "n": g.n, "m": g.m, "out": str(out),
                      "witness": witness is not None}))
    return 0


def cmd_quality(args) -> int:
    g = _load_graph(args.graph)
    parts = _load_partition(args.partition, g)
    diam = diameter(g)

    def one(seed):
        cfg = _sc_config(args, seed)
        sc, large = _build(g, parts, args.scheme, cfg)
        rep = audit.measure(g, parts, sc)
        row = {"seed": seed, "scheme": args.scheme, "n": g.n, "m": g.m, "parts": len(parts),
               "large_parts": len(large), "diameter": _num(diam), "dilation": _num(rep.dilation),
               "congestion": rep.congestion, "quality": _num(rep.quality),
               "congestion_le_2": "y" if rep.congestion <= 2 else "n", "kd2_bound": "", "kd2_ok": ""}
        if args.k is not None and not is_infinite(diam):
            bound = args.k * diam + 2
            row["kd2_bound"] = bound
            ok = not is_infinite(rep.dilation) and rep.dilation <= bound
            row["kd2_ok"] = "y" if ok else "n"
        return row

    rows = _per_seed(one, _seeds(args))
    _emit(args, "quality", rows, QUALITY_COLUMNS)
    return 0


def cmd_simulate(args) -> int:
    g = _load_graph(args.graph)
    parts = _load_partition(args.partition, g)

    def one(seed):
        cfg = SimConfig(bandwidth_factor=args.bandwidth_factor, max_rounds=args.max_rounds, seed=seed,
                        record_edge_bits=args.trace is not None)
        agg_rounds = 0
        if args.program:
            trace = run(args.program, g, parts, cfg, phase=args.program)
            large = 0
            ok = trace.bandwidth_ok()
        elif args.scheme == "onehop":
            from .congest.programs import AnnounceParts
            trace = run(AnnounceParts, g, parts, cfg, inputs=[True] * g.n, phase="step1")
            large = len(parts)
            ok = trace.bandwidth_ok()
        else:
            d = 3 if args.scheme == "d3" else 4
            sc, trace = dist_build_shortcut(g, parts, d, cfg, _sc_config(args, seed))
            large = sum(1 for s in sc.step1 if s)
            ok = trace.bandwidth_ok()
            if args.aggregate:
                inputs = [v for v in range(g.n)]
                if args.aggregate == "id-of-min":
                    inputs = [(v, v) for v in range(g.n)]
                factor = max(args.bandwidth_factor,
                             min_bandwidth_factor(g.n, AGG_OPS[args.aggregate].value_bits(inputs)))
                res = partwise_aggregate(g, parts, sc, args.aggregate, inputs, cfg.with_(bandwidth_factor=factor))
                from .congest.aggregation import aggregation_fold_oracle
                ok = ok and res.outputs == aggregation_fold_oracle(parts, args.aggregate, inputs)
                agg_rounds = res.trace.rounds_used
        if args.trace is not None:
            Path(f"{args.trace}.{seed}.jsonl").write_text(trace.to_jsonl())
            Path(f"{args.trace}.{seed}.summary.json").write_text(trace.to_json() + "\n")
        ph = trace.phases
        return {"seed": seed, "scheme": args.program or args.scheme, "n": g.n, "rounds": trace.rounds_used,
                "identify_rounds": ph.get("identify", 0), "step1_rounds": ph.get("step1", 0),
                "seed_rounds": ph.get("seed", 0), "sample_rounds": ph.get("sample", 0),
                "aggregate_rounds": agg_rounds, "max_edge_bits": trace.max_edge_bits,
                "B": trace.B, "large_parts": large, "ok": ok}

    rows = _per_seed(one, _seeds(args))
    _emit(args, "simulate", rows, SIM_COLUMNS)
    return 0 if all(r["ok"] for r in rows) else 1


def cmd_mst(args) -> int:
    if args.weighted:
        g, weights = _load_graph(args.graph, weighted=True)
        fixed = WeightedGraph(g, weights)
    else:
        g, fixed = _load_graph(args.graph), None
    scheme = {"onehop": CHORDAL, "d3": 3, "d4": 4}[args.scheme]

    def one(seed):
        wg = fixed if fixed is not None else assign_random_weights(g, seed)
        factor = max(args.bandwidth_factor, mst_bandwidth_factor(wg))
        cfg = SimConfig(bandwidth_factor=factor, max_rounds=args.max_rounds, seed=seed, record_edge_bits=False)
        res = boruvka_distributed(wg, scheme, cfg, _sc_config(args, seed))
        oracle = kruskal_oracle(wg)
        return {"seed": seed, "scheme": args.scheme, "n": g.n, "m": g.m, "weight": res.weight,
                "oracle_weight": oracle.weight, "match": res.edges == oracle.edges, "phases": res.phases,
                "phase_bound": phase_bound(g.n), "rounds": sum(t.rounds_used for t in res.traces)}

    rows = _per_seed(one, _seeds(args))
    _emit(args, "mst", rows, MST_COLUMNS)
    return 0 if all(r["match"] and r["phases"] <= r["phase_bound"] for r in rows) else 1


def cmd_verify(args) -> int:
    g = _load_graph(args.graph)
    report = {"version": FORMAT_VERSION, "command": "verify"}
    ok = True
    if args.lb_class:
        if not args.witness:
            raise UsageError("--lb-class needs --witness")
        try:
            doc = json.loads(Path(args.witness).read_text())
        except (OSError, ValueError) as exc:
            raise UsageError(f"cannot read witness: {exc}") from None
        w = audit.LbWitness.from_dict(doc)
        res = audit.verify_lb_class(g, w)
        report["lb_class"] = res.to_dict()
        report["predicted_lb_rounds"] = str(audit.predicted_lb_rounds(w.b, w.l, w.c))
        ok = ok and res.ok
    if args.chordal is not None:
        good = audit.verify_chordality(g, args.chordal, args.node_cap)
        report["chordal"] = {"k": args.chordal, "ok": good}
        ok = ok and good
    if args.diameter_at_most is not None:
        d = diameter(g)
        good = not is_infinite(d) and d <= args.diameter_at_most
        report["diameter"] = {"value": _num(d), "bound": args.diameter_at_most, "ok": good}
        ok = ok and good
    if len(report) == 2:
        raise UsageError("nothing to verify; pass --lb-class, --chordal or --diameter-at-most")
    report["ok"] = ok
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if ok else 1


# --- parser -------------------------------------------------------------------------

def _common(p, seeds=True, scheme=True):
    p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--partition", help="partition file (default: singleton parts)")
    if scheme:
        p.add_argument("--scheme", choices=SCHEMES, default="onehop")
    if seeds:
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--seeds", help="comma-separated seeds (overrides --seed)")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--large-threshold", type=int, default=None, help="override the large-part threshold")
    p.add_argument("--allow-diameter-mismatch", action="store_true",
                   help="warn instead of failing when the graph diameter does not match the scheme")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="congest-shortcuts", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write an instance to a directory")
    g.add_argument("family", choices=("kchordal", "cliquewidth6", "random-diam"))
    g.add_argument("--k", type=int, default=4)
    g.add_argument("--x", type=int, default=2)
    g.add_argument("--N", type=int, default=3)
    g.add_argument("--gamma", type=int, default=2)
    g.add_argument("--p", type=int, default=1)
    g.add_argument("--via-expression", action="store_true",
                   help="also build the clique-width expression and check it matches")
    g.add_argument("--n", type=int, default=64)
    g.add_argument("--d", type=int, default=3)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--parts", type=int, default=None,
                   help="also write a random connected partition with this many parts (0: one part per row)")
    g.add_argument("--weights-seed", type=int, default=None, help="also write weighted.txt")
    g.add_argument("--out", required=True, help="output directory")
    g.set_defaults(func=cmd_generate)

    q = sub.add_parser("quality", help="build shortcuts and measure their quality")
    _common(q)
    q.add_argument("--k", type=int, default=None, help="check the k*D+2 dilation bound")
    q.set_defaults(func=cmd_quality)

    s = sub.add_parser("simulate", help="run the distributed construction on the simulator")
    _common(s)
    s.add_argument("--bandwidth-factor", type=int, default=1)
    s.add_argument("--max-rounds", type=int, default=100_000)
    s.add_argument("--program", choices=sorted(PROGRAMS), help="run a registered node program instead")
    s.add_argument("--aggregate", choices=sorted(AGG_OPS), help="follow up with partwise aggregation")
    s.add_argument("--trace", help="write TRACE.<seed>.jsonl and TRACE.<seed>.summary.json")
    s.set_defaults(func=cmd_simulate)

    m = sub.add_parser("mst", help="distributed Boruvka against the Kruskal oracle")
    _common(m)
    m.add_argument("--weighted", action="store_true", help="graph file carries weights")
    m.add_argument("--bandwidth-factor", type=int, default=1)
    m.add_argument("--max-rounds", type=int, default=1_000_000)
    m.set_defaults(func=cmd_mst)

    v = sub.add_parser("verify", help="check lower-bound class membership, chordality or diameter")
    v.add_argument("--graph", required=True)
    v.add_argument("--lb-class", action="store_true")
    v.add_argument("--witness")
    v.add_argument("--chordal", type=int, default=None, metavar="K")
    v.add_argument("--node-cap", type=int, default=48)
    v.add_argument("--diameter-at-most", type=int, default=None)
    v.add_argument("--out")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SimulationFault as exc:
        print(f"simulation fault: {exc}", file=sys.stderr)
        sys.stdout.write(json.dumps({"version": FORMAT_VERSION, "fault": exc.to_dict()}) + "\n")
        return 1
    except InvalidArgument as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ShortcutError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.stdout.write(json.dumps({"version": FORMAT_VERSION, "error": type(exc).__name__,
                                     "message": str(exc)}) + "\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
