"""Command-line entry point: ``indturan <command> ...``."""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from . import drc, experiments, generators, lower_bounds, oracle, sparseness, trees
from .errors import InputError, InternalError, PreconditionError, ResourceError
from .graph import (
    Embedding,
    Graph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    format_edge_list,
    path_graph,
    read_edge_list,
)

ORACLE_VERTEX_CAP = 24


def _parse_params(items) -> dict:
    out = {}
    for item in items or []:
        for part in item.split(","):
            if not part:
                continue
            key, sep, value = part.partition("=")
            if not sep:
                raise InputError(f"parameter {part!r} must look like key=value")
            out[key.strip()] = value.strip()
    return out


_NAMED = re.compile(r"^([KCP])(\d+)(?:,(\d+))?$")


def load_pattern_graph(text: str) -> Graph:
    """A graph from an edge-list file or a name: K<n>, C<n>, P<n> (n vertices), K<a>,<b>."""
    path = Path(text)
    if path.exists():
        return read_edge_list(path)
    m = _NAMED.match(text.strip())
    if not m:
        raise InputError(f"{text!r} is neither a file nor a pattern name (K4, C5, P3, K2,3)")
    kind, a, b = m.group(1), int(m.group(2)), m.group(3)
    if b is not None:
        if kind != "K":
            raise InputError("only K<a>,<b> takes two sizes")
        return complete_bipartite(a, int(b))
    return {"K": complete_graph, "C": cycle_graph, "P": path_graph}[kind](a)


# -- generate --------------------------------------------------------------------


def cmd_generate(args) -> int:
    params = _parse_params(args.params)
    G = generators.generate(args.family, params, args.seed)
    header = f"family={args.family} params={','.join(f'{k}={v}' for k, v in params.items())} seed={args.seed}"
    text = format_edge_list(G, header)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- check-sparse ----------------------------------------------------------------


def cmd_check_sparse(args) -> int:
    G = read_edge_list(args.graph)
    if args.mode == "exact":
        report = sparseness.check_exact(G, args.c, args.t)
    elif args.mode == "all-sizes":
        report = sparseness.check_all_sizes(G, args.c, args.t)
    else:
        report = sparseness.refute_random(G, args.c, args.t, args.trials, args.seed)
    print(report.line())
    return {sparseness.SPARSE: 0, sparseness.VIOLATED: 1}.get(report.verdict, 2)


# -- construct-lower -------------------------------------------------------------


def cmd_construct_lower(args) -> int:
    Gamma = read_edge_list(args.graph)
    cover = sparseness.clique_cover(Gamma, args.cover)
    target = complete_bipartite(args.s, args.r)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["seed", "k", "e_aux", "e_subgraph", "guaranteed_bound", "status", "oracle_verdict"])
    for rep in range(args.seeds):
        seed = args.seed + rep
        if args.aux == "auto":
            if args.s == 2 and args.r == 2:
                F = generators.incidence_on(cover.size)
            else:
                F = generators.random_ksr_free(cover.size, args.s, args.r, seed)
        else:
            F = read_edge_list(args.aux)
        res = lower_bounds.build_random_quotient_subgraph(Gamma, cover, F, seed, s=args.s, r=args.r)
        if not res.validate(Gamma, cover):
            raise InternalError("constructed subgraph failed validation")
        if Gamma.n <= ORACLE_VERTEX_CAP:
            hits = oracle.count_induced_in(res.subgraph, res.subgraph, target)
            verdict = "clean" if hits == 0 else f"hits={hits}"
        else:
            verdict = "skipped"
        writer.writerow([seed, res.cover_size, F.edge_count, res.subgraph.edge_count,
                         repr(float(res.guaranteed_bound)), res.status, verdict])
    return 0


# -- embed -----------------------------------------------------------------------


def _load_bipartite_pattern(text: str) -> drc.BipartitePattern:
    if text.strip().startswith("bip"):
        return drc.parse_pattern(text)
    return drc.pattern_from_graph(load_pattern_graph(text))


def cmd_embed(args) -> int:
    Gamma, G = read_edge_list(args.gamma), read_edge_list(args.g)
    H = _load_bipartite_pattern(args.pattern)
    cfg = drc.DrcConfig(c=args.c, t=args.t, mode=args.mode, seed=args.seed,
                        apex_budget=args.budget, attempt_budget=args.budget)
    res, stats = drc.embed(Gamma, G, H, cfg)
    found = isinstance(res, Embedding)
    if args.json:
        payload = {
            "pattern": H.spec(),
            "found": found,
            "embedding": {str(k): v for k, v in sorted(res.assignment.items())} if found else None,
            "reject": None if found else res.reason,
        }
        payload.update(stats.as_dict())
        print(json.dumps(payload, default=float, indent=2))
    elif found:
        print("found " + " ".join(f"{k}:{v}" for k, v in sorted(res.assignment.items())))
    else:
        print(f"reject {res.reason} " + json.dumps(dict(stats.rejects)))
    return 0 if found else 1


# -- embed-tree ------------------------------------------------------------------


def cmd_embed_tree(args) -> int:
    Gamma, G = read_edge_list(args.gamma), read_edge_list(args.g)
    T = trees.LabeledTree.from_graph(load_pattern_graph(args.tree))
    schedule = trees.ConstantSchedule(T.k, args.c, C=args.C, t=args.t)
    if args.exact:
        tables = trees.lambda_exact(Gamma, G, T, args.c, schedule)
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(["subtree", "embedding", "probability", "flags"])
        for key, table in tables.items():
            label = "-".join(map(str, key))
            for phi, pr in sorted(table.outcomes.items()):
                writer.writerow([label, " ".join(map(str, phi)), repr(pr), "ok"])
            for reason, pr in sorted(table.rejects.items()):
                writer.writerow([label, "", repr(pr), reason])
        return 0
    h = trees.build_hierarchy(Gamma, G, T, args.c, schedule, seed=args.seed, mode=args.mode)
    rng = np.random.Generator(np.random.Philox(args.seed))
    counts = Counter()
    for _ in range(args.budget):
        res = h.top().draw(rng)
        if isinstance(res, Embedding):
            print("found " + " ".join(f"{k}:{v}" for k, v in sorted(res.assignment.items())))
            return 0
        counts[res.reason] += 1
    print("reject " + json.dumps(dict(counts)))
    return 1


# -- oracle ----------------------------------------------------------------------


def cmd_oracle(args) -> int:
    H = load_pattern_graph(args.pattern)
    if args.what == "count":
        Gamma = read_edge_list(args.gamma)
        G = read_edge_list(args.g) if args.g else Gamma
        print(oracle.count_induced_in(Gamma, G, H))
    elif args.what == "max-avoid":
        Gamma = read_edge_list(args.gamma)
        best, witness = oracle.max_subgraph_avoiding(Gamma, H)
        print(best)
        if args.witness:
            sys.stdout.write(format_edge_list(Graph(Gamma.n, witness)))
    else:
        if args.n is None:
            raise InputError("turan needs --n")
        print(oracle.turan_number(args.n, H))
    return 0


# -- scan ------------------------------------------------------------------------


def cmd_scan(args) -> int:
    spec = experiments.RunSpec.load(args.spec)
    out, errored = experiments.run_scan(spec, args.out, workers=args.workers)
    print(f"wrote {out}" + (" (some cells errored)" if errored else ""))
    return 1 if errored else 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="indturan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded host graph as an edge list")
    g.add_argument("--family", required=True, choices=generators.FAMILIES)
    g.add_argument("--params", nargs="*", default=[], help="key=value pairs, e.g. n=30 p=0.5")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("check-sparse", help="certify or refute (c,t)-sparseness; exit 0/1/2")
    s.add_argument("--graph", required=True)
    s.add_argument("--c", type=float, required=True)
    s.add_argument("--t", type=int, required=True)
    s.add_argument("--mode", choices=("exact", "all-sizes", "random"), default="exact")
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.set_defaults(func=cmd_check_sparse)

    c = sub.add_parser("construct-lower", help="random-quotient subgraphs; one CSV row per seed")
    c.add_argument("--graph", required=True)
    c.add_argument("--aux", default="auto", help="edge-list file or 'auto'")
    c.add_argument("--s", type=int, required=True)
    c.add_argument("--r", type=int, required=True)
    c.add_argument("--seeds", type=int, default=1)
    c.add_argument("--seed", type=int, default=0, help="first seed")
    c.add_argument("--cover", choices=("greedy", "exact-small"), default="greedy")
    c.set_defaults(func=cmd_construct_lower)

    e = sub.add_parser("embed", help="find an induced copy of a bipartite pattern")
    e.add_argument("--gamma", required=True)
    e.add_argument("--g", required=True)
    e.add_argument("--pattern", required=True, help="'bip l=.. B=.. A1=..', a name like K2,2, or a file")
    e.add_argument("--c", type=float, default=0.5)
    e.add_argument("--t", type=int, default=1)
    e.add_argument("--mode", choices=("strict", "soft"), default="soft")
    e.add_argument("--budget", type=int, default=32)
    e.add_argument("--seed", type=int, default=0)
    e.add_argument("--json", action="store_true")
    e.set_defaults(func=cmd_embed)

    t = sub.add_parser("embed-tree", help="sample a c-unique induced tree copy")
    t.add_argument("--gamma", required=True)
    t.add_argument("--g", required=True)
    t.add_argument("--tree", required=True, help="edge-list file or P<k>")
    t.add_argument("--c", type=float, required=True)
    t.add_argument("--C", type=float, default=1.0)
    t.add_argument("--t", type=int, default=1)
    t.add_argument("--mode", choices=("diagnostic", "strict"), default="diagnostic")
    t.add_argument("--budget", type=int, default=1000)
    t.add_argument("--seed", type=int, default=0)
    t.add_argument("--exact", action="store_true", help="print exact probability tables as CSV")
    t.set_defaults(func=cmd_embed_tree)

    o = sub.add_parser("oracle", help="brute-force counts and extremal numbers")
    o.add_argument("what", choices=("count", "max-avoid", "turan"))
    o.add_argument("--pattern", required=True)
    o.add_argument("--gamma")
    o.add_argument("--g")
    o.add_argument("--n", type=int)
    o.add_argument("--witness", action="store_true")
    o.set_defaults(func=cmd_oracle)

    sc = sub.add_parser("scan", help="run a TOML-described parameter scan")
    sc.add_argument("--spec", required=True)
    sc.add_argument("--out", required=True)
    sc.add_argument("--workers", type=int, help=f"overrides ${experiments.WORKERS_ENV}")
    sc.set_defaults(func=cmd_scan)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "oracle" and args.what in ("count", "max-avoid") and not args.gamma:
        print("error: oracle count/max-avoid need --gamma", file=sys.stderr)
        return 4
    try:
        return args.func(args)
    except (InputError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except ResourceError as exc:
        extra = f" (best so far: {exc.best})" if exc.best is not None else ""
        print(f"resource limit: {exc}{extra}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
