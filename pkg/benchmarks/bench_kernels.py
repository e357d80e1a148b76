"""Compare the compiled and pure-Python bitset kernels.

    python benchmarks/bench_kernels.py [--repeat 3] [--quick]

Each workload runs on both backends; results must agree before timings are
reported.
"""

import argparse
import time

from indturan.generators import gnp, paley
from indturan.kernels import backends


def _time(fn, repeat):
    best = float("inf")
    out = None
    for _ in range(repeat):
        start = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - start)
    return best, out


def workloads(quick):
    n_pair = 16 if quick else 24
    G_pair = gnp(n_pair, 0.5, 1)
    G_clique = gnp(120 if quick else 200, 0.5, 2)
    G_counts = gnp(400, 0.5, 3)
    P = paley(49 if quick else 101)
    mask = sum(1 << v for v in range(0, G_counts.n, 3))
    return [
        (f"best_t_pair gnp({n_pair}) t=4", lambda k: k.best_t_pair(G_pair, 4)[0]),
        (f"max_clique gnp({G_clique.n}, 0.5)", lambda k: k.max_clique(G_clique)[0]),
        (f"max_clique paley({P.n})", lambda k: k.max_clique(P)[0]),
        ("counts_into gnp(400) x200", lambda k: sum(sum(k.counts_into(G_counts, mask)) for _ in range(200))),
        ("pair_count gnp(400) x200", lambda k: sum(k.pair_count(G_counts, range(200), mask) for _ in range(200))),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true")
    args = ap.parse_args()
    found = backends()
    if "cython" not in found:
        print("compiled backend not importable; only timing the Python fallback")
    names = [n for n in ("cython", "python") if n in found]
    print(f"{'workload':34s} " + " ".join(f"{n:>10s}" for n in names) + "   speedup")
    for label, run in workloads(args.quick):
        times, results = [], []
        for name in names:
            t, out = _time(lambda: run(found[name]), args.repeat)
            times.append(t)
            results.append(out)
        if len(set(results)) != 1:
            raise SystemExit(f"{label}: backends disagree: {dict(zip(names, results))}")
        speed = f"{times[-1] / times[0]:8.1f}x" if len(times) == 2 and times[0] > 0 else ""
        print(f"{label:34s} " + " ".join(f"{t:9.4f}s" for t in times) + f"  {speed}")


if __name__ == "__main__":
    main()
