"""Acceptance criteria 1-10, each at its stated tolerance.

Every test records a one-line verdict that is printed after the run.
"""

import math
import random
import time
from math import comb

import numpy as np
import pytest
from conftest import ACCEPTANCE, random_graph, record

from indturan import drc, experiments, oracle, sparseness, trees
from indturan.generators import clique_union, gnp, paley, random_ksr_free, thin
from indturan.graph import Embedding, Graph, complete_bipartite, complete_graph, cycle_graph, is_copy_induced_in
from indturan.lower_bounds import build_random_quotient_subgraph


class Verdict:
    """Context manager: records PASS/FAIL with a detail line for one criterion."""

    def __init__(self, criterion):
        self.criterion = criterion
        self.detail = ""
        self.start = time.perf_counter()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        took = time.perf_counter() - self.start
        if exc_type is not None and issubclass(exc_type, pytest.skip.Exception):
            return False
        ok = exc_type is None
        msg = self.detail if ok else f"{self.detail} | {exc_type.__name__}: {exc}"
        record(self.criterion, ok, f"{msg} ({took:.1f}s)")
        return False


def test_criterion_01_dual_checker_agreement():
    with Verdict(1) as v:
        rnd = random.Random(2024)
        agree = 0
        start = time.perf_counter()
        for i in range(200):
            n = rnd.randint(4, 12)
            t = rnd.choice([2, 3, 4])
            c = rnd.choice([0.25, 0.5])
            G = random_graph(n, rnd.choice([0.2, 0.5, 0.8]), i)
            a = sparseness.check_all_sizes(G, c, t)
            b = sparseness.check_exact(G, c, t)
            assert a.verdict == b.verdict, (i, n, t, c, a.line(), b.line())
            agree += 1
        elapsed = time.perf_counter() - start
        v.detail = f"{agree}/200 instances agree"
        assert elapsed <= 120


def test_criterion_02_example_regressions():
    with Verdict(2) as v:
        assert sparseness.check_exact(clique_union(4, 2), 0.5, 8).verdict == sparseness.SPARSE
        assert sparseness.check_exact(complete_graph(4), 0.6, 2).verdict == sparseness.VIOLATED
        omegas = []
        for q2 in (9, 25, 49):
            P = paley(q2)
            w = sparseness.clique_number(P)
            # brute-force confirmation: a clique of size w exists and none of size w + 1
            clique = sparseness.max_clique(P)
            assert len(clique) == w and all(P.has_edge(a, b) for i, a in enumerate(clique) for b in clique[i + 1:])
            wide = oracle.OracleBudget(max_vertices=49, max_pattern=8)
            assert oracle.count_induced_in(P, P, complete_graph(w + 1), wide) == 0
            omegas.append(w)
        assert omegas == [3, 5, 7]
        v.detail = f"clique_union(4,2) sparse at (1/2,8); K4 violated at (0.6,2); paley omegas {omegas}"


def _random_windows(n, size, count, rnd):
    return [sorted(rnd.sample(range(n), size)) for _ in range(count)]


@pytest.mark.slow
def test_criterion_03_construction_is_induced_free_and_dense():
    with Verdict(3) as v:
        K23 = complete_bipartite(2, 3)
        ratios, clean = [], 0
        for seed in range(100):
            Gamma = gnp(30, 0.5, seed)
            cover = sparseness.clique_cover(Gamma)
            F = random_ksr_free(cover.size, 2, 3, seed)
            res = build_random_quotient_subgraph(Gamma, cover, F, seed, s=2, r=3)
            assert res.validate(Gamma, cover)
            G = res.subgraph
            rnd = random.Random(seed)
            hits = 0
            for window in _random_windows(30, 14, 50, rnd):
                Gw = G.induced(window)[0]
                hits += oracle.count_induced_in(Gw, Gw, K23)
            clean += hits == 0
            ratios.append((G.edge_count, float(res.guaranteed_bound)))
        mean_e = sum(e for e, _ in ratios) / 100
        mean_b = sum(b for _, b in ratios) / 100
        v.detail = f"{clean}/100 clean over 50 windows each; mean e(G) {mean_e:.1f} vs 0.9 x bound {0.9 * mean_b:.1f}"
        assert clean == 100
        assert mean_e >= 0.9 * mean_b


DRC_SUITE = [("bip l=1 B=2", 4000), ("bip l=2 B=2", 3000), ("bip l=1 B=2 A1=1", 3000)]


@pytest.mark.slow
def test_criterion_04_drc_soundness():
    with Verdict(4) as v:
        Gamma = gnp(120, 0.6, 1)
        G = thin(Gamma, 0.7, 2)
        total = violations = 0
        for spec, want in DRC_SUITE:
            H = drc.parse_pattern(spec)
            got = seed = 0
            while got < want:
                res, _ = drc.embed(Gamma, G, H, drc.DrcConfig(c=0.5, t=1, seed=seed))
                seed += 1
                if isinstance(res, Embedding):
                    got += 1
                    violations += not is_copy_induced_in(G, Gamma, H.graph, res)
                assert seed < 20 * want, f"{spec}: too few successes"
            total += got
        v.detail = f"{total} successes over K_(1,2), K_(2,2), pendant pattern; {violations} violations"
        assert total >= 10_000 and violations == 0


def _random_view(rnd):
    m, r = rnd.randint(1, 40), rnd.randint(1, 40)
    edges = []
    for u in range(m):
        # mix regular and heavy-tailed degrees so the reduction has work to do
        d = min(r, int(rnd.paretovariate(1.2))) if rnd.random() < 0.5 else rnd.randint(0, r)
        edges.extend((u, m + x) for x in rnd.sample(range(r), d))
    if not edges:
        edges.append((0, m))
    G = Graph(m + r, edges)
    return drc.BipartiteHostView(G, G, range(m), range(m, m + r))


def _star_view(hub_degree, leaves, r):
    n_u = 1 + leaves
    R = list(range(n_u, n_u + r))
    edges = [(0, x) for x in R[:hub_degree]] + [(1 + i, R[i % r]) for i in range(leaves)]
    G = Graph(n_u + r, edges)
    return drc.BipartiteHostView(G, G, range(n_u), R)


def test_criterion_05_reduction_postconditions():
    with Verdict(5) as v:
        rnd = random.Random(5)
        for _ in range(500):
            view = _random_view(rnd)
            delta = rnd.choice([0.05, 0.1, 0.2, 0.24])
            kappa = rnd.choice([1.1, 1.5, 2.0])
            d = rnd.randint(1, 3)
            out = drc.delta_reduce(view, delta, kappa, d)
            assert drc.check_reduction(view, out, delta, kappa, d)
        low = drc.delta_reduce(_star_view(100, 99, 100), 0.1, kappa=1.5, d=1)
        assert low.notes["iterations"] == 0 and low.U == list(range(1, 100))
        hub = drc.delta_reduce(_star_view(1000, 99, 1000), 0.1, kappa=1.5, d=1)
        assert hub.notes["iterations"] == 1 and hub.U == [0]
        v.detail = "500 random views plus 2 pinned irregular instances"


def _exact_on_clique_union(Gamma, r_threshold):
    # enumerate every ordered pick pair from vertex masks; independent of the samplers
    n = Gamma.n
    closed = [Gamma.mask(x) | (1 << x) for x in range(n)]
    indep = fail = 0
    for a in range(n):
        indep += n - closed[a].bit_count()
    sizes = {}
    for a in range(n):
        blocks = {}
        for b in range(n):
            size = n - (closed[a] | closed[b]).bit_count()
            blocks[size] = blocks.get(size, 0) + 1
        for size, cnt in blocks.items():
            sizes[size] = sizes.get(size, 0) + cnt
            if size < r_threshold:
                fail += cnt
    return indep / n**2, fail / n**2, sizes


@pytest.mark.slow
def test_criterion_06_sampler_bounds_on_clique_union():
    with Verdict(6) as v:
        c, t, trials = 0.5, 8, 100_000
        Gamma = clique_union(1024, 2)
        V = range(Gamma.n)
        n = Gamma.n
        p_ind, p_fail, sizes = _exact_on_clique_union(Gamma, c**2 * n)
        # closed forms: the second pick must avoid the first and its clique-mate
        assert abs(p_ind - (n - 2) / n) < 1e-6
        assert abs(p_fail - 0.0) < 1e-6
        assert sizes == {n - 2: 2 * n, n - 4: n * (n - 2)}
        rng = np.random.Generator(np.random.Philox(6))
        succ = sum(not isinstance(drc.sample_independent_tuple(Gamma, [V, V], rng), drc.Reject) for _ in range(trials))
        fails = sum(len(drc.sample_nonneighbor_survivors(Gamma, V, V, 2, rng)[1]) < c**2 * n for _ in range(trials))
        f_succ, f_fail = succ / trials, fails / trials
        sd_succ = math.sqrt(p_ind * (1 - p_ind) / trials)
        lower = c ** (2**2)
        upper = 2 * t / n
        v.detail = (f"independent pair {f_succ:.5f} (exact {p_ind:.5f}, bound >= {lower}); "
                    f"survivor failure {f_fail:.5f} (exact 0, bound <= {upper:.5f})")
        assert f_succ >= lower - 3 * sd_succ
        assert abs(f_succ - p_ind) <= 3 * sd_succ + 1e-12
        assert f_fail <= upper + 3 * math.sqrt(upper * (1 - upper) / trials)


TREE_SUITE = [
    trees.LabeledTree(3, [(0, 1), (1, 2)]),
    trees.LabeledTree(4, [(0, 1), (1, 2), (2, 3)]),
    trees.LabeledTree(4, [(0, 1), (0, 2), (0, 3)]),
]


@pytest.mark.slow
def test_criterion_07_tree_sampler():
    with Verdict(7) as v:
        G6 = Graph(6, [(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)])
        for c in (0.25, 0.5):
            for T in TREE_SUITE:
                for table in trees.lambda_exact(G6, G6, T, c).values():
                    assert abs(table.total() - 1.0) <= 1e-12
        draws = bad = 0
        hosts = [gnp(200, 0.05, 11), gnp(120, 0.1, 12), gnp(60, 0.15, 13)]
        per = 10_000 // (len(hosts) * len(TREE_SUITE)) + 1
        for h_i, host in enumerate(hosts):
            for T in TREE_SUITE:
                schedule = trees.ConstantSchedule(T.k, 0.3, C=1000.0)
                h = trees.build_hierarchy(host, host, T, 0.3, schedule, seed=h_i, calibration=200, peel=False)
                rng = np.random.Generator(np.random.Philox(h_i))
                got = 0
                for _ in range(100 * per):
                    res = h.top().draw(rng)
                    if isinstance(res, Embedding):
                        got += 1
                        phi = tuple(res.assignment[k] for k in range(T.k))
                        bad += not (is_copy_induced_in(host, host, T.graph, res.assignment)
                                    and trees.is_c_unique(host, host, phi, 0.3))
                        if got == per:
                            break
                assert got == per, f"host {h_i}, tree {T.k}: only {got} draws"
                draws += got
        peel_ok = sum(trees.check_peeling(T, trees.build_peeling(T)) for k in range(1, 9) for T in trees.all_trees(k))
        peel_total = sum(max(1, k ** (k - 2)) for k in range(1, 9))
        v.detail = f"mass conserved; {draws} draws, {bad} not induced or c-unique; peeling valid on {peel_ok}/{peel_total} trees"
        assert draws >= 10_000 and bad == 0 and peel_ok == peel_total


def test_criterion_08_oracle_self_consistency():
    with Verdict(8) as v:
        K2 = complete_graph(2)
        for i in range(100):
            G = random_graph(random.Random(i).randint(2, 14), 0.4, 800 + i)
            assert oracle.count_induced_in(G, G, K2) == 2 * G.edge_count
        C4 = cycle_graph(4)
        best, _ = oracle.max_subgraph_avoiding(C4, C4)
        assert best == 3
        assert oracle.turan_number(5, complete_graph(3)) == 6
        v.detail = "K2 counts = 2e(G) on 100 graphs; max-avoid(C4, C4) = 3; ex(5, K3) = 6"


@pytest.mark.slow
def test_criterion_09_construction_slope():
    with Verdict(9) as v:
        spec = experiments.RunSpec(
            "construction-scaling", family="gnp", grid={"n": [128, 256, 512, 1024], "p": [0.5]},
            constants={"s": 2, "r": 2, "aux": "incidence"}, seeds=5,
        )
        start = time.perf_counter()
        _, rows = experiments.scan_construction_scaling(spec)
        elapsed = time.perf_counter() - start
        assert not any(r["error"] for r in rows)
        summary = [r for r in rows if r["kind"] == "summary"][0]
        slope, se = float(summary["measured"]), float(summary["stderr"])
        v.detail = f"slope {slope:.4f} +- {se:.4f} (target 1.5 +- 0.15)"
        assert abs(slope - 1.5) <= 0.15
        assert elapsed <= 900


def test_criterion_10_asymptotics_not_reproduced():
    """No numeric reproduction; the property suites above stand in for it."""
    with Verdict(10) as v:
        needed = [4, 5, 6, 7, 8]
        missing = [k for k in needed if k not in ACCEPTANCE]
        if missing:
            v.detail = f"not reproducible at desk scale; supporting criteria {missing} not run"
            pytest.skip(v.detail)
        failed = [k for k in needed if not ACCEPTANCE[k][0]]
        v.detail = "not reproducible at desk scale; covered by criteria 4-8" + (f" (failing: {failed})" if failed else "")
        assert not failed
