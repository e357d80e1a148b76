"""Batch scans over parameter grids, written as versioned CSV.

A scan is described by a :class:`RunSpec` (usually loaded from TOML).  The grid
is expanded into cells in a fixed order; each cell runs ``seeds`` repetitions
whose seeds derive from ``(base_seed, cell index, repetition)`` only, so any
row can be regenerated on its own with :func:`run_cell`.  Every column except
``wall_clock`` reproduces bit-exactly.

TOML layout::

    experiment = "construction-scaling"   # or "embed-threshold", "even-cycle"
    family = "gnp"
    seeds = 5
    base_seed = 0
    output = "construction.csv"           # relative to the --out directory
    pattern = "bip l=1 B=2"               # embed-threshold only

    [grid]                                # cartesian product, keys in file order
    n = [128, 256, 512, 1024]
    p = [0.5]

    [constants]
    s = 2
    r = 2
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .drc import DrcConfig, embed, parse_pattern
from .errors import InputError, InternalError, PreconditionError, ResourceError
from .generators import generate, high_girth_bipartite, incidence_on, petersen, random_ksr_free, thin
from .graph import cycle_graph, is_copy_induced_in
from .lower_bounds import build_random_quotient_subgraph, girth
from .oracle import max_subgraph_avoiding
from .sparseness import clique_cover

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SCHEMA_VERSION = 1
WORKERS_ENV = "INDTURAN_WORKERS"
EXPERIMENTS = ("construction-scaling", "embed-threshold", "even-cycle")

COLUMNS = {
    "construction-scaling": [
        "kind", "cell", "family", "params", "n", "t", "c", "s", "seed", "k", "e_aux", "e_host",
        "measured", "guaranteed_bound", "status", "theory_ref", "stderr", "wall_clock", "error",
    ],
    "embed-threshold": [
        "kind", "cell", "family", "params", "n", "t", "c", "d", "q", "seed", "attempts",
        "measured", "theory_ref", "stderr", "wall_clock", "error",
    ],
    "even-cycle": [
        "kind", "cell", "family", "params", "n", "t", "ell", "seed", "aux", "aux_girth", "k",
        "measured", "theory_ref", "stderr", "wall_clock", "error",
    ],
}

TINY_CELL = 2**31  # seed key of the tiny oracle rows, outside any grid
CAUGHT = (InputError, PreconditionError, ResourceError, InternalError)


@dataclass
class RunSpec:
    experiment: str
    family: str = "gnp"
    grid: dict = field(default_factory=dict)
    constants: dict = field(default_factory=dict)
    seeds: int = 1
    base_seed: int = 0
    pattern: str | None = None
    output: str | None = None

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise InputError(f"unknown experiment {self.experiment!r}; choose from {', '.join(EXPERIMENTS)}")
        if self.seeds < 1:
            raise InputError("seeds must be >= 1")
        for key, values in self.grid.items():
            if not isinstance(values, list):
                raise InputError(f"grid entry {key!r} must be a list")

    @classmethod
    def from_dict(cls, data: dict) -> "RunSpec":
        known = {"experiment", "family", "grid", "constants", "seeds", "base_seed", "pattern", "output"}
        extra = set(data) - known
        if extra:
            raise InputError(f"unknown RunSpec keys: {sorted(extra)}")
        if "experiment" not in data:
            raise InputError("RunSpec needs an 'experiment' key")
        return cls(**data)

    @classmethod
    def load(cls, path) -> "RunSpec":
        with open(path, "rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise InputError(f"{path}: {exc}") from None
        return cls.from_dict(data)

    def cells(self) -> list[dict]:
        if not self.grid or any(len(v) == 0 for v in self.grid.values()):
            return []
        keys = list(self.grid)
        return [dict(zip(keys, combo)) for combo in itertools.product(*(self.grid[k] for k in keys))]

    def default_output(self) -> str:
        return self.output or f"{self.experiment}.csv"


def cell_seed(base_seed: int, cell: int, rep: int) -> int:
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(cell, rep))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _params_text(params: dict) -> str:
    return ";".join(f"{k}={v}" for k, v in params.items())


# -- theory references, recomputed from a row's own fields -------------------


def theory_reference(experiment: str, row: dict, constants: dict | None = None) -> float | None:
    constants = constants or {}
    try:
        n = float(row["n"])
        if experiment == "construction-scaling":
            s = float(row["s"])
            return n ** (2 - 1 / s) * math.log(n) ** (1 / s)
        if experiment == "embed-threshold":
            d, t = float(row["d"]), float(row["t"])
            return float(constants.get("C", 1.0)) * t ** (1 / d) * n ** (-1 / d)
        if experiment == "even-cycle":
            ell, t = float(row["ell"]), float(row["t"])
            return float(constants.get("C", 4.0)) * t ** (1 - 1 / ell) * n ** (1 + 1 / ell)
    except (KeyError, TypeError, ValueError, ZeroDivisionError):
        return None
    return None


def fit_loglog(xs, ys) -> tuple[float, float]:
    """Least-squares slope of log y on log x and its standard error."""
    x = np.log(np.asarray(xs, dtype=float))
    y = np.log(np.asarray(ys, dtype=float))
    if len(x) < 2 or np.ptp(x) == 0:
        raise InputError("slope needs at least two distinct x values")
    xm = x - x.mean()
    sxx = float(xm @ xm)
    slope = float(xm @ (y - y.mean())) / sxx
    if len(x) < 3:
        return slope, float("nan")
    resid = y - y.mean() - slope * xm
    return slope, math.sqrt(float(resid @ resid) / (len(x) - 2) / sxx)


# -- cells ---------------------------------------------------------------------


def _blank(experiment, kind, cell, spec, params):
    row = {c: "" for c in COLUMNS[experiment]}
    row.update(kind=kind, cell=cell, family=spec.family, params=_params_text(params))
    return row


def _aux_graph(spec, k, s, r, seed):
    aux = spec.constants.get("aux", "incidence")
    if aux == "incidence":
        return incidence_on(k)
    if aux == "ksr-free":
        return random_ksr_free(k, s, r, seed)
    raise InputError(f"unknown auxiliary {aux!r}; choose incidence or ksr-free")


def _construction_cell(spec, cell, params, seed, row):
    s, r = int(spec.constants.get("s", 2)), int(spec.constants.get("r", 2))
    Gamma = generate(spec.family, params, seed)
    cover = clique_cover(Gamma, spec.constants.get("cover", "greedy"))
    F = _aux_graph(spec, cover.size, s, r, seed)
    res = build_random_quotient_subgraph(Gamma, cover, F, seed, s=s, r=r)
    row.update(
        n=Gamma.n, t=spec.constants.get("t", ""), c=spec.constants.get("c", ""), s=s, k=cover.size,
        e_aux=F.edge_count, e_host=Gamma.edge_count, measured=res.subgraph.edge_count,
        guaranteed_bound=repr(float(res.guaranteed_bound)), status=res.status,
    )


def _host_params(params):
    return {k: v for k, v in params.items() if k != "q"}


def _embed_cell(spec, cell, params, seed, row):
    if spec.pattern is None:
        raise InputError("embed-threshold needs a pattern")
    if "q" not in params:
        raise InputError("embed-threshold grid needs a 'q' axis")
    H = parse_pattern(spec.pattern)
    host_seed = int(spec.constants.get("host_seed", spec.base_seed))
    Gamma = generate(spec.family, _host_params(params), host_seed)
    q = float(params["q"])
    G = thin(Gamma, q, seed)
    cfg = DrcConfig(
        c=float(spec.constants.get("c", 0.5)), t=int(spec.constants.get("t", 1)), seed=seed,
        mode=spec.constants.get("mode", "soft"),
        apex_budget=int(spec.constants.get("apex_budget", 32)),
        attempt_budget=int(spec.constants.get("attempt_budget", 64)),
    )
    res, stats = embed(Gamma, G, H, cfg)
    ok = not hasattr(res, "reason")
    if ok and not is_copy_induced_in(G, Gamma, H.graph, res):
        raise InternalError("embedder returned a copy that is not induced in the host")
    row.update(n=Gamma.n, t=cfg.t, c=cfg.c, d=H.d, q=q, attempts=stats.attempts, measured=int(ok))


def _even_cycle_cell(spec, cell, params, seed, row):
    ell = int(spec.constants["ell"])
    Gamma = generate(spec.family, params, seed)
    cover = clique_cover(Gamma, spec.constants.get("cover", "greedy"))
    F = high_girth_bipartite(cover.size, 2 * ell + 1, seed)
    res = build_random_quotient_subgraph(Gamma, cover, F, seed)
    row.update(
        n=Gamma.n, t=spec.constants.get("t", 1), ell=ell, aux="high-girth-bipartite", aux_girth=girth(F),
        k=cover.size, measured=res.subgraph.edge_count,
    )


CELL_RUNNERS = {
    "construction-scaling": _construction_cell,
    "embed-threshold": _embed_cell,
    "even-cycle": _even_cycle_cell,
}


def run_cell(spec: RunSpec, cell: int, rep: int) -> dict:
    """One row: cell ``cell`` of the grid at repetition ``rep``."""
    cells = spec.cells()
    params = cells[cell]
    seed = cell_seed(spec.base_seed, cell, rep)
    row = _blank(spec.experiment, "cell", cell, spec, params)
    row["seed"] = seed
    start = time.perf_counter()
    try:
        CELL_RUNNERS[spec.experiment](spec, cell, params, seed, row)
        ref = theory_reference(spec.experiment, row, spec.constants)
        row["theory_ref"] = "" if ref is None else repr(ref)
    except CAUGHT as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    row["wall_clock"] = f"{time.perf_counter() - start:.4f}"
    return row


def _job(args):
    spec, cell, rep = args
    return run_cell(spec, cell, rep)


def workers_from_env() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        w = int(raw)
    except ValueError:
        raise InputError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    return max(1, w)


def _run_rows(spec: RunSpec, workers: int | None = None) -> list[dict]:
    jobs = [(spec, cell, rep) for cell in range(len(spec.cells())) for rep in range(spec.seeds)]
    workers = workers_from_env() if workers is None else workers
    if workers <= 1 or len(jobs) <= 1:
        return [_job(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_job, jobs))  # map keeps cell order


# -- summaries (pure functions of the raw rows) --------------------------------


def _ok(rows):
    return [r for r in rows if r["kind"] == "cell" and not r["error"]]


def summarize(spec: RunSpec, rows: list[dict]) -> list[dict]:
    good = _ok(rows)
    out = []
    if spec.experiment in ("construction-scaling", "even-cycle"):
        pts = [(float(r["n"]), float(r["measured"])) for r in good if float(r["measured"]) > 0]
        if len({x for x, _ in pts}) >= 2:
            slope, se = fit_loglog([x for x, _ in pts], [y for _, y in pts])
            row = _blank(spec.experiment, "summary", "slope", spec, {})
            row.update(measured=repr(slope), stderr=repr(se))
            out.append(row)
    if spec.experiment == "embed-threshold":
        by_cell = {}
        for r in good:
            by_cell.setdefault(int(r["cell"]), []).append(r)
        threshold = None
        for cell in sorted(by_cell, key=lambda c: float(by_cell[c][0]["q"])):
            group = by_cell[cell]
            rate = sum(int(r["measured"]) for r in group) / len(group)
            row = _blank(spec.experiment, "summary", cell, spec, spec.cells()[cell])
            for key in ("n", "t", "c", "d", "q"):
                row[key] = group[0][key]
            row.update(measured=repr(rate), stderr=repr(math.sqrt(rate * (1 - rate) / len(group))))
            row["theory_ref"] = group[0]["theory_ref"]
            out.append(row)
            if threshold is None and rate >= 0.5:
                threshold = row
        final = _blank(spec.experiment, "summary", "threshold", spec, {})
        if threshold is not None:
            for key in ("n", "t", "c", "d", "q", "theory_ref"):
                final[key] = threshold[key]
            final["measured"] = threshold["q"]
        out.append(final)
    return out


# -- even-cycle extras ---------------------------------------------------------


def _even_cycle_extras(spec: RunSpec) -> list[dict]:
    ell = int(spec.constants["ell"])
    rows = []
    P = petersen()
    row = _blank(spec.experiment, "aux", "petersen", spec, {})
    g = girth(P)
    row.update(ell=ell, aux="petersen", aux_girth=g, k=P.n, measured=int(g >= 2 * ell + 1))
    rows.append(row)
    tiny_n = int(spec.constants.get("tiny_n", 8))
    tiny_p = float(spec.constants.get("tiny_p", 0.5))
    C = cycle_graph(2 * ell)
    for rep in range(int(spec.constants.get("tiny_seeds", 3))):
        seed = cell_seed(spec.base_seed, TINY_CELL, rep)
        row = _blank(spec.experiment, "exact", "tiny", spec, {"n": tiny_n, "p": tiny_p})
        row.update(n=tiny_n, t=spec.constants.get("t", 1), ell=ell, seed=seed)
        start = time.perf_counter()
        try:
            Gamma = generate("gnp", {"n": tiny_n, "p": tiny_p}, seed)
            best, _ = max_subgraph_avoiding(Gamma, C)
            row["measured"] = best
            row["theory_ref"] = repr(theory_reference(spec.experiment, row, spec.constants))
        except CAUGHT as exc:
            row["error"] = f"{type(exc).__name__}: {exc}"
        row["wall_clock"] = f"{time.perf_counter() - start:.4f}"
        rows.append(row)
    return rows


# -- public scans --------------------------------------------------------------


def _header(spec: RunSpec) -> str:
    return f"# indturan-scan schema={SCHEMA_VERSION} experiment={spec.experiment} family={spec.family}\n"


def rows_to_csv(spec: RunSpec, rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(_header(spec))
    writer = csv.DictWriter(buf, fieldnames=COLUMNS[spec.experiment], lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict, list[dict]]:
    """Parse scan output back into (header fields, rows)."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# indturan-scan"):
        raise InputError("missing indturan-scan header comment")
    meta = dict(item.split("=", 1) for item in lines[0][2:].split()[1:])
    if int(meta["schema"]) != SCHEMA_VERSION:
        raise InputError(f"unsupported schema version {meta['schema']}")
    return meta, list(csv.DictReader(lines[1:]))


def _scan(spec: RunSpec, workers=None) -> tuple[str, list[dict]]:
    rows = _run_rows(spec, workers)
    if spec.experiment == "even-cycle" and spec.cells():
        rows += _even_cycle_extras(spec)
    rows += summarize(spec, rows)
    return rows_to_csv(spec, rows), rows


def scan_construction_scaling(spec: RunSpec, workers=None):
    if spec.experiment != "construction-scaling":
        raise InputError("spec is not a construction-scaling scan")
    if spec.family not in ("gnp", "paley", "clique-union"):
        raise InputError("construction scans support gnp, paley and clique-union hosts")
    return _scan(spec, workers)


def scan_embed_threshold(spec: RunSpec, workers=None):
    if spec.experiment != "embed-threshold":
        raise InputError("spec is not an embed-threshold scan")
    return _scan(spec, workers)


def probe_even_cycle_conjecture(spec: RunSpec, workers=None):
    if spec.experiment != "even-cycle":
        raise InputError("spec is not an even-cycle probe")
    ell = spec.constants.get("ell")
    if ell not in (2, 3):
        raise InputError(f"ell must be 2 or 3 (C_2l needs l >= 2), got {ell!r}")
    return _scan(spec, workers)


SCANS = {
    "construction-scaling": scan_construction_scaling,
    "embed-threshold": scan_embed_threshold,
    "even-cycle": probe_even_cycle_conjecture,
}


def run_scan(spec: RunSpec, out_dir, workers=None) -> tuple[Path, bool]:
    """Run, write ``out_dir/<output>`` and report whether any row errored."""
    text, rows = SCANS[spec.experiment](spec, workers)
    out = Path(out_dir) / spec.default_output()
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text)
    return out, any(r["error"] for r in rows)
