import math

import pytest

from indturan import experiments as ex
from indturan.errors import InputError


def _strip_clock(rows):
    return [{k: v for k, v in r.items() if k != "wall_clock"} for r in rows]


def _clique_union(ks, seeds=2):
    return ex.RunSpec("construction-scaling", family="clique-union", grid={"k": ks, "s": [4]},
                      constants={"s": 2, "r": 2}, seeds=seeds)


def test_runspec_validation():
    with pytest.raises(InputError):
        ex.RunSpec("nope")
    with pytest.raises(InputError):
        ex.RunSpec("even-cycle", seeds=0)
    with pytest.raises(InputError):
        ex.RunSpec.from_dict({"experiment": "even-cycle", "colour": 1})
    with pytest.raises(InputError):
        ex.RunSpec("even-cycle", grid={"n": 5})


def test_cells_are_cartesian_in_key_order():
    spec = ex.RunSpec("construction-scaling", grid={"n": [8, 16], "p": [0.3, 0.5]})
    assert spec.cells() == [{"n": 8, "p": 0.3}, {"n": 8, "p": 0.5}, {"n": 16, "p": 0.3}, {"n": 16, "p": 0.5}]


def test_cell_seed_depends_only_on_its_key():
    assert ex.cell_seed(0, 1, 2) == ex.cell_seed(0, 1, 2)
    assert len({ex.cell_seed(0, c, r) for c in range(4) for r in range(4)}) == 16
    assert ex.cell_seed(1, 0, 0) != ex.cell_seed(0, 0, 0)


def test_empty_grid_writes_header_only(tmp_path):
    spec = ex.RunSpec("construction-scaling", grid={"n": []})
    path, errored = ex.run_scan(spec, tmp_path)
    meta, rows = ex.read_csv(path.read_text())
    assert not errored and rows == []
    assert meta == {"schema": "1", "experiment": "construction-scaling", "family": "gnp"}
    assert path.read_text().splitlines()[1] == ",".join(ex.COLUMNS["construction-scaling"])


def test_rows_reproduce_from_run_cell():
    spec = ex.RunSpec("construction-scaling", grid={"n": [24, 40], "p": [0.5]}, seeds=2, base_seed=5)
    _, rows = ex.scan_construction_scaling(spec, workers=1)
    cells = [r for r in rows if r["kind"] == "cell"]
    again = [ex.run_cell(spec, int(r["cell"]), rep) for r, rep in zip(cells, [0, 1, 0, 1])]
    assert _strip_clock(cells) == _strip_clock(again)


def test_workers_match_serial(monkeypatch):
    spec = ex.RunSpec("construction-scaling", grid={"n": [20, 30], "p": [0.5]}, seeds=2)
    serial = ex._run_rows(spec, workers=1)
    monkeypatch.setenv(ex.WORKERS_ENV, "2")
    assert ex.workers_from_env() == 2
    assert _strip_clock(ex._run_rows(spec)) == _strip_clock(serial)
    monkeypatch.setenv(ex.WORKERS_ENV, "many")
    with pytest.raises(InputError):
        ex.workers_from_env()


def test_clique_union_slope_is_linear():
    _, rows = ex.scan_construction_scaling(_clique_union([16, 32, 64, 128]))
    summary = [r for r in rows if r["kind"] == "summary"]
    assert len(summary) == 1
    assert float(summary[0]["measured"]) == pytest.approx(1.0, abs=1e-9)
    for r in rows:
        if r["kind"] == "cell":
            assert r["error"] == "" and r["status"]
            assert float(r["theory_ref"]) == pytest.approx(
                float(r["n"]) ** 1.5 * math.log(float(r["n"])) ** 0.5)


def test_fit_loglog():
    slope, se = ex.fit_loglog([1, 2, 4, 8], [3, 12, 48, 192])
    assert slope == pytest.approx(2.0) and se == pytest.approx(0.0, abs=1e-12)
    slope, se = ex.fit_loglog([1, 2], [1, 2])
    assert slope == pytest.approx(1.0) and math.isnan(se)
    with pytest.raises(InputError):
        ex.fit_loglog([3, 3], [1, 2])


def test_even_cycle_rejects_ell_one():
    spec = ex.RunSpec("even-cycle", grid={"n": [16]}, constants={"ell": 1})
    with pytest.raises(InputError):
        ex.probe_even_cycle_conjecture(spec)


def test_even_cycle_rows():
    spec = ex.RunSpec("even-cycle", grid={"n": [24, 48], "p": [0.5]}, constants={"ell": 2, "tiny_n": 6, "tiny_seeds": 2})
    _, rows = ex.probe_even_cycle_conjecture(spec)
    kinds = [r["kind"] for r in rows]
    assert kinds == ["cell", "cell", "aux", "exact", "exact", "summary"]
    for r in rows:
        if r["kind"] == "cell":
            assert r["error"] == "" and (r["aux_girth"] == math.inf or r["aux_girth"] >= 5)
    petersen = rows[2]
    assert petersen["aux_girth"] == 5 and petersen["measured"] == 1
    for r in rows[3:5]:
        assert r["error"] == "" and 0 <= int(r["measured"]) <= 15


def test_embed_threshold_rates():
    spec = ex.RunSpec("embed-threshold", grid={"n": [60], "p": [0.6], "q": [0.0, 1.0]}, seeds=3,
                      pattern="bip l=1 B=2", constants={"c": 0.5, "t": 1, "host_seed": 1})
    _, rows = ex.scan_embed_threshold(spec)
    rates = {r["q"]: float(r["measured"]) for r in rows if r["kind"] == "summary" and r["cell"] != "threshold"}
    assert rates[0.0] == 0.0
    threshold = rows[-1]
    assert threshold["cell"] == "threshold"
    if rates[1.0] >= 0.5:
        assert threshold["measured"] == 1.0


def test_embed_threshold_needs_q_axis():
    spec = ex.RunSpec("embed-threshold", grid={"n": [30], "p": [0.5]}, pattern="bip l=1 B=2")
    row = ex.run_cell(spec, 0, 0)
    assert row["error"].startswith("InputError")


def test_errors_become_rows(tmp_path):
    spec = ex.RunSpec("construction-scaling", family="gnp", grid={"n": [10], "p": [7.0]})
    path, errored = ex.run_scan(spec, tmp_path)
    assert errored
    _, rows = ex.read_csv(path.read_text())
    assert rows[0]["error"]


def test_read_csv_round_trip_and_version_check():
    spec = _clique_union([16, 32], seeds=1)
    text, rows = ex.scan_construction_scaling(spec)
    _, back = ex.read_csv(text)
    assert [r["measured"] for r in back] == [str(r["measured"]) for r in rows]
    with pytest.raises(InputError):
        ex.read_csv(text.replace("schema=1", "schema=9"))
    with pytest.raises(InputError):
        ex.read_csv("a,b\n")


def test_toml_load(tmp_path):
    p = tmp_path / "s.toml"
    p.write_text('experiment = "construction-scaling"\nseeds = 2\n[grid]\nn = [8]\n[constants]\ns = 2\n')
    spec = ex.RunSpec.load(p)
    assert spec.seeds == 2 and spec.grid == {"n": [8]}
    p.write_text("experiment = \n")
    with pytest.raises(InputError):
        ex.RunSpec.load(p)


def test_theory_reference_from_fields():
    assert ex.theory_reference("embed-threshold", {"n": 100, "d": 2, "t": 4}, {"C": 1.0}) == pytest.approx(0.2)
    assert ex.theory_reference("even-cycle", {"n": 16, "ell": 2, "t": 1}) == pytest.approx(4 * 64)
    assert ex.theory_reference("construction-scaling", {"n": ""}) is None
