import hashlib
import random
from fractions import Fraction

import numpy as np
import pytest

from fairmclp.experiments import (RESULT_FIELDS, ConfigError, ExperimentGrid, InstanceFormatError,
                                  dumps_instance, gap_bucket, gen_instance, load_instance, loads_instance,
                                  full_scale_grid, parse_grid_config, read_results, run_grid, summarize,
                                  write_instance)

GOLDEN_N45_SEED7 = "397616f92c0e67f216e3d2d3df9e4cce815a5d1fb39cda1d45c863794c312082"
DESK = "n = 10\np = 2, 3\nR = 0.15\n"


def test_load_small_csv(tmp_path):
    f = tmp_path / "a.csv"
    f.write_text("x,y,w\n0.1,0.2,1\n0.3,0.4,2\n0.5,0.6,0.5\n")
    inst = load_instance(f)
    assert inst.n == 3 and inst.weights == (1.0, 2.0, 0.5) and inst.name == "a"
    assert load_instance(f, n=2).n == 2
    with pytest.raises(InstanceFormatError):
        load_instance(f, n=4)


def test_negative_weight_rejected_with_position():
    with pytest.raises(InstanceFormatError, match=r"x:3:\d+: negative weight"):
        loads_instance("x,y,w\n0,0,1\n1,1,-1\n", name="x")


def test_parse_errors_report_line_and_column():
    with pytest.raises(InstanceFormatError, match="f:2:5: not a number"):
        loads_instance("x,y,w\n0.1,abc,1\n", name="f")
    with pytest.raises(InstanceFormatError, match="f:2:1: expected 3 fields"):
        loads_instance("x,y,w\n0.1,1\n", name="f")
    with pytest.raises(InstanceFormatError):
        loads_instance("a,b\n", name="f")
    with pytest.raises(InstanceFormatError):
        loads_instance("", name="f")


def test_normalization_rescales_to_unit_square():
    inst = loads_instance("x,y,w\n-3,10,1\n5,20,1\n1,12,1\n", normalize=True)
    c = inst.coords
    assert c.min() == 0.0 and c.max() == 1.0
    assert c[2] == pytest.approx([0.5, 0.2])


def test_higher_dimensional_header(tmp_path):
    inst = gen_instance(5, d=3, seed=1)
    write_instance(inst, tmp_path / "i.csv")
    assert (tmp_path / "i.csv").read_text().splitlines()[0] == "x1,x2,x3,w"
    back = load_instance(tmp_path / "i.csv")
    assert back.points == inst.points and back.weights == inst.weights


def test_generation_is_deterministic(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    write_instance(gen_instance(45, 2, 7), a)
    write_instance(gen_instance(45, 2, 7), b)
    assert a.read_bytes() == b.read_bytes()
    assert hashlib.sha256(a.read_bytes()).hexdigest() == GOLDEN_N45_SEED7
    assert dumps_instance(gen_instance(45, 2, 8)) != dumps_instance(gen_instance(45, 2, 7))


def test_generated_values_in_range():
    inst = gen_instance(500, 2, 3)
    w = np.asarray(inst.weights)
    assert np.all((w > 0) & (w < 1))
    assert np.all((inst.coords >= 0) & (inst.coords <= 1))


def test_full_scale_grid_cell_count():
    g = full_scale_grid()
    assert len(g.spec_cells()) == 5 * 4 + 1
    assert g.cell_count() == 2 * 672


def test_desk_grid_cell_count():
    g = parse_grid_config(DESK)
    assert g.cell_count() == 84
    c_cells = [c for c in g.cells() if c[4] == "C"]
    assert len(c_cells) == 4 and all(c[5] == 0 for c in c_cells)


def test_config_parsing():
    g = parse_grid_config("# comment\nn = [10, 20]\np=2\nR=0.1,0.2\nalpha=0,1/2\nfamilies=W,C,G\n"
                          "spaces=disc\ntime_limit=5\nseed=3\nk=2\nbeta_mix=1/3\n")
    assert g.n_values == [10, 20] and g.alpha_values == [0, Fraction(1, 2)]
    assert g.families == ["W", "C", "G"] and g.spaces == ["disc"]
    assert g.time_limit == 5.0 and g.seed == 3 and g.k == 2 and g.beta_mix == Fraction(1, 3)
    assert g.cell_count() == 2 * 2 * (2 * 2 + 1)
    for bad in ("n=10\np=2\n", "n=10\np=2\nR=0.1\ncolour=red\n", "n=x\np=2\nR=0.1\n",
                "n=10\np=2\nR=0.1\nfamilies=Q\n", "n=10\np=2\nR=0.1\nspaces=\n", "junk\n"):
        with pytest.raises(ConfigError):
            parse_grid_config(bad)


def test_gap_buckets():
    assert gap_bucket("Optimal", 0.0) == "GAP0"
    assert gap_bucket("Feasible", 0.005) == "GAP1"
    assert gap_bucket("Feasible", 0.03) == "GAP5"
    assert gap_bucket("Feasible", 0.05) == "GAP5"
    assert gap_bucket("Feasible", 0.2) == "GAP+"
    assert gap_bucket("Error: x", "") == "GAP+"


@pytest.fixture(scope="module")
def desk_results(tmp_path_factory):
    out = tmp_path_factory.mktemp("grid") / "res.csv"
    rows = run_grid(parse_grid_config(DESK), gen_instance(10, 2, 5), out)
    return rows, out


def test_desk_grid_rows(desk_results):
    rows, out = desk_results
    assert len(rows) == 84
    back = read_results(out)
    assert len(back) == 84 and list(back[0]) == RESULT_FIELDS
    for r in back:
        assert r["status"] == "Optimal" and float(r["gap"]) == 0.0
        for key in ("PoF", "PoE", "Gini"):
            assert 0.0 <= float(r[key]) <= 1.0
        if r["family"] == "W" and r["alpha"] == "0":
            assert float(r["PoF"]) == 0.0
        if r["family"] == "C":
            assert r["alpha"] == "0" and float(r["PoE"]) == 0.0
    meta = (out.parent / "res.csv.meta.json").read_text()
    assert '"seed": 0' in meta and "beta_mix" in meta


def test_grid_is_deterministic(desk_results, tmp_path):
    rows, _ = desk_results
    again = run_grid(parse_grid_config(DESK), gen_instance(10, 2, 5), None)
    strip = lambda rs: [{k: v for k, v in r.items() if k != "cpu_seconds"} for r in rs]
    assert strip(again) == strip(rows)


def test_parallel_grid_matches_serial(desk_results, monkeypatch):
    rows, _ = desk_results
    monkeypatch.setenv("FMCLP_THREADS", "2")
    g = parse_grid_config(DESK + "spaces = disc\n")
    par = run_grid(g, gen_instance(10, 2, 5), None)
    ser = [r for r in rows if r["space"] == "disc"]
    strip = lambda rs: [{k: v for k, v in r.items() if k != "cpu_seconds"} for r in rs]
    assert strip(par) == strip(ser)


def test_cell_failures_are_recorded_not_raised():
    g = ExperimentGrid(n_values=[4], p_values=[5], R_values=[0.2], spaces=["disc"], families=["W", "G"],
                       alpha_values=[Fraction(0)])
    rows = run_grid(g, gen_instance(4, 2, 1), None)
    assert len(rows) == 2 and all(r["status"].startswith("Error") for r in rows)


def test_grid_rejects_small_instances():
    with pytest.raises(ConfigError):
        run_grid(parse_grid_config("n=50\np=2\nR=0.1\n"), gen_instance(10, 2, 1), None)


def test_summary_tables(desk_results):
    _, out = desk_results
    rows = read_results(out)
    gaps, fams = summarize(rows)
    assert len(gaps) == 4 and all(g["GAP0"] == 100.0 and g["count"] == 21 for g in gaps)
    w0 = [f for f in fams if f["family"] == "W" and f["alpha"] == "0"]
    assert all(f["PoF"] == 0.0 for f in w0)


def test_summary_invariant_to_row_order(desk_results):
    _, out = desk_results
    rows = read_results(out)
    shuffled = list(rows)
    random.Random(4).shuffle(shuffled)
    assert summarize(shuffled) == summarize(rows)


def test_summary_with_gapped_row(desk_results):
    _, out = desk_results
    rows = read_results(out)
    rows[0] = dict(rows[0], status="Feasible", gap="0.03")
    gaps, _ = summarize(rows)
    first = [g for g in gaps if g["space"] == rows[0]["space"] and g["p"] == int(rows[0]["p"])][0]
    assert first["GAP5"] == pytest.approx(100 / 21)


def test_results_schema_checked(tmp_path):
    f = tmp_path / "bad.csv"
    f.write_text("a,b\n1,2\n")
    with pytest.raises(ConfigError):
        read_results(f)
