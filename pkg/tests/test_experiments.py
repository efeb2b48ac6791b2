import csv
import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockladder import special
from fockladder.acceptance import criterion_3
from fockladder.cli import main
from fockladder.errors import ConfigError, NoSignChange
from fockladder.experiments import (
    COLUMNS,
    FIGURES,
    ExperimentConfig,
    Sweep,
    _parse_grid,
    compute_figure,
    find_q_zero,
    q_function,
    run_fig,
)

FIXTURES = Path(__file__).parent / "fixtures"
SMALL_GRID = _parse_grid("-2:2:9")


def small_cfg(figure, **kw):
    base = dict(figure=figure, nbar_range=Sweep.parse("0.1:0.5:0.2"),
                alpha_sq_range=Sweep.parse("log:0.5:5:3"), grid=SMALL_GRID)
    if figure in ("fig4", "fig8", "fig3", "fig7"):
        base["k"] = 4
    base.update(kw)
    return ExperimentConfig(**base)


# -- parsing and config -----------------------------------------------------

def test_sweep_parse_linear():
    s = Sweep.parse("0.05:2:0.05")
    v = s.values()
    assert len(v) == 40
    assert v[0] == 0.05 and v[-1] == 2.0
    assert v[2] == 0.15


def test_sweep_parse_log():
    v = Sweep.parse("log:1:200:41").values()
    assert len(v) == 41
    assert v[0] == 1.0 and v[-1] == pytest.approx(200.0)
    assert np.allclose(np.diff(np.log(v)), np.log(200) / 40, rtol=1e-9)


@pytest.mark.parametrize("bad", ["1:2", "a:b:c", "2:1:0.1", "0:1:0", "log:0:1:5", "log:1:2:0"])
def test_sweep_parse_errors(bad):
    with pytest.raises(ConfigError):
        Sweep.parse(bad)


@given(st.floats(1e-3, 10), st.floats(0, 10), st.floats(1e-3, 1))
def test_sweep_str_roundtrip(lo, span, step):
    s = Sweep(round(lo, 6), round(lo + span, 6), round(step, 6))
    assert Sweep.parse(str(s)) == s


def test_grid_parse_forms():
    g = _parse_grid("-3:3:121")
    assert (g.x_min, g.x_max, g.nx, g.ny) == (-3, 3, 121, 121)
    g = _parse_grid("-1:2:-3:4:5:6")
    assert (g.x_min, g.x_max, g.y_min, g.y_max, g.nx, g.ny) == (-1, 2, -3, 4, 5, 6)
    with pytest.raises(ConfigError):
        _parse_grid("1:2:3:4")


def test_defaults():
    assert ExperimentConfig().nbar_range.values()[0] == 0.05
    assert ExperimentConfig(figure="fig9").alpha_sweep == Sweep.parse("log:1:200:41")
    assert ExperimentConfig(figure="fig3").reps == 20
    assert ExperimentConfig(figure="fig8").reps == 30
    assert ExperimentConfig(figure="fig1").reps == 1


@pytest.mark.parametrize("kw", [dict(figure="fig10"), dict(tail_tol=0.0), dict(tail_tol=1e-2),
                                dict(format="xml"), dict(k=0), dict(mode="x"), dict(source="fock"),
                                dict(g=-1.0)])
def test_config_rejects(kw):
    with pytest.raises(ConfigError):
        ExperimentConfig(**kw)


def test_unknown_config_key():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_mapping({"colour": "red"})


def test_config_roundtrip(tmp_path):
    cfg = ExperimentConfig(figure="fig7", nbar_range=Sweep.parse("0.1:1:0.3"),
                           alpha_sq_range=Sweep.parse("log:0.2:8:7"), k=12, point=0.61,
                           g=2.5, mode="ca", source="coherent", tail_tol=1e-10,
                           grid=_parse_grid("-1:1:-2:2:11:21"), out="x.json", format="json",
                           plot_script=True)
    path = tmp_path / "cfg.ini"
    cfg.save(path)
    assert ExperimentConfig.load(path) == cfg


def test_config_load_errors(tmp_path):
    with pytest.raises(ConfigError):
        ExperimentConfig.load(tmp_path / "missing.ini")
    bad = tmp_path / "bad.ini"
    bad.write_text("[other]\nk = 3\n")
    with pytest.raises(ConfigError):
        ExperimentConfig.load(bad)


# -- figure output ----------------------------------------------------------

@pytest.mark.parametrize("figure", [f for f in FIGURES])
def test_csv_header_and_shape(figure, tmp_path):
    out = tmp_path / f"{figure}.csv"
    cfg = small_cfg(figure, out=str(out))
    run_fig(cfg)
    with open(out) as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == COLUMNS[figure]
    assert all(len(r) == len(rows[0]) for r in rows)
    if figure in ("fig2", "fig6"):
        assert len(rows) == 1 + 81
    if figure in ("fig4", "fig8"):
        assert [r[0] for r in rows[1:]] == ["1", "2", "3", "4"]


@pytest.mark.parametrize("figure", ["fig1", "fig6", "fig9"])
def test_reruns_are_byte_identical(figure, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_fig(small_cfg(figure, out=str(a)))
    run_fig(small_cfg(figure, out=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_threads_do_not_change_output(tmp_path, monkeypatch):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    monkeypatch.setenv("FOCKLADDER_THREADS", "1")
    run_fig(small_cfg("fig3", out=str(a)))
    monkeypatch.setenv("FOCKLADDER_THREADS", "4")
    run_fig(small_cfg("fig3", out=str(b)))
    assert a.read_bytes() == b.read_bytes()


def test_json_format(tmp_path):
    out = tmp_path / "f2.json"
    run_fig(small_cfg("fig2", out=str(out), format="json"))
    doc = json.loads(out.read_text())
    assert doc["figure"] == "fig2"
    assert doc["columns"] == list(COLUMNS["fig2"])
    assert len(doc["rows"]) == 81
    assert doc["summary"]["min_W_AC"] < 0
    assert doc["config"]["grid"] == "-2:2:-2:2:9:9"


def test_plot_script_written(tmp_path):
    out = tmp_path / "f9.csv"
    paths, _ = run_fig(small_cfg("fig9", out=str(out), plot_script=True))
    assert paths == [out, out.with_suffix(".gp")]
    assert "f9.csv" in out.with_suffix(".gp").read_text()


def test_wigner_summary_has_minimum_location():
    _, summary = compute_figure(ExperimentConfig(figure="fig2", grid=_parse_grid("-1:1:21")))
    assert summary["min_W_AC"] < 0
    assert summary["min_W_AC_at"] == (0.0, 0.0)


@pytest.mark.parametrize("figure", ["fig4", "fig8"])
def test_fidelity_curves_match_baseline(figure):
    with open(FIXTURES / f"{figure}_baseline.csv") as fh:
        ref = np.array(list(csv.reader(fh))[1:], dtype=float)
    rows, _ = compute_figure(ExperimentConfig(figure=figure))
    np.testing.assert_allclose(np.array(rows, dtype=float), ref, rtol=1e-9, atol=1e-11)


def test_custom_sweep_q_matches_fig1():
    rows_fig, _ = compute_figure(ExperimentConfig(figure="fig1", nbar_range=Sweep.parse("0.2:1:0.4")))
    rows_c, _ = compute_figure(ExperimentConfig(figure="custom", nbar_range=Sweep.parse("0.2:1:0.4")))
    assert [r[1] for r in rows_fig] == pytest.approx([r[3] for r in rows_c], abs=1e-12)


# -- Q zero crossings ---------------------------------------------------------

def test_qzero_thermal_ac():
    root = find_q_zero("thermal_AC", (0.3, 1.0))
    assert 0.55 <= root <= 0.65
    assert abs(q_function("thermal_AC")(root)) < 1e-4


def test_qzero_thermal_ac_k20():
    assert 0.55 <= find_q_zero("thermal_ACk(20)", (0.3, 1.0)) <= 0.59
    assert find_q_zero("thermal_AC", (0.3, 1.0), k=20) == find_q_zero("thermal_ACk(20)", (0.3, 1.0))


def test_qzero_thermal_ca_has_no_crossing():
    with pytest.raises(NoSignChange):
        find_q_zero("thermal_CA", (0.01, 5.0))


@pytest.mark.parametrize("source", ["fock_AC", "thermal", "thermal_ACk()"])
def test_qzero_bad_source(source):
    with pytest.raises(ConfigError):
        q_function(source)


def test_qzero_bad_bracket():
    with pytest.raises(ConfigError):
        find_q_zero("thermal_AC", (1.0, 0.3))


# -- CLI ----------------------------------------------------------------

def test_cli_fig_writes_file(tmp_path, capsys):
    out = tmp_path / "fig1.csv"
    assert main(["fig", "1", "--nbar-range", "0.1:0.3:0.1", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "nbar,Q_AC,Q_CA"
    assert "wrote" in capsys.readouterr().out


def test_cli_config_file_and_override(tmp_path):
    cfg_path, out = tmp_path / "c.ini", tmp_path / "o.csv"
    assert main(["fig", "4", "--k", "3", "--save-config", str(cfg_path), "--out", str(out)]) == 0
    loaded = ExperimentConfig.load(cfg_path)
    assert loaded.k == 3 and loaded.figure == "fig4"
    assert main(["fig", "4", "--config", str(cfg_path), "--k", "2"]) == 0
    # out comes from the file, k from the flag
    with open(out) as fh:
        assert len(list(csv.reader(fh))) == 1 + 2


def test_cli_fig_all(tmp_path):
    out = tmp_path / "all"
    assert main(["fig", "all", "--out", str(out), "--grid=-1:1:5", "--k", "2",
                 "--nbar-range", "0.1:0.2:0.1", "--alpha-sq-range", "log:1:2:2"]) == 0
    assert sorted(p.name for p in out.iterdir()) == sorted(f"fig{i}.csv" for i in range(1, 10))


def test_cli_config_error_exit_code(capsys):
    assert main(["fig", "1", "--tail-tol", "0.5"]) == 2
    assert main(["fig", "12"]) == 2
    assert "config error" in capsys.readouterr().err


def test_cli_qzero(capsys):
    assert main(["qzero", "--source", "thermal_ACk(20)", "--bracket", "0.3:1.0"]) == 0
    assert 0.55 <= float(capsys.readouterr().out) <= 0.59
    assert main(["qzero", "--source", "thermal_CA", "--bracket", "0.01:5"]) == 3
    assert main(["qzero", "--bracket", "0.3"]) == 2


def test_cli_accept_subset(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["accept", "--only", "1,2", "--out", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["passed"] is True
    assert {c["criterion"] for c in report["checks"]} == {1, 2}
    assert "[PASS] criterion 1" in capsys.readouterr().out


# -- mutation check -------------------------------------------------------

def test_tampered_polylog_table_is_detected(monkeypatch):
    table = list(special._numerators())
    coeffs = list(table[3])
    coeffs[1] += 1  # Eulerian numerator of Li_{-3} is z + 4z^2 + z^3
    table[3] = tuple(coeffs)
    monkeypatch.setattr(special, "_numerators", lambda: table)
    assert special.neg_polylog_table(3).numerator_coeffs == tuple(coeffs)
    checks = criterion_3()
    assert not all(c.passed for c in checks)
