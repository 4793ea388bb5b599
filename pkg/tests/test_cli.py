import json
import math
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from orliczlab import ExperimentTable, cli
from orliczlab.conditions import ConditionReport
from orliczlab.table import format_number


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def csv_table(text):
    return ExperimentTable.from_csv(text)


@pytest.fixture(autouse=True)
def no_env_dir(monkeypatch):
    monkeypatch.delenv(cli.OUTPUT_DIR_ENV, raising=False)


# subcommands ------------------------------------------------------------------


def test_reproduce_figure(capsys, tmp_path):
    out_file = tmp_path / "fig.csv"
    code, out, _ = run(capsys, "reproduce-figure", "--output", str(out_file))
    assert code == 0
    t = csv_table(out)
    assert t.column("c") == [1.01, 1.1, 1.2, 1.3, 1.4]
    assert all(2 <= u <= 32 for u in t.column("u_right"))
    assert t.column("u_at_minus_x0")[-1] == pytest.approx(2 * 1.4 - 2 * 1.4 ** -8, rel=1e-12)
    assert out_file.exists() and (tmp_path / "fig_curves.csv").exists()


def test_reproduce_figure_range_failure_writes_nothing(capsys, tmp_path):
    out_file = tmp_path / "fig.csv"
    code, _, err = run(capsys, "reproduce-figure", "--c-list", "3.0", "--output", str(out_file))
    assert code == 3 and "outside" in err
    assert not list(tmp_path.iterdir())


def test_check_conditions_holds(capsys):
    code, out, _ = run(capsys, "check-conditions", "--phi", "double-phase-abs:1.1,2,0.9",
                       "--s", "2", "--expect-holds")
    t = csv_table(out)
    assert code == 0
    assert set(t.column("verdict")) == {"holds"}
    assert t.column("condition")[:4] == ["A0", "AIncP", "ADecQ", "A1"]


def test_check_conditions_expect_holds_fails(capsys):
    code, out, _ = run(capsys, "check-conditions", "--phi", "double-phase-abs:1.1,2,0.5",
                       "--s", "3", "--expect-holds")
    assert code == 3
    assert "fails" in csv_table(out).column("verdict")


def test_check_conditions_strict_inconclusive(capsys, monkeypatch):
    def fake(phi, sampling=None):
        return ConditionReport("A0", "inconclusive", None, None, None, 0.0, {})
    monkeypatch.setattr(cli, "check_a0", fake)
    code, _, _ = run(capsys, "check-conditions", "--phi", "power:2", "--s", "2", "--strict")
    assert code == 4
    code, _, _ = run(capsys, "check-conditions", "--phi", "power:2", "--s", "2")
    assert code == 0


def test_sharpness_sweep(capsys):
    code, out, err = run(capsys, "sharpness-sweep", "--alpha", "0.5", "--s", "2",
                         "--m-range", "2,5", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["classification"] == "bounded"
    assert len(doc["rows"]) == 4
    assert "bounded" in err


def test_sharpness_sweep_infinite_s(capsys):
    code, out, _ = run(capsys, "sharpness-sweep", "--alpha", "1.0", "--s", "inf",
                       "--m-range", "2,6", "--format", "json")
    assert code == 0 and json.loads(out)["metadata"]["classification"] == "diverging"


def test_harnack_sweep(capsys):
    code, out, _ = run(capsys, "harnack-sweep", "--alpha-list", "0.5,1.8", "--m-range", "2,4")
    assert code == 0
    t = csv_table(out)
    assert set(t.column("alpha")) == {0.5, 1.8}
    labels = dict(zip(t.column("alpha"), t.column("classification")))
    assert labels == {0.5: "bounded", 1.8: "diverging"}


def test_caccioppoli_check(capsys):
    code, out, err = run(capsys, "caccioppoli", "--nodes", "2001", "--check")
    assert code == 0
    ratios = csv_table(out).column("ratio")
    assert all(math.isfinite(r) and r > 0 for r in ratios)
    assert "min residual" in err


def test_caccioppoli_bad_ell(capsys):
    code, _, err = run(capsys, "caccioppoli", "--ell", "0.5", "--nodes", "501")
    assert code == 1 and "ell" in err


def test_norm_kinds(capsys):
    code, out, _ = run(capsys, "norm", "--phi", "power:2", "--u", "const:2")
    assert code == 0 and float(out) == pytest.approx(2.0, rel=1e-10)
    _, out, _ = run(capsys, "norm", "--kind", "modular", "--phi", "power:2", "--u", "linear:1,0")
    assert float(out) == pytest.approx(1 / 3, rel=1e-12)
    _, out, _ = run(capsys, "norm", "--kind", "lebesgue", "--s", "inf", "--u", "linear:1,0")
    assert float(out) == pytest.approx(1.0)


def test_psi_on_degenerate_free_ball(capsys):
    # a = 0 on (0.1, 0.9), so psi_r(t) = t^1.1 / 1.1 up to the p-phase
    code, out, _ = run(capsys, "psi", "--phi", "double-phase:1.1,2,0.5", "--ball", "0.1,0.9",
                       "--t", "2")
    assert code == 0
    assert float(out) == pytest.approx(2 ** 1.1 / 1.1, rel=1e-3)


def test_ell(capsys):
    assert run(capsys, "ell", "--p", "2", "--n", "3")[1].strip() == "3"
    assert run(capsys, "ell", "--p", "3", "--n", "3")[1].strip() == "inf"
    assert run(capsys, "ell", "--p", "1", "--n", "3")[0] == 1


def test_nonintegrability(capsys):
    code, out, _ = run(capsys, "nonintegrability", "--decades", "6")
    assert code == 0
    slopes = csv_table(out).column("slope")[1:]
    np.testing.assert_allclose(slopes, 4 * math.pi, rtol=1e-9)
    code, out, _ = run(capsys, "nonintegrability", "--p", "2", "--n", "2", "--decades", "3")
    assert code == 0 and csv_table(out).columns == ["eps", "sup_value"]


# error handling ---------------------------------------------------------------


@pytest.mark.parametrize("argv", [
    [], ["no-such-command"], ["norm", "--phi", "wobble:2"], ["norm", "--phi", "power:-1"],
    ["norm", "--interval", "1,0"], ["sharpness-sweep", "--x0-list", "2.0"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 1


def test_version(capsys):
    assert run(capsys, "--version")[0] == 0


# config and output ------------------------------------------------------------


def test_config_and_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"phi": "power:2", "u": "const:3", "kind": "modular"}))
    _, out, _ = run(capsys, "norm", "--config", str(cfg))
    assert float(out) == pytest.approx(9.0)
    _, out, _ = run(capsys, "norm", "--config", str(cfg), "--u", "const:2")
    assert float(out) == pytest.approx(4.0)


def test_config_errors(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus-key": 1}))
    assert run(capsys, "norm", "--config", str(cfg))[0] == 1
    cfg.write_text("[1, 2]")
    assert run(capsys, "norm", "--config", str(cfg))[0] == 1
    assert run(capsys, "norm", "--config", str(tmp_path / "missing.json"))[0] == 1


def test_env_output_dir(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    run(capsys, "ell", "--format", "json")
    doc = json.loads((tmp_path / "ell.json").read_text())
    assert doc["rows"] == [[3.0]] and doc["metadata"]["subcommand"] == "ell"


def test_output_is_deterministic(tmp_path, capsys):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for p in paths:
        run(capsys, "sharpness-sweep", "--m-range", "2,4", "--output", str(p))
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_json_round_trip(capsys):
    _, out, _ = run(capsys, "nonintegrability", "--decades", "3", "--format", "json")
    t = ExperimentTable.from_json(out)
    assert t.to_json() == out


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "orliczlab", "ell", "--p", "1.5", "--n", "2"],
                          capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0 and float(proc.stdout) == pytest.approx(2.0)


# table serialization ----------------------------------------------------------


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(3) == "3"
    assert format_number(float("inf")) == "inf"
    assert format_number(float("nan")) == "nan"
    assert format_number(True) == "true"


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(allow_nan=False), min_size=1, max_size=5))
def test_csv_round_trip_is_lossless(values):
    t = ExperimentTable([f"c{i}" for i in range(len(values))], [values])
    back = ExperimentTable.from_csv(t.to_csv())
    assert [float(v) for v in back.rows[0]] == values


def test_table_rejects_ragged_rows():
    from orliczlab import DomainError
    with pytest.raises(DomainError):
        ExperimentTable(["a", "b"], [[1]])
