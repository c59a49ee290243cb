"""CLI subcommands: outputs, determinism, exit codes."""

import math

import pytest

from qubus import cli


def run(argv):
    return cli.main([str(a) for a in argv])


def read_rows(path):
    header, *rows = path.read_text().splitlines()
    return header, [r.split(",") for r in rows]


def test_purify_report(capsys):
    assert run(["purify"]) == 0
    out = capsys.readouterr().out
    values = dict(
        line.split(" = ") for line in out.splitlines() if " = " in line
    )
    assert float(values["P_E"]) == pytest.approx(math.exp(-10.0), rel=1e-3)
    assert float(values["P_S"]) + float(values["P_E"]) == pytest.approx(1.0)
    assert float(values["cond_fidelity"]) == 1.0


def test_purify_dark_sweep_is_monotone(tmp_path):
    out = tmp_path / "purify.txt"
    assert run(["purify", "--sweep-dark", "--out", out]) == 0
    lines = out.read_text().splitlines()
    start = lines.index("lambda_dark,click_prob,cond_fidelity") + 1
    fids = [float(line.split(",")[2]) for line in lines[start:]]
    assert len(fids) == 6
    assert fids == sorted(fids, reverse=True)
    assert fids[0] == 1.0


def test_fig3_csv(tmp_path):
    out = tmp_path / "fig3.csv"
    assert run(["fig3", "--out", out]) == 0
    header, rows = read_rows(out)
    assert header == "L0_km,F,P_g"
    assert len(rows) == 45
    anchor = [r for r in rows if r[0] == "75" and r[1].startswith("0.99950")]
    assert anchor
    assert float(anchor[0][2]) == pytest.approx(5e-5, rel=0.06)


def test_table_csv_and_text(tmp_path, capsys):
    out = tmp_path / "table.csv"
    assert run(["table", "--out", out]) == 0
    header, rows = read_rows(out)
    assert header == "f_hz,T_tot_s,M_E"
    assert [int(r[2]) for r in rows] == [2, 60, 1500, 15000, 150000]
    t_refs = (240.0, 8.0, 0.33, 0.044, 0.0152)
    for row, t_ref in zip(rows, t_refs):
        assert float(row[1]) == pytest.approx(t_ref, rel=0.05)
    text = capsys.readouterr().out
    assert "T_tot_s" in text
    assert "150000" in text


def test_fig4_default_family_and_scaling(tmp_path):
    out = tmp_path / "fig4.csv"
    assert run(["fig4", "--out", out]) == 0
    header, rows = read_rows(out)
    assert header == "L_km,f_hz,P_c,T_tot_s,classical_s"
    assert len(rows) == 20
    for r in rows:
        L, f, pc, t, classical = map(float, r)
        assert classical == pytest.approx(L / 2e5, rel=1e-12)
        assert t >= classical
    # Linearity in L at P_c >= 0.5: successive differences double on the
    # geometric distance grid.
    for f_sel, pc_sel in ((40e3, 0.5), (1e6, 1.0)):
        ts = [float(r[3]) for r in rows if float(r[1]) == f_sel and float(r[2]) == pc_sel]
        assert len(ts) == 5
        diffs = [b - a for a, b in zip(ts, ts[1:])]
        for d1, d2 in zip(diffs, diffs[1:]):
            assert d2 == pytest.approx(2 * d1, rel=1e-9)


def test_fig4_configured_pair(tmp_path):
    cfgfile = tmp_path / "run.cfg"
    cfgfile.write_text("f_hz = 1e6\nP_c = 1\n")
    out = tmp_path / "fig4.csv"
    assert run(["fig4", "--config", cfgfile, "--out", out]) == 0
    _, rows = read_rows(out)
    assert len(rows) == 5
    assert all(float(r[1]) == 1e6 and float(r[2]) == 1.0 for r in rows)


def test_verify_circuit_exit_zero(capsys):
    assert run(["verify-circuit"]) == 0
    assert "all checks passed" in capsys.readouterr().out


def test_verify_circuit_failure_exit(monkeypatch, capsys):
    from qubus.parity import CircuitReport

    bad = CircuitReport()
    bad.add("broken stage", 1.0)
    monkeypatch.setattr(cli, "verify_circuit", lambda: bad)
    assert run(["verify-circuit"]) == 1
    assert "broken stage" in capsys.readouterr().out


def test_mc_byte_identical_for_same_seed(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    assert run(["mc", "--trials", 2000, "--seed", 7, "--out", a]) == 0
    assert run(["mc", "--trials", 2000, "--seed", 7, "--out", b]) == 0
    assert a.read_bytes() == b.read_bytes()
    log_a = tmp_path / "a_events.log"
    log_b = tmp_path / "b_events.log"
    assert log_a.read_bytes() == log_b.read_bytes()
    c = tmp_path / "c.csv"
    assert run(["mc", "--trials", 2000, "--seed", 8, "--out", c]) == 0
    assert a.read_bytes() != c.read_bytes()


def test_mc_csv_shape_and_event_log_format(tmp_path):
    out = tmp_path / "mc.csv"
    assert run(["mc", "--trials", 500, "--out", out]) == 0
    header, rows = read_rows(out)
    assert header == "kind,name,value"
    names = {(r[0], r[1]) for r in rows}
    assert ("link", "success_rate") in names
    assert ("chain", "mean_time_s") in names
    log = (tmp_path / "mc_events.log").read_text().splitlines()
    payload = [line for line in log if line and not line.startswith("#")]
    assert payload
    assert all(" = " in line for line in payload)


def test_config_error_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("nonsense_key = 1\n")
    assert run(["table", "--config", bad]) == 2
    assert "unknown key" in capsys.readouterr().err
    ill = tmp_path / "ill.cfg"
    ill.write_text("theta = -0.5\n")
    assert run(["mc", "--config", ill, "--trials", 10]) == 3
