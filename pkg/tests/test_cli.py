import json

import pytest
from hypothesis import given, strategies as st

from hurwitz_tau.cli import RunConfig, UsageError, main
from hurwitz_tau.report import CheckReport, compare

G1 = {"type": "hyperelliptic", "branch_points": [[-1.3, 0], [-0.4, 0], [0.7, 0], [2.1, 0]]}
G2 = {"type": "hyperelliptic",
      "branch_points": [[-1, 0.1], [1, -0.2], [2, 0.3], [3, -0.1], [4, 0.2], [5, 0]]}


def write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(obj if isinstance(obj, str) else json.dumps(obj))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_tau_hyperelliptic(tmp_path, capsys):
    code, out, _ = run(capsys, "tau", write(tmp_path, "c.json", G1))
    rep = json.loads(out)
    assert code == 0 and rep["x_independence"] == "pass"


def test_tau_rational_c_independent(tmp_path, capsys):
    vals = []
    for c in (0.3, 0.7):
        f = write(tmp_path, f"r{c}.json", {"type": "rational", "numerator": [c, 0, 1], "infinity_profile": [2]})
        code, out, _ = run(capsys, "tau", f)
        assert code == 0
        vals.append(json.loads(out)["log_modulus"])
    assert abs(vals[0] - vals[1]) < 1e-8


def test_malformed_json(tmp_path, capsys):
    code, out, err = run(capsys, "tau", write(tmp_path, "bad.json", '{"type": '))
    assert code == 2 and out == "" and "line 1" in err


def test_field_diagnostic(tmp_path, capsys):
    bad = {"type": "hyperelliptic", "branch_points": [[0, 0], "x", [1, 0], [2, 0]]}
    code, out, err = run(capsys, "tau", write(tmp_path, "b.json", bad))
    assert code == 2 and out == "" and "branch_points" in err and "[1]" in err


def test_unknown_check(tmp_path, capsys):
    code, out, _ = run(capsys, "check", write(tmp_path, "c.json", G1), "nonsense")
    assert code == 2 and out == ""


def test_check_scaling_and_euler(tmp_path, capsys):
    f = write(tmp_path, "c.json", G1)
    code, out, _ = run(capsys, "check", f, "scaling")
    reps = [CheckReport.from_json(line) for line in out.splitlines()]
    assert code == 0 and len(reps) == 3 and all(r.params["exponent"] == "12" for r in reps)
    code, out, _ = run(capsys, "check", f, "euler")
    rep = CheckReport.from_json(out)
    assert code == 0 and rep.rhs == -3.0


def test_check_boundary(tmp_path, capsys):
    csv_path = tmp_path / "rows.csv"
    code, out, _ = run(capsys, "check", write(tmp_path, "g2.json", G2), "boundary", "--k", "2",
                       "--csv", str(csv_path))
    tau_rep = CheckReport.from_json(out.splitlines()[0])
    assert code == 0 and abs(tau_rep.lhs - 6) < 0.06
    assert csv_path.read_text().startswith("epsilon,log_eps,log_tau,log_eta")


def test_failing_check_exit_code(tmp_path, capsys):
    # a grid far from the asymptotic regime; the fit misses its target
    cfg = write(tmp_path, "cfg.json", {"epsilon_grid": [0.9, 0.8]})
    code, out, err = run(capsys, "--config", cfg, "check", write(tmp_path, "g2.json", G2), "boundary", "--k", "2")
    assert code == 1


def test_hodge(capsys):
    code, out, _ = run(capsys, "hodge", "2", "2")
    rows = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and [(r["coefficient_num"], r["coefficient_den"]) for r in rows] == [(1, 5), (1, 5)]
    code, out, _ = run(capsys, "hodge", "0", "2")
    assert code == 0 and out == ""


def test_hodge_genus0_flag(capsys):
    code, out, _ = run(capsys, "hodge", "0", "6", "--genus0")
    flagged = [json.loads(line) for line in out.splitlines() if '"flag"' in line]
    assert code == 0 and flagged[0]["mu"] == [3, 1, 1, 1] and flagged[0]["flag"] == "c3 = 0"


def test_hodge_check_d2(capsys):
    code, out, _ = run(capsys, "hodge", "7", "2", "--check-d2")
    assert code == 0 and '"pass": true' in out.splitlines()[-1]


def test_strata_csv(tmp_path, capsys):
    cfg = write(tmp_path, "cfg.json", {"format": "csv"})
    code, out, _ = run(capsys, "--config", cfg, "strata", "2", "2", "--brute-force")
    lines = out.splitlines()
    assert code == 0 and lines[0].startswith("g,d,k,mu") and len(lines) == 3


def test_deterministic(tmp_path, capsys):
    f = write(tmp_path, "c.json", G1)
    outs = [run(capsys, "check", f, "psl2")[1] for _ in range(2)]
    assert outs[0] == outs[1] and outs[0]


@pytest.mark.parametrize("cfg", [{"fd_step": 0}, {"epsilon_grid": [1e-3, 1e-2]},
                                 {"format": "xml"}, {"bogus": 1}])
def test_bad_config(tmp_path, capsys, cfg):
    code, out, err = run(capsys, "--config", write(tmp_path, "cfg.json", cfg), "hodge", "2", "2")
    assert code == 2 and out == ""


def test_config_defaults():
    c = RunConfig()
    assert c.quadrature_tol == 1e-10 and c.theta_tol == 1e-12 and len(c.epsilon_grid) == 9
    with pytest.raises(UsageError):
        RunConfig(theta_tol=-1)


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@given(finite, finite, finite, st.booleans())
def test_report_roundtrip(a, b, c, flag):
    rep = CheckReport("x", complex(a, b), c, abs(a), 0.5, flag, {"k": 2, "z": [1.5, "u"]})
    back = CheckReport.from_json(rep.to_json())
    assert back == rep
    assert back.to_json() == rep.to_json()


def test_compare_floor():
    assert compare("c", 1e-12, 0.0, 1e-5, abs_floor=1e-10).passed
    assert not compare("c", 1e-12, 0.0, 1e-5).passed
