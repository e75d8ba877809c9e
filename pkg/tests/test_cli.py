import json

import pytest

from kuramoto_sync.cli import main
from kuramoto_sync.io import read_csv


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def table(text):
    return read_csv(text)


def test_equilibria_n3_includes_xi_one(capsys):
    code, out, _ = run(capsys, "equilibria", "--n", "3", "--ratio", "1.0")
    assert code == 0
    meta, header, rows = table(out)
    assert header[:3] == ["sigma", "xi", "C_hat"] and header[-3] == "verdict"
    assert any(r[1] == 1 and r[header.index("multiplicity")] == 4 for r in rows)
    assert meta["equilibria_by_sign_sequence"] == "5" and meta["distinct_states"] == "2"


def test_equilibria_below_all_thresholds_is_empty(capsys):
    code, out, _ = run(capsys, "equilibria", "--n", "5", "--ratio", "0.5")
    assert code == 0
    assert table(out)[2] == []


def test_equilibria_single_sigma(capsys):
    _, out, _ = run(capsys, "equilibria", "--n", "5", "--ratio", "0.7", "--sigma", "++++")
    verdicts = [r[-3] for r in table(out)[2]]
    assert verdicts == ["stable", "unstable"]
    _, out, _ = run(capsys, "equilibria", "--n", "5", "--ratio", "1.0", "--sigma", "++++")
    assert [r[-3] for r in table(out)[2]] == ["stable"]


def test_bad_sigma_reports_position(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["equilibria", "--n", "5", "--ratio", "1", "--sigma", "+-*+"])
    assert exc.value.code == 2
    assert "position 3" in capsys.readouterr().err


def test_sigma_length_checked(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["chi", "--n", "5", "--sigma", "+-+"])
    assert exc.value.code == 2


def test_usage_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["equilibria", "--n", "5", "--ratio", "1", "--K", "2"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["equilibria", "--n", "5"])
    assert exc.value.code == 2
    assert main(["equilibria", "--n", "4", "--ratio", "1"]) == 2


def test_numerical_failure_exit_3(capsys):
    assert main(["continuum", "--ratio", "0.5"]) == 3
    assert main(["stability", "--n", "3", "--sigma", "+-", "--xi", "1.0"]) == 0
    assert "numerical failure" in capsys.readouterr().err


def test_bifurcations_n3(capsys):
    code, out, _ = run(capsys, "bifurcations", "--n", "3", "--enumerate-all")
    assert code == 0
    meta, header, rows = table(out)
    kinds = {(r[0], round(r[1], 5)) for r in rows}
    assert ("saddle-node", 0.56813) in kinds and ("pitchfork", 1.0) in kinds
    assert meta["families_distinct"] == "4" and meta["families_coarse"] == "3"


def test_chi_rows(capsys):
    code, out, _ = run(capsys, "chi", "--n", "11", "--sigma", "+++++−++++", "--samples", "1000")
    assert code == 0
    _, header, rows = table(out)
    assert header == ["xi", "chi", "dchi_dxi", "K_over_a"]
    assert len(rows) == 1000 and rows[0][0] == 0 and rows[-1][0] == 1


def test_stability_json(capsys):
    code, out, _ = run(capsys, "stability", "--n", "3", "--sigma", "++", "--ratio", "1.0")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"meta", "data"}
    assert [d["verdict"] for d in doc["data"]] == ["stable", "unstable"]
    assert all(d["l_zero"] >= 1 for d in doc["data"])


def test_diagram_and_simulate_and_continuum(capsys, tmp_path):
    code, out, _ = run(capsys, "diagram", "--n", "3", "--ratio-range", "0.5", "3", "--samples", "6")
    assert code == 0 and table(out)[1][0] == "K"
    path = tmp_path / "traj.csv"
    code, _, _ = run(capsys, "simulate", "--n", "5", "--ratio", "1", "--sigma", "++++", "--perturb", "0.01",
                     "--t-end", "2", "--record-every", "50", "--output", str(path))
    assert code == 0
    meta, header, rows = table(path.read_text())
    assert header[0] == "t" and len(header) == 6 and rows[-1][0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["simulate", "--n", "5", "--ratio", "1", "--sigma", "++++", "--root", "3"])
    assert exc.value.code == 2
    code, out, _ = run(capsys, "continuum", "--ratio", "2", "--flip", "0.75", "1", "--discretize", "11")
    meta, header, rows = table(out)
    assert meta["kind"] == "discontinuous" and len(rows) == 11


def test_outputs_are_byte_identical(capsys):
    argv = ["simulate", "--n", "5", "--ratio", "2", "--perturb", "0.2", "--seed", "3", "--t-end", "3"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b
    assert "# seed: 3" in a


def test_selfcheck_exit_codes(capsys, monkeypatch):
    from kuramoto_sync import selfcheck

    good = lambda: [selfcheck.CheckResult(1, "ok", True, "fine", 0.0)]
    bad = lambda: [selfcheck.CheckResult(1, "broken", False, "off by a lot", 0.0)]
    monkeypatch.setattr(selfcheck, "ALL_CHECKS", (good,))
    assert main(["selfcheck"]) == 0
    assert "[PASS] 1. ok" in capsys.readouterr().out
    monkeypatch.setattr(selfcheck, "ALL_CHECKS", (good, bad))
    assert main(["selfcheck"]) == 1
    assert "[FAIL] 1. broken" in capsys.readouterr().out


def test_sigma_starting_with_minus(capsys):
    code, out, _ = run(capsys, "equilibria", "--n", "5", "--ratio", "2.3", "--sigma", "-+-+")
    assert code == 0
    assert all(r[0] == "-+-+" for r in table(out)[2])
