import json
import math

import pytest

from phivar.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_variation_command_json(capsys):
    code, out = run_cli(
        capsys,
        "variation", "--base", "tent", "--b", "2", "--alpha-sign", "+",
        "--critical", "--n", "2", "--t", "1", "--q", "1",
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    row = doc["results"]["rows"][0]
    assert row["v_phi"] == pytest.approx(1.2011224, abs=1e-6)
    assert row["v_q"]["1"] == pytest.approx(1.0, rel=1e-12)
    assert row["ratio"] == pytest.approx(row["v_phi"] / row["theory_limit"], rel=1e-15)


def test_limit_command(capsys):
    code, out = run_cli(
        capsys, "limit", "--base", "tent", "--b", "3", "--alpha-sign", "-", "--critical"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["limits"][0]["value"] == pytest.approx(
        math.sqrt(1 / (math.pi * math.log(3))), rel=1e-12
    )
    assert doc["results"]["limits"][0]["value"] == pytest.approx(0.5382900, abs=5e-5)


def test_chain_command(capsys):
    code, out = run_cli(capsys, "chain", "--b", "3", "--sign", "+")
    assert code == 0
    doc = json.loads(out)
    assert doc["results"]["P"] == [
        ["2/3", "0", "1/3"],
        ["1/3", "1/3", "1/3"],
        ["1/3", "0", "2/3"],
    ]
    assert doc["results"]["sigma2"] == 2.0


def test_eval_command_csv(capsys):
    code, out = run_cli(
        capsys,
        "eval", "--base", "tent", "--b", "2", "--critical",
        "--t", "0", "0.5", "--format", "csv",
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "t,value"
    assert float(lines[2].split(",")[1]) == pytest.approx(0.5, abs=1e-12)


def test_mc_command(capsys):
    code, out = run_cli(
        capsys,
        "mc", "--base", "tent", "--b", "3", "--critical",
        "--n", "200", "--count", "20000", "--seed", "3",
    )
    assert code == 0
    doc = json.loads(out)
    ens = doc["results"]["ensembles"][0]
    assert abs(ens["mean_z"]) < 0.5
    assert ens["ks_normal"] < 0.05  # Z_n lives on a unit lattice; KS ~ 1/sqrt(n)
    assert ens["scaled_phi_expectation"] == pytest.approx(1.08, abs=0.1)


def test_diagnose_command(capsys):
    code, out = run_cli(
        capsys,
        "diagnose", "--base", "trig", "--nu", "1", "--rho", "0", "--b", "2",
        "--critical", "--max-n", "4", "--path-n", "500", "--seed", "1",
    )
    assert code == 0
    doc = json.loads(out)
    res = doc["results"]
    assert all(r["max_abs_residual"] < 1e-10 for r in res["martingale_residuals"])
    assert res["qv_over_n"] == pytest.approx(2 * math.pi**2, rel=0.2)
    assert 0 < res["equidistribution_ks"] < 0.2


def test_json_csv_round_trip(capsys, tmp_path):
    args = [
        "variation", "--base", "tent", "--b", "2", "--critical",
        "--n", "3", "4", "--t", "0.5", "1", "--q", "1", "2",
    ]
    code, json_out = run_cli(capsys, *args, "--format", "json")
    assert code == 0
    code, csv_out = run_cli(capsys, *args, "--format", "csv")
    assert code == 0

    doc = json.loads(json_out)
    rebuilt = []
    for row in doc["results"]["rows"]:
        for q_str in sorted(row["v_q"], key=float):
            rebuilt.append(
                [
                    str(row["n"]),
                    f"{row['t']:.17g}",
                    f"{row['v_phi']:.17g}",
                    f"{float(q_str):.17g}",
                    f"{row['v_q'][q_str]:.17g}",
                    f"{row['theory_limit']:.17g}",
                    f"{row['ratio']:.17g}",
                ]
            )
    csv_lines = [line.split(",") for line in csv_out.strip().splitlines()[1:]]
    assert csv_lines == rebuilt


def test_output_file_and_determinism(tmp_path, capsys):
    paths = [tmp_path / "a.json", tmp_path / "b.json"]
    for p in paths:
        code = main(
            [
                "variation", "--base", "trig", "--b", "2", "--critical",
                "--n", "6", "--t", "1", "--output", str(p),
            ]
        )
        assert code == 0
    capsys.readouterr()
    assert paths[0].read_bytes() == paths[1].read_bytes()


def test_error_object(capsys):
    code, out = run_cli(
        capsys, "variation", "--base", "tent", "--b", "2", "--magnitude", "0.7",
        "--critical", "--n", "2",
    )
    assert code == 1
    doc = json.loads(out)
    assert doc["error"]["type"] == "PhiVarError"


def test_usage_error_exit_code(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["variation", "--b", "2"])  # missing required --n
    assert exc.value.code == 2


def test_trig_params_rejected_for_tent(capsys):
    code, out = run_cli(
        capsys, "limit", "--base", "tent", "--b", "2", "--critical", "--nu", "1"
    )
    assert code == 1
    assert "trig" in json.loads(out)["error"]["message"]
