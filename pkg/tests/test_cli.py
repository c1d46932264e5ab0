import json
import math

import pytest

from hillcert import fourier
from hillcert.cli import (
    ConfigError,
    RunConfig,
    certify_payload,
    gersh_payload,
    main,
    spectrum_payload,
)
from hillcert.operator import constant_operator, save_spec


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_certify_example(capsys):
    code, payload = run_json(capsys, ["certify", "--operator", "hill(0.1,2)", "--mu", "0", "--N", "10"])
    assert code == 0
    target = payload["target"]
    assert target["isolation_ok"] and target["bound"] <= 2.37e-8
    assert target["lambda_N"] == pytest.approx(0.01 - 2 - 2 * math.sqrt(0.9901), abs=1e-12)
    assert target["cert_level"] == "Certified" and target["component_count"] == 1


def test_gersh_example(capsys):
    code, payload = run_json(capsys, ["gersh", "--operator", "hill(0.1,2)", "--mu", "0", "--N", "5"])
    assert code == 0
    counts = [c["disk_count"] for c in payload["components"]]
    assert counts[:3] == [1, 2, 2]
    assert all(c["disk_count"] == c["eigenvalue_count"] for c in payload["components"])


def test_spectrum_constant_file(tmp_path, capsys):
    L = 2 * math.pi
    path = tmp_path / "op.json"
    save_spec(constant_operator([-4.0, 0.0], -1.0, L), path)
    code, payload = run_json(capsys, ["spectrum", "--operator", str(path), "--mu", "0", "--N", "4"])
    assert code == 0
    expected = sorted(n * n - 4.0 for n in range(-4, 5))
    assert payload["eigenvalues"] == pytest.approx(expected, abs=1e-13)
    assert len(payload["eigenvalues"]) == 9


@pytest.mark.parametrize(
    "argv",
    [
        ["spectrum", "--operator", "hill(2,1)"],
        ["spectrum", "--operator", "hill(0.1,0)"],
        ["spectrum", "--operator", "nonsense"],
        ["spectrum", "--N", "0"],
        ["spectrum", "--mu", "5"],
        ["converge", "--N-list", "10,5"],
        ["bogus"],
        ["spectrum", "--N", "x"],
    ],
)
def test_validation_exit_1(argv, capsys):
    assert main(argv) == 1


def test_non_hermitian_exit_2(tmp_path, capsys):
    # a first-order term with real coefficient is not self-adjoint
    L = 2.0
    spec = {"order": 2, "leading": -1, "period": L,
            "coefficients": [None, fourier.coefficient_to_dict(fourier.constant(1.0, L))]}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(spec))
    assert main(["spectrum", "--operator", str(path), "--N", "3"]) == 2


def test_isolation_failure_exit_2(capsys):
    assert main(["certify", "--operator", "hill(0.1,2)", "--N", "10", "--zeta", "-3.98", "--r", "0.5"]) == 2


def test_explicit_ball(capsys):
    code, payload = run_json(capsys, ["certify", "--N", "12", "--zeta", "-3.98", "--r", "0.03"])
    assert code == 0 and payload["target"]["bound"] < 1e-8


def test_json_round_trip():
    cfg = RunConfig("certify", N=10)
    payload, ok = certify_payload(cfg)
    assert ok
    assert json.loads(json.dumps(payload)) == payload
    g = gersh_payload(RunConfig("gersh", N=5))
    assert json.loads(json.dumps(g)) == g
    s = spectrum_payload(RunConfig("spectrum", N=6))
    assert json.loads(json.dumps(s)) == s


def test_output_idempotent(tmp_path, capsys):
    for cmd in (["certify"], ["bands", "--N", "4", "--mu-count", "4"], ["converge", "--N-list", "5,10"]):
        out = tmp_path / (cmd[0] + ".out")
        assert main(cmd + ["--out", str(out)]) == 0
        first = out.read_bytes()
        assert main(cmd + ["--out", str(out)]) == 0
        assert out.read_bytes() == first


def test_converge_csv(tmp_path):
    out = tmp_path / "c.csv"
    assert main(["converge", "--N-list", "5,10,15", "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "N,lambda_N,error,bound,total_bound"
    assert len(lines) == 4


def test_converge_needs_reference_for_files(tmp_path, capsys):
    path = tmp_path / "op.json"
    save_spec(constant_operator([-4.0, 0.0], -1.0, 2.0), path)
    assert main(["converge", "--operator", str(path)]) == 1
    code = main(["converge", "--operator", str(path), "--zeta", "-4", "--r", "0.5",
                 "--reference", "-4", "--format", "json"])
    assert code == 0
    recs = json.loads(capsys.readouterr().out)["records"]
    assert all(r["error"] == 0.0 for r in recs)


def test_hill_demo(tmp_path, capsys):
    out = tmp_path / "demo"
    assert main(["hill-demo", "--out", str(out), "--ell-grid", "0,0.1,0.5", "--N-list", "10,20",
                 "--mu-count", "4"]) == 0
    names = {p.name for p in out.iterdir()}
    assert {"edges.csv", "gersh.json", "certify.json", "bands.csv", "summary.json"} <= names
    assert "converge_ell0.1.csv" in names
    cert = json.loads((out / "certify.json").read_text())
    assert cert["target"]["bound"] <= 2.37e-8


def test_config_validate():
    with pytest.raises(ConfigError):
        RunConfig("spectrum", ell_grid=[1.5]).validate()
    with pytest.raises(ConfigError):
        RunConfig("spectrum", r=-1.0).validate()
    RunConfig("hill-demo").validate()
