import json
from importlib import resources

import pytest

from geofield.cli import ModelError, load, main
from geofield.hamiltonian import Variant

from conftest import MODELS, run_cli

jsonschema = pytest.importorskip("jsonschema")

MODEL_FILES = sorted(p.name for p in MODELS.glob("*.toml"))


def schema(name):
    return json.loads(resources.files("geofield").joinpath("schemas", f"{name}.json").read_text())


def write(tmp_path, text, name="m.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_load_wave():
    m = load(MODELS / "wave.toml")
    assert (m.theory.variant, m.theory.k, m.theory.n) == (Variant.KSymLag, 2, 1)
    assert "travelling" in m.sections


def test_load_rejects_velocity_in_hamiltonian(tmp_path):
    p = write(tmp_path, 'formalism = "KSymHam"\nk = 1\nn = 1\ngenerator = "v1_1^2"\n')
    with pytest.raises(ModelError, match="v1_1 not in Hamiltonian frame"):
        load(p)


def test_load_missing_k(tmp_path):
    p = write(tmp_path, 'formalism = "KSymHam"\nn = 1\ngenerator = "p1_1"\n')
    with pytest.raises(ModelError, match="missing required key 'k'"):
        load(p)


def test_load_toml_error_has_line(tmp_path):
    p = write(tmp_path, 'formalism = "KSymHam"\nk = 1\nn = = 1\n')
    with pytest.raises(ModelError, match="line 3"):
        load(p)


def test_load_expression_error_has_offset(tmp_path):
    p = write(tmp_path, 'formalism = "KSymHam"\nk = 1\nn = 1\ngenerator = "p1_1 +* q1"\n')
    with pytest.raises(ModelError, match="offset 6"):
        load(p)


def test_usage_errors_exit_2(tmp_path, capsys):
    assert main(["info", str(tmp_path / "absent.toml")]) == 2
    assert main(["nonsense"]) == 2
    assert main(["legendre", str(MODELS / "oscillator.toml")]) == 2
    assert "Lagrangian" in capsys.readouterr().err


@pytest.mark.parametrize("model", MODEL_FILES)
@pytest.mark.parametrize("command", ["info", "canon", "equations", "legendre"])
def test_json_reports_validate(model, command, capsys):
    code = main([command, str(MODELS / model), "--json"])
    out = capsys.readouterr().out
    if command == "legendre" and "Lag" not in load(MODELS / model).theory.variant.value:
        assert code == 2
        return
    assert code == 0
    jsonschema.validate(json.loads(out), schema(command))


def test_equations_oscillator_text(capsys):
    assert main(["equations", str(MODELS / "oscillator.toml")]) == 0
    out = capsys.readouterr().out
    assert "dq1_dt1 = p1_1" in out and "dp1_1_dt1 = -q1" in out


def test_info_mentions_velocity_convention(capsys):
    main(["info", str(MODELS / "wave.toml")])
    assert "v{A}_{i}" in capsys.readouterr().out


def test_verify_sections(capsys):
    assert main(["verify", str(MODELS / "laplace.toml")]) == 1
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, schema("verify"))
    verdicts = {s["section"]: s["verdict"] for s in report["sections"]}
    assert verdicts == {"harmonic": "Pass", "nonharmonic": "Fail"}
    assert main(["verify", str(MODELS / "wave.toml")]) == 0


@pytest.mark.parametrize("model", ["oscillator.toml", "driven.toml", "cross_term.toml"])
def test_verify_theorems(model, capsys):
    assert main(["verify", str(MODELS / model), "--theorems"]) == 0
    report = json.loads(capsys.readouterr().out)
    jsonschema.validate(report, schema("verify"))
    certs = report["theorems"]["certificates"]
    assert all(c["result"] == c["expected"] for c in certs)


def test_convert_to_multisymplectic(tmp_path, capsys):
    src = write(tmp_path, 'formalism = "KCosymHam"\nk = 2\nn = 1\ngenerator = "(p1_1^2 + p2_1^2)/2 + t1*q1"\n')
    out = tmp_path / "ms.toml"
    assert main(["convert", str(src), "--to", "multisymplectic", "-o", str(out)]) == 0
    m = load(out)
    assert m.theory.variant is Variant.MsHamSection
    assert m.theory.generator == load(src).theory.generator
    assert "Mpi (q1, p1_1, p2_1, t1, t2, p)" in out.read_text()


def test_convert_guard_and_legendre(tmp_path, capsys):
    assert main(["convert", str(MODELS / "driven.toml"), "--to", "k-symplectic"]) == 1
    assert "not autonomous" in capsys.readouterr().err
    assert main(["convert", str(MODELS / "wave.toml"), "--to", "KSymHam"]) == 0
    assert 'generator = "p1_1^2/2 - p2_1^2/2"' in capsys.readouterr().out
    assert main(["convert", str(MODELS / "singular.toml"), "--to", "KSymHam"]) == 2


def test_solve_csv_and_report(tmp_path):
    csv, rep = tmp_path / "out.csv", tmp_path / "rep.json"
    args = ["solve", str(MODELS / "laplace.toml"), "--ranges", "0.2,0.2", "--steps", "0.1", "-o", str(csv), "--report", str(rep)]
    assert main(args) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "t1,t2,q1,p1_1,p2_1" and len(lines) == 10
    report = json.loads(rep.read_text())
    jsonschema.validate(report, schema("solve"))
    assert report["integral_section"] is True


def test_solve_non_integrable_exit_1(tmp_path):
    args = ["solve", str(MODELS / "klein_gordon_ms.toml"), "--ranges", "0.5,0.5", "--steps", "0.1,0.1"]
    assert main(args + ["--x0", "q1=1,p1_1=0,p2_1=0", "-o", str(tmp_path / "o.csv")]) == 1
    assert main(args + ["--x0", "q1=1"]) == 2


def test_solve_singular_lagrangian_fails(tmp_path):
    args = ["solve", str(MODELS / "singular.toml"), "--ranges", "1,1", "--steps", "0.5,0.5", "--x0", "q1=0,v1_1=0,v2_1=0"]
    assert main(args) == 1


def test_module_entry_point():
    proc = run_cli("info", MODELS / "oscillator.toml", check=0)
    assert proc.stdout.startswith(b"formalism   : KSymHam")
