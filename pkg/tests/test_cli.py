import json

import numpy as np
import pytest

from ontolab.cli import main
from ontolab.config import RunConfig
from ontolab.exceptions import InvariantViolation, ParseError
from ontolab.io import save_model
from ontolab.models.lewis import AxialE0Measure


def _run(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


@pytest.fixture
def epistemic_file(tmp_path, overlapping_qubit_model):
    path = tmp_path / "epistemic.json"
    save_model(overlapping_qubit_model, path)
    return path


def test_validate(capsys, write_json, qubit_document):
    code, out = _run(capsys, ["validate", str(write_json(qubit_document()))])
    assert code == 0
    report = json.loads(out)
    assert report["valid"] is True
    assert report["born_residual"] == 0.0
    assert report["preparations"] == 2


def test_input_errors_exit_2(capsys, tmp_path, write_json, qubit_document):
    assert main(["validate", str(tmp_path / "absent.json")]) == 2
    assert main(["validate", str(write_json(qubit_document(mu_one=(0.5, 0.4))))]) == 2
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
    err = capsys.readouterr().err
    assert "ontic_points" in err


def test_onticity(capsys, epistemic_file, write_json, qubit_document):
    code, out = _run(capsys, ["onticity", str(epistemic_file)])
    assert code == 0
    report = json.loads(out)
    assert report["classification"] == "PSI_EPISTEMIC"
    assert report["offending_pairs"][0]["pair"] == ["zero", "plus"]

    code, _ = _run(capsys, ["onticity", str(epistemic_file), "--require-ontic"])
    assert code == 1
    code, out = _run(capsys, ["onticity", str(write_json(qubit_document())), "--require-ontic"])
    assert code == 0
    assert json.loads(out)["classification"] == "PSI_ONTIC"


def test_onticity_of_composite_checks_subsystems(capsys, tmp_path, disjoint_qubit_model):
    from ontolab.ontology import pip_compose

    path = tmp_path / "composite.json"
    save_model(pip_compose(disjoint_qubit_model, disjoint_qubit_model), path)
    code, out = _run(capsys, ["onticity", str(path), "--require-ontic"])
    assert code == 0
    verdicts = json.loads(out)["subsystems"]
    assert [v["verdict"] for v in verdicts] == ["ONTIC", "ONTIC"]


def test_decompose(capsys, tmp_path, write_json, qubit_document, epistemic_file):
    output = tmp_path / "decomposition.json"
    code, out = _run(capsys, ["decompose", str(write_json(qubit_document())), "-o", str(output)])
    assert code == 0
    assert json.loads(out)["holds"] is True
    written = json.loads(output.read_text())
    assert written["decomposition"]["fibers"] == {"zero": ["a"], "one": ["b"]}
    assert written["label_map"]["assignment"] == {"a": "zero", "b": "one"}

    code, _ = _run(capsys, ["decompose", str(epistemic_file), "-o", str(output)])
    assert code == 0
    assert json.loads(output.read_text())["decomposition"] is None
    code, _ = _run(
        capsys, ["decompose", str(epistemic_file), "-o", str(output), "--require-ontic"]
    )
    assert code == 1


def test_pbr_report(capsys, tmp_path, epistemic_file):
    code, out = _run(capsys, ["pbr", str(epistemic_file)])
    assert code == 0
    report = json.loads(out)
    assert abs(report["common_overlap_mass"] - 0.01) < 1e-12
    assert abs(report["min_deviation_bound"] - 0.0025) < 1e-12

    target = tmp_path / "pbr.json"
    code, out = _run(capsys, ["pbr", str(epistemic_file), "--report", str(target)])
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["witness_points"] == ["b,b"]


def test_born_check_command_is_deterministic(capsys):
    argv = [
        "lewis", "born-check", "--theta", "1.0", "--basis-angle", "0.4",
        "--samples", "20000", "--seed", "42", "--workers", "2",
    ]
    code, first = _run(capsys, argv)
    assert code == 0
    _, second = _run(capsys, argv)
    assert first == second
    report = json.loads(first)
    assert set(report) >= {"estimate", "stderr", "born", "deviation_sigmas"}
    assert report["samples"] == 20000
    assert report["born"] == pytest.approx(np.cos((1.0 - 0.4) / 2) ** 2)


def test_born_check_outside_hemisphere(capsys):
    argv = ["lewis", "born-check", "--theta", "2.0", "--basis-angle", "0.0", "--samples", "2000"]
    assert main(argv) == 2
    assert main(argv + ["--allow-outside-hemisphere"]) == 0


def test_overlap_command(capsys):
    argv = ["lewis", "overlap", "--theta1", "0", "--theta2", str(np.pi / 3), "--samples", "50000"]
    code, out = _run(capsys, argv)
    assert code == 0
    report = json.loads(out)
    assert abs(report["analytic"] - (1 - np.sqrt(3) / 2) / 2) < 1e-12
    assert report["deviation_sigmas"] < 4
    assert _run(capsys, argv)[1] == out


def test_config_file_and_flags(capsys, tmp_path):
    config = tmp_path / "run.json"
    config.write_text(json.dumps({"seed": 5, "mc_samples": 3000, "e0_measure": "axial"}))
    argv = ["lewis", "born-check", "--theta", "0.5", "--basis-angle", "1.0", "--config", str(config)]
    code, out = _run(capsys, argv)
    assert code == 0
    report = json.loads(out)
    assert (report["seed"], report["samples"], report["e0_measure"]) == (5, 3000, "axial")
    code, out = _run(capsys, argv + ["--seed", "6"])
    assert json.loads(out)["seed"] == 6


def test_run_config_validation(tmp_path):
    assert RunConfig().mc_samples == 100_000
    with pytest.raises(InvariantViolation, match="eps"):
        RunConfig(eps=-1.0)
    with pytest.raises(InvariantViolation, match="seed"):
        RunConfig(seed=2**64)
    with pytest.raises(InvariantViolation, match="mc_samples"):
        RunConfig(mc_samples=0)
    with pytest.raises(InvariantViolation, match="unknown"):
        RunConfig.from_mapping({"colour": "blue"})
    assert isinstance(RunConfig(e0_measure="axial").lewis_model().e0_measure, AxialE0Measure)
    broken = tmp_path / "broken.json"
    broken.write_text("{seed: 1}")
    with pytest.raises(ParseError):
        RunConfig.from_file(broken)


def test_binary_input_exits_2(capsys, tmp_path):
    binary = tmp_path / "binary.json"
    binary.write_bytes(b"\xff\xfe")
    with pytest.raises(ParseError, match="UTF-8"):
        RunConfig.from_file(binary)
    assert main(["validate", str(binary)]) == 2
    argv = ["lewis", "overlap", "--theta1", "0", "--theta2", "1.0", "--config", str(binary)]
    assert main(argv) == 2
    assert "UTF-8" in capsys.readouterr().err
