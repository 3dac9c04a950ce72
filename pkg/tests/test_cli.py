import json

import pytest

from mbsim.cli import main


def _write(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


def test_success_writes_outputs(tmp_path):
    cfg = _write(tmp_path, {"experiment": "braid", "shots": 0, "sweep": {"values": [0, 300]}})
    out = tmp_path / "out"
    assert main(["braid", "--config", cfg, "--out", str(out), "--plots"]) == 0
    assert (out / "results.csv").exists() and (out / "run.json").exists() and (out / "braid.svg").exists()


def test_seed_flag_overrides_config(tmp_path):
    cfg = _write(tmp_path, {"experiment": "move", "seed": 1})
    main(["move", "--config", cfg, "--out", str(tmp_path / "a"), "--seed", "9"])
    main(["move", "--config", _write(tmp_path, {"experiment": "move", "seed": 9}, "b.json"), "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "results.csv").read_bytes() == (tmp_path / "b" / "results.csv").read_bytes()


@pytest.mark.parametrize(
    "doc",
    [{"experiment": "braid", "shots": "many"}, {"experiment": "move"}],
)
def test_config_errors_exit_2(tmp_path, doc, capsys):
    cfg = _write(tmp_path, doc)
    assert main(["braid", "--config", cfg, "--out", str(tmp_path)]) == 2
    assert "config error" in capsys.readouterr().err


def test_missing_file_exits_2(tmp_path):
    assert main(["braid", "--config", str(tmp_path / "nope.json")]) == 2


def test_capacity_error_exits_3(tmp_path):
    cfg = _write(tmp_path, {"experiment": "braid", "model": {"n_qubits": 20}})
    assert main(["braid", "--config", cfg, "--out", str(tmp_path)]) == 3


@pytest.mark.parametrize("experiment", ["move", "track", "errorsweep", "qpt", "pulse_compile"])
def test_every_experiment_plots(tmp_path, experiment):
    doc = {"experiment": experiment}
    if experiment in ("errorsweep", "qpt"):
        doc.update(shots=0, sweep={"values": [0.008] if experiment == "errorsweep" else [0.5]})
    cfg = _write(tmp_path, doc)
    assert main([experiment, "--config", cfg, "--out", str(tmp_path / "o"), "--plots"]) == 0
    assert (tmp_path / "o" / f"{experiment}.svg").exists()
