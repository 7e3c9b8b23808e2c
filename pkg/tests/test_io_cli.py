import json
import struct

import numpy as np
import pytest

from robustmean.cli import main
from robustmean.core import DataSet
from robustmean.errors import InvalidInput
from robustmean.inner_max import planted_instance
from robustmean.io import MAGIC, read_dataset, read_truth, sidecar_path, write_dataset


class TestDatasetFile:
    def test_roundtrip_and_layout(self, tmp_path):
        X = np.array([[1.0, -2.5], [3.25, 0.0], [1e-300, 7.0]])
        path = tmp_path / "x.bin"
        write_dataset(path, DataSet(X), {"mean": [0.0, 0.0]})
        raw = path.read_bytes()
        assert raw[:8] == MAGIC
        assert struct.unpack("<QQ", raw[8:24]) == (3, 2)
        assert struct.unpack("<d", raw[24:32])[0] == 1.0
        assert struct.unpack("<d", raw[32:40])[0] == -2.5
        assert read_dataset(path).samples.tobytes() == X.tobytes()
        assert read_truth(path) == {"mean": [0.0, 0.0]}
        assert sidecar_path(path).name == "x.bin.json"

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "bad.bin"
        path.write_bytes(b"NOTMAGIC" + bytes(16))
        with pytest.raises(InvalidInput):
            read_dataset(path)

    def test_truncated(self, tmp_path):
        path = tmp_path / "t.bin"
        write_dataset(path, DataSet(np.ones((2, 2))))
        path.write_bytes(path.read_bytes()[:-1])
        with pytest.raises(InvalidInput):
            read_dataset(path)

    def test_missing_truth(self, tmp_path):
        path = tmp_path / "y.bin"
        write_dataset(path, DataSet(np.ones((1, 1))))
        assert read_truth(path) is None


@pytest.fixture
def dataset(tmp_path):
    path = tmp_path / "data.bin"
    code = main(["datagen", "--family", "student_t", "--dof", "3", "--n", "600", "--d", "4",
                 "--mean", "2.0", "--seed", "1", "--contaminate", "3", "--radius", "50",
                 "--output", str(path)])
    assert code == 0
    return path


class TestCLI:
    def test_datagen_sidecar(self, dataset):
        truth = read_truth(dataset)
        assert truth["mean"] == [2.0] * 4
        assert len(truth["adversarial_rows"]) == 3
        assert read_dataset(dataset).samples.shape == (600, 4)

    def test_datagen_deterministic(self, dataset, tmp_path):
        other = tmp_path / "again.bin"
        main(["datagen", "--family", "student_t", "--dof", "3", "--n", "600", "--d", "4",
              "--mean", "2.0", "--seed", "1", "--contaminate", "3", "--radius", "50",
              "--output", str(other)])
        assert other.read_bytes() == dataset.read_bytes()

    def test_estimate(self, dataset, tmp_path):
        out = tmp_path / "report.json"
        code = main(["estimate", "--input", str(dataset), "--delta", "0.05", "--k", "20",
                     "--seed", "3", "--output", str(out)])
        assert code == 0
        report = json.loads(out.read_text())
        assert {"estimate", "initial_guess", "config", "iterations", "chosen_iteration", "timing"} <= set(report)
        assert report["config"]["k_override"] == 20
        assert np.linalg.norm(np.array(report["estimate"]) - 2.0) < 1.0

    def test_estimate_stdout(self, dataset, capsys):
        assert main(["estimate", "--input", str(dataset), "--delta", "0.05", "--k", "10",
                     "--output", "-"]) == 0
        assert "estimate" in json.loads(capsys.readouterr().out)

    def test_insufficient_samples_exit_code(self, dataset, tmp_path):
        code = main(["estimate", "--input", str(dataset), "--delta", "0.05", "--k", "301",
                     "--output", str(tmp_path / "r.json")])
        assert code == 3

    def test_invalid_input_exit_code(self, tmp_path):
        bogus = tmp_path / "bogus.bin"
        bogus.write_bytes(b"garbage")
        assert main(["estimate", "--input", str(bogus), "--delta", "0.05", "--output", "-"]) == 2
        assert main(["estimate", "--input", str(tmp_path / "missing.bin"), "--delta", "0.05",
                     "--output", "-"]) == 2

    def test_bad_override(self, dataset):
        assert main(["estimate", "--input", str(dataset), "--delta", "0.05", "--k", "10",
                     "--output", "-", "--set", "bogus_field=1"]) == 2

    def test_fhp_success_and_failure(self, tmp_path, capsys):
        rows, _, _ = planted_instance(50, 20, 0.3, seed=0)
        good = tmp_path / "planted.bin"
        write_dataset(good, DataSet(rows))
        assert main(["fhp", "--input", str(good), "--margin", "0.3", "--seed", "1"]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["status"] == "ok" and out["satisfied_count"] >= 35

        bad = tmp_path / "flat.bin"
        write_dataset(bad, DataSet(np.vstack([[1.0, 0.0], np.zeros((9, 2))])))
        assert main(["fhp", "--input", str(bad), "--margin", "0.5",
                     "--set", "max_round_trials=3"]) == 1
        assert json.loads(capsys.readouterr().out)["status"] == "fail"
