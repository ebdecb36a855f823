import json
import os

import numpy as np
import pytest

from blerkit.cli import config_hash, load_config, main, ConfigError
from blerkit.codes import bundled_code_path


@pytest.fixture()
def code_path():
    return str(bundled_code_path("ldpc_96_48"))


@pytest.fixture()
def base_config(tmp_path, code_path):
    def write(extra=None, name="config.json"):
        cfg = {"code_path": code_path, "seed": 3}
        if extra:
            cfg.update(extra)
        path = tmp_path / name
        path.write_text(json.dumps(cfg))
        return str(path)
    return write


class TestConfigValidation:
    def test_missing_code_path_names_field(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text(json.dumps({"seed": 1}))
        rc = main(["train", "--config", str(path), "--dry-run"])
        assert rc == 2
        assert "code_path" in capsys.readouterr().err

    def test_unknown_key_rejected(self, base_config, capsys):
        rc = main(["train", "--config", base_config({"typo_key": 1}), "--dry-run"])
        assert rc == 2
        assert "typo_key" in capsys.readouterr().err

    def test_bad_nested_value(self, base_config, capsys):
        rc = main(["train", "--config",
                   base_config({"loss": {"kind": "nonsense"}}), "--dry-run"])
        assert rc == 2
        err = capsys.readouterr().err
        assert "loss" in err and "kind" in err

    def test_invalid_json(self, tmp_path, capsys):
        path = tmp_path / "c.json"
        path.write_text("{not json")
        assert main(["train", "--config", str(path), "--dry-run"]) == 2

    def test_missing_file(self):
        assert main(["train", "--config", "/no/such/config.json"]) == 2

    def test_config_hash_is_canonical(self, code_path):
        a = {"code_path": code_path, "seed": 3}
        b = {"seed": 3, "code_path": code_path}
        assert config_hash(a) == config_hash(b)
        assert len(config_hash(a)) == 16

    def test_load_config_raises_config_error(self):
        with pytest.raises(ConfigError):
            load_config("/no/such/file.json")


class TestDryRun:
    def test_dry_run_writes_nothing(self, base_config, tmp_path, capsys):
        out = tmp_path / "results"
        rc = main(["train", "--config", base_config(), "--dry-run",
                   "--out", str(out)])
        assert rc == 0
        assert not out.exists()
        resolved = json.loads(capsys.readouterr().out)
        assert resolved["decoder"]["iterations"] == 5
        assert resolved["output_dir"] == str(out)

    def test_seed_flag_overrides_config(self, base_config, capsys):
        rc = main(["train", "--config", base_config(), "--dry-run",
                   "--seed", "99"])
        assert rc == 0
        assert json.loads(capsys.readouterr().out)["seed"] == 99


class TestTrain:
    def test_tiny_train_writes_artifacts(self, base_config, tmp_path):
        out = tmp_path / "run"
        cfgp = base_config({"train": {"pre_batches": 2, "fine_batches": 2,
                                      "batch_size": 10}})
        rc = main(["train", "--config", cfgp, "--out", str(out)])
        assert rc == 0
        params = json.loads((out / "params.json").read_text())
        assert len(params["beta_raw"]) == 5
        assert len(params["edge_weights"]) == 288
        report = json.loads((out / "train_report.json").read_text())
        assert len(report["batch_losses"]) == 4
        assert report["seed"] == 3
        assert len(report["config_hash"]) == 16


class TestEval:
    def eval_config(self, base_config, blocks=1000):
        return base_config({"eval": {"snr_db": [2.0, 4.0], "max_blocks": blocks,
                                     "target_block_errors": 1000000}})

    def test_eval_writes_csv_and_json(self, base_config, tmp_path):
        out = tmp_path / "ev"
        rc = main(["eval", "--config", self.eval_config(base_config),
                   "--out", str(out)])
        assert rc == 0
        text = (out / "eval.csv").read_text()
        lines = text.strip().split("\n")
        assert lines[0] == "snr_db,metric,value,ci_half,seed,config_hash"
        assert len(lines) == 1 + 4   # ber and bler at two SNRs
        summary = json.loads((out / "eval.json").read_text())
        assert len(summary["results"]) == 2

    def test_eval_byte_identical_across_runs_and_workers(self, base_config,
                                                         tmp_path):
        cfgp = self.eval_config(base_config, blocks=500)
        outs = []
        for name, workers in (("a", "1"), ("b", "1"), ("c", "4")):
            out = tmp_path / name
            rc = main(["eval", "--config", cfgp, "--out", str(out),
                       "--workers", workers])
            assert rc == 0
            outs.append((out / "eval.csv").read_bytes())
        assert outs[0] == outs[1] == outs[2]

    def test_uncoded_eval(self, base_config, tmp_path):
        out = tmp_path / "unc"
        cfgp = base_config({"eval": {"snr_db": [4.0], "max_blocks": 200,
                                     "target_block_errors": 1000000,
                                     "uncoded": True}})
        rc = main(["eval", "--config", cfgp, "--out", str(out)])
        assert rc == 0
        assert (out / "eval.csv").exists()


class TestSweepLoss:
    def test_sweep_writes_csv(self, base_config, tmp_path):
        out = tmp_path / "sw"
        cfgp = base_config({"sweep": {"lo": 1.0, "hi": 5.0, "bins": 3,
                                      "blocks_per_point": 200,
                                      "reference_snr": 1.0,
                                      "losses": ["bce", "product"]}})
        rc = main(["sweep-loss", "--config", cfgp, "--out", str(out)])
        assert rc == 0
        lines = (out / "loss_sweep.csv").read_text().strip().split("\n")
        metrics = {l.split(",")[1] for l in lines[1:]}
        assert metrics == {"loss_bce_mean", "loss_bce_norm",
                           "loss_product_mean", "loss_product_norm"}
        # normalized value at the reference SNR is exactly 1
        for l in lines[1:]:
            snr, metric, value = l.split(",")[:3]
            if metric.endswith("_norm") and float(snr) == 1.0:
                assert float(value) == 1.0


class TestVerify:
    def test_verify_passes_and_writes_report(self, tmp_path, capsys):
        out = tmp_path / "v"
        rc = main(["verify", "--seed", "123", "--out", str(out)])
        assert rc == 0
        stdout = capsys.readouterr().out
        assert stdout.count("PASS") == 4
        report = json.loads((out / "verify_report.json").read_text())
        assert report["passed"] is True


class TestGradCheck:
    def test_default_run_passes(self, capsys):
        rc = main(["grad-check", "--seed", "5"])
        assert rc == 0
        stdout = capsys.readouterr().out
        assert "PASS" in stdout and "FAIL" not in stdout

    def test_absurd_tolerance_fails(self, capsys):
        rc = main(["grad-check", "--seed", "5", "--tolerance", "1e-14"])
        assert rc == 3
        assert "FAIL" in capsys.readouterr().out
