import json
import subprocess
import sys

import numpy as np
import pytest

from nosignal.cli import main
from nosignal.config import ConfigError, dump_matrix, parse_config, parse_map
from nosignal.maps import BlochAffineCloneMap, KrausMap, PureBranchMap, TransferMap

SINGLET_CHANNEL = {
    "shared_state": {"kind": "singlet"},
    "bob_map": {"kind": "random_channel", "d_in": 2, "d_out": 2, "kraus_rank": 2, "seed": 7},
    "bases": [[0, 0, 1], [1, 0, 0]],
}

EXAMPLE_THREE = {
    "shared_state": {"kind": "singlet"},
    "bob_map": {"kind": "pure_branch", "n_clones": 2, "fidelity": 1, "variant": "mixture"},
    "bases": [[0, 0, 1], [1, 0, 0]],
    "povm": "parity",
    "samples": {"fidelity_samples": 1000, "positivity_samples": 200},
}


def write(tmp_path, doc, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(doc))
    return str(p)


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestParseConfig:
    def test_minimal(self):
        cfg = parse_config(SINGLET_CHANNEL)
        assert cfg.seed == 0 and cfg.povm is None
        np.testing.assert_array_equal(cfg.bases[0], [0, 0, 1])

    def test_fraction_strings(self):
        m = parse_map({"kind": "bloch_affine", "eta": "7/10", "t": "1/3"})
        assert isinstance(m, BlochAffineCloneMap)
        assert m.t == pytest.approx(1 / 3, abs=1e-15) and m.eta == pytest.approx(0.7, abs=1e-15)

    def test_explicit_matrices(self):
        kraus = parse_map({"kind": "kraus", "operators": [dump_matrix(np.eye(2))]})
        assert isinstance(kraus, KrausMap)
        transfer = parse_map({"kind": "transfer", "matrix": np.eye(4).tolist()})
        assert isinstance(transfer, TransferMap)

    def test_explicit_state(self):
        raw = dict(SINGLET_CHANNEL, shared_state={"kind": "explicit", "matrix": (np.eye(4) / 4).tolist()})
        np.testing.assert_allclose(parse_config(raw).shared.mat, np.eye(4) / 4)

    def test_pure_branch(self):
        m = parse_map({"kind": "pure_branch", "n_clones": 3, "fidelity": 0.4, "variant": "factorized"})
        assert isinstance(m, PureBranchMap) and m.d_out == 8

    @pytest.mark.parametrize(
        "patch,path",
        [
            ({"bases": [[0, 0, 2], [1, 0, 0]]}, "bases[0]"),
            ({"bases": [[0, 0, 1], [1, 0]]}, "bases[1]"),
            ({"bases": [[0, 0, 1], [1, "a", 0]]}, "bases[1][1]"),
            ({"bob_map": {"kind": "bloch_affine", "eta": 0.5}}, "bob_map.t"),
            ({"bob_map": {"kind": "warp"}}, "bob_map.kind"),
            ({"bob_map": {"kind": "pure_branch", "n_clones": 9, "fidelity": 1}}, "bob_map"),
            ({"shared_state": {"kind": "partially_entangled", "theta": 3}}, "shared_state"),
            ({"povm": 5}, "povm"),
            ({"samples": {"scan_pairs": 0}}, "samples.scan_pairs"),
            ({"samples": {"nope": 1}}, "samples.nope"),
        ],
    )
    def test_located_errors(self, patch, path):
        with pytest.raises(ConfigError) as info:
            parse_config(dict(SINGLET_CHANNEL, **patch))
        assert info.value.path == path
        assert str(info.value).startswith(path)

    def test_bad_povm_located_on_experiment(self):
        cfg = parse_config(dict(SINGLET_CHANNEL, povm=[(np.eye(2) / 2).tolist()]))
        with pytest.raises(ConfigError) as info:
            cfg.experiment()
        assert info.value.path == "povm"

    def test_hash_ignores_key_order(self):
        a = parse_config(SINGLET_CHANNEL)
        b = parse_config(dict(reversed(list(SINGLET_CHANNEL.items()))))
        assert a.config_hash == b.config_hash
        assert a.config_hash != parse_config(dict(SINGLET_CHANNEL, seed=1)).config_hash


class TestRun:
    def test_lawful_channel(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "run", "--config", write(tmp_path, SINGLET_CHANNEL))
        assert code == 0
        doc = json.loads(out)
        assert doc["verdict"] == "NO_SIGNAL"
        assert doc["distance"] < 1e-10
        assert doc["classification"]["region"] == "QM"
        assert len(doc["config_hash"]) == 64 and doc["seed"] == 0
        assert "fidelity" not in doc

    def test_example_three(self, tmp_path, capsys):
        code, out, _ = run_cli(capsys, "run", "--config", write(tmp_path, EXAMPLE_THREE))
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "SIGNALS"
        assert doc["decoder"] == "povm"
        assert doc["conditional_probs"] == [[0.0, 1.0], [0.5, 0.5]]
        assert doc["helstrom_success"] == 0.75
        assert doc["classification"]["region"] == "NONLINEAR"
        assert doc["fidelity"]["average_fidelity"] == 1.0

    def test_deterministic_modulo_timestamp(self, tmp_path):
        cfg = write(tmp_path, dict(EXAMPLE_THREE, bob_map={"kind": "bloch_affine", "eta": 0.7, "t": "1/3"}))
        docs = []
        for name in ("a.json", "b.json"):
            out = tmp_path / name
            assert main(["run", "--config", cfg, "--out", str(out)]) == 0
            doc = json.loads(out.read_text())
            doc.pop("timestamp")
            docs.append(doc)
        assert docs[0] == docs[1]

    def test_floats_rounded(self, tmp_path, capsys):
        raw = dict(SINGLET_CHANNEL, bob_map={"kind": "bloch_affine", "eta": "1/3", "t": 0})
        _, out, _ = run_cli(capsys, "run", "--config", write(tmp_path, raw))
        doc = json.loads(out)
        assert doc["classification"]["min_output_eigenvalue"] == pytest.approx(1 / 12, abs=1e-12)
        assert len(repr(doc["fidelity"]["average_fidelity"]).replace("0.", "", 1)) <= 13

    def test_tolerance_flag(self, tmp_path, capsys):
        _, out, _ = run_cli(capsys, "--tolerance", "0.9", "run", "--config", write(tmp_path, EXAMPLE_THREE))
        assert json.loads(out)["verdict"] == "NO_SIGNAL"


class TestExitCodes:
    def test_malformed_basis(self, tmp_path, capsys):
        raw = dict(SINGLET_CHANNEL, bases=[[0, 0, 2], [1, 0, 0]])
        code, _, err = run_cli(capsys, "run", "--config", write(tmp_path, raw))
        assert code == 2 and "bases[0]" in err

    def test_missing_file(self, tmp_path, capsys):
        code, _, err = run_cli(capsys, "classify", "--config", str(tmp_path / "nope.json"))
        assert code == 2 and "not found" in err

    def test_invalid_json(self, tmp_path, capsys):
        p = tmp_path / "bad.json"
        p.write_text("{")
        assert run_cli(capsys, "run", "--config", str(p))[0] == 2

    def test_contract_violation(self, tmp_path, capsys):
        # a mixed shared state hands the pure-input-only map mixed branches
        raw = dict(EXAMPLE_THREE, shared_state={"kind": "explicit", "matrix": (np.eye(4) / 4).tolist()})
        code, _, err = run_cli(capsys, "run", "--config", write(tmp_path, raw))
        assert code == 3 and "contract violation" in err


class TestClassify:
    @pytest.mark.parametrize(
        "bob_map,region",
        [
            ({"kind": "bloch_affine", "eta": 0.7, "t": "1/3"}, "LINEAR_NONPOSITIVE_NOSIGNAL"),
            ({"kind": "bloch_affine", "eta": "2/3", "t": "1/3"}, "QM"),
            ({"kind": "bloch_nonlinear", "f": {"family": "power", "k": 3}}, "NONLINEAR"),
            ({"kind": "bloch_nonlinear", "f": ["square", "square", {"family": "power", "k": 1}]}, "NONLINEAR"),
            ({"kind": "identity"}, "QM"),
        ],
    )
    def test_regions(self, tmp_path, capsys, bob_map, region):
        raw = {"bob_map": bob_map, "samples": {"positivity_samples": 200}}
        code, out, _ = run_cli(capsys, "classify", "--config", write(tmp_path, raw))
        assert code == 0
        assert json.loads(out)["classification"]["region"] == region

    def test_witness_reported(self, tmp_path, capsys):
        raw = {"bob_map": {"kind": "bloch_affine", "eta": 0.7, "t": "1/3"}}
        _, out, _ = run_cli(capsys, "classify", "--config", write(tmp_path, raw))
        c = json.loads(out)["classification"]
        assert c["min_output_eigenvalue"] < -1e-3
        assert c["min_choi_eigenvalue"] < -1e-3
        assert len(c["positivity_witness"]) == 3


class TestScan:
    def test_even_function_signals(self, tmp_path, capsys):
        raw = dict(SINGLET_CHANNEL, bob_map={"kind": "bloch_nonlinear", "f": "square"})
        code, out, _ = run_cli(capsys, "scan", "--config", write(tmp_path, raw), "--pairs", "30", "--seed", "4")
        doc = json.loads(out)
        assert code == 0 and doc["verdict"] == "SIGNALS"
        assert doc["pairs"] == 30 and doc["scan_seed"] == 4
        assert len(doc["argmax_pair"]) == 2

    def test_channel_flat(self, tmp_path, capsys):
        raw = dict(SINGLET_CHANNEL, samples={"scan_pairs": 20})
        _, out, _ = run_cli(capsys, "scan", "--config", write(tmp_path, raw))
        doc = json.loads(out)
        assert doc["verdict"] == "NO_SIGNAL" and doc["pairs"] == 20


def test_paper_examples_exit_zero(tmp_path, capsys):
    out = tmp_path / "canned.json"
    code, text, _ = run_cli(capsys, "paper-examples", "--out", str(out))
    assert code == 0
    assert "all" in text and "rows passed" in text
    doc = json.loads(out.read_text())
    assert doc["command"] == "paper-examples" and all(r["passed"] for r in doc["rows"])


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nosignal", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "paper-examples" in proc.stdout
