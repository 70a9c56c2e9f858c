import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

import chm.pauliprop
from chm.pipelines import (
    ConfigError,
    ExperimentConfig,
    analytic_circuit,
    dump_circuit,
    load_config,
    random_single_use_circuit,
    run_analytic_suite,
    run_correlation_pipeline,
    run_pipelines,
    run_qntk_pipeline,
    run_variance_pipeline,
)

TINY = dict(
    family="yzy-ent", encoder="x", n=2, L=1, depths=(1,), seed=11,
    samples=512, hamming=2, nx=8,
)


class TestConfig:
    def test_requires_seed(self):
        with pytest.raises(ConfigError, match="seed"):
            ExperimentConfig(pipeline="variance").validated()

    def test_odd_samples_rejected(self):
        with pytest.raises(ConfigError, match="even"):
            ExperimentConfig(pipeline="variance", seed=1, samples=101).validated()

    def test_aliasing_guard(self):
        with pytest.raises(ConfigError, match="anti-aliasing"):
            ExperimentConfig(pipeline="variance", seed=1, n=6, L=1, nx=12).validated()

    def test_unknown_field_rejected(self):
        with pytest.raises(ConfigError, match="unknown config"):
            ExperimentConfig.from_dict({"seed": 1, "bogus": 2})

    def test_effective_hamming_saturates_depth_one(self):
        cfg = ExperimentConfig(seed=1, hamming=3)
        assert cfg.effective_hamming(1, 12) == 12
        assert cfg.effective_hamming(2, 12) == 3
        off = ExperimentConfig(seed=1, hamming=3, saturate_d1=False)
        assert off.effective_hamming(1, 12) == 3

    def test_config_file_with_flag_overrides(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({**TINY, "pipeline": "variance", "depths": [1], "out": str(tmp_path)}))
        cfg = load_config(path, {"seed": 99, "nx": None})
        assert cfg.seed == 99  # flag wins
        assert cfg.nx == 8  # file value survives a None flag


@pytest.fixture(scope="module")
def variance_report(tmp_path_factory):
    out = tmp_path_factory.mktemp("var")
    cfg = ExperimentConfig(pipeline="variance", out=str(out), **TINY)
    return run_variance_pipeline(cfg), out


class TestVariancePipeline:
    def test_report_shape(self, variance_report):
        rep, out = variance_report
        assert rep["kind"] == "variance" and rep["schema_version"] == 1
        depth = rep["depths"][0]
        assert depth["omega"] == [-2, -1, 0, 1, 2]
        assert len(depth["var_mc"]) == 5
        assert (out / "variance_report.json").exists()
        assert (out / "variance_d1.csv").exists()

    def test_splits_disjoint(self, variance_report):
        rep, _ = variance_report
        prov = rep["depths"][0]["provenance"]
        assert prov["c_split"]["sample_stop"] <= prov["mc_split"]["sample_start"]

    def test_profiles_normalised(self, variance_report):
        rep, _ = variance_report
        depth = rep["depths"][0]
        assert np.isclose(sum(depth["var_mc_normalised"]), 1.0)
        assert np.isclose(sum(depth["row_energy_c_normalised"]), 1.0)

    def test_analytic_profile_pearson_one(self, tmp_path):
        # 1-qubit analytic: both estimators converge to [1/8, 0, 1/8]
        from chm.estimation import enumerate_K, estimate_C, mc_moments
        from chm.kernels import variance_profile
        from chm.sampling import SampleEnsemble

        circ = analytic_circuit()
        ens = SampleEnsemble(seed=1, count=40000, m=1)
        c_hat = estimate_C(circ, ens, enumerate_K(1, 1), 8, split="c")
        mom = mc_moments(circ, ens, 8, split="mc")
        e = variance_profile(c_hat)
        v = mom.variance
        eb, vb = e / e.sum(), v / v.sum()
        r = float(np.corrcoef(vb - vb.mean(), eb - eb.mean())[0, 1])
        assert abs(r - 1.0) < 1e-3


class TestOtherPipelines:
    def test_correlation_report(self, tmp_path):
        cfg = ExperimentConfig(pipeline="correlation", out=str(tmp_path), **TINY)
        rep = run_correlation_pipeline(cfg)
        depth = rep["depths"][0]
        for key in ("corr_c", "corr_mc", "metrics", "unmasked_joint"):
            assert key in depth
        for metric in ("frobenius_error", "cosine_similarity", "mean_offdiag_c", "mean_offdiag_mc"):
            assert metric in depth["metrics"]
        assert (tmp_path / "matrices" / "corr_c_d1.json").exists()
        assert (tmp_path / "matrices" / "corr_mc_d1.csv").exists()

    def test_qntk_report(self, tmp_path):
        cfg = ExperimentConfig(pipeline="qntk", out=str(tmp_path), **TINY)
        rep = run_qntk_pipeline(cfg)
        metrics = rep["depths"][0]["metrics"]
        for key in (
            "frobenius_error",
            "cosine_similarity",
            "frobenius_error_normalised",
            "cosine_similarity_normalised",
            "cosine_vs_corr",
        ):
            assert key in metrics
        assert (tmp_path / "matrices" / "qntk_c_d1.json").exists()

    def test_run_all(self, tmp_path):
        cfg = ExperimentConfig(pipeline="all", out=str(tmp_path), **TINY)
        reports = run_pipelines(cfg)
        assert set(reports) == {"variance", "correlation", "qntk"}


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            cfg = ExperimentConfig(pipeline="variance", out=str(out), **TINY)
            run_variance_pipeline(cfg)
        text1 = (out1 / "variance_report.json").read_text()
        text2 = (out2 / "variance_report.json").read_text()
        # reports echo the output directory; normalise that one field
        assert text1.replace(str(out1), "OUT") == text2.replace(str(out2), "OUT")

    def test_threads_do_not_change_results(self, tmp_path):
        outs = []
        for threads, sub in ((1, "t1"), (2, "t2")):
            out = tmp_path / sub
            cfg = ExperimentConfig(
                pipeline="variance", out=str(out), threads=threads,
                **{**TINY, "depths": (1, 2)},
            )
            run_variance_pipeline(cfg)
            doc = json.loads((out / "variance_report.json").read_text())
            doc["config"].pop("threads")
            doc["config"].pop("out")
            outs.append(json.dumps(doc, sort_keys=True))
        assert outs[0] == outs[1]


@pytest.fixture(scope="module")
def oracle_report():
    return run_analytic_suite(samples=4000)


class TestOracleSuite:
    def test_all_pass(self, oracle_report):
        assert oracle_report["passed"], [c for c in oracle_report["checks"] if not c["passed"]]

    def test_mutated_sin_branch_fails(self, monkeypatch):
        """Injected sign flip in the sin branch must break reconstruction."""
        original = chm.pauliprop.conjugate_rotation

        def flipped(q, p):
            branch = original(q, p)
            if branch is None:
                return None
            cos_b, sin_b = branch
            return cos_b, sin_b.times_i().times_i()  # multiply sin branch by -1

        monkeypatch.setattr(chm.pauliprop, "conjugate_rotation", flipped)
        report = run_analytic_suite(samples=512)
        assert not report["passed"]
        failed = {c["name"] for c in report["checks"] if not c["passed"]}
        assert "exact_C_reconstruction_1e-10" in failed


class TestCli:
    def _run(self, *args):
        return subprocess.run(
            [sys.executable, "-m", "chm.cli", *args], capture_output=True, text=True
        )

    def test_circuit_dump(self, tmp_path):
        out = tmp_path / "circ.json"
        res = self._run("circuit", "dump", "--family", "yzy-ent", "--qubits", "3",
                        "--out", str(out))
        assert res.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["n"] == 3 and doc["m"] == 9

    def test_run_tiny(self, tmp_path):
        res = self._run(
            "run", "--pipeline", "variance", "--family", "yzy-ent", "--encoder", "x",
            "--qubits", "2", "--layers", "1", "--depths", "1", "--samples", "512",
            "--nx", "8", "--hamming", "2", "--seed", "5", "--out", str(tmp_path),
        )
        assert res.returncode == 0, res.stderr
        assert (tmp_path / "variance_report.json").exists()

    def test_validation_exit_code(self, tmp_path):
        res = self._run(
            "run", "--pipeline", "variance", "--family", "yzy-ent",
            "--qubits", "2", "--samples", "511", "--seed", "5", "--out", str(tmp_path),
        )
        assert res.returncode == 1
        res = self._run("run", "--pipeline", "nonsense")
        assert res.returncode == 1

    def test_depth_range_parsing(self):
        from chm.cli import _parse_depths

        assert _parse_depths("1..5") == (1, 2, 3, 4, 5)
        assert _parse_depths("1,3,5") == (1, 3, 5)


def test_dump_circuit_roundtrip():
    text = dump_circuit("circuit17", "y", 4, 1, 2)
    doc = json.loads(text)
    assert doc["m"] == 22


def test_random_single_use_circuits_are_single_use():
    from chm.circuits import validate

    for i in range(10):
        circ = random_single_use_circuit(i)
        report = validate(circ)
        assert report.shared_params == ()
        assert report.unused_params == ()
