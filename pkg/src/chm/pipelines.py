"""Configuration-driven experiment pipelines and the analytic oracle suite.

Each pipeline sweeps training-block depth, runs the truncated-C estimator on
the first half of a seeded sample ensemble and the direct Monte-Carlo
reference on the second half (disjointness asserted), and emits a JSON
report plus figure-ready CSV/matrix files.  Reports carry no timestamps so
identical configs and seeds give byte-identical output.
"""

from __future__ import annotations

import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .circuits import Circuit, FAMILIES, build_family, to_json_dict
from .cmatrix import CMatrix
from .estimation import (
    enumerate_K,
    estimate_C,
    mc_jacobian_gram,
    mc_moments,
)
from .matio import complex_matrix_json, matrix_csv, save_matrix
from .sampling import SampleEnsemble, assert_disjoint_splits
from .simulator import CompiledCircuit, expectation, gradient_vector

SCHEMA_VERSION = 1

PIPELINES = ("variance", "correlation", "qntk", "all")

NX_DEFAULTS = {"variance": 128, "correlation": 126, "qntk": 126}


class ConfigError(ValueError):
    """Invalid experiment configuration."""


class InvariantError(AssertionError):
    """A pipeline-level invariant (split discipline, oracle identity) failed."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Inputs of one experiment run; defaults mirror the reference protocol
    (n=6, L=1, depths 1-5, S=100096) with the seed always explicit."""

    pipeline: str = "all"
    family: str = "yzy-ent"
    encoder: str = "x"
    n: int = 6
    L: int = 1
    depths: tuple[int, ...] = (1, 2, 3, 4, 5)
    seed: int | None = None
    samples: int = 100096
    nx: int | None = None  # per-pipeline default when None (128 / 126)
    hamming: int = 3
    kcap: int = 20000
    saturate_d1: bool = True
    mask_threshold: float = 1e-10
    threads: int = 1
    out: str = "results"
    save_cmatrix: bool = False

    def validated(self) -> "ExperimentConfig":
        if self.pipeline not in PIPELINES:
            raise ConfigError(f"pipeline must be one of {PIPELINES}, got {self.pipeline!r}")
        if self.family not in FAMILIES:
            raise ConfigError(f"family must be one of {FAMILIES}, got {self.family!r}")
        if self.encoder.lower() not in ("x", "y"):
            raise ConfigError(f"encoder must be 'x' or 'y', got {self.encoder!r}")
        if self.seed is None:
            raise ConfigError("seed must be given explicitly")
        if self.samples < 2 or self.samples % 2:
            raise ConfigError("samples must be even (split-sample protocol)")
        if not self.depths or any(d < 1 for d in self.depths):
            raise ConfigError("depths must be positive")
        if self.n < 1 or self.L < 1:
            raise ConfigError("n and L must be >= 1")
        for pipe in (self.pipeline,) if self.pipeline != "all" else PIPELINES[:3]:
            nx = self.nx or NX_DEFAULTS[pipe]
            if nx <= 2 * self.n * self.L:
                raise ConfigError(
                    f"nx = {nx} must exceed 2*n*L = {2 * self.n * self.L} (anti-aliasing)"
                )
        if self.hamming < 0 or self.kcap < 1:
            raise ConfigError("hamming must be >= 0 and kcap >= 1")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        return self

    def resolve_nx(self, pipeline: str) -> int:
        return self.nx if self.nx is not None else NX_DEFAULTS[pipeline]

    def effective_hamming(self, depth: int, m: int) -> int:
        """Depth-1 training blocks saturate the Hamming limit (h = m); the
        column cap still applies.  Truncation at h=3 is provably too coarse
        for depth 1, where a large share of variance mass sits above weight 3.
        """
        if depth == 1 and self.saturate_d1:
            return m
        return min(self.hamming, m)

    @classmethod
    def from_dict(cls, doc: dict) -> "ExperimentConfig":
        known = {f: doc[f] for f in cls.__dataclass_fields__ if f in doc}
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        if "depths" in known:
            known["depths"] = tuple(known["depths"])
        return cls(**known)

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["depths"] = list(self.depths)
        return doc


def load_config(path, overrides: dict | None = None) -> ExperimentConfig:
    """Config file (same schema as the flags) with flag overrides; flags win."""
    doc = json.loads(Path(path).read_text())
    if overrides:
        doc.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.from_dict(doc).validated()


# --- shared per-depth machinery ---------------------------------------------


def _pearson(u: np.ndarray, v: np.ndarray) -> float:
    u = u - u.mean()
    v = v - v.mean()
    denom = np.sqrt((u @ u) * (v @ v))
    if denom == 0:
        return 0.0
    return float((u @ v) / denom)


def _normalised(v: np.ndarray) -> np.ndarray:
    total = v.sum()
    return v / total if total > 0 else v


@dataclass
class _DepthContext:
    depth: int
    circuit: Circuit
    ensemble: SampleEnsemble
    c_hat: CMatrix
    nx: int


def _estimate_for_depth(config: ExperimentConfig, pipeline: str, depth: int) -> _DepthContext:
    circuit = build_family(config.family, config.encoder.upper(), config.n, config.L, depth)
    ensemble = SampleEnsemble(config.seed, config.samples, circuit.m)
    h_eff = config.effective_hamming(depth, circuit.m)
    k_set = enumerate_K(circuit.m, h_eff, cap=config.kcap)
    nx = config.resolve_nx(pipeline)
    c_hat = estimate_C(circuit, ensemble, k_set, nx, split="c")
    return _DepthContext(depth, circuit, ensemble, c_hat, nx)


def _depth_map(config: ExperimentConfig, fn) -> list[dict]:
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            return list(pool.map(fn, config.depths))
    return [fn(d) for d in config.depths]


def _outdir(config: ExperimentConfig) -> Path:
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "matrices").mkdir(exist_ok=True)
    return out


def _write_report(out: Path, name: str, report: dict) -> Path:
    path = out / f"{name}_report.json"
    path.write_text(json.dumps(report, sort_keys=True, indent=1))
    return path


def _base_report(config: ExperimentConfig, pipeline: str) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": pipeline,
        "config": config.to_dict(),
        "nx": config.resolve_nx(pipeline),
    }


def _maybe_save_cmatrix(config: ExperimentConfig, out: Path, pipeline: str, ctx: _DepthContext):
    if config.save_cmatrix:
        ctx.c_hat.save(out / "matrices" / f"{pipeline}_chat_d{ctx.depth}.json")


# --- pipelines ---------------------------------------------------------------


def run_variance_pipeline(config: ExperimentConfig) -> dict:
    """Per depth: MC variance (reference split) vs truncated row energies of
    C-hat (estimation split), normalised profiles and their Pearson."""
    config = config.validated()
    out = _outdir(config)

    def one(depth: int) -> dict:
        ctx = _estimate_for_depth(config, "variance", depth)
        moments = mc_moments(ctx.circuit, ctx.ensemble, ctx.nx, split="mc")
        assert_disjoint_splits(ctx.c_hat.provenance, moments.provenance)
        row_energy_c = kernels.variance_profile(ctx.c_hat)
        var_mc = moments.variance
        vbar, ebar = _normalised(var_mc), _normalised(row_energy_c)
        omega = list(ctx.c_hat.omega_labels)
        _write_variance_csv(out / f"variance_d{depth}.csv", omega, var_mc, row_energy_c, vbar, ebar)
        _maybe_save_cmatrix(config, out, "variance", ctx)
        return {
            "depth": depth,
            "m": ctx.circuit.m,
            "k_columns": len(ctx.c_hat.k_labels),
            "effective_hamming": config.effective_hamming(depth, ctx.circuit.m),
            "omega": omega,
            "var_mc": var_mc.tolist(),
            "row_energy_c": row_energy_c.tolist(),
            "var_mc_normalised": vbar.tolist(),
            "row_energy_c_normalised": ebar.tolist(),
            "pearson": _pearson(vbar, ebar),
            "provenance": {
                "c_split": ctx.c_hat.provenance,
                "mc_split": moments.provenance,
            },
        }

    report = _base_report(config, "variance")
    report["depths"] = _depth_map(config, one)
    _write_report(out, "variance", report)
    return report


def _write_variance_csv(path, omega, var_mc, row_energy_c, vbar, ebar):
    import csv

    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["omega", "var_mc", "row_energy_C", "var_mc_normalised", "row_energy_C_normalised"])
        for i, w in enumerate(omega):
            writer.writerow([w, repr(var_mc[i]), repr(row_energy_c[i]), repr(vbar[i]), repr(ebar[i])])


def _correlation_pair(config, ctx: _DepthContext):
    """Corr from C-hat and from the disjoint MC covariance, plus joint mask."""
    cov_c = kernels.covariance_from_C(ctx.c_hat)
    d_c = kernels.variance_profile(ctx.c_hat)
    corr_c = kernels.correlation(cov_c, ctx.c_hat.omega_labels, variances=d_c,
                                 mask_threshold=config.mask_threshold)
    moments = mc_moments(ctx.circuit, ctx.ensemble, ctx.nx, split="mc")
    assert_disjoint_splits(ctx.c_hat.provenance, moments.provenance)
    corr_mc = kernels.correlation(moments.covariance, moments.omega_labels,
                                  mask_threshold=config.mask_threshold)
    joint = corr_c.unmasked & corr_mc.unmasked
    return corr_c, corr_mc, joint, moments


def _comparison_metrics(a: np.ndarray, b: np.ndarray, joint: np.ndarray) -> dict:
    """Normalised Frobenius error and cosine similarity on the joint block."""
    block_a = kernels.unit_frobenius(kernels.masked_block(a, joint))
    block_b = kernels.unit_frobenius(kernels.masked_block(b, joint))
    return {
        "frobenius_error": kernels.frobenius_error(block_a, block_b),
        "cosine_similarity": kernels.cosine_similarity(block_a, block_b),
    }


def run_correlation_pipeline(config: ExperimentConfig) -> dict:
    """Per depth: Pearson correlation matrices from both estimators, their
    agreement metrics and mean off-diagonal magnitudes."""
    config = config.validated()
    out = _outdir(config)

    def one(depth: int) -> dict:
        ctx = _estimate_for_depth(config, "correlation", depth)
        corr_c, corr_mc, joint, moments = _correlation_pair(config, ctx)
        metrics = _comparison_metrics(corr_c.matrix, corr_mc.matrix, joint)
        metrics["mean_offdiag_c"] = kernels.mean_offdiag(corr_c)
        metrics["mean_offdiag_mc"] = kernels.mean_offdiag(corr_mc)
        omega = list(ctx.c_hat.omega_labels)
        prov = {
            "seed": config.seed,
            "depth": depth,
            "c_split": ctx.c_hat.provenance,
            "mc_split": moments.provenance,
        }
        for tag, corr in (("corr_c", corr_c), ("corr_mc", corr_mc)):
            save_matrix(out / "matrices" / f"{tag}_d{depth}.json", corr.matrix, omega, omega, prov, tag)
            matrix_csv(out / "matrices" / f"{tag}_d{depth}.csv", corr.matrix, omega, omega)
        _maybe_save_cmatrix(config, out, "correlation", ctx)
        return {
            "depth": depth,
            "m": ctx.circuit.m,
            "k_columns": len(ctx.c_hat.k_labels),
            "effective_hamming": config.effective_hamming(depth, ctx.circuit.m),
            "omega": omega,
            "corr_c": complex_matrix_json(corr_c.matrix),
            "corr_mc": complex_matrix_json(corr_mc.matrix),
            "unmasked_c": corr_c.unmasked.tolist(),
            "unmasked_mc": corr_mc.unmasked.tolist(),
            "unmasked_joint": joint.tolist(),
            "masked_omega_c": list(corr_c.masked_labels),
            "variances_c": corr_c.variances.tolist(),
            "variances_mc": corr_mc.variances.tolist(),
            "metrics": metrics,
            "provenance": prov,
        }

    report = _base_report(config, "correlation")
    report["depths"] = _depth_map(config, one)
    _write_report(out, "correlation", report)
    return report


def run_qntk_pipeline(config: ExperimentConfig) -> dict:
    """Per depth: averaged harmonic tangent kernel from C-hat (columns
    weighted by sqrt(||k||^2) before truncation) vs the Jacobian-Gram
    Monte-Carlo reference, compared after variance normalisation."""
    config = config.validated()
    out = _outdir(config)

    def one(depth: int) -> dict:
        ctx = _estimate_for_depth(config, "qntk", depth)
        h_c = kernels.H_averaged(ctx.c_hat)
        h_mc, prov_mc = mc_jacobian_gram(ctx.circuit, ctx.ensemble, ctx.nx, split="mc")
        assert_disjoint_splits(ctx.c_hat.provenance, prov_mc)
        norm_c = kernels.variance_normalised(h_c, config.mask_threshold)
        norm_mc = kernels.variance_normalised(h_mc, config.mask_threshold)
        joint = norm_c.unmasked & norm_mc.unmasked
        # headline metrics compare the kernels themselves (unit Frobenius norm);
        # the ||k||^2 column weighting amplifies exactly the truncated sectors,
        # so this is where the truncation-weighting interaction shows up
        metrics = {
            "frobenius_error": kernels.frobenius_error(
                kernels.unit_frobenius(h_c), kernels.unit_frobenius(h_mc)
            ),
            "cosine_similarity": kernels.cosine_similarity(h_c, h_mc),
        }
        normalised = _comparison_metrics(norm_c.matrix, norm_mc.matrix, joint)
        metrics.update({f"{k}_normalised": v for k, v in normalised.items()})
        # structural resemblance of the normalised kernel to the Pearson matrix
        cov_c = kernels.covariance_from_C(ctx.c_hat)
        corr_c = kernels.correlation(cov_c, ctx.c_hat.omega_labels,
                                     variances=kernels.variance_profile(ctx.c_hat),
                                     mask_threshold=config.mask_threshold)
        joint_corr = norm_c.unmasked & corr_c.unmasked
        metrics["cosine_vs_corr"] = kernels.cosine_similarity(
            kernels.masked_block(norm_c.matrix, joint_corr),
            kernels.masked_block(corr_c.matrix, joint_corr),
        )
        omega = list(ctx.c_hat.omega_labels)
        prov = {
            "seed": config.seed,
            "depth": depth,
            "c_split": ctx.c_hat.provenance,
            "mc_split": prov_mc,
        }
        for tag, mat in (("qntk_c", h_c), ("qntk_mc", h_mc),
                         ("qntk_c_normalised", norm_c.matrix), ("qntk_mc_normalised", norm_mc.matrix)):
            save_matrix(out / "matrices" / f"{tag}_d{depth}.json", mat, omega, omega, prov, tag)
            matrix_csv(out / "matrices" / f"{tag}_d{depth}.csv", mat, omega, omega)
        _maybe_save_cmatrix(config, out, "qntk", ctx)
        return {
            "depth": depth,
            "m": ctx.circuit.m,
            "k_columns": len(ctx.c_hat.k_labels),
            "effective_hamming": config.effective_hamming(depth, ctx.circuit.m),
            "omega": omega,
            "h_c": complex_matrix_json(h_c),
            "h_mc": complex_matrix_json(h_mc),
            "h_c_normalised": complex_matrix_json(norm_c.matrix),
            "h_mc_normalised": complex_matrix_json(norm_mc.matrix),
            "unmasked_joint": joint.tolist(),
            "metrics": metrics,
            "provenance": prov,
        }

    report = _base_report(config, "qntk")
    report["depths"] = _depth_map(config, one)
    _write_report(out, "qntk", report)
    return report


def run_pipelines(config: ExperimentConfig) -> dict:
    config = config.validated()
    runners = {
        "variance": run_variance_pipeline,
        "correlation": run_correlation_pipeline,
        "qntk": run_qntk_pipeline,
    }
    if config.pipeline == "all":
        return {name: fn(config) for name, fn in runners.items()}
    return {config.pipeline: runners[config.pipeline](config)}


# --- analytic oracle suite ----------------------------------------------------


def analytic_circuit() -> Circuit:
    """1-qubit Rx(x) encoder + Ry(theta_0), O = Z; f = cos(theta_0) cos(x)."""
    from .circuits import EncoderGate, Layer, RotationGate
    from .paulis import PauliString

    return Circuit(
        n=1,
        layers=(
            Layer(
                (EncoderGate("X", 0),),
                (RotationGate(PauliString.single(1, 0, "Y"), 0),),
            ),
        ),
        m=1,
        observable=((1.0, PauliString.single(1, 0, "Z")),),
    )


def random_single_use_circuit(seed: int, n: int = 2) -> Circuit:
    """Random 2-qubit single-use circuit with CNOTs, exact-C tractable."""
    from .circuits import CliffordGate, EncoderGate, Layer, RotationGate
    from .paulis import PauliString

    rng = np.random.default_rng(seed)
    n_layers = int(rng.integers(1, 3))
    layers = []
    param = 0
    axis = str(rng.choice(["X", "Y"]))
    for _ in range(n_layers):
        encoder = tuple(EncoderGate(axis, q) for q in range(n))
        trainable = []
        for _ in range(int(rng.integers(2, 5))):
            q = int(rng.integers(0, n))
            trainable.append(
                RotationGate(PauliString.single(n, q, str(rng.choice(["X", "Y", "Z"]))), param)
            )
            param += 1
            if rng.random() < 0.5 and n >= 2:
                c, t = rng.choice(n, size=2, replace=False)
                trainable.append(CliffordGate("cnot", int(c), int(t)))
        layers.append(Layer(encoder, tuple(trainable)))
    from .circuits import mean_magnetisation

    return Circuit(n, tuple(layers), param, mean_magnetisation(n))


def run_analytic_suite(samples: int = 50000, seed: int = 2024, time_budget: float = 300.0) -> dict:
    """Every exact-vs-MC identity on the 1-2 qubit oracle circuits.

    Returns a report with one pass/fail entry per check; callers map overall
    failure to a nonzero exit code.
    """
    from .pauliprop import exact_C

    t_start = time.time()
    checks: list[dict] = []

    def check(name: str, passed: bool, detail: str = ""):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    ana = analytic_circuit()
    c_exact = exact_C(ana)
    rng = np.random.default_rng(seed)

    # exact C values
    ok = True
    for w in (1, -1):
        for k in (((0, 1),), ((0, -1),)):
            ok &= c_exact.entries[c_exact.omega_index(w), c_exact.k_labels.index(k)] == 0.25
    ok &= np.count_nonzero(c_exact.entries) == 4
    check("exact_C_analytic_quarters", ok)

    # reconstruction identity: analytic + 5 random 2-qubit circuits
    circuits = [ana] + [random_single_use_circuit(seed + i) for i in range(5)]
    worst = 0.0
    for circ in circuits:
        c_mat = exact_C(circ)
        for _ in range(100):
            x = rng.uniform(0, 2 * np.pi)
            th = rng.uniform(0, 2 * np.pi, circ.m) if circ.m else np.zeros(0)
            r = c_mat.reconstruct(x, th)
            worst = max(worst, abs(r - expectation(circ, x, th)))
    check("exact_C_reconstruction_1e-10", worst < 1e-10, f"max |error| = {worst:.2e}")

    # variance profile and averaged kernel closed forms
    var = kernels.variance_profile(c_exact)
    check("variance_profile_eighths", np.array_equal(var, [0.125, 0.0, 0.125]), str(var))
    h_bar = kernels.H_averaged(c_exact)
    want = np.zeros((3, 3), dtype=complex)
    want[np.ix_([0, 2], [0, 2])] = 0.125
    check("H_averaged_eighth_block", np.allclose(h_bar, want, atol=1e-15))

    # conjugate symmetry, bitwise, on a random entangled circuit
    circ = random_single_use_circuit(seed + 99)
    c_mat = exact_C(circ)
    sym = True
    wpos = {w: i for i, w in enumerate(c_mat.omega_labels)}
    kpos = {k: i for i, k in enumerate(c_mat.k_labels)}
    from .cmatrix import harmonic_negate

    for w in c_mat.omega_labels:
        for k in c_mat.k_labels:
            if c_mat.entries[wpos[w], kpos[k]] != np.conj(c_mat.entries[wpos[-w], kpos[harmonic_negate(k)]]):
                sym = False
    check("conjugate_symmetry_bitwise", sym)

    # gradient routes agree
    circ = random_single_use_circuit(seed + 7)
    compiled = CompiledCircuit(circ)
    x = rng.uniform(0, 2 * np.pi)
    th = rng.uniform(0, 2 * np.pi, circ.m)
    g_shift = gradient_vector(circ, x, th)
    _, g_adj = compiled.evaluate_with_gradients([x], th)
    fd = np.array(
        [
            (expectation(circ, x, th + 1e-5 * e) - expectation(circ, x, th - 1e-5 * e)) / 2e-5
            for e in np.eye(circ.m)
        ]
    )
    check(
        "gradient_shift_adjoint_fd",
        np.allclose(g_shift, g_adj[0], atol=1e-11) and np.allclose(g_shift, fd, atol=1e-6),
    )

    # pointwise kernel identity
    worst = 0.0
    c2 = random_single_use_circuit(seed + 3)
    c2_mat = exact_C(c2)
    xs = 2 * np.pi * np.arange(8) / 8
    v = kernels.design_matrix(c2_mat.omega_labels, xs)
    for _ in range(20):
        th = rng.uniform(0, 2 * np.pi, c2.m)
        k_theta = kernels.data_qntk(v, kernels.H_kernel(c2_mat, th))
        jac = np.array([gradient_vector(c2, float(xv), th) for xv in xs])
        worst = max(worst, float(np.max(np.abs(k_theta - jac @ jac.T))))
    check("data_qntk_matches_jacobian_gram_1e-8", worst < 1e-8, f"max |error| = {worst:.2e}")

    # Monte-Carlo identities against the exact objects (split discipline applies)
    ens = SampleEnsemble(seed=seed, count=samples * 2, m=ana.m)
    from .estimation import enumerate_K as _enum

    k_full = _enum(ana.m, ana.m)
    c_hat = estimate_C(ana, ens, k_full, 16, split="c")
    moments = mc_moments(ana, ens, 16, split="mc")
    assert_disjoint_splits(c_hat.provenance, moments.provenance)
    err = float(np.max(np.abs(c_hat.restrict_columns(c_exact.k_labels).entries - c_exact.entries)))
    check("estimate_C_converges", err < 5 / np.sqrt(samples), f"max-entry error {err:.4f}")
    err = float(np.max(np.abs(moments.variance - var)))
    check("mc_variance_converges", err < 4 / np.sqrt(samples), f"max error {err:.4f}")
    h_mc, prov = mc_jacobian_gram(ana, ens, 16, split="mc")
    assert_disjoint_splits(c_hat.provenance, prov)
    err = float(np.max(np.abs(h_mc - want)))
    check("mc_jacobian_gram_converges", err < 5 / np.sqrt(samples), f"max error {err:.4f}")

    elapsed = time.time() - t_start
    report = {
        "schema_version": SCHEMA_VERSION,
        "kind": "oracle",
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "elapsed_seconds": elapsed,
        "runtime_warning": elapsed > time_budget,
    }
    return report


def dump_circuit(family: str, encoder: str, n: int, L: int, d: int) -> str:
    circuit = build_family(family, encoder.upper(), n, L, d)
    return json.dumps(to_json_dict(circuit), indent=2, sort_keys=True)
