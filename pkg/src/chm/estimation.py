"""DFT coefficient extraction and truncated Monte-Carlo estimators.

Coefficients a_omega(theta) come from a discrete Fourier transform of
f(x; theta) on a uniform grid x_j = 2 pi j / n_x; the transform is exact
(not approximate) for band-limited f whenever n_x > 2 omega_max.  The DFT
normalisation is 1/n_x so that f(x) = sum_omega a_omega e^{i omega x}
reconstructs; downstream quantities are all normalised, so only this
reconstruction convention distinguishes the choice.

The truncated C estimator averages a_omega(theta) e^{-i k.theta} over the
C split of a sample ensemble; variance/covariance and Jacobian-Gram
references average over the disjoint reference split.  Accumulation runs in
fixed 1024-sample chunks so results are bit-stable and independent of any
outer parallelism.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .circuits import Circuit
from .cmatrix import CMatrix, HarmonicIndex, harmonic_sort_key
from .sampling import SampleEnsemble
from .simulator import CompiledCircuit

CHUNK = 1024
_K_BLOCK = 16384


class AliasingError(ValueError):
    """n_x too small for the circuit's band limit."""


def _check_grid(circuit: Circuit, n_x: int) -> int:
    omega_max = circuit.omega_max()
    if n_x <= 2 * omega_max:
        raise AliasingError(
            f"n_x = {n_x} must exceed 2*omega_max = {2 * omega_max} to avoid aliasing"
        )
    return omega_max


def x_grid(n_x: int) -> np.ndarray:
    return 2.0 * np.pi * np.arange(n_x) / n_x


def omega_labels(omega_max: int) -> tuple[int, ...]:
    return tuple(range(-omega_max, omega_max + 1))


def dft_from_values(values: np.ndarray, omega_max: int) -> np.ndarray:
    """a_omega = (1/n_x) sum_j f(x_j) e^{-i omega x_j} for omega in [-W, W]."""
    n_x = values.shape[-1]
    spectrum = np.fft.fft(values, axis=-1) / n_x
    idx = [w % n_x for w in range(-omega_max, omega_max + 1)]
    return spectrum[..., idx]


def dft_coefficients(circuit: Circuit, theta, n_x: int) -> np.ndarray:
    """Coefficient vector over omega = -nL..nL for a single parameter point."""
    omega_max = _check_grid(circuit, n_x)
    theta = np.asarray(theta, dtype=float)
    f = CompiledCircuit(circuit).evaluate(x_grid(n_x), theta)
    return dft_from_values(f, omega_max)


# --- truncated parameter-harmonic index sets --------------------------------


@dataclass(frozen=True)
class TruncatedK:
    """All k in {-1,0,1}^m up to Hamming weight h, capped at ``cap`` columns.

    Canonical order is (weight, positions, signs with +1 first); weight
    classes are closed under negation before the cap is applied, and the cap
    cuts the first class that does not fit whole.
    """

    m: int
    h: int
    cap: int
    ks: tuple[HarmonicIndex, ...]

    def __len__(self) -> int:
        return len(self.ks)

    def dense(self) -> np.ndarray:
        mat = np.zeros((len(self.ks), self.m), dtype=np.float64)
        for i, k in enumerate(self.ks):
            for pos, sign in k:
                mat[i, pos] = sign
        return mat

    def weights(self) -> np.ndarray:
        return np.array([len(k) for k in self.ks], dtype=float)


def truncated_k_size(m: int, h: int) -> int:
    """|K(m, h)| = sum_{w<=h} binom(m, w) 2^w (uncapped)."""
    import math

    return sum(math.comb(m, w) * (1 << w) for w in range(h + 1))


def enumerate_K(m: int, h: int, cap: int | None = None) -> TruncatedK:
    if h < 0:
        raise ValueError("h must be >= 0")
    cap = int(cap) if cap is not None else truncated_k_size(m, min(h, m))
    if cap < 1:
        raise ValueError("cap must be >= 1")
    ks: list[HarmonicIndex] = []
    done = False
    for w in range(min(h, m) + 1):
        for positions in itertools.combinations(range(m), w):
            for signs in itertools.product((1, -1), repeat=w):
                ks.append(tuple(zip(positions, signs)))
                if len(ks) >= cap:
                    done = True
                    break
            if done:
                break
        if done:
            break
    return TruncatedK(m, h, cap, tuple(ks))


def k_from_exact_labels(labels, m: int, h: int | None = None) -> TruncatedK:
    """Wrap an exact CMatrix's column labels as a TruncatedK (for reuse)."""
    ks = tuple(sorted(labels, key=harmonic_sort_key))
    return TruncatedK(m, h if h is not None else m, len(ks), ks)


# --- Monte-Carlo estimators -------------------------------------------------


def _chunks(indices: np.ndarray):
    for start in range(0, len(indices), CHUNK):
        yield indices[start : start + CHUNK]


def estimate_C(
    circuit: Circuit,
    ensemble: SampleEnsemble,
    K: TruncatedK,
    n_x: int,
    split: str = "c",
) -> CMatrix:
    """Chat_{omega k} = (1/S) sum_s a_omega(theta_s) e^{-i k.theta_s}."""
    omega_max = _check_grid(circuit, n_x)
    if ensemble.m != circuit.m or K.m != circuit.m:
        raise ValueError("ensemble/K parameter count does not match the circuit")
    compiled = CompiledCircuit(circuit)
    grid = x_grid(n_x)
    k_dense_t = K.dense().T  # (m, |K|)
    indices = ensemble.split_indices(split)
    acc = np.zeros((2 * omega_max + 1, len(K)), dtype=complex)
    for chunk in _chunks(indices):
        thetas = ensemble.thetas(chunk)
        a = dft_from_values(compiled.evaluate(grid, thetas), omega_max)  # (B, |Omega|)
        for j0 in range(0, len(K), _K_BLOCK):
            j1 = min(j0 + _K_BLOCK, len(K))
            phases = np.exp(-1j * (thetas @ k_dense_t[:, j0:j1]))  # (B, blk)
            acc[:, j0:j1] += a.T @ phases
    acc /= len(indices)
    prov = ensemble.split_provenance(split)
    prov.update(
        {
            "method": "mc",
            "params": {"h": K.h, "cap": K.cap, "n_x": n_x, "k_columns": len(K)},
        }
    )
    return CMatrix(omega_labels(omega_max), K.ks, acc, circuit.m, prov)


@dataclass(frozen=True)
class MomentEstimate:
    """First and centred second moments of the coefficient vector."""

    omega_labels: tuple[int, ...]
    mean: np.ndarray
    second_moment: np.ndarray
    provenance: dict

    @property
    def covariance(self) -> np.ndarray:
        return self.second_moment - np.outer(self.mean, np.conj(self.mean))

    @property
    def variance(self) -> np.ndarray:
        return np.maximum(np.diag(self.covariance).real, 0.0)


def mc_moments(
    circuit: Circuit, ensemble: SampleEnsemble, n_x: int, split: str = "mc"
) -> MomentEstimate:
    """One pass over the split: empirical mean and raw second moment of a."""
    omega_max = _check_grid(circuit, n_x)
    indices = ensemble.split_indices(split)
    if len(indices) < 2:
        raise ValueError("need at least 2 samples for centred moments")
    compiled = CompiledCircuit(circuit)
    grid = x_grid(n_x)
    dim = 2 * omega_max + 1
    mean = np.zeros(dim, dtype=complex)
    m2 = np.zeros((dim, dim), dtype=complex)
    for chunk in _chunks(indices):
        a = dft_from_values(compiled.evaluate(grid, ensemble.thetas(chunk)), omega_max)
        mean += a.sum(axis=0)
        m2 += a.T @ np.conj(a)
    mean /= len(indices)
    m2 /= len(indices)
    prov = ensemble.split_provenance(split)
    prov.update({"method": "mc", "params": {"n_x": n_x}})
    return MomentEstimate(omega_labels(omega_max), mean, m2, prov)


def mc_variance(circuit: Circuit, ensemble: SampleEnsemble, n_x: int, split: str = "mc") -> np.ndarray:
    """Per-omega centred second moment (1/S normalisation)."""
    return mc_moments(circuit, ensemble, n_x, split).variance


def mc_covariance(circuit: Circuit, ensemble: SampleEnsemble, n_x: int, split: str = "mc") -> np.ndarray:
    """Centred outer-product average of the coefficient vector."""
    return mc_moments(circuit, ensemble, n_x, split).covariance


def mc_jacobian_gram(
    circuit: Circuit,
    ensemble: SampleEnsemble,
    n_x: int,
    split: str = "mc",
    method: str = "adjoint",
):
    """Hbar_MC = (1/S) sum_s X(theta_s) X(theta_s)^dag, X = d a / d theta.

    X is the DFT (over the x grid) of the parameter gradients of f.  The
    default adjoint sweep returns all m derivatives in one backward pass and
    agrees with the two-term parameter-shift rule to machine precision;
    method="shift" uses the shift rule directly (m times slower).
    """
    omega_max = _check_grid(circuit, n_x)
    indices = ensemble.split_indices(split)
    compiled = CompiledCircuit(circuit)
    grid = x_grid(n_x)
    dim = 2 * omega_max + 1
    gram = np.zeros((dim, dim), dtype=complex)
    for chunk in _chunks(indices):
        thetas = ensemble.thetas(chunk)
        if method == "adjoint":
            _, grad = compiled.evaluate_with_gradients(grid, thetas)  # (B, n_x, m)
        elif method == "shift":
            grad = _shift_gradients(compiled, grid, thetas)
        else:
            raise ValueError(f"unknown gradient method {method!r}")
        x_mat = dft_from_values(np.moveaxis(grad, -1, -2), omega_max)  # (B, m, |Omega|)
        gram += np.einsum("bao,bap->op", x_mat, np.conj(x_mat))
    gram /= len(indices)
    prov = ensemble.split_provenance(split)
    prov.update({"method": "mc", "params": {"n_x": n_x, "gradients": method}})
    return gram, prov


def _shift_gradients(compiled: CompiledCircuit, grid, thetas) -> np.ndarray:
    grad = np.zeros(thetas.shape[:-1] + (len(grid), compiled.m), dtype=float)
    for gate in compiled.gates:
        if gate.kind != "rot":
            continue
        shifts = np.zeros(compiled.n_rot)
        shifts[gate.position] = np.pi / 2
        f_plus = compiled.evaluate(grid, thetas, shifts)
        shifts[gate.position] = -np.pi / 2
        f_minus = compiled.evaluate(grid, thetas, shifts)
        grad[..., gate.param] += gate.mult * 0.5 * (f_plus - f_minus)
    return grad
