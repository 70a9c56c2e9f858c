"""Closed-form objects built from C: covariance, correlation, kernels, metrics.

Centred coefficient covariance is the row Gram matrix C P C^dag with P the
diagonal projector zeroing the constant k = 0 column; variances are its
diagonal, row energies add |C_{omega 0}|^2.  The harmonic tangent kernel
factorises as H(theta) = C M(theta) C^dag with the character-gradient kernel
M_{kl}(theta) = (k.l) e^{i(k-l).theta}; uniform parameter averaging
diagonalises M to ||k||^2.  The data-space kernel follows by design-matrix
projection K = V H V^dag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cmatrix import CMatrix, harmonic_dot

M_MATERIALISE_LIMIT = 4096
DEFAULT_MASK_THRESHOLD = 1e-10


def centred(c: CMatrix) -> np.ndarray:
    """C with the k = 0 column zeroed (C P)."""
    out = c.entries.copy()
    out[:, c.k0_index] = 0.0
    return out


def covariance_from_C(c: CMatrix) -> np.ndarray:
    """Cov[a] = C P C^dag; Hermitian and positive semidefinite."""
    cp = centred(c)
    cov = cp @ np.conj(cp.T)
    return 0.5 * (cov + np.conj(cov.T))


def variance_profile(c: CMatrix) -> np.ndarray:
    """Var[a_omega] = sum_{k != 0} |C_{omega k}|^2 (diagonal of C P C^dag)."""
    cp = centred(c)
    return np.sum(np.abs(cp) ** 2, axis=1)


def row_energy(c: CMatrix) -> np.ndarray:
    """E_omega = |C_{omega 0}|^2 + Var[a_omega] = E[|a_omega|^2] (Parseval)."""
    return variance_profile(c) + np.abs(c.entries[:, c.k0_index]) ** 2


@dataclass(frozen=True)
class CorrelationMatrix:
    """Pearson-normalised covariance with a vanishing-variance row mask."""

    omega_labels: tuple[int, ...]
    matrix: np.ndarray
    unmasked: np.ndarray  # bool per row; False = variance below threshold
    variances: np.ndarray

    @property
    def masked_labels(self) -> tuple[int, ...]:
        return tuple(w for w, keep in zip(self.omega_labels, self.unmasked) if not keep)


def correlation(
    cov: np.ndarray,
    omega_labels,
    variances: np.ndarray | None = None,
    mask_threshold: float = DEFAULT_MASK_THRESHOLD,
) -> CorrelationMatrix:
    """Corr = D^{-1/2} Cov D^{-1/2} with vanishing-variance rows masked out.

    Rows whose variance falls below mask_threshold * max(D) are excluded
    from metrics (their entries are set to zero); unmasked diagonal is 1
    exactly.  D defaults to diag(cov) but may be supplied (e.g. truncated
    row energies for the estimated-C route).
    """
    cov = np.asarray(cov)
    d = np.asarray(variances).real if variances is not None else np.diag(cov).real
    if d.shape != (cov.shape[0],):
        raise ValueError("variance vector does not match covariance shape")
    top = float(d.max(initial=0.0))
    unmasked = d > mask_threshold * top if top > 0 else np.zeros(len(d), dtype=bool)
    if not unmasked.any():
        raise ValueError("all rows masked: no variance above threshold")
    scale = np.zeros_like(d)
    scale[unmasked] = 1.0 / np.sqrt(d[unmasked])
    corr = scale[:, None] * cov * scale[None, :]
    corr[~unmasked, :] = 0.0
    corr[:, ~unmasked] = 0.0
    idx = np.where(unmasked)[0]
    corr[idx, idx] = 1.0
    return CorrelationMatrix(tuple(omega_labels), corr, unmasked, d)


# --- kernels ----------------------------------------------------------------


def M_kernel(K, theta) -> np.ndarray:
    """Character-gradient kernel M_{kl}(theta) = (k.l) e^{i(k-l).theta}."""
    ks = list(K.ks) if hasattr(K, "ks") else list(K)
    if len(ks) > M_MATERIALISE_LIMIT:
        raise ValueError(
            f"refusing to materialise a {len(ks)}^2 kernel; use H_kernel's "
            "factored route instead"
        )
    theta = np.asarray(theta, dtype=float)
    dots = np.array([harmonic_dot(k, theta) for k in ks])
    m = max((p for k in ks for p, _ in k), default=-1) + 1
    dense = np.zeros((len(ks), max(m, 1)))
    for i, k in enumerate(ks):
        for pos, sign in k:
            dense[i, pos] = sign
    gram = dense @ dense.T
    phases = np.exp(1j * (dots[:, None] - dots[None, :]))
    return gram * phases


def M_averaged(K) -> np.ndarray:
    """Parameter-averaged M: diagonal ||k||^2 (the Hamming weight here)."""
    ks = list(K.ks) if hasattr(K, "ks") else list(K)
    return np.array([len(k) for k in ks], dtype=float)


def coefficient_jacobian(c: CMatrix, theta) -> np.ndarray:
    """X_{omega a}(theta) = sum_k C_{omega k} (i k_a) e^{i k.theta}."""
    theta = np.asarray(theta, dtype=float)
    dots = np.array([harmonic_dot(k, theta) for k in c.k_labels])
    kmat = c.k_matrix().astype(float)  # (|K|, m)
    psi_grad = 1j * kmat * np.exp(1j * dots)[:, None]
    return c.entries @ psi_grad


def H_kernel(c: CMatrix, theta) -> np.ndarray:
    """Pointwise harmonic tangent kernel H(theta) = C M(theta) C^dag.

    Uses M's rank structure H = (C Psi)(C Psi)^dag with Psi_{k a} =
    i k_a e^{i k.theta}, avoiding the |K|^2 intermediate for large K.
    """
    x = coefficient_jacobian(c, theta)
    h = x @ np.conj(x.T)
    return 0.5 * (h + np.conj(h.T))


def H_averaged(c: CMatrix) -> np.ndarray:
    """E_theta[H] = C diag(||k||^2) C^dag, via column weighting by sqrt(||k||^2)."""
    weighted = c.entries * np.sqrt(c.k_weights())[None, :]
    h = weighted @ np.conj(weighted.T)
    return 0.5 * (h + np.conj(h.T))


def design_matrix(omega_labels, xs) -> np.ndarray:
    """V_{i omega} = e^{i omega x_i}."""
    xs = np.asarray(xs, dtype=float)
    return np.exp(1j * np.outer(xs, np.asarray(omega_labels, dtype=float)))


def data_qntk(v: np.ndarray, h: np.ndarray) -> np.ndarray:
    """K = V H V^dag, the data-space tangent kernel on the input set."""
    k = v @ h @ np.conj(v.T)
    return 0.5 * (k + np.conj(k.T))


# --- comparison metrics -------------------------------------------------------


def frobenius_error(a: np.ndarray, b: np.ndarray) -> float:
    """Relative Frobenius error ||A - B||_F / ||B||_F."""
    denom = np.linalg.norm(b)
    if denom == 0:
        raise ValueError("reference matrix is zero; relative error undefined")
    return float(np.linalg.norm(a - b) / denom)


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius cosine Re Tr(A^dag B) / (||A||_F ||B||_F)."""
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ValueError("cosine similarity undefined for zero matrices")
    return float(np.real(np.vdot(a, b)) / (na * nb))


def unit_frobenius(a: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(a)
    return a / norm if norm > 0 else a


def mean_offdiag(corr: CorrelationMatrix) -> float:
    """Mean |entry| over unmasked upper-triangle off-diagonal pairs."""
    idx = np.where(corr.unmasked)[0]
    if len(idx) < 2:
        return 0.0
    sub = corr.matrix[np.ix_(idx, idx)]
    iu = np.triu_indices(len(idx), k=1)
    return float(np.mean(np.abs(sub[iu])))


def variance_normalised(h: np.ndarray, mask_threshold: float = DEFAULT_MASK_THRESHOLD):
    """diag(H)^{-1/2} H diag(H)^{-1/2} with the same masking as correlation."""
    return correlation(h, range(h.shape[0]), mask_threshold=mask_threshold)


def masked_block(mat: np.ndarray, unmasked: np.ndarray) -> np.ndarray:
    idx = np.where(unmasked)[0]
    return mat[np.ix_(idx, idx)]
