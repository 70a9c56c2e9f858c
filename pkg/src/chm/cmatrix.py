"""Harmonic index labels and the dense circuit harmonic matrix.

A parameter harmonic k in {-1, 0, 1}^m is stored sparsely as a tuple of
(position, sign) pairs sorted by position; k = () is the constant mode.
CMatrix couples input-frequency rows (omega labels) to parameter-harmonic
columns (k labels) and serialises to a JSON document with a base64 payload
of interleaved (re, im) doubles in row-major order, shared by the exact and
Monte-Carlo constructions.
"""

from __future__ import annotations

import base64
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

HarmonicIndex = tuple[tuple[int, int], ...]

CMATRIX_FORMAT_VERSION = 1

K_ZERO: HarmonicIndex = ()


def harmonic_from_dense(vec) -> HarmonicIndex:
    """Sparse form of a dense k vector with entries in {-1, 0, 1}."""
    out = []
    for pos, v in enumerate(vec):
        if v == 0:
            continue
        if v not in (-1, 1):
            raise ValueError(f"harmonic entries must lie in {{-1,0,1}}, got {v}")
        out.append((pos, int(v)))
    return tuple(out)


def harmonic_to_dense(k: HarmonicIndex, m: int) -> np.ndarray:
    vec = np.zeros(m, dtype=np.int8)
    for pos, sign in k:
        vec[pos] = sign
    return vec


def harmonic_weight(k: HarmonicIndex) -> int:
    return len(k)


def harmonic_negate(k: HarmonicIndex) -> HarmonicIndex:
    return tuple((pos, -sign) for pos, sign in k)


def harmonic_sort_key(k: HarmonicIndex):
    """Canonical order: weight, then positions, then signs (+1 before -1)."""
    return (len(k), tuple(p for p, _ in k), tuple(0 if s > 0 else 1 for _, s in k))


def harmonic_dot(k: HarmonicIndex, theta: np.ndarray) -> float:
    return float(sum(s * theta[p] for p, s in k))


@dataclass(frozen=True)
class CMatrix:
    """Dense complex |Omega| x |K| matrix of joint Fourier coefficients."""

    omega_labels: tuple[int, ...]
    k_labels: tuple[HarmonicIndex, ...]
    entries: np.ndarray
    m: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.entries.shape != (len(self.omega_labels), len(self.k_labels)):
            raise ValueError("entry shape does not match labels")

    @property
    def k0_index(self) -> int:
        """Column of the constant k = 0 mode; raises if absent."""
        try:
            return self.k_labels.index(K_ZERO)
        except ValueError:
            raise ValueError("CMatrix has no designated k=0 column") from None

    def k_weights(self) -> np.ndarray:
        """||k||^2 per column (Hamming weight for k in {-1,0,1}^m)."""
        return np.array([len(k) for k in self.k_labels], dtype=float)

    def omega_index(self, omega: int) -> int:
        return self.omega_labels.index(omega)

    def k_matrix(self) -> np.ndarray:
        """Dense |K| x m integer matrix of the column harmonics."""
        mat = np.zeros((len(self.k_labels), self.m), dtype=np.int8)
        for i, k in enumerate(self.k_labels):
            for pos, sign in k:
                mat[i, pos] = sign
        return mat

    def reconstruct(self, x: float, theta) -> complex:
        """sum_{omega,k} C_{omega k} e^{i omega x} e^{i k.theta}."""
        theta = np.asarray(theta, dtype=float)
        ex = np.exp(1j * np.array(self.omega_labels) * x)
        ek = np.exp(1j * np.array([harmonic_dot(k, theta) for k in self.k_labels]))
        return complex(ex @ self.entries @ ek)

    def restrict_columns(self, k_labels) -> "CMatrix":
        """Sub-matrix on the given columns (missing labels become zero columns)."""
        have = {k: i for i, k in enumerate(self.k_labels)}
        cols = np.zeros((len(self.omega_labels), len(k_labels)), dtype=complex)
        for j, k in enumerate(k_labels):
            if k in have:
                cols[:, j] = self.entries[:, have[k]]
        return CMatrix(self.omega_labels, tuple(k_labels), cols, self.m, dict(self.provenance))

    # -- serialisation ------------------------------------------------------

    def to_json_dict(self) -> dict:
        payload = np.empty(self.entries.size * 2, dtype="<f8")
        flat = self.entries.ravel(order="C")
        payload[0::2] = flat.real
        payload[1::2] = flat.imag
        return {
            "version": CMATRIX_FORMAT_VERSION,
            "omega_labels": list(self.omega_labels),
            "k_labels": [[[p, s] for p, s in k] for k in self.k_labels],
            "shape": list(self.entries.shape),
            "m": self.m,
            "provenance": self.provenance,
            "payload": base64.b64encode(payload.tobytes()).decode("ascii"),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "CMatrix":
        if doc.get("version") != CMATRIX_FORMAT_VERSION:
            raise ValueError(f"unsupported CMatrix format version {doc.get('version')!r}")
        raw = np.frombuffer(base64.b64decode(doc["payload"]), dtype="<f8")
        entries = (raw[0::2] + 1j * raw[1::2]).reshape(doc["shape"])
        return cls(
            tuple(doc["omega_labels"]),
            tuple(tuple((p, s) for p, s in k) for k in doc["k_labels"]),
            entries,
            doc["m"],
            doc.get("provenance", {}),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json_dict(), sort_keys=True))

    @classmethod
    def load(cls, path) -> "CMatrix":
        return cls.from_json_dict(json.loads(Path(path).read_text()))
