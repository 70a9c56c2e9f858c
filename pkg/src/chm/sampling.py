"""Reproducible uniform sampling on the parameter torus.

Draws are produced by a counter-based generator: coordinate c of sample s
under seed K is a pure function hash(K, s, c), so results are independent of
chunking, thread count and evaluation order.  The hash is the splitmix64
output function (golden-ratio increment + Stafford mix13 finaliser), applied
at counter s*m + c; splitmix64's statistical quality is more than adequate
for the Monte-Carlo estimates here and is cross-checked by moment and
character-orthogonality tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_U64 = np.uint64
TWO_PI = 2.0 * np.pi


def _mix(v: np.ndarray) -> np.ndarray:
    v = (v ^ (v >> _U64(30))) * _MIX1
    v = (v ^ (v >> _U64(27))) * _MIX2
    return v ^ (v >> _U64(31))


def counter_uniforms(seed: int, counters: np.ndarray) -> np.ndarray:
    """Uniform [0, 1) doubles at the given 64-bit counters."""
    base = _mix(np.asarray([_U64(seed % (1 << 64))], dtype=np.uint64))[0]
    state = base + (np.asarray(counters, dtype=np.uint64) + _U64(1)) * _GOLDEN
    bits = _mix(state)
    return (bits >> _U64(11)).astype(np.float64) * (1.0 / (1 << 53))


def theta_block(seed: int, sample_indices, m: int) -> np.ndarray:
    """Uniform [0, 2pi) angles of shape (len(sample_indices), m)."""
    idx = np.asarray(sample_indices, dtype=np.uint64)
    counters = idx[:, None] * _U64(m) + np.arange(m, dtype=np.uint64)[None, :]
    return TWO_PI * counter_uniforms(seed, counters.ravel()).reshape(len(idx), m)


@dataclass(frozen=True)
class SampleEnsemble:
    """Seeded ensemble of S parameter vectors with a fixed half/half split.

    Sample indices [0, S/2) form the C-estimation split and [S/2, S) the
    Monte-Carlo reference split; the two are disjoint and exhaust the
    ensemble, and theta(s) depends only on (seed, s).
    """

    seed: int
    count: int
    m: int

    def __post_init__(self):
        if self.count < 2 or self.count % 2 != 0:
            raise ValueError("ensemble count must be even and >= 2 (split sampling)")
        if self.m < 1:
            raise ValueError("m must be >= 1")

    def split_indices(self, split: str) -> np.ndarray:
        half = self.count // 2
        if split == "c":
            return np.arange(0, half)
        if split == "mc":
            return np.arange(half, self.count)
        if split == "all":
            return np.arange(self.count)
        raise ValueError(f"unknown split {split!r}; expected 'c', 'mc' or 'all'")

    def thetas(self, sample_indices) -> np.ndarray:
        return theta_block(self.seed, sample_indices, self.m)

    def split_provenance(self, split: str) -> dict:
        idx = self.split_indices(split)
        return {
            "seed": self.seed,
            "split": split,
            "sample_start": int(idx[0]),
            "sample_stop": int(idx[-1]) + 1,
            "count": int(len(idx)),
        }


def sample_theta(ensemble: SampleEnsemble, s: int) -> np.ndarray:
    """Parameter vector for sample s; reproducible across runs and chunkings."""
    if not 0 <= s < ensemble.count:
        raise IndexError(f"sample index {s} outside ensemble of {ensemble.count}")
    return ensemble.thetas([s])[0]


def assert_disjoint_splits(prov_a: dict, prov_b: dict) -> None:
    """Guard for every exact-vs-MC comparison: no shared sample indices."""
    a0, a1 = prov_a["sample_start"], prov_a["sample_stop"]
    b0, b1 = prov_b["sample_start"], prov_b["sample_stop"]
    if prov_a["seed"] == prov_b["seed"] and max(a0, b0) < min(a1, b1):
        raise AssertionError(
            f"estimator splits overlap: [{a0},{a1}) vs [{b0},{b1}) under seed {prov_a['seed']}"
        )
