"""Encoder-side combinatorics: difference sets, Minkowski sums, redundancy.

Scalar input throughout, so frequencies are integers and sets are sorted
integer tuples.  Redundancy counts come from dynamic-programming convolution
of per-layer indicator vectors; tuple enumeration is only materialised below
a configurable cap.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .circuits import Circuit, EncoderGate

ENUMERATION_CAP = 10_000


def difference_set(encoder_block: Sequence[EncoderGate]) -> tuple[int, ...]:
    """Frequencies one commuting phase-encoder block contributes.

    With the half-angle convention each single-qubit encoder gate has
    generator eigenvalues +-1/2; the joint eigenvalues of an n-gate block
    are (n - 2w)/2, so the pairwise differences are all integers in
    [-n, n].  Mixed axes within a block are rejected (non-commuting).
    """
    if not encoder_block:
        return (0,)
    axes = {g.axis for g in encoder_block}
    if len(axes) > 1:
        raise ValueError(f"mixed encoder axes in one block: {sorted(axes)}")
    eigs = [(len(encoder_block) - 2 * w) / 2 for w in range(len(encoder_block) + 1)]
    diffs = {int(a - b) for a in eigs for b in eigs}
    return tuple(sorted(diffs))


def minkowski_sum(sets: Sequence[Iterable[int]]) -> tuple[int, ...]:
    """Elementwise-sum composition of per-layer difference sets."""
    if not sets:
        raise ValueError("need at least one set")
    acc = {0}
    for s in sets:
        acc = {a + b for a in acc for b in s}
    return tuple(sorted(acc))


def _layer_indicator(s: Iterable[int]) -> tuple[np.ndarray, int]:
    vals = sorted(set(s))
    lo, hi = vals[0], vals[-1]
    ind = np.zeros(hi - lo + 1, dtype=np.int64)
    for v in vals:
        ind[v - lo] = 1
    return ind, lo


def redundancy_profile(per_layer: Sequence[Iterable[int]]) -> dict[int, int]:
    """|R(omega)| for every accessible omega, by indicator convolution."""
    acc = np.array([1], dtype=np.int64)
    offset = 0
    for s in per_layer:
        ind, lo = _layer_indicator(s)
        acc = np.convolve(acc, ind)
        offset += lo
    return {offset + i: int(c) for i, c in enumerate(acc) if c}


def redundancy(
    per_layer: Sequence[Iterable[int]],
    omega: int,
    enumeration_cap: int = ENUMERATION_CAP,
) -> tuple[int, Optional[list[tuple[int, ...]]]]:
    """Count (and optionally enumerate) layer tuples summing to omega.

    Returns (|R(omega)|, tuples) with tuples None whenever the count
    exceeds ``enumeration_cap``.  omega outside the accessible set counts 0.
    """
    count = redundancy_profile(per_layer).get(omega, 0)
    if count == 0:
        return 0, []
    if count > enumeration_cap:
        return count, None
    tuples = [
        p
        for p in itertools.product(*[sorted(set(s)) for s in per_layer])
        if sum(p) == omega
    ]
    assert len(tuples) == count
    return count, tuples


@dataclass(frozen=True)
class FrequencySet:
    """Accessible frequencies of a circuit plus the per-layer difference sets."""

    omega: tuple[int, ...]
    per_layer: tuple[tuple[int, ...], ...]

    @classmethod
    def from_circuit(cls, circuit: Circuit) -> "FrequencySet":
        per_layer = tuple(difference_set(layer.encoder) for layer in circuit.layers)
        return cls(minkowski_sum(per_layer), per_layer)

    @property
    def omega_max(self) -> int:
        return max(abs(w) for w in self.omega)

    def index_of(self, omega: int) -> int:
        return self.omega.index(omega)
