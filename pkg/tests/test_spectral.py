import itertools

import numpy as np
import pytest

from chm.circuits import EncoderGate, build_family
from chm.estimation import dft_from_values
from chm.simulator import CompiledCircuit
from chm.spectral import (
    FrequencySet,
    difference_set,
    minkowski_sum,
    redundancy,
    redundancy_profile,
)


def _block(axis, n):
    return tuple(EncoderGate(axis, q) for q in range(n))


def test_difference_set_examples():
    assert difference_set(_block("X", 1)) == (-1, 0, 1)
    assert difference_set(_block("Y", 6)) == tuple(range(-6, 7))


def test_difference_set_n2_against_enumeration():
    # oracle: joint eigenvalues of (Z1 + Z2)/2 are sums of +-1/2
    eigs = [a + b for a, b in itertools.product((0.5, -0.5), repeat=2)]
    want = sorted({int(x - y) for x in eigs for y in eigs})
    assert list(difference_set(_block("Z", 2))) == want == [-2, -1, 0, 1, 2]


def test_difference_set_mixed_axes_rejected():
    with pytest.raises(ValueError):
        difference_set((EncoderGate("X", 0), EncoderGate("Y", 1)))


def test_minkowski_examples():
    assert minkowski_sum([(-1, 0, 1)]) == (-1, 0, 1)
    assert minkowski_sum([(-1, 0, 1), (-1, 0, 1)]) == (-2, -1, 0, 1, 2)
    r6 = tuple(range(-6, 7))
    assert minkowski_sum([r6, r6]) == tuple(range(-12, 13))
    with pytest.raises(ValueError):
        minkowski_sum([])


def test_redundancy_examples():
    assert redundancy([(-1, 0, 1)], 1) == (1, [(1,)])
    count, tuples = redundancy([(-1, 0, 1), (-1, 0, 1)], 0)
    assert count == 3
    assert sorted(tuples) == [(-1, 1), (0, 0), (1, -1)]
    assert redundancy([(-1, 0, 1), (-1, 0, 1)], 2) == (1, [(1, 1)])
    assert redundancy([(-1, 0, 1)], 5) == (0, [])


def test_redundancy_profile_against_enumeration(rng):
    layers = [tuple(range(-2, 3)), (-1, 0, 1), (-3, 0, 3)]
    profile = redundancy_profile(layers)
    brute = {}
    for p in itertools.product(*layers):
        brute[sum(p)] = brute.get(sum(p), 0) + 1
    assert profile == brute
    # total count and symmetry
    assert sum(profile.values()) == np.prod([len(s) for s in layers])
    for w, c in profile.items():
        assert profile[-w] == c


def test_redundancy_enumeration_cap():
    layers = [tuple(range(-6, 7))] * 4
    count, tuples = redundancy(layers, 0, enumeration_cap=10)
    assert count > 10 and tuples is None


def test_frequency_set_from_circuit():
    circ = build_family("yzy-ent", "X", 4, 2, 1)
    fs = FrequencySet.from_circuit(circ)
    assert fs.omega == tuple(range(-8, 9))
    assert fs.per_layer == (tuple(range(-4, 5)),) * 2
    assert fs.omega_max == 8 == circ.omega_max()


@pytest.mark.parametrize("family", ["yzy-noent", "yzy-ent", "circuit16", "circuit17"])
def test_bandwidth_containment(family, rng):
    """DFT mass outside the accessible set is numerically zero (per theta)."""
    circ = build_family(family, "Y", 3, 1, 2)
    compiled = CompiledCircuit(circ)
    omega_max = circ.omega_max()
    pad = 2 * omega_max + 8  # resolve frequencies well beyond the band limit
    grid = 2 * np.pi * np.arange(pad) / pad
    for _ in range(5):
        th = rng.uniform(0, 2 * np.pi, circ.m)
        a = dft_from_values(compiled.evaluate(grid, th), pad // 2 - 1)
        labels = range(-(pad // 2 - 1), pad // 2)
        outside = [abs(v) for w, v in zip(labels, a) if abs(w) > omega_max]
        assert max(outside) < 1e-8


def test_bandwidth_saturation_yzy_ent(rng):
    """At sufficient depth the Minkowski equality is achieved, not just containment."""
    circ = build_family("yzy-ent", "X", 4, 1, 3)
    compiled = CompiledCircuit(circ)
    grid = 2 * np.pi * np.arange(32) / 32
    hit = np.zeros(9)
    for _ in range(20):
        th = rng.uniform(0, 2 * np.pi, circ.m)
        a = dft_from_values(compiled.evaluate(grid, th), 4)
        hit = np.maximum(hit, np.abs(a))
    assert hit.min() > 1e-6  # every omega in {-4..4} is reachable
