import numpy as np
import pytest

from chm.sampling import (
    SampleEnsemble,
    assert_disjoint_splits,
    sample_theta,
    theta_block,
)


def test_determinism_and_chunk_independence():
    ens = SampleEnsemble(seed=0, count=100, m=5)
    a = sample_theta(ens, 0)
    b = sample_theta(ens, 0)
    assert np.array_equal(a, b)
    # block draws equal per-sample draws regardless of chunk shape
    block = ens.thetas(np.arange(10))
    for s in range(10):
        assert np.array_equal(block[s], sample_theta(ens, s))
    assert np.array_equal(theta_block(0, [3, 7], 5), block[[3, 7]])


def test_distinct_seeds_and_samples():
    ens = SampleEnsemble(seed=1, count=10, m=4)
    other = SampleEnsemble(seed=2, count=10, m=4)
    assert not np.array_equal(sample_theta(ens, 0), sample_theta(other, 0))
    assert not np.array_equal(sample_theta(ens, 0), sample_theta(ens, 1))


def test_range_and_shape():
    ens = SampleEnsemble(seed=3, count=10, m=7)
    th = ens.thetas(np.arange(10))
    assert th.shape == (10, 7)
    assert th.min() >= 0.0 and th.max() < 2 * np.pi


def test_split_assignment():
    ens = SampleEnsemble(seed=0, count=10, m=1)
    c = ens.split_indices("c")
    mc = ens.split_indices("mc")
    assert list(c) == [0, 1, 2, 3, 4]
    assert list(mc) == [5, 6, 7, 8, 9]
    assert set(c).isdisjoint(mc)
    assert sorted(list(c) + list(mc)) == list(range(10))
    with pytest.raises(ValueError):
        ens.split_indices("other")


def test_ensemble_validation():
    with pytest.raises(ValueError):
        SampleEnsemble(seed=0, count=11, m=1)
    with pytest.raises(ValueError):
        SampleEnsemble(seed=0, count=10, m=0)
    ens = SampleEnsemble(seed=0, count=10, m=1)
    with pytest.raises(IndexError):
        sample_theta(ens, 10)


@pytest.mark.slow
def test_uniform_moments():
    ens = SampleEnsemble(seed=11, count=200000, m=3)
    th = ens.thetas(np.arange(100000))
    sigma = (2 * np.pi / np.sqrt(12)) / np.sqrt(100000)
    assert np.all(np.abs(th.mean(axis=0) - np.pi) < 3 * sigma)
    # character orthogonality at MC accuracy ~ 1/sqrt(S)
    for a in range(3):
        assert abs(np.exp(1j * th[:, a]).mean()) < 0.02


def test_disjointness_guard():
    ens = SampleEnsemble(seed=5, count=100, m=2)
    pa = ens.split_provenance("c")
    pb = ens.split_provenance("mc")
    assert_disjoint_splits(pa, pb)  # fine
    with pytest.raises(AssertionError):
        assert_disjoint_splits(pa, pa)
    # different seeds never collide
    other = SampleEnsemble(seed=6, count=100, m=2).split_provenance("c")
    assert_disjoint_splits(pa, other)
