import json

import numpy as np
import pytest

from chm.cmatrix import (
    CMatrix,
    K_ZERO,
    harmonic_from_dense,
    harmonic_negate,
    harmonic_sort_key,
    harmonic_to_dense,
)


def _sample_cmatrix():
    rng = np.random.default_rng(0)
    k_labels = (K_ZERO, ((0, 1),), ((0, -1),), ((0, 1), (2, -1)))
    entries = rng.normal(size=(3, 4)) + 1j * rng.normal(size=(3, 4))
    return CMatrix((-1, 0, 1), k_labels, entries, m=3, provenance={"method": "exact", "params": {}})


def test_sparse_dense_roundtrip():
    k = harmonic_from_dense([1, 0, -1, 0])
    assert k == ((0, 1), (2, -1))
    assert list(harmonic_to_dense(k, 4)) == [1, 0, -1, 0]
    with pytest.raises(ValueError):
        harmonic_from_dense([2, 0])


def test_negate_and_order():
    k = ((0, 1), (2, -1))
    assert harmonic_negate(k) == ((0, -1), (2, 1))
    ks = [((1, -1),), ((0, 1),), K_ZERO, ((0, -1),), ((0, 1), (1, 1))]
    ordered = sorted(ks, key=harmonic_sort_key)
    assert ordered == [K_ZERO, ((0, 1),), ((0, -1),), ((1, -1),), ((0, 1), (1, 1))]


def test_file_roundtrip(tmp_path):
    c = _sample_cmatrix()
    path = tmp_path / "c.json"
    c.save(path)
    again = CMatrix.load(path)
    assert again.omega_labels == c.omega_labels
    assert again.k_labels == c.k_labels
    assert again.m == c.m
    assert np.array_equal(again.entries, c.entries)
    assert again.provenance == c.provenance
    doc = json.loads(path.read_text())
    assert set(doc) == {"version", "omega_labels", "k_labels", "shape", "m", "provenance", "payload"}


def test_k0_index_and_weights():
    c = _sample_cmatrix()
    assert c.k0_index == 0
    assert list(c.k_weights()) == [0, 1, 1, 2]
    missing = CMatrix((-1, 0, 1), (((0, 1),),), c.entries[:, :1], m=3)
    with pytest.raises(ValueError):
        _ = missing.k0_index


def test_restrict_columns():
    c = _sample_cmatrix()
    sub = c.restrict_columns((K_ZERO, ((1, 1),)))
    assert np.array_equal(sub.entries[:, 0], c.entries[:, 0])
    assert np.all(sub.entries[:, 1] == 0)  # absent column is zero


def test_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        CMatrix((-1, 0, 1), (K_ZERO,), np.zeros((2, 1), dtype=complex), m=1)


def test_version_gate(tmp_path):
    c = _sample_cmatrix()
    doc = c.to_json_dict()
    doc["version"] = 42
    with pytest.raises(ValueError):
        CMatrix.from_json_dict(doc)
