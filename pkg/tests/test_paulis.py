import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chm.paulis import PauliString, conjugate_by_clifford

LETTERS = "IXYZ"
PHASES = [1, 1j, -1, -1j]


def word(draw_letters, phase=1):
    return PauliString.from_letters(draw_letters, phase)


@pytest.mark.parametrize("la,lb", list(itertools.product(LETTERS, LETTERS)))
def test_single_qubit_product_matches_matrix_oracle(la, lb):
    p, q = word(la), word(lb)
    assert np.allclose((p * q).to_matrix(), p.to_matrix() @ q.to_matrix())


@given(
    st.text(alphabet=LETTERS, min_size=1, max_size=3),
    st.text(alphabet=LETTERS, min_size=1, max_size=3),
    st.sampled_from(PHASES),
    st.sampled_from(PHASES),
)
@settings(max_examples=150, deadline=None)
def test_product_closure_and_phase(w1, w2, ph1, ph2):
    n = max(len(w1), len(w2))
    p = word(w1.ljust(n, "I"), ph1)
    q = word(w2.ljust(n, "I"), ph2)
    r = p * q
    assert r.phase in (1, 1j, -1, -1j)
    assert np.allclose(r.to_matrix(), p.to_matrix() @ q.to_matrix())


@given(
    st.text(alphabet=LETTERS, min_size=1, max_size=4),
    st.text(alphabet=LETTERS, min_size=1, max_size=4),
)
@settings(max_examples=150, deadline=None)
def test_commutes_xor_anticommutes(w1, w2):
    n = max(len(w1), len(w2))
    p = word(w1.ljust(n, "I"))
    q = word(w2.ljust(n, "I"))
    pq = (p * q).to_matrix()
    qp = (q * p).to_matrix()
    commutes = np.allclose(pq, qp)
    anticommutes = np.allclose(pq, -qp)
    assert commutes != anticommutes
    assert p.commutes(q) == commutes


@given(st.text(alphabet=LETTERS, min_size=1, max_size=5))
@settings(max_examples=100, deadline=None)
def test_self_product_is_identity(w):
    p = word(w)
    sq = p * p
    assert sq.weight == 0
    assert sq.phase == 1


def test_letters_phase_roundtrip():
    for w in ("Y", "XYZ", "IZZY"):
        for ph in PHASES:
            p = PauliString.from_letters(w, ph)
            assert p.letters == w
            assert p.phase == ph


def test_basis_action_matches_matrix(rng):
    for _ in range(30):
        w = "".join(rng.choice(list(LETTERS), 3))
        p = PauliString.from_letters(w, rng.choice(PHASES))
        psi = rng.normal(size=8) + 1j * rng.normal(size=8)
        perm, coeff = p.basis_action()
        assert np.allclose(coeff * psi[perm], p.to_matrix() @ psi)


def _dense_cnot(control_low: bool) -> np.ndarray:
    u = np.zeros((4, 4), dtype=complex)
    for j in range(4):
        if control_low:
            u[j ^ ((j & 1) << 1), j] = 1
        else:
            u[j ^ ((j >> 1) & 1), j] = 1
    return u


@pytest.mark.parametrize("kind", ["cnot", "cz"])
def test_clifford_conjugation_vs_dense(kind, rng):
    if kind == "cnot":
        u2 = _dense_cnot(control_low=True)
    else:
        u2 = np.diag([1, 1, 1, -1]).astype(complex)
    u = np.kron(np.eye(2), u2)  # qubits (0, 1) of a 3-qubit register
    for _ in range(100):
        w = "".join(rng.choice(list(LETTERS), 3))
        p = PauliString.from_letters(w, rng.choice(PHASES))
        got = conjugate_by_clifford(p, kind, 0, 1)
        want = u.conj().T @ p.to_matrix() @ u
        assert np.allclose(got.to_matrix(), want)


def test_cnot_reversed_orientation(rng):
    u2 = _dense_cnot(control_low=False)  # control qubit 1, target qubit 0
    for _ in range(50):
        w = "".join(rng.choice(list(LETTERS), 2))
        p = PauliString.from_letters(w)
        got = conjugate_by_clifford(p, "cnot", 1, 0)
        want = u2.conj().T @ p.to_matrix() @ u2
        assert np.allclose(got.to_matrix(), want)


def test_invalid_letter_rejected():
    with pytest.raises(ValueError):
        PauliString.from_letters("XQ")
