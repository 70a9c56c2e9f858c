"""Pauli-string algebra in symplectic (X-mask, Z-mask) form.

A word is stored as ``i**phase_pow * X^x Z^z`` (X factors first, qubit 0 is
the least-significant bit).  Products, commutation checks and dense-matrix
conversion are exact; phases stay inside the four-element group {1, i, -1, -i}.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

_LETTER_TO_XZ = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_XZ_TO_LETTER = {v: k for k, v in _LETTER_TO_XZ.items()}
_PHASES = (1 + 0j, 1j, -1 + 0j, -1j)

_SINGLE_QUBIT = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def _popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """An n-qubit Pauli word with phase in {+1, -1, +i, -i}.

    The canonical X^x Z^z form absorbs one factor of i per Y letter
    (Y = i X Z), so :attr:`phase` reports the phase relative to the plain
    letter product while ``phase_pow`` is the internal exponent.
    """

    n: int
    x: int
    z: int
    phase_pow: int = 0

    @classmethod
    def from_letters(cls, letters: str, phase: complex = 1) -> "PauliString":
        x = z = 0
        for q, letter in enumerate(letters.upper()):
            try:
                xb, zb = _LETTER_TO_XZ[letter]
            except KeyError:
                raise ValueError(f"invalid Pauli letter {letter!r}") from None
            x |= xb << q
            z |= zb << q
        phase_pow = _PHASES.index(complex(phase))
        n_y = _popcount(x & z)
        return cls(len(letters), x, z, (phase_pow + n_y) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n: int, qubit: int, letter: str) -> "PauliString":
        xb, zb = _LETTER_TO_XZ[letter.upper()]
        return cls(n, xb << qubit, zb << qubit, 1 if letter.upper() == "Y" else 0)

    @property
    def letters(self) -> str:
        return "".join(
            _XZ_TO_LETTER[((self.x >> q) & 1, (self.z >> q) & 1)] for q in range(self.n)
        )

    @property
    def phase(self) -> complex:
        n_y = _popcount(self.x & self.z)
        return _PHASES[(self.phase_pow - n_y) % 4]

    @property
    def weight(self) -> int:
        return _popcount(self.x | self.z)

    def is_hermitian(self) -> bool:
        return self.phase in (1 + 0j, -1 + 0j)

    def commutes(self, other: "PauliString") -> bool:
        anti = (_popcount(self.x & other.z) + _popcount(self.z & other.x)) % 2
        return anti == 0

    def __mul__(self, other: "PauliString") -> "PauliString":
        if self.n != other.n:
            raise ValueError("qubit counts differ")
        # moving Z^z1 past X^x2 picks up (-1)^{|z1 & x2|}
        sign_pow = 2 * (_popcount(self.z & other.x) % 2)
        return PauliString(
            self.n,
            self.x ^ other.x,
            self.z ^ other.z,
            (self.phase_pow + other.phase_pow + sign_pow) % 4,
        )

    def times_i(self) -> "PauliString":
        return PauliString(self.n, self.x, self.z, (self.phase_pow + 1) % 4)

    def canonical(self) -> "PauliString":
        """Same word with user-facing phase +1."""
        return PauliString(self.n, self.x, self.z, _popcount(self.x & self.z) % 4)

    def to_matrix(self) -> np.ndarray:
        """Dense 2^n x 2^n matrix (qubit 0 = least-significant tensor factor)."""
        if self.n > 12:
            raise ValueError("dense conversion limited to n <= 12")
        mat = np.array([[self.phase]], dtype=complex)
        for q in range(self.n - 1, -1, -1):
            mat = np.kron(mat, _SINGLE_QUBIT[self.letters[q]])
        return mat

    def basis_action(self) -> tuple[np.ndarray, np.ndarray]:
        """Vectorised action on computational basis states.

        Returns (perm, coeff) with (P psi)[b] = coeff[b] * psi[perm[b]].
        """
        dim = 1 << self.n
        basis = np.arange(dim)
        perm = basis ^ self.x
        signs = 1 - 2 * (popcount_array(perm & self.z) & 1)
        coeff = _PHASES[self.phase_pow % 4] * signs.astype(complex)
        return perm, coeff

    def __str__(self) -> str:
        ph = {1 + 0j: "+", -1 + 0j: "-", 1j: "+i", -1j: "-i"}[self.phase]
        return f"{ph}{self.letters}"


def popcount_array(arr: np.ndarray) -> np.ndarray:
    v = np.asarray(arr, dtype=np.uint64)
    out = np.zeros_like(v)
    while v.any():
        out += v & np.uint64(1)
        v = v >> np.uint64(1)
    return out.astype(np.int64)


# Images of single-qubit generators under two-qubit Cliffords, as
# (letters-on-(a,b), ) pairs; conjugation is an automorphism so arbitrary
# words follow by multiplying generator images.
_CLIFFORD_GENERATOR_IMAGES = {
    # control a, target b
    "cnot": {("X", "a"): ("X", "X"), ("Z", "a"): ("Z", "I"),
             ("X", "b"): ("I", "X"), ("Z", "b"): ("Z", "Z")},
    "cz": {("X", "a"): ("X", "Z"), ("Z", "a"): ("Z", "I"),
           ("X", "b"): ("Z", "X"), ("Z", "b"): ("I", "Z")},
}


def conjugate_by_clifford(p: PauliString, kind: str, a: int, b: int) -> PauliString:
    """U^dag P U for a self-inverse two-qubit Clifford U on qubits (a, b).

    ``kind`` is "cnot" (control a, target b) or "cz".
    """
    try:
        images = _CLIFFORD_GENERATOR_IMAGES[kind]
    except KeyError:
        raise ValueError(f"unknown Clifford kind {kind!r}") from None
    out = PauliString(p.n, 0, 0, p.phase_pow)
    for mask_attr, gen in ((p.x, "X"), (p.z, "Z")):
        for q in range(p.n):
            if not (mask_attr >> q) & 1:
                continue
            if q == a or q == b:
                la, lb = images[(gen, "a" if q == a else "b")]
                img = PauliString.single(p.n, a, la) * PauliString.single(p.n, b, lb)
            else:
                img = PauliString.single(p.n, q, gen)
            out = out * img
    return out
