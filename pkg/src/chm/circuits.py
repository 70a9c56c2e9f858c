"""Layered IR for re-uploading circuits, benchmark families, validation, JSON IO.

A circuit is a sequence of layers, each an encoder block (one single-qubit
phase gate per qubit, common axis, angle = the input x) followed by a
trainable block of Pauli rotations and Clifford gates.  Controlled rotations
are stored pre-decomposed into two half-angle Pauli-string rotations sharing
one parameter index:

    CR_P(theta)[c -> t] = R_{P_t}(theta/2) * R_{Z_c P_t}(-theta/2)

which reproduces the controlled unitary exactly (the two exponents commute)
and keeps the gate set uniform.  All rotations use R_P(phi) = exp(-i phi P/2).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Union

from .paulis import PauliString

CIRCUIT_FORMAT_VERSION = 1

FAMILIES = ("yzy-noent", "yzy-ent", "circuit16", "circuit17")
ENTANGLING_FAMILIES = ("yzy-ent", "circuit16", "circuit17")


@dataclass(frozen=True)
class EncoderGate:
    """R_axis(x) on one qubit; carries the input variable, no parameter."""

    axis: str  # X, Y or Z
    qubit: int


@dataclass(frozen=True)
class RotationGate:
    """exp(-i * mult * theta[param] * axis / 2) on the axis' support qubits."""

    axis: PauliString
    param: int
    mult: Fraction = Fraction(1)

    def __post_init__(self):
        if self.axis.phase != 1:
            raise ValueError("rotation axis must have phase +1")
        if self.axis.weight == 0:
            raise ValueError("rotation axis must be non-identity")


@dataclass(frozen=True)
class CliffordGate:
    kind: str  # "cnot" (control a, target b) or "cz"
    a: int
    b: int


Gate = Union[RotationGate, CliffordGate]


@dataclass(frozen=True)
class Layer:
    encoder: tuple[EncoderGate, ...]
    trainable: tuple[Gate, ...]


@dataclass(frozen=True)
class Circuit:
    """Immutable re-uploading circuit over n qubits with m trainable parameters.

    The observable is a real-weighted Pauli sum; the input state is fixed to
    |0...0>.  Gates apply in layer order, encoder block first.
    """

    n: int
    layers: tuple[Layer, ...]
    m: int
    observable: tuple[tuple[float, PauliString], ...]

    @property
    def L(self) -> int:
        return len(self.layers)

    def gates(self) -> Iterator[Union[EncoderGate, Gate]]:
        for layer in self.layers:
            yield from layer.encoder
            yield from layer.trainable

    def rotation_gates(self) -> list[RotationGate]:
        return [g for g in self.gates() if isinstance(g, RotationGate)]

    def omega_max(self) -> int:
        """Band limit n*L for one common-axis encoder gate per qubit per layer."""
        return sum(len(layer.encoder) for layer in self.layers)


@dataclass(frozen=True)
class ValidationReport:
    """Assumption violations; empty report for the two YZY families."""

    shared_params: tuple[tuple[int, int], ...] = ()  # (param index, use count)
    unused_params: tuple[int, ...] = ()
    mixed_axis_layers: tuple[int, ...] = ()
    nonreal_weights: tuple[int, ...] = ()
    incomplete_encoder_layers: tuple[int, ...] = ()

    @property
    def is_clean(self) -> bool:
        return not (
            self.shared_params
            or self.unused_params
            or self.mixed_axis_layers
            or self.nonreal_weights
            or self.incomplete_encoder_layers
        )

    def summary(self) -> str:
        if self.is_clean:
            return "clean"
        parts = []
        if self.shared_params:
            parts.append(
                "shared parameter indices: "
                + ", ".join(f"{a} (x{c})" for a, c in self.shared_params)
            )
        if self.unused_params:
            parts.append(f"unused parameter indices: {list(self.unused_params)}")
        if self.mixed_axis_layers:
            parts.append(f"mixed encoder axes in layers: {list(self.mixed_axis_layers)}")
        if self.nonreal_weights:
            parts.append(f"non-real observable weights at terms: {list(self.nonreal_weights)}")
        if self.incomplete_encoder_layers:
            parts.append(
                f"layers without one encoder gate per qubit: {list(self.incomplete_encoder_layers)}"
            )
        return "; ".join(parts)


def validate(circuit: Circuit) -> ValidationReport:
    """Report-only check of the single-use and commuting-encoder assumptions."""
    counts: dict[int, int] = {}
    for gate in circuit.gates():
        if isinstance(gate, RotationGate):
            counts[gate.param] = counts.get(gate.param, 0) + 1
    shared = tuple(sorted((a, c) for a, c in counts.items() if c > 1))
    unused = tuple(a for a in range(circuit.m) if a not in counts)
    mixed = []
    incomplete = []
    for i, layer in enumerate(circuit.layers):
        axes = {g.axis for g in layer.encoder}
        if len(axes) > 1:
            mixed.append(i)
        qubits = sorted(g.qubit for g in layer.encoder)
        if qubits != list(range(circuit.n)):
            incomplete.append(i)
    nonreal = tuple(
        i for i, (w, _) in enumerate(circuit.observable) if abs(complex(w).imag) > 0
    )
    return ValidationReport(shared, unused, tuple(mixed), nonreal, tuple(incomplete))


def mean_magnetisation(n: int) -> tuple[tuple[float, PauliString], ...]:
    return tuple((1.0 / n, PauliString.single(n, q, "Z")) for q in range(n))


def controlled_ladder_pairs(n: int) -> list[tuple[int, int]]:
    """(control, target) order of the Circuit-16/17 controlled-rotation ladder.

    Two bricks per depth unit: controls 2q+1 -> targets 2q, then controls
    2q+2 -> targets 2q+1, following the circuit catalogue of Sim et al.
    (arXiv:1905.10876) that names these ansatz patterns.  Build a custom
    circuit from the IR directly if a different pairing is wanted.
    """
    pairs = [(2 * q + 1, 2 * q) for q in range(n // 2)]
    pairs += [(2 * q + 2, 2 * q + 1) for q in range((n - 1) // 2)]
    return pairs


def _controlled_rotation(n: int, axis: str, control: int, target: int, param: int) -> list[RotationGate]:
    p_t = PauliString.single(n, target, axis)
    zp = PauliString.single(n, control, "Z") * p_t
    return [
        RotationGate(p_t, param, Fraction(1, 2)),
        RotationGate(zp.canonical(), param, Fraction(-1, 2)),
    ]


def build_family(family: str, encoder_axis: str, n: int, L: int, d: int) -> Circuit:
    """Construct one of the four benchmark circuit families.

    Per layer: one encoder gate per qubit, then d repetitions of the ansatz
    pattern.  Parameter count is 3*n*d*L for the YZY families and
    (3n-1)*d*L for Circuits 16/17 (Sim et al. numbering).
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {FAMILIES}")
    encoder_axis = encoder_axis.upper()
    if encoder_axis not in ("X", "Y", "Z"):
        raise ValueError(f"invalid encoder axis {encoder_axis!r}")
    if n < 1 or L < 1 or d < 1:
        raise ValueError("n, L and d must all be >= 1")
    if family in ENTANGLING_FAMILIES and n < 2:
        raise ValueError(f"{family} needs n >= 2")

    layers = []
    param = 0
    for _ in range(L):
        encoder = tuple(EncoderGate(encoder_axis, q) for q in range(n))
        trainable: list[Gate] = []
        for _ in range(d):
            if family in ("yzy-noent", "yzy-ent"):
                base = param
                for col, axis in enumerate("YZY"):
                    for q in range(n):
                        trainable.append(
                            RotationGate(PauliString.single(n, q, axis), base + 3 * q + col)
                        )
                param += 3 * n
                if family == "yzy-ent":
                    for c in range(n - 1):
                        for t in range(c + 1, n):
                            trainable.append(CliffordGate("cnot", c, t))
            else:
                base = param
                for col, axis in enumerate("XZ"):
                    for q in range(n):
                        trainable.append(
                            RotationGate(PauliString.single(n, q, axis), base + 2 * q + col)
                        )
                param += 2 * n
                ctrl_axis = "Z" if family == "circuit16" else "X"
                for c, t in controlled_ladder_pairs(n):
                    trainable.extend(_controlled_rotation(n, ctrl_axis, c, t, param))
                    param += 1
        layers.append(Layer(encoder, tuple(trainable)))
    return Circuit(n, tuple(layers), param, mean_magnetisation(n))


# --- on-disk format -------------------------------------------------------


def to_json_dict(circuit: Circuit) -> dict:
    layers = []
    for layer in circuit.layers:
        enc = [{"axis": g.axis.lower(), "qubit": g.qubit} for g in layer.encoder]
        tr = []
        for g in layer.trainable:
            if isinstance(g, RotationGate):
                qubits = [q for q in range(circuit.n) if g.axis.letters[q] != "I"]
                tr.append(
                    {
                        "type": "rot",
                        "axis": "".join(g.axis.letters[q] for q in qubits).lower(),
                        "qubits": qubits,
                        "param": g.param,
                        "mult": str(g.mult),
                    }
                )
            elif g.kind == "cnot":
                tr.append({"type": "cnot", "control": g.a, "target": g.b})
            else:
                tr.append({"type": g.kind, "a": g.a, "b": g.b})
        layers.append({"encoder": enc, "trainable": tr})
    return {
        "version": CIRCUIT_FORMAT_VERSION,
        "n": circuit.n,
        "L": circuit.L,
        "m": circuit.m,
        "layers": layers,
        "observable": [
            {"weight": w, "pauli": p.letters} for w, p in circuit.observable
        ],
    }


def from_json_dict(doc: dict) -> Circuit:
    if doc.get("version") != CIRCUIT_FORMAT_VERSION:
        raise ValueError(f"unsupported circuit format version {doc.get('version')!r}")
    n = doc["n"]
    layers = []
    for layer_doc in doc["layers"]:
        enc = tuple(
            EncoderGate(g["axis"].upper(), g["qubit"]) for g in layer_doc["encoder"]
        )
        tr: list[Gate] = []
        for g in layer_doc["trainable"]:
            if g["type"] == "rot":
                letters = ["I"] * n
                for letter, q in zip(g["axis"].upper(), g["qubits"]):
                    letters[q] = letter
                tr.append(
                    RotationGate(
                        PauliString.from_letters("".join(letters)),
                        g["param"],
                        Fraction(g["mult"]),
                    )
                )
            elif g["type"] == "cnot":
                tr.append(CliffordGate("cnot", g["control"], g["target"]))
            elif g["type"] == "cz":
                tr.append(CliffordGate("cz", g["a"], g["b"]))
            else:
                raise ValueError(f"unknown gate type {g['type']!r}")
        layers.append(Layer(enc, tuple(tr)))
    obs = tuple(
        (float(t["weight"]), PauliString.from_letters(t["pauli"]))
        for t in doc["observable"]
    )
    return Circuit(n, tuple(layers), doc["m"], obs)


def dump_json(circuit: Circuit) -> str:
    return json.dumps(to_json_dict(circuit), indent=2, sort_keys=True)


def load_json(text: str) -> Circuit:
    return from_json_dict(json.loads(text))
