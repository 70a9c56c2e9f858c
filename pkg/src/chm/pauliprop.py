"""Exact construction of C by Heisenberg back-propagation.

The observable is conjugated right-to-left through the circuit.  Rotations
either commute past a node's Pauli or split it into a cos branch and a sin
branch (with i P Q as the new Pauli); Clifford gates relabel deterministically;
encoder gates branch the same way but accumulate trigonometric degree in the
shared input variable x.  Nodes are held in a flat work-list keyed by
(Pauli, monomial signature) so identical branches merge as they appear;
merging only adds scalars and is exactness-preserving.

After propagation, nodes whose Pauli contains an X or Y letter are pruned
(they are traceless against |0...0><0...0|) and the survivors are converted
to characters: each theta factor maps to two harmonics (Euler), each x
monomial cos^p sin^q to a frequency support via repeated convolution of
{-1,+1} supports.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .circuits import Circuit, CliffordGate, EncoderGate, RotationGate, validate
from .cmatrix import CMatrix, HarmonicIndex, K_ZERO, harmonic_sort_key
from .paulis import PauliString, conjugate_by_clifford
from .spectral import FrequencySet

DEFAULT_NODE_BUDGET = 1 << 24

COS, SIN = 0, 1


class ExactPropagationError(ValueError):
    """Circuit is outside the exact engine's domain (shared parameters,
    non-unit multipliers, or node budget exceeded)."""


@dataclass(frozen=True)
class TrigMonomial:
    """Product of cos/sin factors in distinct trainable parameters.

    ``factors`` is a tuple of (param index, COS|SIN) sorted by index; under
    single use each parameter appears at most once (degree <= 1).
    """

    factors: tuple[tuple[int, int], ...] = ()

    def with_factor(self, param: int, kind: int) -> "TrigMonomial":
        if any(p == param for p, _ in self.factors):
            raise ExactPropagationError(
                f"parameter {param} already carries a trigonometric factor "
                "(shared-parameter circuit)"
            )
        return TrigMonomial(tuple(sorted(self.factors + ((param, kind),))))

    @property
    def active_set(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def __len__(self) -> int:
        return len(self.factors)


@dataclass(frozen=True)
class PropNode:
    """One branch of the propagation tree.

    ``scalar`` stays real for Hermitian observables: every anti-commuting
    branch replaces Q by the Hermitian word i P Q, so only signs accumulate.
    ``x_cos`` / ``x_sin`` are the trigonometric degrees in the input variable.
    """

    pauli: PauliString
    scalar: float
    theta: TrigMonomial
    x_cos: int = 0
    x_sin: int = 0

    def key(self):
        return (self.pauli.x, self.pauli.z, self.theta.factors, self.x_cos, self.x_sin)


def conjugate_rotation(q: PauliString, p: PauliString):
    """Two-branch conjugation of Q by exp(-i phi P / 2).

    Returns None if [P, Q] = 0 (node unchanged); otherwise the pair
    (cos branch Q, sin branch i P Q) with the sin branch Hermitian.
    """
    if p.commutes(q):
        return None
    r = (p * q).times_i()
    return q, r


def _apply_rotation_branching(nodes, axis, add_cos, add_sin, budget):
    out: dict = {}

    def push(node: PropNode):
        key = node.key()
        cur = out.get(key)
        if cur is None:
            out[key] = node
        else:
            merged = cur.scalar + node.scalar
            if merged == 0.0:
                del out[key]
            else:
                out[key] = PropNode(cur.pauli, merged, cur.theta, cur.x_cos, cur.x_sin)

    for node in nodes:
        branch = conjugate_rotation(node.pauli, axis)
        if branch is None:
            push(node)
            continue
        _, r = branch
        if not r.is_hermitian():
            raise AssertionError("sin branch lost Hermiticity")
        sign = 1.0 if r.phase == 1 else -1.0
        push(PropNode(node.pauli, node.scalar, *add_cos(node)))
        th, xc, xs, extra = add_sin(node)
        push(PropNode(r.canonical(), sign * node.scalar * extra, th, xc, xs))
    if len(out) > budget:
        raise ExactPropagationError(
            f"node budget exceeded ({len(out)} > {budget}); "
            "use the Monte-Carlo estimator for this circuit"
        )
    return list(out.values())


def backpropagate(
    circuit: Circuit,
    node_budget: int = DEFAULT_NODE_BUDGET,
    prune: bool = True,
) -> list[PropNode]:
    """Propagate the observable right-to-left into separable nodes.

    Requires strict single use with unit-magnitude angle multipliers; the
    decomposed controlled rotations of Circuits 16/17 are rejected with a
    diagnostic naming the offending parameter indices.
    """
    report = validate(circuit)
    if report.shared_params:
        indices = [a for a, _ in report.shared_params]
        raise ExactPropagationError(
            f"exact propagation requires single-use parameters; indices {indices} "
            "appear in more than one rotation (decomposed controlled rotations); "
            "use the Monte-Carlo estimator instead"
        )
    bad_mult = sorted(
        {g.param for g in circuit.rotation_gates() if abs(g.mult) != 1}
    )
    if bad_mult:
        raise ExactPropagationError(
            f"exact propagation requires angle multipliers +-1; parameters "
            f"{bad_mult} use fractional multipliers"
        )

    nodes: dict = {}
    for w, p in circuit.observable:
        sign = p.phase
        if abs(complex(sign).imag) > 0:
            raise ExactPropagationError("observable weights/phases must be real")
        node = PropNode(p.canonical(), float(w) * complex(sign).real, TrigMonomial())
        cur = nodes.get(node.key())
        nodes[node.key()] = node if cur is None else PropNode(
            node.pauli, cur.scalar + node.scalar, node.theta, 0, 0
        )
    work = list(nodes.values())

    for gate in reversed(list(circuit.gates())):
        if isinstance(gate, RotationGate):
            mult = int(gate.mult)
            param = gate.param
            # cos(c t) = cos t and sin(c t) = c sin t for c = +-1
            work = _apply_rotation_branching(
                work,
                gate.axis,
                add_cos=lambda nd: (nd.theta.with_factor(param, COS), nd.x_cos, nd.x_sin),
                add_sin=lambda nd: (nd.theta.with_factor(param, SIN), nd.x_cos, nd.x_sin, float(mult)),
                budget=node_budget,
            )
        elif isinstance(gate, EncoderGate):
            axis = PauliString.single(circuit.n, gate.qubit, gate.axis)
            work = _apply_rotation_branching(
                work,
                axis,
                add_cos=lambda nd: (nd.theta, nd.x_cos + 1, nd.x_sin),
                add_sin=lambda nd: (nd.theta, nd.x_cos, nd.x_sin + 1, 1.0),
                budget=node_budget,
            )
        elif isinstance(gate, CliffordGate):
            relabeled = {}
            for node in work:
                p2 = conjugate_by_clifford(node.pauli, gate.kind, gate.a, gate.b)
                if not p2.is_hermitian():
                    raise AssertionError("Clifford conjugation lost Hermiticity")
                sign = 1.0 if p2.phase == 1 else -1.0
                nd = PropNode(p2.canonical(), sign * node.scalar, node.theta, node.x_cos, node.x_sin)
                cur = relabeled.get(nd.key())
                if cur is None:
                    relabeled[nd.key()] = nd
                else:
                    merged = cur.scalar + nd.scalar
                    if merged == 0.0:
                        del relabeled[nd.key()]
                    else:
                        relabeled[nd.key()] = PropNode(
                            cur.pauli, merged, cur.theta, cur.x_cos, cur.x_sin
                        )
            work = list(relabeled.values())
        else:
            raise TypeError(f"unexpected gate {gate!r}")

    if prune:
        # Tr[P rho] = 0 unless every letter is I or Z
        work = [nd for nd in work if nd.pauli.x == 0]
    return work


def trig_to_characters(monomial: TrigMonomial) -> dict[HarmonicIndex, complex]:
    """Euler expansion: exactly 2^|A| harmonics, one sign choice per factor.

    cos t_r contributes 1/2 at k_r = +-1; sin t_r contributes -i/2 at +1 and
    +i/2 at -1; inactive parameters stay at k_r = 0.
    """
    chars: dict[HarmonicIndex, complex] = {K_ZERO: 1.0 + 0j}
    for param, kind in monomial.factors:
        nxt: dict[HarmonicIndex, complex] = {}
        for k, c in chars.items():
            if kind == COS:
                nxt[k + ((param, 1),)] = c * 0.5
                nxt[k + ((param, -1),)] = c * 0.5
            else:
                nxt[k + ((param, 1),)] = c * -0.5j
                nxt[k + ((param, -1),)] = c * 0.5j
        chars = nxt
    # factors are built sorted by param, so pair tuples stay sorted
    return chars


def x_monomial_characters(cos_deg: int, sin_deg: int) -> dict[int, complex]:
    """Fourier coefficients of cos(x)^p sin(x)^q by repeated convolution."""
    chars: dict[int, complex] = {0: 1.0 + 0j}

    def convolve(base, factor):
        out: dict[int, complex] = {}
        for w1, c1 in base.items():
            for w2, c2 in factor.items():
                w = w1 + w2
                out[w] = out.get(w, 0j) + c1 * c2
        return {w: c for w, c in out.items() if c != 0}

    for _ in range(cos_deg):
        chars = convolve(chars, {1: 0.5 + 0j, -1: 0.5 + 0j})
    for _ in range(sin_deg):
        chars = convolve(chars, {1: -0.5j, -1: 0.5j})
    return chars


def node_k_support(node: PropNode) -> set[HarmonicIndex]:
    return set(trig_to_characters(node.theta).keys())


def exact_C(circuit: Circuit, node_budget: int = DEFAULT_NODE_BUDGET) -> CMatrix:
    """Assemble C_{omega k} = sum_nu d_nu Nhat_nu(omega) Mhat_nu(k).

    Rows cover the circuit's full accessible frequency set; columns cover the
    union of node supports plus the constant k = 0 (always present so the
    centring projector is well defined).
    """
    nodes = backpropagate(circuit, node_budget=node_budget)
    freq = FrequencySet.from_circuit(circuit)
    k_set = {K_ZERO}
    for node in nodes:
        k_set.update(node_k_support(node))
    k_labels = tuple(sorted(k_set, key=harmonic_sort_key))
    k_pos = {k: i for i, k in enumerate(k_labels)}
    w_pos = {w: i for i, w in enumerate(freq.omega)}

    entries = np.zeros((len(freq.omega), len(k_labels)), dtype=complex)
    for node in nodes:
        xh = x_monomial_characters(node.x_cos, node.x_sin)
        th = trig_to_characters(node.theta)
        for omega, cx in xh.items():
            row = w_pos[omega]
            for k, ck in th.items():
                entries[row, k_pos[k]] += node.scalar * cx * ck
    return CMatrix(
        freq.omega,
        k_labels,
        entries,
        circuit.m,
        {"method": "exact", "params": {"node_budget": node_budget}},
    )


@dataclass(frozen=True)
class SupportBound:
    """Branch-counting lower bound on the generated parameter-harmonic support."""

    b_max: int
    lower_bound: int
    s_gen: int


def support_bound(nodes: list[PropNode]) -> SupportBound:
    """b_max = largest active set; generated support is at least 2^b_max."""
    b_max = max((len(node.theta) for node in nodes), default=0)
    union: set[HarmonicIndex] = set()
    for node in nodes:
        union.update(node_k_support(node))
    if not nodes:
        union = {K_ZERO}
    s_gen = len(union)
    bound = 1 << b_max
    assert s_gen >= bound, f"generated support {s_gen} below bound {bound}"
    return SupportBound(b_max, bound, s_gen)
