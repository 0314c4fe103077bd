"""Victim-circuit construction: n-qubit Grover search with a marked bitstring.

Two independent views of the same algorithm live here.  ``build_grover``
produces the gate-level circuit (H prelude, k oracle+diffusion rounds,
synchronized terminal measurement).  ``ideal_distribution`` is the closed
form: p(marked) = sin^2((2k+1) * asin(2^(-n/2))) with the remainder spread
uniformly.  Tests hold the two against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .circuit import Circuit, Gate, Instruction
from .errors import CircuitError

__all__ = ["GroverSpec", "build_grover", "ideal_distribution"]


@dataclass(frozen=True)
class GroverSpec:
    """Search over n qubits for ``marked``, with k Grover iterations."""

    n: int
    marked: str
    iterations: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise CircuitError("need at least one qubit")
        if len(self.marked) != self.n or set(self.marked) - {"0", "1"}:
            raise CircuitError(f"marked must be a length-{self.n} bitstring, got {self.marked!r}")
        if self.iterations < 0:
            raise CircuitError("iterations must be >= 0")


def _ccz(a: int, b: int, c: int) -> list[Instruction]:
    """Standard 6-CX controlled-controlled-Z in the {CX, T, Tdg} basis."""
    i = Instruction
    return [
        i(Gate.CX, (b, c)),
        i(Gate.TDG, (c,)),
        i(Gate.CX, (a, c)),
        i(Gate.T, (c,)),
        i(Gate.CX, (b, c)),
        i(Gate.TDG, (c,)),
        i(Gate.CX, (a, c)),
        i(Gate.T, (b,)),
        i(Gate.T, (c,)),
        i(Gate.CX, (a, b)),
        i(Gate.T, (a,)),
        i(Gate.TDG, (b,)),
        i(Gate.CX, (a, b)),
    ]


def _multi_controlled_z(qubits: tuple[int, ...]) -> list[Instruction]:
    """Phase -1 on |1...1> of ``qubits``, up to global phase.

    n=1,2,3 use Z / H-CX-H / the T-ladder CCZ.  Larger sets expand the
    projector over qubit-subset parities: exp(i*pi*(-1)^|S| Z_S / 2^n) per
    non-empty subset S, realized as a CX parity chain around one RZ.
    """
    n = len(qubits)
    if n == 1:
        return [Instruction(Gate.Z, qubits)]
    if n == 2:
        c, t = qubits
        return [
            Instruction(Gate.H, (t,)),
            Instruction(Gate.CX, (c, t)),
            Instruction(Gate.H, (t,)),
        ]
    if n == 3:
        return _ccz(*qubits)
    out: list[Instruction] = []
    for size in range(1, n + 1):
        angle = math.pi * (-1) ** (size + 1) / 2 ** (n - 1)  # rz angle = -2 * alpha_S
        for subset in combinations(qubits, size):
            chain = list(subset)
            for u, v in zip(chain, chain[1:]):
                out.append(Instruction(Gate.CX, (u, v)))
            out.append(Instruction(Gate.RZ, (chain[-1],), param=angle))
            for u, v in reversed(list(zip(chain, chain[1:]))):
                out.append(Instruction(Gate.CX, (u, v)))
    return out


def build_grover(spec: GroverSpec) -> Circuit:
    """Gate-level Grover circuit with terminal measurement on every qubit.

    A barrier aligns all qubits before measurement so the victims' measures
    start simultaneously; the preceding idle time is real and paddable.
    """
    if spec.n > 8:
        raise CircuitError("desk-scale cap: n <= 8")
    qubits = tuple(range(spec.n))
    zeros = tuple(q for q in qubits if spec.marked[q] == "0")
    instrs: list[Instruction] = [Instruction(Gate.H, (q,)) for q in qubits]
    for _ in range(spec.iterations):
        # Marking oracle: flip the zero bits so |marked> maps onto |1...1>.
        instrs.extend(Instruction(Gate.X, (q,)) for q in zeros)
        instrs.extend(_multi_controlled_z(qubits))
        instrs.extend(Instruction(Gate.X, (q,)) for q in zeros)
        # Diffusion about the uniform state.
        instrs.extend(Instruction(Gate.H, (q,)) for q in qubits)
        instrs.extend(Instruction(Gate.X, (q,)) for q in qubits)
        instrs.extend(_multi_controlled_z(qubits))
        instrs.extend(Instruction(Gate.X, (q,)) for q in qubits)
        instrs.extend(Instruction(Gate.H, (q,)) for q in qubits)
    instrs.append(Instruction(Gate.BARRIER, qubits))
    instrs.extend(Instruction(Gate.MEASURE, (q,), cbit=q) for q in qubits)
    return Circuit(spec.n, tuple(instrs), classical_bits=spec.n)


def ideal_distribution(spec: GroverSpec) -> np.ndarray:
    """Noiseless outcome probabilities over all 2^n bitstrings.

    Index convention: outcome string s maps to int(s, 2) with qubit 0 as the
    leftmost (most significant) character.
    """
    dim = 2**spec.n
    theta = math.asin(2 ** (-spec.n / 2))
    p_marked = math.sin((2 * spec.iterations + 1) * theta) ** 2
    probs = np.full(dim, (1.0 - p_marked) / (dim - 1) if dim > 1 else 0.0)
    probs[int(spec.marked, 2)] = p_marked
    total = probs.sum()
    if abs(total - 1.0) > 1e-12:
        raise CircuitError(f"distribution does not normalize: sum={total!r}")
    return probs
