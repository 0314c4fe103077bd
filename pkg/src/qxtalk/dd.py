"""Dynamical-decoupling padding and the buffer-zone layout transform.

``pad_dd`` fills idle windows on selected qubits with a Pauli pulse train
whose product is the identity up to global phase.  The symmetric spacing
rule (half gaps at the window edges) makes the train cancel any phase
accumulated from static Z or ZZ terms over the window, sign-flipping it at
every pulse; with pulses applied at the end of their own interval the
cancellation is exact even for finite pulse durations.

``apply_buffer`` swaps a layout for its buffered variant, pushing every
attacker qubit to graph distance >= 2 behind idle buffer qubits.

``refocusing_check`` is the analytic two-qubit validation utility: protected
qubit in |+>, spectator in |1>, H = pi * nu * Z(x)Z, ideal zero-duration
pulses at the pad_dd positions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import (
    DurationTable,
    Gate,
    ScheduledCircuit,
    TimedInstruction,
    _boundary_pairs,
)
from .errors import CircuitError, TopologyError
from .topology import CouplingMap, Layout, layout_preset

__all__ = ["DDSequence", "XX", "XYXY", "sequence_by_name", "pad_dd", "apply_buffer",
           "refocusing_check"]


@dataclass(frozen=True)
class DDSequence:
    """An ordered train of X/Y pulses composing to identity up to phase."""

    name: str
    pulses: tuple[Gate, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pulses", tuple(self.pulses))
        if not self.pulses:
            raise CircuitError("a DD sequence needs at least one pulse")
        if any(p not in (Gate.X, Gate.Y) for p in self.pulses):
            raise CircuitError("DD pulses must be X or Y (must anticommute with Z)")
        # X and Y each appear an even number of times iff the product is +-I.
        if sum(p is Gate.X for p in self.pulses) % 2 or sum(p is Gate.Y for p in self.pulses) % 2:
            raise CircuitError(
                f"pulse product of {self.name!r} is not the identity up to global phase"
            )


XX = DDSequence("xx", (Gate.X, Gate.X))
XYXY = DDSequence("xyxy", (Gate.X, Gate.Y, Gate.X, Gate.Y))

_NAMED = {"xx": XX, "xyxy": XYXY}


def sequence_by_name(name: str) -> DDSequence:
    """Look up "xx"/"xyxy", or build a custom train from "x,y,x,y" syntax."""
    key = name.strip().lower()
    if key in _NAMED:
        return _NAMED[key]
    if "," in key:
        gates = []
        for tok in key.split(","):
            tok = tok.strip()
            if tok not in ("x", "y"):
                raise CircuitError(f"unknown DD pulse {tok!r} (expected x or y)")
            gates.append(Gate.X if tok == "x" else Gate.Y)
        return DDSequence(key, tuple(gates))
    raise CircuitError(f"unknown DD sequence {name!r}")


def _window_offsets(width: float, durations: list[float], m: int) -> list[float] | None:
    """Pulse start offsets within a window, or None if the window is too short.

    slack = width - sum(durations) splits into m+1 gaps: half gaps at both
    ends, full gaps between pulses; integer-ns flooring pushes any rounding
    residue into the final gap.
    """
    total = sum(durations)
    if width < total:
        return None
    slack = width - total
    edge = math.floor(slack / (2 * m))
    interior = math.floor(slack / m)
    offsets = []
    cursor = float(edge)
    for j, dur in enumerate(durations):
        offsets.append(cursor)
        cursor += dur + (interior if j < m - 1 else 0.0)
    return offsets


def pad_dd(
    sched: ScheduledCircuit,
    qubits: set[int] | tuple[int, ...],
    seq: DDSequence,
    durations: DurationTable | None = None,
) -> ScheduledCircuit:
    """Insert ``seq`` into every idle window of the listed qubits.

    Windows shorter than the pulse train are skipped, not errors.  Windows
    bounded by previously inserted pulses are not treated as idle, which
    makes the pass idempotent on its own output.  The padded circuit acts
    identically to the original up to global phase.
    """
    durations = durations or DurationTable()
    pulse_durs = [durations.gate_ns[p] for p in seq.pulses]
    m = len(seq.pulses)
    added: list[TimedInstruction] = []
    for q in sorted(set(qubits)):
        if q >= sched.num_qubits:
            raise CircuitError(f"qubit {q} out of range (num_qubits={sched.num_qubits})")
        for w0, w1, left, right in _boundary_pairs(sched, q):
            if left.tag == "dd" or right.tag == "dd":
                continue
            offsets = _window_offsets(w1 - w0, pulse_durs, m)
            if offsets is None:
                continue
            for pulse, off, dur in zip(seq.pulses, offsets, pulse_durs):
                added.append(TimedInstruction(pulse, (q,), w0 + off, dur, tag="dd"))
    if not added:
        return sched
    merged = sorted([*sched.timed, *added], key=lambda ti: ti.start)
    return ScheduledCircuit(sched.num_qubits, tuple(merged), sched.classical_bits)


def apply_buffer(layout: Layout, cmap: CouplingMap) -> Layout:
    """Relocate attacker pairs behind idle buffer qubits (distance >= 2).

    Idempotent on already-buffered layouts.  Victim qubits never move.
    """
    if layout.buffer:
        layout.validate(cmap)  # already buffered; nothing to do
        return layout
    try:
        _, buffered = layout_preset(layout.name, buffered=True)
    except TopologyError as exc:
        raise TopologyError(
            f"no valid relocation on the given map for layout {layout.name!r}"
        ) from exc
    if buffered.victim != layout.victim:
        raise TopologyError("buffered preset moves victim qubits; refusing")
    try:
        buffered.validate(cmap)
    except TopologyError as exc:
        raise TopologyError(
            f"no valid relocation on the given map for layout {layout.name!r}: {exc}"
        ) from exc
    return buffered


_SIGN_ZZ = np.array([1.0, -1.0, -1.0, 1.0])  # Z(x)Z eigenvalues on |q_prot q_spec>
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)


def refocusing_check(nu_hz: float, window_ns: float, seq: DDSequence | None) -> float:
    """Return-to-|+> fidelity of the protected qubit after ``window_ns``.

    Evolution under H = pi*nu*Z(x)Z with the spectator in |1>; ideal
    instantaneous pulses at the pad_dd positions (half gap, full gaps, half
    gap).  Without DD this is cos^2(pi * nu * T).
    """
    psi = np.kron(np.array([1, 1], dtype=complex) / math.sqrt(2), np.array([0, 1], complex))
    times = []
    if seq is not None:
        m = len(seq.pulses)
        times = [(window_ns * (2 * j + 1) / (2 * m), seq.pulses[j]) for j in range(m)]
    cursor = 0.0
    for t, pulse in [*times, (window_ns, None)]:
        phase = math.pi * nu_hz * (t - cursor) * 1e-9
        psi = psi * np.exp(-1j * phase * _SIGN_ZZ)
        if pulse is not None:
            mat = _X if pulse is Gate.X else _Y
            psi = (np.kron(mat, np.eye(2)) @ psi.reshape(4)).reshape(4)
        cursor = t
    plus = np.array([1, 1], dtype=complex) / math.sqrt(2)
    overlaps = plus.conj() @ psi.reshape(2, 2)  # amplitude per spectator branch
    return float(np.sum(np.abs(overlaps) ** 2))
