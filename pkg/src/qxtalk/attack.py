"""Attacker-side circuit fragments and victim/attacker composition.

The attack is a trail of CNOTs on one coupled qubit pair, spread evenly over
the victim's execution window with explicit delays filling the rest.  The
scenario-1 placebo puts unit delays at exactly the positions the CNOTs would
occupy, so attack-free and attack-present runs have identical time supports.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import DurationTable, Gate, ScheduledCircuit, TimedInstruction
from .errors import CircuitError, CompositionError, WindowError
from .topology import Layout

__all__ = ["AttackSpec", "build_attack_trail", "build_placebo", "compose"]

_PREP_GATE = {"0": None, "1": Gate.X, "+": Gate.H}


@dataclass(frozen=True)
class AttackSpec:
    """CNOT-trail parameters: count, control preparation, and target pair."""

    n_cnot: int
    control_init: str
    pair: tuple[int, int]
    target_init: str = "0"

    def __post_init__(self) -> None:
        if self.n_cnot < 0:
            raise CircuitError("n_cnot must be >= 0")
        if self.control_init not in _PREP_GATE:
            raise CircuitError(f"control_init must be one of 0/1/+, got {self.control_init!r}")
        if self.target_init != "0":
            raise CircuitError("target_init is fixed to |0>")
        c, t = self.pair
        if c == t:
            raise CircuitError("attack pair must be two distinct qubits")


def _trail_starts(prep_end: float, total: float, count: int, cx_dur: float) -> list[float]:
    """Start times placing CX i's center at prep_end + usable*(2i+1)/(2*count).

    Written in slack form (slack spread around and between the pulses) so the
    spans stay ordered and disjoint even at exact fit.
    """
    slack = (total - prep_end) - count * cx_dur
    return [prep_end + slack * (2 * i + 1) / (2 * count) + i * cx_dur for i in range(count)]


def _fill_delays(
    qubit: int, spans: list[tuple[float, float]], total: float
) -> list[TimedInstruction]:
    """Explicit delays covering every gap of [0, total] not in ``spans``."""
    out = []
    cursor = 0.0
    for start, end in sorted(spans):
        if start > cursor:
            out.append(TimedInstruction(Gate.DELAY, (qubit,), cursor, start - cursor,
                                        param=start - cursor))
        cursor = max(cursor, end)
    if total > cursor:
        out.append(TimedInstruction(Gate.DELAY, (qubit,), cursor, total - cursor,
                                    param=total - cursor))
    return out


def _trail(
    spec: AttackSpec,
    total_duration: float,
    durations: DurationTable,
    placebo: bool,
) -> ScheduledCircuit:
    control, target = spec.pair
    cx_dur = durations.gate_ns[Gate.CX]
    timed: list[TimedInstruction] = []

    prep_end = 0.0
    if not placebo and _PREP_GATE[spec.control_init] is not None:
        gate = _PREP_GATE[spec.control_init]
        dur = durations.gate_ns[gate]
        timed.append(TimedInstruction(gate, (control,), 0.0, dur))
        prep_end = dur

    usable = total_duration - prep_end
    if usable < spec.n_cnot * cx_dur:
        raise WindowError(
            f"window too short: {total_duration} ns cannot hold {spec.n_cnot} CX "
            f"of {cx_dur} ns after {prep_end} ns of preparation"
        )

    spans = []
    if spec.n_cnot:
        for start in _trail_starts(prep_end, total_duration, spec.n_cnot, cx_dur):
            spans.append((start, start + cx_dur))
            if placebo:
                timed.append(TimedInstruction(Gate.DELAY, (control,), start, cx_dur,
                                              param=cx_dur))
                timed.append(TimedInstruction(Gate.DELAY, (target,), start, cx_dur,
                                              param=cx_dur))
            else:
                timed.append(TimedInstruction(Gate.CX, (control, target), start, cx_dur))

    control_spans = list(spans)
    if prep_end:
        control_spans.insert(0, (0.0, prep_end))
    timed.extend(_fill_delays(control, control_spans, total_duration))
    timed.extend(_fill_delays(target, spans, total_duration))

    timed.sort(key=lambda ti: ti.start)
    return ScheduledCircuit(max(spec.pair) + 1, tuple(timed))


def build_attack_trail(
    spec: AttackSpec, total_duration: float, durations: DurationTable | None = None
) -> ScheduledCircuit:
    """State prep at t=0, then n_cnot CXs centered at
    prep_end + usable*(2i+1)/(2*n_cnot), with delays filling the window."""
    return _trail(spec, total_duration, durations or DurationTable(), placebo=False)


def build_placebo(
    spec: AttackSpec, total_duration: float, durations: DurationTable | None = None
) -> ScheduledCircuit:
    """Scenario-1 stand-in: unit delays at the centers the CX trail would
    occupy, no state preparation.  A logical and physical no-op."""
    return _trail(spec, total_duration, durations or DurationTable(), placebo=True)


def compose(
    victim: ScheduledCircuit,
    fragments: list[ScheduledCircuit],
    layout: Layout,
) -> ScheduledCircuit:
    """Merge the victim (relabeled onto ``layout.victim``) with attacker
    fragments already expressed in global qubit indices."""
    if victim.num_qubits != len(layout.victim):
        raise CompositionError(
            f"victim has {victim.num_qubits} qubits but layout places {len(layout.victim)}"
        )
    remap = dict(enumerate(layout.victim))
    merged: list[TimedInstruction] = [
        TimedInstruction(
            ti.gate, tuple(remap[q] for q in ti.qubits), ti.start, ti.duration,
            ti.param, ti.cbit, ti.tag,
        )
        for ti in victim.timed
    ]
    used: set[int] = set(layout.victim)
    for frag in fragments:
        frag_qubits = {q for ti in frag.timed for q in ti.qubits}
        collision = used & frag_qubits
        if collision:
            raise CompositionError(f"qubit collision on {sorted(collision)}")
        used |= frag_qubits
        merged.extend(frag.timed)
    merged.sort(key=lambda ti: ti.start)
    num_qubits = max((q for ti in merged for q in ti.qubits), default=-1) + 1
    return ScheduledCircuit(num_qubits, tuple(merged), victim.classical_bits)
