"""Gate-level circuit IR and the ASAP instruction scheduler.

The representation is deliberately small: a fixed gate alphabet, an
immutable instruction list, and a time-stamped schedule derived from a
per-gate duration table.  Times are nanoseconds.  All types are frozen and
safe to share across threads; every operation here is a pure function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import CircuitError, ScheduleError

__all__ = [
    "Gate",
    "Instruction",
    "Circuit",
    "DurationTable",
    "TimedInstruction",
    "ScheduledCircuit",
    "schedule",
    "idle_windows",
    "unschedule",
    "SINGLE_QUBIT_GATES",
    "NON_DIAGONAL_GATES",
    "DIAGONAL_GATES",
]


class Gate(Enum):
    """Gate alphabet. Values are the text-format mnemonics."""

    H = "h"
    X = "x"
    Y = "y"
    Z = "z"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    SX = "sx"
    RZ = "rz"        # carries an angle in radians; zero duration (virtual)
    CX = "cx"        # the only two-qubit gate
    DELAY = "delay"  # carries its duration in ns
    MEASURE = "measure"
    BARRIER = "barrier"


SINGLE_QUBIT_GATES = frozenset(
    {Gate.H, Gate.X, Gate.Y, Gate.Z, Gate.S, Gate.SDG, Gate.T, Gate.TDG, Gate.SX, Gate.RZ}
)
# Gates whose unitary is not diagonal in the computational basis.
NON_DIAGONAL_GATES = frozenset({Gate.H, Gate.X, Gate.Y, Gate.SX, Gate.CX})
DIAGONAL_GATES = frozenset({Gate.Z, Gate.S, Gate.SDG, Gate.T, Gate.TDG, Gate.RZ})


def _check_instruction(gate: Gate, qubits: tuple[int, ...], param, cbit) -> None:
    if len(set(qubits)) != len(qubits):
        raise CircuitError(f"{gate.value}: duplicate qubit in one instruction: {qubits}")
    if any(q < 0 for q in qubits):
        raise CircuitError(f"{gate.value}: negative qubit index in {qubits}")
    if gate is Gate.CX:
        if len(qubits) != 2:
            raise CircuitError(f"cx expects 2 qubits, got {qubits}")
    elif gate is Gate.BARRIER:
        if not qubits:
            raise CircuitError("barrier expects at least one qubit")
    elif len(qubits) != 1:
        raise CircuitError(f"{gate.value} expects 1 qubit, got {qubits}")
    if gate is Gate.RZ:
        if param is None or not math.isfinite(param):
            raise CircuitError(f"rz requires a finite angle, got {param!r}")
    elif gate is Gate.DELAY:
        if param is None or param < 0:
            raise CircuitError(f"delay requires a non-negative duration, got {param!r}")
    elif param is not None:
        raise CircuitError(f"{gate.value} takes no parameter")
    if gate is Gate.MEASURE:
        if cbit is None or cbit < 0:
            raise CircuitError("measure requires a classical bit target")
    elif cbit is not None:
        raise CircuitError(f"{gate.value} takes no classical bit")


@dataclass(frozen=True)
class Instruction:
    """One gate application: kind, qubit operands, optional parameter.

    ``param`` holds the RZ angle (radians) or the delay duration (ns);
    ``cbit`` is the classical target of a measure.
    """

    gate: Gate
    qubits: tuple[int, ...]
    param: float | None = None
    cbit: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        _check_instruction(self.gate, self.qubits, self.param, self.cbit)


@dataclass(frozen=True)
class Circuit:
    """An ordered instruction list on ``num_qubits`` qubits."""

    num_qubits: int
    instructions: tuple[Instruction, ...] = ()
    classical_bits: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "instructions", tuple(self.instructions))
        if self.num_qubits < 0 or self.classical_bits < 0:
            raise CircuitError("register sizes must be non-negative")
        for instr in self.instructions:
            if any(q >= self.num_qubits for q in instr.qubits):
                raise CircuitError(
                    f"{instr.gate.value}: qubit index out of range "
                    f"{instr.qubits} (num_qubits={self.num_qubits})"
                )
            if instr.cbit is not None and instr.cbit >= self.classical_bits:
                raise CircuitError(
                    f"measure: classical bit {instr.cbit} out of range "
                    f"(classical_bits={self.classical_bits})"
                )


_DEFAULT_SINGLE_NS = 60.0
_DEFAULT_DURATIONS: dict[Gate, float] = {
    **{g: _DEFAULT_SINGLE_NS for g in SINGLE_QUBIT_GATES},
    Gate.RZ: 0.0,
    Gate.CX: 660.0,
    Gate.MEASURE: 1400.0,
    Gate.BARRIER: 0.0,
}


@dataclass(frozen=True)
class DurationTable:
    """Gate durations in ns. Delay durations come from the instruction itself."""

    gate_ns: Mapping[Gate, float] = field(default_factory=lambda: dict(_DEFAULT_DURATIONS))

    def __post_init__(self) -> None:
        table = dict(self.gate_ns)
        for gate, dur in table.items():
            if dur < 0:
                raise ScheduleError(f"negative duration for {gate.value}: {dur}")
        object.__setattr__(self, "gate_ns", MappingProxyType(table))

    @classmethod
    def default(cls, **overrides: float) -> "DurationTable":
        table = dict(_DEFAULT_DURATIONS)
        for name, dur in overrides.items():
            table[Gate[name.upper()]] = float(dur)
        return cls(table)

    def duration_of(self, instr: Instruction) -> float:
        if instr.gate is Gate.DELAY:
            return float(instr.param)
        try:
            return float(self.gate_ns[instr.gate])
        except KeyError:
            raise ScheduleError(f"missing duration entry for gate {instr.gate.value!r}") from None


@dataclass(frozen=True)
class TimedInstruction:
    """An instruction placed on the time axis. ``tag`` marks provenance
    (currently only "dd" for inserted decoupling pulses)."""

    gate: Gate
    qubits: tuple[int, ...]
    start: float
    duration: float
    param: float | None = None
    cbit: int | None = None
    tag: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", tuple(self.qubits))
        _check_instruction(self.gate, self.qubits, self.param, self.cbit)
        if self.start < 0 or self.duration < 0:
            raise CircuitError(
                f"{self.gate.value}: start and duration must be non-negative "
                f"(start={self.start}, duration={self.duration})"
            )

    @property
    def end(self) -> float:
        return self.start + self.duration


@dataclass(frozen=True)
class ScheduledCircuit:
    """Time-stamped instructions, sorted by start, with no overlap on any qubit."""

    num_qubits: int
    timed: tuple[TimedInstruction, ...] = ()
    classical_bits: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "timed", tuple(self.timed))
        last_start = 0.0
        busy: dict[int, float] = {}
        for ti in self.timed:
            if any(q >= self.num_qubits for q in ti.qubits):
                raise CircuitError(
                    f"{ti.gate.value}: qubit index out of range {ti.qubits} "
                    f"(num_qubits={self.num_qubits})"
                )
            if ti.start < last_start:
                raise CircuitError("timed instructions must be sorted by start")
            last_start = ti.start
            for q in ti.qubits:
                if ti.start < busy.get(q, 0.0):
                    raise CircuitError(
                        f"overlapping instructions on qubit {q} at t={ti.start}"
                    )
                busy[q] = max(busy.get(q, 0.0), ti.end)

    @property
    def total_duration(self) -> float:
        return max((ti.end for ti in self.timed), default=0.0)

    def on_qubit(self, q: int) -> list[TimedInstruction]:
        return [ti for ti in self.timed if q in ti.qubits]


def schedule(circuit: Circuit, durations: DurationTable | None = None) -> ScheduledCircuit:
    """ASAP-schedule ``circuit``: every instruction starts at the latest end
    time of earlier instructions touching any of its qubits.  Barriers are
    zero-duration and synchronize all their qubits."""
    durations = durations or DurationTable()
    frontier: dict[int, float] = {}
    timed: list[TimedInstruction] = []
    for instr in circuit.instructions:
        dur = durations.duration_of(instr)
        start = max((frontier.get(q, 0.0) for q in instr.qubits), default=0.0)
        for q in instr.qubits:
            frontier[q] = start + dur
        timed.append(
            TimedInstruction(instr.gate, instr.qubits, start, dur, instr.param, instr.cbit)
        )
    timed.sort(key=lambda ti: ti.start)  # stable: source order preserved within ties
    return ScheduledCircuit(circuit.num_qubits, tuple(timed), circuit.classical_bits)


def idle_windows(sched: ScheduledCircuit, qubit: int) -> list[tuple[float, float]]:
    """Maximal gaps on ``qubit`` between consecutive instructions touching it.

    Time before the qubit's first instruction and after its last activity is
    not a window.  Zero-width gaps are dropped.
    """
    if qubit >= sched.num_qubits:
        raise CircuitError(f"qubit {qubit} out of range (num_qubits={sched.num_qubits})")
    spans = sorted((ti.start, ti.end) for ti in sched.timed if qubit in ti.qubits)
    windows: list[tuple[float, float]] = []
    cursor: float | None = None
    for start, end in spans:
        if cursor is not None and start > cursor:
            windows.append((cursor, start))
        cursor = end if cursor is None else max(cursor, end)
    return windows


def _boundary_pairs(
    sched: ScheduledCircuit, qubit: int
) -> list[tuple[float, float, TimedInstruction, TimedInstruction]]:
    """Idle windows of ``qubit`` along with their bounding instructions."""
    spans = sorted(
        ((ti.start, ti.end, ti) for ti in sched.timed if qubit in ti.qubits),
        key=lambda item: (item[0], item[1]),
    )
    out = []
    cursor: float | None = None
    left: TimedInstruction | None = None
    for start, end, ti in spans:
        if cursor is not None and start > cursor:
            out.append((cursor, start, left, ti))
        if cursor is None or end >= cursor:
            cursor, left = end, ti
    return out


def unschedule(sched: ScheduledCircuit) -> Circuit:
    """Rebuild an instruction-list circuit whose ASAP schedule reproduces
    ``sched`` exactly, inserting explicit delays to keep every start time."""
    frontier: dict[int, float] = {}
    out: list[Instruction] = []
    for ti in sorted(sched.timed, key=lambda t: t.start):
        for q in ti.qubits:
            gap = ti.start - frontier.get(q, 0.0)
            if gap > 0:
                out.append(Instruction(Gate.DELAY, (q,), param=gap))
            frontier[q] = ti.end
        out.append(Instruction(ti.gate, ti.qubits, ti.param, ti.cbit))
    return Circuit(sched.num_qubits, tuple(out), sched.classical_bits)


def circuit_qubit_set(instructions: Iterable[Instruction]) -> set[int]:
    return {q for instr in instructions for q in instr.qubits}
