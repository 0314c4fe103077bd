"""Parser and serializer for the tiny QASM-like text format.

Grammar (one statement per line or ';'-separated, ``//`` comments):

    OPENQASM-SUBSET 1;          optional header, must come first if present
    qreg q[N]; creg c[N];
    h|x|y|z|s|sdg|t|tdg|sx q[i];
    rz(<float>) q[i];
    cx q[i],q[j];
    delay(<int>ns) q[i];
    barrier q[i],...;
    measure q[i] -> c[j];

No includes, no custom gate definitions, no classical control flow.
"""

from __future__ import annotations

import re

from .circuit import Circuit, Gate, Instruction
from .errors import QasmError

__all__ = ["parse_qasm", "emit_qasm", "HEADER"]

HEADER = "OPENQASM-SUBSET 1"

_SIMPLE_GATES = {g.value: g for g in (
    Gate.H, Gate.X, Gate.Y, Gate.Z, Gate.S, Gate.SDG, Gate.T, Gate.TDG, Gate.SX,
)}

_RE_QREG = re.compile(r"qreg\s+q\[(\d+)\]\Z")
_RE_CREG = re.compile(r"creg\s+c\[(\d+)\]\Z")
_RE_SIMPLE = re.compile(r"(h|x|y|z|sdg|sx|s|tdg|t)\s+q\[(\d+)\]\Z")
_RE_RZ = re.compile(r"rz\(([+-]?(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)\)\s+q\[(\d+)\]\Z")
_RE_CX = re.compile(r"cx\s+q\[(\d+)\]\s*,\s*q\[(\d+)\]\Z")
_RE_DELAY = re.compile(r"delay\((\d+)ns\)\s+q\[(\d+)\]\Z")
_RE_BARRIER = re.compile(r"barrier\s+(q\[\d+\](?:\s*,\s*q\[\d+\])*)\Z")
_RE_MEASURE = re.compile(r"measure\s+q\[(\d+)\]\s*->\s*c\[(\d+)\]\Z")
_RE_QARG = re.compile(r"q\[(\d+)\]")


def _statements(text: str):
    """Yield (statement, line, column) with comments stripped."""
    for lineno, line in enumerate(text.splitlines(), start=1):
        code = line.split("//", 1)[0]
        col = 1
        for chunk in code.split(";"):
            stripped = chunk.strip()
            if stripped:
                yield stripped, lineno, col + chunk.index(stripped[0])
            col += len(chunk) + 1


def parse_qasm(text: str) -> Circuit:
    """Parse source text into a :class:`Circuit`, rejecting unknown gates."""
    num_qubits: int | None = None
    classical_bits = 0
    instructions: list[Instruction] = []
    first = True

    def check_qubit(q: int, line: int, col: int) -> int:
        if num_qubits is None:
            raise QasmError("gate before qreg declaration", line, col)
        if q >= num_qubits:
            raise QasmError(f"qubit index {q} out of declared range [0, {num_qubits})", line, col)
        return q

    for stmt, line, col in _statements(text):
        if stmt == HEADER:
            if not first:
                raise QasmError("header must be the first statement", line, col)
            first = False
            continue
        first = False

        if m := _RE_QREG.fullmatch(stmt):
            if num_qubits is not None:
                raise QasmError("duplicate qreg declaration", line, col)
            num_qubits = int(m.group(1))
            continue
        if m := _RE_CREG.fullmatch(stmt):
            if classical_bits:
                raise QasmError("duplicate creg declaration", line, col)
            classical_bits = int(m.group(1))
            continue
        if m := _RE_SIMPLE.fullmatch(stmt):
            gate = _SIMPLE_GATES[m.group(1)]
            instructions.append(Instruction(gate, (check_qubit(int(m.group(2)), line, col),)))
            continue
        if m := _RE_RZ.fullmatch(stmt):
            q = check_qubit(int(m.group(2)), line, col)
            instructions.append(Instruction(Gate.RZ, (q,), param=float(m.group(1))))
            continue
        if m := _RE_CX.fullmatch(stmt):
            a = check_qubit(int(m.group(1)), line, col)
            b = check_qubit(int(m.group(2)), line, col)
            if a == b:
                raise QasmError(f"duplicate qubit in one instruction: q[{a}]", line, col)
            instructions.append(Instruction(Gate.CX, (a, b)))
            continue
        if m := _RE_DELAY.fullmatch(stmt):
            q = check_qubit(int(m.group(2)), line, col)
            instructions.append(Instruction(Gate.DELAY, (q,), param=float(m.group(1))))
            continue
        if m := _RE_BARRIER.fullmatch(stmt):
            qubits = tuple(check_qubit(int(g), line, col) for g in _RE_QARG.findall(m.group(1)))
            if len(set(qubits)) != len(qubits):
                raise QasmError("duplicate qubit in one instruction", line, col)
            instructions.append(Instruction(Gate.BARRIER, qubits))
            continue
        if m := _RE_MEASURE.fullmatch(stmt):
            q = check_qubit(int(m.group(1)), line, col)
            c = int(m.group(2))
            if c >= classical_bits:
                raise QasmError(
                    f"classical bit c[{c}] out of declared range [0, {classical_bits})", line, col
                )
            instructions.append(Instruction(Gate.MEASURE, (q,), cbit=c))
            continue

        raise QasmError(f"syntax error: {stmt!r}", line, col)

    if num_qubits is None:
        raise QasmError("no qreg declaration", 1, 1)
    return Circuit(num_qubits, tuple(instructions), classical_bits)


def _format(instr: Instruction) -> str:
    gate = instr.gate
    if gate is Gate.RZ:
        return f"rz({instr.param!r}) q[{instr.qubits[0]}];"
    if gate is Gate.DELAY:
        dur = instr.param
        if dur != int(dur):
            raise QasmError(f"cannot emit non-integer delay duration {dur}")
        return f"delay({int(dur)}ns) q[{instr.qubits[0]}];"
    if gate is Gate.CX:
        return f"cx q[{instr.qubits[0]}],q[{instr.qubits[1]}];"
    if gate is Gate.BARRIER:
        return "barrier " + ",".join(f"q[{q}]" for q in instr.qubits) + ";"
    if gate is Gate.MEASURE:
        return f"measure q[{instr.qubits[0]}] -> c[{instr.cbit}];"
    return f"{gate.value} q[{instr.qubits[0]}];"


def emit_qasm(circuit: Circuit) -> str:
    """Serialize to canonical text: header, registers, one statement per line.

    ``parse_qasm(emit_qasm(c))`` yields an instruction-identical circuit.
    """
    lines = [HEADER + ";", f"qreg q[{circuit.num_qubits}];"]
    if circuit.classical_bits:
        lines.append(f"creg c[{circuit.classical_bits}];")
    lines.extend(_format(instr) for instr in circuit.instructions)
    return "\n".join(lines) + "\n"
