"""Monte-Carlo trajectory statevector engine and outcome metrics.

Noise semantics, per shot:

* a quasi-static detuning delta_q ~ N(0, sigma) is drawn once per qubit and
  a static ZZ rate runs on every coupled pair; between instruction events
  the state picks up the diagonal phase
  exp(-i pi [sum_q delta_q dt Z_q + sum_(ij) nu_eff(ij) dt Z_i Z_j]),
  where nu_eff applies the kappa amplification while a CX sharing a qubit
  with the pair is being driven;
* every gate's ideal unitary applies at its end event (crosstalk accrues
  through the gate's own interval), followed by a depolarizing draw: with
  probability p1/p2 one uniformly random non-identity Pauli on its support;
* a measure samples its qubit at the end of the measurement window and
  collapses the state.

All randomness for trajectory i derives from a counter-based generator
keyed on (seed, i), so aggregate counts are bitwise identical for a given
seed regardless of how shots are batched or parallelized.

Qubits that never see a gate stay in |0>; the engine folds their couplings
into deterministic single-qubit phases on their partners and keeps them out
of the simulated register, which keeps scenario sweeps at desk scale.
"""

from __future__ import annotations

import hashlib
import math
from bisect import bisect_right
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .circuit import (
    DIAGONAL_GATES,
    Circuit,
    Gate,
    ScheduledCircuit,
    TimedInstruction,
)
from .errors import EngineError
from .topology import CouplingMap, Layout, NoiseModel, effective_zz

__all__ = [
    "Counts",
    "TrajectorySample",
    "sample_trajectory",
    "simulate",
    "noiseless_distribution",
    "classical_fidelity",
    "marked_probability",
    "derive_seed",
]

QUBIT_CAP = 14
_SHOT_CHUNK = 8192

_SQ2 = 1.0 / math.sqrt(2.0)
_MATS: dict[Gate, np.ndarray] = {
    Gate.H: np.array([[_SQ2, _SQ2], [_SQ2, -_SQ2]], dtype=complex),
    Gate.X: np.array([[0, 1], [1, 0]], dtype=complex),
    Gate.Y: np.array([[0, -1j], [1j, 0]], dtype=complex),
    Gate.Z: np.array([[1, 0], [0, -1]], dtype=complex),
    Gate.S: np.array([[1, 0], [0, 1j]], dtype=complex),
    Gate.SDG: np.array([[1, 0], [0, -1j]], dtype=complex),
    Gate.T: np.array([[1, 0], [0, np.exp(1j * math.pi / 4)]], dtype=complex),
    Gate.TDG: np.array([[1, 0], [0, np.exp(-1j * math.pi / 4)]], dtype=complex),
    Gate.SX: np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2,
}


def gate_matrix(gate: Gate, param: float | None = None) -> np.ndarray:
    """2x2 unitary of a single-qubit gate."""
    if gate is Gate.RZ:
        return np.array([[np.exp(-0.5j * param), 0], [0, np.exp(0.5j * param)]], dtype=complex)
    return _MATS[gate]


@dataclass(frozen=True)
class Counts:
    """Observed outcome histogram over fixed-width classical bitstrings."""

    counts: Mapping[str, int]
    shots: int
    n_bits: int

    def __post_init__(self) -> None:
        table = dict(self.counts)
        if any(len(k) != self.n_bits for k in table):
            raise EngineError("count keys must all have width n_bits")
        if sum(table.values()) != self.shots:
            raise EngineError("counts must sum to shots")
        object.__setattr__(self, "counts", MappingProxyType(table))

    def distribution(self) -> np.ndarray:
        probs = np.zeros(2**self.n_bits)
        for key, c in self.counts.items():
            probs[int(key, 2)] = c / self.shots
        return probs


def marked_probability(counts: Counts, marked: str) -> float:
    """Fraction of shots that produced the marked bitstring."""
    if counts.shots <= 0:
        raise EngineError("shots must be positive")
    return counts.counts.get(marked, 0) / counts.shots


def classical_fidelity(p: np.ndarray, q: np.ndarray) -> float:
    """Squared Bhattacharyya coefficient (sum_x sqrt(p q))^2 of two distributions."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise EngineError(f"dimension mismatch: {p.shape} vs {q.shape}")
    if abs(p.sum() - 1.0) > 1e-9 or abs(q.sum() - 1.0) > 1e-9:
        raise EngineError("distributions must sum to 1 within 1e-9")
    return float(np.sum(np.sqrt(p * q)) ** 2)


def derive_seed(*parts: int | str) -> int:
    """Stable 63-bit seed derived from arbitrary labels (hash-based)."""
    text = ":".join(str(p) for p in parts)
    digest = hashlib.sha256(b"qxtalk:" + text.encode()).digest()
    return int.from_bytes(digest[:8], "little") >> 1


def _seed_words(seed: int) -> tuple[int, int]:
    digest = hashlib.sha256(f"qxtalk:{seed}".encode()).digest()
    return (
        int.from_bytes(digest[:8], "little"),
        int.from_bytes(digest[8:16], "little"),
    )


class _ShotStreams:
    """Per-shot Philox streams keyed on (seed, shot index).

    One bit generator is recycled by resetting its full state, which keeps
    the stream a pure function of (seed, shot) without the entropy-pool cost
    of constructing a fresh generator per trajectory.
    """

    def __init__(self, seed: int):
        self._k0, self._k1 = _seed_words(seed)
        self._bg = np.random.Philox(key=np.array([self._k0, self._k1], dtype=np.uint64))

    def generator(self, shot: int) -> np.random.Generator:
        self._bg.state = {
            "bit_generator": "Philox",
            "state": {
                "counter": np.zeros(4, dtype=np.uint64),
                "key": np.array([self._k0, self._k1 ^ shot], dtype=np.uint64),
            },
            "buffer": np.zeros(4, dtype=np.uint64),
            "buffer_pos": 4,
            "has_uint32": 0,
            "uinteger": 0,
        }
        return np.random.Generator(self._bg)


@dataclass(frozen=True)
class TrajectorySample:
    """Per-shot randomness, a pure function of (seed, shot index).

    Array sizes follow the compiled circuit and noise model: detunings for
    every map qubit, an error trigger and Pauli selector per gate event, one
    uniform per measurement, plus optional Markovian dephasing kicks.
    """

    detunings_hz: np.ndarray
    gate_uniforms: np.ndarray
    pauli_uniforms: np.ndarray
    measure_uniforms: np.ndarray
    dephasing_normals: np.ndarray


def sample_trajectory(
    seed: int,
    shot: int,
    num_qubits: int,
    n_gate_events: int,
    n_measures: int,
    *,
    need_detuning: bool = True,
    need_depol: bool = True,
    n_dephasing: int = 0,
    sigma_hz: float = 1.0,
) -> TrajectorySample:
    """Draw trajectory ``shot``'s randomness from Philox keyed on (seed, shot).

    The draw order is fixed: detuning normals, depolarizing uniforms,
    measurement uniforms, dephasing normals; disabled channels consume
    nothing from the stream.
    """
    rng = _ShotStreams(seed).generator(shot)
    detunings = (
        sigma_hz * rng.standard_normal(num_qubits)
        if need_detuning
        else np.zeros(num_qubits)
    )
    if need_depol:
        u = rng.random(2 * n_gate_events)
        gate_u, pauli_u = u[:n_gate_events], u[n_gate_events:]
    else:
        gate_u = np.ones(n_gate_events)  # never below any p
        pauli_u = np.zeros(n_gate_events)
    measure_u = rng.random(n_measures)
    kicks = rng.standard_normal(n_dephasing) if n_dephasing else np.zeros(0)
    return TrajectorySample(detunings, gate_u, pauli_u, measure_u, kicks)


class _PairPhase:
    """Cumulative diagonal angle pi * integral of nu_eff dt for one pair (in
    radians, time in ns), piecewise linear with breakpoints at CX edges."""

    def __init__(
        self,
        pair: tuple[int, int],
        base_hz: float,
        kappa: float,
        cx_windows: Sequence[tuple[float, float, tuple[int, int]]],
    ):
        events: list[tuple[float, int]] = []
        mine = tuple(sorted(pair))
        for start, end, edge in cx_windows:
            if edge != mine and (pair[0] in edge or pair[1] in edge):
                events.append((start, +1))
                events.append((end, -1))
        events.sort()
        self.times = [0.0]
        self.rates = [base_hz]
        depth = 0
        for t, step in events:
            depth += step
            rate = base_hz * (kappa if depth > 0 else 1.0)
            if t == self.times[-1]:
                self.rates[-1] = rate
            else:
                self.times.append(t)
                self.rates.append(rate)
        self.cum = [0.0]
        for i in range(1, len(self.times)):
            self.cum.append(
                self.cum[-1] + self.rates[i - 1] * (self.times[i] - self.times[i - 1])
            )

    def angle(self, t: float) -> float:
        i = bisect_right(self.times, t) - 1
        return math.pi * 1e-9 * (self.cum[i] + self.rates[i] * (t - self.times[i]))


class _Program:
    """Shot-independent compilation of (schedule, map, noise) into ops."""

    def __init__(
        self, sched: ScheduledCircuit, cmap: CouplingMap, noise: NoiseModel
    ):
        if cmap.num_qubits > QUBIT_CAP:
            raise EngineError(f"qubit count {cmap.num_qubits} over cap {QUBIT_CAP}")
        if sched.num_qubits > cmap.num_qubits:
            raise EngineError(
                f"schedule uses {sched.num_qubits} qubits but map has {cmap.num_qubits}"
            )
        self.map_qubits = cmap.num_qubits

        ordered = sorted(
            (ti for ti in sched.timed if ti.gate not in (Gate.DELAY, Gate.BARRIER)),
            key=lambda ti: ti.end,
        )
        active = sorted(
            {q for ti in ordered if ti.gate is not Gate.MEASURE for q in ti.qubits}
        )
        self.active = active
        local = {q: i for i, q in enumerate(active)}
        n = len(active)
        self.dim = 2**n
        idx = np.arange(self.dim)
        bit1 = [np.nonzero((idx >> (n - 1 - i)) & 1)[0] for i in range(n)]
        bit0 = [np.nonzero(1 - ((idx >> (n - 1 - i)) & 1))[0] for i in range(n)]
        self._bit0, self._bit1 = bit0, bit1
        signs = [1.0 - 2.0 * ((idx >> (n - 1 - i)) & 1) for i in range(n)]

        cx_windows = [
            (ti.start, ti.end, tuple(sorted(ti.qubits)))
            for ti in ordered
            if ti.gate is Gate.CX
        ]
        # Diagonal phase machinery: active-active pairs evolve the register;
        # pairs with a frozen (never-gated, hence |0>) partner reduce to a
        # deterministic single-qubit phase on the active side.
        pair_phase: dict[tuple[int, int], _PairPhase] = {}
        frozen_phase: dict[int, list[_PairPhase]] = {q: [] for q in active}
        for i, j in cmap.coupled_pairs():
            pp = _PairPhase((i, j), cmap.base_coupling(i, j), noise.kappa, cx_windows)
            if i in local and j in local:
                pair_phase[(i, j)] = pp
            elif i in local:
                frozen_phase[i].append(pp)
            elif j in local:
                frozen_phase[j].append(pp)

        self.has_detuning = noise.detuning_sigma_hz > 0
        self.has_depol = noise.p1 > 0 or noise.p2 > 0
        self.t2_std_base = (
            2.0 * math.pi * math.sqrt(noise.t2_hz * 1e-9)
            if noise.include_t2_markovian and noise.t2_hz > 0
            else 0.0
        )

        last_pair = {p: 0.0 for p in pair_phase}
        last_qubit = {q: 0.0 for q in active}
        self.ops: list[tuple] = []
        self.n_gate_events = 0
        self.n_measures = 0
        self.n_dephasing = 0
        measured_frozen: list[tuple[int, int]] = []  # (cbit, fixed 0)

        for ti in ordered:
            t = ti.end
            if ti.gate is Gate.MEASURE:
                q = ti.qubits[0]
                if q in local:
                    self.ops.append(("measure", local[q], ti.cbit, self.n_measures))
                    self.n_measures += 1
                else:
                    measured_frozen.append((ti.cbit, 0))
                continue

            flush_qubits = [local[q] for q in ti.qubits]
            static_angle = np.zeros(self.dim)
            for q in ti.qubits:
                for pp in frozen_phase[q]:
                    a = pp.angle(t) - pp.angle(last_qubit[q])
                    static_angle += a * signs[local[q]]
            for (i, j), pp in pair_phase.items():
                if i in ti.qubits or j in ti.qubits:
                    a = pp.angle(t) - pp.angle(last_pair[(i, j)])
                    static_angle += a * signs[local[i]] * signs[local[j]]
                    last_pair[(i, j)] = t
            deltas = [(local[q], t - last_qubit[q]) for q in ti.qubits]
            for q in ti.qubits:
                last_qubit[q] = t
            static_vec = (
                np.exp(-1j * static_angle) if np.any(static_angle) else None
            )
            kick_slots = None
            if self.t2_std_base:
                kick_slots = list(range(self.n_dephasing, self.n_dephasing + len(deltas)))
                self.n_dephasing += len(deltas)
            self.ops.append(("flush", static_vec, deltas, kick_slots))

            if ti.gate is Gate.CX:
                c, x = local[ti.qubits[0]], local[ti.qubits[1]]
                perm = idx ^ (((idx >> (n - 1 - c)) & 1) << (n - 1 - x))
                self.ops.append(("cx", perm))
                p_err, support = noise.p2, (c, x)
            else:
                lq = local[ti.qubits[0]]
                if ti.gate in DIAGONAL_GATES:
                    mat = gate_matrix(ti.gate, ti.param)
                    self.ops.append(("diag", lq, complex(mat[0, 0]), complex(mat[1, 1])))
                else:
                    self.ops.append(("u1", lq, gate_matrix(ti.gate)))
                p_err, support = noise.p1, (lq,)
            if self.has_depol and p_err > 0:
                self.ops.append(("depol", p_err, support, self.n_gate_events))
            self.n_gate_events += 1

        self.measured_frozen = measured_frozen
        self.classical_bits = sched.classical_bits


def _apply_pauli(state, rows, cols0, cols1, kind: str) -> None:
    if kind == "z":
        state[np.ix_(rows, cols1)] *= -1.0
        return
    a = state[np.ix_(rows, cols0)]
    b = state[np.ix_(rows, cols1)]
    if kind == "x":
        state[np.ix_(rows, cols0)] = b
        state[np.ix_(rows, cols1)] = a
    else:  # y
        state[np.ix_(rows, cols0)] = -1j * b
        state[np.ix_(rows, cols1)] = 1j * a


_PAULI_1Q = ("x", "y", "z")
_PAULI_2Q = tuple(
    (a, b) for a in ("i", "x", "y", "z") for b in ("i", "x", "y", "z") if (a, b) != ("i", "i")
)


def _run_chunk(
    prog: _Program,
    noise: NoiseModel,
    streams: _ShotStreams,
    shot_lo: int,
    shot_hi: int,
    bits_out: np.ndarray,
) -> None:
    n_shots = shot_hi - shot_lo
    n_ev, n_meas = prog.n_gate_events, prog.n_measures
    # Same per-shot draw sequence as sample_trajectory, filled row by row.
    deltas = np.empty((n_shots, prog.map_qubits)) if prog.has_detuning else None
    draw_depol = prog.has_depol and n_ev > 0
    gate_u = np.empty((n_shots, n_ev)) if draw_depol else None
    pauli_u = np.empty((n_shots, n_ev)) if draw_depol else None
    meas_u = np.empty((n_shots, n_meas)) if n_meas else None
    kicks = np.empty((n_shots, prog.n_dephasing)) if prog.n_dephasing else None
    for i in range(n_shots):
        rng = streams.generator(shot_lo + i)
        if deltas is not None:
            deltas[i] = rng.standard_normal(prog.map_qubits)
        if draw_depol:
            u = rng.random(2 * n_ev)
            gate_u[i] = u[:n_ev]
            pauli_u[i] = u[n_ev:]
        if meas_u is not None:
            meas_u[i] = rng.random(n_meas)
        if kicks is not None:
            kicks[i] = rng.standard_normal(prog.n_dephasing)
    if deltas is not None:
        deltas *= noise.detuning_sigma_hz

    state = np.zeros((n_shots, prog.dim), dtype=complex)
    state[:, 0] = 1.0
    b0, b1 = prog._bit0, prog._bit1

    for op in prog.ops:
        kind = op[0]
        if kind == "flush":
            _, static_vec, qubit_dts, kick_slots = op
            if static_vec is not None:
                state *= static_vec
            for slot, (lq, dt) in enumerate(qubit_dts):
                if dt > 0 and prog.has_detuning:
                    gq = prog.active[lq]
                    # relative phase exp(+2i*alpha) on the |1> half; the
                    # per-shot global phase exp(-i*alpha) is dropped
                    alpha = math.pi * 1e-9 * dt * deltas[:, gq]
                    state[:, b1[lq]] *= np.exp(2j * alpha)[:, None]
                if kick_slots is not None and dt > 0:
                    std = prog.t2_std_base * math.sqrt(dt)
                    phi = std * kicks[:, kick_slots[slot]]
                    state[:, b1[lq]] *= np.exp(2j * phi)[:, None]
        elif kind == "diag":
            _, lq, d0, d1 = op
            if d0 != 1.0:
                state[:, b0[lq]] *= d0
            state[:, b1[lq]] *= d1
        elif kind == "u1":
            _, lq, mat = op
            a = state[:, b0[lq]]
            b = state[:, b1[lq]]
            state[:, b0[lq]] = mat[0, 0] * a + mat[0, 1] * b
            state[:, b1[lq]] = mat[1, 0] * a + mat[1, 1] * b
        elif kind == "cx":
            state = state[:, op[1]]
        elif kind == "depol":
            _, p_err, support, ev = op
            hit = np.nonzero(gate_u[:, ev] < p_err)[0]
            if hit.size == 0:
                continue
            if len(support) == 1:
                choice = np.minimum((pauli_u[hit, ev] * 3).astype(int), 2)
                for k, pauli in enumerate(_PAULI_1Q):
                    sub = hit[choice == k]
                    if sub.size:
                        lq = support[0]
                        _apply_pauli(state, sub, b0[lq], b1[lq], pauli)
            else:
                choice = np.minimum((pauli_u[hit, ev] * 15).astype(int), 14)
                for k, (pa, pb) in enumerate(_PAULI_2Q):
                    sub = hit[choice == k]
                    if sub.size == 0:
                        continue
                    for lq, pauli in zip(support, (pa, pb)):
                        if pauli != "i":
                            _apply_pauli(state, sub, b0[lq], b1[lq], pauli)
        else:  # measure
            _, lq, cbit, midx = op
            p_one = np.einsum("sd->s", np.abs(state[:, b1[lq]]) ** 2)
            outcome = meas_u[:, midx] < p_one
            state[np.ix_(np.nonzero(outcome)[0], b0[lq])] = 0.0
            state[np.ix_(np.nonzero(~outcome)[0], b1[lq])] = 0.0
            norms = np.linalg.norm(state, axis=1)
            if np.any(norms == 0) or np.any(np.isnan(norms)):
                raise EngineError("NaN amplitude or zero-norm state at measurement")
            state /= norms[:, None]
            bits_out[shot_lo:shot_hi, cbit] = outcome

    norms = np.linalg.norm(state, axis=1)
    if np.any(np.isnan(norms)) or np.any(np.abs(norms - 1.0) > 1e-9):
        raise EngineError("statevector norm drifted beyond 1e-9")


def simulate(
    sched: ScheduledCircuit,
    cmap: CouplingMap,
    noise: NoiseModel,
    shots: int,
    seed: int,
    layout: Layout | None = None,
) -> Counts:
    """Sample ``shots`` trajectories of the scheduled circuit under the noise
    model; returns deterministic Counts for a given (inputs, seed)."""
    if shots <= 0:
        raise EngineError("shots must be positive")
    if layout is not None and max(layout.victim) >= cmap.num_qubits:
        raise EngineError("layout victim outside the coupling map")
    prog = _Program(sched, cmap, noise)

    n_bits = prog.classical_bits
    bits = np.zeros((shots, max(n_bits, 1)), dtype=bool)
    streams = _ShotStreams(seed)
    for lo in range(0, shots, _SHOT_CHUNK):
        _run_chunk(prog, noise, streams, lo, min(lo + _SHOT_CHUNK, shots), bits)
    for cbit, value in prog.measured_frozen:
        bits[:, cbit] = bool(value)

    if n_bits == 0:
        return Counts({"": shots}, shots, 0)
    weights = 1 << np.arange(n_bits - 1, -1, -1)
    codes = bits[:, :n_bits] @ weights
    hist = np.bincount(codes, minlength=2**n_bits)
    counts = {
        format(code, f"0{n_bits}b"): int(c) for code, c in enumerate(hist) if c
    }
    return Counts(counts, shots, n_bits)


def noiseless_distribution(circuit: Circuit | ScheduledCircuit) -> np.ndarray:
    """Exact outcome distribution of the ideal (noise-free, timing-free)
    circuit: over classical bits if it measures, over all qubits otherwise.

    Measurement must be terminal per qubit on this path; ``simulate`` is the
    general sampler.
    """
    if isinstance(circuit, ScheduledCircuit):
        n = circuit.num_qubits
        seq: list = [
            (ti.gate, ti.qubits, ti.param, ti.cbit)
            for ti in sorted(circuit.timed, key=lambda t: t.start)
        ]
        n_cbits = circuit.classical_bits
    else:
        n = circuit.num_qubits
        seq = [(i.gate, i.qubits, i.param, i.cbit) for i in circuit.instructions]
        n_cbits = circuit.classical_bits
    if n > QUBIT_CAP:
        raise EngineError(f"qubit count {n} over cap {QUBIT_CAP}")

    dim = 2**n
    idx = np.arange(dim)
    psi = np.zeros(dim, dtype=complex)
    psi[0] = 1.0
    measures: dict[int, int] = {}  # qubit -> cbit
    for gate, qubits, param, cbit in seq:
        if gate in (Gate.DELAY, Gate.BARRIER):
            continue
        if any(q in measures for q in qubits):
            raise EngineError("measurement must be terminal per qubit on the noiseless path")
        if gate is Gate.MEASURE:
            measures[qubits[0]] = cbit
            continue
        if gate is Gate.CX:
            c, t = qubits
            perm = idx ^ (((idx >> (n - 1 - c)) & 1) << (n - 1 - t))
            psi = psi[perm]
            continue
        q = qubits[0]
        mat = gate_matrix(gate, param)
        ones = ((idx >> (n - 1 - q)) & 1).astype(bool)
        a = psi[~ones].copy()
        b = psi[ones].copy()
        psi[~ones] = mat[0, 0] * a + mat[0, 1] * b
        psi[ones] = mat[1, 0] * a + mat[1, 1] * b

    probs = np.abs(psi) ** 2
    if not measures:
        return probs
    m = n_cbits
    codes = np.zeros(dim, dtype=int)
    for q, c in measures.items():
        codes |= ((idx >> (n - 1 - q)) & 1) << (m - 1 - c)
    return np.bincount(codes, weights=probs, minlength=2**m)
