"""Device graphs, attacker/victim layout presets, and noise parameters.

A :class:`CouplingMap` carries per-edge static ZZ rates plus a next-nearest
leakage factor ``beta``: pairs at graph distance 2 couple at
``beta * min(rate along the connecting path)`` (strongest path wins when
several exist).  :func:`effective_zz` adds the CX amplification rule: a
pair's rate is multiplied by ``kappa`` while any concurrently driven CX
shares one of its qubits, unless the pair is itself the driven edge.

Layout presets (a)..(e) are small induced-subgraph placements of a 3-qubit
victim path, one or more attacker CNOT pairs, and optional buffer qubits
that push every attacker to graph distance >= 2.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import ConfigError, TopologyError

__all__ = [
    "CouplingMap",
    "Layout",
    "NoiseModel",
    "NoiseConfig",
    "heavy_hex_map",
    "layout_preset",
    "effective_zz",
    "PRESET_NAMES",
    "DEFAULT_ZZ_HZ",
    "DEFAULT_BETA",
    "DEFAULT_KAPPA",
    "DEFAULT_DETUNING_SIGMA_HZ",
    "DEFAULT_P1",
    "DEFAULT_P2",
]

# Shipped defaults. zz/kappa/detuning/p1/p2 come from the calibration sweep
# documented in scripts/calibrate.py; they are configuration, not physics.
DEFAULT_ZZ_HZ = 12_000.0
DEFAULT_BETA = 0.05
DEFAULT_KAPPA = 6.0
DEFAULT_DETUNING_SIGMA_HZ = 9_000.0
DEFAULT_P1 = 3e-4
DEFAULT_P2 = 3e-3


def _norm_pair(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True)
class CouplingMap:
    """Undirected device graph with a static ZZ rate (Hz) per edge."""

    num_qubits: int
    edges: Mapping[tuple[int, int], float]
    beta: float = DEFAULT_BETA

    def __post_init__(self) -> None:
        table: dict[tuple[int, int], float] = {}
        for (i, j), rate in dict(self.edges).items():
            if i == j:
                raise TopologyError(f"self-edge on qubit {i}")
            if not (0 <= i < self.num_qubits and 0 <= j < self.num_qubits):
                raise TopologyError(f"edge ({i},{j}) out of range")
            if rate < 0:
                raise TopologyError(f"negative zz rate on edge ({i},{j})")
            table[_norm_pair(i, j)] = float(rate)
        if not 0.0 <= self.beta <= 1.0:
            raise TopologyError(f"beta must be in [0,1], got {self.beta}")
        object.__setattr__(self, "edges", MappingProxyType(table))
        adj: dict[int, set[int]] = {q: set() for q in range(self.num_qubits)}
        for i, j in table:
            adj[i].add(j)
            adj[j].add(i)
        object.__setattr__(self, "_adj", {q: frozenset(n) for q, n in adj.items()})

    def neighbors(self, q: int) -> frozenset[int]:
        return self._adj[q]

    def distance(self, a: int, b: int) -> int:
        """BFS graph distance; -1 if disconnected."""
        if a == b:
            return 0
        seen = {a}
        frontier = [a]
        dist = 0
        while frontier:
            dist += 1
            nxt = []
            for q in frontier:
                for n in self._adj[q]:
                    if n == b:
                        return dist
                    if n not in seen:
                        seen.add(n)
                        nxt.append(n)
            frontier = nxt
        return -1

    def base_coupling(self, i: int, j: int) -> float:
        """Static rate for a pair: edge rate, beta-scaled distance-2 rate, else 0."""
        if i == j:
            raise TopologyError("pair must be two distinct qubits")
        direct = self.edges.get(_norm_pair(i, j))
        if direct is not None:
            return direct
        best = 0.0
        for k in self._adj[i] & self._adj[j]:
            best = max(best, min(self.edges[_norm_pair(i, k)], self.edges[_norm_pair(k, j)]))
        return self.beta * best

    def coupled_pairs(self) -> list[tuple[int, int]]:
        """All pairs with a nonzero base coupling (edges and distance-2 pairs)."""
        out = []
        for i in range(self.num_qubits):
            for j in range(i + 1, self.num_qubits):
                if self.base_coupling(i, j) > 0:
                    out.append((i, j))
        return out


def effective_zz(
    cmap: CouplingMap,
    pair: tuple[int, int],
    active_cx_edges: Iterable[tuple[int, int]] = (),
    kappa: float = 1.0,
) -> float:
    """ZZ rate for ``pair`` given the set of concurrently driven CX edges."""
    i, j = pair
    base = cmap.base_coupling(i, j)
    if base == 0.0 or kappa == 1.0:
        return base
    mine = _norm_pair(i, j)
    for edge in active_cx_edges:
        e = _norm_pair(*edge)
        # The driven edge never amplifies itself; any other sharing edge does.
        if e != mine and (i in e or j in e):
            return base * kappa
    return base


@dataclass(frozen=True)
class Layout:
    """Victim path, attacker CNOT pairs, and (optionally) buffer qubits."""

    name: str
    victim: tuple[int, int, int]
    attacker_pairs: tuple[tuple[int, int], ...]
    buffer: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "victim", tuple(self.victim))
        object.__setattr__(
            self, "attacker_pairs", tuple(tuple(p) for p in self.attacker_pairs)
        )
        object.__setattr__(self, "buffer", tuple(self.buffer))

    @property
    def attacker_qubits(self) -> tuple[int, ...]:
        return tuple(q for pair in self.attacker_pairs for q in pair)

    def validate(self, cmap: CouplingMap) -> None:
        victim, attackers, buffer = set(self.victim), set(self.attacker_qubits), set(self.buffer)
        if len(self.victim) != len(victim):
            raise TopologyError("victim qubits must be distinct")
        if len(self.attacker_qubits) != len(attackers):
            raise TopologyError("attacker pairs must not share qubits")
        if (victim & attackers) or (victim & buffer) or (attackers & buffer):
            raise TopologyError("victim/attacker/buffer sets must be disjoint")
        for a, b in zip(self.victim, self.victim[1:]):
            if _norm_pair(a, b) not in cmap.edges:
                raise TopologyError(f"victim qubits {a},{b} are not adjacent")
        for pair in self.attacker_pairs:
            if _norm_pair(*pair) not in cmap.edges:
                raise TopologyError(f"attacker pair {pair} is not an edge")
        dists = [cmap.distance(a, v) for a in attackers for v in victim]
        if buffer:
            if min(dists) < 2:
                raise TopologyError("buffered layout requires attacker distance >= 2")
        else:
            if min(dists) != 1:
                raise TopologyError("some attacker qubit must be adjacent to the victim")


def heavy_hex_map(
    rows: int, cols: int, default_zz: float = DEFAULT_ZZ_HZ, beta: float = DEFAULT_BETA
) -> CouplingMap:
    """Heavy-hex-style lattice of ``rows`` x ``cols`` cells with uniform rates.

    rows+1 horizontal lines of 4*cols+1 qubits, joined by bridge qubits every
    4 positions, offset alternating 0/2 between successive gaps.  Numbering:
    line qubits row-major, then bridges ordered by (gap, position).
    """
    if rows < 1 or cols < 1:
        raise TopologyError("rows and cols must be >= 1")
    line_len = 4 * cols + 1
    n_lines = rows + 1
    edges: dict[tuple[int, int], float] = {}

    def line_qubit(line: int, pos: int) -> int:
        return line * line_len + pos

    for line in range(n_lines):
        for pos in range(line_len - 1):
            edges[_norm_pair(line_qubit(line, pos), line_qubit(line, pos + 1))] = default_zz
    next_id = n_lines * line_len
    for gap in range(rows):
        offset = (2 * gap) % 4
        for pos in range(offset, line_len, 4):
            bridge = next_id
            next_id += 1
            edges[_norm_pair(line_qubit(gap, pos), bridge)] = default_zz
            edges[_norm_pair(bridge, line_qubit(gap + 1, pos))] = default_zz
    return CouplingMap(next_id, edges, beta=beta)


def _chain(n: int) -> list[tuple[int, int]]:
    return [(i, i + 1) for i in range(n - 1)]


# Preset geometry: (num_qubits, edge list, victim, pairs, buffered pairs, buffer).
# (a)/(b): victim mid-chain, two flanking attacker pairs, control near/far.
# (c): attacker on a degree-3 branch at the victim's middle qubit.
# (d): single attacker pair at the victim's end.
# (e): three attacker sites trailing down a 10-qubit chain.
_PRESETS: dict[str, tuple[int, list, tuple, tuple, tuple, tuple]] = {
    "a": (9, _chain(9), (3, 4, 5), ((2, 1), (6, 7)), ((1, 0), (7, 8)), (2, 6)),
    "b": (9, _chain(9), (3, 4, 5), ((1, 2), (7, 6)), ((0, 1), (8, 7)), (2, 6)),
    "c": (6, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)], (0, 1, 2), ((3, 4),), ((4, 5),), (3,)),
    "d": (7, _chain(7), (0, 1, 2), ((3, 4),), ((4, 5),), (3,)),
    "e": (10, _chain(10), (0, 1, 2), ((3, 4), (5, 6), (7, 8)), ((4, 5), (6, 7), (8, 9)), (3,)),
}

PRESET_NAMES = tuple(sorted(_PRESETS))


def layout_preset(
    name: str,
    buffered: bool = False,
    zz_hz: float = DEFAULT_ZZ_HZ,
    beta: float = DEFAULT_BETA,
) -> tuple[CouplingMap, Layout]:
    """One of the tested attacker-victim placements, optionally buffered."""
    try:
        n, edge_list, victim, pairs, buf_pairs, buf = _PRESETS[name]
    except KeyError:
        raise TopologyError(f"unknown preset {name!r}; choose from {PRESET_NAMES}") from None
    cmap = CouplingMap(n, {e: zz_hz for e in edge_list}, beta=beta)
    if buffered:
        layout = Layout(name, victim, buf_pairs, buf)
    else:
        layout = Layout(name, victim, pairs)
    layout.validate(cmap)
    return cmap, layout


@dataclass(frozen=True)
class NoiseModel:
    """Stochastic noise parameters used by the simulation engine.

    detuning_sigma_hz: std dev of the per-shot quasi-static Z detuning.
    p1 / p2:           depolarizing probability per 1-qubit gate / per CX.
    kappa:             ZZ amplification while a CX sharing a qubit is driven.
    include_t2_markovian / t2_hz: optional Markovian phase diffusion, off by
    default and outside the calibrated acceptance path.
    """

    detuning_sigma_hz: float = DEFAULT_DETUNING_SIGMA_HZ
    p1: float = DEFAULT_P1
    p2: float = DEFAULT_P2
    kappa: float = DEFAULT_KAPPA
    include_t2_markovian: bool = False
    t2_hz: float = 0.0

    def __post_init__(self) -> None:
        if not 0.0 <= self.p1 <= 1.0 or not 0.0 <= self.p2 <= 1.0:
            raise ConfigError("p1 and p2 must be probabilities in [0,1]")
        if self.detuning_sigma_hz < 0 or self.t2_hz < 0:
            raise ConfigError("rates must be non-negative")
        if self.kappa < 1.0:
            raise ConfigError("kappa must be >= 1")

    @classmethod
    def noiseless(cls) -> "NoiseModel":
        return cls(detuning_sigma_hz=0.0, p1=0.0, p2=0.0, kappa=1.0)


@dataclass(frozen=True)
class NoiseConfig:
    """JSON-facing bundle of topology rates and noise parameters."""

    zz_hz: float = DEFAULT_ZZ_HZ
    beta: float = DEFAULT_BETA
    kappa: float = DEFAULT_KAPPA
    detuning_sigma_hz: float = DEFAULT_DETUNING_SIGMA_HZ
    p1: float = DEFAULT_P1
    p2: float = DEFAULT_P2
    include_t2_markovian: bool = False
    t2_hz: float = 0.0

    def noise_model(self) -> NoiseModel:
        return NoiseModel(
            detuning_sigma_hz=self.detuning_sigma_hz,
            p1=self.p1,
            p2=self.p2,
            kappa=self.kappa,
            include_t2_markovian=self.include_t2_markovian,
            t2_hz=self.t2_hz,
        )

    def to_dict(self) -> dict:
        return {
            "zz_hz": self.zz_hz,
            "beta": self.beta,
            "kappa": self.kappa,
            "detuning_sigma_hz": self.detuning_sigma_hz,
            "p1": self.p1,
            "p2": self.p2,
            "include_t2_markovian": self.include_t2_markovian,
            "t2_hz": self.t2_hz,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "NoiseConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown noise config keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(f"bad noise config: {exc}") from exc

    @classmethod
    def from_json(cls, path: str | Path) -> "NoiseConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read noise config {path}: {exc}") from exc
        return cls.from_dict(data)
