"""qxtalk: crosstalk-attack simulation on a 3-qubit Grover victim.

Builds the victim and attacker circuits, schedules them on a shared
timeline, runs a Monte-Carlo trajectory simulation with static-ZZ,
quasi-static-detuning, and depolarizing noise, and evaluates dynamical
decoupling and buffer-zone countermeasures.
"""

from .attack import AttackSpec, build_attack_trail, build_placebo, compose
from .circuit import (
    Circuit,
    DurationTable,
    Gate,
    Instruction,
    ScheduledCircuit,
    TimedInstruction,
    idle_windows,
    schedule,
    unschedule,
)
from .dd import XX, XYXY, DDSequence, apply_buffer, pad_dd, refocusing_check, sequence_by_name
from .engine import (
    Counts,
    TrajectorySample,
    classical_fidelity,
    derive_seed,
    marked_probability,
    noiseless_distribution,
    sample_trajectory,
    simulate,
)
from .errors import (
    CircuitError,
    CompositionError,
    ConfigError,
    EngineError,
    HarnessError,
    QasmError,
    QxtalkError,
    ScheduleError,
    TopologyError,
    WindowError,
)
from .grover import GroverSpec, build_grover, ideal_distribution
from .harness import (
    ExperimentConfig,
    ExperimentRecord,
    aggregate,
    read_csv,
    report,
    run_cell,
    run_scenario,
    write_csv,
)
from .qasm import emit_qasm, parse_qasm
from .topology import (
    CouplingMap,
    Layout,
    NoiseConfig,
    NoiseModel,
    effective_zz,
    heavy_hex_map,
    layout_preset,
)

__version__ = "0.1.0"
