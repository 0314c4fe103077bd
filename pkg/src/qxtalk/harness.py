"""End-to-end scenario orchestration, CSV persistence, and plotting.

Scenario 1 runs the Grover victim with delay placebos on every attacker
pair; scenario 2 swaps the placebos for CNOT trails; scenario 3 adds one
mitigation (DD padding of the victim's idle windows, or the buffered
layout).  A sweep covers n_cnot = 0..n_cnot_max, repeated over independent
batches whose seeds derive from (master seed, batch index).  Cells are
independent and may run in parallel; record order and output bytes are
deterministic for a fixed config and seed.
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from .attack import AttackSpec, build_attack_trail, build_placebo, compose
from .circuit import DurationTable, Gate, schedule
from .dd import XX, XYXY, apply_buffer, pad_dd
from .engine import classical_fidelity, derive_seed, marked_probability, simulate
from .errors import ConfigError, HarnessError
from .grover import GroverSpec, build_grover, ideal_distribution
from .svgplot import BLUE, GREEN, MAGENTA, ORANGE, Series, render_chart
from .topology import NoiseConfig, layout_preset

__all__ = [
    "ExperimentConfig",
    "ExperimentRecord",
    "run_cell",
    "run_scenario",
    "aggregate",
    "write_csv",
    "read_csv",
    "report",
    "CSV_COLUMNS",
]

MITIGATIONS = ("none", "dd-xx", "dd-xyxy", "buffer")
CSV_COLUMNS = (
    "scenario", "layout", "mitigation", "control_init", "n_cnot",
    "batch", "seed", "shots", "p_marked", "fidelity",
)

_VICTIM_SPEC = GroverSpec(3, "111", 2)


@dataclass(frozen=True)
class ExperimentConfig:
    """One sweep: (layout, scenario, mitigation, control prep) over
    n_cnot = 0..n_cnot_max and `batches` independent seeds."""

    layout: str = "a"
    scenario: int = 1
    mitigation: str = "none"
    control_init: str = "0"
    n_cnot_max: int = 45
    shots: int = 1024
    batches: int = 20
    seed: int = 0
    noise: NoiseConfig = NoiseConfig()

    def __post_init__(self) -> None:
        if self.scenario not in (1, 2, 3):
            raise ConfigError(f"scenario must be 1, 2 or 3, got {self.scenario}")
        if self.mitigation not in MITIGATIONS:
            raise ConfigError(f"mitigation must be one of {MITIGATIONS}")
        if self.scenario == 3 and self.mitigation == "none":
            raise ConfigError("scenario 3 requires a mitigation")
        if self.scenario != 3 and self.mitigation != "none":
            raise ConfigError(f"scenario {self.scenario} forces mitigation 'none'")
        if self.control_init not in ("0", "1", "+"):
            raise ConfigError("control_init must be one of 0/1/+")
        if self.n_cnot_max < 0 or self.shots <= 0 or self.batches <= 0:
            raise ConfigError("n_cnot_max >= 0 and shots, batches > 0 required")

    @classmethod
    def from_dict(cls, data: dict, base_dir: Path | None = None) -> "ExperimentConfig":
        data = dict(data)
        noise = data.pop("noise", None)
        if noise is None:
            noise_cfg = NoiseConfig()
        elif isinstance(noise, str):
            path = Path(noise)
            if base_dir is not None and not path.is_absolute():
                path = base_dir / path
            noise_cfg = NoiseConfig.from_json(path)
        elif isinstance(noise, dict):
            noise_cfg = NoiseConfig.from_dict(noise)
        else:
            raise ConfigError("noise must be an object or a file path")
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            return cls(noise=noise_cfg, **data)
        except TypeError as exc:
            raise ConfigError(f"bad experiment config: {exc}") from exc

    @classmethod
    def from_json(cls, path: str | Path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        return cls.from_dict(data, base_dir=Path(path).parent)


@dataclass(frozen=True)
class ExperimentRecord:
    """One sweep cell: config keys plus observed metrics."""

    scenario: int
    layout: str
    mitigation: str
    control_init: str
    n_cnot: int
    batch: int
    seed: int
    shots: int
    p_marked: float
    fidelity: float
    wall_ms: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.p_marked <= 1.0 and 0.0 <= self.fidelity <= 1.0):
            raise HarnessError("p_marked and fidelity must lie in [0, 1]")


def run_cell(cfg: ExperimentConfig, n_cnot: int, batch: int) -> ExperimentRecord:
    """Build, compose, and simulate a single (n_cnot, batch) cell."""
    t0 = time.perf_counter()
    durations = DurationTable()
    cmap, layout = layout_preset(cfg.layout, zz_hz=cfg.noise.zz_hz, beta=cfg.noise.beta)
    if cfg.mitigation == "buffer":
        layout = apply_buffer(layout, cmap)

    victim = schedule(build_grover(_VICTIM_SPEC), durations)
    if cfg.mitigation in ("dd-xx", "dd-xyxy"):
        seq = XX if cfg.mitigation == "dd-xx" else XYXY
        victim = pad_dd(victim, set(range(victim.num_qubits)), seq, durations)

    if cfg.scenario != 1 and cfg.control_init != "0":
        prep_gate = Gate.X if cfg.control_init == "1" else Gate.H
        prep_ns = durations.gate_ns[prep_gate]
    else:
        prep_ns = 0.0
    # The trail must fit: past n ~ 28 the shared window outgrows the victim
    # and the added CNOTs trail behind its end.
    window = max(victim.total_duration, n_cnot * durations.gate_ns[Gate.CX] + prep_ns)
    fragments = []
    for pair in layout.attacker_pairs:
        spec = AttackSpec(n_cnot, cfg.control_init, pair)
        if cfg.scenario == 1:
            fragments.append(build_placebo(spec, window, durations))
        else:
            fragments.append(build_attack_trail(spec, window, durations))
    composed = compose(victim, fragments, layout)

    counts = simulate(
        composed, cmap, cfg.noise.noise_model(), cfg.shots,
        derive_seed(cfg.seed, batch), layout,
    )
    ideal = ideal_distribution(_VICTIM_SPEC)
    return ExperimentRecord(
        scenario=cfg.scenario,
        layout=cfg.layout,
        mitigation=cfg.mitigation,
        control_init=cfg.control_init,
        n_cnot=n_cnot,
        batch=batch,
        seed=cfg.seed,
        shots=cfg.shots,
        p_marked=marked_probability(counts, _VICTIM_SPEC.marked),
        fidelity=classical_fidelity(ideal, counts.distribution()),
        wall_ms=(time.perf_counter() - t0) * 1e3,
    )


def run_scenario(cfg: ExperimentConfig, workers: int = 1) -> list[ExperimentRecord]:
    """Run the full (n_cnot, batch) sweep; records sorted by (n_cnot, batch)."""
    cells = [(n, b) for n in range(cfg.n_cnot_max + 1) for b in range(cfg.batches)]

    def one(cell: tuple[int, int]) -> ExperimentRecord:
        n, b = cell
        try:
            return run_cell(cfg, n, b)
        except Exception as exc:
            raise HarnessError(f"cell n_cnot={n} batch={b} failed: {exc}") from exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, cells))
    else:
        records = [one(c) for c in cells]
    return sorted(records, key=lambda r: (r.n_cnot, r.batch))


@dataclass(frozen=True)
class GroupStats:
    """Aggregated metrics for one (config key, n_cnot) group."""

    scenario: int
    layout: str
    mitigation: str
    control_init: str
    n_cnot: int
    count: int
    mean_fidelity: float
    std_fidelity: float
    mean_p_marked: float
    std_p_marked: float


def _mean_std(values: list[float]) -> tuple[float, float]:
    n = len(values)
    mean = sum(values) / n
    var = sum((v - mean) ** 2 for v in values) / n
    return mean, var**0.5


def aggregate(records: list[ExperimentRecord]) -> list[GroupStats]:
    """Per-(config, n_cnot) mean and population std of both metrics."""
    if not records:
        raise HarnessError("no records to aggregate")
    groups: dict[tuple, list[ExperimentRecord]] = {}
    for r in records:
        groups.setdefault(
            (r.scenario, r.layout, r.mitigation, r.control_init, r.n_cnot), []
        ).append(r)
    out = []
    for key in sorted(groups):
        rs = groups[key]
        mf, sf = _mean_std([r.fidelity for r in rs])
        mp, sp = _mean_std([r.p_marked for r in rs])
        out.append(GroupStats(*key, len(rs), mf, sf, mp, sp))
    return out


def _fmt_float(v: float) -> str:
    return format(v, ".9g")


def write_csv(records: list[ExperimentRecord], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([
                r.scenario, r.layout, r.mitigation, r.control_init, r.n_cnot,
                r.batch, r.seed, r.shots, _fmt_float(r.p_marked), _fmt_float(r.fidelity),
            ])


def read_csv(path: str | Path) -> list[ExperimentRecord]:
    records = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise HarnessError(f"unexpected CSV columns {reader.fieldnames}")
        for row in reader:
            records.append(ExperimentRecord(
                scenario=int(row["scenario"]),
                layout=row["layout"],
                mitigation=row["mitigation"],
                control_init=row["control_init"],
                n_cnot=int(row["n_cnot"]),
                batch=int(row["batch"]),
                seed=int(row["seed"]),
                shots=int(row["shots"]),
                p_marked=float(row["p_marked"]),
                fidelity=float(row["fidelity"]),
            ))
    return records


_SERIES_STYLE = {
    (1, "none"): ("no attack", ORANGE, None),
    (2, "none"): ("attack", GREEN, None),
    (3, "dd-xx"): ("attack + DD xx", BLUE, "5,3"),
    (3, "dd-xyxy"): ("attack + DD xyxy", BLUE, None),
    (3, "buffer"): ("attack + buffer", MAGENTA, None),
}


def _series(records: list[ExperimentRecord]) -> list[Series]:
    series = []
    stats = aggregate(records)
    keys = sorted({(g.scenario, g.layout, g.mitigation, g.control_init) for g in stats})
    for scenario, layout, mitigation, control in keys:
        pts = tuple(
            (g.n_cnot, g.mean_fidelity, g.std_fidelity)
            for g in stats
            if (g.scenario, g.layout, g.mitigation, g.control_init)
            == (scenario, layout, mitigation, control)
        )
        label, color, dash = _SERIES_STYLE.get(
            (scenario, mitigation), (f"s{scenario}/{mitigation}", "#555555", None)
        )
        if len(keys) > 1 and len({k[3] for k in keys}) > 1:
            label = f"{label} |{control}>"
        series.append(Series(label, pts, color, dash))
    return series


def render_records_svg(
    records: list[ExperimentRecord], svg_path: str | Path, title: str = ""
) -> None:
    """Render the aggregated mean/std chart of ``records`` to ``svg_path``."""
    if not records:
        raise HarnessError("cannot plot an empty record list")
    Path(svg_path).write_text(render_chart(_series(records), title=title))


def report(
    records: list[ExperimentRecord],
    csv_path: str | Path,
    svg_path: str | Path | None = None,
    title: str = "",
) -> None:
    """Persist records as CSV and, optionally, an aggregated SVG chart."""
    write_csv(records, csv_path)
    if svg_path is not None:
        render_records_svg(records, svg_path, title=title)
