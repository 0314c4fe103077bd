"""Command-line entry point.

    qxtalk run      --config cfg.json --out results.csv [--svg plot.svg]
                    [--seed N] [--workers N]
    qxtalk simulate --in circuit.txt [--noise noise.json] [--shots 1024]
                    [--seed N] [--layout a..e [--buffered]]
    qxtalk pad-dd   --in circuit.txt --sequence xyxy --qubits 0,1,2 --out padded.txt
    qxtalk report   --in results.csv --svg plot.svg

Exit codes: 0 success, 1 usage error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

from .circuit import DurationTable, schedule, unschedule
from .dd import pad_dd, sequence_by_name
from .engine import simulate
from .errors import QxtalkError
from .harness import ExperimentConfig, read_csv, render_records_svg, report, run_scenario
from .qasm import emit_qasm, parse_qasm
from .topology import CouplingMap, NoiseConfig, layout_preset

USAGE_ERROR = 1
RUNTIME_ERROR = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # exit 1, not argparse's default 2
        self.print_usage(sys.stderr)
        raise _UsageError(message)


class _UsageError(Exception):
    pass


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qxtalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a scenario sweep from a config file")
    run.add_argument("--config", required=True)
    run.add_argument("--out", required=True)
    run.add_argument("--svg")
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int, default=1)

    sim = sub.add_parser("simulate", help="simulate one circuit file")
    sim.add_argument("--in", dest="infile", required=True)
    sim.add_argument("--noise")
    sim.add_argument("--shots", type=int, default=1024)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--layout", choices=list("abcde"))
    sim.add_argument("--buffered", action="store_true")

    pad = sub.add_parser("pad-dd", help="pad idle windows with a DD sequence")
    pad.add_argument("--in", dest="infile", required=True)
    pad.add_argument("--sequence", required=True)
    pad.add_argument("--qubits", required=True, help="comma-separated qubit indices")
    pad.add_argument("--out", required=True)

    rep = sub.add_parser("report", help="plot an existing results CSV")
    rep.add_argument("--in", dest="infile", required=True)
    rep.add_argument("--svg", required=True)
    return parser


def _cmd_run(args) -> int:
    cfg = ExperimentConfig.from_json(args.config)
    if args.seed is not None:
        cfg = dataclasses.replace(cfg, seed=args.seed)
    records = run_scenario(cfg, workers=args.workers)
    title = f"scenario {cfg.scenario}, layout {cfg.layout}, control |{cfg.control_init}>"
    report(records, args.out, args.svg, title=title)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_simulate(args) -> int:
    circuit = parse_qasm(Path(args.infile).read_text())
    noise_cfg = NoiseConfig.from_json(args.noise) if args.noise else NoiseConfig()
    if args.layout:
        cmap, _ = layout_preset(args.layout, args.buffered, noise_cfg.zz_hz, noise_cfg.beta)
        if circuit.num_qubits > cmap.num_qubits:
            raise QxtalkError(
                f"circuit needs {circuit.num_qubits} qubits, layout map has {cmap.num_qubits}"
            )
    else:
        n = circuit.num_qubits
        cmap = CouplingMap(
            n, {(i, i + 1): noise_cfg.zz_hz for i in range(n - 1)}, beta=noise_cfg.beta
        )
    counts = simulate(
        schedule(circuit), cmap, noise_cfg.noise_model(), args.shots, args.seed
    )
    print(json.dumps(
        {"shots": counts.shots, "counts": dict(sorted(counts.counts.items()))}, indent=2
    ))
    return 0


def _cmd_pad_dd(args) -> int:
    circuit = parse_qasm(Path(args.infile).read_text())
    seq = sequence_by_name(args.sequence)
    try:
        qubits = {int(tok) for tok in args.qubits.split(",") if tok.strip() != ""}
    except ValueError:
        raise _UsageError(f"--qubits expects comma-separated integers, got {args.qubits!r}")
    durations = DurationTable()
    padded = pad_dd(schedule(circuit, durations), qubits, seq, durations)
    Path(args.out).write_text(emit_qasm(unschedule(padded)))
    print(f"wrote {args.out}")
    return 0


def _cmd_report(args) -> int:
    records = read_csv(args.infile)
    render_records_svg(records, args.svg)
    print(f"wrote {args.svg}")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "simulate": _cmd_simulate,
    "pad-dd": _cmd_pad_dd,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"qxtalk: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    try:
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"qxtalk: error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (QxtalkError, OSError) as exc:
        print(f"qxtalk: error: {exc}", file=sys.stderr)
        return RUNTIME_ERROR


if __name__ == "__main__":
    sys.exit(main())
