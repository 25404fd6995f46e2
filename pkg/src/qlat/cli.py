"""Command-line front end.

Modes: ``estimate`` (fast latency estimate), ``simulate`` (reference
mapper), ``compare`` (both, with error/speedup columns), ``calibrate``
(fit the qubit-speed parameter against the mapper) and ``generate``
(seeded random circuits for scaling studies).

Exit codes: 0 success, 1 usage error, 2 input error, 3 configuration error.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from collections import deque
from dataclasses import dataclass
from pathlib import Path

from .circuit import (Circuit, Gate, GateKind, NetlistError, load,
                      lower_to_ft, serialize_netlist)
from .config import ConfigError, FabricConfig, apply_settings, load_fabric_config
from .estimator import EstimationResult, PATH_FACTORS, estimate
from .mapper import FabricTooSmallError, calibrate_v, events_to_csv, simulate


class UsageError(ValueError):
    pass


class InputError(ValueError):
    pass


MODES = ("estimate", "simulate", "compare", "calibrate", "generate")


@dataclass(frozen=True)
class RunConfig:
    """One parsed invocation: a single mode plus its validated fabric."""

    mode: str
    inputs: tuple[str, ...]
    fabric: FabricConfig
    out: str | None
    fmt: str
    seed: int
    path_factor: str


@dataclass(frozen=True)
class BenchRow:
    """One circuit's estimate-versus-simulation comparison."""

    name: str
    qubit_count: int
    op_count: int
    estimated_s: float
    estimator_runtime_s: float
    simulated_s: float | None = None
    mapper_runtime_s: float | None = None

    @property
    def error_pct(self) -> float | None:
        if self.simulated_s is None:
            return None
        return abs(self.simulated_s - self.estimated_s) / self.simulated_s * 100.0

    @property
    def speedup(self) -> float | None:
        if self.mapper_runtime_s is None or self.estimator_runtime_s <= 0:
            return None
        return self.mapper_runtime_s / self.estimator_runtime_s

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "qubit_count": self.qubit_count,
            "op_count": self.op_count,
            "estimated_s": self.estimated_s,
            "simulated_s": self.simulated_s,
            "error_pct": self.error_pct,
            "estimator_runtime_s": self.estimator_runtime_s,
            "mapper_runtime_s": self.mapper_runtime_s,
            "speedup": self.speedup,
        }


# ---------------------------------------------------------------------------
# Random circuit generation
# ---------------------------------------------------------------------------

_ONE_QUBIT_POOL = (GateKind.H, GateKind.T, GateKind.TDAG, GateKind.S,
                   GateKind.X, GateKind.Y, GateKind.Z)


def generate_random_circuit(qubit_count: int, op_count: int,
                            cnot_fraction: float, seed: int) -> Circuit:
    """Seeded random FT circuit with locality-biased CNOT partners.

    Each CNOT prefers a recently used partner of its control (geometric
    decay over recency), keeping interaction degrees bounded the way real
    netlists are.
    """
    if qubit_count < 1 or op_count < 0:
        raise ValueError("need qubit_count >= 1 and op_count >= 0")
    if not 0.0 <= cnot_fraction <= 1.0:
        raise ValueError("cnot_fraction must be in [0, 1]")
    if cnot_fraction > 0 and qubit_count < 2:
        raise ValueError("CNOTs need at least 2 qubits")
    rng = random.Random(seed)
    recent: list[deque[int]] = [deque(maxlen=4) for _ in range(qubit_count)]
    gates: list[Gate] = []
    for _ in range(op_count):
        if rng.random() < cnot_fraction:
            a = rng.randrange(qubit_count)
            partners = recent[a]
            if partners and rng.random() < 0.75:
                k = 0
                while k < len(partners) - 1 and rng.random() < 0.5:
                    k += 1
                b = partners[k]
            else:
                b = rng.randrange(qubit_count - 1)
                if b >= a:
                    b += 1
            gates.append(Gate(GateKind.CNOT, (a, b)))
            for u, v in ((a, b), (b, a)):
                if v in recent[u]:
                    recent[u].remove(v)
                recent[u].appendleft(v)
        else:
            kind = _ONE_QUBIT_POOL[rng.randrange(len(_ONE_QUBIT_POOL))]
            gates.append(Gate(kind, (rng.randrange(qubit_count),)))
    return Circuit(qubit_count, tuple(gates))


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # noqa: D102 - argparse hook
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qlat", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="mode", required=True, metavar="MODE")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inputs", action="append", default=[],
                        metavar="PATH", help="input netlist file or directory")
    common.add_argument("--out", default=None, metavar="FILE",
                        help="write output here instead of stdout")
    common.add_argument("--fabric", default=None, metavar="AxB",
                        help="fabric size, e.g. 60x60")
    common.add_argument("--qmax", type=int, default=None, metavar="N",
                        help="truncation order of the coverage series")
    common.add_argument("--seed", type=int, default=0, metavar="N")
    common.add_argument("--path-factor", choices=PATH_FACTORS, default="paper",
                        help="tour-to-path correction: 'paper' uses (m-1)/m, "
                             "'corrected' uses m/(m+1)")
    common.add_argument("--config", default=None, metavar="FILE",
                        help="flat key = value parameter file")
    common.add_argument("--format", dest="fmt", choices=("text", "json", "csv"),
                        default="text")
    common.add_argument("--set", dest="settings", action="append", default=[],
                        metavar="KEY=VALUE", help="override one parameter")
    for mode, desc in (
        ("estimate", "estimate latency without mapping"),
        ("simulate", "run the reference mapper"),
        ("compare", "run estimator and mapper side by side"),
        ("calibrate", "fit qubit speed against the mapper"),
        ("generate", "emit a seeded random circuit"),
    ):
        p = sub.add_parser(mode, parents=[common], help=desc)
        if mode == "simulate":
            p.add_argument("--trace", action="store_true",
                           help="append an event-trace CSV to the output")
        if mode == "generate":
            p.add_argument("--qubits", type=int, required=True)
            p.add_argument("--ops", type=int, required=True)
            p.add_argument("--cnot-fraction", type=float, default=0.4)
    return parser


def _parse_fabric(text: str) -> tuple[int, int]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ConfigError(f"--fabric expects AxB, got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError:
        raise ConfigError(f"--fabric expects integers, got {text!r}") from None


def _build_fabric(args: argparse.Namespace) -> FabricConfig:
    cfg = FabricConfig()
    if args.config:
        cfg = load_fabric_config(args.config, cfg)
    settings: dict[str, str] = {}
    for item in args.settings:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, val = item.partition("=")
        settings[key.strip()] = val.strip()
    if settings:
        cfg = apply_settings(cfg, settings)
    overrides: dict = {}
    if args.fabric:
        overrides["width"], overrides["length"] = _parse_fabric(args.fabric)
    if args.qmax is not None:
        overrides["q_max"] = args.qmax
    if overrides:
        from dataclasses import replace
        cfg = replace(cfg, **overrides)
    return cfg


def _collect_inputs(paths: list[str]) -> list[Path]:
    if not paths:
        raise UsageError("no input given; use --in PATH")
    found: list[Path] = []
    for raw in paths:
        p = Path(raw)
        if p.is_dir():
            matched = sorted(q for q in p.iterdir()
                             if q.suffix.lower() in (".qn", ".real"))
            if not matched:
                raise InputError(f"no .qn or .real files in directory {p}")
            found.extend(matched)
        elif p.is_file():
            found.append(p)
        else:
            raise InputError(f"cannot read input {p}")
    return found


def _load_lowered(path: Path) -> Circuit:
    try:
        return lower_to_ft(load(str(path)))
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except NetlistError as exc:
        raise InputError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Report rendering
# ---------------------------------------------------------------------------

def _sci(x: float | None) -> str:
    return "-" if x is None else f"{x:.3E}"


def _estimate_text(name: str, res: EstimationResult, cfg: FabricConfig) -> str:
    crit_1q = sum(res.counts.gate_critical.values())
    lines = [
        f"circuit: {name}",
        f"  qubits: {res.qubit_count}  operations: {res.gate_count}",
        f"  avg zone area: {res.avg_zone_area:.4f} ULB^2",
        f"  d_uncong: {res.d_uncong_us:.4f} us",
        f"  L_cnot_avg: {res.l_cnot_avg_us:.4f} us  L_g_avg: {res.l_g_avg_us:.4f} us",
        f"  critical path: {res.counts.cnot_critical} cnot + {crit_1q} one-qubit ops",
        f"  latency: {res.latency_us:.4f} us = {_sci(res.latency_s)} s",
    ]
    if cfg.d_s_assumed:
        lines.append("  note: d_s is assumed (X/Y/Z class value), not a measured delay")
    return "\n".join(lines) + "\n"


def _report_estimate(inputs: list[Path], cfg: FabricConfig, args) -> str:
    blocks = []
    docs = []
    for path in inputs:
        circuit = _load_lowered(path)
        res = estimate(circuit, cfg, args.path_factor)
        if args.fmt == "text":
            blocks.append(_estimate_text(path.name, res, cfg))
        else:
            docs.append({"input": path.name, "fabric": _fabric_dict(cfg),
                         "result": res.to_dict()})
    if args.fmt == "text":
        return "".join(blocks)
    if args.fmt == "json":
        return json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n"
    # csv: one row per circuit
    lines = ["name,qubit_count,op_count,latency_us,latency_s,l_cnot_avg_us,d_uncong_us"]
    for d in docs:
        r = d["result"]
        lines.append(",".join([
            d["input"], str(r["qubit_count"]), str(r["gate_count"]),
            repr(r["latency_us"]), repr(r["latency_s"]),
            repr(r["l_cnot_avg_us"]), repr(r["d_uncong_us"])]))
    return "\n".join(lines) + "\n"


def _fabric_dict(cfg: FabricConfig) -> dict:
    return {
        "width": cfg.width,
        "length": cfg.length,
        "channel_capacity": cfg.channel_capacity,
        "qubit_speed": cfg.qubit_speed,
        "move_time_us": cfg.move_time_us,
        "q_max": cfg.q_max,
        "delays_us": {k.value: v for k, v in sorted(
            cfg.delays_us.items(), key=lambda kv: kv[0].value)},
        "d_s_assumed": cfg.d_s_assumed,
    }


def _report_simulate(inputs: list[Path], cfg: FabricConfig, args) -> str:
    parts = []
    docs = []
    for path in inputs:
        circuit = _load_lowered(path)
        res = simulate(circuit, cfg, seed=args.seed, trace=getattr(args, "trace", False))
        if args.fmt == "text":
            text = (f"circuit: {path.name}\n"
                    f"  qubits: {circuit.qubit_count}  operations: {len(circuit.gates)}\n"
                    f"  hops: {res.total_hops}  max queue: {res.max_queue}\n"
                    f"  latency: {res.latency_us:.4f} us = {_sci(res.latency_s)} s\n")
            if getattr(args, "trace", False):
                text += events_to_csv(res)
            parts.append(text)
        else:
            doc = {"input": path.name, "latency_us": res.latency_us,
                   "latency_s": res.latency_s, "total_hops": res.total_hops,
                   "max_queue": res.max_queue}
            docs.append(doc)
    if args.fmt == "text":
        return "".join(parts)
    if args.fmt == "json":
        return json.dumps(docs[0] if len(docs) == 1 else docs, indent=2) + "\n"
    lines = ["name,latency_us,latency_s,total_hops,max_queue"]
    for d in docs:
        lines.append(f"{d['input']},{d['latency_us']!r},{d['latency_s']!r},"
                     f"{d['total_hops']},{d['max_queue']}")
    return "\n".join(lines) + "\n"


def compare_circuits(named: list[tuple[str, Circuit]], cfg: FabricConfig,
                     seed: int = 0, path_factor: str = "paper") -> list[BenchRow]:
    """Estimate and simulate each circuit; rows come back in input order."""
    rows = []
    for i, (name, circuit) in enumerate(named):
        t0 = time.perf_counter()
        est = estimate(circuit, cfg, path_factor)
        t1 = time.perf_counter()
        sim = simulate(circuit, cfg, seed=seed + i)
        t2 = time.perf_counter()
        rows.append(BenchRow(
            name=name,
            qubit_count=circuit.qubit_count,
            op_count=len(circuit.gates),
            estimated_s=est.latency_s,
            estimator_runtime_s=t1 - t0,
            simulated_s=sim.latency_s,
            mapper_runtime_s=t2 - t1,
        ))
    return rows


_COMPARE_COLS = ("name", "qubit_count", "op_count", "estimated_s", "simulated_s",
                 "error_pct", "estimator_runtime_s", "mapper_runtime_s", "speedup")


def render_rows(rows: list[BenchRow], fmt: str) -> str:
    if fmt == "json":
        return json.dumps({"rows": [r.to_dict() for r in rows]}, indent=2) + "\n"
    if fmt == "csv":
        lines = [",".join(_COMPARE_COLS)]
        for r in rows:
            d = r.to_dict()
            lines.append(",".join(
                "" if d[c] is None else (d[c] if isinstance(d[c], str) else repr(d[c]))
                for c in _COMPARE_COLS))
        return "\n".join(lines) + "\n"
    header = (f"{'name':<24} {'qubits':>6} {'ops':>8} {'est (s)':>10} "
              f"{'sim (s)':>10} {'err %':>7} {'est rt':>8} {'map rt':>8} {'speedup':>8}")
    lines = [header, "-" * len(header)]
    for r in rows:
        err = "-" if r.error_pct is None else f"{r.error_pct:.2f}"
        spd = "-" if r.speedup is None else f"{r.speedup:.1f}"
        lines.append(
            f"{r.name:<24} {r.qubit_count:>6} {r.op_count:>8} {_sci(r.estimated_s):>10} "
            f"{_sci(r.simulated_s):>10} {err:>7} {r.estimator_runtime_s:>8.3f} "
            f"{(r.mapper_runtime_s or 0.0):>8.3f} {spd:>8}")
    return "\n".join(lines) + "\n"


def _report_compare(inputs: list[Path], cfg: FabricConfig, args) -> str:
    named = [(p.name, _load_lowered(p)) for p in inputs]
    rows = compare_circuits(named, cfg, seed=args.seed, path_factor=args.path_factor)
    return render_rows(rows, args.fmt)


def _report_calibrate(inputs: list[Path], cfg: FabricConfig, args) -> str:
    circuits = [_load_lowered(p) for p in inputs]
    try:
        v = calibrate_v(circuits, cfg, seed=args.seed, path_factor=args.path_factor)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    if args.fmt == "json":
        return json.dumps({"qubit_speed": v}, indent=2) + "\n"
    return f"calibrated qubit_speed: {v:.6g} ULB/us\n"


def _report_generate(args) -> str:
    try:
        circuit = generate_random_circuit(args.qubits, args.ops,
                                          args.cnot_fraction, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return serialize_netlist(circuit)


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def run(argv: list[str] | None = None) -> int:
    """Execute one CLI invocation; returns the process exit status."""
    try:
        args = _build_parser().parse_args(argv)
        fabric = _build_fabric(args)
        if args.mode == "generate":
            output = _report_generate(args)
        else:
            inputs = _collect_inputs(args.inputs)
            handler = {
                "estimate": _report_estimate,
                "simulate": _report_simulate,
                "compare": _report_compare,
                "calibrate": _report_calibrate,
            }[args.mode]
            output = handler(inputs, fabric, args)
        if args.out:
            Path(args.out).write_text(output, encoding="utf-8")
        else:
            sys.stdout.write(output)
        return 0
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (InputError, FabricTooSmallError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
