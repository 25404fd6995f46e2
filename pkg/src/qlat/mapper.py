"""Reference scheduler/placer/router on the tiled fabric.

A deliberately simple deterministic baseline that produces a simulated
"actual" latency to validate and calibrate the estimator against:

* initial placement scatters qubits uniformly at random (seeded) over
  distinct tiles;
* list scheduling dispatches dependency-ready operations earliest-first;
* a one-qubit operation runs where its qubit sits (or in the nearest free
  tile when that one is shared, one hop per move);
* a CNOT routes both operands along Manhattan x-then-y paths to the midpoint
  tile (nearest free tile on conflict, ties toward smaller coordinates);
* every hop costs ``move_time_us`` and each channel segment carries at most
  ``channel_capacity`` qubits at a time, excess waiting in FIFO order.
"""

from __future__ import annotations

import heapq
import math
import random
from dataclasses import dataclass, replace

from .circuit import Circuit, GateKind
from .config import FabricConfig
from .estimator import estimate
from .qodg import START_ID, build_qodg

Coord = tuple[int, int]


class FabricTooSmallError(ValueError):
    """Raised when a circuit needs more qubits than the fabric has tiles."""


@dataclass(frozen=True)
class TraceEvent:
    time_us: float
    kind: str        # "place" | "hop" | "op_start" | "op_end"
    subject: int     # qubit index for place/hop, gate index otherwise
    detail: str


@dataclass(frozen=True)
class MappingResult:
    """Outcome of one simulation run."""

    latency_us: float
    op_spans: tuple[tuple[float, float], ...]   # (start, finish) per gate
    total_hops: int
    max_queue: int                              # worst wait, in whole hop slots
    initial_positions: tuple[Coord, ...]
    events: tuple[TraceEvent, ...] = ()

    @property
    def latency_s(self) -> float:
        return self.latency_us * 1e-6


class _Channels:
    """Per-segment booking: ``capacity`` concurrent crossings, FIFO excess."""

    def __init__(self, capacity: int, hop_time: float) -> None:
        self.capacity = capacity
        self.hop_time = hop_time
        self._free: dict[tuple[Coord, Coord], list[float]] = {}
        self.max_queue = 0

    def book(self, a: Coord, b: Coord, t: float) -> float:
        seg = (a, b) if a <= b else (b, a)
        servers = self._free.get(seg)
        if servers is None:
            servers = [0.0] * self.capacity
            self._free[seg] = servers
        start = max(t, servers[0])
        if start > t:
            waited = math.ceil((start - t) / self.hop_time - 1e-9)
            if waited > self.max_queue:
                self.max_queue = waited
        heapq.heapreplace(servers, start + self.hop_time)
        return start


def _midpoint(a: Coord, b: Coord) -> Coord:
    return ((a[0] + b[0]) // 2, (a[1] + b[1]) // 2)


def _nearest_free(origin: Coord, occupied: set[Coord], width: int, length: int) -> Coord:
    """Closest unoccupied tile by Manhattan distance; ties by (x, y)."""
    ox, oy = origin
    for d in range(width + length):
        ring = []
        for dx in range(-d, d + 1):
            x = ox + dx
            if not 0 <= x < width:
                continue
            dy = d - abs(dx)
            for y in ((oy - dy, oy + dy) if dy else (oy,)):
                if 0 <= y < length:
                    ring.append((x, y))
        for cell in sorted(ring):
            if cell not in occupied:
                return cell
    raise FabricTooSmallError("no free tile on the fabric")


def simulate(circuit: Circuit, cfg: FabricConfig, seed: int,
             trace: bool = False) -> MappingResult:
    """Run the event-driven mapping simulation; deterministic given the seed."""
    n_qubits = circuit.qubit_count
    if n_qubits > cfg.area:
        raise FabricTooSmallError(
            f"{n_qubits} qubits need more than {cfg.width}x{cfg.length} tiles")
    graph = build_qodg(circuit)   # also validates the circuit is FT-lowered

    rng = random.Random(seed)
    cells = [(x, y) for x in range(cfg.width) for y in range(cfg.length)]
    placement = rng.sample(cells, n_qubits)
    pos: list[Coord] = list(placement)
    qubit_free = [0.0] * n_qubits
    ulb_busy: dict[Coord, float] = {}
    channels = _Channels(cfg.channel_capacity, cfg.move_time_us)
    total_hops = 0
    events: list[TraceEvent] = []
    if trace:
        for q, cell in enumerate(placement):
            events.append(TraceEvent(0.0, "place", q, f"{cell[0]},{cell[1]}"))

    def route(q: int, dst: Coord, t: float) -> float:
        nonlocal total_hops
        x, y = pos[q]
        while (x, y) != dst:
            if x != dst[0]:
                nxt = (x + (1 if dst[0] > x else -1), y)
            else:
                nxt = (x, y + (1 if dst[1] > y else -1))
            start = channels.book((x, y), nxt, t)
            if trace:
                events.append(TraceEvent(start, "hop", q, f"{x},{y}->{nxt[0]},{nxt[1]}"))
            t = start + cfg.move_time_us
            total_hops += 1
            x, y = nxt
        pos[q] = dst
        return t

    def others_at(exclude: tuple[int, ...]) -> set[Coord]:
        skip = set(exclude)
        return {p for q, p in enumerate(pos) if q not in skip}

    n_nodes = len(graph.nodes)
    indeg = [0] * n_nodes
    for outs in graph.succ:
        for v in outs:
            indeg[v] += 1
    ready_t = [0.0] * n_nodes
    finish = [0.0] * n_nodes
    heap: list[tuple[float, int]] = [(0.0, START_ID)]
    op_spans: list[tuple[float, float]] = [(0.0, 0.0)] * len(circuit.gates)

    while heap:
        t_ready, node_id = heapq.heappop(heap)
        node = graph.nodes[node_id]
        if node.op is None:
            finish[node_id] = t_ready
        elif node.op is GateKind.CNOT:
            qc, qt = node.operands
            meet = _midpoint(pos[qc], pos[qt])
            blocked = others_at((qc, qt))
            if meet in blocked:
                meet = _nearest_free(meet, blocked, cfg.width, cfg.length)
            arr_c = route(qc, meet, max(t_ready, qubit_free[qc]))
            arr_t = route(qt, meet, max(t_ready, qubit_free[qt]))
            start = max(arr_c, arr_t, ulb_busy.get(meet, 0.0))
            fin = start + cfg.delay(GateKind.CNOT)
            ulb_busy[meet] = fin
            qubit_free[qc] = qubit_free[qt] = fin
            finish[node_id] = fin
            op_spans[node_id - 1] = (start, fin)
            if trace:
                events.append(TraceEvent(start, "op_start", node_id - 1,
                                         f"cnot@{meet[0]},{meet[1]}"))
                events.append(TraceEvent(fin, "op_end", node_id - 1, "cnot"))
        else:
            (q,) = node.operands
            t = max(t_ready, qubit_free[q])
            here = pos[q]
            blocked = others_at((q,))
            if here in blocked:
                here = _nearest_free(here, blocked, cfg.width, cfg.length)
                t = route(q, here, t)
            start = max(t, ulb_busy.get(here, 0.0))
            fin = start + cfg.delay(node.op)
            ulb_busy[here] = fin
            qubit_free[q] = fin
            finish[node_id] = fin
            op_spans[node_id - 1] = (start, fin)
            if trace:
                events.append(TraceEvent(start, "op_start", node_id - 1,
                                         f"{node.op.value}@{here[0]},{here[1]}"))
                events.append(TraceEvent(fin, "op_end", node_id - 1, node.op.value))
        for v in graph.succ[node_id]:
            if finish[node_id] > ready_t[v]:
                ready_t[v] = finish[node_id]
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(heap, (ready_t[v], v))

    return MappingResult(
        latency_us=finish[graph.end_id],
        op_spans=tuple(op_spans),
        total_hops=total_hops,
        max_queue=channels.max_queue,
        initial_positions=tuple(placement),
        events=tuple(events),
    )


def events_to_csv(result: MappingResult) -> str:
    """Render the trace as ``time_us,kind,subject,detail`` CSV lines."""
    lines = ["time_us,kind,subject,detail"]
    for ev in result.events:
        lines.append(f"{ev.time_us},{ev.kind},{ev.subject},{ev.detail}")
    return "\n".join(lines) + "\n"


_LOG_V_RANGE = (-5.0, -1.0)
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def calibrate_v(training: list[Circuit], cfg: FabricConfig, seed: int = 0,
                path_factor: str = "paper") -> float:
    """Fit the qubit-speed parameter against simulated training latencies.

    Golden-section search over log10(speed) in [1e-5, 1e-1] minimising the
    mean absolute relative error between estimated and simulated latency.
    Each training circuit is simulated once with seed ``seed + index``.
    """
    if len(training) < 3:
        raise ValueError("need at least 3 training circuits")
    if any(c.cnot_count == 0 for c in training):
        raise ValueError("every training circuit must contain CNOTs")
    sims = [simulate(c, cfg, seed=seed + i).latency_us
            for i, c in enumerate(training)]

    def estimates(log_v: float) -> list[float]:
        cfg_v = replace(cfg, qubit_speed=10.0 ** log_v)
        return [estimate(c, cfg_v, path_factor).latency_us for c in training]

    def error(log_v: float) -> float:
        ests = estimates(log_v)
        return sum(abs(e - s) / s for e, s in zip(ests, sims)) / len(sims)

    lo, hi = _LOG_V_RANGE
    if estimates(lo) == estimates(hi):
        raise ValueError("degenerate training set: estimates are independent of speed")

    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = error(x1), error(x2)
    for _ in range(50):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = error(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = error(x2)
    best = x1 if f1 <= f2 else x2
    return 10.0 ** best
