"""Operation dependency graph over a fault-tolerant circuit.

Nodes are gate applications plus two dummy endpoints (start feeds every
qubit's first gate, every qubit's last gate feeds end).  Edges follow
per-qubit data dependencies; parallel edges between the same node pair are
merged so the graph stays simple.  With per-node delays attached, the
longest start-to-end path gives the estimated latency and the per-kind gate
counts along it.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import NamedTuple, TYPE_CHECKING

from .circuit import Circuit, FT_GATES, ONE_QUBIT_FT, GateKind

if TYPE_CHECKING:
    from .config import FabricConfig

START_ID = 0


class QodgNode(NamedTuple):
    """A graph node; ``op`` is None for the dummy start/end nodes."""

    id: int
    op: GateKind | None
    operands: tuple[int, ...] = ()

    @property
    def is_dummy(self) -> bool:
        return self.op is None


@dataclass(frozen=True)
class Qodg:
    """Simple DAG of operations; ``succ[i]`` lists node i's successors."""

    nodes: tuple[QodgNode, ...]
    succ: tuple[tuple[int, ...], ...]
    delays: tuple[float, ...] | None = None

    @property
    def end_id(self) -> int:
        return len(self.nodes) - 1

    @property
    def edge_count(self) -> int:
        return sum(len(s) for s in self.succ)


@dataclass(frozen=True)
class CriticalCounts:
    """Per-kind operation counts along one maximal start-to-end path."""

    cnot_critical: int
    gate_critical: dict[GateKind, int]
    path_length_us: float
    path: tuple[int, ...]


def build_qodg(circuit: Circuit) -> Qodg:
    """Chain gates per qubit into a merged-edge dependency DAG.

    Node ids: 0 is start, gate i maps to node i + 1, the last id is end.
    Raises ValueError if the circuit still contains non-FT gates.
    """
    gates = circuit.gates
    n = len(gates) + 2
    end = n - 1
    nodes: list[QodgNode] = [QodgNode(START_ID, None)]
    succ: list[list[int]] = [[] for _ in range(n)]
    last = [START_ID] * circuit.qubit_count
    ft = FT_GATES
    node = 0
    for g in gates:
        kind = g.kind
        if kind not in ft:
            raise ValueError(f"non-FT gate {kind.value}; lower the circuit first")
        node += 1
        ops = g.operands
        nodes.append(QodgNode(node, kind, ops))
        if len(ops) == 1:
            q0 = ops[0]
            succ[last[q0]].append(node)
            last[q0] = node
        else:
            q0, q1 = ops
            p0, p1 = last[q0], last[q1]
            succ[p0].append(node)
            if p1 != p0:
                succ[p1].append(node)
            last[q0] = last[q1] = node
    nodes.append(QodgNode(end, None))
    for p in sorted({p for p in last if p != START_ID}):
        succ[p].append(end)
    if not gates:
        succ[START_ID].append(end)
    return Qodg(tuple(nodes), tuple(map(tuple, succ)))


def update_delays(graph: Qodg, cfg: "FabricConfig",
                  l_cnot_avg: float, l_g_avg: float) -> Qodg:
    """Attach node delays: gate delay plus the average routing latency.

    CNOT nodes get ``d_cnot + l_cnot_avg``, one-qubit nodes get
    ``d_kind + l_g_avg``, dummy nodes get 0.
    """
    if l_cnot_avg < 0 or l_g_avg < 0:
        raise ValueError("routing latencies must be non-negative")
    lookup: dict[GateKind | None, float] = {
        kind: cfg.delay(kind) + l_g_avg for kind in ONE_QUBIT_FT}
    lookup[GateKind.CNOT] = cfg.delay(GateKind.CNOT) + l_cnot_avg
    lookup[None] = 0.0
    try:
        delays = tuple([lookup[node.op] for node in graph.nodes])
    except KeyError as exc:
        raise ValueError(f"no delay for gate kind {exc.args[0]}") from None
    return replace(graph, delays=delays)


def critical_path(graph: Qodg) -> CriticalCounts:
    """Longest start-to-end path by summed node delays.

    Ties between equally long predecessor choices break toward the lowest
    node id, so the reported per-kind counts are deterministic.
    Raises ValueError on cycles or when delays are missing.
    """
    if graph.delays is None:
        raise ValueError("node delays not attached; call update_delays first")
    n = len(graph.nodes)
    delays = graph.delays
    succ = graph.succ
    indeg = [0] * n
    for outs in succ:
        for v in outs:
            indeg[v] += 1
    neg_inf = float("-inf")
    dist = [neg_inf] * n
    pred = [-1] * n
    dist[START_ID] = delays[START_ID]
    stack = [u for u in range(n) if indeg[u] == 0]
    processed = 0
    while stack:
        u = stack.pop()
        processed += 1
        du = dist[u]
        reachable = du != neg_inf
        for v in succ[u]:
            if reachable:
                cand = du + delays[v]
                if cand > dist[v] or (cand == dist[v] and u < pred[v]):
                    dist[v] = cand
                    pred[v] = u
            indeg[v] -= 1
            if indeg[v] == 0:
                stack.append(v)
    if processed != n:
        raise ValueError("cycle detected: not a DAG")
    end = graph.end_id
    if dist[end] == neg_inf:
        raise ValueError("no start-to-end path")
    path = [end]
    while path[-1] != START_ID:
        path.append(pred[path[-1]])
    path.reverse()
    cnot = 0
    per_kind: dict[GateKind, int] = {}
    nodes = graph.nodes
    for node_id in path:
        op = nodes[node_id].op
        if op is None:
            continue
        if op is GateKind.CNOT:
            cnot += 1
        else:
            per_kind[op] = per_kind.get(op, 0) + 1
    return CriticalCounts(cnot, per_kind, dist[end], tuple(path))


def to_dot(graph: Qodg, highlight: tuple[int, ...] = ()) -> str:
    """DOT rendering for debugging; ``highlight`` marks a path in red."""
    hi = set(zip(highlight, highlight[1:]))
    lines = ["digraph qodg {"]
    for node in graph.nodes:
        if node.op is None:
            label = "start" if node.id == START_ID else "end"
            lines.append(f'  n{node.id} [label="{label}" shape=doublecircle];')
        else:
            ops = " ".join(f"q{q}" for q in node.operands)
            lines.append(f'  n{node.id} [label="{node.op.value} {ops}"];')
    for u, outs in enumerate(graph.succ):
        for v in outs:
            attr = " [color=red penwidth=2]" if (u, v) in hi else ""
            lines.append(f"  n{u} -> n{v}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"
