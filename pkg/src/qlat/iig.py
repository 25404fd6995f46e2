"""Interaction graph over logical qubits and presence-zone statistics.

Each undirected edge weight counts the two-qubit operations between a qubit
pair.  A qubit that interacts with ``m`` partners is modelled as roaming a
square presence zone of area ``m + 1``; the fabric-wide average zone area is
the edge-weight-weighted mean over all interacting qubits.
"""

from __future__ import annotations

from dataclasses import dataclass

from .circuit import Circuit, FT_GATES, GateKind


class NoInteractionsError(ValueError):
    """Raised when a circuit contains no two-qubit operations."""


@dataclass(frozen=True)
class Iig:
    """Undirected weighted graph; keys are qubit pairs ``(i, j)`` with i < j."""

    qubit_count: int
    weights: dict[tuple[int, int], int]

    @property
    def edge_count(self) -> int:
        return len(self.weights)


@dataclass(frozen=True)
class ZoneStats:
    """Per-qubit interaction degree, zone area and edge-weight sums."""

    degrees: tuple[int, ...]
    zone_areas: tuple[int, ...]       # degree + 1, in ULB^2
    weight_sums: tuple[int, ...]
    avg_zone_area: float


def build_iig(circuit: Circuit) -> Iig:
    """Count CNOTs per unordered qubit pair; one-qubit gates contribute nothing."""
    weights: dict[tuple[int, int], int] = {}
    get = weights.get
    cnot = GateKind.CNOT
    ft = FT_GATES
    for g in circuit.gates:
        kind = g.kind
        if kind is cnot:
            a, b = g.operands
            key = (a, b) if a < b else (b, a)
            weights[key] = get(key, 0) + 1
        elif kind not in ft:
            raise ValueError(f"non-FT gate {kind.value}; lower the circuit first")
    return Iig(circuit.qubit_count, weights)


def zone_stats(graph: Iig) -> ZoneStats:
    """Degrees, zone areas and the weighted-average zone area.

    Qubits without interactions carry zero weight and drop out of the
    average automatically.  Raises NoInteractionsError when the graph has no
    edges at all (the average is undefined; callers treat the CNOT routing
    latency as zero).
    """
    if not graph.weights:
        raise NoInteractionsError("no two-qubit operations")
    degrees = [0] * graph.qubit_count
    weight_sums = [0] * graph.qubit_count
    for (i, j), w in graph.weights.items():
        degrees[i] += 1
        degrees[j] += 1
        weight_sums[i] += w
        weight_sums[j] += w
    zone_areas = [m + 1 for m in degrees]
    num = sum(w * b for w, b in zip(weight_sums, zone_areas))
    den = sum(weight_sums)
    return ZoneStats(tuple(degrees), tuple(zone_areas), tuple(weight_sums), num / den)


def to_edge_list(graph: Iig) -> str:
    """One ``i j w`` line per edge, sorted by qubit pair."""
    lines = [f"{i} {j} {w}" for (i, j), w in sorted(graph.weights.items())]
    return "\n".join(lines) + ("\n" if lines else "")
