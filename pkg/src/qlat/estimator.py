"""Latency estimation without placing or routing the circuit.

The estimate works in five steps: (1) derive presence-zone areas from the
interaction graph, (2) estimate the in-zone routing delay of a qubit from
random-point tour-length bounds, (3) place hypothetical zones uniformly at
random and compute the expected fabric area covered by exactly q zones, (4)
turn per-cell occupancy into queueing delays for the routing channels and
average them into one CNOT routing latency, and (5) add the routing
latencies to the per-node gate delays and take the longest dependency-graph
path.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, GateKind
from .config import FabricConfig
from .iig import NoInteractionsError, ZoneStats, build_iig, zone_stats
from .qodg import CriticalCounts, build_qodg, critical_path, update_delays

# Expected length of the shortest tour through n >> 1 uniform random points
# in a unit square, modelled as slope * sqrt(n) + offset.  The estimate uses
# the midpoint of the published lower and upper bounds.
TOUR_BOUND_LOW = (0.708, 0.551)
TOUR_BOUND_HIGH = (0.718, 0.731)
TOUR_SLOPE = (TOUR_BOUND_LOW[0] + TOUR_BOUND_HIGH[0]) / 2
TOUR_OFFSET = (TOUR_BOUND_LOW[1] + TOUR_BOUND_HIGH[1]) / 2

#: Valid values for the tour-to-path correction mode.
PATH_FACTORS = ("paper", "corrected")


@dataclass(frozen=True, eq=False)
class CoverageModel:
    """Coverage probability grid and expected per-occupancy covered areas."""

    grid: np.ndarray            # (width, length); cell (x, y) is grid[x-1, y-1]
    es: tuple[float, ...]       # expected area covered by exactly q zones, q = 1..


@dataclass(frozen=True)
class QueueModel:
    """M/M/1 model of one routing channel holding q qubits.

    Service rate is ``capacity / d_uncong``; the arrival rate is solved from
    the average queue length q, which keeps the model stable (utilisation
    q / (1 + q) < 1 for every q).
    """

    capacity: int
    d_uncong_us: float

    @property
    def service_rate(self) -> float:
        return self.capacity / self.d_uncong_us

    def arrival_rate(self, q: float) -> float:
        return q * self.capacity / ((1 + q) * self.d_uncong_us)

    def wait(self, q: float) -> float:
        """Average waiting (service) time of the congested channel."""
        return (1 + q) * self.d_uncong_us / self.capacity

    def delay(self, q: float) -> float:
        if q <= self.capacity:
            return self.d_uncong_us
        return self.wait(q)


@dataclass(frozen=True)
class EstimationResult:
    """Final latency plus every intermediate the pipeline produced."""

    latency_us: float
    l_cnot_avg_us: float
    l_g_avg_us: float
    d_uncong_us: float
    avg_zone_area: float
    counts: CriticalCounts
    per_q: tuple[tuple[float, float], ...]   # (expected area, delay) for q = 1..
    qubit_count: int
    gate_count: int

    @property
    def latency_s(self) -> float:
        return self.latency_us * 1e-6

    def to_dict(self) -> dict:
        return {
            "latency_us": self.latency_us,
            "latency_s": self.latency_s,
            "l_cnot_avg_us": self.l_cnot_avg_us,
            "l_g_avg_us": self.l_g_avg_us,
            "d_uncong_us": self.d_uncong_us,
            "avg_zone_area": self.avg_zone_area,
            "qubit_count": self.qubit_count,
            "gate_count": self.gate_count,
            "critical": {
                "cnot": self.counts.cnot_critical,
                "one_qubit": {k.value: v for k, v in sorted(
                    self.counts.gate_critical.items(), key=lambda kv: kv[0].value)},
                "path_length_us": self.counts.path_length_us,
            },
            "per_q": [
                {"q": q, "expected_area": es, "delay_us": dq}
                for q, (es, dq) in enumerate(self.per_q, start=1)
            ],
        }


def binomial(n: int, k: int) -> float:
    """Binomial coefficient via the multiplicative recurrence.

    Exact in double precision for n <= 30 (and far beyond for small k).
    """
    if not 0 <= k <= n:
        raise ValueError(f"binomial({n}, {k}) out of range")
    value = 1.0
    for q in range(1, k + 1):
        value = value * (n - q + 1) / q
    return value


def coverage_probability(cfg: FabricConfig, zone_area: float) -> np.ndarray:
    """Probability that each cell is covered by one uniformly placed zone.

    The zone is a ceil(sqrt(zone_area))-sided square dropped uniformly at
    one of the (a-s+1)(b-s+1) grid-aligned positions.  A zone side larger
    than the fabric is clamped to the shorter fabric dimension (with a
    warning) so the placement count stays positive.
    """
    a, b = cfg.width, cfg.length
    side = math.ceil(math.sqrt(zone_area))
    side = max(side, 1)
    if side > min(a, b):
        warnings.warn(
            f"zone side {side} exceeds fabric {a}x{b}; clamping to {min(a, b)}",
            stacklevel=2)
        side = min(a, b)
    placements = (a - side + 1) * (b - side + 1)
    fx = np.array([min(x, a - x + 1, side, a - side + 1) for x in range(1, a + 1)],
                  dtype=float)
    fy = np.array([min(y, b - y + 1, side, b - side + 1) for y in range(1, b + 1)],
                  dtype=float)
    return np.outer(fx, fy) / placements


def expected_coverage(cfg: FabricConfig, grid: np.ndarray, qubit_count: int,
                      q_lo: int = 1, q_hi: int | None = None) -> list[float]:
    """Expected fabric area covered by exactly q zones, for q in [q_lo, q_hi].

    ``q_hi`` defaults to min(qubit_count, cfg.q_max).  For each cell with
    coverage probability p the exact-q term is C(Q, q) p^q (1-p)^(Q-q); the
    (1-p) power goes through exp((Q-q) * log1p(-p)) for p < 1 and is an
    exact 0/1 at p == 1.
    """
    if qubit_count < 1:
        raise ValueError("qubit_count must be >= 1")
    if q_hi is None:
        q_hi = min(qubit_count, cfg.q_max)
    if not 0 <= q_lo <= q_hi <= qubit_count:
        raise ValueError(f"bad q range [{q_lo}, {q_hi}] for Q={qubit_count}")
    p = np.asarray(grid, dtype=float).ravel()
    partial = p < 1.0
    log1m = np.zeros_like(p)
    log1m[partial] = np.log1p(-p[partial])
    full = ~partial
    out: list[float] = []
    coeff = binomial(qubit_count, q_lo)
    for q in range(q_lo, q_hi + 1):
        terms = np.power(p, q) * np.exp((qubit_count - q) * log1m)
        if q < qubit_count:
            terms[full] = 0.0
        else:
            terms[full] = 1.0
        out.append(coeff * float(terms.sum()))
        coeff = coeff * (qubit_count - q) / (q + 1)   # advance C(Q, q) -> C(Q, q+1)
    return out


def _path_factor(degree: int, mode: str) -> float:
    if mode == "paper":
        return (degree - 1) / degree
    if mode == "corrected":
        return degree / (degree + 1)
    raise ValueError(f"path_factor must be one of {PATH_FACTORS}, got {mode!r}")


def hamiltonian_estimate(degree: int, zone_area: float,
                         path_factor: str = "paper") -> float:
    """Expected shortest-path length through a qubit's interaction partners.

    ``degree + 1`` points dropped in a square zone of the given area; the
    tour-length fit is scaled by the zone side and corrected from a closed
    tour to an open path.  Result is in ULB units.
    """
    if degree < 1:
        raise ValueError("degree must be >= 1")
    tour = TOUR_SLOPE * math.sqrt(degree + 1) + TOUR_OFFSET
    return math.sqrt(zone_area) * tour * _path_factor(degree, path_factor)


def uncongested_delay(stats: ZoneStats, cfg: FabricConfig,
                      path_factor: str = "paper") -> float:
    """Average per-operation routing delay with all channels uncongested.

    Per-qubit delay is the expected path length divided by speed and by the
    partner count; the fabric-wide value is the edge-weight-weighted mean
    over interacting qubits.
    """
    num = 0.0
    den = 0
    for degree, area, wsum in zip(stats.degrees, stats.zone_areas, stats.weight_sums):
        if degree < 1:
            continue
        per_qubit = hamiltonian_estimate(degree, area, path_factor) / (cfg.qubit_speed * degree)
        num += wsum * per_qubit
        den += wsum
    if den == 0:
        raise NoInteractionsError("no two-qubit operations")
    return num / den


def queue_delay(q: int, cfg: FabricConfig, d_uncong: float) -> float:
    """Routing delay of a channel occupied by q qubits (capacity-limited)."""
    if q < 1:
        raise ValueError("occupancy must be >= 1")
    if d_uncong < 0:
        raise ValueError("d_uncong must be >= 0")
    return QueueModel(cfg.channel_capacity, d_uncong).delay(q) if d_uncong > 0 else 0.0


def cnot_routing_latency(cov: CoverageModel, cfg: FabricConfig,
                         d_uncong: float) -> float:
    """Average CNOT routing latency: occupancy delays weighted by covered area."""
    total = sum(cov.es)
    if total <= 0.0:
        warnings.warn("coverage series sums to zero; CNOT routing latency set to 0",
                      stacklevel=2)
        return 0.0
    weighted = sum(es * queue_delay(q, cfg, d_uncong)
                   for q, es in enumerate(cov.es, start=1))
    return weighted / total


def estimate(circuit: Circuit, cfg: FabricConfig,
             path_factor: str = "paper") -> EstimationResult:
    """Estimate total execution latency of an FT-lowered circuit.

    Runs the whole pipeline and reports every intermediate quantity.  A
    circuit without CNOTs (including any single-qubit circuit) skips the
    coverage/queueing stages and uses a CNOT routing latency of 0.
    """
    graph = build_qodg(circuit)
    l_g_avg = 2.0 * cfg.move_time_us
    try:
        stats = zone_stats(build_iig(circuit))
    except NoInteractionsError:
        stats = None
    if stats is None:
        d_unc = 0.0
        avg_zone = 0.0
        l_cnot = 0.0
        per_q: tuple[tuple[float, float], ...] = ()
    else:
        d_unc = uncongested_delay(stats, cfg, path_factor)
        avg_zone = stats.avg_zone_area
        grid = coverage_probability(cfg, avg_zone)
        es = expected_coverage(cfg, grid, circuit.qubit_count)
        cov = CoverageModel(grid, tuple(es))
        l_cnot = cnot_routing_latency(cov, cfg, d_unc)
        per_q = tuple(
            (e, queue_delay(q, cfg, d_unc)) for q, e in enumerate(es, start=1))
    counts = critical_path(update_delays(graph, cfg, l_cnot, l_g_avg))
    return EstimationResult(
        latency_us=counts.path_length_us,
        l_cnot_avg_us=l_cnot,
        l_g_avg_us=l_g_avg,
        d_uncong_us=d_unc,
        avg_zone_area=avg_zone,
        counts=counts,
        per_q=per_q,
        qubit_count=circuit.qubit_count,
        gate_count=len(circuit.gates),
    )
