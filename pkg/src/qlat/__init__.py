"""Latency estimation for reversible circuits on a tiled quantum fabric.

Estimates total execution latency from the operation dependency graph,
presence-zone coverage statistics and a queueing model of the routing
channels, without placing or routing anything.  A simple reference
scheduler/placer/router is bundled for validation and calibration.
"""

from .circuit import (Circuit, Gate, GateKind, NetlistError, FT_GATES,
                      ONE_QUBIT_FT, decompose_multicontrol, fredkin_to_toffoli,
                      load, lower_to_ft, parse_netlist, parse_real,
                      serialize_netlist, toffoli_to_ft)
from .config import ConfigError, DEFAULT_DELAYS_US, FabricConfig, load_fabric_config
from .estimator import (CoverageModel, EstimationResult, QueueModel, binomial,
                        cnot_routing_latency, coverage_probability, estimate,
                        expected_coverage, hamiltonian_estimate, queue_delay,
                        uncongested_delay)
from .iig import Iig, NoInteractionsError, ZoneStats, build_iig, zone_stats
from .mapper import (FabricTooSmallError, MappingResult, calibrate_v, simulate,
                     TraceEvent)
from .qodg import (CriticalCounts, Qodg, QodgNode, START_ID, build_qodg,
                   critical_path, to_dot, update_delays)

__version__ = "0.1.0"

__all__ = [
    "Circuit", "Gate", "GateKind", "NetlistError", "FT_GATES", "ONE_QUBIT_FT",
    "decompose_multicontrol", "fredkin_to_toffoli", "load", "lower_to_ft",
    "parse_netlist", "parse_real", "serialize_netlist", "toffoli_to_ft",
    "ConfigError", "DEFAULT_DELAYS_US", "FabricConfig", "load_fabric_config",
    "CoverageModel", "EstimationResult", "QueueModel", "binomial",
    "cnot_routing_latency", "coverage_probability", "estimate",
    "expected_coverage", "hamiltonian_estimate", "queue_delay",
    "uncongested_delay",
    "Iig", "NoInteractionsError", "ZoneStats", "build_iig", "zone_stats",
    "FabricTooSmallError", "MappingResult", "TraceEvent", "calibrate_v",
    "simulate",
    "CriticalCounts", "Qodg", "QodgNode", "START_ID", "build_qodg",
    "critical_path", "to_dot", "update_delays",
]
