"""Weak-measurement trajectory simulator for a double-slit interferometer.

Layers:

* :mod:`weaktraj.qcore` -- Gaussian packets, free/slit propagators, patterns
* :mod:`weaktraj.weakval` -- complex weak values and per-slit decomposition
* :mod:`weaktraj.probegrid` -- pointer grids, shifts, weak trajectories
* :mod:`weaktraj.protocol` -- four-crystal photonic protocol and inversion
* :mod:`weaktraj.scenario` -- scenario files, commands, emitted tables
"""

from .units import UnitSystem, HBAR_SI, ELECTRON_MASS_SI
from .qcore import (GaussianPacket, StateSpec, SlitGeometry, free_propagator,
                    packet_value, state_value, slit_propagator,
                    fraunhofer_pattern, two_slit_pre_state,
                    collimated_post_state)
from .weakval import (InteractionProfile, WeakValueRecord, overlap,
                      projector_weak_value, momentum_weak_value,
                      projector_weak_value_sum_rule, per_slit_component,
                      overlap_ratio)
from .probegrid import (Probe, PointerReadout, WeakTrajectory, probe_grid,
                        evaluate_grid, admissible_postselections,
                        extract_trajectories)
from .protocol import (Crystal, PolarizationState, ContrastSet, ProtocolSetup,
                       apply_crystal, run_step, run_single_slit_scheme,
                       invert_two_slit, invert_single_slit, parse_paths,
                       protocol_report)
from .scenario import ScenarioConfig, EmittedTable, load_scenario

__version__ = "0.1.0"

__all__ = [
    "UnitSystem", "HBAR_SI", "ELECTRON_MASS_SI",
    "GaussianPacket", "StateSpec", "SlitGeometry", "free_propagator",
    "packet_value", "state_value", "slit_propagator", "fraunhofer_pattern",
    "two_slit_pre_state", "collimated_post_state",
    "InteractionProfile", "WeakValueRecord", "overlap",
    "projector_weak_value", "momentum_weak_value",
    "projector_weak_value_sum_rule", "per_slit_component", "overlap_ratio",
    "Probe", "PointerReadout", "WeakTrajectory", "probe_grid",
    "evaluate_grid", "admissible_postselections", "extract_trajectories",
    "Crystal", "PolarizationState", "ContrastSet", "ProtocolSetup",
    "apply_crystal", "run_step", "run_single_slit_scheme", "invert_two_slit",
    "invert_single_slit", "parse_paths", "protocol_report",
    "ScenarioConfig", "EmittedTable", "load_scenario",
]
