"""Pulse design for single-shot CCZ gates on three coupled transmons."""

__version__ = "0.1.0"

from .decoherence import amplitude_kraus, apply_channel, average_state_fidelity, evolve_open, phase_kraus
from .fidelity import CCZObjective, extract_phases, intrinsic_fidelity, objective, target_ccz
from .hamiltonian import TransmonChain, build_hamiltonian, coupling_x, coupling_y
from .propagator import EvolutionResult, SubspacePropagator, expm_hermitian, propagate
from .pulses import ControlTable, PulseShape
from .sussade import Chromosome, OptimizerConfig, optimize

__all__ = [
    "CCZObjective",
    "Chromosome",
    "ControlTable",
    "EvolutionResult",
    "OptimizerConfig",
    "PulseShape",
    "SubspacePropagator",
    "TransmonChain",
    "amplitude_kraus",
    "apply_channel",
    "average_state_fidelity",
    "build_hamiltonian",
    "coupling_x",
    "coupling_y",
    "evolve_open",
    "expm_hermitian",
    "extract_phases",
    "intrinsic_fidelity",
    "objective",
    "optimize",
    "phase_kraus",
    "propagate",
    "target_ccz",
]
