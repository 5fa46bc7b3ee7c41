"""Simulator for mechanically induced photon generation in a qubit-cavity-mechanics system.

Library layers, bottom up: fockspace (truncated operators), model
(Hamiltonians and drives), perturbation (effective couplings and shifts),
spectrum (level scans and avoided crossings), dynamics (dressed-basis master
equation), analysis (spectra, steady states, SNR), presets/cli (experiment
recipes and orchestration).
"""

__version__ = "0.1.0"

from .analysis import (SnrResult, Spectrum, SteadyStateResult, fourier_spectrum,
                       photon_flux, snr, steady_state_value, transition_rate)
from .dynamics import (DissipatorSet, Trajectory, closed_evolve_effective,
                       dressed_jump_operators, evolve, ground_state_density)
from .fockspace import (BasisLabel, Dims, OperatorSet, basis_index, basis_label,
                        basis_state, build_operators, expectation)
from .model import (DriveConfig, SystemParams, build_drive_hamiltonian,
                    build_static_hamiltonian, drive_amplitudes, free_hamiltonian,
                    gaussian_envelope, interaction_hamiltonian)
from .perturbation import (EnergyShifts, PerturbationReport, TargetPair,
                           effective_coupling, effective_resonant_omega_a,
                           energy_shifts, perturbation_report, second_order_element)
from .spectrum import (CrossingResult, LevelScan, eigensystem,
                       find_avoided_crossing, scan_levels)

__all__ = [name for name in dir() if not name.startswith("_")]
