"""Static Hamiltonian of the hybrid system and the time-dependent drives.

All frequencies, couplings and loss rates are expressed in units of the cavity
frequency omega_c, which is fixed to 1.  No rotating-wave approximation is
applied anywhere: the atom-field, radiation-pressure and two-photon (Casimir)
couplings all keep their counter-rotating terms, which the mechanically
induced photon generation requires.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .fockspace import OperatorSet

PERTURBATIVE_COUPLING_LIMIT = 0.1


@dataclass(frozen=True)
class SystemParams:
    """Model frequencies, couplings and loss rates, in units of omega_c.

    lam is the qubit-cavity coupling, g the photon-phonon coupling; kappa,
    eta, gamma are the atomic, photonic and mechanical loss rates.
    """

    omega_m: float
    omega_a: float
    lam: float
    g: float
    kappa: float = 0.0
    eta: float = 0.0
    gamma: float = 0.0
    omega_c: float = 1.0

    def __post_init__(self):
        for name in ("omega_c", "omega_m", "omega_a"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")
        for name in ("lam", "g", "kappa", "eta", "gamma"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.lam / self.omega_c > PERTURBATIVE_COUPLING_LIMIT:
            warnings.warn(
                f"lam/omega_c = {self.lam / self.omega_c:.3g} exceeds the validated "
                f"perturbative range (<= {PERTURBATIVE_COUPLING_LIMIT})",
                UserWarning,
                stacklevel=2,
            )


DRIVE_KINDS = ("ultrafast_gaussian", "continuous", "off")


@dataclass(frozen=True)
class DriveConfig:
    """External drive applied to the mechanics (F1) and the qubit (F2).

    ultrafast_gaussian:  F_i(t) = amplitude * G(t - t0) * cos(carrier * t) with
        G a normalized Gaussian of width sigma, so the envelope integrates to
        `amplitude` regardless of sigma.
    continuous:          F_i(t) = amplitude * gamma_scale * cos(carrier * t),
        where gamma_scale is the mechanical loss rate used as the drive unit.
    off:                 both channels identically zero.
    """

    kind: str = "off"
    amplitude: float = 0.0
    sigma: float | None = None
    t0: float = 0.0
    freq_mech: float = 0.0
    freq_atom: float = 0.0
    mech_enabled: bool = True
    atom_enabled: bool = True
    gamma_scale: float = 0.0

    def __post_init__(self):
        if self.kind not in DRIVE_KINDS:
            raise ValueError(f"unknown drive kind {self.kind!r}, expected one of {DRIVE_KINDS}")
        if not math.isfinite(self.amplitude):
            raise ValueError("drive amplitude must be finite")
        if self.kind == "ultrafast_gaussian" and (self.sigma is None or self.sigma <= 0):
            raise ValueError("ultrafast drive requires sigma > 0")
        if self.kind == "continuous" and self.gamma_scale <= 0:
            raise ValueError("continuous drive requires gamma_scale > 0")


def gaussian_envelope(t, t0: float, sigma: float):
    """Compact normalized Gaussian pulse envelope, unit time integral."""
    arg = (t - t0) / sigma
    return np.exp(-0.5 * arg * arg) / (math.sqrt(2.0 * math.pi) * sigma)


def drive_amplitudes(t: float, cfg: DriveConfig) -> tuple[float, float]:
    """Instantaneous drive strengths (F1 on the mechanics, F2 on the qubit)."""
    if cfg.kind == "off":
        return 0.0, 0.0
    if cfg.kind == "ultrafast_gaussian":
        base = cfg.amplitude * gaussian_envelope(t, cfg.t0, cfg.sigma)
    else:
        base = cfg.amplitude * cfg.gamma_scale
    f1 = base * math.cos(cfg.freq_mech * t) if cfg.mech_enabled else 0.0
    f2 = base * math.cos(cfg.freq_atom * t) if cfg.atom_enabled else 0.0
    return f1, f2


def free_hamiltonian(params: SystemParams, ops: OperatorSet) -> np.ndarray:
    """Uncoupled Hamiltonian, diagonal in the |j, n, m> basis."""
    return (params.omega_a * ops.num_qubit
            + params.omega_c * ops.num_cav
            + params.omega_m * ops.num_mech)


def atom_field_coupling(params: SystemParams, ops: OperatorSet) -> np.ndarray:
    """Qubit-cavity coupling lam * (a^! + a)(sigma_+ + sigma_-), counter-rotating terms kept."""
    return params.lam * (ops.a_dag + ops.a) @ (ops.sigma_plus + ops.sigma_minus)


def radiation_pressure_coupling(params: SystemParams, ops: OperatorSet) -> np.ndarray:
    """Standard optomechanical photon-pressure coupling g * a^! a (b + b^!)."""
    return params.g * ops.num_cav @ (ops.b + ops.b_dag)


def casimir_coupling(params: SystemParams, ops: OperatorSet) -> np.ndarray:
    """Two-photon coupling (g/2)(a^2 + a^!2)(b + b^!) responsible for photon-pair creation."""
    return 0.5 * params.g * (ops.a @ ops.a + ops.a_dag @ ops.a_dag) @ (ops.b + ops.b_dag)


def interaction_hamiltonian(params: SystemParams, ops: OperatorSet) -> np.ndarray:
    """Sum of the three coupling terms."""
    return (atom_field_coupling(params, ops)
            + radiation_pressure_coupling(params, ops)
            + casimir_coupling(params, ops))


def build_static_hamiltonian(params: SystemParams, ops: OperatorSet) -> np.ndarray:
    """Full static Hamiltonian H = H_free + H_int, Hermitian to machine precision."""
    return free_hamiltonian(params, ops) + interaction_hamiltonian(params, ops)


def build_drive_hamiltonian(t: float, cfg: DriveConfig, ops: OperatorSet) -> np.ndarray:
    """Drive Hamiltonian F1(t)(b^! + b) + F2(t)(sigma_+ + sigma_-)."""
    f1, f2 = drive_amplitudes(t, cfg)
    h = np.zeros((ops.dims.dim, ops.dims.dim), dtype=complex)
    if f1 != 0.0:
        h += f1 * (ops.b + ops.b_dag)
    if f2 != 0.0:
        h += f2 * (ops.sigma_minus + ops.sigma_plus)
    return h
