"""Named experiment recipes with the reference parameter sets.

Every preset fixes all frequencies, couplings, losses, drive shapes and
integration settings of one reference experiment, with the qubit frequency
resolved self-consistently onto the three-wave resonance.  Presets are fully
deterministic: rerunning one produces bit-identical CSV numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .fockspace import Dims
from .model import DriveConfig, SystemParams
from .perturbation import TargetPair, effective_coupling, effective_resonant_omega_a

# Loss configurations: strong-coupling runs use a uniform loss well below the
# effective coupling; weak-coupling runs use kappa = eta = 10*gamma above it.
STRONG_LOSS = 1e-4
WEAK_LOSS = 2.5e-3

DEFAULT_OMEGA_M = 0.3
DEFAULT_LAM = 0.01
DEFAULT_G = 0.03
PULSE_CENTER = 100.0
CONTINUOUS_AMPLITUDE = 12.0


@dataclass(frozen=True)
class Integration:
    """Fixed-step integrator settings."""

    dt: float = 0.02
    t_end: float = 1e4
    store_every: int = 20

    def __post_init__(self):
        if self.dt <= 0 or self.t_end <= 0:
            raise ValueError("dt and t_end must be positive")
        if self.store_every < 1:
            raise ValueError("store_every must be >= 1")


@dataclass(frozen=True)
class ScanSpec:
    """Qubit-frequency grid for level scans."""

    omega_a_min: float
    omega_a_max: float
    points: int = 201

    def __post_init__(self):
        if self.omega_a_max <= self.omega_a_min:
            raise ValueError("omega_a_max must exceed omega_a_min")
        if self.points < 2:
            raise ValueError("scan needs at least 2 grid points")


@dataclass(frozen=True)
class SweepSpec:
    """One swept axis and the experiment to run at each value."""

    axis: str
    values: tuple
    inner: str

    VALID_AXES = ("omega_m", "lam", "sigma", "loss")
    VALID_INNER = ("evolve", "crossing", "snr")

    def __post_init__(self):
        if self.axis not in self.VALID_AXES:
            raise ValueError(f"sweep axis {self.axis!r} not one of {self.VALID_AXES}")
        if self.inner not in self.VALID_INNER:
            raise ValueError(f"sweep inner experiment {self.inner!r} not one of {self.VALID_INNER}")
        if len(self.values) == 0:
            raise ValueError("sweep needs at least one value")


EXPERIMENTS = ("perturb", "spectrum", "crossing", "evolve", "fft", "steady", "snr", "sweep")


@dataclass(frozen=True)
class ExperimentConfig:
    """A fully validated, self-contained description of one run."""

    experiment: str
    params: SystemParams
    dims: Dims = Dims(6, 6)
    drive: DriveConfig = DriveConfig(kind="off")
    integration: Integration = Integration()
    pairs: tuple = (TargetPair(0, 0),)
    scan: ScanSpec | None = None
    sweep: SweepSpec | None = None
    checkpoint: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}, expected one of {EXPERIMENTS}")
        if self.experiment == "spectrum" and self.scan is None:
            raise ValueError("spectrum experiment requires a scan block")
        if self.experiment == "sweep" and self.sweep is None:
            raise ValueError("sweep experiment requires a sweep block")
        if not self.pairs:
            raise ValueError("at least one target pair is required")


def resonant_params(omega_m: float = DEFAULT_OMEGA_M, lam: float = DEFAULT_LAM,
                    g: float = DEFAULT_G, kappa: float = STRONG_LOSS,
                    eta: float = STRONG_LOSS, gamma: float = STRONG_LOSS) -> SystemParams:
    """System parameters with the qubit tuned onto the shifted three-wave resonance."""
    seed = SystemParams(omega_m=omega_m, omega_a=1.0 - omega_m, lam=lam, g=g,
                        kappa=kappa, eta=eta, gamma=gamma)
    return replace(seed, omega_a=effective_resonant_omega_a(TargetPair(0, 0), seed))


def default_pulse_sigma(params: SystemParams) -> float:
    """Reference pulse width, the inverse of 16x the effective coupling."""
    return 1.0 / (16.0 * abs(effective_coupling(TargetPair(0, 0), params)))


def _pulse_drive(params: SystemParams, amplitude: float,
                 sigma: float | None = None) -> DriveConfig:
    return DriveConfig(
        kind="ultrafast_gaussian", amplitude=amplitude,
        sigma=default_pulse_sigma(params) if sigma is None else sigma,
        t0=PULSE_CENTER, freq_mech=params.omega_m, freq_atom=params.omega_a,
    )


def _continuous_drive(params: SystemParams, mech_enabled: bool = True) -> DriveConfig:
    return DriveConfig(
        kind="continuous", amplitude=CONTINUOUS_AMPLITUDE, gamma_scale=params.gamma,
        freq_mech=params.omega_m, freq_atom=params.omega_a,
        mech_enabled=mech_enabled, atom_enabled=True,
    )


def _pulsed_config(experiment: str, amplitude: float) -> ExperimentConfig:
    params = resonant_params()
    return ExperimentConfig(
        experiment=experiment, params=params,
        drive=_pulse_drive(params, amplitude),
        integration=Integration(dt=0.02, t_end=2e4, store_every=20),
    )


def _weak_coupling_params() -> SystemParams:
    return resonant_params(kappa=WEAK_LOSS, eta=WEAK_LOSS, gamma=WEAK_LOSS / 10.0)


def _continuous_config(mech_enabled: bool) -> ExperimentConfig:
    params = _weak_coupling_params()
    return ExperimentConfig(
        experiment="steady", params=params,
        drive=_continuous_drive(params, mech_enabled=mech_enabled),
        integration=Integration(dt=0.02, t_end=1e4, store_every=20),
    )


def _build_presets() -> dict:
    presets = {}

    strong = resonant_params()
    presets["fig3"] = ExperimentConfig(
        experiment="spectrum", params=strong,
        scan=ScanSpec(omega_a_min=0.60, omega_a_max=0.80, points=201),
        pairs=(TargetPair(0, 0), TargetPair(1, 0), TargetPair(0, 1)),
    )
    presets["fig4"] = ExperimentConfig(
        experiment="sweep", params=strong,
        pairs=(TargetPair(0, 0), TargetPair(0, 1)),
        sweep=SweepSpec(axis="lam", values=(0.002, 0.004, 0.006, 0.008, 0.01),
                        inner="crossing"),
    )

    for suffix, amplitude in (("a", math.pi / 3), ("c", 2 * math.pi / 3), ("e", math.pi)):
        presets[f"fig5{suffix}"] = _pulsed_config("evolve", amplitude)
    for evolve_suffix, fft_suffix in (("a", "b"), ("c", "d"), ("e", "f")):
        presets[f"fig5{fft_suffix}"] = replace(presets[f"fig5{evolve_suffix}"],
                                               experiment="fft")

    presets["fig6a"] = _continuous_config(mech_enabled=True)
    presets["fig6b"] = _continuous_config(mech_enabled=False)

    sigma_ref = default_pulse_sigma(strong)
    presets["fig7a"] = ExperimentConfig(
        experiment="sweep", params=strong,
        drive=_pulse_drive(strong, math.pi),
        integration=Integration(dt=0.02, t_end=2e4, store_every=20),
        sweep=SweepSpec(axis="sigma",
                        values=(sigma_ref, 8.0 * sigma_ref, 16.0 * sigma_ref),
                        inner="evolve"),
    )
    presets["fig7b"] = ExperimentConfig(
        experiment="sweep", params=strong,
        drive=_pulse_drive(strong, math.pi),
        integration=Integration(dt=0.02, t_end=2e4, store_every=20),
        sweep=SweepSpec(axis="loss",
                        values=(1.0 / 8000.0, 1.0 / 5000.0, 1.0 / 3000.0),
                        inner="evolve"),
    )

    weak = _weak_coupling_params()
    presets["fig8"] = ExperimentConfig(
        experiment="sweep", params=weak,
        drive=_continuous_drive(weak),
        integration=Integration(dt=0.02, t_end=1e4, store_every=20),
        sweep=SweepSpec(axis="omega_m",
                        values=(0.01, 0.05, 0.1, 0.15, 0.2, 0.3),
                        inner="snr"),
    )
    return presets


def preset_names() -> tuple:
    return tuple(sorted(_build_presets()))


def preset(name: str) -> ExperimentConfig:
    """Return the exact configuration of a named reference experiment."""
    presets = _build_presets()
    if name not in presets:
        raise KeyError(f"unknown preset {name!r}; available: {', '.join(sorted(presets))}")
    return presets[name]
