"""Post-processing: Fourier spectra, steady-state values, photon flux and SNR.

Frequencies are angular and in units of the cavity frequency throughout.  A
pair of states coupled at rate r undergoes population oscillation at angular
frequency 2r, so spectral peak positions are mapped to transition rates by
halving; both the raw angular peak and the rate are reported.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.signal import find_peaks

from .dynamics import Trajectory, dressed_jump_operators, evolve, ground_state_density
from .fockspace import Dims, build_operators
from .model import DriveConfig, SystemParams, build_static_hamiltonian
from .perturbation import TargetPair, effective_resonant_omega_a

MIN_SAMPLES = 64
PEAK_MEDIAN_FACTOR = 3.0
STEADY_DRIFT_LIMIT = 0.02
NOISE_FLOOR = 1e-6


class SteadyStateError(RuntimeError):
    """A trajectory did not settle inside the averaging window."""


@dataclass(frozen=True)
class Spectrum:
    """One-sided discrete Fourier magnitude of a real, mean-subtracted series."""

    freqs: np.ndarray
    magnitude: np.ndarray
    samples: int
    dt_sample: float

    @property
    def bin_width(self) -> float:
        return float(self.freqs[1] - self.freqs[0])

    def peaks(self, median_factor: float = PEAK_MEDIAN_FACTOR):
        """Local maxima above median_factor x median magnitude.

        Returns (frequencies, magnitudes) sorted by descending magnitude.
        """
        threshold = median_factor * np.median(self.magnitude)
        idx, _ = find_peaks(self.magnitude, height=threshold)
        order = np.argsort(self.magnitude[idx])[::-1]
        idx = idx[order]
        return self.freqs[idx], self.magnitude[idx]


def fourier_spectrum(series, dt_sample: float) -> Spectrum:
    """Mean-subtracted one-sided DFT magnitude of a real time series.

    A pure cos(w0 t) over an integer number of periods produces a single peak
    of magnitude M/2 at w0.  No window function is applied.
    """
    series = np.asarray(series, dtype=float)
    m = series.size
    if m < MIN_SAMPLES:
        raise ValueError(f"series too short for spectral analysis: {m} < {MIN_SAMPLES}")
    spectrum = np.abs(np.fft.rfft(series - series.mean()))[: m // 2]
    freqs = 2.0 * np.pi * np.fft.rfftfreq(m, d=dt_sample)[: m // 2]
    return Spectrum(freqs=freqs, magnitude=spectrum, samples=m, dt_sample=dt_sample)


def transition_rate(peak_freq):
    """Pair-transition rate corresponding to an angular population-oscillation peak."""
    return 0.5 * np.asarray(peak_freq)


@dataclass(frozen=True)
class SteadyStateResult:
    """Windowed time average with a stationarity check.

    drift compares the means of the two halves of the window; values above
    0.02 mark the trajectory as not steady.
    """

    value: float
    window: tuple[float, float]
    drift: float
    steady: bool


def steady_state_value(traj: Trajectory, observable: str = "n_cav",
                       window_fraction: float = 0.2) -> SteadyStateResult:
    """Average an observable over the final window_fraction of the run."""
    series = np.asarray(getattr(traj, observable))
    times = traj.times
    t_start = times[-1] - window_fraction * (times[-1] - times[0])
    inside = times >= t_start
    if np.count_nonzero(inside) < 4:
        raise ValueError("averaging window is empty; run longer or store more points")
    window = series[inside]
    value = float(window.mean())
    half = window.size // 2
    first, second = window[:half].mean(), window[half:].mean()
    scale = abs(value)
    drift = abs(second - first) / scale if scale > NOISE_FLOOR else abs(second - first)
    return SteadyStateResult(
        value=value,
        window=(float(times[inside][0]), float(times[-1])),
        drift=float(drift),
        steady=bool(drift <= STEADY_DRIFT_LIMIT),
    )


def photon_flux(n_ss: float, cavity_linewidth: float) -> float:
    """Emitted photons per second for a steady intracavity number.

    cavity_linewidth is the angular linewidth in physical units (rad/s);
    the flux is linewidth * n_ss.
    """
    if cavity_linewidth <= 0:
        raise ValueError("cavity linewidth must be positive")
    return cavity_linewidth * n_ss


@dataclass(frozen=True)
class SnrResult:
    """Steady photon numbers with and without the mechanical drive.

    n_signal = n_both - n_atom_only is the photon share attributable to the
    mechanical (three-wave-mixing) channel; eta = n_signal / n_atom_only.
    eta_raw = n_both / n_atom_only is also reported since the split into
    signal and noise photons is a convention.  When the atom-only photon
    number sits below the noise floor, eta is reported as inf and
    noise_floor is set instead of dividing.
    """

    omega_m: float
    omega_a: float
    n_both: float
    n_atom_only: float
    n_signal: float
    eta: float
    eta_raw: float
    noise_floor: bool


def snr(params: SystemParams, omega_m: float, amplitude: float,
        dims: Dims = Dims(6, 6), t_end: float = 1e4, dt: float = 0.02,
        store_every: int = 20, window_fraction: float = 0.2) -> SnrResult:
    """Signal-to-noise ratio of mechanically generated photons at one omega_m.

    Runs the continuous-drive experiment twice, with both drives and with the
    mechanical drive switched off, and compares the steady photon numbers.
    The qubit is retuned to the three-wave resonance for the requested
    mechanical frequency.
    """
    tuned = replace(params, omega_m=omega_m)
    omega_a = effective_resonant_omega_a(TargetPair(0, 0), tuned)
    tuned = replace(tuned, omega_a=omega_a)

    ops = build_operators(dims)
    h = build_static_hamiltonian(tuned, ops)
    diss = dressed_jump_operators(h, ops, tuned)
    rho0 = ground_state_density(ops)

    steadies = []
    for mech_on in (True, False):
        drive = DriveConfig(
            kind="continuous", amplitude=amplitude, gamma_scale=tuned.gamma,
            freq_mech=omega_m, freq_atom=omega_a,
            mech_enabled=mech_on, atom_enabled=True,
        )
        traj = evolve(rho0, t_end, dt, h, drive, diss, ops, store_every=store_every)
        result = steady_state_value(traj, "n_cav", window_fraction)
        if not result.steady:
            raise SteadyStateError(
                f"photon number not steady at omega_m = {omega_m} "
                f"(mech_on={mech_on}, drift = {result.drift:.3f}); run longer"
            )
        steadies.append(result.value)

    n_both, n_atom = steadies
    n_signal = n_both - n_atom
    floor = n_atom < NOISE_FLOOR
    eta = float("inf") if floor else n_signal / n_atom
    eta_raw = float("inf") if floor else n_both / n_atom
    return SnrResult(
        omega_m=omega_m, omega_a=omega_a,
        n_both=n_both, n_atom_only=n_atom, n_signal=n_signal,
        eta=eta, eta_raw=eta_raw, noise_floor=floor,
    )
