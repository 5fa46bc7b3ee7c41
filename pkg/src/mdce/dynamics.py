"""Lindblad master equation in the dressed basis of the full static Hamiltonian.

The jump operators are built once from the static Hamiltonian: each bare
channel o in {sigma_-, a, b} is replaced by the sum of all energy-lowering
transitions of (o + o^!) between dressed eigenstates.  This is the correct
zero-temperature dissipator when the couplings hybridize the bare modes, and
it is deliberately not rebuilt as the drive varies.

Propagation is fixed-step fourth-order Runge-Kutta on the full density matrix,
with the Hermitian part re-symmetrized after every step.  Trace and positivity
are monitored, not enforced: a drifting trace or a significantly negative
eigenvalue signals a misconfigured step size and raises.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .fockspace import OperatorSet, basis_state, expectation
from .model import DriveConfig, SystemParams, drive_amplitudes
from .perturbation import TargetPair, effective_coupling
from .spectrum import eigensystem

logger = logging.getLogger(__name__)

DEGENERACY_TOL = 1e-9
TRACE_ERROR_LIMIT = 1e-4
NEGATIVITY_LIMIT = 1e-4
MIN_EIG_SAMPLE_STRIDE = 100


class IntegrationQualityError(RuntimeError):
    """Trace or positivity drifted beyond tolerance; reduce the step size."""


@dataclass(frozen=True)
class DissipatorSet:
    """Dressed jump operators and their rates (kappa, eta, gamma).

    Each operator keeps only matrix elements <psi_m|(o + o^!)|psi_n> with
    E_n > E_m, so it moves population strictly downward in dressed energy.
    evals/evecs are the eigensystem of the static Hamiltonian used for the
    dressing; excluded_near_degenerate counts level pairs whose spacing fell
    inside the degeneracy tolerance and were therefore dropped.
    """

    o_sigma: np.ndarray
    o_a: np.ndarray
    o_b: np.ndarray
    rates: tuple[float, float, float]
    evals: np.ndarray
    evecs: np.ndarray
    excluded_near_degenerate: int

    @property
    def operators(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        return (self.o_sigma, self.o_a, self.o_b)


def dressed_jump_operators(h_static: np.ndarray, ops: OperatorSet,
                           params: SystemParams) -> DissipatorSet:
    """Build the downward-filtered dissipation operators from the static Hamiltonian."""
    evals, evecs = eigensystem(h_static)
    gap = evals[None, :] - evals[:, None]       # gap[m, n] = E_n - E_m
    keep = gap > DEGENERACY_TOL
    near_degenerate = int(np.sum((gap > 0) & ~keep))
    if near_degenerate:
        logger.debug("dressing dropped %d near-degenerate transition pairs", near_degenerate)

    dressed = []
    for bare in (ops.sigma_minus, ops.a, ops.b):
        x = evecs.conj().T @ (bare + bare.conj().T) @ evecs
        dressed.append(evecs @ (x * keep) @ evecs.conj().T)

    return DissipatorSet(
        o_sigma=dressed[0], o_a=dressed[1], o_b=dressed[2],
        rates=(params.kappa, params.eta, params.gamma),
        evals=evals, evecs=evecs,
        excluded_near_degenerate=near_degenerate,
    )


@dataclass
class Trajectory:
    """Sampled observables of one master-equation run.

    min_eig is the smallest density-matrix eigenvalue, sampled every 100
    stored points (positivity monitor); rho_final is kept for checkpointing.
    """

    times: np.ndarray
    n_qubit: np.ndarray
    n_cav: np.ndarray
    n_mech: np.ndarray
    trace_err: np.ndarray
    min_eig_times: np.ndarray
    min_eig: np.ndarray
    rho_final: np.ndarray | None = None

    @property
    def dt_sample(self) -> float:
        return float(self.times[1] - self.times[0])


def _validate_initial_state(rho0: np.ndarray):
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-10:
        raise ValueError("initial state is not Hermitian")
    if abs(np.trace(rho0).real - 1.0) > 1e-8:
        raise ValueError("initial state does not have unit trace")
    # tolerate integration-level negativity so checkpointed states can resume
    if np.linalg.eigvalsh(rho0)[0] < -1e-8:
        raise ValueError("initial state is not positive semidefinite")


def evolve(rho0: np.ndarray, t_end: float, dt: float, h_static: np.ndarray,
           drive: DriveConfig, diss: DissipatorSet, ops: OperatorSet,
           store_every: int = 1) -> Trajectory:
    """Propagate the master equation with fixed-step RK4.

    Observables are stored every store_every steps (plus t = 0).  Raises
    IntegrationQualityError if |tr rho - 1| exceeds 1e-4 or an eigenvalue
    drops below -1e-4 at a sampled point.
    """
    _validate_initial_state(rho0)
    dim = h_static.shape[0]
    n_steps = int(round(t_end / dt))

    jump_ops = [np.sqrt(rate) * op for rate, op in zip(diss.rates, diss.operators)
                if rate > 0.0]
    n_jump = len(jump_ops)

    # drift = -i H - (1/2) sum_k rate_k O_k^! O_k; the dissipative RHS is then
    # drift@rho + h.c. + sum_k (O_k rho) O_k^!
    drift = -1j * h_static.astype(complex)
    for op in jump_ops:
        drift -= 0.5 * (op.conj().T @ op)

    # The drift and all jump operators are stacked into one tall matrix so each
    # RHS evaluation is two large GEMMs instead of many small ones.
    tall = np.empty(((1 + n_jump) * dim, dim), dtype=complex)
    tall[:dim] = drift
    for k, op in enumerate(jump_ops):
        tall[(k + 1) * dim:(k + 2) * dim] = op
    if n_jump:
        jump_dag_tall = np.concatenate([op.conj().T for op in jump_ops], axis=0)
        wide = np.empty((dim, n_jump * dim), dtype=complex)
        jump_sum = np.empty((dim, dim), dtype=complex)
    work = np.empty_like(tall)
    scratch = np.empty((dim, dim), dtype=complex)

    drive_on = drive.kind != "off" and (drive.mech_enabled or drive.atom_enabled)
    i_b_plus = 1j * (ops.b + ops.b_dag)
    i_s_plus = 1j * (ops.sigma_minus + ops.sigma_plus)

    def rhs(rho: np.ndarray, t: float) -> np.ndarray:
        if drive_on:
            f1, f2 = drive_amplitudes(t, drive)
            np.copyto(tall[:dim], drift)
            if f1 != 0.0:
                np.multiply(i_b_plus, f1, out=scratch)
                tall[:dim] -= scratch
            if f2 != 0.0:
                np.multiply(i_s_plus, f2, out=scratch)
                tall[:dim] -= scratch
        np.matmul(tall, rho, out=work)
        blocks = work.reshape(1 + n_jump, dim, dim)
        out = blocks[0] + blocks[0].conj().T
        if n_jump:
            np.copyto(wide.reshape(dim, n_jump, dim).transpose(1, 0, 2), blocks[1:])
            np.matmul(wide, jump_dag_tall, out=jump_sum)
            out += jump_sum
        return out

    n_stored = n_steps // store_every + 1
    times = np.empty(n_stored)
    obs = {name: np.empty(n_stored) for name in ("n_qubit", "n_cav", "n_mech", "trace_err")}
    min_eig_times, min_eig = [], []

    rho = rho0.astype(complex).copy()
    stored = 0

    def record(t: float, k_stored: int):
        nonlocal stored
        times[k_stored] = t
        obs["n_qubit"][k_stored] = expectation(ops.num_qubit, rho)
        obs["n_cav"][k_stored] = expectation(ops.num_cav, rho)
        obs["n_mech"][k_stored] = expectation(ops.num_mech, rho)
        trace_err = abs(np.trace(rho).real - 1.0)
        obs["trace_err"][k_stored] = trace_err
        if trace_err > TRACE_ERROR_LIMIT:
            raise IntegrationQualityError(
                f"trace error {trace_err:.2e} at t = {t:.6g} exceeds {TRACE_ERROR_LIMIT}; "
                "reduce dt"
            )
        if k_stored % MIN_EIG_SAMPLE_STRIDE == 0:
            smallest = float(np.linalg.eigvalsh(rho)[0])
            min_eig_times.append(t)
            min_eig.append(smallest)
            if smallest < -NEGATIVITY_LIMIT:
                raise IntegrationQualityError(
                    f"density matrix eigenvalue {smallest:.2e} at t = {t:.6g} below "
                    f"-{NEGATIVITY_LIMIT}; reduce dt"
                )
        stored += 1

    record(0.0, 0)
    half = 0.5 * dt
    for k in range(n_steps):
        t = k * dt
        k1 = rhs(rho, t)
        k2 = rhs(rho + half * k1, t + half)
        k3 = rhs(rho + half * k2, t + half)
        k4 = rhs(rho + dt * k3, t + dt)
        rho += (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        rho = 0.5 * (rho + rho.conj().T)
        if (k + 1) % store_every == 0:
            record((k + 1) * dt, stored)

    return Trajectory(
        times=times[:stored],
        n_qubit=obs["n_qubit"][:stored],
        n_cav=obs["n_cav"][:stored],
        n_mech=obs["n_mech"][:stored],
        trace_err=obs["trace_err"][:stored],
        min_eig_times=np.array(min_eig_times),
        min_eig=np.array(min_eig),
        rho_final=rho,
    )


def ground_state_density(ops: OperatorSet) -> np.ndarray:
    """Density matrix of the bare ground state |g, 0, 0>."""
    from .fockspace import BasisLabel
    vec = basis_state(BasisLabel("g", 0, 0), ops.dims)
    return np.outer(vec, vec.conj())


def closed_evolve_effective(pair: TargetPair, params: SystemParams, t_end: float,
                            n_points: int = 2001) -> Trajectory:
    """Analytic two-level Rabi reference for the pair transition.

    Starting in |e, n, m+1>, the survival probability is cos^2(|coupling| t)
    and the photon gain sin^2(|coupling| t): a dissipation-free oracle for the
    dominant slow oscillation of the full simulation.
    """
    rate = abs(effective_coupling(pair, params))
    times = np.linspace(0.0, t_end, n_points)
    survive = np.cos(rate * times) ** 2
    transfer = 1.0 - survive
    zeros = np.zeros_like(times)
    return Trajectory(
        times=times,
        n_qubit=survive.copy(),
        n_cav=pair.n + transfer,
        n_mech=pair.m + survive,
        trace_err=zeros,
        min_eig_times=times[:1],
        min_eig=zeros[:1],
        rho_final=None,
    )
