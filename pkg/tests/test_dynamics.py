"""Dressed dissipators and master-equation propagation."""

from dataclasses import replace

import numpy as np
import pytest

from mdce import (BasisLabel, Dims, DriveConfig, SystemParams, TargetPair, basis_state,
                  build_operators, build_static_hamiltonian, closed_evolve_effective,
                  dressed_jump_operators, effective_coupling, evolve,
                  fourier_spectrum, ground_state_density, transition_rate)
from mdce.dynamics import IntegrationQualityError

PARAMS = SystemParams(omega_m=0.3, omega_a=0.7, lam=0.01, g=0.03,
                      kappa=1e-4, eta=1e-4, gamma=1e-4)


def _pure(label, dims):
    vec = basis_state(label, dims)
    return np.outer(vec, vec.conj())


@pytest.fixture(scope="module")
def uncoupled():
    p = replace(PARAMS, lam=0.0, g=0.0, kappa=0.05, eta=0.05, gamma=0.05)
    ops = build_operators(Dims(4, 3))
    h = build_static_hamiltonian(p, ops)
    return p, ops, h, dressed_jump_operators(h, ops, p)


def test_dressed_equals_bare_in_uncoupled_limit(uncoupled):
    _, ops, _, diss = uncoupled
    assert np.max(np.abs(diss.o_a - ops.a)) < 1e-12
    assert np.max(np.abs(diss.o_b - ops.b)) < 1e-12
    assert np.max(np.abs(diss.o_sigma - ops.sigma_minus)) < 1e-12


def test_dressed_operators_strictly_downward():
    ops = build_operators(Dims(5, 5))
    h = build_static_hamiltonian(PARAMS, ops)
    diss = dressed_jump_operators(h, ops, PARAMS)
    for dressed in diss.operators:
        in_eig = diss.evecs.conj().T @ dressed @ diss.evecs
        upward = diss.evals[None, :] - diss.evals[:, None] <= 1e-9
        assert np.max(np.abs(in_eig[upward])) < 1e-12


def test_dressed_ground_state_is_dark():
    ops = build_operators(Dims(5, 5))
    h = build_static_hamiltonian(PARAMS, ops)
    diss = dressed_jump_operators(h, ops, PARAMS)
    ground = diss.evecs[:, 0]
    for dressed in diss.operators:
        assert np.linalg.norm(dressed @ ground) < 1e-12
    rho0 = np.outer(ground, ground.conj())
    traj = evolve(rho0, 50.0, 0.02, h, DriveConfig(kind="off"), diss, ops, store_every=100)
    for series in (traj.n_qubit, traj.n_cav, traj.n_mech):
        assert np.max(np.abs(series - series[0])) < 1e-8


def test_vacuum_stationary_without_couplings(uncoupled):
    _, ops, h, diss = uncoupled
    rho0 = _pure(BasisLabel("g", 0, 0), ops.dims)
    traj = evolve(rho0, 50.0, 0.02, h, DriveConfig(kind="off"), diss, ops, store_every=50)
    assert np.max(traj.n_qubit) == 0.0
    assert np.max(traj.n_cav) == 0.0
    assert np.max(traj.n_mech) == 0.0


def test_pure_cavity_decay_analytic():
    p = replace(PARAMS, lam=0.0, g=0.0, kappa=0.0, eta=0.05, gamma=0.0)
    ops = build_operators(Dims(4, 2))
    h = build_static_hamiltonian(p, ops)
    diss = dressed_jump_operators(h, ops, p)
    rho0 = _pure(BasisLabel("g", 1, 0), ops.dims)
    traj = evolve(rho0, 100.0, 0.02, h, DriveConfig(kind="off"), diss, ops, store_every=10)
    exact = np.exp(-p.eta * traj.times)
    assert np.max(np.abs(traj.n_cav - exact) / exact) < 1e-4


def test_trace_and_hermiticity_on_driven_run():
    ops = build_operators(Dims(4, 4))
    h = build_static_hamiltonian(PARAMS, ops)
    diss = dressed_jump_operators(h, ops, PARAMS)
    drive = DriveConfig(kind="ultrafast_gaussian", amplitude=np.pi / 3, sigma=20.0,
                        t0=50.0, freq_mech=PARAMS.omega_m, freq_atom=PARAMS.omega_a)
    traj = evolve(ground_state_density(ops), 200.0, 0.02, h, drive, diss, ops,
                  store_every=10)
    assert np.max(traj.trace_err) < 1e-6
    rho = traj.rho_final
    assert np.max(np.abs(rho - rho.conj().T)) < 1e-12
    assert np.min(traj.min_eig) > -1e-6
    assert traj.n_qubit.min() > -1e-8 and traj.n_cav.min() > -1e-8
    assert traj.n_mech.min() > -1e-8


def test_dressed_energy_non_increasing_without_drive():
    ops = build_operators(Dims(4, 4))
    h = build_static_hamiltonian(PARAMS, ops)
    diss = dressed_jump_operators(h, ops, PARAMS)
    rho0 = 0.5 * (_pure(BasisLabel("e", 1, 1), ops.dims) + _pure(BasisLabel("g", 2, 0), ops.dims))
    rho = rho0.copy()
    energies = []
    traj = None
    for _ in range(6):
        traj = evolve(rho, 100.0, 0.02, h, DriveConfig(kind="off"), diss, ops,
                      store_every=500)
        rho = traj.rho_final
        energies.append(float(np.einsum("ij,ji->", h, rho).real))
    assert all(e2 <= e1 + 1e-8 for e1, e2 in zip(energies, energies[1:]))


def test_integration_quality_error_on_coarse_step():
    p = replace(PARAMS, eta=0.3)
    ops = build_operators(Dims(6, 6))
    h = build_static_hamiltonian(p, ops)
    diss = dressed_jump_operators(h, ops, p)
    with pytest.raises(IntegrationQualityError, match="dt"):
        evolve(_pure(BasisLabel("e", 4, 4), ops.dims), 40.0, 0.6, h,
               DriveConfig(kind="off"), diss, ops, store_every=1)


def test_initial_state_validation():
    ops = build_operators(Dims(3, 3))
    h = build_static_hamiltonian(PARAMS, ops)
    diss = dressed_jump_operators(h, ops, PARAMS)
    bad = np.eye(ops.dims.dim, dtype=complex)  # trace != 1
    with pytest.raises(ValueError, match="trace"):
        evolve(bad, 1.0, 0.02, h, DriveConfig(kind="off"), diss, ops)


def test_dt_halving_convergence_short_run():
    ops = build_operators(Dims(6, 6))
    p = replace(PARAMS, kappa=2.5e-3, eta=2.5e-3, gamma=2.5e-4)
    h = build_static_hamiltonian(p, ops)
    diss = dressed_jump_operators(h, ops, p)
    drive = DriveConfig(kind="continuous", amplitude=12.0, gamma_scale=p.gamma,
                        freq_mech=p.omega_m, freq_atom=p.omega_a)
    rho0 = ground_state_density(ops)
    coarse = evolve(rho0, 40.0, 0.02, h, drive, diss, ops, store_every=100)
    fine = evolve(rho0, 40.0, 0.01, h, drive, diss, ops, store_every=200)
    rel = abs(coarse.n_cav[-1] - fine.n_cav[-1]) / abs(fine.n_cav[-1])
    assert rel < 1e-4


def test_closed_two_level_reference():
    pair = TargetPair(0, 0)
    rate = abs(effective_coupling(pair, PARAMS))
    half_transfer_time = np.pi / (2.0 * rate)
    traj = closed_evolve_effective(pair, PARAMS, 2.0 * half_transfer_time, n_points=4001)
    k = np.argmin(np.abs(traj.times - half_transfer_time))
    assert traj.n_cav[k] == pytest.approx(pair.n + 1.0, abs=1e-6)
    assert np.allclose(traj.n_qubit, np.cos(rate * traj.times) ** 2, atol=1e-12)

    # the dominant spectral peak maps back to the coupling rate
    long = closed_evolve_effective(pair, PARAMS, 16.0 * half_transfer_time, n_points=8192)
    spec = fourier_spectrum(long.n_cav, long.dt_sample)
    peaks, _ = spec.peaks()
    assert transition_rate(peaks[0]) == pytest.approx(rate, abs=spec.bin_width / 2.0)
