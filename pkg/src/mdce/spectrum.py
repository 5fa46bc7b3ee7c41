"""Energy-level scans versus qubit frequency and avoided-crossing extraction.

Levels are tracked by their overlap with labeled bare states rather than by
sorted index: sorted indices swap identity across a crossing, overlaps do not.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import minimize_scalar

from .fockspace import Dims, basis_index, build_operators
from .model import SystemParams, build_static_hamiltonian
from .perturbation import TargetPair, effective_coupling

HERMITICITY_TOL = 1e-10
ORTHONORMALITY_TOL = 1e-9
OVERLAP_AMBIGUITY = 0.1


class CrossingSearchError(RuntimeError):
    """The tracked pair never approaches inside the scanned window."""


def eigensystem(h: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix."""
    deviation = np.max(np.abs(h - h.conj().T))
    if deviation > HERMITICITY_TOL:
        raise ValueError(f"matrix is not Hermitian: max |H - H^!| = {deviation:.2e}")
    return np.linalg.eigh(h)


@dataclass(frozen=True)
class LevelScan:
    """Eigenvalue curves versus omega_a with bare-state overlaps.

    levels has shape (grid, D) with ascending eigenvalues per point.  overlaps
    has shape (grid, n_labels, D): |<bare_l | psi_k>| for every eigenvector k.
    tracked_index[p, l] is the eigenvector index with maximum overlap on label
    l at grid point p; ambiguous[p, l] flags points where the two largest
    overlaps differ by less than 0.1.
    """

    omega_a_grid: np.ndarray
    levels: np.ndarray
    overlaps: np.ndarray
    labels: tuple
    tracked_index: np.ndarray
    ambiguous: np.ndarray


def _pair_labels(tracked_pairs):
    labels = []
    for pair in tracked_pairs:
        labels.append(pair.state_e)
        labels.append(pair.state_g)
    return tuple(labels)


def scan_levels(params: SystemParams, omega_a_range: tuple[float, float],
                grid_points: int, tracked_pairs, dims: Dims = Dims(6, 6)) -> LevelScan:
    """Diagonalize over a grid of qubit frequencies, tracking the pair states."""
    ops = build_operators(dims)
    labels = _pair_labels(tracked_pairs)
    label_idx = [basis_index(lbl, dims) for lbl in labels]
    grid = np.linspace(omega_a_range[0], omega_a_range[1], grid_points)

    levels = np.empty((grid_points, dims.dim))
    overlaps = np.empty((grid_points, len(labels), dims.dim))
    tracked = np.empty((grid_points, len(labels)), dtype=int)
    ambiguous = np.zeros((grid_points, len(labels)), dtype=bool)

    for p, wa in enumerate(grid):
        h = build_static_hamiltonian(replace(params, omega_a=wa), ops)
        evals, evecs = eigensystem(h)
        levels[p] = evals
        for l, row in enumerate(label_idx):
            amp = np.abs(evecs[row, :])
            overlaps[p, l] = amp
            order = np.argsort(amp)
            tracked[p, l] = order[-1]
            ambiguous[p, l] = amp[order[-1]] - amp[order[-2]] < OVERLAP_AMBIGUITY
    return LevelScan(omega_a_grid=grid, levels=levels, overlaps=overlaps,
                     labels=labels, tracked_index=tracked, ambiguous=ambiguous)


@dataclass(frozen=True)
class CrossingResult:
    """Location and size of the avoided crossing for one target pair.

    predicted_gap is 2*|effective coupling| from the closed form; the
    numerical gap should match it to second-order accuracy.
    """

    pair: TargetPair
    omega_a_star: float
    gap: float
    predicted_gap: float


def _pair_gap(wa: float, params: SystemParams, ops, rows) -> float:
    """Energy distance of the two eigenvectors carrying the pair subspace."""
    h = build_static_hamiltonian(replace(params, omega_a=wa), ops)
    evals, evecs = eigensystem(h)
    weight = np.abs(evecs[rows[0], :]) ** 2 + np.abs(evecs[rows[1], :]) ** 2
    k1, k2 = np.argsort(weight)[-2:]
    return abs(evals[k1] - evals[k2])


def find_avoided_crossing(params: SystemParams, pair: TargetPair,
                          dims: Dims = Dims(6, 6),
                          window: tuple[float, float] | None = None,
                          coarse_points: int = 200) -> CrossingResult:
    """Locate the minimum gap of the tracked pair as omega_a is swept.

    A coarse scan brackets the minimum, which is then refined by
    golden-section search.  The gap is measured between the two eigenvectors
    with the largest total weight on the pair's bare states, which stays
    well-defined on both sides of the crossing.
    """
    if window is None:
        center = params.omega_c - params.omega_m
        window = (center - 0.05 * params.omega_c, center + 0.05 * params.omega_c)
    ops = build_operators(dims)
    rows = (basis_index(pair.state_e, dims), basis_index(pair.state_g, dims))

    grid = np.linspace(window[0], window[1], coarse_points)
    gaps = np.array([_pair_gap(wa, params, ops, rows) for wa in grid])
    k = int(np.argmin(gaps))
    if k == 0 or k == coarse_points - 1:
        raise CrossingSearchError(
            f"gap minimum for pair {pair} sits on the window edge "
            f"{window}; the levels never approach inside it"
        )

    result = minimize_scalar(
        _pair_gap, args=(params, ops, rows), method="golden",
        bracket=(grid[k - 1], grid[k], grid[k + 1]),
        options={"xtol": 1e-10},
    )
    return CrossingResult(
        pair=pair,
        omega_a_star=float(result.x),
        gap=float(result.fun),
        predicted_gap=2.0 * abs(effective_coupling(pair, params)),
    )
