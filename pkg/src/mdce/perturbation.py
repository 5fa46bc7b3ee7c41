"""Second-order effective couplings and energy shifts for the three-wave mixing.

The mixing channel couples |e, n, m+1> to |g, n+1, m>: one phonon and one
atomic excitation are annihilated and one photon is created.  This module
provides

* a generic second-order matrix element obtained by brute-force enumeration of
  every intermediate bare state,
* the closed-form effective coupling and energy shifts for the target pair,
* the self-consistent qubit frequency that puts the pair on resonance.

The closed forms and the enumeration agree identically for the pairs used in
practice; the enumeration is the independent check on the closed forms and
vice versa.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .fockspace import BasisLabel, Dims, basis_index, basis_label, build_operators
from .model import SystemParams, free_hamiltonian, interaction_hamiltonian

# Bare-energy denominators closer than this (units of omega_c) are treated as
# degenerate and raise instead of being skipped: silently dropping a path
# would corrupt the sum.
DEGENERACY_TOL = 1e-9


class DegenerateIntermediateError(ValueError):
    """An intermediate state is (near-)degenerate with the initial state."""


class ResonanceSingularityError(ValueError):
    """A closed-form denominator vanishes; the perturbative expression breaks."""


class FixedPointError(RuntimeError):
    """Self-consistent resonance search did not converge."""


@dataclass(frozen=True)
class TargetPair:
    """Identifies the pair |e, n, m+1> <-> |g, n+1, m> by its integers n, m >= 0."""

    n: int
    m: int

    def __post_init__(self):
        if self.n < 0 or self.m < 0:
            raise ValueError(f"pair indices must be >= 0, got {self}")

    @property
    def state_e(self) -> BasisLabel:
        return BasisLabel("e", self.n, self.m + 1)

    @property
    def state_g(self) -> BasisLabel:
        return BasisLabel("g", self.n + 1, self.m)


def minimal_dims(*labels: BasisLabel) -> Dims:
    """Smallest truncation containing every two-step intermediate of the labels.

    Intermediates reach two photons and one phonon beyond the largest state,
    so the cutoffs must exceed the pair by three photon and two phonon levels.
    """
    max_n = max(lbl.n for lbl in labels)
    max_m = max(lbl.m for lbl in labels)
    return Dims(n_cav=max(max_n + 3, 2), n_mech=max(max_m + 2, 2))


def _check_dims(dims: Dims, *labels: BasisLabel):
    need = minimal_dims(*labels)
    if dims.n_cav < need.n_cav or dims.n_mech < need.n_mech:
        raise ValueError(
            f"truncation {dims.n_cav}x{dims.n_mech} too small for {labels}: "
            f"need at least {need.n_cav}x{need.n_mech} so every intermediate exists"
        )


def second_order_element(i: BasisLabel, f: BasisLabel, params: SystemParams,
                         ops=None) -> tuple[float, list[tuple[BasisLabel, float]]]:
    """Generic second-order coupling (i != f) or energy shift (i == f).

    Sums V_fi + sum_k V_fk V_ki / (w_i - w_k) over every bare state k of the
    truncation, excluding i and f.  Returns the total together with the list
    of contributing intermediate states and their individual contributions.
    """
    if ops is None:
        ops = build_operators(minimal_dims(i, f))
    else:
        _check_dims(ops.dims, i, f)
    dims = ops.dims
    v = interaction_hamiltonian(params, ops).real
    energies = free_hamiltonian(params, ops).real.diagonal()

    ii = basis_index(i, dims)
    fi = basis_index(f, dims)
    w_i = energies[ii]

    total = v[fi, ii]
    paths = []
    for k in range(dims.dim):
        if k == ii or k == fi:
            continue
        amp = v[fi, k] * v[k, ii]
        if amp == 0.0:
            continue
        denom = w_i - energies[k]
        if abs(denom) < DEGENERACY_TOL * params.omega_c:
            raise DegenerateIntermediateError(
                f"intermediate {basis_label(k, dims)} is degenerate with {i} "
                f"(|w_i - w_k| = {abs(denom):.2e})"
            )
        contribution = amp / denom
        total += contribution
        paths.append((basis_label(k, dims), float(contribution)))
    return float(total), paths


def effective_coupling(pair: TargetPair, params: SystemParams) -> float:
    """Closed-form coupling between |e, n, m+1> and |g, n+1, m>.

    -g*lam*sqrt(n+1)*sqrt(m+1) * (1/(2*omega_c - omega_m) + 1/omega_m); the
    two-photon coupling feeds the first term, the photon-pressure coupling the
    second, and the atom-field coupling both.
    """
    wc, wm = params.omega_c, params.omega_m
    if abs(wm) < DEGENERACY_TOL or abs(2 * wc - wm) < DEGENERACY_TOL:
        raise ResonanceSingularityError(
            f"effective coupling singular at omega_m = {wm} (needs omega_m != 0, != 2*omega_c)"
        )
    amplitude = np.sqrt(pair.n + 1.0) * np.sqrt(pair.m + 1.0)
    return -params.g * params.lam * amplitude * (1.0 / (2 * wc - wm) + 1.0 / wm)


@dataclass(frozen=True)
class EnergyShifts:
    """Second-order shifts of the pair states and their difference.

    shift_g is the shift of |g, n+1, m>, shift_e that of |e, n, m+1>, and
    offset is the closed-form difference shift_e - shift_g, i.e. the amount by
    which the bare resonance omega_a = omega_c - omega_m must be corrected.
    """

    shift_g: float
    shift_e: float
    offset: float


def _shift_denominators(params: SystemParams):
    wc, wm, wa = params.omega_c, params.omega_m, params.omega_a
    for value, desc in ((wm, "omega_m"), (2 * wc + wm, "2*omega_c + omega_m"),
                        (2 * wc - wm, "2*omega_c - omega_m"),
                        (wa - wc, "omega_a - omega_c"), (wa + wc, "omega_a + omega_c")):
        if abs(value) < DEGENERACY_TOL:
            raise ResonanceSingularityError(f"energy-shift denominator {desc} vanishes")
    return wc, wm, wa


def energy_shifts(pair: TargetPair, params: SystemParams) -> EnergyShifts:
    """Closed-form second-order energy shifts for the target pair."""
    wc, wm, wa = _shift_denominators(params)
    n, m = pair.n, pair.m
    g2 = params.g * params.g
    lam2 = params.lam * params.lam

    shift_g = (-0.25 * g2 * ((n * n + 4 * n * m + 5 * n + 6 * m + 6) / (2 * wc + wm)
                             + (-n * n + 4 * n * m + 6 * m - n) / (2 * wc - wm))
               - (n + 2) * lam2 / (wc + wa)
               - (n + 1) * lam2 / (wa - wc)
               - (n + 1) ** 2 * g2 / wm)

    shift_e = (-0.25 * g2 * ((2 * n * n + 4 * n * m + 6 * n + 2 * m + 4) / (2 * wc + wm)
                             + (-n * n + 4 * n * m + 2 * m + 5 * n + 2) / (2 * wc - wm))
               + n * lam2 / (wc + wa)
               - (n + 1) * lam2 / (wc - wa)
               - n * n * g2 / wm)

    offset = (0.25 * g2 * ((-n * n - n + 4 * m + 2) / (2 * wc + wm)
                           + (-6 * n + 4 * m - 2) / (2 * wc - wm))
              + 2 * (n + 1) * lam2 / (wa - wc)
              + (2 * n + 1) * g2 / wm
              + 2 * (n + 1) * lam2 / (wa + wc))

    return EnergyShifts(shift_g=shift_g, shift_e=shift_e, offset=offset)


def effective_resonant_omega_a(pair: TargetPair, params: SystemParams,
                               tol: float = 1e-12, max_iter: int = 200) -> float:
    """Qubit frequency that puts the pair on resonance, omega_a = omega_c - omega_m - offset.

    The offset depends on omega_a itself, so the equation is solved by
    fixed-point iteration starting from the bare value omega_c - omega_m.
    """
    wa = params.omega_c - params.omega_m
    for _ in range(max_iter):
        offset = energy_shifts(pair, replace(params, omega_a=wa)).offset
        wa_next = params.omega_c - params.omega_m - offset
        if abs(wa_next - wa) < tol:
            return wa_next
        wa = wa_next
    raise FixedPointError(
        f"resonant omega_a did not converge for pair {pair} after {max_iter} iterations"
    )


@dataclass(frozen=True)
class PerturbationReport:
    """Cross-validation of the closed forms against the generic enumeration.

    coupling_generic is evaluated at the bare resonance omega_a =
    omega_c - omega_m, where the enumeration reduces exactly to the closed
    form.  paths lists the intermediate states mediating the coupling.
    """

    pair: TargetPair
    coupling_closed: float
    coupling_generic: float
    shift_g: float
    shift_e: float
    offset: float
    resonant_omega_a: float
    paths: tuple

    @property
    def offset_identity_error(self) -> float:
        """Relative mismatch between shift_e - shift_g and the closed-form offset."""
        diff = self.shift_e - self.shift_g
        scale = max(abs(self.offset), abs(diff), 1e-300)
        return abs(diff - self.offset) / scale


def perturbation_report(pair: TargetPair, params: SystemParams) -> PerturbationReport:
    """Evaluate closed forms and the generic enumeration for one target pair."""
    bare_resonant = replace(params, omega_a=params.omega_c - params.omega_m)
    generic, paths = second_order_element(pair.state_e, pair.state_g, bare_resonant)
    shifts = energy_shifts(pair, params)
    return PerturbationReport(
        pair=pair,
        coupling_closed=effective_coupling(pair, params),
        coupling_generic=generic,
        shift_g=shifts.shift_g,
        shift_e=shifts.shift_e,
        offset=shifts.offset,
        resonant_omega_a=effective_resonant_omega_a(pair, params),
        paths=tuple(paths),
    )
