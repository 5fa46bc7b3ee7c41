"""Truncated qubit (x) cavity (x) mechanics Hilbert space and its elementary operators.

The basis is the tensor-product number basis |j, n, m> with j the qubit state
(g or e), n the photon number and m the phonon number.  Basis ordering is
j-major, then n, then m with m varying fastest; this ordering is fixed so that
matrices and CSV output are reproducible bit-for-bit across runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

QUBIT_STATES = ("g", "e")


@dataclass(frozen=True)
class Dims:
    """Truncation of the joint Hilbert space.

    n_cav photon levels |0>..|n_cav-1| and n_mech phonon levels; the qubit is
    always two-level.  Cutoffs below 2 would make the creation operators
    identically zero, so they are rejected.
    """

    n_cav: int
    n_mech: int
    n_qubit: int = 2

    def __post_init__(self):
        if self.n_qubit != 2:
            raise ValueError(f"qubit dimension must be 2, got {self.n_qubit}")
        if self.n_cav < 2:
            raise ValueError(f"n_cav must be >= 2, got {self.n_cav}")
        if self.n_mech < 2:
            raise ValueError(f"n_mech must be >= 2, got {self.n_mech}")

    @property
    def dim(self) -> int:
        """Total dimension D = 2 * n_cav * n_mech."""
        return self.n_qubit * self.n_cav * self.n_mech


@dataclass(frozen=True)
class BasisLabel:
    """A bare basis state |j, n, m>: qubit state, photon number, phonon number."""

    j: str
    n: int
    m: int

    def __post_init__(self):
        if self.j not in QUBIT_STATES:
            raise ValueError(f"qubit state must be 'g' or 'e', got {self.j!r}")
        if self.n < 0 or self.m < 0:
            raise ValueError(f"negative occupation in {self}")

    def __str__(self):
        return f"|{self.j}{self.n}{self.m}>"


def basis_index(label: BasisLabel, dims: Dims) -> int:
    """Position of |j, n, m> in the fixed basis ordering (j-major, m fastest)."""
    if label.n >= dims.n_cav:
        raise ValueError(f"photon number {label.n} outside truncation n_cav={dims.n_cav}")
    if label.m >= dims.n_mech:
        raise ValueError(f"phonon number {label.m} outside truncation n_mech={dims.n_mech}")
    j = QUBIT_STATES.index(label.j)
    return (j * dims.n_cav + label.n) * dims.n_mech + label.m


def basis_label(index: int, dims: Dims) -> BasisLabel:
    """Inverse of :func:`basis_index`."""
    if not 0 <= index < dims.dim:
        raise ValueError(f"basis index {index} outside 0..{dims.dim - 1}")
    index, m = divmod(index, dims.n_mech)
    j, n = divmod(index, dims.n_cav)
    return BasisLabel(QUBIT_STATES[j], n, m)


def basis_state(label: BasisLabel, dims: Dims) -> np.ndarray:
    """Unit vector of the bare basis state |j, n, m>."""
    vec = np.zeros(dims.dim, dtype=complex)
    vec[basis_index(label, dims)] = 1.0
    return vec


def _destroy(n_levels: int) -> np.ndarray:
    """Single-mode annihilation operator on n_levels Fock states."""
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), k=1).astype(complex)


@dataclass(frozen=True)
class OperatorSet:
    """All elementary operators lifted to the full tensor-product space.

    Adjoint pairs are exact element-wise conjugate transposes and all arrays
    are flagged read-only, so an OperatorSet can be shared freely across
    parallel workers.
    """

    dims: Dims
    a: np.ndarray
    a_dag: np.ndarray
    b: np.ndarray
    b_dag: np.ndarray
    sigma_minus: np.ndarray
    sigma_plus: np.ndarray
    num_cav: np.ndarray
    num_mech: np.ndarray
    num_qubit: np.ndarray


def build_operators(dims: Dims) -> OperatorSet:
    """Construct annihilation/creation/number operators on the truncated space."""
    id_q = np.eye(dims.n_qubit, dtype=complex)
    id_c = np.eye(dims.n_cav, dtype=complex)
    id_m = np.eye(dims.n_mech, dtype=complex)

    a_c = _destroy(dims.n_cav)
    b_m = _destroy(dims.n_mech)
    # sigma_minus = |g><e| in the (g, e) ordering
    sm_q = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)

    a = np.kron(id_q, np.kron(a_c, id_m))
    b = np.kron(id_q, np.kron(id_c, b_m))
    sigma_minus = np.kron(sm_q, np.kron(id_c, id_m))

    num_cav = np.kron(id_q, np.kron(np.diag(np.arange(dims.n_cav, dtype=complex)), id_m))
    num_mech = np.kron(id_q, np.kron(id_c, np.diag(np.arange(dims.n_mech, dtype=complex))))
    num_qubit = np.kron(np.diag(np.array([0.0, 1.0], dtype=complex)), np.kron(id_c, id_m))

    ops = OperatorSet(
        dims=dims,
        a=a,
        a_dag=a.conj().T.copy(),
        b=b,
        b_dag=b.conj().T.copy(),
        sigma_minus=sigma_minus,
        sigma_plus=sigma_minus.conj().T.copy(),
        num_cav=num_cav,
        num_mech=num_mech,
        num_qubit=num_qubit,
    )
    for arr in (ops.a, ops.a_dag, ops.b, ops.b_dag, ops.sigma_minus,
                ops.sigma_plus, ops.num_cav, ops.num_mech, ops.num_qubit):
        arr.setflags(write=False)
    return ops


def expectation(operator: np.ndarray, rho: np.ndarray) -> float:
    """Real part of Tr(operator @ rho)."""
    return float(np.einsum("ij,ji->", operator, rho).real)
