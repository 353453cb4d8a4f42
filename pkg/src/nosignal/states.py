"""Qubit and two-qubit states, Bloch conversions and Alice's measurement."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .exceptions import ContractError, DomainError, StructureError
from .matcore import (
    HERMITIAN_TOL,
    I2,
    PAULIS,
    as_cmatrix,
    herm_eig,
    hermiticity_error,
    ket,
    partial_trace,
    projector,
    tensor_product,
)

STATE_TOL = 1e-10
# Branches with probability below this are treated as absent.
ZERO_PROB = 1e-12


def as_bloch(s, *, unit: bool = False) -> np.ndarray:
    """Validate a Bloch vector and return it as a float array of length 3."""
    v = np.asarray(s, dtype=float).reshape(-1)
    if v.shape != (3,) or not np.all(np.isfinite(v)):
        raise StructureError(f"a Bloch vector needs 3 finite components, got {s!r}")
    norm = float(np.linalg.norm(v))
    if unit and abs(norm - 1.0) > STATE_TOL:
        raise DomainError(f"expected a unit vector, got norm {norm:.12g}")
    if norm > 1.0 + STATE_TOL:
        raise DomainError(f"Bloch vector norm {norm:.12g} exceeds 1")
    return v


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A validated state of ``num_qubits`` qubits.

    The matrix is stored read-only.  Construction fails with
    :class:`ContractError` unless the matrix is Hermitian, unit-trace and
    positive semidefinite, all within ``1e-10``.
    """

    mat: np.ndarray
    num_qubits: int = field(default=0)

    def __post_init__(self):
        m = as_cmatrix(self.mat)
        dim = m.shape[0]
        if m.shape[0] != m.shape[1] or dim & (dim - 1):
            raise StructureError(f"density matrix must be 2^n x 2^n, got {m.shape}")
        n = dim.bit_length() - 1
        if self.num_qubits and self.num_qubits != n:
            raise StructureError(f"{dim}x{dim} matrix does not describe {self.num_qubits} qubits")
        if hermiticity_error(m) > STATE_TOL:
            raise ContractError("density matrix is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise ContractError(f"density matrix trace is {tr:.12g}, not 1")
        lam = herm_eig(m)[0][-1]
        if lam < -STATE_TOL:
            raise ContractError(f"density matrix has negative eigenvalue {lam:.3e}")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "mat", m)
        object.__setattr__(self, "num_qubits", n)

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        return float(np.real(np.trace(self.mat @ self.mat)))

    def is_pure(self, tol: float = STATE_TOL) -> bool:
        return is_pure(self.mat, tol)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mat, dtype=dtype)


class BipartiteState(DensityMatrix):
    """Two-qubit state; factor 0 is Alice, factor 1 is Bob."""

    def __post_init__(self):
        super().__post_init__()
        if self.num_qubits != 2:
            raise StructureError(f"a bipartite state needs 2 qubits, got {self.num_qubits}")

    def bob_marginal(self) -> np.ndarray:
        return partial_trace(self.mat, [2, 2], 0)

    def alice_marginal(self) -> np.ndarray:
        return partial_trace(self.mat, [2, 2], 1)


def matrix_of(rho) -> np.ndarray:
    """Raw matrix from a DensityMatrix or anything array-like."""
    if isinstance(rho, DensityMatrix):
        return rho.mat
    return as_cmatrix(rho)


def is_pure(m, tol: float = STATE_TOL) -> bool:
    """Unit-trace Hermitian ``m`` is pure when its top eigenvalue is 1."""
    m = matrix_of(m)
    if hermiticity_error(m) > HERMITIAN_TOL:
        return False
    w = herm_eig(m)[0]
    return abs(w[0] - 1.0) <= tol and np.all(np.abs(w[1:]) <= tol)


def pure_state(vec) -> DensityMatrix:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    norm = np.linalg.norm(v)
    if norm == 0:
        raise DomainError("cannot build a state from the zero vector")
    return DensityMatrix(projector(v / norm))


def bloch_to_density(s) -> DensityMatrix:
    """(I + s.sigma) / 2 for a Bloch vector with |s| <= 1."""
    s = as_bloch(s)
    m = 0.5 * (I2 + s[0] * PAULIS[0] + s[1] * PAULIS[1] + s[2] * PAULIS[2])
    return DensityMatrix(m, 1)


def density_to_bloch(rho) -> np.ndarray:
    """Bloch vector ``Tr(rho sigma_j)`` of a single-qubit matrix."""
    m = matrix_of(rho)
    if m.shape != (2, 2):
        raise StructureError(f"Bloch vectors describe 2x2 matrices, got {m.shape}")
    return np.array([np.real(np.trace(m @ p)) for p in PAULIS])


def bloch_projector(n, sign: int = 1) -> np.ndarray:
    """Projector (I +/- n.sigma)/2 onto the spin state along +/-n."""
    n = np.asarray(n, dtype=float)
    return 0.5 * (I2 + sign * (n[0] * PAULIS[0] + n[1] * PAULIS[1] + n[2] * PAULIS[2]))


def maximally_mixed(num_qubits: int = 1) -> DensityMatrix:
    d = 2**num_qubits
    return DensityMatrix(np.eye(d, dtype=complex) / d, num_qubits)


def singlet() -> BipartiteState:
    """(|01> - |10>)/sqrt(2)."""
    psi = (ket(0, 1) - ket(1, 0)) / np.sqrt(2)
    return BipartiteState(projector(psi), 2)


def partially_entangled(theta: float) -> BipartiteState:
    """cos(theta)|01> - sin(theta)|10>, theta in [0, pi/2].

    ``theta = pi/4`` is the singlet; ``theta = 0`` is the product ``|01>``.
    """
    theta = float(theta)
    if not (0.0 <= theta <= np.pi / 2) or not np.isfinite(theta):
        raise DomainError(f"theta must lie in [0, pi/2], got {theta!r}")
    psi = np.cos(theta) * ket(0, 1) - np.sin(theta) * ket(1, 0)
    return BipartiteState(projector(psi), 2)


def random_pure_vector(dim: int, rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_density(dim: int, rng: np.random.Generator, rank: Optional[int] = None) -> np.ndarray:
    """Random full- or fixed-rank density matrix (Ginibre ensemble)."""
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unit_vectors(count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` uniform points on the unit sphere, from normalized Gaussian triples."""
    g = rng.normal(size=(count, 3))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


@dataclass(frozen=True, eq=False)
class Branch:
    probability: float
    state: np.ndarray
    outcome: int
    # Zero-probability branches keep a placeholder I/2 state and are skipped.
    absent: bool = False


@dataclass(frozen=True, eq=False)
class ConditionalEnsemble:
    """Bob's states conditioned on each outcome of Alice's measurement."""

    branches: List[Branch]

    def __post_init__(self):
        total = sum(b.probability for b in self.branches)
        if abs(total - 1.0) > STATE_TOL:
            raise ContractError(f"branch probabilities sum to {total:.12g}")

    @property
    def present(self) -> List[Branch]:
        return [b for b in self.branches if not b.absent]

    def average(self) -> np.ndarray:
        return sum(b.probability * b.state for b in self.present)

    @classmethod
    def from_pairs(cls, pairs) -> "ConditionalEnsemble":
        """Build from ``(probability, state)`` pairs, e.g. a decomposition of a mixed state."""
        branches = []
        for i, (p, rho) in enumerate(pairs):
            m = matrix_of(rho)
            branches.append(Branch(float(p), m, i, absent=p < ZERO_PROB))
        return cls(branches)


def measure_alice(rho, n) -> ConditionalEnsemble:
    """Alice measures spin along unit vector ``n``; returns Bob's two branches.

    Branch ``+1`` corresponds to Alice finding ``+n``, ``-1`` to ``-n``.
    """
    m = matrix_of(rho)
    if m.shape != (4, 4):
        raise StructureError(f"measure_alice needs a two-qubit state, got {m.shape}")
    n = as_bloch(n, unit=True)
    branches = []
    for sign in (1, -1):
        post = tensor_product(bloch_projector(n, sign), I2) @ m
        bob = partial_trace(post, [2, 2], 0)
        p = float(np.real(np.trace(bob)))
        if p < ZERO_PROB:
            branches.append(Branch(max(p, 0.0), np.eye(2, dtype=complex) / 2, sign, absent=True))
        else:
            bob = bob / p
            branches.append(Branch(p, 0.5 * (bob + bob.conj().T), sign))
    return ConditionalEnsemble(branches)
