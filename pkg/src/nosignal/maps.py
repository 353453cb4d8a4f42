"""Bob's local maps, lawful and otherwise.

Five representations share one application interface, ``apply(m)``:

* :class:`KrausMap` - completely positive, trace preserving by construction.
* :class:`TransferMap` - any Hermiticity-preserving linear map, stored as a
  superoperator acting on column-stacked matrices.
* :class:`BlochAffineCloneMap` - symmetric 1->2 cloner, linear in rho, not
  necessarily positive.
* :class:`BlochNonlinearCloneMap` - the same structure with the shrinking
  replaced by a function of each Bloch component; defined on pure inputs.
* :class:`PureBranchMap` - 1->N map sending |psi> to a mixture (or product)
  of |psi>^N and |psi_perp>^N; defined on pure inputs.

Outputs are returned as raw Hermitian matrices so that non-positive results
remain inspectable.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence, Tuple, Union

import numpy as np

from .exceptions import ContractError, DomainError, StructureError
from .matcore import (
    HERMITIAN_TOL,
    I2,
    PAULIS,
    as_cmatrix,
    dagger,
    hermiticity_error,
    kron_all,
    partial_trace,
)
from .states import (
    STATE_TOL,
    ConditionalEnsemble,
    bloch_to_density,
    density_to_bloch,
    is_pure,
    matrix_of,
)

I4 = np.eye(4, dtype=complex)
# sigma_j (x) I + I (x) sigma_j, and sum_j sigma_j (x) sigma_j
_SYM_PAULI = tuple(np.kron(p, I2) + np.kron(I2, p) for p in PAULIS)
_CORRELATION = sum(np.kron(p, p) for p in PAULIS)


def vec(m: np.ndarray) -> np.ndarray:
    """Column-stacking vectorization."""
    return np.asarray(m).T.reshape(-1)


def unvec(v: np.ndarray, dim: int) -> np.ndarray:
    return np.asarray(v).reshape(dim, dim).T


def _check_square_input(m, d_in: int) -> np.ndarray:
    m = matrix_of(m)
    if m.shape != (d_in, d_in):
        raise StructureError(f"map expects a {d_in}x{d_in} input, got {m.shape}")
    return m


@dataclass(frozen=True, eq=False)
class KrausMap:
    """rho -> sum_i K_i rho K_i^dagger with sum_i K_i^dagger K_i = I."""

    kraus_ops: Tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(as_cmatrix(k) for k in self.kraus_ops)
        if not ops:
            raise StructureError("a Kraus map needs at least one operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise StructureError("Kraus operators must share one shape")
        completeness = sum(dagger(k) @ k for k in ops)
        err = np.max(np.abs(completeness - np.eye(shape[1])))
        if err > 1e-10:
            raise ContractError(f"Kraus operators are not trace preserving (deviation {err:.3e})")
        object.__setattr__(self, "kraus_ops", ops)

    @property
    def d_in(self) -> int:
        return self.kraus_ops[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus_ops[0].shape[0]

    linear = True
    pure_input_only = False

    def apply(self, rho) -> np.ndarray:
        m = _check_square_input(rho, self.d_in)
        return sum(k @ m @ dagger(k) for k in self.kraus_ops)

    @classmethod
    def identity(cls, dim: int = 2) -> "KrausMap":
        return cls((np.eye(dim, dtype=complex),))


@dataclass(frozen=True, eq=False)
class TransferMap:
    """Linear map given by its superoperator on column-stacked matrices.

    ``super_mat`` has shape ``(d_out**2, d_in**2)``.  Construction checks that
    the map sends Hermitian matrices to Hermitian matrices.
    """

    super_mat: np.ndarray

    linear = True
    pure_input_only = False

    def __post_init__(self):
        s = as_cmatrix(self.super_mat)
        d_out, d_in = (int(round(np.sqrt(x))) for x in s.shape)
        if d_out**2 != s.shape[0] or d_in**2 != s.shape[1]:
            raise StructureError(f"superoperator shape {s.shape} is not (d_out^2, d_in^2)")
        s = s.copy()
        s.flags.writeable = False
        object.__setattr__(self, "super_mat", s)
        worst = 0.0
        for i in range(d_in):
            for j in range(i, d_in):
                e = np.zeros((d_in, d_in), dtype=complex)
                e[i, j] = 1.0
                worst = max(worst, float(np.max(np.abs(self.apply(e) - dagger(self.apply(e.T))))))
        if worst > HERMITIAN_TOL:
            raise ContractError(f"transfer map is not Hermiticity preserving (deviation {worst:.3e})")

    @property
    def d_in(self) -> int:
        return int(round(np.sqrt(self.super_mat.shape[1])))

    @property
    def d_out(self) -> int:
        return int(round(np.sqrt(self.super_mat.shape[0])))

    def apply(self, rho) -> np.ndarray:
        m = _check_square_input(rho, self.d_in)
        return unvec(self.super_mat @ vec(m), self.d_out)

    def scaled(self, factor: float) -> "TransferMap":
        return TransferMap(factor * self.super_mat)


@dataclass(frozen=True, eq=False)
class BlochAffineCloneMap:
    """Symmetric 1->2 cloner with shrinking factor ``eta`` and correlation ``t``.

    A qubit with Bloch vector s goes to

        1/4 [I(x)I + eta (s.sigma (x) I + I (x) s.sigma) + t sum_j sigma_j (x) sigma_j]

    The map is extended linearly to all 2x2 matrices (s_j -> Tr(X sigma_j),
    the identity term weighted by Tr X), so mixed inputs are accepted.  It is
    not positive once ``eta > (1 + t)/2``.
    """

    eta: float
    t: float

    linear = True
    pure_input_only = False
    d_in = 2
    d_out = 4

    def __post_init__(self):
        if not (np.isfinite(self.eta) and np.isfinite(self.t)):
            raise DomainError("eta and t must be finite")

    def apply(self, rho) -> np.ndarray:
        m = _check_square_input(rho, 2)
        tr = np.trace(m)
        out = tr * (I4 + self.t * _CORRELATION)
        for p, sym in zip(PAULIS, _SYM_PAULI):
            out = out + self.eta * np.trace(m @ p) * sym
        return out / 4


@dataclass(frozen=True)
class CloneFunction:
    """Named scalar function applied to a Bloch component.

    ``power`` uses exponent ``k``; ``square`` is s**2 and ``abs`` is |s|.
    """

    family: str
    k: int = 1

    FAMILIES = ("power", "square", "abs")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise DomainError(f"unknown function family {self.family!r}; choose from {self.FAMILIES}")
        if self.family == "power" and (int(self.k) != self.k or self.k < 1):
            raise DomainError(f"power exponent must be an integer >= 1, got {self.k!r}")

    def __call__(self, s: float) -> float:
        if self.family == "power":
            return s ** int(self.k)
        if self.family == "square":
            return s * s
        return abs(s)

    @property
    def is_odd(self) -> bool:
        return self.family == "power" and int(self.k) % 2 == 1

    @property
    def label(self) -> str:
        return f"power({self.k})" if self.family == "power" else self.family


def power(k: int) -> CloneFunction:
    return CloneFunction("power", k)


def square() -> CloneFunction:
    return CloneFunction("square")


def absolute() -> CloneFunction:
    return CloneFunction("abs")


@dataclass(frozen=True, eq=False)
class BlochNonlinearCloneMap:
    """Cloner whose clone Bloch components are ``f_j(s_j)`` instead of ``eta s_j``.

    ``f`` is one :class:`CloneFunction` used for all three components, or a
    sequence of three.  Defined only on pure inputs.
    """

    f: Union[CloneFunction, Sequence[CloneFunction]]
    t: float = 0.0

    linear = False
    pure_input_only = True
    d_in = 2
    d_out = 4

    def __post_init__(self):
        fs = (self.f,) * 3 if isinstance(self.f, CloneFunction) else tuple(self.f)
        if len(fs) != 3 or not all(isinstance(g, CloneFunction) for g in fs):
            raise DomainError("f must be a CloneFunction or three of them")
        object.__setattr__(self, "f", fs)
        if not np.isfinite(self.t):
            raise DomainError("t must be finite")

    @property
    def is_affine(self) -> bool:
        return all(g.family == "power" and g.k == 1 for g in self.f)

    def apply(self, rho) -> np.ndarray:
        m = _require_pure_qubit(rho)
        s = density_to_bloch(m)
        out = I4 + self.t * _CORRELATION
        for g, s_j, sym in zip(self.f, s, _SYM_PAULI):
            out = out + g(s_j) * sym
        return out / 4


@dataclass(frozen=True, eq=False)
class PureBranchMap:
    """1->N map on pure states.

    ``mixture``:    |psi><psi| -> F |psi><psi|^N + (1-F) |psi_perp><psi_perp|^N
    ``factorized``: |psi><psi| -> (F |psi><psi| + (1-F) |psi_perp><psi_perp|)^N
    """

    n_clones: int
    fidelity: float
    variant: str = "mixture"

    linear = False
    pure_input_only = True
    d_in = 2

    def __post_init__(self):
        if int(self.n_clones) != self.n_clones or self.n_clones < 2 or self.n_clones > 4:
            raise DomainError(f"n_clones must be an integer in [2, 4], got {self.n_clones!r}")
        if not 0.0 <= self.fidelity <= 1.0:
            raise DomainError(f"fidelity must lie in [0, 1], got {self.fidelity!r}")
        if self.variant not in ("mixture", "factorized"):
            raise DomainError(f"variant must be 'mixture' or 'factorized', got {self.variant!r}")

    @property
    def d_out(self) -> int:
        return 2**self.n_clones

    def apply(self, rho) -> np.ndarray:
        psi = _require_pure_qubit(rho)
        perp = orthogonal_pure(psi)
        n, f = int(self.n_clones), self.fidelity
        if self.variant == "mixture":
            return f * kron_all(*[psi] * n) + (1 - f) * kron_all(*[perp] * n)
        single = f * psi + (1 - f) * perp
        return kron_all(*[single] * n)


LocalMap = Union[KrausMap, TransferMap, BlochAffineCloneMap, BlochNonlinearCloneMap, PureBranchMap]


def _require_pure_qubit(rho) -> np.ndarray:
    m = matrix_of(rho)
    if m.shape != (2, 2):
        raise StructureError(f"map expects a single-qubit input, got {m.shape}")
    if not is_pure(m, STATE_TOL):
        raise ContractError("this map is defined on pure states only; got a mixed input")
    return m


def orthogonal_pure(psi) -> np.ndarray:
    """The pure qubit state orthogonal to ``psi`` (antipodal Bloch vector)."""
    m = _require_pure_qubit(psi)
    return I2 - m


def apply_to_density(local_map: LocalMap, rho) -> np.ndarray:
    """Apply ``local_map`` to a single state; result is Hermitian, maybe not PSD."""
    return local_map.apply(rho)


def apply_to_ensemble(local_map: LocalMap, ens: ConditionalEnsemble) -> np.ndarray:
    """Branch-wise application followed by probability mixing."""
    return sum(b.probability * local_map.apply(b.state) for b in ens.present)


def clone_marginal(output, clone_index: int) -> np.ndarray:
    """Reduced state of one clone from an N-qubit clone output."""
    m = as_cmatrix(output)
    dim = m.shape[0]
    if m.shape[0] != m.shape[1] or dim < 4 or dim & (dim - 1):
        raise StructureError(f"clone output must be 2^N x 2^N with N >= 2, got {m.shape}")
    n = dim.bit_length() - 1
    if not 0 <= clone_index < n:
        raise StructureError(f"clone_index {clone_index} out of range for {n} clones")
    for idx in reversed(range(n)):
        if idx != clone_index:
            dims = [2] * (m.shape[0].bit_length() - 1)
            m = partial_trace(m, dims, idx)
    return m


def linear_action(local_map: LocalMap) -> Callable[[np.ndarray], np.ndarray]:
    """Linear action on arbitrary d_in x d_in matrices.

    Linear representations use their own ``apply``.  A pure-state-defined
    qubit map that is affine in the Bloch vector is extended through
    X -> Tr(X) A + sum_j Tr(X sigma_j) B_j, with A and B_j read off the six
    axis states.  Callers must establish linearity first.
    """
    if local_map.linear:
        return local_map.apply
    if local_map.d_in != 2:
        raise ContractError("only qubit-input nonlinear maps have an affine extension")
    plus = [local_map.apply(bloch_to_density(e)) for e in np.eye(3)]
    minus = [local_map.apply(bloch_to_density(-e)) for e in np.eye(3)]
    offset = 0.5 * (plus[2] + minus[2])
    slopes = [0.5 * (p - q) for p, q in zip(plus, minus)]

    def act(x):
        x = as_cmatrix(x)
        out = np.trace(x) * offset
        for p, b in zip(PAULIS, slopes):
            out = out + np.trace(x @ p) * b
        return out

    return act


def to_transfer(local_map: LocalMap) -> TransferMap:
    """Superoperator of a linear (or affine-extended) map."""
    if isinstance(local_map, TransferMap):
        return local_map
    act = linear_action(local_map)
    d_in = local_map.d_in
    cols = []
    for j in range(d_in):
        for i in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[i, j] = 1.0
            cols.append(vec(act(e)))
    return TransferMap(np.column_stack(cols))


def kraus_to_transfer(kraus: KrausMap) -> TransferMap:
    """sum_i conj(K_i) (x) K_i under column stacking."""
    return TransferMap(sum(np.kron(k.conj(), k) for k in kraus.kraus_ops))


def bloch_affine_to_transfer(clone: BlochAffineCloneMap) -> TransferMap:
    return to_transfer(clone)
