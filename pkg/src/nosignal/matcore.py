"""Dense complex matrix kernel for 1-4 qubit systems.

Matrices are plain ``complex128`` numpy arrays in row-major order.  Tensor
factors are ordered left to right, so subsystem index 0 is the leftmost
factor (Alice in bipartite states).
"""
from __future__ import annotations

from functools import reduce
from typing import Sequence, Tuple

import numpy as np

from .exceptions import ContractError, SizeError, StructureError

MAX_DIM = 16
HERMITIAN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def as_cmatrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.size == 0:
        raise StructureError(f"expected a non-empty 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise StructureError("matrix contains NaN or Inf entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def hermiticity_error(m) -> float:
    """Max entrywise |m - m^dagger|."""
    m = as_cmatrix(m)
    if m.shape[0] != m.shape[1]:
        return float("inf")
    return float(np.max(np.abs(m - dagger(m))))


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    return hermiticity_error(m) <= tol


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product ``a (x) b`` with row index (i_a, i_b), column (j_a, j_b).

    Raises
    ------
    SizeError
        If either output dimension exceeds 16.
    """
    a, b = as_cmatrix(a), as_cmatrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if rows > MAX_DIM or cols > MAX_DIM:
        raise SizeError(f"tensor product of shape {rows}x{cols} exceeds {MAX_DIM}x{MAX_DIM}")
    return np.kron(a, b)


def kron_all(*factors) -> np.ndarray:
    return reduce(tensor_product, factors)


def partial_trace(m, subsystem_dims: Sequence[int], traced_index: int) -> np.ndarray:
    """Trace out one tensor factor of a square matrix.

    :param m: square matrix over the product space ``prod(subsystem_dims)``.
    :param subsystem_dims: dimensions of the tensor factors, leftmost first.
    :param traced_index: which factor to trace over.
    :return: matrix over the remaining factors, in their original order.
    """
    m = as_cmatrix(m)
    dims = [int(d) for d in subsystem_dims]
    if any(d < 1 for d in dims):
        raise StructureError(f"subsystem dimensions must be positive, got {dims}")
    if m.shape[0] != m.shape[1]:
        raise StructureError(f"partial trace needs a square matrix, got {m.shape}")
    if int(np.prod(dims)) != m.shape[0]:
        raise StructureError(f"subsystem dims {dims} do not multiply to {m.shape[0]}")
    if not 0 <= traced_index < len(dims):
        raise StructureError(f"traced_index {traced_index} out of range for {len(dims)} factors")
    n = len(dims)
    t = m.reshape(dims + dims)
    out = np.trace(t, axis1=traced_index, axis2=traced_index + n)
    keep = int(np.prod([d for i, d in enumerate(dims) if i != traced_index]))
    return out.reshape(keep, keep)


def herm_eig(m) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvectors as columns, so
    ``m = V @ diag(w) @ V^dagger``.
    """
    m = as_cmatrix(m)
    err = hermiticity_error(m)
    if err > HERMITIAN_TOL:
        raise ContractError(f"matrix is not Hermitian (max |m - m^dagger| = {err:.3e})")
    w, v = np.linalg.eigh(0.5 * (m + dagger(m)))
    return w[::-1].copy(), v[:, ::-1].copy()


def min_eigenvalue(m) -> float:
    return float(herm_eig(m)[0][-1])


def trace_norm(m) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    w, _ = herm_eig(m)
    return float(np.sum(np.abs(w)))


def trace_distance(a, b) -> float:
    return 0.5 * trace_norm(as_cmatrix(a) - as_cmatrix(b))


def ket(*bits: int) -> np.ndarray:
    """Computational basis column vector ``|b0 b1 ...>``."""
    dim = 2 ** len(bits)
    index = int("".join(str(b) for b in bits), 2) if bits else 0
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def projector(vec) -> np.ndarray:
    v = np.asarray(vec, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())
