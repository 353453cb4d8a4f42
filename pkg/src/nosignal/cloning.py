"""Clone fidelities and the comparison with the optimal universal 1->2 cloner."""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .exceptions import ContractError
from .maps import BlochAffineCloneMap, LocalMap, PureBranchMap, clone_marginal, vec
from .matcore import PAULIS
from .states import density_to_bloch, is_pure, matrix_of, random_unit_vectors

# Optimal universal 1->2 qubit cloner: shrinking factor 2/3, i.e. fidelity
# (1 + 2/3)/2.  Externally sourced constant, not derived here.
OPTIMAL_ETA = 2.0 / 3.0
OPTIMAL_FIDELITY_1_TO_2 = (1.0 + OPTIMAL_ETA) / 2.0
BOUND_TOL = 1e-9


def single_clone_fidelity(local_map: LocalMap, psi, clone_index: int = 0) -> float:
    """<psi| rho_clone |psi> for one clone of the map's output on pure ``psi``."""
    m = matrix_of(psi)
    if not is_pure(m):
        raise ContractError("fidelity is defined for pure inputs")
    return _fidelity(local_map, m, clone_index)


def _fidelity(local_map: LocalMap, m: np.ndarray, clone_index: int) -> float:
    return float(np.real(np.trace(m @ clone_marginal(local_map.apply(m), clone_index))))


def _marginal_superop(local_map: LocalMap, clone_index: int) -> np.ndarray:
    """Column-stacking superoperator of rho -> clone marginal of map(rho)."""
    cols = []
    for j in range(2):
        for i in range(2):
            e = np.zeros((2, 2), dtype=complex)
            e[i, j] = 1.0
            cols.append(vec(clone_marginal(local_map.apply(e), clone_index)))
    return np.column_stack(cols)


def analytic_fidelity(local_map: LocalMap) -> Optional[float]:
    """Closed-form, input-independent fidelity where one exists."""
    if isinstance(local_map, BlochAffineCloneMap):
        return (1.0 + local_map.eta) / 2.0
    if isinstance(local_map, PureBranchMap):
        return float(local_map.fidelity)
    return None


@dataclass(frozen=True)
class FidelityReport:
    fidelity_per_input: List[Tuple[Tuple[float, float, float], float]]
    average_fidelity: float
    standard_error: float
    analytic_prediction: Optional[float]
    exceeds_optimal_bound: Optional[bool]
    # fidelities outside [0, 1] betray a non-positive output
    out_of_range: bool

    def summary(self) -> dict:
        return {
            "average_fidelity": self.average_fidelity,
            "standard_error": self.standard_error,
            "analytic_prediction": self.analytic_prediction,
            "exceeds_optimal_bound": self.exceeds_optimal_bound,
            "out_of_range": self.out_of_range,
            "samples": len(self.fidelity_per_input),
        }


def average_fidelity(
    local_map: LocalMap,
    samples: int = 10_000,
    seed: int = 0,
    clone_index: int = 0,
) -> FidelityReport:
    """Monte Carlo average of the single-clone fidelity over uniform pure inputs.

    ``exceeds_optimal_bound`` is only meaningful for 1->2 maps and is ``None``
    for any other output size.
    """
    if samples < 1000:
        raise ValueError("samples must be >= 1000")
    rng = np.random.default_rng(seed)
    dirs = random_unit_vectors(samples, rng)
    psis = 0.5 * (np.eye(2) + np.einsum("nj,jab->nab", dirs, np.array(PAULIS)))
    if local_map.linear and local_map.d_in == 2:
        marginal = _marginal_superop(local_map, clone_index)
        vecs = psis.transpose(0, 2, 1).reshape(samples, 4)
        outs = (vecs @ marginal.T).reshape(samples, 2, 2).transpose(0, 2, 1)
        fids = np.real(np.einsum("nab,nba->n", psis, outs))
    else:
        fids = np.array([_fidelity(local_map, m, clone_index) for m in psis])
    per_input = [(tuple(float(x) for x in s), float(f)) for s, f in zip(dirs, fids)]
    values = np.array([f for _, f in per_input])
    mean = float(values.mean())
    exceeds = mean > OPTIMAL_FIDELITY_1_TO_2 + BOUND_TOL if local_map.d_out == 4 else None
    return FidelityReport(
        fidelity_per_input=per_input,
        average_fidelity=mean,
        standard_error=float(values.std(ddof=1) / np.sqrt(samples)),
        analytic_prediction=analytic_fidelity(local_map),
        exceeds_optimal_bound=exceeds,
        out_of_range=bool(np.any(values < -BOUND_TOL) or np.any(values > 1 + BOUND_TOL)),
    )


def shrinking_factor(local_map: LocalMap, psi, clone_index: int = 0) -> float:
    """Ratio of the clone's Bloch vector to the input's along the input direction."""
    m = matrix_of(psi)
    s_in = density_to_bloch(m)
    s_out = density_to_bloch(clone_marginal(local_map.apply(m), clone_index))
    return float(s_out @ s_in / (s_in @ s_in))
