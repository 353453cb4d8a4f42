"""Alice -> Bob protocol on a shared two-qubit state.

Alice encodes one bit by choosing the axis (``basis_1`` or ``basis_2``) of a
projective spin measurement on her qubit.  Bob, who never learns her result,
applies his local map to his conditional state and then decodes with a
POVM.  Everything is computed exactly from traces; no shot sampling.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence

import numpy as np

from .exceptions import ContractError, StructureError
from .maps import KrausMap, LocalMap, apply_to_ensemble
from .matcore import I2, as_cmatrix, herm_eig, hermiticity_error, trace_norm
from .states import BipartiteState, as_bloch, matrix_of, measure_alice, random_unit_vectors

VERDICT_THRESHOLD = 1e-8
POVM_TOL = 1e-10
PROB_TOL = 1e-12


class Verdict(str, enum.Enum):
    SIGNALS = "SIGNALS"
    NO_SIGNAL = "NO_SIGNAL"


class NonPositiveWarning(UserWarning):
    """Bob's averaged state produced a probability below zero."""


def _validate_povm(povm: Sequence, dim: int) -> List[np.ndarray]:
    elements = [as_cmatrix(e) for e in povm]
    if not elements:
        raise ContractError("a POVM needs at least one element")
    for i, e in enumerate(elements):
        if e.shape != (dim, dim):
            raise StructureError(f"POVM element {i} has shape {e.shape}, expected {(dim, dim)}")
        if hermiticity_error(e) > POVM_TOL:
            raise ContractError(f"POVM element {i} is not Hermitian")
        if herm_eig(e)[0][-1] < -POVM_TOL:
            raise ContractError(f"POVM element {i} is not positive semidefinite")
    total = sum(elements)
    if np.max(np.abs(total - np.eye(dim))) > POVM_TOL:
        raise ContractError("POVM elements do not sum to the identity")
    return elements


def _shared_matrix(shared, alice_premap: Optional[KrausMap]) -> np.ndarray:
    m = matrix_of(shared)
    if m.shape != (4, 4):
        raise StructureError(f"shared state must be 4x4, got {m.shape}")
    if alice_premap is not None:
        if alice_premap.d_in != 2 or alice_premap.d_out != 2:
            raise StructureError("Alice's pre-map must act on one qubit")
        m = sum(np.kron(k, I2) @ m @ np.kron(k, I2).conj().T for k in alice_premap.kraus_ops)
    return m


@dataclass(frozen=True, eq=False)
class SignallingExperiment:
    """Shared state, Alice's two basis choices, Bob's map and optional decoder.

    ``alice_premap`` is an optional qubit channel applied as (A (x) I) before
    Alice's measurement.
    """

    shared: BipartiteState
    basis_1: np.ndarray
    basis_2: np.ndarray
    bob_map: LocalMap
    decode_povm: Optional[Sequence[np.ndarray]] = None
    alice_premap: Optional[KrausMap] = None

    def __post_init__(self):
        object.__setattr__(self, "basis_1", as_bloch(self.basis_1, unit=True))
        object.__setattr__(self, "basis_2", as_bloch(self.basis_2, unit=True))
        if self.decode_povm is not None:
            povm = _validate_povm(self.decode_povm, self.bob_map.d_out)
            object.__setattr__(self, "decode_povm", tuple(povm))

    def average_states(self):
        return tuple(
            bob_average_state(self.shared, n, self.bob_map, self.alice_premap)
            for n in (self.basis_1, self.basis_2)
        )


@dataclass(frozen=True)
class SignallingReport:
    distance: float
    helstrom_success: float
    conditional_probs: List[List[float]]
    mutual_info_bits: float
    verdict: Verdict
    decoder: str
    negative_probability: bool = False
    warnings: List[str] = field(default_factory=list)


def bob_average_state(shared, n, bob_map: LocalMap, alice_premap: Optional[KrausMap] = None) -> np.ndarray:
    """p(n) rho_out(n) + p(-n) rho_out(-n) for Alice measuring along ``n``."""
    ens = measure_alice(_shared_matrix(shared, alice_premap), n)
    out = apply_to_ensemble(bob_map, ens)
    return 0.5 * (out + out.conj().T)


def no_signalling_distance(exp: SignallingExperiment) -> float:
    """Trace distance between Bob's averaged states for the two basis choices."""
    rho_1, rho_2 = exp.average_states()
    return 0.5 * trace_norm(rho_1 - rho_2)


def helstrom_success(exp: SignallingExperiment) -> float:
    """Optimal success probability of guessing Alice's bit (equal priors)."""
    return 0.5 + 0.5 * no_signalling_distance(exp)


def helstrom_povm(rho_1: np.ndarray, rho_2: np.ndarray) -> List[np.ndarray]:
    """Two-outcome projective decoder onto the positive part of rho_1 - rho_2."""
    w, v = herm_eig(rho_1 - rho_2)
    cols = v[:, w > 0]
    p = cols @ cols.conj().T
    return [p, np.eye(rho_1.shape[0]) - p]


def _probabilities(povm, states) -> tuple[np.ndarray, bool]:
    table = np.array([[np.real(np.trace(e @ rho)) for e in povm] for rho in states])
    negative = bool(np.any(table < -PROB_TOL))
    if negative:
        warnings.warn(
            f"negative outcome probability {table.min():.3e}: Bob's average state is not positive",
            NonPositiveWarning,
            stacklevel=3,
        )
    else:
        table = np.clip(table, 0.0, 1.0)
    return table, negative


def conditional_probs(exp: SignallingExperiment) -> np.ndarray:
    """Table ``p[m, r] = Tr[Pi_r rho_m]``; rows are Alice's basis choices.

    Raises
    ------
    ContractError
        If the experiment has no decoding POVM.
    """
    if exp.decode_povm is None:
        raise ContractError("conditional_probs needs a decode POVM")
    table, _ = _probabilities(exp.decode_povm, exp.average_states())
    return table


def _entropy(p: np.ndarray) -> float:
    p = np.asarray(p, dtype=float)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def decode_mutual_info(probs) -> float:
    """I(M; R) in bits for a uniform prior over the rows of ``probs``."""
    table = np.clip(np.asarray(probs, dtype=float), 0.0, None)
    table = table / table.sum(axis=1, keepdims=True)
    marginal = table.mean(axis=0)
    info = _entropy(marginal) - np.mean([_entropy(row) for row in table])
    return max(0.0, info)


def random_povm(dim: int, outcomes: int, seed: int) -> List[np.ndarray]:
    """Seeded random POVM: Pi_r = S^-1/2 A_r S^-1/2 with S = sum_r A_r."""
    rng = np.random.default_rng(seed)
    raw = []
    for _ in range(outcomes):
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        raw.append(g @ g.conj().T)
    w, v = herm_eig(sum(raw))
    inv_sqrt = v @ np.diag(w**-0.5) @ v.conj().T
    elements = [inv_sqrt @ a @ inv_sqrt for a in raw]
    return [0.5 * (e + e.conj().T) for e in elements]


class ScanResult(NamedTuple):
    max_distance: float
    basis_1: np.ndarray
    basis_2: np.ndarray


def scan_bases(
    shared,
    bob_map: LocalMap,
    pairs: int,
    seed: int,
    alice_premap: Optional[KrausMap] = None,
) -> ScanResult:
    """Largest no-signalling distance over ``pairs`` random basis pairs.

    All ``2 * pairs`` axes are drawn up front from ``seed`` so the result is
    reproducible bit for bit.
    """
    if pairs < 1:
        raise ValueError("pairs must be >= 1")
    rng = np.random.default_rng(seed)
    axes = random_unit_vectors(2 * pairs, rng).reshape(pairs, 2, 3)
    shared_m = _shared_matrix(shared, alice_premap)
    best = ScanResult(-1.0, axes[0, 0], axes[0, 1])
    for n1, n2 in axes:
        d = 0.5 * trace_norm(bob_average_state(shared_m, n1, bob_map) - bob_average_state(shared_m, n2, bob_map))
        if d > best.max_distance:
            best = ScanResult(d, n1, n2)
    return best


def run_experiment(exp: SignallingExperiment, threshold: float = VERDICT_THRESHOLD) -> SignallingReport:
    """Distance, Helstrom success, decoding table and mutual information.

    Without a decode POVM the table uses the Helstrom projective decoder.
    """
    rho_1, rho_2 = exp.average_states()
    distance = 0.5 * trace_norm(rho_1 - rho_2)
    if exp.decode_povm is not None:
        povm, decoder = exp.decode_povm, "povm"
    else:
        povm, decoder = helstrom_povm(rho_1, rho_2), "helstrom"
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonPositiveWarning)
        table, negative = _probabilities(povm, (rho_1, rho_2))
    verdict = Verdict.SIGNALS if distance > threshold else Verdict.NO_SIGNAL
    info = decode_mutual_info(table)
    return SignallingReport(
        distance=distance,
        helstrom_success=0.5 + 0.5 * distance,
        conditional_probs=table.tolist(),
        mutual_info_bits=info,
        verdict=verdict,
        decoder=decoder,
        negative_probability=negative,
        warnings=[str(w.message) for w in caught],
    )
