"""Locate a local map among the classes linear / trace preserving / positive / CP.

The region labels follow the usual diagram of local maps:

``QM``
    linear, trace preserving, completely positive.
``LINEAR_NONPOSITIVE_NOSIGNAL``
    linear and trace preserving but not CP; cannot signal.
``NONLINEAR``
    fails the linearity test; may signal.
``NOT_TRACE_PRESERVING``
    overrides the others when the trace test fails.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass
from typing import NamedTuple, Optional

import numpy as np

from .exceptions import ContractError
from .maps import (
    BlochNonlinearCloneMap,
    KrausMap,
    LocalMap,
    TransferMap,
    linear_action,
    vec,
)
from .matcore import min_eigenvalue, partial_trace, trace_norm
from .states import (
    bloch_projector,
    random_density,
    random_pure_vector,
    random_unit_vectors,
)

LINEARITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-9
CHOI_TOL = 1e-9

_AXES = np.vstack([np.eye(3), -np.eye(3)])


class Region(str, enum.Enum):
    QM = "QM"
    LINEAR_NONPOSITIVE_NOSIGNAL = "LINEAR_NONPOSITIVE_NOSIGNAL"
    NONLINEAR = "NONLINEAR"
    NOT_TRACE_PRESERVING = "NOT_TRACE_PRESERVING"


class TestResult(NamedTuple):
    __test__ = False

    passed: bool
    max_deviation: float


class PositivityResult(NamedTuple):
    is_positive: bool
    min_eigenvalue: float
    witness_input: np.ndarray


@dataclass(frozen=True)
class MapClassification:
    is_linear: bool
    linearity_deviation: float
    is_trace_preserving: bool
    trace_deviation: float
    is_positive: bool
    min_output_eigenvalue: float
    positivity_witness: tuple
    is_completely_positive: Optional[bool]
    min_choi_eigenvalue: Optional[float]
    region: Region

    def to_dict(self) -> dict:
        d = asdict(self)
        d["region"] = self.region.value
        d["positivity_witness"] = list(self.positivity_witness)
        return d


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """J = sum_ij L(|i><j|) (x) |i><j|, output factor first, unnormalized."""

    mat: np.ndarray
    d_in: int
    d_out: int

    def min_eigenvalue(self) -> float:
        return min_eigenvalue(self.mat)

    def is_completely_positive(self, tol: float = CHOI_TOL) -> bool:
        return self.min_eigenvalue() >= -tol

    def trace_deviation(self) -> float:
        """max |Tr_out(J) - I| entrywise."""
        reduced = partial_trace(self.mat, [self.d_out, self.d_in], 0)
        return float(np.max(np.abs(reduced - np.eye(self.d_in))))

    def is_trace_preserving(self, tol: float = CHOI_TOL) -> bool:
        return self.trace_deviation() <= tol


def _effective_linear(local_map: LocalMap) -> bool:
    """Known linear without testing (structurally linear representations)."""
    if local_map.linear:
        return True
    return isinstance(local_map, BlochNonlinearCloneMap) and local_map.is_affine


def choi_matrix(local_map: LocalMap) -> ChoiMatrix:
    """Choi matrix of a linear representation.

    Raises
    ------
    ContractError
        For pure-state-defined maps, which have no linear extension in general.
    """
    if not _effective_linear(local_map):
        raise ContractError(f"{type(local_map).__name__} is not linear; Choi matrix undefined")
    return _choi_of(local_map)


def _choi_of(local_map: LocalMap) -> ChoiMatrix:
    act = linear_action(local_map)
    d_in, d_out = local_map.d_in, local_map.d_out
    j = np.zeros((d_out * d_in, d_out * d_in), dtype=complex)
    for a in range(d_in):
        for b in range(d_in):
            e = np.zeros((d_in, d_in), dtype=complex)
            e[a, b] = 1.0
            j += np.kron(act(e), e)
    return ChoiMatrix(j, d_in, d_out)


def choi_to_transfer(choi: ChoiMatrix) -> TransferMap:
    """Recover the column-stacking superoperator from a Choi matrix."""
    d_in, d_out = choi.d_in, choi.d_out
    t = choi.mat.reshape(d_out, d_in, d_out, d_in)
    cols = []
    for b in range(d_in):
        for a in range(d_in):
            cols.append(vec(t[:, a, :, b]))
    return TransferMap(np.column_stack(cols))


def random_channel(d_in: int, d_out: int, kraus_rank: int, seed: int) -> KrausMap:
    """Seeded random CPTP map.

    A complex Gaussian ``(kraus_rank * d_out) x d_in`` matrix is orthonormalized
    (QR) into an isometry V, and the Kraus operators are its ``d_out``-row
    blocks, so sum_k K_k^dagger K_k = V^dagger V = I.
    """
    if kraus_rank < 1:
        raise ValueError("kraus_rank must be >= 1")
    rows = kraus_rank * d_out
    if rows < d_in:
        raise ValueError("kraus_rank * d_out must be at least d_in to form an isometry")
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(rows, d_in)) + 1j * rng.normal(size=(rows, d_in))
    q, r = np.linalg.qr(g)
    # fix column phases so the isometry is unique per seed
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    ops = tuple(q[k * d_out:(k + 1) * d_out, :] for k in range(kraus_rank))
    return KrausMap(ops)


def random_transfer_map(d_in: int, d_out: int, seed: int, trace_preserving: bool = True) -> TransferMap:
    """Seeded random Hermiticity-preserving linear map, generally not positive.

    Draws a random Hermitian Choi matrix and, if requested, shifts it so that
    Tr_out(J) = I.
    """
    rng = np.random.default_rng(seed)
    n = d_in * d_out
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    j = (g + g.conj().T) / (2 * n)
    if trace_preserving:
        excess = partial_trace(j, [d_out, d_in], 0) - np.eye(d_in)
        j = j - np.kron(np.eye(d_out) / d_out, excess)
    return choi_to_transfer(ChoiMatrix(j, d_in, d_out))


def _random_inputs(local_map: LocalMap, count: int, rng: np.random.Generator):
    """Valid inputs for the map: pure for pure-state-defined maps, else mixed."""
    d = local_map.d_in
    if local_map.pure_input_only:
        return [bloch_projector(s) for s in random_unit_vectors(count, rng)]
    return [random_density(d, rng) for _ in range(count)]


def _two_decompositions(rng: np.random.Generator):
    """Two different pure-state decompositions of one random qubit state.

    A chord through the Bloch point r meets the sphere at a and b, and
    r = lam a + (1 - lam) b.  Two random chord directions give two ensembles.
    """
    r = random_unit_vectors(1, rng)[0] * rng.uniform(0.0, 0.9)
    out = []
    for u in random_unit_vectors(2, rng):
        # |r + x u| = 1  ->  x^2 + 2 x (r.u) + |r|^2 - 1 = 0
        ru = float(r @ u)
        disc = np.sqrt(ru**2 - (r @ r) + 1.0)
        x_plus, x_minus = -ru + disc, -ru - disc
        a, b = r + x_plus * u, r + x_minus * u
        lam = -x_minus / (x_plus - x_minus)
        out.append([(lam, a), (1.0 - lam, b)])
    return out


def _ensemble_output(local_map: LocalMap, pairs) -> np.ndarray:
    return sum(p * local_map.apply(bloch_projector(s / np.linalg.norm(s))) for p, s in pairs)


def test_linearity(local_map: LocalMap, trials: int = 20, seed: int = 0) -> TestResult:
    """Decomposition-independence of the branch-averaged output.

    Structurally linear maps get one numeric spot check of
    L(p A + (1-p) B) = p L(A) + (1-p) L(B).  Pure-state-defined maps are fed
    the z- and x-decompositions of I/2 plus ``trials`` random pairs of
    decompositions of random states; the maximum trace-norm difference of
    the averaged outputs is returned.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    if local_map.linear:
        a, b = _random_inputs(local_map, 2, rng)
        p = rng.uniform()
        lhs = local_map.apply(p * a + (1 - p) * b)
        rhs = p * local_map.apply(a) + (1 - p) * local_map.apply(b)
        dev = trace_norm(0.5 * ((lhs - rhs) + (lhs - rhs).conj().T))
        return TestResult(bool(dev <= LINEARITY_TOL), float(dev))
    ez, ex = np.eye(3)[2], np.eye(3)[0]
    decompositions = [([(0.5, ez), (0.5, -ez)], [(0.5, ex), (0.5, -ex)])]
    decompositions += [tuple(_two_decompositions(rng)) for _ in range(trials)]
    worst = 0.0
    for first, second in decompositions:
        diff = _ensemble_output(local_map, first) - _ensemble_output(local_map, second)
        worst = max(worst, trace_norm(0.5 * (diff + diff.conj().T)))
    return TestResult(bool(worst <= LINEARITY_TOL), float(worst))


def test_trace_preservation(local_map: LocalMap, trials: int = 20, seed: int = 0) -> TestResult:
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    worst = max(
        abs(np.trace(local_map.apply(rho)) - 1.0) for rho in _random_inputs(local_map, trials, rng)
    )
    return TestResult(bool(worst <= TRACE_TOL), float(worst))


def test_positivity(local_map: LocalMap, samples: int = 1000, seed: int = 0) -> PositivityResult:
    """Smallest output eigenvalue over sampled pure inputs.

    Qubit-input maps are probed at ``samples`` uniform Bloch directions plus
    the six axis states, and the witness is returned as a Bloch vector.
    Larger inputs use Haar-random pure vectors plus the computational basis,
    and the witness is the state vector.
    """
    if samples < 100:
        raise ValueError("samples must be >= 100")
    rng = np.random.default_rng(seed)
    d = local_map.d_in
    if d == 2:
        probes = np.vstack([_AXES, random_unit_vectors(samples, rng)])
        inputs = (bloch_projector(s) for s in probes)
    else:
        probes = np.vstack([np.eye(d, dtype=complex)] + [random_pure_vector(d, rng)[None, :] for _ in range(samples)])
        inputs = (np.outer(v, v.conj()) for v in probes)
    worst, witness = np.inf, None
    for probe, rho in zip(probes, inputs):
        out = local_map.apply(rho)
        lam = min_eigenvalue(0.5 * (out + out.conj().T))
        if lam < worst:
            worst, witness = lam, probe
    return PositivityResult(bool(worst >= -PSD_TOL), float(worst), np.array(witness))


def classify_map(
    local_map: LocalMap,
    *,
    trials: int = 20,
    samples: int = 2000,
    seed: int = 0,
) -> MapClassification:
    linear = test_linearity(local_map, trials, seed)
    tp = test_trace_preservation(local_map, trials, seed)
    pos = test_positivity(local_map, samples, seed)
    cp: Optional[bool] = None
    choi_min: Optional[float] = None
    if linear.passed:
        choi = _choi_of(local_map)
        choi_min = choi.min_eigenvalue()
        cp = bool(choi_min >= -CHOI_TOL)
    if not tp.passed:
        region = Region.NOT_TRACE_PRESERVING
    elif not linear.passed:
        region = Region.NONLINEAR
    elif cp:
        region = Region.QM
    else:
        region = Region.LINEAR_NONPOSITIVE_NOSIGNAL
    witness = pos.witness_input
    if np.iscomplexobj(witness):
        witness = np.concatenate([witness.real, witness.imag])
    return MapClassification(
        is_linear=linear.passed,
        linearity_deviation=linear.max_deviation,
        is_trace_preserving=tp.passed,
        trace_deviation=tp.max_deviation,
        is_positive=pos.is_positive,
        min_output_eigenvalue=pos.min_eigenvalue,
        positivity_witness=tuple(float(x) for x in witness),
        is_completely_positive=cp,
        min_choi_eigenvalue=choi_min,
        region=region,
    )



# keep pytest from collecting these when imported into test modules
for _fn in (test_linearity, test_trace_preservation, test_positivity):
    _fn.__test__ = False
