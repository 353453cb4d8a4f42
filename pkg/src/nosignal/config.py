"""JSON experiment configs.

A config is a JSON object::

    {
      "shared_state": {"kind": "singlet"}
                    | {"kind": "partially_entangled", "theta": 0.5235987755982988}
                    | {"kind": "explicit", "matrix": <matrix>},
      "bob_map": {"kind": "identity"}
               | {"kind": "kraus", "operators": [<matrix>, ...]}
               | {"kind": "transfer", "matrix": <matrix>}
               | {"kind": "random_channel", "d_in": 2, "d_out": 2, "kraus_rank": 2, "seed": 7}
               | {"kind": "bloch_affine", "eta": 0.7, "t": "1/3"}
               | {"kind": "bloch_nonlinear", "f": {"family": "power", "k": 3}, "t": 0}
               | {"kind": "pure_branch", "n_clones": 2, "fidelity": 1, "variant": "mixture"},
      "bases": [[0, 0, 1], [1, 0, 0]],
      "povm": [<matrix>, ...] | "parity",          (optional)
      "alice_premap": <bob_map-style kraus/random_channel/identity>,  (optional)
      "seed": 0,                                    (optional)
      "samples": {"linearity_trials": 20, "positivity_samples": 2000,
                  "fidelity_samples": 10000, "scan_pairs": 100}   (optional)
    }

Matrices are nested lists of ``[re, im]`` pairs; bare real numbers are also
accepted.  Scalars may be given as strings such as ``"1/3"``.  For
``bloch_nonlinear`` the ``f`` entry may be a list of three specs, one per
Bloch component.  ``"povm": "parity"`` is the two-clone decoder with
elements onto span{|01>, |10>} and span{|00>, |11>}.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, List, Optional

import numpy as np

from .classify import random_channel
from .exceptions import NoSignalError
from .maps import (
    BlochAffineCloneMap,
    BlochNonlinearCloneMap,
    CloneFunction,
    KrausMap,
    LocalMap,
    PureBranchMap,
    TransferMap,
)
from .matcore import ket, projector
from .signalling import SignallingExperiment
from .states import BipartiteState, partially_entangled, singlet

BASIS_NORM_TOL = 1e-6

DEFAULT_SAMPLES = {
    "linearity_trials": 20,
    "positivity_samples": 2000,
    "fidelity_samples": 10_000,
    "scan_pairs": 100,
}


class ConfigError(NoSignalError):
    """Invalid config; ``path`` locates the offending field."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"{path}: {reason}")
        self.path = path
        self.reason = reason


def parity_povm() -> List[np.ndarray]:
    e0 = projector(ket(0, 1)) + projector(ket(1, 0))
    return [e0, np.eye(4, dtype=complex) - e0]


def _require(obj: dict, key: str, path: str):
    if not isinstance(obj, dict):
        raise ConfigError(path, "expected an object")
    if key not in obj:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return obj[key]


def _real(value, path: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(path, "expected a number, got a boolean")
    if isinstance(value, (int, float)):
        x = float(value)
    elif isinstance(value, str):
        try:
            x = float(Fraction(value.strip()))
        except (ValueError, ZeroDivisionError):
            raise ConfigError(path, f"cannot parse {value!r} as a number") from None
    else:
        raise ConfigError(path, f"expected a number, got {type(value).__name__}")
    if not np.isfinite(x):
        raise ConfigError(path, "number must be finite")
    return x


def _int(value, path: str) -> int:
    x = _real(value, path)
    if x != int(x):
        raise ConfigError(path, f"expected an integer, got {value!r}")
    return int(x)


def _complex(value, path: str) -> complex:
    if isinstance(value, list):
        if len(value) != 2:
            raise ConfigError(path, "complex entries are [re, im] pairs")
        return complex(_real(value[0], f"{path}[0]"), _real(value[1], f"{path}[1]"))
    return complex(_real(value, path))


def parse_matrix(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or not value or not all(isinstance(r, list) for r in value):
        raise ConfigError(path, "expected a matrix as a list of rows")
    width = len(value[0])
    rows = []
    for i, row in enumerate(value):
        if len(row) != width:
            raise ConfigError(f"{path}[{i}]", f"row has {len(row)} entries, expected {width}")
        rows.append([_complex(x, f"{path}[{i}][{j}]") for j, x in enumerate(row)])
    return np.array(rows, dtype=complex)


def dump_matrix(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m)]


def parse_vector(value, path: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != 3:
        raise ConfigError(path, "expected a list of 3 numbers")
    v = np.array([_real(x, f"{path}[{i}]") for i, x in enumerate(value)])
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > BASIS_NORM_TOL:
        raise ConfigError(path, f"basis vector must have unit norm, got norm {norm:.12g}")
    return v / norm


def parse_shared_state(spec, path: str = "shared_state") -> BipartiteState:
    kind = _require(spec, "kind", path)
    try:
        if kind == "singlet":
            return singlet()
        if kind == "partially_entangled":
            return partially_entangled(_real(_require(spec, "theta", path), f"{path}.theta"))
        if kind == "explicit":
            return BipartiteState(parse_matrix(_require(spec, "matrix", path), f"{path}.matrix"), 2)
    except ConfigError:
        raise
    except NoSignalError as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.kind", f"unknown shared state kind {kind!r}")


def _parse_function(spec, path: str) -> CloneFunction:
    if isinstance(spec, str):
        return CloneFunction(spec)
    family = _require(spec, "family", path)
    k = _int(spec.get("k", 1), f"{path}.k")
    return CloneFunction(family, k)


def parse_map(spec, path: str = "bob_map") -> LocalMap:
    kind = _require(spec, "kind", path)
    try:
        if kind == "identity":
            return KrausMap.identity(_int(spec.get("dim", 2), f"{path}.dim"))
        if kind == "kraus":
            ops = _require(spec, "operators", path)
            if not isinstance(ops, list) or not ops:
                raise ConfigError(f"{path}.operators", "expected a non-empty list of matrices")
            return KrausMap(tuple(parse_matrix(m, f"{path}.operators[{i}]") for i, m in enumerate(ops)))
        if kind == "transfer":
            return TransferMap(parse_matrix(_require(spec, "matrix", path), f"{path}.matrix"))
        if kind == "random_channel":
            return random_channel(
                _int(spec.get("d_in", 2), f"{path}.d_in"),
                _int(spec.get("d_out", 2), f"{path}.d_out"),
                _int(spec.get("kraus_rank", 2), f"{path}.kraus_rank"),
                _int(_require(spec, "seed", path), f"{path}.seed"),
            )
        if kind == "bloch_affine":
            return BlochAffineCloneMap(
                _real(_require(spec, "eta", path), f"{path}.eta"),
                _real(_require(spec, "t", path), f"{path}.t"),
            )
        if kind == "bloch_nonlinear":
            f = _require(spec, "f", path)
            if isinstance(f, list):
                if len(f) != 3:
                    raise ConfigError(f"{path}.f", "per-component f needs exactly 3 entries")
                fs = tuple(_parse_function(g, f"{path}.f[{i}]") for i, g in enumerate(f))
            else:
                fs = _parse_function(f, f"{path}.f")
            return BlochNonlinearCloneMap(fs, _real(spec.get("t", 0.0), f"{path}.t"))
        if kind == "pure_branch":
            return PureBranchMap(
                _int(_require(spec, "n_clones", path), f"{path}.n_clones"),
                _real(_require(spec, "fidelity", path), f"{path}.fidelity"),
                spec.get("variant", "mixture"),
            )
    except ConfigError:
        raise
    except (NoSignalError, ValueError) as exc:
        raise ConfigError(path, str(exc)) from None
    raise ConfigError(f"{path}.kind", f"unknown map kind {kind!r}")


@dataclass
class ExperimentConfig:
    raw: Dict[str, Any]
    shared: Optional[BipartiteState]
    bob_map: LocalMap
    bases: Optional[tuple]
    povm: Optional[List[np.ndarray]]
    alice_premap: Optional[KrausMap]
    seed: int
    samples: Dict[str, int] = field(default_factory=lambda: dict(DEFAULT_SAMPLES))

    @property
    def config_hash(self) -> str:
        return config_hash(self.raw)

    def experiment(self) -> SignallingExperiment:
        if self.shared is None:
            raise ConfigError("shared_state", "missing required field")
        if self.bases is None:
            raise ConfigError("bases", "missing required field")
        try:
            return SignallingExperiment(
                self.shared, self.bases[0], self.bases[1], self.bob_map, self.povm, self.alice_premap
            )
        except NoSignalError as exc:
            raise ConfigError("povm" if self.povm is not None else "bob_map", str(exc)) from None


def config_hash(raw: dict) -> str:
    canonical = json.dumps(raw, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()


def parse_config(raw: Any) -> ExperimentConfig:
    """Validate a decoded JSON document; errors carry the field path."""
    if not isinstance(raw, dict):
        raise ConfigError("$", "config must be a JSON object")
    bob_map = parse_map(_require(raw, "bob_map", ""))
    shared = parse_shared_state(raw["shared_state"]) if "shared_state" in raw else None
    bases = None
    if "bases" in raw:
        b = raw["bases"]
        if not isinstance(b, list) or len(b) != 2:
            raise ConfigError("bases", "expected a list of two 3-vectors")
        bases = tuple(parse_vector(v, f"bases[{i}]") for i, v in enumerate(b))
    povm = None
    if raw.get("povm") is not None:
        p = raw["povm"]
        if p == "parity":
            povm = parity_povm()
        elif isinstance(p, list) and p:
            povm = [parse_matrix(m, f"povm[{i}]") for i, m in enumerate(p)]
        else:
            raise ConfigError("povm", "expected a list of matrices or \"parity\"")
    premap = None
    if raw.get("alice_premap") is not None:
        premap = parse_map(raw["alice_premap"], "alice_premap")
        if not isinstance(premap, KrausMap):
            raise ConfigError("alice_premap", "Alice's pre-map must be a Kraus-type channel")
    seed = _int(raw.get("seed", 0), "seed")
    samples = dict(DEFAULT_SAMPLES)
    extra = raw.get("samples", {})
    if not isinstance(extra, dict):
        raise ConfigError("samples", "expected an object")
    for key, value in extra.items():
        if key not in DEFAULT_SAMPLES:
            raise ConfigError(f"samples.{key}", f"unknown sample count; choose from {sorted(DEFAULT_SAMPLES)}")
        samples[key] = _int(value, f"samples.{key}")
        if samples[key] < 1:
            raise ConfigError(f"samples.{key}", "must be positive")
    return ExperimentConfig(raw, shared, bob_map, bases, povm, premap, seed, samples)


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError("$", f"config file {path!r} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("$", f"invalid JSON: {exc}") from None
    return parse_config(raw)
