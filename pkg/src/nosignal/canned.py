"""Canned experiments: the lawful and unlawful cloners, checked against known values."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from .classify import classify_map, random_channel
from .cloning import OPTIMAL_FIDELITY_1_TO_2, average_fidelity
from .config import parity_povm
from .maps import BlochAffineCloneMap, BlochNonlinearCloneMap, LocalMap, PureBranchMap, power, square
from .signalling import (
    VERDICT_THRESHOLD,
    SignallingExperiment,
    Verdict,
    conditional_probs,
    decode_mutual_info,
    helstrom_success,
    no_signalling_distance,
    scan_bases,
)
from .states import partially_entangled, singlet

Z = np.array([0.0, 0.0, 1.0])
X = np.array([1.0, 0.0, 0.0])


def binary_entropy(p: float) -> float:
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


@dataclass
class Check:
    name: str
    actual: Any
    expected: Any
    # "close": |actual - expected| <= tol; "lt"/"gt": strict bound; "eq": equality
    relation: str = "close"
    tol: float = 0.0

    @property
    def passed(self) -> bool:
        if self.relation == "close":
            return abs(self.actual - self.expected) <= self.tol
        if self.relation == "lt":
            return self.actual < self.expected
        if self.relation == "gt":
            return self.actual > self.expected
        return self.actual == self.expected

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "actual": self.actual,
            "expected": self.expected,
            "relation": self.relation,
            "tol": self.tol,
            "passed": self.passed,
        }


@dataclass
class Row:
    label: str
    region: str
    distance: float
    fidelity: Optional[float]
    verdict: str
    checks: List[Check] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "region": self.region,
            "distance": self.distance,
            "fidelity": self.fidelity,
            "verdict": self.verdict,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
            **self.extra,
        }


def _verdict(distance: float, threshold: float) -> str:
    return (Verdict.SIGNALS if distance > threshold else Verdict.NO_SIGNAL).value


def _fidelity(local_map: LocalMap, seed: int) -> Optional[float]:
    return average_fidelity(local_map, 10_000, seed).average_fidelity


def _example_1(threshold: float, seed: int) -> List[Row]:
    rows = []
    for eta, region in ((0.7, "LINEAR_NONPOSITIVE_NOSIGNAL"), (2.0 / 3.0, "QM")):
        m = BlochAffineCloneMap(eta, 1.0 / 3.0)
        cls = classify_map(m, seed=seed)
        scan = scan_bases(singlet(), m, 100, seed)
        fid = _fidelity(m, seed)
        checks = [
            Check("region", cls.region.value, region, "eq"),
            Check("max distance over 100 basis pairs", scan.max_distance, 1e-10, "lt"),
            Check("clone fidelity (1+eta)/2", fid, (1 + eta) / 2, "close", 1e-3),
        ]
        if eta > 2.0 / 3.0:
            checks.append(Check("min output eigenvalue", cls.min_output_eigenvalue, -1e-3, "lt"))
            checks.append(Check("fidelity above 5/6", fid, OPTIMAL_FIDELITY_1_TO_2, "gt"))
        else:
            checks.append(Check("positive", cls.is_positive, True, "eq"))
        rows.append(
            Row(
                f"Ex1 affine cloner eta={eta:.4g}, t=1/3",
                cls.region.value,
                scan.max_distance,
                fid,
                _verdict(scan.max_distance, threshold),
                checks,
                {"min_output_eigenvalue": cls.min_output_eigenvalue},
            )
        )
    return rows


def _example_2(threshold: float, seed: int) -> List[Row]:
    rows = []
    cases = [
        ("odd f=s^3, singlet", power(3), singlet(), "lt"),
        ("odd f=s^3, partial theta=pi/6", power(3), partially_entangled(np.pi / 6), "gt"),
        ("even f=s^2, singlet", square(), singlet(), "gt"),
    ]
    for label, f, state, relation in cases:
        m = BlochNonlinearCloneMap(f, 0.0)
        scan = scan_bases(state, m, 100, seed)
        bound = 1e-10 if relation == "lt" else 1e-3
        checks = [Check("max distance over 100 basis pairs", scan.max_distance, bound, relation)]
        if relation == "gt":
            cls = classify_map(m, seed=seed)
            checks.append(Check("region", cls.region.value, "NONLINEAR", "eq"))
            region = cls.region.value
        else:
            region = "NONLINEAR"
        if "partial" in label:
            exp = SignallingExperiment(state, Z, X, m)
            # z vs x closed form: Bloch z-components -1/2 vs -1/8 weighted by S_z
            checks.append(Check("z vs x distance = 3/16", no_signalling_distance(exp), 3 / 16, "close", 1e-12))
        rows.append(Row(f"Ex2 {label}", region, scan.max_distance, None, _verdict(scan.max_distance, threshold), checks))
    return rows


def _example_3(threshold: float, seed: int) -> List[Row]:
    rows = []
    mi_expected = binary_entropy(0.25) - 0.5
    for fid in (1.0, 0.3, 0.0):
        m = PureBranchMap(2, fid, "mixture")
        exp = SignallingExperiment(singlet(), Z, X, m, parity_povm())
        probs = conditional_probs(exp)
        dist = no_signalling_distance(exp)
        cls = classify_map(m, seed=seed)
        checks = [
            Check("p(0|psi)", float(probs[0, 0]), 0.0, "close", 1e-12),
            Check("p(1|psi)", float(probs[0, 1]), 1.0, "close", 1e-12),
            Check("p(0|phi)", float(probs[1, 0]), 0.5, "close", 1e-12),
            Check("p(1|phi)", float(probs[1, 1]), 0.5, "close", 1e-12),
            Check("helstrom success >= 3/4", helstrom_success(exp), 0.75 - 1e-12, "gt"),
            Check("mutual information H(1/4)-1/2", decode_mutual_info(probs), mi_expected, "close", 1e-9),
            Check("region", cls.region.value, "NONLINEAR", "eq"),
        ]
        rows.append(
            Row(
                f"Ex3 mixture N=2 F={fid:g}",
                cls.region.value,
                dist,
                fid,
                _verdict(dist, threshold),
                checks,
                {"conditional_probs": probs.tolist()},
            )
        )
    for fid, relation in ((1.0, "gt"), (0.5, "lt")):
        m = PureBranchMap(2, fid, "factorized")
        exp = SignallingExperiment(singlet(), Z, X, m, parity_povm())
        dist = no_signalling_distance(exp)
        bound = 1e-3 if relation == "gt" else 1e-10
        rows.append(
            Row(
                f"Ex3 factorized N=2 F={fid:g}",
                classify_map(m, seed=seed).region.value,
                dist,
                fid,
                _verdict(dist, threshold),
                [Check("z vs x distance", dist, bound, relation)],
            )
        )
    return rows


def _theorem(threshold: float, seed: int) -> List[Row]:
    m = random_channel(2, 2, 2, seed + 7)
    scan = scan_bases(singlet(), m, 100, seed)
    return [
        Row(
            "Random CPTP channel, singlet",
            classify_map(m, seed=seed).region.value,
            scan.max_distance,
            None,
            _verdict(scan.max_distance, threshold),
            [Check("max distance over 100 basis pairs", scan.max_distance, 1e-10, "lt")],
        )
    ]


SECTIONS: List[Callable[[float, int], List[Row]]] = [_theorem, _example_1, _example_2, _example_3]


def run_canned(threshold: float = VERDICT_THRESHOLD, seed: int = 0) -> List[Row]:
    rows: List[Row] = []
    for section in SECTIONS:
        rows.extend(section(threshold, seed))
    return rows


def format_table(rows: List[Row]) -> str:
    header = f"{'experiment':<40} {'region':<28} {'distance':>14} {'fidelity':>10} {'verdict':<10} ok"
    lines = [header, "-" * len(header)]
    for r in rows:
        fid = "-" if r.fidelity is None else f"{r.fidelity:.6f}"
        lines.append(
            f"{r.label:<40} {r.region:<28} {r.distance:>14.6e} {fid:>10} {r.verdict:<10} {'yes' if r.passed else 'NO'}"
        )
        for c in r.checks:
            if not c.passed:
                lines.append(f"    FAILED {c.name}: actual={c.actual!r} expected {c.relation} {c.expected!r}")
    return "\n".join(lines)
