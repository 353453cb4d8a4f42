"""Command-line entry point.

Exit codes: 0 success, 1 a canned check failed, 2 config error,
3 contract violation while running.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from datetime import datetime, timezone
from typing import Any, List, Optional

import numpy as np

from .canned import format_table, run_canned
from .classify import classify_map
from .cloning import average_fidelity
from .config import ConfigError, ExperimentConfig, load_config
from .exceptions import NoSignalError
from .signalling import VERDICT_THRESHOLD, NonPositiveWarning, run_experiment, scan_bases

EXIT_OK, EXIT_MISMATCH, EXIT_CONFIG, EXIT_CONTRACT = 0, 1, 2, 3


def _round(obj: Any) -> Any:
    """Floats to 12 significant digits, recursively; numpy scalars unwrapped."""
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return float(f"{float(obj):.12g}")
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _round(obj.tolist())
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    if hasattr(obj, "value"):
        return obj.value
    return obj


def _envelope(command: str, cfg: Optional[ExperimentConfig], body: dict) -> dict:
    doc = {
        "command": command,
        "config_hash": cfg.config_hash if cfg else None,
        "seed": cfg.seed if cfg else None,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
    }
    doc.update(body)
    return _round(doc)


def _emit(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=False)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _classification(cfg: ExperimentConfig) -> dict:
    return classify_map(
        cfg.bob_map,
        trials=cfg.samples["linearity_trials"],
        samples=max(100, cfg.samples["positivity_samples"]),
        seed=cfg.seed,
    ).to_dict()


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    exp = cfg.experiment()
    report = run_experiment(exp, threshold=args.tolerance)
    body = {
        "distance": report.distance,
        "helstrom_success": report.helstrom_success,
        "conditional_probs": report.conditional_probs,
        "decoder": report.decoder,
        "mutual_info_bits": report.mutual_info_bits,
        "verdict": report.verdict.value,
        "negative_probability": report.negative_probability,
        "warnings": report.warnings,
        "classification": _classification(cfg),
    }
    m = cfg.bob_map
    if m.d_in == 2 and m.d_out >= 4:
        body["fidelity"] = average_fidelity(m, max(1000, cfg.samples["fidelity_samples"]), cfg.seed).summary()
    _emit(_envelope("run", cfg, body), args.out)
    return EXIT_OK


def cmd_classify(args) -> int:
    cfg = load_config(args.config)
    _emit(_envelope("classify", cfg, {"classification": _classification(cfg)}), args.out)
    return EXIT_OK


def cmd_scan(args) -> int:
    cfg = load_config(args.config)
    if cfg.shared is None:
        raise ConfigError("shared_state", "missing required field")
    pairs = args.pairs if args.pairs is not None else cfg.samples["scan_pairs"]
    seed = args.seed if args.seed is not None else cfg.seed
    result = scan_bases(cfg.shared, cfg.bob_map, pairs, seed, cfg.alice_premap)
    verdict = "SIGNALS" if result.max_distance > args.tolerance else "NO_SIGNAL"
    body = {
        "pairs": pairs,
        "scan_seed": seed,
        "max_distance": result.max_distance,
        "argmax_pair": [result.basis_1, result.basis_2],
        "verdict": verdict,
    }
    _emit(_envelope("scan", cfg, body), args.out)
    return EXIT_OK


def cmd_paper_examples(args) -> int:
    rows = run_canned(threshold=args.tolerance, seed=args.seed)
    print(format_table(rows))
    if args.out:
        _emit(_envelope("paper-examples", None, {"rows": [r.to_dict() for r in rows]}), args.out)
    failed = [r.label for r in rows if not r.passed]
    if failed:
        print(f"\n{len(failed)} row(s) failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"\nall {len(rows)} rows passed")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nosignal",
        description="Local maps on entangled qubit pairs: signalling, cloning, classification.",
    )
    parser.add_argument(
        "--tolerance",
        type=float,
        default=VERDICT_THRESHOLD,
        help="trace distance above which a run is reported as SIGNALS (default %(default)g)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("paper-examples", help="run the canned cloner experiments and check known values")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="also write a JSON report here")
    p.set_defaults(func=cmd_paper_examples)

    p = sub.add_parser("run", help="run one configured signalling experiment")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("classify", help="classify the configured bob_map")
    p.add_argument("--config", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("scan", help="maximize the no-signalling distance over random basis pairs")
    p.add_argument("--config", required=True)
    p.add_argument("--pairs", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_scan)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", NonPositiveWarning)
            return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NoSignalError, ValueError) as exc:
        print(f"contract violation: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
