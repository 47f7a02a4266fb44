"""Command-line front end: detection runs, named-state demos, parameter sweeps.

Subcommands: detect | schmidt | sweep-werner | sweep-purity | state-gen |
tree-gen. Every command is deterministic under a fixed --seed, shot mode
included; sweep samples draw their seeds from a spawned SeedSequence.
Exit codes: 0 = ran (the verdict is data in the output), 2 = input error,
3 = numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .correlations import format_index, parse_index
from .errors import (
    DegenerateDirection,
    DomainError,
    EntDetectError,
    NonFullCorrelation,
    NotHermitian,
    ParseError,
    UnsupportedDimension,
    ZeroSuccess,
)
from .oracles import ppt_verdict
from .schmidt import ProtocolConfig, run_protocol
from .sources import MeasurementSource
from .states import (
    DensityMatrix,
    PureState,
    apply_frame,
    bell_phi_plus,
    load_state,
    make_colored,
    make_dicke,
    make_g,
    make_w,
    make_werner,
    purity,
    random_frame,
    random_mixed,
    save_state,
    singlet,
)
from .tree import (
    DecisionTree,
    DetectionResult,
    default_tree_2q,
    generate_tree,
    load_tree,
    run_tree,
    run_with_bloch_start,
    save_tree,
    tree_to_dict,
)

DEFAULT_SHOTS = 4500
MIN_SHOTS = 100


@dataclass
class ExperimentConfig:
    """Validated run settings shared by the commands."""

    shots: Optional[int] = None  # None = exact mode
    seed: int = 0
    threshold: float = 0.5
    error_multiplier: float = 1.0
    filter_eps: float = 0.5
    tree_path: Optional[str] = None
    frame_seed: Optional[int] = None
    out: Optional[str] = None

    def __post_init__(self):
        if self.shots is not None and self.shots < MIN_SHOTS:
            raise DomainError(f"shot mode needs at least {MIN_SHOTS} shots, got {self.shots}")
        if not 0.0 < self.threshold < 1.0:
            raise DomainError(f"threshold must be in (0, 1), got {self.threshold}")


@dataclass
class SweepRow:
    parameter: float
    fraction: float
    mean_steps: Optional[float]
    n_samples: int
    seed: int

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise DomainError(f"fraction {self.fraction} outside [0, 1]")
        if self.n_samples <= 0:
            raise DomainError("each sweep row needs at least one sample")


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)

    def to_csv(self) -> str:
        lines = ["parameter,fraction,mean_steps,n_samples,seed"]
        for r in self.rows:
            steps = "" if r.mean_steps is None else f"{r.mean_steps:.10g}"
            lines.append(
                f"{r.parameter:.10g},{r.fraction:.10g},{steps},{r.n_samples},{r.seed}"
            )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        return json.dumps(
            [
                {
                    "parameter": r.parameter,
                    "fraction": r.fraction,
                    "mean_steps": r.mean_steps,
                    "n_samples": r.n_samples,
                    "seed": r.seed,
                }
                for r in self.rows
            ]
        )


def parse_mode(text: str) -> Optional[int]:
    """"exact" -> None; "shots" -> 4500; "shots=N" -> N."""
    if text == "exact":
        return None
    if text == "shots":
        return DEFAULT_SHOTS
    if text.startswith("shots="):
        try:
            return int(text.split("=", 1)[1])
        except ValueError as exc:
            raise ParseError(f"bad shot count in mode {text!r}") from exc
    raise ParseError(f"mode must be 'exact', 'shots' or 'shots=N', got {text!r}")


def parse_state_spec(spec: str) -> DensityMatrix:
    """Named constructor (werner:p, colored:p, bell, singlet, w, g,
    dicke:n:k) or a path to a state JSON file."""
    name, _, rest = spec.partition(":")
    try:
        if name == "werner":
            return make_werner(float(rest))
        if name == "colored":
            return make_colored(float(rest))
        if name == "bell":
            return bell_phi_plus().density()
        if name == "singlet":
            return singlet().density()
        if name == "w":
            return make_w().density()
        if name == "g":
            return make_g().density()
        if name == "dicke":
            n_text, _, k_text = rest.partition(":")
            return make_dicke(int(n_text), int(k_text)).density()
    except (ValueError, DomainError) as exc:
        raise ParseError(f"bad state spec {spec!r}: {exc}") from exc
    if spec.endswith(".json"):
        try:
            state = load_state(spec)
        except FileNotFoundError as exc:
            raise ParseError(f"state file not found: {spec}") from exc
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ParseError(f"malformed state file {spec}: {exc}") from exc
        return state.density() if isinstance(state, PureState) else state
    raise ParseError(f"unknown state spec {spec!r}")


def _prepare_state(spec: str, cfg: ExperimentConfig) -> DensityMatrix:
    state = parse_state_spec(spec)
    if cfg.frame_seed is not None:
        state = apply_frame(state, random_frame(state.n_qubits, cfg.frame_seed))
    return state


def _result_payload(result: DetectionResult, cfg: ExperimentConfig, extra=None) -> dict:
    payload = {
        "verdict": result.verdict,
        "detected": result.detected,
        "sum_of_squares": result.sum_of_squares,
        "propagated_error": result.propagated_error,
        "steps": result.steps,
        "strategy": result.strategy,
        "seed": cfg.seed,
        "mode": "exact" if cfg.shots is None else f"shots={cfg.shots}",
        "transcript": [
            {
                "index": format_index(r.index),
                "value": r.value,
                "stderr": r.stderr,
                "shots": r.shots,
            }
            for r in result.records
        ],
        "details": _json_safe(result.details),
    }
    if extra:
        payload.update(extra)
    return payload


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_safe(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    return obj


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _print_summary(result: DetectionResult) -> None:
    print(f"verdict: {result.verdict}")
    print(f"sum of squares: {result.sum_of_squares:.6f}")
    print(f"steps: {result.steps}")
    for r in result.records:
        noise = "" if r.shots is None else f" +- {r.stderr:.4f} ({r.shots} shots)"
        print(f"  T_{format_index(r.index)} = {r.value:+.4f}{noise}")


def detect_once(
    state: DensityMatrix, cfg: ExperimentConfig, tree: Optional[DecisionTree] = None
) -> DetectionResult:
    """One decision-tree run; 2-qubit states use the canonical zz-rooted
    plan, larger ones start from the Bloch-vector heuristic."""
    source = MeasurementSource(state, cfg.shots, np.random.default_rng(cfg.seed))
    if tree is not None:
        return run_tree(source, tree, error_multiplier=cfg.error_multiplier)
    if state.n_qubits == 2:
        return run_tree(
            source, default_tree_2q(cfg.threshold), error_multiplier=cfg.error_multiplier
        )
    return run_with_bloch_start(
        source, threshold=cfg.threshold, error_multiplier=cfg.error_multiplier
    )


def sweep_werner(
    p_values, cfg: ExperimentConfig, repeats: int = 20
) -> SweepResult:
    """Detection across the Werner family, one row per mixing probability."""
    result = SweepResult()
    tree = default_tree_2q(cfg.threshold)
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(p_values))
    for p, seq in zip(p_values, seeds):
        state = make_werner(p)
        n_runs = 1 if cfg.shots is None else repeats
        rng = np.random.default_rng(seq)
        detected, steps = 0, []
        for _ in range(n_runs):
            source = MeasurementSource(state, cfg.shots, rng)
            run = run_tree(source, tree, error_multiplier=cfg.error_multiplier)
            if run.detected:
                detected += 1
                steps.append(run.steps)
        result.rows.append(
            SweepRow(
                parameter=float(p),
                fraction=detected / n_runs,
                mean_steps=(sum(steps) / len(steps)) if steps else None,
                n_samples=n_runs,
                seed=cfg.seed,
            )
        )
    return result


def sweep_purity(
    n_samples: int, cfg: ExperimentConfig, bins: int = 10
) -> SweepResult:
    """Detection fraction among PPT-entangled Ginibre states, binned by purity.

    Samples draw a uniformly random Ginibre rank from 1..4 so every purity
    bin between 0.25 and 1 is populated; rank-1 draws are pure states.
    Bins that contain no entangled sample are dropped (every emitted row has
    a positive sample count).
    """
    if n_samples < 1000:
        raise DomainError(f"purity sweep needs at least 1000 samples, got {n_samples}")
    tree = default_tree_2q(cfg.threshold)
    edges = np.linspace(0.25, 1.0, bins + 1)
    entangled_count = np.zeros(bins, dtype=int)
    detected_count = np.zeros(bins, dtype=int)
    step_sums = np.zeros(bins)
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_samples)
    for seq in seeds:
        rng = np.random.default_rng(seq)
        rank = int(rng.integers(1, 5))
        state = random_mixed(2, rng, rank=rank)
        if not ppt_verdict(state).entangled:
            continue
        b = min(int((purity(state) - 0.25) / (0.75 / bins)), bins - 1)
        entangled_count[b] += 1
        source = MeasurementSource(state, cfg.shots, rng)
        run = run_tree(source, tree, error_multiplier=cfg.error_multiplier)
        if run.detected:
            detected_count[b] += 1
            step_sums[b] += run.steps
    result = SweepResult()
    for b in range(bins):
        if entangled_count[b] == 0:
            continue
        result.rows.append(
            SweepRow(
                parameter=float((edges[b] + edges[b + 1]) / 2),
                fraction=detected_count[b] / entangled_count[b],
                mean_steps=(step_sums[b] / detected_count[b]) if detected_count[b] else None,
                n_samples=int(entangled_count[b]),
                seed=cfg.seed,
            )
        )
    return result


def _config_from_args(args) -> ExperimentConfig:
    return ExperimentConfig(
        shots=parse_mode(args.mode),
        seed=args.seed,
        threshold=args.threshold,
        error_multiplier=args.error_multiplier,
        filter_eps=getattr(args, "filter_eps", 0.5),
        tree_path=getattr(args, "tree", None),
        frame_seed=getattr(args, "frame_seed", None),
        out=args.out,
    )


def cmd_detect(args) -> int:
    cfg = _config_from_args(args)
    state = _prepare_state(args.state, cfg)
    tree = None
    if cfg.tree_path:
        tree = load_tree(cfg.tree_path)
    elif args.root:
        tree = generate_tree(state.n_qubits, parse_index(args.root), threshold=cfg.threshold)
    result = detect_once(state, cfg, tree)
    _print_summary(result)
    if cfg.out:
        _emit(json.dumps(_result_payload(result, cfg), indent=2) + "\n", cfg.out)
    return 0


def cmd_schmidt(args) -> int:
    cfg = _config_from_args(args)
    state = _prepare_state(args.state, cfg)
    if state.n_qubits != 2:
        raise ParseError("the schmidt command needs a two-qubit state")
    source = MeasurementSource(state, cfg.shots, np.random.default_rng(cfg.seed))
    protocol = ProtocolConfig(
        filter_eps=cfg.filter_eps,
        always_extra=not args.minimal,
        error_multiplier=cfg.error_multiplier,
    )
    result = run_protocol(source, protocol)
    _print_summary(result)
    if result.details.get("filter"):
        p = result.details["filter"]["success_probability"]
        print(f"filter applied (eps={protocol.filter_eps}, success probability {p:.4f})")
    if cfg.out:
        _emit(json.dumps(_result_payload(result, cfg), indent=2) + "\n", cfg.out)
    return 0


def cmd_sweep_werner(args) -> int:
    cfg = _config_from_args(args)
    if not (0.0 <= args.p_min <= args.p_max <= 1.0) or args.step <= 0:
        raise ParseError("werner sweep grid must satisfy 0 <= p-min <= p-max <= 1, step > 0")
    count = int(math.floor((args.p_max - args.p_min) / args.step + 1e-9)) + 1
    grid = [round(args.p_min + i * args.step, 12) for i in range(count)]
    sweep = sweep_werner(grid, cfg, repeats=args.repeats)
    _emit(sweep.to_json() + "\n" if args.format == "json" else sweep.to_csv(), cfg.out)
    return 0


def cmd_sweep_purity(args) -> int:
    cfg = _config_from_args(args)
    sweep = sweep_purity(args.samples, cfg, bins=args.bins)
    _emit(sweep.to_json() + "\n" if args.format == "json" else sweep.to_csv(), cfg.out)
    return 0


def cmd_state_gen(args) -> int:
    state = parse_state_spec(args.state)
    save_state(state, args.out)
    print(f"wrote {args.state} ({state.n_qubits} qubits) to {args.out}")
    return 0


def cmd_tree_gen(args) -> int:
    root = parse_index(args.root)
    tree = generate_tree(args.n, root, threshold=args.threshold, max_depth=args.max_depth)
    if args.out:
        save_tree(tree, args.out)
        print(f"wrote tree rooted at {args.root} to {args.out}")
    else:
        print(json.dumps(tree_to_dict(tree)))
    return 0


def _add_common(parser, *, frame=True):
    parser.add_argument("--mode", default="exact", help="exact | shots | shots=N (default exact)")
    parser.add_argument("--seed", type=int, default=0, help="master seed (default 0)")
    parser.add_argument("--threshold", type=float, default=0.5, help="big/small branching threshold")
    parser.add_argument(
        "--error-multiplier", type=float, default=1.0,
        help="standard errors subtracted before the detection verdict in shot mode",
    )
    parser.add_argument("--out", default=None, help="output file path")
    if frame:
        parser.add_argument("--frame-seed", type=int, default=None,
                            help="apply a random local frame drawn from this seed")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entdetect",
        description="Entanglement detection from correlation measurements",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run the decision tree on a state")
    p.add_argument("state", help="state spec (werner:0.8, colored:0.3, bell, w, g, dicke:4:2, file.json)")
    _add_common(p)
    p.add_argument("--tree", default=None, help="JSON file with a measurement plan")
    p.add_argument("--root", default=None, help="root a generated tree at this index (e.g. zz)")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("schmidt", help="run the Schmidt-basis calibration protocol")
    p.add_argument("state", help="two-qubit state spec")
    _add_common(p)
    p.add_argument("--filter-eps", type=float, default=0.5, help="filter strength (default 0.5)")
    p.add_argument("--minimal", action="store_true",
                   help="phase-gated variant: skip the extra correlation unless the phase is small")
    p.set_defaults(func=cmd_schmidt)

    p = sub.add_parser("sweep-werner", help="detection across the Werner family")
    _add_common(p, frame=False)
    p.add_argument("--p-min", type=float, default=0.0)
    p.add_argument("--p-max", type=float, default=1.0)
    p.add_argument("--step", type=float, default=0.005)
    p.add_argument("--repeats", type=int, default=20, help="shot-mode runs per grid point")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep_werner)

    p = sub.add_parser("sweep-purity", help="detection fraction vs purity for random mixed states")
    _add_common(p, frame=False)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--bins", type=int, default=10)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_sweep_purity)

    p = sub.add_parser("state-gen", help="write a named state to a JSON file")
    p.add_argument("state")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_state_gen)

    p = sub.add_parser("tree-gen", help="generate a measurement plan and write it as JSON")
    p.add_argument("n", type=int, help="number of qubits")
    p.add_argument("root", help="root index, e.g. zz or xxx")
    p.add_argument("--threshold", type=float, default=0.5)
    p.add_argument("--max-depth", type=int, default=None)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_tree_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (ParseError, DomainError, NonFullCorrelation, UnsupportedDimension, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NotHermitian, ZeroSuccess, DegenerateDirection, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except EntDetectError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())
