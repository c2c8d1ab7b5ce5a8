"""Command-line surface.

Commands: ``solve`` (equilibrium JSON), ``verify`` (brute-force
certification JSON), ``sweep`` (region-table CSV), ``figure`` (interval
endpoints CSV), ``simulate`` (trial CSV, optional effects CSV), ``report``
(everything, plus rendered figures). Exit codes: 0 success, 1 validation
error, 2 internal failure. No output file is written when validation
fails; every run leaves a manifest next to its outputs.
"""

from __future__ import annotations

import argparse
import dataclasses
import io
import json
import sys
from pathlib import Path

from . import __version__
from .config import (
    MAX_SEED,
    ConfigError,
    RunManifest,
    ScenarioConfig,
    config_hash,
    parse_config,
    serialize_config,
)
from .equilibrium import (
    build_bne_candidate,
    build_me_candidate,
    enumerate_me,
    enumerate_pure_bne,
    equilibrium_document,
    verify_profile,
)
from .sweep import SWEEPABLE_PARAMS, SweepSpec, figure_eqviz_data, sweep, write_endpoints_csv, write_region_csv


class ValidationFailure(Exception):
    """User-input problem; maps to exit code 1."""


# CLI sweep axes accept the config-key spellings
_VARY_TO_PARAM = {
    "pi": "prior",
    "tau": "honesty_weight",
    "gamma": "rating_weight",
    "lambda": "bias_true",
    "lambda_hat_r": "bias_hat_receiver",
    "lambda_hat_s": "bias_hat_sender",
}


def _load_config(path: str | None, overrides: dict[str, float]) -> ScenarioConfig:
    text = ""
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ValidationFailure(f"config file not found: {path}")
        text = p.read_text(encoding="utf-8")
    try:
        cfg = parse_config(text)
        if overrides:
            lines = [
                line
                for line in serialize_config(cfg).splitlines()
                if line.split("=")[0].strip() not in overrides
            ]
            lines += [f"{k} = {v}" for k, v in overrides.items()]
            cfg = parse_config("\n".join(lines))
    except ConfigError as exc:
        raise ValidationFailure(str(exc)) from exc
    return cfg


def _collect_overrides(args: argparse.Namespace) -> dict[str, float]:
    # argparse stores the bias overrides under lam/lam_hat_r/lam_hat_s
    mapping = {
        "pi": "pi",
        "tau": "tau",
        "gamma": "gamma",
        "lam": "lambda",
        "lam_hat_r": "lambda_hat_r",
        "lam_hat_s": "lambda_hat_s",
    }
    out = {}
    for attr, key in mapping.items():
        value = getattr(args, attr, None)
        if value is not None:
            out[key] = value
    return out


def _write_outputs(cfg: ScenarioConfig, seed: int | None, outputs: dict[str, str]) -> None:
    """Write all prepared outputs, then the manifest next to them."""
    for path, content in outputs.items():
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(content, encoding="utf-8")
    manifest = RunManifest(
        tool_version=__version__,
        config_hash=config_hash(cfg),
        seed=seed,
        outputs=tuple(outputs),
    )
    first = next(iter(outputs))
    manifest_path = Path(first).with_name(Path(first).name + ".manifest.json")
    manifest_path.write_text(manifest.to_json(), encoding="utf-8")


def _cmd_solve(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, _collect_overrides(args))
    doc = equilibrium_document(cfg.game_params())
    _write_outputs(cfg, None, {args.out: json.dumps(doc, indent=2) + "\n"})
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, _collect_overrides(args))
    if not 0.0 < args.grid_step <= 0.01:
        raise ValidationFailure(f"--grid-step must be in (0, 0.01], got {args.grid_step}")
    params = cfg.game_params()
    entries = []
    all_pass = True
    for m in enumerate_me(params):
        report = verify_profile(build_me_candidate(params, m.row), params, args.grid_step)
        all_pass &= report.passed
        entries.append({"candidate": f"me_row{m.row}", **dataclasses.asdict(report)})
    for b in enumerate_pure_bne(
        params.prior, params.honesty_weight, params.rating_weight, params.bias_true, params.off_path
    ):
        report = verify_profile(build_bne_candidate(params, b.kind), params, args.grid_step)
        all_pass &= report.passed
        entries.append({"candidate": f"bne_{b.kind.value}", **dataclasses.asdict(report)})
    doc = {"all_pass": all_pass, "profiles": entries}
    _write_outputs(cfg, None, {args.out: json.dumps(doc, indent=2) + "\n"})
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config, _collect_overrides(args))
    names = [v.strip() for v in args.vary.split(",") if v.strip()]
    unknown = [v for v in names if v not in _VARY_TO_PARAM and v not in SWEEPABLE_PARAMS]
    if unknown:
        raise ValidationFailure(
            f"unknown sweep parameter(s) {unknown}; choose from {sorted(_VARY_TO_PARAM)}"
        )
    vary = tuple(_VARY_TO_PARAM.get(v, v) for v in names)
    try:
        spec = SweepSpec(vary=vary, minimum=args.min, maximum=args.max, step=args.step, fixed=cfg.game_params())
        table = sweep(spec)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc
    buf = io.StringIO()
    write_region_csv(table, buf)
    _write_outputs(cfg, None, {args.out: buf.getvalue()})
    return 0


def _cmd_figure(args: argparse.Namespace) -> int:
    try:
        lines = figure_eqviz_data(args.panel)
    except ValueError as exc:
        raise ValidationFailure(str(exc)) from exc
    buf = io.StringIO()
    write_endpoints_csv(lines, buf)
    cfg = ScenarioConfig()
    _write_outputs(cfg, None, {args.out: buf.getvalue()})
    return 0


def _resolve_seed(args: argparse.Namespace, cfg: ScenarioConfig) -> int:
    seed = args.seed if args.seed is not None else cfg.seed
    if seed is None:
        raise ValidationFailure("simulate requires a seed: pass --seed or set `seed` in the config")
    if not 0 <= seed < MAX_SEED:
        raise ValidationFailure("seed must be an unsigned 64-bit integer")
    return seed


def _cmd_simulate(args: argparse.Namespace) -> int:
    from .experiment import run_experiment, write_trials_csv
    from .report import standard_effects, write_effects_csv

    cfg = _load_config(args.config, _collect_overrides(args))
    seed = _resolve_seed(args, cfg)
    records = run_experiment(cfg, seed)
    outputs = {}
    buf = io.StringIO()
    write_trials_csv(records, buf)
    outputs[args.out] = buf.getvalue()
    if args.effects:
        ebuf = io.StringIO()
        write_effects_csv(standard_effects(records, seed=seed), ebuf)
        outputs[args.effects] = ebuf.getvalue()
    _write_outputs(cfg, seed, outputs)
    return 0


def _cmd_report(args: argparse.Namespace) -> int:
    from .experiment import run_experiment, write_trials_csv
    from .report import (
        render_effects,
        render_eqviz_panels,
        standard_effects,
        write_effects_csv,
    )

    cfg = _load_config(args.config, _collect_overrides(args))
    seed = args.seed if args.seed is not None else cfg.seed
    outdir = Path(args.outdir)
    text_outputs: dict[str, str] = {}
    doc = equilibrium_document(cfg.game_params())
    text_outputs[str(outdir / "equilibria.json")] = json.dumps(doc, indent=2) + "\n"
    for panel in ("A", "B", "C"):
        buf = io.StringIO()
        write_endpoints_csv(figure_eqviz_data(panel), buf)
        text_outputs[str(outdir / f"panel{panel}.csv")] = buf.getvalue()
    spec = SweepSpec(
        vary=("rating_weight",), minimum=0.1, maximum=30.0, step=0.01, fixed=cfg.game_params()
    )
    buf = io.StringIO()
    write_region_csv(sweep(spec), buf)
    text_outputs[str(outdir / "region_sweep.csv")] = buf.getvalue()

    records = None
    estimates = None
    if seed is not None:
        records = run_experiment(cfg, seed)
        buf = io.StringIO()
        write_trials_csv(records, buf)
        text_outputs[str(outdir / "trials.csv")] = buf.getvalue()
        estimates = standard_effects(records, seed=seed)
        ebuf = io.StringIO()
        write_effects_csv(estimates, ebuf)
        text_outputs[str(outdir / "effects.csv")] = ebuf.getvalue()

    outdir.mkdir(parents=True, exist_ok=True)
    rendered = []
    eqviz_path = outdir / "equilibrium_intervals.png"
    render_eqviz_panels(eqviz_path)
    rendered.append(str(eqviz_path))
    if estimates:
        effects_path = outdir / "effects.png"
        render_effects(estimates, effects_path)
        rendered.append(str(effects_path))

    for path, content in text_outputs.items():
        Path(path).write_text(content, encoding="utf-8")
    manifest = RunManifest(
        tool_version=__version__,
        config_hash=config_hash(cfg),
        seed=seed,
        outputs=tuple(list(text_outputs) + rendered),
    )
    (outdir / "run_manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mosig",
        description="Solve and simulate the motivated-receiver sender-receiver rating game.",
    )
    parser.add_argument("--version", action="version", version=f"mosig {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, config_required: bool = False) -> None:
        p.add_argument("--config", required=config_required, help="scenario config file (key = value lines)")
        p.add_argument("--pi", type=float, default=None, help="override: prior on the high state")
        p.add_argument("--tau", type=float, default=None, help="override: honesty weight")
        p.add_argument("--gamma", type=float, default=None, help="override: rating weight")
        p.add_argument("--lam", "--lambda", dest="lam", type=float, default=None, help="override: true receiver bias")
        p.add_argument("--lam-hat-r", "--lambda-hat-r", dest="lam_hat_r", type=float, default=None, help="override: receiver's believed bias")
        p.add_argument("--lam-hat-s", "--lambda-hat-s", dest="lam_hat_s", type=float, default=None, help="override: sender's believed bias")

    p = sub.add_parser("solve", help="enumerate BNE and motivated equilibria to JSON")
    add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="brute-force certify every enumerated profile")
    add_common(p)
    p.add_argument("--grid-step", type=float, default=1e-3)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("sweep", help="region-table CSV over a parameter grid")
    add_common(p)
    p.add_argument("--vary", required=True, help="comma-separated parameter name(s), e.g. gamma")
    p.add_argument("--min", type=float, required=True)
    p.add_argument("--max", type=float, required=True)
    p.add_argument("--step", type=float, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("figure", help="interval-endpoint CSV for one visualization panel")
    p.add_argument("--panel", required=True, choices=["A", "B", "C", "a", "b", "c"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_figure)

    p = sub.add_parser("simulate", help="run the agent-based experiment to a trial CSV")
    add_common(p)
    p.add_argument("--seed", type=int, default=None, help="required unless the config sets one")
    p.add_argument("--out", required=True)
    p.add_argument("--effects", default=None, help="also write treatment-effect estimates CSV")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("report", help="figures plus all delimited outputs in one directory")
    add_common(p)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--outdir", required=True)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # internal failure
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def run() -> None:
    raise SystemExit(main())
