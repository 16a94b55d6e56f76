"""Command-line front end: run | sweep | verify.

Reports are machine readable: a CSV with one row per simulated point and a
JSON sidecar carrying the resolved configuration echo, headline ratios,
and verdicts.  Nothing time-stamped goes into either file, so identical
invocations produce identical bytes.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .model import F16, F64, network_forward, synth_inputs, synth_model
from .modelio import load_model
from .recipes import RECIPE_NAMES, run_recipe
from .sim import (
    MODE_BASELINE,
    MODE_PARALLEL_MLP,
    MODE_PIPELINE_KAN,
    ModeError,
    SimConfig,
    SimulationError,
    SweepTemplate,
    simulate,
    sweep,
)
from .sparsity import PatternMask
from .verify import run_property_suite

CLI_MODES = {
    "kan-pipeline": MODE_PIPELINE_KAN,
    "mlp-parallel": MODE_PARALLEL_MLP,
    "baseline": MODE_BASELINE,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kansim",
        description="KAN/MLP inference and accelerator timing model",
    )
    parser.add_argument("--version", action="version", version=f"kansim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; explicit flags override it")
        p.add_argument("--model", help="path to a saved model file")
        p.add_argument("--synth", help='synthesize a model, e.g. "kan:72,32,96"')
        p.add_argument("--g", type=int, help="grid size for synthesized KANs")
        p.add_argument("--k", type=int, help="spline order for synthesized KANs")
        p.add_argument("--mask", help='pattern mask "1010", comma list per layer, or "off"')
        p.add_argument("--mode", choices=sorted(CLI_MODES), help="dataflow mode")
        p.add_argument("--zero-fraction", type=float, dest="zero_fraction",
                       help="fraction of synthesized weights set to zero")
        p.add_argument("--input-zeros", type=float, dest="input_zeros",
                       help="fraction of zeroed input elements")
        p.add_argument("--seed", type=int)
        p.add_argument("--batch", type=int)
        p.add_argument("--precision", choices=["f64", "f16-emu"])
        p.add_argument("--spu", choices=["on", "off"],
                       help="parallel mode: use the SPU array as extra MAC units")
        p.add_argument("--out", help="output path prefix (writes .csv and .json)")

    p_run = sub.add_parser("run", help="simulate one configuration")
    add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="simulate a parameter sweep")
    add_common(p_sweep)
    p_sweep.add_argument("--recipe", choices=RECIPE_NAMES)
    p_sweep.add_argument("--param", choices=["G", "pattern_rate", "zero_fraction"])
    p_sweep.add_argument("--values", help="comma-separated sweep values")

    p_verify = sub.add_parser("verify", help="run the property suite")
    p_verify.add_argument("--inject-fault", dest="inject_fault", help=argparse.SUPPRESS)
    return parser


DEFAULTS = {
    "model": None,
    "synth": None,
    "g": 4,
    "k": 3,
    "mask": None,
    "mode": "kan-pipeline",
    "zero_fraction": 0.0,
    "input_zeros": 0.0,
    "seed": 0,
    "batch": 64,
    "precision": "f64",
    "spu": "on",
    "out": "report",
    "recipe": None,
    "param": None,
    "values": None,
}


class CliError(ValueError):
    pass


def resolve_spec(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and explicit flags (flags win)."""
    spec = dict(DEFAULTS)
    sim_overrides: dict = {}
    config_path = getattr(args, "config", None)
    if config_path:
        try:
            loaded = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as err:
            raise CliError(f"config file {config_path}: {err}") from None
        if not isinstance(loaded, dict):
            raise CliError(f"config file {config_path}: expected a JSON object")
        sim_overrides = dict(loaded.pop("sim", {}))
        unknown = set(loaded) - set(DEFAULTS)
        if unknown:
            raise CliError(f"config file {config_path}: unknown fields {sorted(unknown)}")
        spec.update(loaded)
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            spec[key] = value
    spec["sim"] = sim_overrides
    return spec


def _parse_synth(text: str) -> tuple[str, list[int]]:
    try:
        kind, sizes = text.split(":", 1)
        sizes = [int(s) for s in sizes.split(",")]
    except ValueError:
        raise CliError(f'bad --synth value {text!r}, expected "kind:n0,n1,..."') from None
    return kind.strip().lower(), sizes


def _parse_masks(text: str | None, n_layers: int):
    if text is None or text.lower() in ("off", "none"):
        return None
    parts = [p for p in text.split(",") if p]
    try:
        masks = [PatternMask.from_string(p) for p in parts]
    except ValueError as err:
        raise CliError(str(err)) from None
    if len(masks) == 1:
        return masks * n_layers
    if len(masks) != n_layers:
        raise CliError(f"expected 1 or {n_layers} masks, got {len(masks)}")
    return masks


def _build_network(spec: dict):
    if (spec["model"] is None) == (spec["synth"] is None):
        raise CliError("exactly one of --model / --synth is required")
    if spec["model"] is not None:
        return load_model(spec["model"])
    kind, sizes = _parse_synth(spec["synth"])
    return synth_model(
        kind, sizes, g=spec["g"], k=spec["k"],
        seed=spec["seed"], zero_fraction=spec["zero_fraction"],
    )


def _build_cfg(spec: dict, mode: str) -> SimConfig:
    try:
        return SimConfig(mode=mode, spu_as_pe=spec["spu"] == "on", **spec["sim"])
    except (TypeError, ValueError) as err:
        raise CliError(f"bad sim config: {err}") from None


def _check_mode_compat(net, mode: str):
    if mode == MODE_PIPELINE_KAN and net.kind != "kan":
        raise ModeError(f"mode kan-pipeline requires a KAN model, got {net.kind}")
    if mode == MODE_PARALLEL_MLP and net.kind != "mlp":
        raise ModeError(f"mode mlp-parallel requires an MLP model, got {net.kind}")


def _write_report(out_prefix: str, spec: dict, labels, reports, headline, label_name="point"):
    rows = []
    functional_ok = True
    for label, report in zip(labels, reports):
        row = {label_name: label, **report.to_row(), "functional_ok": report.functional_ok}
        functional_ok = functional_ok and report.functional_ok
        rows.append(row)
    csv_path = Path(f"{out_prefix}.csv")
    json_path = Path(f"{out_prefix}.json")
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    sidecar = {
        "kansim_version": __version__,
        "config": {key: spec[key] for key in sorted(spec)},
        "headline": headline,
        "rows": [
            {label_name: label, **report.to_dict(), "functional_ok": report.functional_ok}
            for label, report in zip(labels, reports)
        ],
        "verdicts": {"functional_ok": functional_ok},
    }
    json_path.write_text(json.dumps(sidecar, sort_keys=True, indent=1, default=float))
    return csv_path, json_path


def cmd_run(args: argparse.Namespace) -> int:
    spec = resolve_spec(args)
    net = _build_network(spec)
    mode = CLI_MODES[spec["mode"]]
    _check_mode_compat(net, mode)
    cfg = _build_cfg(spec, mode)
    policy = F16 if spec["precision"] == "f16-emu" else F64
    masks = _parse_masks(spec["mask"], len(net.layers))
    domain = (-1.0, 1.0)
    if net.kind == "kan":
        domain = (net.layers[0].spline.lo, net.layers[0].spline.hi)
    inputs = synth_inputs(
        net.n_in, spec["batch"], seed=spec["seed"] + 1,
        zero_fraction=spec["input_zeros"], domain=domain,
    )
    # simulate() re-derives the reference forward and aborts on mismatch
    report = simulate(net, inputs, masks, cfg, policy)
    want = network_forward(net, inputs, policy,
                           masks=masks if mode != MODE_BASELINE else None)
    if not report.functional_ok or not np.array_equal(report.outputs, want):
        raise ModeError("functional mismatch between simulator and reference forward")
    csv_path, _ = _write_report(spec["out"], spec, ["run"], [report], headline={})
    print(f"wrote {csv_path} (total_cycles={report.total_cycles}, "
          f"speedup={report.speedup_vs_baseline:.3f})")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = resolve_spec(args)
    policy = F16 if spec["precision"] == "f16-emu" else F64
    if policy.enabled:
        raise CliError("sweeps are defined for f64 runs")
    if spec["recipe"]:
        result = run_recipe(spec["recipe"], _build_cfg(spec, CLI_MODES[spec["mode"]]))
        labels, reports, headline = result["labels"], result["reports"], result["headline"]
    else:
        if not spec["param"]:
            raise CliError("sweep needs --recipe or --param/--values")
        if not spec["values"]:
            raise CliError("empty sweep values")
        raw = [v for v in str(spec["values"]).split(",") if v.strip()]
        if not raw:
            raise CliError("empty sweep values")
        values = [float(v) if spec["param"] == "zero_fraction" else int(v) for v in raw]
        if spec["synth"] is None:
            raise CliError("parameter sweeps need --synth")
        kind, sizes = _parse_synth(spec["synth"])
        mask = None
        if spec["mask"] and spec["mask"].lower() not in ("off", "none"):
            mask = PatternMask.from_string(spec["mask"].split(",")[0])
        template = SweepTemplate(
            kind=kind, sizes=sizes, g=spec["g"], k=spec["k"], seed=spec["seed"],
            batch=spec["batch"], mask=mask,
            input_zero_fraction=spec["input_zeros"],
            weight_zero_fraction=spec["zero_fraction"],
        )
        mode = CLI_MODES[spec["mode"]]
        _check_mode_compat(template.build()[0], mode)
        reports = sweep(template, spec["param"], values, _build_cfg(spec, mode))
        order = np.argsort(values, kind="stable")
        labels = [str(values[i]) for i in order]
        reports = [reports[i] for i in order]
        headline = {"parameter": spec["param"], "values": [values[i] for i in order]}
    csv_path, _ = _write_report(spec["out"], spec, labels, reports, headline)
    print(f"wrote {csv_path} ({len(reports)} rows)")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    results = run_property_suite(fault=getattr(args, "inject_fault", None))
    failed = 0
    for result in results:
        flag = "PASS" if result.passed else "FAIL"
        detail = f"  [{result.detail}]" if result.detail else ""
        print(f"{flag} {result.name}{detail}")
        failed += 0 if result.passed else 1
    print(f"{len(results) - failed}/{len(results)} properties passed")
    return 0 if failed == 0 else 1


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return cmd_run(args)
        if args.command == "sweep":
            return cmd_sweep(args)
        return cmd_verify(args)
    except (CliError, ModeError, SimulationError, ValueError, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2 if isinstance(err, (CliError, OSError)) else 1


if __name__ == "__main__":
    sys.exit(main())
