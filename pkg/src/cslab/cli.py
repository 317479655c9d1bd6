"""Command-line front end.

Subcommands: noise-folding, quantizer-sweep, dynamic-range, rip-estimate,
design-rules.  Sweeps read a JSON config (see README for the schema), accept
--seed / --trials overrides, and persist rows, summary, plot data, and a run
manifest into --out.  The CSLAB_THREADS environment variable caps the worker
count (0 = one worker per CPU; unset = serial).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import quantization, recovery, sensing, signal_model, theory
from .experiments import run_noise_folding_sweep, run_quantization_sweep
from .metrics import rsnr
from .results_io import (
    ConfigDivisibilityError,
    ConfigFileError,
    ConfigSchemaError,
    build_sweep_config,
    load_config_dict,
    write_results,
)

_DESIGN_RULE_KEYS = {"ambient_dim", "band_width", "kappa0", "base_bits"}


def _workers_from_env() -> int:
    raw = os.environ.get("CSLAB_THREADS")
    if raw is None or raw.strip() == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise ConfigSchemaError(f"CSLAB_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ConfigSchemaError("CSLAB_THREADS must be >= 0")
    return value if value > 0 else (os.cpu_count() or 1)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cslab", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cslab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, help_text in [
        ("noise-folding", "run the signal-noise subsampling sweep"),
        ("quantizer-sweep", "run the noise-free quantized-measurement sweep"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON sweep config")
        p.add_argument("--seed", type=int, default=None, help="override master_seed")
        p.add_argument("--trials", type=int, default=None, help="override trials_per_point")
        p.add_argument("--out", default="cslab_results", help="output directory")
        p.add_argument("--format", choices=["csv", "json"], default="csv", help="rows format")

    p = sub.add_parser("dynamic-range", help="closed-form and empirical dynamic range")
    p.add_argument("--bits", type=int, required=True)
    p.add_argument("--saturation", type=float, default=1.0)
    p.add_argument("--target-snr", type=float, required=True, help="linear SNR floor C")
    p.add_argument("--ambient-dim", type=int, default=256)
    p.add_argument("--band-width", type=int, default=4)
    p.add_argument("--rho", type=int, default=4, help="subsampling for the recovery path")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--path", choices=["conventional", "cs"], default="conventional")
    p.add_argument("--out", default=None, help="optional JSON output path")

    p = sub.add_parser("rip-estimate", help="empirical restricted-isometry constant")
    p.add_argument("--ambient-dim", type=int, required=True)
    p.add_argument("--measurements", type=int, required=True)
    p.add_argument("--sparsity", type=int, required=True)
    p.add_argument("--mode", choices=["exhaustive", "sampled"], default="sampled")
    p.add_argument("--n-supports", type=int, default=200)
    p.add_argument("--distribution", choices=["gaussian", "rademacher", "subsampled_dct"],
                   default="gaussian")
    p.add_argument("--orthogonalize", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None, help="optional JSON output path")

    p = sub.add_parser("design-rules", help="evaluate the receiver design rules")
    p.add_argument("--config", default=None, help="JSON with ambient_dim/band_width/kappa0/base_bits")
    p.add_argument("--ambient-dim", type=float, default=None)
    p.add_argument("--band-width", type=float, default=None)
    p.add_argument("--kappa0", type=float, default=None)
    p.add_argument("--base-bits", type=float, default=None)
    p.add_argument("--out", default=None, help="optional JSON output path")
    return parser


def _cmd_sweep(args, kind: str) -> int:
    data = load_config_dict(args.config)
    if args.seed is not None:
        data["master_seed"] = args.seed
    if args.trials is not None:
        data["trials_per_point"] = args.trials
    cfg = build_sweep_config(data)
    workers = _workers_from_env()
    if kind == "noise_folding":
        result = run_noise_folding_sweep(cfg, n_workers=workers)
    else:
        result = run_quantization_sweep(cfg, n_workers=workers)
    paths = write_results(result, args.out, fmt=args.format,
                          config_dict=data, tool_version=__version__)
    summary = json.loads(Path(paths["summary"]).read_text())
    for point in summary["points"]:
        print(
            f"rho={point['rho']:>5} isnr={point['isnr_target_db']} method={point['method']:<8}"
            f" mean_rsnr_db={point['mean_rsnr_db']} failed={point['n_failed']}"
        )
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def _cmd_dynamic_range(args) -> int:
    spec = quantization.QuantizerSpec(bits=args.bits, saturation=args.saturation)
    spectrum = signal_model.generate_bandlimited(
        args.ambient_dim, args.band_width, "random", args.seed)
    x = signal_model.synthesize(spectrum).samples
    report = {"bits": args.bits, "saturation": args.saturation, "target_snr": args.target_snr,
              "par": signal_model.par(x), "path": args.path}

    closed = quantization.dynamic_range_closed_form(spec, x, args.target_snr)
    report["closed_form"] = {"beta_min": closed.beta_min, "beta_max": closed.beta_max,
                             "dr_linear": closed.dr_linear, "dr_db": closed.dr_db}
    if args.path == "conventional":
        emp = quantization.dynamic_range_empirical(spec, x, args.target_snr)
    else:
        ens = sensing.generate_subsampled_dct_ensemble(
            args.ambient_dim // args.rho, args.ambient_dim, args.seed)
        y = ens.apply(spectrum.coeffs)
        alpha = spectrum.coeffs
        support = spectrum.support

        def recovery_snr(beta: float) -> float:
            quantized = quantization.quantize(spec, beta * y)
            out = recovery.oracle_recover(ens, quantized, support)
            return rsnr(beta * alpha, out.coeffs_hat)

        emp = quantization.dynamic_range_empirical(
            spec, x, args.target_snr, snr_fn=recovery_snr,
            anchor=spec.saturation / float(np.max(np.abs(y))))
    report["empirical"] = {"beta_min": emp.beta_min, "beta_max": emp.beta_max,
                           "dr_linear": emp.dr_linear, "dr_db": emp.dr_db}
    print(f"closed-form dynamic range: {closed.dr_db:.2f} dB "
          f"(beta in [{closed.beta_min:.4g}, {closed.beta_max:.4g}])")
    print(f"empirical dynamic range ({args.path}): {emp.dr_db:.2f} dB "
          f"(beta in [{emp.beta_min:.4g}, {emp.beta_max:.4g}])")
    if args.out:
        Path(args.out).write_text(json.dumps(report, indent=1) + "\n")
        print(f"report: {args.out}")
    return 0


def _cmd_rip_estimate(args) -> int:
    if args.distribution == "subsampled_dct":
        ens = sensing.generate_subsampled_dct_ensemble(
            args.measurements, args.ambient_dim, args.seed)
    else:
        ens = sensing.generate_ensemble(
            args.measurements, args.ambient_dim, args.distribution, args.seed)
    if args.orthogonalize and args.distribution != "subsampled_dct":
        ens = sensing.orthogonalize_rows(ens)
    delta = sensing.estimate_rip_constant(
        ens, args.sparsity, mode=args.mode, n_supports=args.n_supports, rng_seed=args.seed)
    qualifier = "exact" if args.mode == "exhaustive" else "lower bound"
    print(f"delta_hat = {delta:.6f} ({qualifier}, order {args.sparsity})")
    if args.out:
        Path(args.out).write_text(json.dumps({
            "ambient_dim": args.ambient_dim, "measurements": args.measurements,
            "sparsity": args.sparsity, "mode": args.mode, "delta_hat": delta,
        }, indent=1) + "\n")
        print(f"report: {args.out}")
    return 0


def _cmd_design_rules(args) -> int:
    params = {"ambient_dim": 1e9, "band_width": 4e5, "kappa0": 0.5, "base_bits": 8.0}
    if args.config is not None:
        data = load_config_dict(args.config)
        unknown = set(data) - _DESIGN_RULE_KEYS
        if unknown:
            raise ConfigSchemaError(f"unknown design-rule keys: {sorted(unknown)}")
        params.update(data)
    for key in _DESIGN_RULE_KEYS:
        flag = getattr(args, key)
        if flag is not None:
            params[key] = flag
    report = theory.design_rules(**params)
    reduced_rate = params["ambient_dim"] / report.rho_cs
    print(f"rho_max:            {report.rho_max:.6g}")
    print(f"rho_cs:             {report.rho_cs:.6g}")
    print(f"noise_figure_db:    {report.noise_figure_db:.4g}")
    print(f"bit_gain:           {report.bit_gain:.4g}")
    print(f"projected_bits:     {report.projected_bits:.4g}")
    print(f"projected_dr_db:    {report.projected_dr_db:.5g}")
    print(f"nyquist_rate_hz:    {params['ambient_dim']:.6g}")
    print(f"reduced_rate_hz:    {reduced_rate:.6g}")
    if args.out:
        Path(args.out).write_text(json.dumps({
            **params,
            "rho_max": report.rho_max, "rho_cs": report.rho_cs,
            "noise_figure_db": report.noise_figure_db, "bit_gain": report.bit_gain,
            "projected_bits": report.projected_bits, "projected_dr_db": report.projected_dr_db,
            "reduced_rate_hz": reduced_rate,
        }, indent=1) + "\n")
        print(f"report: {args.out}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage itself
        return int(exc.code or 0)
    try:
        if args.command == "noise-folding":
            return _cmd_sweep(args, "noise_folding")
        if args.command == "quantizer-sweep":
            return _cmd_sweep(args, "quantization")
        if args.command == "dynamic-range":
            return _cmd_dynamic_range(args)
        if args.command == "rip-estimate":
            return _cmd_rip_estimate(args)
        if args.command == "design-rules":
            return _cmd_design_rules(args)
        parser.error(f"unknown command {args.command!r}")
    except (ConfigFileError, ConfigSchemaError, ConfigDivisibilityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
