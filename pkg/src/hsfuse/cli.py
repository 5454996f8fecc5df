"""Command-line interface.

Subcommands: denoise-chain, denoise-graph, simulate, threshold, check-lemmas.
Every run writes a JSON manifest that fully determines it; re-running a
subcommand with --from-manifest reproduces the output files byte for byte.

Exit codes: 0 success, 2 bad configuration, 3 I/O error, 4 sampler numeric
failure.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from .chain import IterationError, run_chain
from .distributions import hs_thickness, prior_mass_outside
from .graph import (
    GraphConnectivityError,
    choose_roots,
    read_edge_list,
    run_graph_fusion,
)
from .ingest import interpolate_missing, read_signal_csv, window_average
from .model import (
    ChainData,
    FAMILY_ALIASES,
    McmcConfig,
    PosteriorSamples,
    PriorConfig,
    posterior_summary,
)
from .recovery import false_positive_draws, practical_threshold, wb_metrics
from .simulate import KINDS, SignalSpec, monte_carlo, summary_rows

__all__ = ["main", "entry_point", "build_parser", "split_rhat"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_IO = 3
EXIT_NUMERIC = 4

SCHEMA_VERSION = 1
DEFAULT_SEED = 20231107


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    h.update(path.read_bytes())
    return h.hexdigest()


def split_rhat(x: np.ndarray) -> float:
    """Split-chain potential-scale-reduction factor (two segments)."""
    x = np.asarray(x, dtype=float)
    half = x.size // 2
    if half < 2:
        return math.nan
    a, b = x[:half], x[x.size - half:]
    w = 0.5 * (np.var(a, ddof=1) + np.var(b, ddof=1))
    if w == 0.0:
        return 1.0
    mean_all = 0.5 * (a.mean() + b.mean())
    between = half * ((a.mean() - mean_all) ** 2 + (b.mean() - mean_all) ** 2)
    var_plus = (half - 1) / half * w + between / half
    return float(math.sqrt(var_plus / w))


def _convergence_report(samples: PosteriorSamples) -> dict:
    n = samples.n_components
    picks = sorted({0, n // 2, n - 1})
    return {
        "rhat_sigma_sq": split_rhat(samples.sigma_draws),
        "rhat_theta": {str(j + 1): split_rhat(samples.draws[:, j]) for j in picks},
    }


def _write_estimate_csv(path: Path, y: np.ndarray, samples: PosteriorSamples,
                        level: float) -> None:
    mean, lower, upper = posterior_summary(samples, level)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["index", "y", "post_mean", "lower", "upper"])
        for j in range(y.size):
            writer.writerow(
                [j + 1, _fmt(y[j]), _fmt(mean[j]), _fmt(lower[j]), _fmt(upper[j])]
            )


def _read_estimate_csv(path: Path) -> dict[str, np.ndarray]:
    with open(path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        columns = {name: [] for name in reader.fieldnames or []}
        for row in reader:
            for name, value in row.items():
                columns[name].append(value)
    required = {"index", "y", "post_mean"}
    if not required <= set(columns):
        raise ValueError(f"{path}: expected columns {sorted(required)}")
    return {
        name: np.asarray([float(v) for v in values])
        for name, values in columns.items()
    }


def _save_draws(path: Path, samples: PosteriorSamples) -> None:
    np.savez(
        path,
        theta=samples.draws,
        sigma_sq=samples.sigma_draws,
        tau_sq=samples.tau_draws,
    )


def _write_manifest(path: Path, command: str, config: dict, inputs: dict,
                    outputs: list[str], extra: dict | None = None) -> None:
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
    }
    if extra:
        manifest.update(extra)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_manifest_config(path: Path, command: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        manifest = json.load(fh)
    if manifest.get("command") != command:
        raise ValueError(
            f"{path}: manifest is for {manifest.get('command')!r}, not {command!r}"
        )
    return manifest["config"]


def _require_file(path) -> Path:
    p = Path(path)
    if not p.is_file():
        raise FileNotFoundError(f"input file not found: {p}")
    return p


def _prior_from_config(cfg: dict) -> PriorConfig:
    return PriorConfig(
        family=FAMILY_ALIASES.get(cfg["family"], cfg["family"]),
        a_sigma=cfg["a_sigma"],
        b_sigma=cfg["b_sigma"],
        lambda_first=cfg["lambda_first"],
        family_scale=cfg["family_scale"],
        t_df=cfg["t_df"],
        tau_fixed=cfg["tau_fixed"],
    )


def _mcmc_from_config(cfg: dict) -> McmcConfig:
    return McmcConfig(
        n_iter=cfg["n_iter"], burn_in=cfg["burn_in"], seed=cfg["seed"],
        thin=cfg["thin"],
    )


def _maybe_column(value: str):
    try:
        return int(value)
    except ValueError:
        return value


# ---------------------------------------------------------------------------
# argument parsing


def _add_sampler_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--family", default="hs", choices=sorted(FAMILY_ALIASES),
                        help="prior family (default: hs)")
    parser.add_argument("--a-sigma", type=float, default=0.5)
    parser.add_argument("--b-sigma", type=float, default=0.5)
    parser.add_argument("--lambda-first", type=float, default=5.0,
                        help="anchor prior scale on the first/root component")
    parser.add_argument("--family-scale", type=float, default=None,
                        help="per-difference prior scale for the t/laplace families")
    parser.add_argument("--t-df", type=float, default=2.0)
    parser.add_argument("--tau-fixed", type=float, default=None,
                        help="freeze the global scale at this value instead of sampling")
    parser.add_argument("--n-iter", type=int, default=5000)
    parser.add_argument("--burn-in", type=int, default=500)
    parser.add_argument("--thin", type=int, default=1)
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED)


def _add_ingest_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--column", default="0",
                        help="value column: 0-based index or header name")
    parser.add_argument("--time-column", default=None,
                        help="timestamp column: 0-based index or header name")
    parser.add_argument("--interpolate", action="store_true",
                        help="linearly interpolate missing values")
    parser.add_argument("--extend-ends", action="store_true",
                        help="extend nearest values over missing endpoints")
    parser.add_argument("--window", type=int, default=None,
                        help="average consecutive blocks of this many points")
    parser.add_argument("--allow-partial-window", action="store_true")
    parser.add_argument("--log-transform", action="store_true",
                        help="take log of values after interpolation/averaging")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hsfuse",
        description="Bayesian fusion de-noising of piecewise-constant signals",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("denoise-chain", help="de-noise a 1-D signal")
    p.add_argument("--input", required=False, default=None, help="signal CSV")
    _add_ingest_flags(p)
    _add_sampler_flags(p)
    p.add_argument("--level", type=float, default=0.95, help="credible level")
    p.add_argument("--output", required=True, help="estimate CSV to write")
    p.add_argument("--manifest", default=None, help="manifest JSON (default: <output>.manifest.json)")
    p.add_argument("--draws-out", default=None, help="optional NPZ with posterior draws")
    p.add_argument("--from-manifest", default=None,
                   help="re-run the configuration stored in this manifest")
    p.set_defaults(func=cmd_denoise_chain)

    p = sub.add_parser("denoise-graph", help="de-noise a signal on a graph")
    p.add_argument("--edges", default=None, help="edge-list file")
    p.add_argument("--input", default=None, help="signal CSV (vertex order)")
    p.add_argument("--column", default="0")
    p.add_argument("--roots", type=int, default=3,
                   help="number of random DFS roots (default: 3)")
    p.add_argument("--root-vertices", type=int, nargs="+", default=None,
                   help="explicit root vertices (overrides --roots)")
    _add_sampler_flags(p)
    p.add_argument("--level", type=float, default=0.95)
    p.add_argument("--output", required=True, help="pooled estimate CSV")
    p.add_argument("--manifest", default=None)
    p.add_argument("--draws-out", default=None)
    p.add_argument("--from-manifest", default=None)
    p.set_defaults(func=cmd_denoise_graph)

    p = sub.add_parser("simulate", help="Monte-Carlo summary table")
    p.add_argument("--kinds", nargs="+", default=["even"], choices=KINDS)
    p.add_argument("--sigmas", type=float, nargs="+", default=[0.1, 0.3, 0.5])
    p.add_argument("--families", nargs="+", default=["hs"],
                   choices=sorted(FAMILY_ALIASES))
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--amplitude", type=float, default=1.0)
    p.add_argument("--n-iter", type=int, default=5000)
    p.add_argument("--burn-in", type=int, default=500)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--output", required=True, help="summary CSV")
    p.add_argument("--manifest", default=None)
    p.add_argument("--from-manifest", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("threshold", help="block-structure report for an estimate")
    p.add_argument("--estimate", default=None,
                   help="estimate CSV from denoise-chain/denoise-graph")
    p.add_argument("--truth", default=None, help="optional truth CSV")
    p.add_argument("--truth-column", default="0")
    p.add_argument("--s0", type=int, default=None,
                   help="true jump count; enables per-draw false-positive counts")
    p.add_argument("--draws", default=None, help="NPZ draws from --draws-out")
    p.add_argument("--epsilon-scale", type=float, default=1.0)
    p.add_argument("--output", required=True, help="report JSON")
    p.add_argument("--manifest", default=None)
    p.add_argument("--from-manifest", default=None)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("check-lemmas", help="density-bound numeric checks")
    p.add_argument("--n-grid", type=int, nargs="+", default=[50, 100, 500])
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--b-prime", type=float, default=0.4)
    p.add_argument("--s0", type=int, default=3)
    p.add_argument("--tau", type=float, default=None,
                   help="override the global scale (default: n^-(2+b) per n)")
    p.add_argument("--thickness-grid", type=int, nargs="+",
                   default=[100, 1000, 10000])
    p.add_argument("--output", required=True, help="report JSON")
    p.add_argument("--manifest", default=None)
    p.add_argument("--from-manifest", default=None)
    p.set_defaults(func=cmd_check_lemmas)

    return parser


def _output_paths(args, config: dict) -> tuple[Path, Path, Path | None]:
    output = Path(args.output if args.output else config["output"])
    manifest = Path(args.manifest) if args.manifest else Path(
        config.get("manifest") or f"{output}.manifest.json"
    )
    draws_key = config.get("draws_out")
    draws_arg = getattr(args, "draws_out", None)
    draws = Path(draws_arg) if draws_arg else (Path(draws_key) if draws_key else None)
    return output, manifest, draws


# ---------------------------------------------------------------------------
# denoise-chain


def _chain_config(args) -> dict:
    if args.from_manifest:
        config = _load_manifest_config(_require_file(args.from_manifest), "denoise-chain")
    else:
        if args.input is None:
            raise ValueError("--input is required (or use --from-manifest)")
        config = {
            "input": str(args.input),
            "column": args.column,
            "time_column": args.time_column,
            "interpolate": args.interpolate,
            "extend_ends": args.extend_ends,
            "window": args.window,
            "allow_partial_window": args.allow_partial_window,
            "log_transform": args.log_transform,
            "family": FAMILY_ALIASES[args.family],
            "a_sigma": args.a_sigma,
            "b_sigma": args.b_sigma,
            "lambda_first": args.lambda_first,
            "family_scale": args.family_scale,
            "t_df": args.t_df,
            "tau_fixed": args.tau_fixed,
            "n_iter": args.n_iter,
            "burn_in": args.burn_in,
            "thin": args.thin,
            "seed": args.seed,
            "level": args.level,
        }
    return config


def _load_chain_signal(config: dict) -> np.ndarray:
    path = _require_file(config["input"])
    series = read_signal_csv(
        path,
        column=_maybe_column(config["column"]),
        time_column=(
            _maybe_column(config["time_column"])
            if config["time_column"] is not None else None
        ),
    )
    if config["interpolate"]:
        series = interpolate_missing(series, extend_ends=config["extend_ends"])
    elif series.n_missing:
        raise ValueError(
            f"{path}: {series.n_missing} missing values; pass --interpolate"
        )
    if config["window"]:
        series = window_average(
            series, config["window"], allow_partial=config["allow_partial_window"]
        )
    values = series.values
    if config["log_transform"]:
        if np.any(values <= 0.0):
            raise ValueError("log transform requires strictly positive values")
        values = np.log(values)
    return values


def cmd_denoise_chain(args) -> int:
    config = _chain_config(args)
    output, manifest_path, draws_path = _output_paths(args, config)
    config["output"] = str(output)
    config["manifest"] = str(manifest_path)
    config["draws_out"] = str(draws_path) if draws_path else None
    prior = _prior_from_config(config)
    mcmc = _mcmc_from_config(config)
    if not 0.0 < config["level"] < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {config['level']}")
    y = _load_chain_signal(config)
    input_hash = _sha256(Path(config["input"]))

    start = time.perf_counter()
    samples = run_chain(ChainData(y=y), prior, mcmc)
    elapsed = time.perf_counter() - start

    _write_estimate_csv(output, y, samples, config["level"])
    outputs = [str(output)]
    if draws_path:
        _save_draws(draws_path, samples)
        outputs.append(str(draws_path))
    _write_manifest(
        manifest_path,
        "denoise-chain",
        config,
        inputs={"input": {"path": config["input"], "sha256": input_hash}},
        outputs=outputs,
        extra={
            "wall_time_s": elapsed,
            "n": int(y.size),
            "kept_draws": samples.n_draws,
            "convergence": _convergence_report(samples),
        },
    )
    print(f"denoise-chain: n={y.size} kept={samples.n_draws} -> {output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# denoise-graph


def _graph_config(args) -> dict:
    if args.from_manifest:
        return _load_manifest_config(_require_file(args.from_manifest), "denoise-graph")
    if args.edges is None or args.input is None:
        raise ValueError("--edges and --input are required (or use --from-manifest)")
    return {
        "edges": str(args.edges),
        "input": str(args.input),
        "column": args.column,
        "roots": args.roots,
        "root_vertices": args.root_vertices,
        "family": FAMILY_ALIASES[args.family],
        "a_sigma": args.a_sigma,
        "b_sigma": args.b_sigma,
        "lambda_first": args.lambda_first,
        "family_scale": args.family_scale,
        "t_df": args.t_df,
        "tau_fixed": args.tau_fixed,
        "n_iter": args.n_iter,
        "burn_in": args.burn_in,
        "thin": args.thin,
        "seed": args.seed,
        "level": args.level,
    }


def cmd_denoise_graph(args) -> int:
    config = _graph_config(args)
    output, manifest_path, draws_path = _output_paths(args, config)
    config["output"] = str(output)
    config["manifest"] = str(manifest_path)
    config["draws_out"] = str(draws_path) if draws_path else None
    prior = _prior_from_config(config)
    mcmc = _mcmc_from_config(config)
    if not 0.0 < config["level"] < 1.0:
        raise ValueError(f"level must lie in (0, 1), got {config['level']}")
    edges_path = _require_file(config["edges"])
    input_path = _require_file(config["input"])
    g = read_edge_list(edges_path)
    series = read_signal_csv(input_path, column=_maybe_column(config["column"]))
    if series.n_missing:
        raise ValueError(f"{input_path}: graph signals must not have missing values")
    y = series.values
    if y.size != g.n_vertices:
        raise ValueError(
            f"signal length {y.size} does not match vertex count {g.n_vertices}"
        )
    if config["root_vertices"]:
        roots = [int(r) for r in config["root_vertices"]]
    else:
        roots = choose_roots(g, config["roots"], config["seed"])
    config["resolved_roots"] = roots

    start = time.perf_counter()
    posterior = run_graph_fusion(g, y, roots, prior, mcmc)
    elapsed = time.perf_counter() - start

    _write_estimate_csv(output, y, posterior.pooled, config["level"])
    outputs = [str(output)]
    if draws_path:
        _save_draws(draws_path, posterior.pooled)
        outputs.append(str(draws_path))
    per_root = [
        {
            "root": chain.root,
            "stream": k,
            "kept_draws": samples.n_draws,
            "rhat_sigma_sq": split_rhat(samples.sigma_draws),
        }
        for k, (chain, samples) in enumerate(
            zip(posterior.chains, posterior.per_root)
        )
    ]
    _write_manifest(
        manifest_path,
        "denoise-graph",
        config,
        inputs={
            "edges": {"path": config["edges"], "sha256": _sha256(edges_path)},
            "input": {"path": config["input"], "sha256": _sha256(input_path)},
        },
        outputs=outputs,
        extra={
            "wall_time_s": elapsed,
            "n": int(y.size),
            "pooled_draws": posterior.pooled.n_draws,
            "roots": per_root,
            "convergence": _convergence_report(posterior.pooled),
        },
    )
    print(
        f"denoise-graph: n={y.size} roots={roots} pooled={posterior.pooled.n_draws}"
        f" -> {output}"
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# simulate


def _simulate_config(args) -> dict:
    if args.from_manifest:
        return _load_manifest_config(_require_file(args.from_manifest), "simulate")
    return {
        "kinds": list(args.kinds),
        "sigmas": [float(s) for s in args.sigmas],
        "families": [FAMILY_ALIASES[f] for f in args.families],
        "reps": args.reps,
        "n": args.n,
        "amplitude": args.amplitude,
        "n_iter": args.n_iter,
        "burn_in": args.burn_in,
        "thin": args.thin,
        "seed": args.seed,
    }


def cmd_simulate(args) -> int:
    config = _simulate_config(args)
    output = Path(args.output if args.output else config["output"])
    manifest_path = Path(args.manifest) if args.manifest else Path(
        config.get("manifest") or f"{output}.manifest.json"
    )
    config["output"] = str(output)
    config["manifest"] = str(manifest_path)
    specs = [
        SignalSpec(kind=kind, n=config["n"], amplitude=config["amplitude"])
        for kind in config["kinds"]
    ]
    mcmc = McmcConfig(
        n_iter=config["n_iter"], burn_in=config["burn_in"],
        seed=config["seed"], thin=config["thin"],
    )

    start = time.perf_counter()
    results = monte_carlo(
        specs, config["sigmas"], config["families"], config["reps"], mcmc,
        master_seed=config["seed"],
    )
    elapsed = time.perf_counter() - start

    with open(output, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["kind", "sigma", "family", "metric", "mean", "se"])
        for row in summary_rows(results):
            se = row["se"]
            writer.writerow(
                [
                    row["kind"],
                    _fmt(row["sigma"]),
                    row["family"],
                    row["metric"],
                    _fmt(row["mean"]),
                    "NA" if isinstance(se, float) and math.isnan(se) else _fmt(se),
                ]
            )
    _write_manifest(
        manifest_path,
        "simulate",
        config,
        inputs={},
        outputs=[str(output)],
        extra={"wall_time_s": elapsed},
    )
    print(f"simulate: {len(results)} scenario(s) x {config['reps']} reps -> {output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# threshold


def _threshold_config(args) -> dict:
    if args.from_manifest:
        return _load_manifest_config(_require_file(args.from_manifest), "threshold")
    if args.estimate is None:
        raise ValueError("--estimate is required (or use --from-manifest)")
    return {
        "estimate": str(args.estimate),
        "truth": str(args.truth) if args.truth else None,
        "truth_column": args.truth_column,
        "s0": args.s0,
        "draws": str(args.draws) if args.draws else None,
        "epsilon_scale": args.epsilon_scale,
    }


def cmd_threshold(args) -> int:
    config = _threshold_config(args)
    output = Path(args.output if args.output else config["output"])
    manifest_path = Path(args.manifest) if args.manifest else Path(
        config.get("manifest") or f"{output}.manifest.json"
    )
    config["output"] = str(output)
    config["manifest"] = str(manifest_path)
    estimate_path = _require_file(config["estimate"])
    columns = _read_estimate_csv(estimate_path)
    theta_hat = columns["post_mean"]
    y = columns["y"]
    inputs = {"estimate": {"path": config["estimate"], "sha256": _sha256(estimate_path)}}

    pairs = practical_threshold(theta_hat, y)
    n = pairs.n
    total_pairs = n * (n - 1) // 2
    report: dict = {
        "schema_version": SCHEMA_VERSION,
        "n": n,
        "fused_pairs": pairs.fused_pair_count(),
        "total_pairs": total_pairs,
        "fused_fraction": pairs.fused_pair_count() / total_pairs,
    }

    truth = None
    if config["truth"]:
        truth_path = _require_file(config["truth"])
        truth = read_signal_csv(
            truth_path, column=_maybe_column(config["truth_column"])
        ).values
        if truth.size != n:
            raise ValueError(
                f"truth length {truth.size} does not match estimate length {n}"
            )
        inputs["truth"] = {"path": config["truth"], "sha256": _sha256(truth_path)}
        w, b = wb_metrics(theta_hat, truth)
        report["w"] = w
        report["b"] = None if math.isinf(b) else b

    if config["draws"] and config["s0"] is not None:
        if truth is None:
            raise ValueError("per-draw false-positive counts need --truth")
        draws_path = _require_file(config["draws"])
        with np.load(draws_path) as payload:
            samples = PosteriorSamples(
                draws=payload["theta"],
                sigma_draws=payload["sigma_sq"],
                tau_draws=payload["tau_sq"],
                meta={},
            )
        inputs["draws"] = {"path": config["draws"], "sha256": _sha256(draws_path)}
        counts = false_positive_draws(
            samples, truth, config["s0"], epsilon_scale=config["epsilon_scale"]
        )
        report["false_positives"] = {
            "s0": config["s0"],
            "draws": int(counts.size),
            "mean": float(counts.mean()),
            "q50": float(np.quantile(counts, 0.5)),
            "q95": float(np.quantile(counts, 0.95)),
            "max": int(counts.max()),
            "share_within_2s0": float(np.mean(counts <= 2 * config["s0"])),
        }

    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(manifest_path, "threshold", config, inputs, [str(output)])
    parts = [f"fused_pairs={report['fused_pairs']}/{total_pairs}"]
    if "w" in report:
        parts.append(f"W={report['w']:.4g}")
        parts.append(f"B={report['b'] if report['b'] is not None else 'inf'}")
    print("threshold: " + " ".join(parts) + f" -> {output}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# check-lemmas


def _lemmas_config(args) -> dict:
    if args.from_manifest:
        return _load_manifest_config(_require_file(args.from_manifest), "check-lemmas")
    return {
        "n_grid": [int(n) for n in args.n_grid],
        "b": args.b,
        "b_prime": args.b_prime,
        "s0": args.s0,
        "tau": args.tau,
        "thickness_grid": [int(n) for n in args.thickness_grid],
    }


def cmd_check_lemmas(args) -> int:
    config = _lemmas_config(args)
    output = Path(args.output if args.output else config["output"])
    manifest_path = Path(args.manifest) if args.manifest else Path(
        config.get("manifest") or f"{output}.manifest.json"
    )
    config["output"] = str(output)
    config["manifest"] = str(manifest_path)
    if not 0.0 < config["b_prime"] < config["b"] + 2.0:
        raise ValueError("b_prime must be positive (and sensibly below b)")

    mass_rows = []
    for n in config["n_grid"]:
        a_n = config["s0"] * math.log(n) / n**2
        tau = config["tau"] if config["tau"] is not None else n ** -(2.0 + config["b"])
        bound = prior_mass_outside(a_n, tau)
        limit = n ** -config["b_prime"]
        mass_rows.append(
            {
                "n": n,
                "a_n": a_n,
                "tau": tau,
                "bound": bound,
                "limit": limit,
                "ok": bool(bound <= limit),
            }
        )

    thickness_rows = []
    for n in config["thickness_grid"]:
        value = hs_thickness(L=float(n), tau=n**-3.0, sigma=1.0)
        thickness_rows.append(
            {"n": n, "value": value, "ratio_to_log_n": value / math.log(n)}
        )
    ratios = [row["ratio_to_log_n"] for row in thickness_rows]

    report = {
        "schema_version": SCHEMA_VERSION,
        "mass": mass_rows,
        "mass_all_ok": all(row["ok"] for row in mass_rows),
        "thickness": thickness_rows,
        "thickness_ratio_max": max(ratios),
        "thickness_ratio_bounded": bool(max(ratios) <= 10.0),
    }
    with open(output, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_manifest(manifest_path, "check-lemmas", config, {}, [str(output)])
    for row in mass_rows:
        status = "PASS" if row["ok"] else "FAIL"
        print(
            f"{status} mass n={row['n']} tau={row['tau']:.3g} "
            f"bound={row['bound']:.3g} limit={row['limit']:.3g}"
        )
    for row in thickness_rows:
        print(
            f"PASS thickness n={row['n']} value={row['value']:.4g} "
            f"ratio={row['ratio_to_log_n']:.3g}"
            if row["ratio_to_log_n"] <= 10.0
            else f"FAIL thickness n={row['n']} ratio={row['ratio_to_log_n']:.3g}"
        )
    return EXIT_OK


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except IterationError as exc:
        print(f"error: sampler failed: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
