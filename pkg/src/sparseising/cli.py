"""Command-line interface: simulate, fit, path, stability, evaluate.

Settings come from dataclass defaults, then an optional JSON ``--config``
file, then explicit flags. ``--dump-config`` writes the merged settings in
the same JSON format. Exit codes: 0 success, 2 invalid input or settings,
3 numerical failure (or, with ``--strict``, any solver that did not converge).
"""

import argparse
import dataclasses
import json
import os
import sys
import typing
from dataclasses import dataclass, fields
from typing import Optional

import numpy as np

from . import io
from .cma import SolverConfig, fit_path, lambda_grid, lambda_max
from .estimators import ESTIMATORS, canonical_name, estimate
from .lla import LlaConfig, lasso_stage, scad_path
from .metrics import MetricReport, metrics, model_error
from .model import K_from_pairs, n_pairs
from .penalty import LASSO, SCAD
from .selection import bic_select
from .simulate import (GibbsConfig, chain_graph, exact_sample, gen_truth, gibbs_sample,
                       lattice_graph, random_regular_graph)
from .stability import stability_select

THREADS_ENV = "SPARSEISING_THREADS"

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

# settings that name files; they do not enter the config hash
PATH_FIELDS = {"data", "graph_file", "out_dir", "out", "fit", "truth", "test", "rows"}


class CliError(Exception):
    pass


class NotConverged(Exception):
    pass


@dataclass
class SimulateConfig:
    graph: str = "chain"
    K: int = 10
    n_edges: Optional[int] = None
    rows: Optional[int] = None
    degree: int = 3
    graph_file: Optional[str] = None
    N: int = 300
    seed: int = 0
    sampler: str = "gibbs"
    burn_in: int = 1000
    thinning: int = 10
    out_dir: str = "."


@dataclass
class FitConfig:
    data: Optional[str] = None
    estimator: str = "lasso"
    zero_one: bool = False
    n_lambda: int = 100
    lambda_ratio: float = 0.01
    tol: float = 1e-6
    max_sweeps: int = 1000
    max_lla_iters: int = 10
    stop_tol: float = 1e-6
    a: float = 3.7
    bic_scale: str = "total"
    tuning: str = "node"
    out_dir: str = "."


@dataclass
class PathConfig:
    data: Optional[str] = None
    penalty: str = LASSO
    zero_one: bool = False
    n_lambda: int = 100
    lambda_ratio: float = 0.01
    tol: float = 1e-6
    max_sweeps: int = 1000
    a: float = 3.7
    bic_scale: str = "total"
    out: str = "path.csv"


@dataclass
class StabilityConfig:
    data: Optional[str] = None
    estimator: str = "lasso"
    zero_one: bool = False
    reps: int = 100
    subsample_size: Optional[int] = None
    pi_thr: float = 0.9
    seed: int = 0
    n_lambda: int = 100
    lambda_ratio: float = 0.01
    tol: float = 1e-6
    max_sweeps: int = 1000
    max_lla_iters: int = 10
    stop_tol: float = 1e-6
    a: float = 3.7
    bic_scale: str = "total"
    tuning: str = "node"
    out_dir: str = "."


@dataclass
class EvaluateConfig:
    fit: Optional[str] = None
    truth: Optional[str] = None
    test: Optional[str] = None
    rows: Optional[str] = None
    zero_one: bool = False
    double_count: bool = False
    out: str = "metrics.json"


CONFIGS = {
    "simulate": SimulateConfig,
    "fit": FitConfig,
    "path": PathConfig,
    "stability": StabilityConfig,
    "evaluate": EvaluateConfig,
}

CHOICES = {
    "graph": ("chain", "lattice", "regular", "file"),
    "sampler": ("gibbs", "exact"),
    "estimator": ESTIMATORS + ("scad2**",),
    "penalty": (LASSO, SCAD),
    "bic_scale": ("total", "mean"),
    "tuning": ("node", "global"),
}


def _base_type(tp):
    if typing.get_origin(tp) is typing.Union:
        return next(a for a in typing.get_args(tp) if a is not type(None))
    return tp


def _field_types(cls):
    hints = typing.get_type_hints(cls)
    return {f.name: _base_type(hints[f.name]) for f in fields(cls)}


def _optional_fields(cls):
    hints = typing.get_type_hints(cls)
    return {f.name for f in fields(cls) if typing.get_origin(hints[f.name]) is typing.Union}


def load_config(cls, path):
    """Read a JSON settings file for ``cls``; unknown keys are an error."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"config {path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise CliError(f"config {path}: expected a JSON object")
    types = _field_types(cls)
    unknown = sorted(set(raw) - set(types))
    if unknown:
        raise CliError(f"config {path}: unknown keys {', '.join(unknown)}")
    out = {}
    for key, value in raw.items():
        tp = types[key]
        if value is None:
            if key not in _optional_fields(cls):
                raise CliError(f"config {path}: {key} cannot be null")
            out[key] = None
        elif tp is bool:
            if not isinstance(value, bool):
                raise CliError(f"config {path}: {key} must be true or false")
            out[key] = value
        elif tp is int:
            if isinstance(value, bool) or not isinstance(value, int):
                raise CliError(f"config {path}: {key} must be an integer")
            out[key] = value
        elif tp is float:
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise CliError(f"config {path}: {key} must be a number")
            out[key] = float(value)
        else:
            if not isinstance(value, str):
                raise CliError(f"config {path}: {key} must be a string")
            out[key] = value
    return out


def dump_config(cfg, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(dataclasses.asdict(cfg), fh, sort_keys=True, indent=2)
        fh.write("\n")


def _hash_params(cfg):
    return {k: v for k, v in dataclasses.asdict(cfg).items() if k not in PATH_FIELDS}


def _add_fields(parser, cls):
    for name, tp in _field_types(cls).items():
        flag = "--" + name.replace("_", "-")
        if tp is bool:
            parser.add_argument(flag, dest=name, action="store_true", default=None)
        else:
            parser.add_argument(flag, dest=name, type=tp, default=None,
                                choices=CHOICES.get(name))


def build_parser():
    parser = argparse.ArgumentParser(
        prog="sparseising",
        description="Sparse Ising model estimation by penalized composite likelihood.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, cls in CONFIGS.items():
        p = sub.add_parser(name)
        p.add_argument("--config", help="JSON settings file")
        p.add_argument("--dump-config", metavar="PATH",
                       help="write the merged settings as JSON and continue")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker threads (default: ${THREADS_ENV} or 1)")
        p.add_argument("--strict", action="store_true",
                       help="exit with code 3 if any solver did not converge")
        _add_fields(p, cls)
    return parser


def resolve(args):
    """Merge defaults, config file and flags into the command's dataclass."""
    cls = CONFIGS[args.command]
    values = {}
    if args.config:
        values.update(load_config(cls, args.config))
    for name in _field_types(cls):
        flag = getattr(args, name)
        if flag is not None:
            values[name] = flag
    if "estimator" in values:
        values["estimator"] = canonical_name(values["estimator"])
    for name, allowed in CHOICES.items():
        if name in values and values[name] not in allowed:
            raise CliError(f"{name} must be one of {', '.join(allowed)}")
    return cls(**values)


def resolve_threads(flag):
    if flag is not None:
        threads = flag
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(env)
        except ValueError:
            raise CliError(f"{THREADS_ENV} must be an integer, got {env!r}") from None
    if threads < 1:
        raise CliError("threads must be at least 1")
    return threads


def _meta(command, cfg, seed=None, **extra):
    meta = {"command": command, "config_hash": io.config_hash(_hash_params(cfg)),
            "seed": seed}
    meta.update(extra)
    return meta


def _require(value, flag):
    if value is None:
        raise CliError(f"{flag} is required")
    return value


def _lla_config(cfg):
    inner = SolverConfig(tol=cfg.tol, max_sweeps=cfg.max_sweeps)
    return LlaConfig(max_lla_iters=getattr(cfg, "max_lla_iters", 10), inner=inner,
                     stop_tol=getattr(cfg, "stop_tol", 1e-6), a=cfg.a,
                     bic_scale=cfg.bic_scale)


def _read_data(cfg):
    return io.read_spins(_require(cfg.data, "--data"), cfg.zero_one)


def _graph(cfg):
    if cfg.graph == "chain":
        return chain_graph(cfg.K, cfg.n_edges)
    if cfg.graph == "lattice":
        return lattice_graph(cfg.K, cfg.rows)
    if cfg.graph == "regular":
        return random_regular_graph(cfg.K, cfg.degree, cfg.seed)
    return io.read_graph(_require(cfg.graph_file, "--graph-file"), cfg.K)


def cmd_simulate(cfg, threads, strict):
    truth = gen_truth(_graph(cfg), cfg.seed)
    if cfg.sampler == "gibbs":
        X = gibbs_sample(truth, cfg.N, GibbsConfig(cfg.burn_in, cfg.thinning, cfg.seed))
    else:
        X = exact_sample(truth, cfg.N, cfg.seed)
    os.makedirs(cfg.out_dir, exist_ok=True)
    meta = _meta("simulate", cfg, cfg.seed)
    io.write_spins(os.path.join(cfg.out_dir, "data.csv"), X, meta)
    io.write_edges(os.path.join(cfg.out_dir, "truth.csv"), truth.beta_star, meta)
    return EXIT_OK


def cmd_fit(cfg, threads, strict):
    X, data_meta = _read_data(cfg)
    est = estimate(X, cfg.estimator, _lla_config(cfg), threads, cfg.tuning,
                   cfg.n_lambda, cfg.lambda_ratio)
    os.makedirs(cfg.out_dir, exist_ok=True)
    meta = _meta("fit", cfg, data_meta.get("seed"))
    io.write_edges(os.path.join(cfg.out_dir, "edges.csv"), est.beta, meta)
    N, K = X.shape
    io.write_json(os.path.join(cfg.out_dir, "report.json"), {
        "estimator": est.name,
        "N": N,
        "K": K,
        "chosen_lambda": est.chosen_lambda,
        "converged": est.converged,
        "n_edges": int(np.count_nonzero(est.beta)),
        "diagnostics": est.diagnostics,
    }, meta)
    if strict and not est.converged:
        raise NotConverged(f"{est.name}: solver did not converge")
    return EXIT_OK


def cmd_path(cfg, threads, strict):
    X, data_meta = _read_data(cfg)
    lcfg = _lla_config(cfg)
    lmax = lambda_max(X)
    if not lmax > 0:
        raise CliError("lambda max is zero: every empirical pair product averages to 0")
    grid = lambda_grid(lmax, cfg.n_lambda, cfg.lambda_ratio)
    if cfg.penalty == LASSO:
        path = fit_path(X, LASSO, grid, lcfg.inner)
    else:
        path = scad_path(X, grid, lcfg, lasso_stage(X, grid, lcfg))
    report = bic_select(path, X, cfg.bic_scale)
    rows = [(lam, int(df), ll, score, fit.kkt_residual)
            for lam, df, ll, score, fit in zip(report.lambdas, report.df, report.loglik,
                                                report.scores, path.fits)]
    meta = _meta("path", cfg, data_meta.get("seed"), penalty=cfg.penalty,
                 chosen_row=report.chosen + 1)
    out_dir = os.path.dirname(cfg.out)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    io.write_table(cfg.out, ["lambda", "df", "loglik", "bic", "kkt_residual"], rows, meta)
    if strict and not all(f.converged for f in path.fits):
        raise NotConverged("path: solver did not converge at every grid value")
    return EXIT_OK


def cmd_stability(cfg, threads, strict):
    X, _ = _read_data(cfg)
    rep = stability_select(X, cfg.estimator, cfg.reps, cfg.subsample_size, cfg.pi_thr,
                           cfg.seed, _lla_config(cfg), threads, tuning=cfg.tuning,
                           n_lambda=cfg.n_lambda, ratio=cfg.lambda_ratio)
    K = X.shape[1]
    p = n_pairs(K)
    meta = _meta("stability", cfg, cfg.seed, K=K)
    os.makedirs(cfg.out_dir, exist_ok=True)
    rows = []
    idx = 0
    for j in range(K):
        for k in range(j + 1, K):
            rows.append((j + 1, k + 1, float(rep.frequencies[idx])))
            idx += 1
    io.write_table(os.path.join(cfg.out_dir, "frequencies.csv"), ["j", "k", "frequency"],
                   rows, meta)
    io.write_table(os.path.join(cfg.out_dir, "stable_edges.csv"), ["j", "k", "frequency"],
                   [rows[i] for i in rep.stable], meta)
    io.write_json(os.path.join(cfg.out_dir, "report.json"), {
        "estimator": rep.estimator,
        "reps": rep.reps,
        "failed": rep.failed,
        "subsample_size": rep.subsample_size,
        "pi_thr": rep.pi_thr,
        "p": p,
        "q_avg": rep.q_avg,
        "ev_bound": rep.ev_bound,
        "n_stable": int(rep.stable.size),
    }, meta)
    if strict and rep.failed:
        raise NotConverged(f"stability: {rep.failed} of {rep.reps} replicates failed")
    return EXIT_OK


def cmd_evaluate(cfg, threads, strict):
    beta, fit_meta = io.read_edges(_require(cfg.fit, "--fit"))
    K = K_from_pairs(beta.size)
    payload = {"K": K}
    report = MetricReport(nde=int(np.count_nonzero(beta)))
    if cfg.truth:
        truth, _ = io.read_edges(cfg.truth, K)
        report = metrics(beta, truth, cfg.double_count)
    else:
        print("warning: no --truth given; mse and fdr omitted", file=sys.stderr)
    if cfg.test:
        X, _ = io.read_spins(cfg.test, cfg.zero_one)
        if X.shape[1] != K:
            raise CliError(f"test data has {X.shape[1]} columns, fit has K={K}")
        if cfg.rows:
            X = X[io.read_rows(cfg.rows, X.shape[0])]
        report.me = model_error(beta, X)
        payload["n_test"] = int(X.shape[0])
    elif cfg.rows:
        raise CliError("--rows needs --test")
    payload.update(report.to_dict())
    meta = _meta("evaluate", cfg, fit_meta.get("seed"))
    out_dir = os.path.dirname(cfg.out)
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
    io.write_json(cfg.out, payload, meta)
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "fit": cmd_fit,
    "path": cmd_path,
    "stability": cmd_stability,
    "evaluate": cmd_evaluate,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
        threads = resolve_threads(args.threads)
        if args.dump_config:
            dump_config(cfg, args.dump_config)
        return COMMANDS[args.command](cfg, threads, args.strict)
    except (CliError, ValueError, OSError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NotConverged, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
