"""Command-line front end.

Subcommands: master, simulate, filter, ensemble, classical, verify.
Exit codes: 0 success, 1 validation error, 2 numerical failure.
All randomness flows from --seed (default 0); outputs land under --out.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import classical as cl
from . import io as qio
from . import verify as qverify
from .config import ConfigError, RunConfig, parse_config
from .ensemble import EnsembleConfig, run_ensemble
from .master import StepSizeError, integrate_master
from .trajectory import (
    JumpRateError,
    TraceUnderflowError,
    filter_record,
    innovations,
    simulate_record,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qfilter",
        description=(
            "Quantum filtering simulator for quadrature and photon-counting "
            "measurements with coherent-state input fields."
        ),
        epilog=(
            "File formats: config is JSON (complex entries as [re, im]; matrices as "
            "flat row-major lists of [re, im] pairs). State CSVs have columns "
            "t,<observables...>,trace,purity[,innovations]. Record CSVs start with "
            "the line 'kind,dt,steps', a metadata row, then one increment per line. "
            "All CSVs are UTF-8 with LF line endings."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, config_required=True):
        p.add_argument("--config", required=config_required, help="path to JSON run config")
        p.add_argument("--seed", type=int, default=0, help="master RNG seed (default 0)")
        p.add_argument("--out", default=".", help="output directory (default current)")

    add_common(sub.add_parser("master", help="integrate the coherent-state master equation"))
    add_common(sub.add_parser("simulate", help="simulate a measurement record and its filter path"))
    add_common(sub.add_parser("filter", help="replay the filter on the configured stored record"))
    p_ens = sub.add_parser("ensemble", help="Monte Carlo ensemble vs the master equation")
    add_common(p_ens)
    p_ens.add_argument("--trajectories", type=int, default=100, help="trajectory count N")
    add_common(sub.add_parser("classical", help="classical particle-filter benchmark"))
    p_ver = sub.add_parser("verify", help="run the operator-algebra identity suites")
    add_common(p_ver, config_required=False)
    p_ver.add_argument(
        "--dims-check", action="store_true", help="extend the qprob suite to dimension 8"
    )
    return parser


def _out_path(args, cfg: RunConfig, key: str) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return out_dir / cfg.outputs[key]


def cmd_master(args, cfg: RunConfig) -> int:
    traj = integrate_master(cfg.model, cfg.beta, cfg.rho0, cfg.grid)
    qio.write_states_csv(_out_path(args, cfg, "master"), cfg.grid.times(), traj.states, cfg.observables)
    return EXIT_OK


def cmd_simulate(args, cfg: RunConfig) -> int:
    record, states = simulate_record(
        cfg.model, cfg.beta, cfg.rho0, cfg.measurement, cfg.grid, args.seed
    )
    innov = innovations(record, states, cfg.model, cfg.beta)
    qio.write_record_csv(_out_path(args, cfg, "record"), record)
    qio.write_states_csv(
        _out_path(args, cfg, "states"),
        cfg.grid.times(),
        [s.rho for s in states],
        cfg.observables,
        innovations=innov.cumulative(),
    )
    return EXIT_OK


def cmd_filter(args, cfg: RunConfig) -> int:
    record_path = _out_path(args, cfg, "record")
    if not record_path.exists():
        raise ConfigError(str(record_path), "record file does not exist; run simulate first")
    record = qio.read_record_csv(record_path)
    if record.kind != cfg.measurement:
        raise ConfigError(
            "measurement",
            f"record kind {record.kind!r} does not match configured kind {cfg.measurement!r}",
        )
    states = filter_record(cfg.model, cfg.beta, cfg.rho0, record)
    innov = innovations(record, states, cfg.model, cfg.beta)
    qio.write_states_csv(
        _out_path(args, cfg, "states"),
        record.grid.times(),
        [s.rho for s in states],
        cfg.observables,
        innovations=innov.cumulative(),
    )
    return EXIT_OK


def cmd_ensemble(args, cfg: RunConfig) -> int:
    ens_cfg = EnsembleConfig(
        model=cfg.model,
        beta=cfg.beta,
        rho0=cfg.rho0,
        grid=cfg.grid,
        kind=cfg.measurement,
        n_traj=args.trajectories,
        master_seed=args.seed,
        observables=cfg.observables,
    )
    report = run_ensemble(ens_cfg)
    qio.write_ensemble_outputs(
        _out_path(args, cfg, "ensemble_summary"), _out_path(args, cfg, "ensemble_series"), report
    )
    return EXIT_OK


def cmd_classical(args, cfg: RunConfig) -> int:
    spec = cfg.classical
    if spec is None:
        raise ConfigError("classical", "config has no 'classical' section")
    preset = spec.get("preset", "linear")
    a = float(spec.get("a", -1.0))
    c = float(spec.get("c", 1.0))
    sigma = float(spec.get("sigma", 1.0))
    n = int(spec.get("particles", 1000))
    x0 = float(spec.get("x0", 0.0))
    prior_std = float(spec.get("prior_std", 1.0))
    if n < 1:
        raise ConfigError("classical.particles", "must be >= 1")

    model = cl.linear_model(a=a, sigma=sigma, c=c) if preset == "linear" else cl.PRESETS[preset](sigma=sigma, c=c)
    grid = cfg.grid
    xs, dys = cl.simulate_pair(model, x0, grid, args.seed)

    rng = np.random.default_rng(args.seed + 1)
    ensemble = cl.init_ensemble(rng, n, mean=x0, std=prior_std)
    pf_mean = [cl.posterior(ensemble, lambda x: x)]
    pf_var = [cl.posterior(ensemble, lambda x: x**2) - pf_mean[0] ** 2]
    h_means = np.empty(grid.steps)
    kalman = cl.KalmanState(mean=x0, covariance=prior_std**2)
    kb_mean, kb_var = [kalman.mean], [kalman.covariance]
    for k in range(grid.steps):
        h_means[k] = cl.posterior(ensemble, model.observation)
        ensemble = cl.particle_step(ensemble, dys[k], model, grid.dt, rng)
        m = cl.posterior(ensemble, lambda x: x)
        pf_mean.append(m)
        pf_var.append(cl.posterior(ensemble, lambda x: x**2) - m**2)
        if preset == "linear":
            kalman = cl.kalman_bucy_step(kalman, dys[k], a, c, sigma, grid.dt)
        kb_mean.append(kalman.mean)
        kb_var.append(kalman.covariance)
    innov = np.concatenate([[0.0], np.cumsum(cl.classical_innovations(dys, h_means, grid.dt))])

    columns = {
        "x_true": xs,
        "pf_mean": np.array(pf_mean),
        "pf_var": np.array(pf_var),
        "innovations": innov,
    }
    if preset == "linear":
        columns["kalman_mean"] = np.array(kb_mean)
        columns["kalman_var"] = np.array(kb_var)
    qio.write_classical_csv(_out_path(args, cfg, "classical"), grid.times(), columns)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = qverify.full_suite(seed=args.seed, dims_check=args.dims_check)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(results)} identity checks failed")
        return EXIT_NUMERICAL
    print(f"all {len(results)} identity checks passed")
    return EXIT_OK


def dispatch(args) -> int:
    if args.command == "verify":
        return cmd_verify(args)
    cfg = parse_config(args.config)
    handler = {
        "master": cmd_master,
        "simulate": cmd_simulate,
        "filter": cmd_filter,
        "ensemble": cmd_ensemble,
        "classical": cmd_classical,
    }[args.command]
    return handler(args, cfg)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return dispatch(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ValueError,) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (TraceUnderflowError, JumpRateError, StepSizeError, ZeroDivisionError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
