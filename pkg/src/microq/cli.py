"""Batch command line front end.

Subcommands dispatch to the model modules, write CSV artifacts with a fixed
bit-exact format (UTF-8, LF, header row, '.' decimal), and emit a JSON
manifest next to every output recording the effective config digest, seed,
tool version, event counts, and wall time. Re-running a subcommand with the
same config, seed, and version reproduces every CSV byte for byte.

Dedicated flags (--seed, --horizon, --sample-period, --runs, --out) are
folded into the effective config before hashing, so the manifest digest
always pins exactly what ran. `--runs K` fans runs out across processes,
capped by the MQ_THREADS environment variable; outputs are indexed by run
and their order is deterministic.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .cable import ReducedCableParams, simulate_cable, simulate_reduced
from .capacity import average_rate, myopic_policy, optimize_policy, sweep_alpha_min
from .config import load_config, validate_config
from .electron import build_isolated_cell, fit_parameters
from .engine import simulate
from .errors import ConfigError, ConvergenceError, MicroqError
from .quorum import fit_logistic, simulate_colony

QUORUM_CSV_COLUMNS = ("N", "A", "R_tot", "C_tot", "S_tot", "V_expr",
                      "eta_A_nM", "eta_R_nM", "eta_C_nM", "eta_S_nM")


def _max_workers() -> int:
    raw = os.environ.get("MQ_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError as exc:
        raise ConfigError(f"MQ_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise ConfigError("MQ_THREADS must be >= 1")
    return n


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path: str, columns) -> None:
    """columns: list of (name, 1-d array), equal lengths."""
    names = [name for name, _ in columns]
    arrays = [np.asarray(arr) for _, arr in columns]
    n = arrays[0].shape[0]
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(",".join(names) + "\n")
        for i in range(n):
            f.write(",".join(_fmt(a[i]) for a in arrays) + "\n")


def _write_manifest(out: str, command: str, cfg, event_counts, outputs,
                    t_start: float, extra: dict | None = None) -> str:
    manifest = {
        "command": command,
        "config_digest": cfg.digest,
        "seed": cfg.seed,
        "version": __version__,
        "event_counts": list(event_counts),
        "outputs": [os.path.basename(p) for p in outputs],
        "wall_time_s": round(time.perf_counter() - t_start, 6),
    }
    if extra:
        manifest.update(extra)
    path = out + ".manifest.json"
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(manifest, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def _out_paths(out: str, runs: int) -> list[str]:
    if runs == 1:
        return [out]
    stem, dot, ext = out.rpartition(".")
    if not dot:
        stem, ext = out, "csv"
    return [f"{stem}_r{r:03d}.{ext}" for r in range(runs)]


def _trajectory_columns(traj):
    cols = [("t", traj.times)]
    cols += [(name, traj.component(name)) for name in traj.names]
    return cols, traj.metadata["event_count"]


def _run_cell(payload, horizon, period, seed):
    net = build_isolated_cell(payload["params"], payload["profile"])
    return _trajectory_columns(simulate(net, [0, 0], horizon, period, seed))


def _run_cable(payload, horizon, period, seed):
    return _trajectory_columns(
        simulate_cable(payload["params"], horizon=horizon, period=period,
                       seed=seed))


def _run_reduced(payload, horizon, period, seed):
    return _trajectory_columns(
        simulate_reduced(payload["params"], payload["policy"], horizon,
                         period, seed, init=payload["init"]))


def _run_quorum(payload, horizon, period, seed):
    run = simulate_colony(payload["params"], horizon=horizon,
                          sample_period=period, seed=seed,
                          interference=payload["interference"])
    names = list(QUORUM_CSV_COLUMNS)
    if payload["interference"] is not None:
        names.append("I")
    cols = [("t", run.times)]
    cols += [(name, run.component(name)) for name in names]
    return cols, run.metadata["event_count"]


_SIMULATORS = {
    "cell": _run_cell,
    "cable": _run_cable,
    "reduced": _run_reduced,
    "quorum": _run_quorum,
}


def _one_task(task):
    kind, payload, horizon, period, seed = task
    return _SIMULATORS[kind](payload, horizon, period, seed)


def _fan_out(kind: str, cfg):
    tasks = [(kind, cfg.payload, cfg.horizon, cfg.sample_period, cfg.seed + r)
             for r in range(cfg.runs)]
    workers = min(cfg.runs, _max_workers())
    if workers <= 1:
        return [_one_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_one_task, tasks))


def _load(args, model: str):
    pairs = list(args.set or [])
    if getattr(args, "seed", None) is not None:
        pairs.append(f"run.seed={args.seed}")
    if getattr(args, "horizon", None) is not None:
        pairs.append(f"run.horizon={args.horizon!r}")
    if getattr(args, "sample_period", None) is not None:
        pairs.append(f"run.sample_period={args.sample_period!r}")
    if getattr(args, "runs", None) is not None:
        pairs.append(f"run.runs={args.runs}")
    if getattr(args, "out", None) is not None:
        pairs.append(f"run.out={args.out}")
    return load_config(args.config, pairs, expected_model=model)


def _read_series_csv(path: str, expected_header=None):
    """Read (t, y) from the first two columns of a headed CSV.

    expected_header, if given, names the first columns exactly; otherwise
    any header is accepted and the first two columns are used.
    """
    try:
        arr = np.genfromtxt(path, delimiter=",", names=True, dtype=float,
                            encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read input series {path}: {exc}") from exc
    names = arr.dtype.names
    if names is None or len(names) < 2:
        raise ConfigError(f"input series {path} needs a header and at least "
                          "two columns")
    if expected_header is not None:
        got = tuple(names[:len(expected_header)])
        if got != tuple(expected_header):
            raise ConfigError(
                f"input series {path}: expected columns "
                f"{','.join(expected_header)}, got {','.join(got)}")
    t = np.atleast_1d(arr[names[0]]).astype(float)
    y = np.atleast_1d(arr[names[1]]).astype(float)
    if not (np.all(np.isfinite(t)) and np.all(np.isfinite(y))):
        raise ConfigError(f"input series {path} contains non-numeric or "
                          "non-finite entries in its first two columns")
    return t, y


def cmd_simulate(args, model: str) -> int:
    t0 = time.perf_counter()
    cfg = _load(args, model)
    if model == "capacity":
        raise AssertionError("capacity has no simulate subcommand")
    out = cfg.out or f"{model}_trajectory.csv"
    results = _fan_out(model, cfg)
    paths = _out_paths(out, cfg.runs)
    for path, (cols, _) in zip(paths, results):
        _write_csv(path, cols)
    _write_manifest(out, f"{model} simulate", cfg,
                    [ev for _, ev in results], paths, t0)
    return 0


def cmd_cell_fit(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args, "cell")
    t, atp = _read_series_csv(args.infile, expected_header=("t", "atp"))
    p = cfg.payload["params"]
    fit = fit_parameters(t, atp, cfg.payload["profile"],
                         capacities=(p.m_ch_cap, p.n_atp_cap),
                         init_guess=(p.rho, p.zeta, p.beta),
                         conversion=cfg.payload["conversion"])
    out = cfg.out or "cell_fit.csv"
    _write_csv(out, [("rho", [fit.rho]), ("zeta", [fit.zeta]),
                     ("beta", [fit.beta]), ("residual", [fit.residual]),
                     ("converged", [int(fit.converged)])])
    _write_manifest(out, "cell fit", cfg, [fit.n_evaluations], [out], t0)
    if not fit.converged:
        print("fit did not converge within the iteration cap", file=sys.stderr)
        return 4
    return 0


def cmd_capacity_solve(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args, "capacity")
    pl = cfg.payload
    if pl["alpha_min"] is None:
        raise ConfigError("[capacity] missing required key 'alpha_min' "
                          "(needed by solve)")
    params = ReducedCableParams.from_clogging(pl["e_max"], pl["alpha_min"])
    result = optimize_policy(params, pl["bounds"], n_actions=pl["n_actions"],
                             tolerance=pl["tolerance"])
    out = cfg.out or "capacity_policy.csv"
    states = np.arange(len(result.policy))
    _write_csv(out, [("state", states),
                     ("lambda_bar", result.policy.lambda_bar)])
    mp_rate = average_rate(myopic_policy(pl["bounds"], pl["e_max"]), params)
    _write_manifest(out, "capacity solve", cfg, [result.iterations], [out], t0,
                    extra={"rate_opt": result.rate, "rate_mp": mp_rate})
    return 0


def cmd_capacity_sweep(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args, "capacity")
    pl = cfg.payload
    if pl["alpha_min_list"] is None:
        raise ConfigError("[capacity] missing required key 'alpha_min_list' "
                          "(needed by sweep)")
    rows = sweep_alpha_min(pl["alpha_min_list"], pl["e_max"], pl["bounds"],
                           n_actions=pl["n_actions"], tolerance=pl["tolerance"])
    out = cfg.out or "capacity_sweep.csv"
    table = np.array(rows, dtype=float)
    _write_csv(out, [("alpha_min", table[:, 0]), ("rate_opt", table[:, 1]),
                     ("rate_mp", table[:, 2]), ("gap_pct", table[:, 3])])
    _write_manifest(out, "capacity sweep", cfg, [], [out], t0,
                    extra={"rows": len(rows)})
    return 0


def cmd_quorum_fit_growth(args) -> int:
    t0 = time.perf_counter()
    cfg = _load(args, "quorum")
    t, density = _read_series_csv(args.infile)
    fit = fit_logistic(t, density)
    out = cfg.out or "growth_fit.csv"
    _write_csv(out, [("rho_max", [fit.rho]), ("capacity", [fit.capacity]),
                     ("n0", [fit.n0]), ("ok", [int(fit.ok)]),
                     ("residual", [fit.residual])])
    _write_manifest(out, "quorum fit-growth", cfg, [], [out], t0)
    if not fit.ok:
        print("growth fit is low-confidence (no net growth or no "
              "convergence)", file=sys.stderr)
        return 4
    return 0


def cmd_validate(args) -> int:
    violations = validate_config(args.config, args.set)
    if violations:
        for v in violations:
            print(v, file=sys.stderr)
        return 2
    print("ok")
    return 0


def _add_common_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", required=True, help="path to the run config")
    p.add_argument("--seed", type=int, help="override [run] seed")
    p.add_argument("--out", help="override the output path")
    p.add_argument("--runs", type=int, help="number of independent runs")
    p.add_argument("--horizon", type=float, help="override [run] horizon")
    p.add_argument("--sample-period", dest="sample_period", type=float,
                   help="override [run] sample_period")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any config key (repeatable; "
                        "section.key or bare model/run key)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microq",
        description="Stochastic simulation and signaling-rate optimization "
                    "for microbial interaction models")
    parser.add_argument("--version", action="version", version=__version__)
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, handler, infile=False):
        p = group.add_parser(name)
        _add_common_flags(p)
        if infile:
            p.add_argument("--in", dest="infile", required=True,
                           help="input series CSV")
        p.set_defaults(handler=handler)
        return p

    cell = groups.add_parser("cell").add_subparsers(dest="op", required=True)
    leaf(cell, "simulate", lambda a: cmd_simulate(a, "cell"))
    leaf(cell, "fit", cmd_cell_fit, infile=True)

    cable = groups.add_parser("cable").add_subparsers(dest="op", required=True)
    leaf(cable, "simulate", lambda a: cmd_simulate(a, "cable"))

    reduced = groups.add_parser("reduced").add_subparsers(dest="op",
                                                          required=True)
    leaf(reduced, "simulate", lambda a: cmd_simulate(a, "reduced"))

    capacity = groups.add_parser("capacity").add_subparsers(dest="op",
                                                            required=True)
    leaf(capacity, "solve", cmd_capacity_solve)
    leaf(capacity, "sweep", cmd_capacity_sweep)

    quorum = groups.add_parser("quorum").add_subparsers(dest="op",
                                                        required=True)
    leaf(quorum, "simulate", lambda a: cmd_simulate(a, "quorum"))
    leaf(quorum, "fit-growth", cmd_quorum_fit_growth, infile=True)

    val = groups.add_parser("validate")
    val.add_argument("--config", required=True)
    val.add_argument("--set", action="append", default=[],
                     metavar="KEY=VALUE")
    val.set_defaults(handler=cmd_validate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return 4
    except MicroqError as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, RuntimeError) as exc:
        print(f"model error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
