"""Command-line front end: simulate, classify, grid and ce subcommands.

Run configurations are flat INI files with one section per block; every key
has a default matching the baseline experiment setup, so a config only needs
to state what differs. Each run writes a ``<prefix>_result.json`` summary
plus mode-specific CSV artifacts, and optionally renders figures with
``--plot``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import dataclasses
import json
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from piezoharvest import report
from piezoharvest.chaos01 import Test01Config, classify
from piezoharvest.cross_entropy import CEConfig, default_elite, optimize, write_trace_csv
from piezoharvest.dynamics import (
    HarvesterParams,
    InitialState,
    NonFiniteState,
    SimConfig,
    TimeSeries,
    add_noise,
    integrate_rk4,
    mean_power,
)
from piezoharvest.grid_search import (
    GridSpec,
    NoFeasiblePoint,
    exhaustive_search,
    write_field_csv,
)
from piezoharvest.objective import DesignSpace, HarvesterObjective, PenaltyConfig

__all__ = ["main", "load_config", "RunConfig"]

# Accept the circuit time-constant under its conventional symbol too.
_PARAM_ALIASES = {"lambda": "lam"}

_DEFAULT_SPACE_2D = dict(
    names=("f", "omega"),
    lower=np.array([0.08, 0.75]),
    upper=np.array([0.1, 0.85]),
    fixed={"xi": 0.01, "chi": 0.05, "lam": 0.05, "kappa": 0.5},
)


@dataclass
class RunConfig:
    """Validated aggregate of every block a run may need."""

    space: DesignSpace
    sim: SimConfig
    t01: Test01Config
    penalty: PenaltyConfig
    ce: CEConfig
    grid: GridSpec
    params: HarvesterParams
    ic: InitialState
    noise_ratio: float = 0.0
    seed: int | None = None
    out: str = "run"
    workers: int = 1
    extras: dict = field(default_factory=dict)


def _canon(name: str) -> str:
    return _PARAM_ALIASES.get(name.strip(), name.strip())


def _floats(text: str) -> list[float]:
    return [float(x) for x in text.replace(",", " ").split()]


def _parse_fixed(text: str) -> dict[str, float]:
    out = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, val = item.partition("=")
        out[_canon(key)] = float(val)
    return out


def load_config(path: str | None) -> RunConfig:
    """Read an INI run configuration, filling defaults for absent keys."""
    cp = configparser.ConfigParser()
    if path is not None:
        with open(path) as fh:
            cp.read_file(fh)

    ds = cp["design_space"] if cp.has_section("design_space") else {}
    if ds:
        names = tuple(_canon(n) for n in ds["names"].split(","))
        space = DesignSpace(
            names=names,
            lower=np.array(_floats(ds["lower"])),
            upper=np.array(_floats(ds["upper"])),
            fixed=_parse_fixed(ds.get("fixed", "")),
        )
    else:
        space = DesignSpace(**_DEFAULT_SPACE_2D)

    sm = cp["sim"] if cp.has_section("sim") else {}
    sim = SimConfig(
        t_start=float(sm.get("t_start", 0.0)),
        t_end=float(sm.get("t_end", 2500.0)),
        dt=float(sm.get("dt", 0.01)),
        power_window=(
            float(sm.get("power_t0", 1250.0)),
            float(sm.get("power_tf", 2500.0)),
        ),
        observable_stride=int(sm.get("observable_stride", 100)),
    )

    tc = cp["test01"] if cp.has_section("test01") else {}
    t01 = Test01Config(
        n_c=int(tc.get("n_c", 100)),
        c_min=float(tc.get("c_min", np.pi / 5)),
        c_max=float(tc.get("c_max", 4 * np.pi / 5)),
        n_cut_fraction=float(tc.get("n_cut_fraction", 0.1)),
    )

    pn = cp["penalty"] if cp.has_section("penalty") else {}
    penalty = PenaltyConfig(
        alpha_pen=float(pn.get("alpha", 10.0)),
        epsilon=float(pn.get("epsilon", 0.1)),
    )

    ce_sec = cp["ce"] if cp.has_section("ce") else {}
    n_samples = int(ce_sec.get("n_samples", 50))
    ce = CEConfig(
        n_samples=n_samples,
        n_elite=int(ce_sec.get("n_elite", default_elite(n_samples))),
        max_levels=int(ce_sec.get("max_levels", 100)),
        tol=float(ce_sec.get("tol", 1e-3)),
        smooth_alpha=float(ce_sec.get("smooth_alpha", 0.7)),
        smooth_beta=float(ce_sec.get("smooth_beta", 0.8)),
        smooth_q=float(ce_sec.get("smooth_q", 5.0)),
    )

    gr = cp["grid"] if cp.has_section("grid") else {}
    if "resolution" in gr:
        resolution = tuple(int(x) for x in _floats(gr["resolution"]))
    else:
        resolution = (256,) * space.dim
    grid = GridSpec(resolution=resolution)

    pr = dict(cp["params"]) if cp.has_section("params") else {}
    pkw = dict(space.fixed)
    pkw.update({_canon(k): float(v) for k, v in pr.items()})
    pkw.setdefault("f", 0.0999)
    pkw.setdefault("omega", 0.7786)
    params = HarvesterParams(**{k: pkw[k] for k in HarvesterParams.FIELD_NAMES if k in pkw})

    ics = cp["initial_state"] if cp.has_section("initial_state") else {}
    ic = InitialState(
        x0=float(ics.get("x0", 1.0)),
        xdot0=float(ics.get("xdot0", 0.0)),
        v0=float(ics.get("v0", 0.0)),
    )

    rn = cp["run"] if cp.has_section("run") else {}
    seed = rn.get("seed")
    return RunConfig(
        space=space,
        sim=sim,
        t01=t01,
        penalty=penalty,
        ce=ce,
        grid=grid,
        params=params,
        ic=ic,
        noise_ratio=float(rn.get("noise_ratio", 0.0)),
        seed=None if seed is None else int(seed),
        out=rn.get("out", "run"),
        workers=int(rn.get("workers", 1)),
    )


def _write_json(path, payload) -> None:
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_simulate(cfg: RunConfig, plot: bool) -> int:
    t_begin = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    series = integrate_rk4(cfg.params, cfg.ic, cfg.sim)
    if cfg.noise_ratio > 0:
        series = add_noise(series, cfg.noise_ratio, rng)
    t_lo, t_hi = cfg.sim.power_window
    power = mean_power(series, t_lo, t_hi, cfg.params.lam)
    res01 = classify(series.observable(t_lo, t_hi, cfg.sim.observable_stride), cfg.t01, rng)

    series.to_csv(f"{cfg.out}_series.csv")
    wall = time.perf_counter() - t_begin
    _write_json(
        f"{cfg.out}_result.json",
        {
            "mode": "simulate",
            "params": {k: getattr(cfg.params, k) for k in HarvesterParams.FIELD_NAMES},
            "power": power,
            "k": res01.k,
            "seed": cfg.seed,
            "noise_ratio": cfg.noise_ratio,
            "evaluations": 1,
            "wall_time_s": wall,
        },
    )
    if plot:
        report.plot_series(series, f"{cfg.out}_series.png")
    print(f"simulate: P = {power:.6g}, K = {res01.k:.4f} -> {cfg.out}_series.csv")
    return 0


def _load_observable(path: str) -> np.ndarray:
    with open(path) as fh:
        first = fh.readline()
    has_header = any(c.isalpha() for c in first)
    data = np.loadtxt(path, delimiter=",", skiprows=1 if has_header else 0, ndmin=2)
    return data[:, -1]  # single column, or the v column of a t,v file


def _run_classify(cfg: RunConfig, input_path: str, plot: bool) -> int:
    t_begin = time.perf_counter()
    rng = np.random.default_rng(cfg.seed)
    phi = _load_observable(input_path)
    result = classify(phi, cfg.t01, rng)

    rows = [["c", "k_c", "degenerate"]] + [
        [repr(float(c)), repr(float(kc)), str(int(dg))]
        for c, kc, dg in zip(result.c_values, result.k_c_values, result.degenerate)
    ]
    diag_path = f"{cfg.out}_classifier.csv"
    with open(diag_path, "w", newline="") as fh:
        csv.writer(fh).writerows(rows)
    wall = time.perf_counter() - t_begin
    _write_json(
        f"{cfg.out}_result.json",
        {
            "mode": "classify",
            "k": result.k,
            "n_c": cfg.t01.n_c,
            "n_samples": int(len(phi)),
            "seed": cfg.seed,
            "wall_time_s": wall,
        },
    )
    if plot:
        report.plot_classifier(result, f"{cfg.out}_classifier.png")
    sys.stdout.write(f"K,{result.k!r}\n")
    sys.stdout.write("\n".join(",".join(row) for row in rows) + "\n")
    print(f"classify: K = {result.k:.4f} -> {diag_path}")
    return 0


def _make_objective(cfg: RunConfig) -> HarvesterObjective:
    return HarvesterObjective(
        space=cfg.space,
        sim=cfg.sim,
        t01=cfg.t01,
        penalty=cfg.penalty,
        noise_ratio=cfg.noise_ratio,
        ic=cfg.ic,
    )


def _optimum_payload(mode: str, cfg: RunConfig, result, wall: float) -> dict:
    return {
        "mode": mode,
        "optimum": dict(zip(cfg.space.names, result.x_star.tolist())),
        "power": result.power_star,
        "penalized": result.s_star,
        "k": result.k_star,
        "feasible": result.feasible,
        "levels": result.levels_used,
        "evaluations": result.evaluations_used,
        "converged": result.converged,
        "seed": cfg.seed,
        "noise_ratio": cfg.noise_ratio,
        "wall_time_s": wall,
    }


def _run_grid(cfg: RunConfig, plot: bool) -> int:
    t_begin = time.perf_counter()
    objective = _make_objective(cfg)
    result, fld = exhaustive_search(
        objective, cfg.space, cfg.grid, seed=cfg.seed, workers=cfg.workers
    )
    write_field_csv(fld, f"{cfg.out}_field.csv")
    wall = time.perf_counter() - t_begin
    _write_json(f"{cfg.out}_result.json", _optimum_payload("grid", cfg, result, wall))
    if plot and cfg.space.dim == 2:
        report.plot_field(
            fld, cfg.space.names, cfg.grid.resolution, f"{cfg.out}_field.png",
            best=result.x_star,
        )
    opt = ", ".join(f"{n} = {v:.6g}" for n, v in zip(cfg.space.names, result.x_star))
    print(
        f"grid: P = {result.power_star:.6g} at ({opt}), K = {result.k_star:.4f}, "
        f"{result.evaluations_used} evaluations"
    )
    return 0


def _run_ce(cfg: RunConfig, plot: bool) -> int:
    t_begin = time.perf_counter()
    objective = _make_objective(cfg)
    ce_cfg = dataclasses.replace(cfg.ce, seed=cfg.seed)
    result = optimize(objective, cfg.space, ce_cfg, workers=cfg.workers)
    write_trace_csv(result.trace, cfg.space.dim, f"{cfg.out}_trace.csv")
    wall = time.perf_counter() - t_begin
    _write_json(f"{cfg.out}_result.json", _optimum_payload("ce", cfg, result, wall))
    if plot:
        report.plot_trace(result.trace, cfg.space.names, f"{cfg.out}_trace.png")
    opt = ", ".join(f"{n} = {v:.6g}" for n, v in zip(cfg.space.names, result.x_star))
    print(
        f"ce: P = {result.power_star:.6g} at ({opt}), K = {result.k_star:.4f}, "
        f"{result.levels_used} levels, {result.evaluations_used} evaluations, "
        f"converged = {result.converged}"
    )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="piezoharvest",
        description="Bistable harvester power optimization under a non-chaos constraint",
    )
    sub = parser.add_subparsers(dest="mode", required=True)
    for mode, blurb in (
        ("simulate", "integrate one parameter set and export the trajectory"),
        ("classify", "run the 0-1 chaos test on a CSV series"),
        ("grid", "exhaustive search on a uniform design grid"),
        ("ce", "cross-entropy search of the design box"),
    ):
        sp = sub.add_parser(mode, help=blurb)
        sp.add_argument("--config", help="INI run configuration")
        sp.add_argument("--seed", type=int, help="random seed (overrides config)")
        sp.add_argument("--out", help="output path prefix (overrides config)")
        sp.add_argument("--workers", type=int, help="concurrent evaluations")
        sp.add_argument("--noise", type=float, help="voltage noise ratio")
        sp.add_argument("--plot", action="store_true", help="also render figures")
        if mode == "classify":
            sp.add_argument("--input", required=True, help="single-column or t,v CSV")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if args.out is not None:
            cfg.out = args.out
        if args.workers is not None:
            cfg.workers = args.workers
        if args.noise is not None:
            cfg.noise_ratio = args.noise
            if args.noise < 0:
                raise ValueError("noise ratio must be non-negative")
    except (KeyError, ValueError, OSError, configparser.Error) as exc:
        print(f"error: invalid configuration: {exc}", file=sys.stderr)
        return 1

    try:
        if args.mode == "simulate":
            return _run_simulate(cfg, args.plot)
        if args.mode == "classify":
            return _run_classify(cfg, args.input, args.plot)
        if args.mode == "grid":
            return _run_grid(cfg, args.plot)
        return _run_ce(cfg, args.plot)
    except (NoFeasiblePoint, NonFiniteState) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
