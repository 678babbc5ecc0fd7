"""Command-line entry points.

Five subcommands: ``map`` (parameter report), ``run`` (single ideal run),
``ensemble`` (quenched-noise ensemble), ``semiclassical`` (meson-front
prediction on the run's time grid), and ``ingest`` (correlations from a
shot file). Exit codes: 0 success, 2 configuration/validation error,
3 capacity or numerical failure, 4 I/O failure.

Run directories receive ``run.json`` (provenance: resolved config, seed,
package version, kernel backend) before any computation starts, the data
CSVs afterwards, and ``meta.json`` (timings and other non-deterministic
facts) last. Everything except meta.json is byte-deterministic for a given
config and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

import numpy as np

from . import __version__, analysis, engine, kernels, noise, semiclassical
from .config import ConfigError, RunConfig, load_config
from .model import (
    InvalidGeometryError,
    MappingError,
    SingularCouplingError,
    map_ising_to_rydberg,
    map_rydberg_to_ising,
)
from .schedule import ScheduleError
from .units import to_mhz2pi


def _write_text(path: str, text: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)


def _json_dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _prepare_out(cfg: RunConfig, args, command: str) -> tuple[str, int]:
    """Create the output directory and write provenance before computing."""
    out_dir = args.out if args.out else cfg["output"]["dir"]
    seed = args.seed if args.seed is not None else cfg["execution"]["seed"]
    os.makedirs(out_dir, exist_ok=True)
    provenance = {
        "command": command,
        "config": cfg.resolved,
        "seed": seed,
        "package_version": __version__,
        "kernel_backend": kernels.BACKEND,
    }
    _write_text(os.path.join(out_dir, "run.json"), _json_dumps(provenance))
    return out_dir, seed


def _write_meta(out_dir: str, **facts) -> None:
    facts.setdefault("package_version", __version__)
    facts.setdefault("kernel_backend", kernels.BACKEND)
    _write_text(os.path.join(out_dir, "meta.json"), _json_dumps(facts))


def cmd_map(args) -> int:
    cfg = load_config(args.config)
    model = cfg.chain_model()
    ryd = model.rydberg()
    ising = model.ising()
    back = map_rydberg_to_ising(ryd, model.u_nn, plus_parity=model.plus_parity)
    plus = map_ising_to_rydberg(ising, model.u_nn, one_parity=model.one_parity, delta_glo_sign=+1)
    minus = map_ising_to_rydberg(ising, model.u_nn, one_parity=model.one_parity, delta_glo_sign=-1)
    resid = float(np.max(np.abs(back.hz - model.hz)))
    lines = [
        f"chain: L={model.L} boundary={model.geometry.boundary} "
        f"a={model.geometry.spacing} um turns={list(model.geometry.turns)}",
        f"U_nn = {to_mhz2pi(model.u_nn):.6f} MHz_2pi   J = U_nn/4 = {to_mhz2pi(ising.j):.6f} MHz_2pi",
        f"target: hx = {model.hx}   hz = {model.hz}",
        f"Omega     = {to_mhz2pi(ryd.omega):.6f} MHz_2pi",
        f"Delta_glo = {to_mhz2pi(plus.delta_glo):.6f} MHz_2pi  [U_nn(1 + hz/2)]",
        f"          = {to_mhz2pi(minus.delta_glo):.6f} MHz_2pi  [U_nn(1 - hz/2) convention]",
        f"Delta_loc = {to_mhz2pi(ryd.delta_loc):.6f} MHz_2pi",
        f"h-pattern = {''.join(str(int(round(h))) if h in (0.0, 1.0) else 'x' for h in ryd.h_pattern)}"
        f" (h=1 on {cfg['physics']['h_one_parity']} sites)",
        f"round-trip max |hz_i - hz| = {resid:.3e}",
    ]
    print("\n".join(lines))
    return 0


def _single_run(cfg: RunConfig, seed: int, threads: int):
    model = cfg.chain_model()
    schedule = cfg.build_schedule(model)
    couplings = model.couplings(cfg["physics"]["truncation"])
    state0 = cfg.initial_state(model)
    times = cfg.sample_times(schedule)
    engine.check_capacity(model.L, cfg["execution"]["max_qubits"])
    result = engine.evolve(
        state0, schedule, model.geometry, couplings,
        cfg["execution"]["dt_us"], times, num_threads=threads,
        max_qubits=cfg["execution"]["max_qubits"],
    )
    return model, schedule, result


def cmd_run(args) -> int:
    cfg = load_config(args.config)
    threads = cfg.effective_threads()
    out_dir, seed = _prepare_out(cfg, args, "run")
    t0 = time.perf_counter()
    model, schedule, result = _single_run(cfg, seed, threads)
    table = analysis.table_from_states(
        result.times, result.states, cfg.d_max(), cfg.bulk_margin(),
        model.geometry.boundary,
    )
    _write_text(os.path.join(out_dir, "correlations.csv"), analysis.correlations_csv(table))
    n_shots = cfg["execution"]["n_shots"]
    if n_shots > 0:
        rng = np.random.default_rng(seed)
        groups = [
            (float(t), engine.sample_shots(s, n_shots, rng))
            for t, s in zip(result.times, result.states)
        ]
        _write_text(os.path.join(out_dir, "shots.csv"), analysis.shots_csv(groups))
    if cfg["output"]["dump_trajectory"]:
        engine.save_trajectory(os.path.join(out_dir, "trajectory.npz"), result)
    if cfg["output"]["dump_magnetization"]:
        mags = engine.magnetization_series(result)
        lines = ["t_us," + ",".join(f"sz_{i}" for i in range(model.L))]
        for t, row in zip(result.times, mags):
            lines.append(",".join([repr(float(t))] + [repr(float(v)) for v in row]))
        _write_text(os.path.join(out_dir, "magnetization.csv"), "\n".join(lines) + "\n")
    if cfg["output"]["dump_schedule"]:
        _write_text(os.path.join(out_dir, "schedule.json"), schedule.to_json())
        _write_text(os.path.join(out_dir, "schedule.csv"), schedule.to_csv())
    _write_meta(
        out_dir,
        elapsed_s=time.perf_counter() - t0,
        threads=threads,
        n_sample_times=int(result.times.size),
        norm_drift=abs(result.final.norm() - 1.0),
    )
    return 0


def cmd_ensemble(args) -> int:
    cfg = load_config(args.config)
    threads = cfg.effective_threads()
    out_dir, seed = _prepare_out(cfg, args, "ensemble")
    t0 = time.perf_counter()
    model = cfg.chain_model()
    schedule = cfg.build_schedule(model)
    engine.check_capacity(model.L, cfg["execution"]["max_qubits"])
    ens = noise.run_ensemble(
        model,
        schedule,
        cfg.noise_spec(),
        cfg["execution"]["n_realizations"],
        seed,
        initial_state=cfg.initial_state(model),
        dt=cfg["execution"]["dt_us"],
        sample_times=cfg.sample_times(schedule),
        d_max=cfg.d_max(),
        bulk_margin=cfg.bulk_margin(),
        channels=cfg["noise"]["channels"],
        truncation=cfg["physics"]["truncation"],
        num_threads=threads,
    )
    _write_text(
        os.path.join(out_dir, "correlations.csv"),
        analysis.correlations_csv(ens.table, ensemble=True),
    )
    _write_meta(
        out_dir,
        elapsed_s=time.perf_counter() - t0,
        threads=threads,
        n_realizations=cfg["execution"]["n_realizations"],
        channels=sorted(ens.channels),
    )
    return 0


def cmd_semiclassical(args) -> int:
    cfg = load_config(args.config)
    out_dir, _ = _prepare_out(cfg, args, "semiclassical")
    t0 = time.perf_counter()
    model = cfg.chain_model()
    schedule = cfg.build_schedule(model)
    times = cfg.sample_times(schedule)
    t1 = schedule.stage_marks[0] if schedule.stage_marks else 0.0
    meson = semiclassical.MesonModel(
        hx=model.hx, hz=model.hz, j=model.u_nn / 4.0,
        hx_pre=cfg["physics"]["hx_pre"],
    )
    front = semiclassical.front_overlay(meson, times, t1_us=t1)
    lines = ["t_us,d_sites"]
    for t, d in zip(times, front):
        lines.append(f"{float(t)!r},{float(d)!r}")
    _write_text(os.path.join(out_dir, "front.csv"), "\n".join(lines) + "\n")
    _write_meta(out_dir, elapsed_s=time.perf_counter() - t0, quench_mark_us=t1)
    return 0


def cmd_ingest(args) -> int:
    cfg = load_config(args.config)
    out_dir, _ = _prepare_out(cfg, args, "ingest")
    t0 = time.perf_counter()
    with open(args.shots, "r", encoding="utf-8") as fh:
        text = fh.read()
    groups = analysis.ingest_shots(text)
    L = cfg["geometry"]["L"]
    if groups[0][1].shape[1] != L:
        raise ConfigError(
            f"shot bitstrings have {groups[0][1].shape[1]} sites but config says L={L}"
        )
    table = analysis.table_from_shot_groups(
        groups, cfg.d_max(), cfg.bulk_margin(), cfg["geometry"]["boundary"]
    )
    _write_text(os.path.join(out_dir, "correlations.csv"), analysis.correlations_csv(table))
    _write_meta(
        out_dir,
        elapsed_s=time.perf_counter() - t0,
        n_groups=len(groups),
        n_shots_total=int(sum(g.shape[0] for _, g in groups)),
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confine-sim",
        description="Driven Rydberg chain as a confining Ising magnet: "
        "mapping, Trotterized runs, noise ensembles, semiclassical fronts.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_out=True):
        p.add_argument("--config", required=True, help="path to the run configuration JSON")
        p.add_argument("--seed", type=int, default=None, help="override execution.seed")
        if needs_out:
            p.add_argument("--out", default=None, help="override output.dir")

    p_map = sub.add_parser("map", help="print the Ising <-> Rydberg parameter report")
    common(p_map, needs_out=False)
    p_map.set_defaults(func=cmd_map)

    p_run = sub.add_parser("run", help="single ideal run: correlations on a time grid")
    common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_ens = sub.add_parser("ensemble", help="quenched-noise ensemble (mean/std correlations)")
    common(p_ens)
    p_ens.set_defaults(func=cmd_ensemble)

    p_semi = sub.add_parser(
        "semiclassical", help="meson-front prediction aligned to the run time grid"
    )
    common(p_semi)
    p_semi.set_defaults(func=cmd_semiclassical)

    p_ing = sub.add_parser("ingest", help="correlations from an external shot CSV")
    common(p_ing)
    p_ing.add_argument("shots", help="path to the t_us,bitstring shot file")
    p_ing.set_defaults(func=cmd_ingest)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, noise.NoiseConfigError, ScheduleError,
            InvalidGeometryError, MappingError,
            analysis.AnalysisError, analysis.ShotFileError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (engine.EvolutionError, semiclassical.UndefinedFrontError,
            SingularCouplingError,
            FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
