"""Run configuration: strict JSON schema with explicit defaults.

A config file holds up to six blocks (geometry, physics, schedule, noise,
execution, output). Unknown blocks or keys are rejected outright, every
value is type- and range-checked, and the fully resolved document (defaults
filled in, file units preserved) is what run provenance echoes. Frequencies
are configured in MHz_2pi (see :mod:`confine_sim.units`); the builder
methods convert to rad/us.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from . import engine
from .analysis import max_distance
from .model import ChainModel, build_geometry
from .noise import CHANNELS, NoiseSpec
from .schedule import PulseSchedule, build_protocol
from .units import from_mhz2pi

ENV_THREADS = "CONFINE_SIM_THREADS"


class ConfigError(ValueError):
    """Raised for malformed or out-of-range configuration input."""


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ConfigError(msg)


def _as_bool(name, v):
    _require(isinstance(v, bool), f"{name} must be a boolean, got {v!r}")
    return v


def _as_int(name, v, lo=None, hi=None):
    _require(isinstance(v, int) and not isinstance(v, bool), f"{name} must be an integer, got {v!r}")
    _require(lo is None or v >= lo, f"{name} must be >= {lo}, got {v}")
    _require(hi is None or v <= hi, f"{name} must be <= {hi}, got {v}")
    return v


def _as_float(name, v, lo=None, positive=False):
    _require(
        isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v),
        f"{name} must be a finite number, got {v!r}",
    )
    v = float(v)
    _require(lo is None or v >= lo, f"{name} must be >= {lo}, got {v}")
    _require(not positive or v > 0, f"{name} must be > 0, got {v}")
    return v


def _as_choice(name, v, choices):
    _require(v in choices, f"{name} must be one of {sorted(choices)}, got {v!r}")
    return v


def _as_number_list(name, v):
    _require(isinstance(v, list) and len(v) > 0, f"{name} must be a nonempty list")
    return [_as_float(f"{name}[{i}]", x) for i, x in enumerate(v)]


_BLOCK_SCHEMAS = {
    "geometry": {"L", "a_um", "turns", "turn_angle_deg", "boundary"},
    "physics": {
        "hx", "hz", "hx_pre", "C6_MHz2pi_um6", "delta_glo_sign",
        "h_one_parity", "h_pattern", "truncation",
    },
    "schedule": {
        "include_prep", "omega_pi_MHz2pi", "t_pi_us", "t_quench_us",
        "t_loc_us", "delta_loc_min_MHz2pi", "t_sim_us",
    },
    "noise": {
        "sigma_pos_um", "rel_omega", "abs_delta_glo_MHz2pi",
        "rel_delta_loc", "abs_h", "scale", "channels",
    },
    "execution": {
        "dt_us", "sample_start_us", "sample_stop_us", "sample_step_us",
        "sample_times_us", "n_realizations", "threads", "seed",
        "max_qubits", "n_shots", "initial_state",
    },
    "output": {
        "dir", "d_max", "bulk_margin", "theta_c",
        "dump_trajectory", "dump_magnetization", "dump_schedule",
    },
}


class RunConfig:
    """Validated configuration with builder methods for the run objects."""

    def __init__(self, doc: dict):
        _require(isinstance(doc, dict), "config root must be a JSON object")
        unknown = set(doc) - set(_BLOCK_SCHEMAS)
        _require(not unknown, f"unknown config blocks: {sorted(unknown)}")
        for name, keys in _BLOCK_SCHEMAS.items():
            block = doc.get(name, {})
            _require(isinstance(block, dict), f"block {name!r} must be a JSON object")
            bad = set(block) - keys
            _require(not bad, f"unknown keys in block {name!r}: {sorted(bad)}")
        self.resolved = self._validate(doc)

    # -- validation -------------------------------------------------------

    def _validate(self, doc: dict) -> dict:
        geo = doc.get("geometry", {})
        _require("L" in geo, "geometry.L is required")
        L = _as_int("geometry.L", geo["L"], lo=2)
        boundary = _as_choice("geometry.boundary", geo.get("boundary", "open"), ("open", "ring"))
        turns = geo.get("turns", [])
        _require(isinstance(turns, list), "geometry.turns must be a list")
        turns = [_as_int(f"geometry.turns[{i}]", t) for i, t in enumerate(turns)]
        r_geo = {
            "L": L,
            "a_um": _as_float("geometry.a_um", geo.get("a_um", 6.0), positive=True),
            "turns": turns,
            "turn_angle_deg": _as_float("geometry.turn_angle_deg", geo.get("turn_angle_deg", 60.0)),
            "boundary": boundary,
        }

        phy = doc.get("physics", {})
        h_pattern = phy.get("h_pattern")
        if h_pattern is not None:
            h_pattern = _as_number_list("physics.h_pattern", h_pattern)
            _require(len(h_pattern) == L, f"physics.h_pattern needs {L} entries")
            _require(all(0.0 <= h <= 1.0 for h in h_pattern),
                     "physics.h_pattern entries must lie in [0, 1]")
        r_phy = {
            "hx": _as_float("physics.hx", phy.get("hx", 0.25), lo=0.0),
            "hz": _as_float("physics.hz", phy.get("hz", 0.0)),
            "hx_pre": _as_float("physics.hx_pre", phy.get("hx_pre", 0.0)),
            "C6_MHz2pi_um6": _as_float(
                "physics.C6_MHz2pi_um6", phy.get("C6_MHz2pi_um6", 18.5 * 6.0**6), positive=True
            ),
            "delta_glo_sign": _as_choice(
                "physics.delta_glo_sign", phy.get("delta_glo_sign", "+"), ("+", "-")
            ),
            "h_one_parity": _as_choice(
                "physics.h_one_parity", phy.get("h_one_parity", "odd"), ("even", "odd")
            ),
            "h_pattern": h_pattern,
            "truncation": _as_choice(
                "physics.truncation", phy.get("truncation", "full"),
                ("full", "nearest_neighbor"),
            ),
        }

        sch = doc.get("schedule", {})
        r_sch = {
            "include_prep": _as_bool("schedule.include_prep", sch.get("include_prep", True)),
            "omega_pi_MHz2pi": _as_float("schedule.omega_pi_MHz2pi", sch.get("omega_pi_MHz2pi", 2.05), lo=0.0),
            "t_pi_us": _as_float("schedule.t_pi_us", sch.get("t_pi_us", 0.15), positive=True),
            "t_quench_us": _as_float("schedule.t_quench_us", sch.get("t_quench_us", 0.05), positive=True),
            "t_loc_us": _as_float("schedule.t_loc_us", sch.get("t_loc_us", 0.2), positive=True),
            "delta_loc_min_MHz2pi": _as_float(
                "schedule.delta_loc_min_MHz2pi", sch.get("delta_loc_min_MHz2pi", -7.5)
            ),
            "t_sim_us": _as_float("schedule.t_sim_us", sch.get("t_sim_us", 1.5), positive=True),
        }

        noi = doc.get("noise", {})
        channels = noi.get("channels", list(CHANNELS))
        _require(isinstance(channels, list), "noise.channels must be a list")
        for i, c in enumerate(channels):
            _as_choice(f"noise.channels[{i}]", c, CHANNELS)
        _require(len(set(channels)) == len(channels), "noise.channels has duplicates")
        r_noi = {
            "sigma_pos_um": _as_float("noise.sigma_pos_um", noi.get("sigma_pos_um", 0.1), lo=0.0),
            "rel_omega": _as_float("noise.rel_omega", noi.get("rel_omega", 0.02), lo=0.0),
            "abs_delta_glo_MHz2pi": _as_float(
                "noise.abs_delta_glo_MHz2pi", noi.get("abs_delta_glo_MHz2pi", 1.0), lo=0.0
            ),
            "rel_delta_loc": _as_float("noise.rel_delta_loc", noi.get("rel_delta_loc", 0.02), lo=0.0),
            "abs_h": _as_float("noise.abs_h", noi.get("abs_h", 0.1), lo=0.0),
            "scale": _as_float("noise.scale", noi.get("scale", 1.5), lo=0.0),
            "channels": channels,
        }

        exe = doc.get("execution", {})
        sample_times = exe.get("sample_times_us")
        if sample_times is not None:
            sample_times = _as_number_list("execution.sample_times_us", sample_times)
            _require(
                all(b > a for a, b in zip(sample_times, sample_times[1:])),
                "execution.sample_times_us must be strictly increasing",
            )
        start = exe.get("sample_start_us")
        stop = exe.get("sample_stop_us")
        r_exe = {
            "dt_us": _as_float("execution.dt_us", exe.get("dt_us", 0.001), positive=True),
            "sample_start_us": None if start is None else _as_float("execution.sample_start_us", start, lo=0.0),
            "sample_stop_us": None if stop is None else _as_float("execution.sample_stop_us", stop, lo=0.0),
            "sample_step_us": _as_float("execution.sample_step_us", exe.get("sample_step_us", 0.05), positive=True),
            "sample_times_us": sample_times,
            "n_realizations": _as_int("execution.n_realizations", exe.get("n_realizations", 1), lo=1),
            "threads": _as_int("execution.threads", exe.get("threads", 1), lo=1),
            "seed": _as_int("execution.seed", exe.get("seed", 0), lo=0),
            "max_qubits": _as_int("execution.max_qubits", exe.get("max_qubits", engine.MAX_QUBITS), lo=2),
            "n_shots": _as_int("execution.n_shots", exe.get("n_shots", 0), lo=0),
            "initial_state": _as_choice(
                "execution.initial_state", exe.get("initial_state", "auto"),
                ("auto", "ground", "neel"),
            ),
        }

        out = doc.get("output", {})
        d_max = out.get("d_max")
        margin = out.get("bulk_margin")
        r_out = {
            "dir": out.get("dir", "out"),
            "d_max": None if d_max is None else _as_int("output.d_max", d_max, lo=1),
            "bulk_margin": None if margin is None else _as_int("output.bulk_margin", margin, lo=0),
            "theta_c": _as_float("output.theta_c", out.get("theta_c", 0.01), positive=True),
            "dump_trajectory": _as_bool("output.dump_trajectory", out.get("dump_trajectory", False)),
            "dump_magnetization": _as_bool("output.dump_magnetization", out.get("dump_magnetization", False)),
            "dump_schedule": _as_bool("output.dump_schedule", out.get("dump_schedule", False)),
        }
        _require(isinstance(r_out["dir"], str) and r_out["dir"], "output.dir must be a nonempty string")

        return {
            "geometry": r_geo, "physics": r_phy, "schedule": r_sch,
            "noise": r_noi, "execution": r_exe, "output": r_out,
        }

    # -- builders ----------------------------------------------------------

    def __getitem__(self, block: str) -> dict:
        return self.resolved[block]

    def chain_model(self) -> ChainModel:
        g, p = self.resolved["geometry"], self.resolved["physics"]
        try:
            geometry = build_geometry(
                L=g["L"], spacing=g["a_um"], turns=tuple(g["turns"]),
                turn_angle_deg=g["turn_angle_deg"], boundary=g["boundary"],
            )
            return ChainModel(
                geometry=geometry,
                c6=from_mhz2pi(p["C6_MHz2pi_um6"]),
                hx=p["hx"],
                hz=p["hz"],
                one_parity=1 if p["h_one_parity"] == "odd" else 0,
                delta_glo_sign=+1 if p["delta_glo_sign"] == "+" else -1,
                h_pattern=None if p["h_pattern"] is None else np.asarray(p["h_pattern"]),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def build_schedule(self, model: ChainModel) -> PulseSchedule:
        s = self.resolved["schedule"]
        try:
            return build_protocol(
                model.rydberg(),
                include_prep=s["include_prep"],
                omega_pi=from_mhz2pi(s["omega_pi_MHz2pi"]),
                t_pi=s["t_pi_us"],
                t_quench=s["t_quench_us"],
                t_loc=s["t_loc_us"],
                delta_loc_min=from_mhz2pi(s["delta_loc_min_MHz2pi"]),
                t_sim=s["t_sim_us"],
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def noise_spec(self) -> NoiseSpec:
        n = self.resolved["noise"]
        return NoiseSpec(
            sigma_pos_um=n["sigma_pos_um"],
            rel_omega=n["rel_omega"],
            abs_delta_glo=from_mhz2pi(n["abs_delta_glo_MHz2pi"]),
            rel_delta_loc=n["rel_delta_loc"],
            abs_h=n["abs_h"],
            scale=n["scale"],
        )

    def initial_state(self, model: ChainModel) -> engine.StateVector:
        mode = self.resolved["execution"]["initial_state"]
        if mode == "auto":
            mode = "ground" if self.resolved["schedule"]["include_prep"] else "neel"
        if mode == "ground":
            return engine.ground_state(model.L)
        return engine.init_basis_state(
            model.L, engine.neel_bits(model.L, excited_parity=model.plus_parity)
        )

    def sample_times(self, schedule: PulseSchedule) -> np.ndarray:
        exe = self.resolved["execution"]
        if exe["sample_times_us"] is not None:
            ts = np.asarray(exe["sample_times_us"], dtype=float)
        else:
            t1 = schedule.stage_marks[0] if schedule.stage_marks else 0.0
            start = exe["sample_start_us"] if exe["sample_start_us"] is not None else t1
            stop = exe["sample_stop_us"] if exe["sample_stop_us"] is not None else schedule.t_end
            step = exe["sample_step_us"]
            _require(stop >= start, f"sample window is empty: [{start}, {stop}]")
            n = int(math.floor((stop - start) / step + 1e-9))
            ts = start + step * np.arange(n + 1)
        _require(
            ts[0] >= -1e-12 and ts[-1] <= schedule.t_end + 1e-9,
            f"sample times [{ts[0]}, {ts[-1]}] fall outside the schedule [0, {schedule.t_end}]",
        )
        return np.minimum(ts, schedule.t_end)

    def bulk_margin(self) -> int:
        g, out = self.resolved["geometry"], self.resolved["output"]
        if out["bulk_margin"] is not None:
            return out["bulk_margin"]
        if g["boundary"] == "ring":
            return 0
        return min(2, (g["L"] - 2) // 2)

    def d_max(self) -> int:
        g, out = self.resolved["geometry"], self.resolved["output"]
        cap = max_distance(g["L"], self.bulk_margin(), g["boundary"])
        _require(cap >= 1, "no bulk pairs remain; reduce bulk_margin or grow L")
        if out["d_max"] is not None:
            _require(out["d_max"] <= cap, f"output.d_max exceeds the largest bulk distance {cap}")
            return out["d_max"]
        return cap

    def effective_threads(self) -> int:
        env = os.environ.get(ENV_THREADS)
        if env is not None:
            try:
                val = int(env)
            except ValueError:
                raise ConfigError(f"{ENV_THREADS} must be an integer, got {env!r}") from None
            _require(val >= 1, f"{ENV_THREADS} must be >= 1, got {val}")
            return val
        return self.resolved["execution"]["threads"]


def load_config(path: str) -> RunConfig:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return RunConfig(doc)
