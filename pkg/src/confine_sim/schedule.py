"""Piecewise-linear pulse schedules: state preparation and quench stages.

A schedule bundles three control waveforms (Omega, Delta_glo, Delta_loc, all
rad/us on a common time axis in us) with the static local-detuning weight
pattern. The default protocol is

  prep:  ramp Delta_loc to its (negative) minimum over t_loc, apply an Omega
         pulse (ramp t_quench, flat t_pi, ramp t_quench) while Delta_loc is
         held, ramp Delta_loc back over t_loc; Delta_glo stays zero,
  sim:   ramp all controls to their hold values over t_quench, hold for
         t_sim, ramp everything back to zero over t_quench.

Stage marks record t1 (prep -> sim handoff, the quench origin used by the
front analysis) and t2 (schedule end).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .model import RydbergParams
from .units import from_mhz2pi, to_mhz2pi

#: Default preparation pulse values (rad/us and us).
OMEGA_PI_DEFAULT = from_mhz2pi(2.05)
T_PI_DEFAULT = 0.15
T_QUENCH_DEFAULT = 0.05
T_LOC_DEFAULT = 0.2
DELTA_LOC_MIN_DEFAULT = from_mhz2pi(-7.5)
T_SIM_DEFAULT = 1.5

_TIME_TOL = 1e-9


class ScheduleError(ValueError):
    """Raised for malformed waveforms or out-of-domain sampling."""


@dataclass(frozen=True)
class Waveform:
    """Piecewise-linear control curve: breakpoints (times us, values rad/us).

    Times must be strictly increasing and start at 0 (fragments use local
    time). Evaluation outside the domain is an error, not an extrapolation.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.size < 2 or v.shape != t.shape:
            raise ScheduleError(
                f"need matching 1-d breakpoint arrays with >= 2 points, got {t.shape}/{v.shape}"
            )
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(v))):
            raise ScheduleError("non-finite breakpoint")
        if abs(t[0]) > _TIME_TOL:
            raise ScheduleError(f"first breakpoint must sit at t=0, got {t[0]}")
        if np.any(np.diff(t) <= 0):
            raise ScheduleError("breakpoint times must be strictly increasing")
        t = t.copy()
        t[0] = 0.0
        v = v.copy()
        t.flags.writeable = False
        v.flags.writeable = False
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    @property
    def t_end(self) -> float:
        return float(self.times[-1])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < -_TIME_TOL) or np.any(t_arr > self.t_end + _TIME_TOL):
            raise ScheduleError(
                f"sample time outside waveform domain [0, {self.t_end}]"
            )
        out = np.interp(np.clip(t_arr, 0.0, self.t_end), self.times, self.values)
        return float(out) if np.isscalar(t) else out

    def integral(self) -> float:
        """Exact area under the curve (trapezoid on the breakpoints)."""
        return float(np.trapezoid(self.values, self.times))

    def min_segment(self) -> float:
        return float(np.min(np.diff(self.times)))


def _ramp_hold_ramp(t_ramp: float, t_hold: float, value: float) -> Waveform:
    return Waveform(
        np.array([0.0, t_ramp, t_ramp + t_hold, 2 * t_ramp + t_hold]),
        np.array([0.0, value, value, 0.0]),
    )


@dataclass(frozen=True)
class PulseSchedule:
    """Three control waveforms on a shared clock plus the h-pattern.

    ``t_prep`` marks the end of the preparation stage when one is present;
    ``stage_marks`` is (t1, t2) with t1 the quench origin and t2 the end.
    """

    omega: Waveform
    delta_glo: Waveform
    delta_loc: Waveform
    h_pattern: np.ndarray
    t_prep: float | None = None
    stage_marks: tuple[float, float] | None = None

    def __post_init__(self):
        ends = {round(w.t_end, 12) for w in (self.omega, self.delta_glo, self.delta_loc)}
        if len(ends) != 1:
            raise ScheduleError(f"waveforms end at different times: {sorted(ends)}")
        h = np.asarray(self.h_pattern, dtype=float).copy()
        if h.ndim != 1 or h.size < 2:
            raise ScheduleError("h_pattern must be a 1-d array of L >= 2 weights")
        if np.any((h < 0.0) | (h > 1.0)):
            raise ScheduleError("h_pattern entries must lie in [0, 1]")
        h.flags.writeable = False
        object.__setattr__(self, "h_pattern", h)
        if self.stage_marks is not None:
            t1, t2 = self.stage_marks
            if not (-_TIME_TOL <= t1 <= t2 <= self.t_end + _TIME_TOL):
                raise ScheduleError(f"stage marks {self.stage_marks} outside [0, {self.t_end}]")
            object.__setattr__(self, "stage_marks", (float(t1), float(t2)))

    @property
    def L(self) -> int:
        return self.h_pattern.size

    @property
    def t_end(self) -> float:
        return self.omega.t_end

    def sample(self, t):
        """Control triple (Omega, Delta_glo, Delta_loc) at time(s) t."""
        return self.omega(t), self.delta_glo(t), self.delta_loc(t)

    def min_segment(self) -> float:
        return min(w.min_segment() for w in (self.omega, self.delta_glo, self.delta_loc))

    def to_json_doc(self) -> dict:
        def wf_doc(w: Waveform) -> dict:
            return {
                "t_us": [float(x) for x in w.times],
                "v_MHz2pi": [float(x) for x in to_mhz2pi(w.values)],
            }

        return {
            "h_pattern": [float(x) for x in self.h_pattern],
            "t_prep_us": self.t_prep,
            "stage_marks_us": list(self.stage_marks) if self.stage_marks else None,
            "waveforms": {
                "omega": wf_doc(self.omega),
                "delta_glo": wf_doc(self.delta_glo),
                "delta_loc": wf_doc(self.delta_loc),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_doc(), sort_keys=True, indent=2) + "\n"

    @classmethod
    def from_json_doc(cls, doc: dict) -> "PulseSchedule":
        unknown = set(doc) - {"h_pattern", "t_prep_us", "stage_marks_us", "waveforms"}
        if unknown:
            raise ScheduleError(f"unknown schedule keys: {sorted(unknown)}")
        wfs = {}
        for name in ("omega", "delta_glo", "delta_loc"):
            try:
                spec = doc["waveforms"][name]
            except KeyError as exc:
                raise ScheduleError(f"missing waveform {name!r}") from exc
            wfs[name] = Waveform(
                np.asarray(spec["t_us"], dtype=float),
                from_mhz2pi(np.asarray(spec["v_MHz2pi"], dtype=float)),
            )
        marks = doc.get("stage_marks_us")
        return cls(
            omega=wfs["omega"],
            delta_glo=wfs["delta_glo"],
            delta_loc=wfs["delta_loc"],
            h_pattern=np.asarray(doc["h_pattern"], dtype=float),
            t_prep=doc.get("t_prep_us"),
            stage_marks=None if marks is None else (float(marks[0]), float(marks[1])),
        )

    @classmethod
    def from_json(cls, text: str) -> "PulseSchedule":
        return cls.from_json_doc(json.loads(text))

    def to_csv(self, dt: float = 0.005) -> str:
        """Uniform-grid sampling for plotting, frequencies in MHz_2pi."""
        if dt <= 0:
            raise ScheduleError(f"csv sampling step must be positive, got {dt}")
        n = int(round(self.t_end / dt))
        grid = np.minimum(np.arange(n + 1) * dt, self.t_end)
        lines = ["t_us,omega_MHz2pi,delta_glo_MHz2pi,delta_loc_MHz2pi"]
        om, dg, dl = (to_mhz2pi(w(grid)) for w in (self.omega, self.delta_glo, self.delta_loc))
        for i, t in enumerate(grid):
            lines.append(f"{float(t)!r},{float(om[i])!r},{float(dg[i])!r},{float(dl[i])!r}")
        return "\n".join(lines) + "\n"


def build_prep_schedule(
    h_pattern: np.ndarray,
    omega_pi: float = OMEGA_PI_DEFAULT,
    t_pi: float = T_PI_DEFAULT,
    t_quench: float = T_QUENCH_DEFAULT,
    t_loc: float = T_LOC_DEFAULT,
    delta_loc_min: float = DELTA_LOC_MIN_DEFAULT,
) -> PulseSchedule:
    """Preparation fragment: local-detuning window holding an Omega pulse.

    Delta_loc ramps 0 -> delta_loc_min over t_loc, is held for the whole
    Omega pulse (ramp t_quench, flat t_pi, ramp t_quench), then ramps back
    over t_loc. Delta_glo stays zero. Total length 2 t_loc + 2 t_quench + t_pi.
    """
    for name, val in (("t_pi", t_pi), ("t_quench", t_quench), ("t_loc", t_loc)):
        if val <= 0:
            raise ScheduleError(f"{name} must be positive, got {val}")
    if omega_pi < 0:
        raise ScheduleError(f"omega_pi must be >= 0, got {omega_pi}")
    t_pulse = 2 * t_quench + t_pi
    t_prep = 2 * t_loc + t_pulse
    omega = Waveform(
        np.array([0.0, t_loc, t_loc + t_quench, t_loc + t_quench + t_pi,
                  t_loc + t_pulse, t_prep]),
        np.array([0.0, 0.0, omega_pi, omega_pi, 0.0, 0.0]),
    )
    delta_glo = Waveform(np.array([0.0, t_prep]), np.array([0.0, 0.0]))
    delta_loc = Waveform(
        np.array([0.0, t_loc, t_loc + t_pulse, t_prep]),
        np.array([0.0, delta_loc_min, delta_loc_min, 0.0]),
    )
    return PulseSchedule(omega, delta_glo, delta_loc, h_pattern, t_prep=t_prep)


def build_sim_schedule(
    ryd: RydbergParams,
    t_quench: float = T_QUENCH_DEFAULT,
    t_sim: float = T_SIM_DEFAULT,
) -> PulseSchedule:
    """Quench fragment: ramp to the hold triple, hold t_sim, ramp to zero."""
    if t_quench <= 0 or t_sim <= 0:
        raise ScheduleError(f"t_quench and t_sim must be positive, got {t_quench}, {t_sim}")
    return PulseSchedule(
        omega=_ramp_hold_ramp(t_quench, t_sim, ryd.omega),
        delta_glo=_ramp_hold_ramp(t_quench, t_sim, ryd.delta_glo),
        delta_loc=_ramp_hold_ramp(t_quench, t_sim, ryd.delta_loc),
        h_pattern=ryd.h_pattern,
    )


def _concat_waveforms(a: Waveform, b: Waveform) -> Waveform:
    scale = max(1.0, float(np.max(np.abs(a.values))), float(np.max(np.abs(b.values))))
    if abs(a.values[-1] - b.values[0]) > 1e-12 * scale:
        raise ScheduleError(
            f"waveform junction is discontinuous: {a.values[-1]} != {b.values[0]}"
        )
    return Waveform(
        np.concatenate([a.times, a.t_end + b.times[1:]]),
        np.concatenate([a.values, b.values[1:]]),
    )


def concat(prep: PulseSchedule, sim: PulseSchedule) -> PulseSchedule:
    """Join two fragments; values must be continuous across the junction.

    The result carries stage marks (t1 = end of ``prep``, t2 = total end).
    """
    if prep.L != sim.L or not np.array_equal(prep.h_pattern, sim.h_pattern):
        raise ScheduleError("fragments carry different h-patterns")
    t1 = prep.t_end
    return PulseSchedule(
        omega=_concat_waveforms(prep.omega, sim.omega),
        delta_glo=_concat_waveforms(prep.delta_glo, sim.delta_glo),
        delta_loc=_concat_waveforms(prep.delta_loc, sim.delta_loc),
        h_pattern=prep.h_pattern,
        t_prep=prep.t_prep if prep.t_prep is not None else t1,
        stage_marks=(t1, t1 + sim.t_end),
    )


def as_full(fragment: PulseSchedule) -> PulseSchedule:
    """Promote a lone sim fragment to a full schedule with t1 = 0."""
    return replace(fragment, stage_marks=(0.0, fragment.t_end))


def build_protocol(
    ryd: RydbergParams,
    include_prep: bool = True,
    omega_pi: float = OMEGA_PI_DEFAULT,
    t_pi: float = T_PI_DEFAULT,
    t_quench: float = T_QUENCH_DEFAULT,
    t_loc: float = T_LOC_DEFAULT,
    delta_loc_min: float = DELTA_LOC_MIN_DEFAULT,
    t_sim: float = T_SIM_DEFAULT,
) -> PulseSchedule:
    """Full default protocol (prep + sim), or the bare quench when
    ``include_prep`` is false (the run then starts from an explicit product
    state instead of the prep pulse)."""
    sim = build_sim_schedule(ryd, t_quench=t_quench, t_sim=t_sim)
    if not include_prep:
        return as_full(sim)
    prep = build_prep_schedule(
        ryd.h_pattern, omega_pi=omega_pi, t_pi=t_pi, t_quench=t_quench,
        t_loc=t_loc, delta_loc_min=delta_loc_min,
    )
    return concat(prep, sim)
