import json

import numpy as np
import pytest

from confine_sim.model import ChainModel, alternating_h_pattern, build_geometry
from confine_sim.schedule import (
    DELTA_LOC_MIN_DEFAULT,
    OMEGA_PI_DEFAULT,
    PulseSchedule,
    ScheduleError,
    Waveform,
    build_prep_schedule,
    build_protocol,
    build_sim_schedule,
    concat,
)
from confine_sim.units import TWO_PI, from_mhz2pi


def ryd_defaults(hz=0.04):
    return ChainModel(build_geometry(8), hx=0.25, hz=hz).rydberg()


class TestWaveform:
    def test_interpolates_linearly(self):
        w = Waveform((0.0, 1.0, 2.0), (0.0, 2.0, 2.0))
        assert w(0.5) == pytest.approx(1.0)
        assert w(1.7) == pytest.approx(2.0)

    def test_domain_enforced(self):
        w = Waveform((0.0, 1.0), (0.0, 1.0))
        with pytest.raises(ScheduleError):
            w(1.0 + 1e-6)
        with pytest.raises(ScheduleError):
            w(-1e-6)

    def test_must_start_at_zero_and_increase(self):
        with pytest.raises(ScheduleError):
            Waveform((0.1, 1.0), (0.0, 0.0))
        with pytest.raises(ScheduleError):
            Waveform((0.0, 1.0, 1.0), (0.0, 0.0, 0.0))

    def test_integral_trapezoid(self):
        w = Waveform((0.0, 1.0, 3.0), (0.0, 2.0, 2.0))
        assert w.integral() == pytest.approx(1.0 + 4.0)

    def test_min_segment(self):
        w = Waveform((0.0, 0.05, 1.0), (0.0, 1.0, 1.0))
        assert w.min_segment() == pytest.approx(0.05)


class TestPrepStage:
    def test_total_duration(self):
        prep = build_prep_schedule(alternating_h_pattern(8))
        # 0.2 ramp + 0.05 + 0.15 pulse + 0.05 + 0.2 ramp
        assert prep.t_end == pytest.approx(0.65)
        assert prep.t_prep == pytest.approx(0.65)

    def test_pulse_area_is_082_pi(self):
        prep = build_prep_schedule(alternating_h_pattern(8))
        area = prep.omega.integral()
        assert area == pytest.approx(2.05 * TWO_PI * 0.2, rel=1e-12)
        # flat-top pi pulse of the same width would need 2.5 MHz x 2pi
        assert area == pytest.approx(0.82 * np.pi, rel=1e-12)

    def test_omega_zero_outside_pulse(self):
        prep = build_prep_schedule(alternating_h_pattern(8))
        assert prep.omega(0.0) == 0.0
        assert prep.omega(0.2) == 0.0
        assert prep.omega(0.325) == pytest.approx(OMEGA_PI_DEFAULT)
        assert prep.omega(0.45) == 0.0
        assert prep.omega(0.65) == 0.0

    def test_local_detuning_holds_through_pulse(self):
        prep = build_prep_schedule(alternating_h_pattern(8))
        assert prep.delta_loc(0.0) == 0.0
        for t in (0.2, 0.325, 0.45):
            assert prep.delta_loc(t) == pytest.approx(DELTA_LOC_MIN_DEFAULT)
        assert prep.delta_loc(0.65) == 0.0

    def test_global_detuning_stays_zero(self):
        prep = build_prep_schedule(alternating_h_pattern(8))
        for t in np.linspace(0.0, 0.65, 14):
            assert prep.delta_glo(t) == 0.0


class TestSimStage:
    def test_ramp_then_hold(self):
        ryd = ryd_defaults()
        sim = build_sim_schedule(ryd)
        assert sim.t_end == pytest.approx(1.6)
        assert sim.omega(0.0) == 0.0
        assert sim.omega(0.05) == pytest.approx(ryd.omega)
        assert sim.omega(1.0) == pytest.approx(ryd.omega)
        assert sim.delta_glo(0.025) == pytest.approx(ryd.delta_glo / 2.0)
        assert sim.delta_loc(1.55) == pytest.approx(ryd.delta_loc)
        assert sim.omega(1.6) == 0.0

    def test_zero_quench_time_rejected(self):
        with pytest.raises(ScheduleError):
            build_sim_schedule(ryd_defaults(), t_quench=0.0)


class TestConcat:
    def test_protocol_marks_and_duration(self):
        ryd = ryd_defaults()
        full = build_protocol(ryd)
        assert full.t_prep == pytest.approx(0.65)
        assert full.stage_marks == pytest.approx((0.65, 2.25))
        assert full.t_end == pytest.approx(2.25)

    def test_junction_values_continuous(self):
        full = build_protocol(ryd_defaults())
        assert full.omega(0.65) == 0.0
        assert full.delta_glo(0.65) == 0.0
        # just after the junction the quench ramp has begun
        assert full.delta_glo(0.675) == pytest.approx(ryd_defaults().delta_glo / 2.0)

    def test_sim_only_protocol(self):
        ryd = ryd_defaults()
        sched = build_protocol(ryd, include_prep=False)
        assert sched.t_prep is None
        assert sched.stage_marks == pytest.approx((0.0, 1.6))
        assert sched.omega(0.05) == pytest.approx(ryd.omega)

    def test_discontinuous_junction_rejected(self):
        a = PulseSchedule(
            Waveform((0.0, 1.0), (0.0, 1.0)),
            Waveform((0.0, 1.0), (0.0, 0.0)),
            Waveform((0.0, 1.0), (0.0, 0.0)),
            h_pattern=alternating_h_pattern(4),
        )
        b = PulseSchedule(
            Waveform((0.0, 1.0), (0.5, 0.5)),
            Waveform((0.0, 1.0), (0.0, 0.0)),
            Waveform((0.0, 1.0), (0.0, 0.0)),
            h_pattern=alternating_h_pattern(4),
        )
        with pytest.raises(ScheduleError, match="continuous"):
            concat(a, b)

    def test_mismatched_patterns_rejected(self):
        a = build_prep_schedule(alternating_h_pattern(4))
        b = build_sim_schedule(ryd_defaults())
        with pytest.raises(ScheduleError, match="h-pattern"):
            concat(a, b)


class TestSerialization:
    def test_json_round_trip_is_byte_stable(self):
        full = build_protocol(ryd_defaults())
        text = full.to_json()
        again = PulseSchedule.from_json_doc(json.loads(text))
        assert again.to_json() == text
        assert again.t_prep == full.t_prep
        assert again.stage_marks == full.stage_marks

    def test_json_doc_rejects_unknown_keys(self):
        doc = json.loads(build_protocol(ryd_defaults()).to_json())
        doc["extra"] = 1
        with pytest.raises(ScheduleError, match="unknown"):
            PulseSchedule.from_json_doc(doc)

    def test_csv_grid_and_header(self):
        full = build_protocol(ryd_defaults())
        lines = full.to_csv(dt=0.05).splitlines()
        assert lines[0] == "t_us,omega_MHz2pi,delta_glo_MHz2pi,delta_loc_MHz2pi"
        assert len(lines) == 1 + 46  # 2.25 / 0.05 + 1 rows
        first = lines[1].split(",")
        assert float(first[0]) == 0.0 and float(first[1]) == 0.0

    def test_csv_reports_values_in_mhz2pi(self):
        sim = build_sim_schedule(ryd_defaults(hz=0.0))
        row = dict(
            zip(
                sim.to_csv(dt=0.05).splitlines()[0].split(","),
                sim.to_csv(dt=0.05).splitlines()[2].split(","),
            )
        )
        assert float(row["omega_MHz2pi"]) == pytest.approx(2.3125)
        assert float(row["delta_glo_MHz2pi"]) == pytest.approx(18.5)


class TestScheduleQueries:
    def test_min_segment_default_protocol(self):
        full = build_protocol(ryd_defaults())
        assert full.min_segment() == pytest.approx(0.05)

    def test_sample_triple(self):
        full = build_protocol(ryd_defaults(hz=0.0))
        om, dg, dl = full.sample(1.0)
        assert om == pytest.approx(from_mhz2pi(2.3125))
        assert dg == pytest.approx(from_mhz2pi(18.5))
        assert dl == 0.0
