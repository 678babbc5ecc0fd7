import numpy as np
import pytest
from scipy.linalg import expm

from confine_sim.analysis import connected_correlations
from confine_sim.engine import (
    CapacityError,
    EvolutionError,
    SiteModifiers,
    StateVector,
    build_terms,
    diag_energies,
    evolve,
    evolve_ising_frame,
    exact_evolve_oracle,
    expectation_energy,
    expectation_z,
    expectation_zz,
    fidelity,
    ground_state,
    init_basis_state,
    magnetization_series,
    magnetizations,
    neel_bits,
    sample_shots,
    save_trajectory,
    trotter_step,
    zz_matrix,
)
from confine_sim.model import (
    ChainModel,
    CouplingMatrix,
    alternating_h_pattern,
    build_geometry,
    vdw_couplings,
)
from confine_sim.schedule import PulseSchedule, Waveform, build_protocol

SX = np.array([[0.0, 1.0], [1.0, 0.0]])
ID2 = np.eye(2)


def site_x(L, i):
    out = np.array([[1.0]])
    for k in range(L):
        out = np.kron(SX if k == i else ID2, out)
    return out


def dense_hamiltonian(terms):
    h = np.diag(diag_energies(terms)).astype(complex)
    for i in range(terms.L):
        h += terms.x[i] * site_x(terms.L, i)
    return h


def constant_schedule(L, omega, delta_glo, delta_loc, t_end=0.5):
    flat = lambda v: Waveform((0.0, t_end), (v, v))
    return PulseSchedule(
        flat(omega), flat(delta_glo), flat(delta_loc), alternating_h_pattern(L)
    )


def random_state(L, seed):
    rng = np.random.default_rng(seed)
    amps = rng.standard_normal(1 << L) + 1j * rng.standard_normal(1 << L)
    return StateVector(amps / np.linalg.norm(amps), L)


class TestStates:
    def test_basis_index_is_little_endian(self):
        s = init_basis_state(3, "100")  # site 0 excited
        assert s.amps[0b001] == 1.0
        s = init_basis_state(3, "001")  # site 2 excited
        assert s.amps[0b100] == 1.0

    def test_neel_bits(self):
        assert neel_bits(6) == "101010"
        assert neel_bits(6, excited_parity=1) == "010101"
        with pytest.raises(ValueError):
            neel_bits(6, excited_parity=2)

    def test_ground_state(self):
        g = ground_state(4)
        assert g.amps[0] == 1.0 and g.norm() == 1.0

    def test_bad_bits_rejected(self):
        with pytest.raises(ValueError):
            init_basis_state(3, "10")
        with pytest.raises(ValueError):
            init_basis_state(3, [0, 1, 2])

    def test_state_vector_shape_check(self):
        with pytest.raises(ValueError):
            StateVector(np.zeros(7, dtype=complex), 3)


class TestTrotterStep:
    def test_x_only_step_is_exact(self):
        L = 3
        geo = build_geometry(L, spacing=60.0)
        cpl = CouplingMatrix(np.zeros((L, L)))
        terms = build_terms(geo, cpl, (1.3, 0.0, 0.0), np.zeros(L))
        psi = random_state(L, 0)
        expect = expm(-1j * 0.2 * dense_hamiltonian(terms)) @ psi.amps
        got = trotter_step(psi.copy(), terms, 0.2)
        assert np.max(np.abs(got.amps - expect)) < 1e-12

    def test_diagonal_only_step_is_exact(self):
        L = 4
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        terms = build_terms(geo, cpl, (0.0, 7.0, -2.0), alternating_h_pattern(L))
        psi = random_state(L, 1)
        expect = expm(-1j * 0.05 * dense_hamiltonian(terms)) @ psi.amps
        got = trotter_step(psi.copy(), terms, 0.05)
        assert np.max(np.abs(got.amps - expect)) < 1e-11

    def test_local_error_is_third_order(self):
        L = 4
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        terms = build_terms(
            geo, cpl, (14.5, 116.0, -4.6), alternating_h_pattern(L)
        )
        ham = dense_hamiltonian(terms)
        psi = random_state(L, 2)
        errs = []
        for h in (2e-3, 1e-3):
            expect = expm(-1j * h * ham) @ psi.amps
            got = trotter_step(psi.copy(), terms, h)
            errs.append(np.linalg.norm(got.amps - expect))
        ratio = errs[0] / errs[1]
        assert 7.0 < ratio < 9.0  # local error ~ h^3 halves to 1/8


class TestEvolveGuards:
    def setup_method(self):
        self.L = 4
        self.geo = build_geometry(self.L)
        self.cpl = vdw_couplings(self.geo, c6=18.5 * 6**6 * 2 * np.pi)
        self.sched = constant_schedule(self.L, 10.0, 50.0, -5.0)

    def run(self, **kw):
        args = dict(
            state=ground_state(self.L), schedule=self.sched, geometry=self.geo,
            couplings=self.cpl, dt=1e-3, sample_times=[0.1],
        )
        args.update(kw)
        return evolve(**args)

    def test_dt_positive(self):
        with pytest.raises(EvolutionError, match="positive"):
            self.run(dt=0.0)

    def test_dt_must_resolve_segments(self):
        prot = build_protocol(ChainModel(build_geometry(4), hx=0.25).rydberg())
        with pytest.raises(EvolutionError, match="segment"):
            evolve(ground_state(4), prot, self.geo, self.cpl, dt=0.1,
                   sample_times=[0.5])

    def test_sample_times_increasing(self):
        with pytest.raises(EvolutionError, match="increasing"):
            self.run(sample_times=[0.1, 0.1])

    def test_sample_times_in_domain(self):
        with pytest.raises(EvolutionError, match="within"):
            self.run(sample_times=[0.6])

    def test_empty_sample_times(self):
        with pytest.raises(EvolutionError, match="at least one"):
            self.run(sample_times=[])

    def test_capacity_guard(self):
        with pytest.raises(CapacityError):
            self.run(max_qubits=3)

    def test_size_mismatch(self):
        with pytest.raises(EvolutionError, match="disagree"):
            self.run(state=ground_state(5))

    def test_input_state_not_mutated(self):
        psi = ground_state(self.L)
        before = psi.amps.copy()
        self.run(state=psi)
        assert np.array_equal(psi.amps, before)

    def test_t0_snapshot_is_initial_state(self):
        res = self.run(sample_times=[0.0, 0.1])
        assert np.array_equal(res.states[0].amps, ground_state(self.L).amps)


class TestEvolveAccuracy:
    def test_matches_dense_propagator_on_ramp(self):
        # piecewise-linear controls, dense midpoint propagator on the same grid
        L = 4
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        h_pat = alternating_h_pattern(L)
        t_end = 0.1
        sched = PulseSchedule(
            Waveform((0.0, t_end), (0.0, 12.0)),
            Waveform((0.0, t_end), (30.0, 80.0)),
            Waveform((0.0, t_end), (0.0, -9.0)),
            h_pat,
        )
        dt = 1e-3
        res = evolve(ground_state(L), sched, geo, cpl, dt, [t_end])
        amps = ground_state(L).amps
        n = 100
        h = t_end / n
        for k in range(n):
            tm = (k + 0.5) * h
            terms = build_terms(geo, cpl, sched.sample(tm), h_pat)
            # same splitting as the engine, built densely
            e = diag_energies(terms)
            half = np.exp(-0.5j * h * e)
            xs = expm(-1j * h * sum(terms.x[i] * site_x(L, i) for i in range(L)))
            amps = half * (xs @ (half * amps))
        assert np.max(np.abs(res.final.amps - amps)) < 1e-12

    def test_oracle_matches_dense_exponential(self):
        L = 5
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        h_pat = alternating_h_pattern(L)
        t_end = 0.05
        sched = PulseSchedule(
            Waveform((0.0, t_end), (5.0, 15.0)),
            Waveform((0.0, t_end), (40.0, 40.0)),
            Waveform((0.0, t_end), (0.0, -4.0)),
            h_pat,
        )
        dt = 5e-3
        res = exact_evolve_oracle(ground_state(L), sched, geo, cpl, dt, [t_end])
        amps = ground_state(L).amps
        n = 10
        h = t_end / n
        for k in range(n):
            tm = (k + 0.5) * h
            terms = build_terms(geo, cpl, sched.sample(tm), h_pat)
            amps = expm(-1j * h * dense_hamiltonian(terms)) @ amps
        assert np.max(np.abs(res.final.amps - amps)) < 1e-9

    def test_trotter_approaches_oracle(self):
        L = 6
        model = ChainModel(build_geometry(L), hx=0.25, hz=0.04)
        sched = build_protocol(model.rydberg(), include_prep=False, t_sim=0.3)
        geo, cpl = model.geometry, model.couplings()
        psi = init_basis_state(L, neel_bits(L, model.plus_parity))
        ts = [0.2, 0.4]
        exact = exact_evolve_oracle(psi, sched, geo, cpl, 1e-3, ts)
        trot = evolve(psi, sched, geo, cpl, 1e-3, ts)
        for a, b in zip(exact.states, trot.states):
            assert 1.0 - fidelity(a, b) < 1e-7

    def test_oracle_capacity_cap_is_tighter(self):
        L = 13
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        sched = constant_schedule(L, 1.0, 0.0, 0.0)
        with pytest.raises(CapacityError):
            exact_evolve_oracle(ground_state(L), sched, geo, cpl, 1e-3, [0.1])

    def test_hold_conserves_energy(self):
        L = 6
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        h_pat = alternating_h_pattern(L)
        sched = constant_schedule(L, 14.5, 116.0, -4.6, t_end=0.5)
        psi = init_basis_state(L, neel_bits(L, 0))
        res = evolve(psi, sched, geo, cpl, 1e-3, [0.25, 0.5])
        terms = build_terms(geo, cpl, sched.sample(0.0), h_pat)
        e0 = expectation_energy(psi, terms)
        scale = max(1.0, abs(e0))
        for s in res.states:
            assert abs(expectation_energy(s, terms) - e0) / scale < 1e-4

    def test_modifiers_shift_diagonal(self):
        # a uniform delta_glo offset must act exactly like shifting the waveform
        L = 4
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        off = 3.0
        base = constant_schedule(L, 8.0, 50.0 + off, -5.0)
        shifted = constant_schedule(L, 8.0, 50.0, -5.0)
        a = evolve(ground_state(L), base, geo, cpl, 1e-3, [0.3])
        mods = SiteModifiers(delta_glo_offsets=np.full(L, off))
        b = evolve(ground_state(L), shifted, geo, cpl, 1e-3, [0.3], modifiers=mods)
        assert np.max(np.abs(a.final.amps - b.final.amps)) < 1e-10


class TestFrameEquivalence:
    def test_ring_nn_correlations_agree(self):
        L = 6
        geo = build_geometry(L, boundary="ring")
        model = ChainModel(geo, hx=0.25, hz=0.1)
        cpl = model.couplings(truncation="nearest_neighbor")
        sched = build_protocol(model.rydberg(), include_prep=False, t_sim=0.4)
        ts = [0.15, 0.45]
        ryd = evolve(
            init_basis_state(L, neel_bits(L, model.plus_parity)),
            sched, geo, cpl, 1e-3, ts,
        )
        # the sublattice rotation sends the Neel state to the fully
        # polarized (all-excited) ferromagnetic product state
        isg = evolve_ising_frame(
            init_basis_state(L, "1" * L), sched, model.u_nn, boundary="ring",
            plus_parity=model.plus_parity, dt=1e-3, sample_times=ts,
        )
        for a, b in zip(ryd.states, isg.states):
            ca = connected_correlations(a, d_max=3, bulk_margin=0, boundary="ring")
            cb = connected_correlations(b, d_max=3, bulk_margin=0, boundary="ring")
            stag = np.array([(-1.0) ** d for d in (1, 2, 3)])
            assert np.max(np.abs(ca * stag - cb)) < 1e-8


class TestObservables:
    def test_basis_state_expectations(self):
        s = init_basis_state(4, "0110")
        assert expectation_z(s, 0) == pytest.approx(-1.0)
        assert expectation_z(s, 1) == pytest.approx(1.0)
        assert expectation_zz(s, 1, 2) == pytest.approx(1.0)
        assert expectation_zz(s, 0, 1) == pytest.approx(-1.0)

    def test_matrix_helpers_match_scalars(self):
        s = random_state(5, 9)
        m = magnetizations(s)
        g = zz_matrix(s)
        for i in range(5):
            assert m[i] == pytest.approx(expectation_z(s, i), abs=1e-12)
            for j in range(i + 1, 5):
                assert g[i, j] == pytest.approx(expectation_zz(s, i, j), abs=1e-12)
        assert np.allclose(np.diag(g), 1.0)

    def test_magnetization_series_shape(self):
        L = 4
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        res = evolve(ground_state(L), constant_schedule(L, 5.0, 0.0, 0.0),
                     geo, cpl, 1e-3, [0.1, 0.2, 0.3])
        assert magnetization_series(res).shape == (3, L)


class TestShots:
    def test_reproducible_with_seed(self):
        s = random_state(5, 3)
        a = sample_shots(s, 100, seed=42)
        b = sample_shots(s, 100, seed=42)
        assert np.array_equal(a, b)
        assert a.shape == (100, 5) and a.dtype == np.uint8

    def test_moments_converge(self):
        s = random_state(4, 8)
        shots = sample_shots(s, 40000, seed=0)
        m_emp = 2.0 * shots.mean(axis=0) - 1.0
        m_exact = magnetizations(s)
        # binomial sem <= 1/sqrt(n) per site; allow 5 sigma
        assert np.max(np.abs(m_emp - m_exact)) < 5.0 / np.sqrt(40000)

    def test_generator_continuation_differs(self):
        s = random_state(4, 8)
        rng = np.random.default_rng(1)
        a = sample_shots(s, 50, seed=rng)
        b = sample_shots(s, 50, seed=rng)
        assert not np.array_equal(a, b)

    def test_rejects_zero_shots(self):
        with pytest.raises(ValueError):
            sample_shots(random_state(3, 0), 0, seed=1)


class TestDeterminism:
    def test_thread_count_does_not_change_output(self):
        L = 8
        model = ChainModel(build_geometry(L), hx=0.25, hz=0.04)
        sched = build_protocol(model.rydberg(), include_prep=False, t_sim=0.2)
        psi = init_basis_state(L, neel_bits(L, model.plus_parity))
        ref = evolve(psi, sched, model.geometry, model.couplings(), 1e-3,
                     [0.3], num_threads=1)
        for nt in (2, 4):
            res = evolve(psi, sched, model.geometry, model.couplings(), 1e-3,
                         [0.3], num_threads=nt)
            assert np.array_equal(ref.final.amps, res.final.amps)


class TestTrajectoryIO:
    def test_npz_round_trip(self, tmp_path):
        L = 3
        geo = build_geometry(L)
        cpl = vdw_couplings(geo, c6=18.5 * 6**6 * 2 * np.pi)
        res = evolve(ground_state(L), constant_schedule(L, 4.0, 10.0, 0.0),
                     geo, cpl, 1e-3, [0.1, 0.2])
        path = tmp_path / "traj.npz"
        save_trajectory(path, res)
        data = np.load(path)
        assert np.array_equal(data["times_us"], res.times)
        assert np.array_equal(data["amps"][1], res.states[1].amps)
        assert int(data["L"]) == L
