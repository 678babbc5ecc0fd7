"""State-vector evolution of the driven chain.

Basis convention: computational index b encodes site i in bit i
(little-endian), bit value 1 meaning the Rydberg state, i.e. sigma^z = +1.
The diagonal part of the Hamiltonian is affine in the two detuning controls,

    E(b, t) = E0(b) + Delta_glo(t) * A(b) + Delta_loc(t) * B(b),

with A(b) = -1/2 sum_i s_i(b) and B(b) = -1/2 sum_i h_i s_i(b); the three
tables are built once per evolution and reused for every step, which is what
makes long schedules cheap. One Trotter step over dt is the symmetric
splitting

    exp(-i H_diag dt/2) exp(-i H_x dt) exp(-i H_diag dt/2)

with controls sampled at the step midpoint. The exact oracle applies the
full step generator with an operator exponential on the same step grid and
the same piecewise-constant midpoint controls, so comparing the two isolates
the splitting error.
"""

from __future__ import annotations

import io
import math
import os
import zipfile
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import CouplingMatrix, Geometry, staggering_signs
from .schedule import PulseSchedule

_TOL = 1e-12

#: Hilbert-space guard: refuse beyond this many sites (2^24 amplitudes).
MAX_QUBITS = 24

#: The exact oracle is dense-ish in effort; keep it to small chains.
MAX_ORACLE_QUBITS = 12


class EvolutionError(RuntimeError):
    """Raised for ill-posed evolution requests or broken unitarity."""


class CapacityError(EvolutionError):
    """Raised when a request exceeds the configured qubit budget."""


@dataclass
class StateVector:
    """Dense state on L sites; amps[b] is the amplitude of basis index b."""

    amps: np.ndarray
    L: int

    def __post_init__(self):
        self.amps = np.ascontiguousarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (1 << self.L,):
            raise ValueError(f"amplitude vector must have length 2^{self.L}")

    def copy(self) -> "StateVector":
        return StateVector(self.amps.copy(), self.L)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


def check_capacity(L: int, max_qubits: int = MAX_QUBITS) -> None:
    if L > max_qubits:
        raise CapacityError(f"L={L} exceeds the {max_qubits}-qubit budget")


def init_basis_state(L: int, bits) -> StateVector:
    """Product state from a bitstring; character/entry j is site j (1 = Rydberg)."""
    check_capacity(L)
    if isinstance(bits, str):
        bits = [int(c) for c in bits]
    bits = list(bits)
    if len(bits) != L or any(b not in (0, 1) for b in bits):
        raise ValueError(f"need {L} binary entries, got {bits!r}")
    index = sum(b << i for i, b in enumerate(bits))
    amps = np.zeros(1 << L, dtype=np.complex128)
    amps[index] = 1.0
    return StateVector(amps, L)


def neel_bits(L: int, excited_parity: int = 0) -> str:
    """Alternating occupation string with Rydberg sites on ``excited_parity``."""
    if excited_parity not in (0, 1):
        raise ValueError(f"excited_parity must be 0 or 1, got {excited_parity}")
    return "".join("1" if i % 2 == excited_parity else "0" for i in range(L))


def ground_state(L: int) -> StateVector:
    """All atoms in the ground state (index 0)."""
    return init_basis_state(L, [0] * L)


@dataclass(frozen=True)
class HamiltonianTerms:
    """Instantaneous Pauli coefficients: sum x_i sx + sum z_i sz + sum w_ij sz sz."""

    L: int
    x: np.ndarray
    z: np.ndarray
    pair_i: np.ndarray
    pair_j: np.ndarray
    pair_w: np.ndarray


def build_terms(
    geometry: Geometry,
    couplings: CouplingMatrix,
    controls: tuple[float, float, float],
    h_pattern: np.ndarray,
) -> HamiltonianTerms:
    """Pauli coefficients of the drive Hamiltonian at one control triple.

    ``controls`` is (Omega, Delta_glo, Delta_loc) in rad/us. The expansion
    over sigma^z = +1 <-> Rydberg gives x_i = -Omega/2,
    z_i = -(Delta_glo + h_i Delta_loc)/2 + sum_j U_ij/4, w_ij = U_ij/4.
    """
    L = geometry.L
    if couplings.L != L or len(h_pattern) != L:
        raise ValueError("geometry, couplings, and h_pattern disagree on L")
    omega, delta_glo, delta_loc = controls
    h = np.asarray(h_pattern, dtype=float)
    iu, ju = np.nonzero(np.triu(couplings.u, k=1))
    return HamiltonianTerms(
        L=L,
        x=np.full(L, -omega / 2.0),
        z=-(delta_glo + h * delta_loc) / 2.0 + couplings.row_shift(),
        pair_i=iu.astype(np.int64),
        pair_j=ju.astype(np.int64),
        pair_w=couplings.u[iu, ju] / 4.0,
    )


def diag_energies(terms: HamiltonianTerms, num_threads: int = 1) -> np.ndarray:
    """E(b) = sum_i z_i s_i(b) + sum_p w_p s_i s_j over the full basis."""
    dim = 1 << terms.L
    out = np.empty(dim, dtype=np.float64)
    tmp = np.empty(dim, dtype=np.float64)
    kernels.weighted_sz_sum(terms.L, np.ascontiguousarray(terms.z), out, num_threads)
    kernels.pair_zz_sum(
        terms.L,
        np.ascontiguousarray(terms.pair_i),
        np.ascontiguousarray(terms.pair_j),
        np.ascontiguousarray(terms.pair_w),
        tmp,
        num_threads,
    )
    out += tmp
    return out


def trotter_step(
    state: StateVector, terms: HamiltonianTerms, dt: float, num_threads: int = 1
) -> StateVector:
    """One symmetric splitting step with fixed coefficients, in place."""
    e = diag_energies(terms, num_threads)
    half = np.exp(-0.5j * dt * e)
    angles = np.ascontiguousarray(terms.x * dt)
    state.amps *= half
    kernels.apply_x_rotations(state.amps, state.L, angles, num_threads)
    state.amps *= half
    return state


@dataclass(frozen=True)
class SiteModifiers:
    """Static per-realization control modifiers (all optional).

    ``omega_scale`` multiplies the Omega waveform globally;
    ``delta_glo_offsets`` adds a static per-site detuning (rad/us) for the
    whole schedule; ``delta_loc_scales`` multiplies the local-detuning
    waveform per site; ``h_pattern`` overrides the schedule's weight pattern
    (already clipped to [0, 1] by the caller).
    """

    omega_scale: float = 1.0
    delta_glo_offsets: np.ndarray | None = None
    delta_loc_scales: np.ndarray | None = None
    h_pattern: np.ndarray | None = None


@dataclass
class _AffineDiagonal:
    """Cached diagonal tables: E(b,t) = e0 + Delta_glo * a_tab + Delta_loc * b_tab."""

    L: int
    e0: np.ndarray
    a_tab: np.ndarray
    b_tab: np.ndarray
    x_weights: np.ndarray  # x_i(t) = x_weights[i] * Omega(t)


def _tables(L, z_static, pair_i, pair_j, pair_w, a_weights, b_weights, num_threads):
    dim = 1 << L
    e0 = np.empty(dim, dtype=np.float64)
    tmp = np.empty(dim, dtype=np.float64)
    kernels.weighted_sz_sum(L, np.ascontiguousarray(z_static), e0, num_threads)
    kernels.pair_zz_sum(
        L,
        np.ascontiguousarray(pair_i, dtype=np.int64),
        np.ascontiguousarray(pair_j, dtype=np.int64),
        np.ascontiguousarray(pair_w, dtype=np.float64),
        tmp,
        num_threads,
    )
    e0 += tmp
    a_tab = np.empty(dim, dtype=np.float64)
    b_tab = np.empty(dim, dtype=np.float64)
    kernels.weighted_sz_sum(L, np.ascontiguousarray(a_weights), a_tab, num_threads)
    kernels.weighted_sz_sum(L, np.ascontiguousarray(b_weights), b_tab, num_threads)
    return e0, a_tab, b_tab


def _rydberg_affine(
    couplings: CouplingMatrix,
    h_pattern: np.ndarray,
    modifiers: SiteModifiers | None,
    num_threads: int,
) -> _AffineDiagonal:
    L = couplings.L
    mods = modifiers or SiteModifiers()
    h_eff = np.asarray(mods.h_pattern if mods.h_pattern is not None else h_pattern, float)
    if mods.delta_loc_scales is not None:
        h_eff = h_eff * np.asarray(mods.delta_loc_scales, dtype=float)
    z_static = couplings.row_shift()
    if mods.delta_glo_offsets is not None:
        z_static = z_static - 0.5 * np.asarray(mods.delta_glo_offsets, dtype=float)
    iu, ju = np.nonzero(np.triu(couplings.u, k=1))
    e0, a_tab, b_tab = _tables(
        L, z_static, iu, ju, couplings.u[iu, ju] / 4.0,
        np.full(L, -0.5), -0.5 * h_eff, num_threads,
    )
    return _AffineDiagonal(L, e0, a_tab, b_tab, np.full(L, -0.5 * mods.omega_scale))


def _ising_affine(
    L: int,
    u_nn: float,
    h_pattern: np.ndarray,
    boundary: str,
    plus_parity: int,
    num_threads: int,
) -> _AffineDiagonal:
    """Ferromagnetic-frame tables driven by the *same* schedule controls.

    Substituting the inverse mapping hx(t) = 2 Omega/U, hz_i(t) =
    [2 (Delta_glo + h_i Delta_loc)/U - 2] sign_i into
    H = -J sum (hx sx + hz_i sz + sz sz) with J = U/4 gives
    x_i = -Omega/2 and a diagonal affine in the detunings with
    E0 = sum_i 2J sign_i s_i - J sum_bonds s s, A = -1/2 sum sign_i s_i,
    B = -1/2 sum sign_i h_i s_i.
    """
    j = u_nn / 4.0
    signs = staggering_signs(L, plus_parity)
    h = np.asarray(h_pattern, dtype=float)
    bonds = [(i, i + 1) for i in range(L - 1)]
    if boundary == "ring":
        bonds.append((0, L - 1))
    pair_i = np.array([b[0] for b in bonds], dtype=np.int64)
    pair_j = np.array([b[1] for b in bonds], dtype=np.int64)
    pair_w = np.full(len(bonds), -j)
    e0, a_tab, b_tab = _tables(
        L, 2.0 * j * signs, pair_i, pair_j, pair_w,
        -0.5 * signs, -0.5 * signs * h, num_threads,
    )
    return _AffineDiagonal(L, e0, a_tab, b_tab, np.full(L, -0.5))


@dataclass
class EvolutionResult:
    """Snapshots of the evolving state at the requested sample times."""

    times: np.ndarray
    states: list[StateVector]

    @property
    def final(self) -> StateVector:
        return self.states[-1]


def _check_evolution_args(schedule, dt, sample_times):
    if dt <= 0:
        raise EvolutionError(f"dt must be positive, got {dt}")
    min_seg = schedule.min_segment()
    if dt > min_seg + _TOL:
        raise EvolutionError(
            f"dt={dt} exceeds the shortest schedule segment ({min_seg}); "
            "the step would alias over a control feature"
        )
    ts = np.atleast_1d(np.asarray(sample_times, dtype=float))
    if ts.size == 0:
        raise EvolutionError("need at least one sample time")
    if np.any(np.diff(ts) <= 0):
        raise EvolutionError("sample times must be strictly increasing")
    if ts[0] < -_TOL or ts[-1] > schedule.t_end + _TOL:
        raise EvolutionError(
            f"sample times must lie within [0, {schedule.t_end}], got "
            f"[{ts[0]}, {ts[-1]}]"
        )
    return np.clip(ts, 0.0, schedule.t_end)


def _segment_count(span: float, dt: float) -> int:
    return max(1, int(math.ceil(span / dt - 1e-9)))


def _run_trotter(amps, affine, schedule, dt, sample_times, num_threads):
    L = affine.L
    cache: dict[tuple, tuple[np.ndarray, np.ndarray]] = {}
    snapshots = []
    t = 0.0
    for ts in sample_times:
        span = ts - t
        if span > _TOL:
            n = _segment_count(span, dt)
            h = span / n
            for k in range(n):
                tm = t + (k + 0.5) * h
                key = (*schedule.sample(tm), h)
                try:
                    half, angles = cache[key]
                except KeyError:
                    omega, dg, dl = key[:3]
                    e = affine.e0 + dg * affine.a_tab + dl * affine.b_tab
                    half = np.exp(-0.5j * h * e)
                    angles = np.ascontiguousarray(affine.x_weights * (omega * h))
                    cache[key] = (half, angles)
                amps *= half
                kernels.apply_x_rotations(amps, L, angles, num_threads)
                amps *= half
            t = ts
        snapshots.append(StateVector(amps.copy(), L))
    return snapshots


def _run_oracle(amps, affine, schedule, dt, sample_times):
    from scipy import sparse
    from scipy.sparse.linalg import expm_multiply

    L = affine.L
    dim = 1 << L
    idx = np.arange(dim, dtype=np.int64)
    flips = [sparse.csr_matrix(
        (np.ones(dim), (idx, idx ^ (1 << i))), shape=(dim, dim)
    ) for i in range(L)]
    cache: dict[tuple, sparse.csr_matrix] = {}
    snapshots = []
    t = 0.0
    for ts in sample_times:
        span = ts - t
        if span > _TOL:
            n = _segment_count(span, dt)
            h = span / n
            for k in range(n):
                tm = t + (k + 0.5) * h
                key = (*schedule.sample(tm), h)
                try:
                    gen = cache[key]
                except KeyError:
                    omega, dg, dl = key[:3]
                    e = affine.e0 + dg * affine.a_tab + dl * affine.b_tab
                    ham = sparse.diags(e).tocsr()
                    for i in range(L):
                        x_i = affine.x_weights[i] * omega
                        if x_i != 0.0:
                            ham = ham + x_i * flips[i]
                    gen = (-1j * h) * ham.tocsc()
                    cache[key] = gen
                amps = expm_multiply(gen, amps)
            t = ts
        snapshots.append(StateVector(amps.copy(), L))
    return snapshots


def _finish(times, snapshots) -> EvolutionResult:
    drift = abs(snapshots[-1].norm() - 1.0)
    if drift > 1e-8:
        raise EvolutionError(f"norm drifted by {drift:.3e} (> 1e-8); evolution is broken")
    return EvolutionResult(times=times, states=snapshots)


def evolve(
    state: StateVector,
    schedule: PulseSchedule,
    geometry: Geometry,
    couplings: CouplingMatrix,
    dt: float,
    sample_times,
    modifiers: SiteModifiers | None = None,
    num_threads: int = 1,
    max_qubits: int = MAX_QUBITS,
) -> EvolutionResult:
    """Trotterized evolution under a schedule, snapshotting at sample times.

    Consecutive sample times are bridged by ceil(span/dt) equal substeps;
    controls are sampled at substep midpoints. Requests with dt larger than
    the shortest waveform segment are refused.
    """
    check_capacity(state.L, max_qubits)
    if not (state.L == geometry.L == couplings.L == schedule.L):
        raise EvolutionError("state, geometry, couplings, and schedule disagree on L")
    ts = _check_evolution_args(schedule, dt, sample_times)
    affine = _rydberg_affine(couplings, schedule.h_pattern, modifiers, num_threads)
    snaps = _run_trotter(state.amps.copy(), affine, schedule, dt, ts, num_threads)
    return _finish(ts, snaps)


def evolve_ising_frame(
    state: StateVector,
    schedule: PulseSchedule,
    u_nn: float,
    boundary: str = "ring",
    plus_parity: int = 0,
    dt: float = 1e-3,
    sample_times=(0.0,),
    num_threads: int = 1,
    max_qubits: int = MAX_QUBITS,
) -> EvolutionResult:
    """Trotterized ferromagnetic-frame evolution driven by the same schedule.

    Equivalent to :func:`evolve` with nearest-neighbour couplings after the
    sublattice rotation; used to validate the mapping end to end.
    """
    check_capacity(state.L, max_qubits)
    ts = _check_evolution_args(schedule, dt, sample_times)
    affine = _ising_affine(
        state.L, u_nn, schedule.h_pattern, boundary, plus_parity, num_threads
    )
    snaps = _run_trotter(state.amps.copy(), affine, schedule, dt, ts, num_threads)
    return _finish(ts, snaps)


def exact_evolve_oracle(
    state: StateVector,
    schedule: PulseSchedule,
    geometry: Geometry,
    couplings: CouplingMatrix,
    dt: float,
    sample_times,
    modifiers: SiteModifiers | None = None,
    max_qubits: int = MAX_ORACLE_QUBITS,
) -> EvolutionResult:
    """Exact step-generator evolution on the same grid as :func:`evolve`.

    Each substep applies expm(-i h H(t_mid)) via a sparse Krylov exponential,
    so the only difference from the Trotter engine is the splitting.
    """
    check_capacity(state.L, max_qubits)
    if not (state.L == geometry.L == couplings.L == schedule.L):
        raise EvolutionError("state, geometry, couplings, and schedule disagree on L")
    ts = _check_evolution_args(schedule, dt, sample_times)
    affine = _rydberg_affine(couplings, schedule.h_pattern, modifiers, num_threads=1)
    snaps = _run_oracle(state.amps.copy(), affine, schedule, dt, ts)
    return _finish(ts, snaps)


# ---------------------------------------------------------------------------
# observables


def expectation_z(state: StateVector, i: int) -> float:
    """<sigma^z_i> (+1 = Rydberg)."""
    p = state.probabilities()
    signs = (((np.arange(p.size, dtype=np.int64) >> i) & 1) * 2 - 1).astype(float)
    return float(np.dot(p, signs))


def expectation_zz(state: StateVector, i: int, j: int) -> float:
    """<sigma^z_i sigma^z_j>."""
    p = state.probabilities()
    idx = np.arange(p.size, dtype=np.int64)
    si = (((idx >> i) & 1) * 2 - 1).astype(float)
    sj = (((idx >> j) & 1) * 2 - 1).astype(float)
    return float(np.dot(p, si * sj))


def magnetizations(state: StateVector) -> np.ndarray:
    """Vector of <sigma^z_i> for every site."""
    p = state.probabilities()
    idx = np.arange(p.size, dtype=np.int64)
    out = np.empty(state.L)
    for i in range(state.L):
        signs = (((idx >> i) & 1) * 2 - 1).astype(float)
        out[i] = np.dot(p, signs)
    return out


def zz_matrix(state: StateVector) -> np.ndarray:
    """(L, L) matrix of <sigma^z_i sigma^z_j>, ones on the diagonal."""
    L = state.L
    p = state.probabilities()
    idx = np.arange(p.size, dtype=np.int64)
    signs = np.empty((L, p.size))
    for i in range(L):
        signs[i] = (((idx >> i) & 1) * 2 - 1).astype(float)
    weighted = signs * p
    g = weighted @ signs.T
    np.fill_diagonal(g, 1.0)
    return g


def expectation_energy(state: StateVector, terms: HamiltonianTerms) -> float:
    """<H> for instantaneous Pauli coefficients (diagnostics / conservation tests)."""
    e = diag_energies(terms)
    diag = float(np.dot(state.probabilities(), e))
    x_part = 0.0
    for i in range(terms.L):
        if terms.x[i] != 0.0:
            idx = np.arange(state.amps.size, dtype=np.int64)
            flipped = state.amps[idx ^ (1 << i)]
            x_part += terms.x[i] * float(np.real(np.vdot(state.amps, flipped)))
    return diag + x_part


def overlap(a: StateVector, b: StateVector) -> complex:
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2."""
    return float(np.abs(overlap(a, b)) ** 2)


def sample_shots(state: StateVector, n_shots: int, seed) -> np.ndarray:
    """Projective sigma^z shots: (n_shots, L) uint8 array, column i = site i.

    ``seed`` may be an int or a numpy Generator. Draws are i.i.d. over the
    exact probabilities; a fixed seed reproduces the same multiset.
    """
    if n_shots < 1:
        raise ValueError(f"n_shots must be >= 1, got {n_shots}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = state.probabilities()
    p = np.maximum(p, 0.0)
    p /= p.sum()
    draws = rng.choice(p.size, size=n_shots, p=p)
    bits = (draws[:, None] >> np.arange(state.L)[None, :]) & 1
    return bits.astype(np.uint8)


def save_trajectory(path, result: EvolutionResult) -> None:
    """Dump snapshot amplitudes and times to a compressed .npz archive.

    Written with pinned zip metadata: np.savez stamps the wall clock into
    the archive, which would break byte-identical reruns.
    """
    arrays = {
        "times_us": np.asarray(result.times),
        "amps": np.stack([s.amps for s in result.states]),
        "L": np.asarray(np.int64(result.states[0].L)),
    }
    path = os.fspath(path)
    if not path.endswith(".npz"):
        path += ".npz"
    with zipfile.ZipFile(path, "w", zipfile.ZIP_DEFLATED) as zf:
        for name, arr in arrays.items():
            buf = io.BytesIO()
            np.lib.format.write_array(buf, arr, allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            info.compress_type = zipfile.ZIP_DEFLATED
            zf.writestr(info, buf.getvalue())


def magnetization_series(result: EvolutionResult) -> np.ndarray:
    """(n_times, L) array of <sigma^z_i> along the trajectory."""
    return np.stack([magnetizations(s) for s in result.states])
