"""Quenched (static per realization) control and placement noise.

Five independent Gaussian channels, each frozen for the whole schedule of
one realization:

  positions   per-coordinate offsets, sigma_pos um
  omega       one global factor 1 + N(0, rel_omega^2) on the Omega waveform
  delta_glo   per-site absolute detuning offsets, active for the entire
              schedule (they model site-dependent inhomogeneity, which does
              not switch off with the waveform)
  delta_loc   per-site factors 1 + N(0, rel_delta_loc^2) on the local
              detuning waveform
  h_pattern   per-site additive offsets on the weights, clipped to [0, 1]
              after the add

All widths are multiplied by the common ``scale`` knob. Realization k of
seed s draws from ``default_rng(SeedSequence(entropy=s, spawn_key=(k,)))``
in a fixed channel order, so realization k is reproducible regardless of
how many realizations run or in which order. Ablation masks zero the
non-selected channels *after* sampling, leaving the surviving draws
identical across masks.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import analysis, engine
from .model import ChainModel, CouplingMatrix, Geometry, vdw_couplings
from .schedule import PulseSchedule
from .units import from_mhz2pi

CHANNELS = ("positions", "omega", "delta_glo", "delta_loc", "h_pattern")


class NoiseConfigError(ValueError):
    """Raised for invalid noise specifications or channel masks."""


@dataclass(frozen=True)
class NoiseSpec:
    """Channel widths (1-sigma, before the global ``scale`` multiplier)."""

    sigma_pos_um: float = 0.1
    rel_omega: float = 0.02
    abs_delta_glo: float = from_mhz2pi(1.0)
    rel_delta_loc: float = 0.02
    abs_h: float = 0.1
    scale: float = 1.5

    def __post_init__(self):
        for name in ("sigma_pos_um", "rel_omega", "abs_delta_glo",
                     "rel_delta_loc", "abs_h", "scale"):
            if getattr(self, name) < 0:
                raise NoiseConfigError(f"{name} must be >= 0")


@dataclass(frozen=True)
class NoiseRealization:
    """One frozen draw of every channel."""

    position_offsets: np.ndarray
    omega_factor: float
    delta_glo_offsets: np.ndarray
    delta_loc_factors: np.ndarray
    h_offsets: np.ndarray

    @classmethod
    def identity(cls, L: int) -> "NoiseRealization":
        return cls(
            position_offsets=np.zeros((L, 2)),
            omega_factor=1.0,
            delta_glo_offsets=np.zeros(L),
            delta_loc_factors=np.ones(L),
            h_offsets=np.zeros(L),
        )

    def masked(self, channels) -> "NoiseRealization":
        """Zero out every channel not named in ``channels``."""
        chosen = validate_channels(channels)
        L = self.delta_glo_offsets.size
        ident = NoiseRealization.identity(L)
        return NoiseRealization(
            position_offsets=(
                self.position_offsets if "positions" in chosen else ident.position_offsets
            ),
            omega_factor=self.omega_factor if "omega" in chosen else 1.0,
            delta_glo_offsets=(
                self.delta_glo_offsets if "delta_glo" in chosen else ident.delta_glo_offsets
            ),
            delta_loc_factors=(
                self.delta_loc_factors if "delta_loc" in chosen else ident.delta_loc_factors
            ),
            h_offsets=self.h_offsets if "h_pattern" in chosen else ident.h_offsets,
        )


def validate_channels(channels) -> frozenset:
    chosen = frozenset(channels)
    unknown = chosen - set(CHANNELS)
    if unknown:
        raise NoiseConfigError(f"unknown noise channels: {sorted(unknown)}")
    return chosen


def sample_realization(spec: NoiseSpec, L: int, seed: int, index: int) -> NoiseRealization:
    """Draws for realization ``index`` of the ensemble rooted at ``seed``."""
    if index < 0:
        raise NoiseConfigError(f"realization index must be >= 0, got {index}")
    rng = np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))
    s = spec.scale
    return NoiseRealization(
        position_offsets=rng.normal(0.0, s * spec.sigma_pos_um, size=(L, 2)),
        omega_factor=1.0 + rng.normal(0.0, s * spec.rel_omega),
        delta_glo_offsets=rng.normal(0.0, s * spec.abs_delta_glo, size=L),
        delta_loc_factors=1.0 + rng.normal(0.0, s * spec.rel_delta_loc, size=L),
        h_offsets=rng.normal(0.0, s * spec.abs_h, size=L),
    )


@dataclass(frozen=True)
class PerturbedInstance:
    """Noise applied to a concrete chain: shifted couplings plus modifiers."""

    geometry: Geometry
    couplings: CouplingMatrix
    modifiers: engine.SiteModifiers


def perturb_instance(
    geometry: Geometry,
    h_pattern: np.ndarray,
    realization: NoiseRealization,
    c6: float,
    truncation: str = "full",
) -> PerturbedInstance:
    """Shift coordinates, rebuild couplings, and bundle control modifiers.

    The perturbed h-pattern is clipped to [0, 1] after the additive offsets.
    """
    geo = geometry.with_offsets(realization.position_offsets)
    h = np.clip(np.asarray(h_pattern, dtype=float) + realization.h_offsets, 0.0, 1.0)
    return PerturbedInstance(
        geometry=geo,
        couplings=vdw_couplings(geo, c6, truncation=truncation),
        modifiers=engine.SiteModifiers(
            omega_scale=realization.omega_factor,
            delta_glo_offsets=realization.delta_glo_offsets,
            delta_loc_scales=realization.delta_loc_factors,
            h_pattern=h,
        ),
    )


@dataclass
class EnsembleResult:
    """Mean/std staggered correlations plus the per-realization values."""

    table: analysis.CorrelationTable
    per_realization: np.ndarray  # (n, n_times, n_distances), staggered
    channels: frozenset
    seed: int


def run_ensemble(
    model: ChainModel,
    schedule: PulseSchedule,
    spec: NoiseSpec,
    n_realizations: int,
    seed: int,
    initial_state: engine.StateVector,
    dt: float,
    sample_times,
    d_max: int,
    bulk_margin: int = 2,
    channels=CHANNELS,
    truncation: str = "full",
    num_threads: int = 1,
) -> EnsembleResult:
    """Evolve ``n_realizations`` frozen-noise instances and average.

    Realizations are independent, so they are fanned out over a thread pool
    when ``num_threads`` > 1 (each worker then runs single-threaded
    kernels); results are reduced in realization order, making the output
    independent of the thread count. Any failing realization aborts the
    ensemble.
    """
    if n_realizations < 1:
        raise NoiseConfigError(f"n_realizations must be >= 1, got {n_realizations}")
    chosen = validate_channels(channels)
    times = np.atleast_1d(np.asarray(sample_times, dtype=float))
    h_pattern = model.resolved_h_pattern()
    kernel_threads = num_threads if n_realizations == 1 else 1

    def one(index: int) -> np.ndarray:
        real = sample_realization(spec, model.L, seed, index).masked(chosen)
        inst = perturb_instance(model.geometry, h_pattern, real, model.c6, truncation)
        result = engine.evolve(
            initial_state,
            schedule,
            inst.geometry,
            inst.couplings,
            dt,
            times,
            modifiers=inst.modifiers,
            num_threads=kernel_threads,
        )
        table = analysis.table_from_states(
            times, result.states, d_max, bulk_margin, model.geometry.boundary
        )
        return table.values

    stack = np.empty((n_realizations, times.size, d_max))
    if num_threads > 1 and n_realizations > 1:
        with ThreadPoolExecutor(max_workers=min(num_threads, n_realizations)) as pool:
            for k, values in enumerate(pool.map(one, range(n_realizations))):
                stack[k] = values
    else:
        for k in range(n_realizations):
            stack[k] = one(k)

    mean = stack.mean(axis=0)
    std = stack.std(axis=0, ddof=1) if n_realizations > 1 else None
    table = analysis.CorrelationTable(
        times=times,
        distances=np.arange(1, d_max + 1),
        values=mean,
        staggered=True,
        std=std,
        n_realizations=n_realizations,
        bulk_margin=bulk_margin,
        boundary=model.geometry.boundary,
    )
    return EnsembleResult(table=table, per_realization=stack, channels=chosen, seed=seed)


def channel_ablation(
    model: ChainModel,
    schedule: PulseSchedule,
    spec: NoiseSpec,
    channels,
    n_realizations: int,
    seed: int,
    **kwargs,
) -> EnsembleResult:
    """Ensemble with only the named channels active (others sampled, zeroed)."""
    return run_ensemble(
        model, schedule, spec, n_realizations, seed, channels=channels, **kwargs
    )
