"""Semiclassical two-kink (meson) model of the post-quench front.

Works in dimensionless units J = 1, momentum k in (0, pi]; time converts as
t = J_phys * t_us with J_phys in rad/us. For a transverse field h = hx the
kink dispersion and group velocity are

    eps(k) = 2 sqrt(1 + h^2 - 2 h cos k),      v(k) = d eps / d k,

and a weak longitudinal field hz confines kink pairs: a pair launched with
momentum k oscillates, its separation following

    d(t, k) = [eps(k) - eps(k - 2 chi t_fold)] / chi,
    chi = |hz| sigma_bar,   t_fold = t mod (k / chi),

with sigma_bar = (1 - hx^2)^(1/8) the transverse magnetization scale. At
hz = 0 this degenerates to the ballistic d = 2 v(k) t. The quench from
transverse field hx_pre to hx with the longitudinal tilt populates mode k
with

    n(k) = K^2 / (1 + K^2),
    K(k) = tan(dtheta_k / 2) + hz sigma_bar v(k) / eps(k)^2,

where dtheta_k is the Bogoliubov-angle change, theta(k; h) = atan2(sin k,
cos k - h). The observable front is the occupation-weighted mean separation
<d>(t) = integral n d dk / integral n dk over k in [0, pi].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson


class UndefinedFrontError(ValueError):
    """Raised when the quench populates no modes (zero occupation weight)."""


def dispersion(k, hx: float, j: float = 1.0):
    """Kink energy eps(k); array-friendly in k."""
    k = np.asarray(k, dtype=float)
    return 2.0 * j * np.sqrt((np.cos(k) - hx) ** 2 + np.sin(k) ** 2)


def group_velocity(k, hx: float, j: float = 1.0):
    """v(k) = d eps/dk = 2 j hx sin k / sqrt(1 + hx^2 - 2 hx cos k)."""
    k = np.asarray(k, dtype=float)
    eps = dispersion(k, hx, 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        v = np.where(eps > 0, 4.0 * j * hx * np.sin(k) / np.where(eps > 0, eps, 1.0), 0.0)
    return v


def sigma_bar(hx: float) -> float:
    """Transverse-magnetization scale (1 - hx^2)^(1/8), needs |hx| < 1."""
    if not abs(hx) < 1.0:
        raise ValueError(f"sigma_bar is defined for |hx| < 1, got {hx}")
    return float((1.0 - hx * hx) ** 0.125)


def bogoliubov_angle(k, hx: float):
    """theta(k; hx) = atan2(sin k, cos k - hx)."""
    k = np.asarray(k, dtype=float)
    return np.arctan2(np.sin(k), np.cos(k) - hx)


def max_group_velocity(hx: float, j: float = 1.0, tol: float = 1e-12) -> tuple[float, float]:
    """(k*, v_max) of the group velocity on (0, pi) by golden-section search.

    v(k) is unimodal there with its maximum at cos k* = hx.
    """
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = 0.0, np.pi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc = -group_velocity(c, hx, j)
    fd = -group_velocity(d, hx, j)
    while b - a > tol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = -group_velocity(c, hx, j)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = -group_velocity(d, hx, j)
    k_star = 0.5 * (a + b)
    return float(k_star), float(group_velocity(k_star, hx, j))


@dataclass(frozen=True)
class MesonModel:
    """Quench parameters in dimensionless form plus the physical J (rad/us)."""

    hx: float
    hz: float
    j: float
    hx_pre: float = 0.0
    n_panels: int = 2048

    def __post_init__(self):
        if not 0.0 <= self.hx < 1.0:
            raise ValueError(f"hx must lie in [0, 1), got {self.hx}")
        if not 0.0 <= abs(self.hx_pre) < 1.0:
            raise ValueError(f"hx_pre must lie in (-1, 1), got {self.hx_pre}")
        if self.j <= 0:
            raise ValueError(f"J must be positive, got {self.j}")
        if self.n_panels < 2 or self.n_panels % 2:
            raise ValueError(f"n_panels must be even and >= 2, got {self.n_panels}")
        object.__setattr__(self, "hz", float(abs(self.hz)))

    @property
    def chi(self) -> float:
        """Confinement rate chi = |hz| sigma_bar (J = 1 units)."""
        return self.hz * sigma_bar(self.hx)


def kink_amplitude(k, model: MesonModel):
    """K(k): Bogoliubov rotation plus the longitudinal-tilt correction."""
    k = np.asarray(k, dtype=float)
    dtheta = bogoliubov_angle(k, model.hx) - bogoliubov_angle(k, model.hx_pre)
    eps = dispersion(k, model.hx, 1.0)
    v = group_velocity(k, model.hx, 1.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        tilt = np.where(eps > 0, model.hz * sigma_bar(model.hx) * v / np.where(eps > 0, eps, 1.0) ** 2, 0.0)
    return np.tan(0.5 * dtheta) + tilt


def excitation_density(k, model: MesonModel):
    """Mode occupation n(k) = K^2 / (1 + K^2) in [0, 1)."""
    amp = kink_amplitude(k, model)
    return amp * amp / (1.0 + amp * amp)


def meson_distance(t: float, k, model: MesonModel):
    """Pair separation d(t, k) at dimensionless time t (J = 1).

    Confined pairs breathe with period k / chi; the free case (chi = 0)
    returns the ballistic 2 v(k) t.
    """
    k = np.asarray(k, dtype=float)
    if t < 0:
        raise ValueError(f"time must be >= 0, got {t}")
    chi = model.chi
    if chi == 0.0:
        return 2.0 * group_velocity(k, model.hx, 1.0) * t
    with np.errstate(invalid="ignore", divide="ignore"):
        period = k / chi
        t_fold = np.where(k > 0, np.mod(t, np.where(k > 0, period, 1.0)), 0.0)
    d = (dispersion(k, model.hx, 1.0) - dispersion(k - 2.0 * chi * t_fold, model.hx, 1.0)) / chi
    return np.where(k > 0, d, 0.0)


def mean_front(t: float, model: MesonModel) -> float:
    """Occupation-weighted mean separation <d>(t) (J = 1 units).

    Composite Simpson on a uniform k grid over [0, pi]; the k = 0 endpoint
    contributes nothing (n -> 0 there) and is pinned to its limit.
    """
    k = np.linspace(0.0, np.pi, model.n_panels + 1)
    n = excitation_density(k, model)
    n[0] = 0.0
    weight = simpson(n, x=k)
    if weight <= 0.0:
        raise UndefinedFrontError(
            "quench populates no kink modes; the front is undefined "
            f"(hx_pre={model.hx_pre}, hx={model.hx}, hz={model.hz})"
        )
    d = meson_distance(t, k, model)
    d[0] = 0.0
    return float(simpson(n * d, x=k) / weight)


def front_overlay(model: MesonModel, times_us, t1_us: float = 0.0) -> np.ndarray:
    """<d> against wall-clock sample times, zero before the quench mark t1."""
    times_us = np.atleast_1d(np.asarray(times_us, dtype=float))
    out = np.zeros(times_us.size)
    for i, t in enumerate(times_us):
        if t > t1_us:
            out[i] = mean_front(model.j * (t - t1_us), model)
    return out
