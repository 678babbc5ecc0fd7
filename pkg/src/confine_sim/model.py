"""Chain geometry, drive parameters, and the Rydberg <-> Ising mapping.

Basis and sign conventions (used by every module downstream):

* Sites are 0-based. The sublattice sign of site i is +1 when
  ``i % 2 == plus_parity`` (default ``plus_parity=0``), which equals the
  1-based alternating sign (-1)**(i+1).
* The local-detuning weight pattern defaults to h_i = 1 on 0-based odd
  sites, (0, 1, 0, 1, ...). With these paired defaults the sublattice sign
  is +1 exactly on the h = 0 sites, which is what makes a uniform Ising
  longitudinal field expressible through two global detuning knobs.
* In the spin language sigma^z = +1 means the Rydberg state. Expanding the
  driven Rydberg Hamiltonian over Pauli operators gives per-site transverse
  coefficients x_i = -Omega/2, longitudinal coefficients
  z_i = -(Delta_glo + h_i Delta_loc)/2 + sum_j U_ij / 4 and pair couplings
  U_ij / 4, with U_ij = C6 / r_ij^6.
* Frequencies are rad/us internally (see :mod:`confine_sim.units`).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterator

import numpy as np

from .units import from_mhz2pi, to_mhz2pi

#: Nearest-neighbour interaction of the reference chain: 18.5 MHz_2pi.
U_NN_DEFAULT = from_mhz2pi(18.5)

#: Lattice spacing of the reference chain in micrometers.
SPACING_DEFAULT = 6.0

#: C6 chosen as 18.5 * 6^6 MHz_2pi um^6 so that C6 / a^6 reproduces
#: U_NN_DEFAULT exactly on the reference chain.
C6_DEFAULT = from_mhz2pi(18.5 * 6.0**6)

_SPACING_TOL = 1e-9


class InvalidGeometryError(ValueError):
    """Raised when chain coordinates violate the geometry contract."""


class SingularCouplingError(ValueError):
    """Raised when two atoms (nearly) coincide and U = C6/r^6 blows up."""


class MappingError(ValueError):
    """Raised when Ising <-> Rydberg parameter conversion is ill-posed."""


def staggering_sign(i: int, plus_parity: int = 0) -> int:
    """Sublattice sign of 0-based site i: +1 when i % 2 == plus_parity."""
    if plus_parity not in (0, 1):
        raise ValueError(f"plus_parity must be 0 or 1, got {plus_parity}")
    return 1 if i % 2 == plus_parity else -1


def staggering_signs(L: int, plus_parity: int = 0) -> np.ndarray:
    """Vector of sublattice signs for a chain of L sites."""
    return np.array([staggering_sign(i, plus_parity) for i in range(L)], dtype=float)


def alternating_h_pattern(L: int, one_parity: int = 1) -> np.ndarray:
    """Local-detuning weights h_i = 1 on sites with i % 2 == one_parity."""
    if one_parity not in (0, 1):
        raise ValueError(f"one_parity must be 0 or 1, got {one_parity}")
    h = np.zeros(L, dtype=float)
    h[one_parity::2] = 1.0
    return h


@dataclass(frozen=True)
class Geometry:
    """Atom coordinates of a chain, in micrometers.

    ``positions`` has shape (L, 2). For an ideal (unperturbed) geometry the
    consecutive spacing must equal ``spacing`` to within 1e-9 um; instances
    carrying noise-shifted coordinates set ``perturbed=True`` which skips
    that check (but never the distinctness check).
    """

    positions: np.ndarray
    spacing: float
    boundary: str = "open"
    turns: tuple[int, ...] = ()
    turn_angle_deg: float = 60.0
    perturbed: bool = False

    def __post_init__(self):
        pos = np.asarray(self.positions, dtype=float)
        if pos.ndim != 2 or pos.shape[1] != 2 or pos.shape[0] < 2:
            raise InvalidGeometryError(f"positions must be (L>=2, 2), got {pos.shape}")
        if not np.all(np.isfinite(pos)):
            raise InvalidGeometryError("positions contain non-finite entries")
        if self.boundary not in ("open", "ring"):
            raise InvalidGeometryError(f"boundary must be 'open' or 'ring', got {self.boundary!r}")
        if self.spacing <= 0:
            raise InvalidGeometryError(f"spacing must be positive, got {self.spacing}")
        pos = pos.copy()
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "turns", tuple(int(t) for t in self.turns))
        if not self.perturbed:
            seg = np.linalg.norm(np.diff(pos, axis=0), axis=1)
            if self.boundary == "ring":
                seg = np.append(seg, np.linalg.norm(pos[0] - pos[-1]))
            if np.any(np.abs(seg - self.spacing) > _SPACING_TOL):
                raise InvalidGeometryError(
                    "consecutive sites must sit exactly one lattice spacing apart "
                    f"(max deviation {np.max(np.abs(seg - self.spacing)):.3e} um)"
                )
        # exactly coincident atoms are invalid perturbed or not; the
        # near-coincidence guard lives in vdw_couplings
        d = pairwise_distances(pos)
        off = d[np.triu_indices(len(pos), k=1)]
        if np.min(off) == 0.0:
            raise InvalidGeometryError("two atoms coincide")

    @property
    def L(self) -> int:
        return self.positions.shape[0]

    def with_offsets(self, offsets: np.ndarray) -> "Geometry":
        """Geometry with coordinates shifted by ``offsets`` (L, 2), flagged perturbed."""
        offsets = np.asarray(offsets, dtype=float)
        if offsets.shape != self.positions.shape:
            raise InvalidGeometryError(
                f"offsets shape {offsets.shape} != positions shape {self.positions.shape}"
            )
        return replace(self, positions=self.positions + offsets, perturbed=True)


def pairwise_distances(positions: np.ndarray) -> np.ndarray:
    """(L, L) matrix of Euclidean distances."""
    delta = positions[:, None, :] - positions[None, :, :]
    return np.sqrt(np.sum(delta * delta, axis=-1))


def build_geometry(
    L: int,
    spacing: float = SPACING_DEFAULT,
    turns: tuple[int, ...] = (),
    turn_angle_deg: float = 60.0,
    boundary: str = "open",
) -> Geometry:
    """Straight chain with optional in-plane turns, or a regular ring.

    A turn at index k bends the outgoing segment k -> k+1 by
    ``turn_angle_deg`` (counterclockwise), so turns must satisfy
    1 <= k <= L-2 and be strictly increasing. ``boundary='ring'`` places the
    sites on a regular L-gon of side ``spacing``; turns are then disallowed.
    """
    if L < 2:
        raise InvalidGeometryError(f"need at least 2 sites, got L={L}")
    if boundary == "ring":
        if turns:
            raise InvalidGeometryError("turns are not supported on a ring")
        radius = spacing / (2.0 * np.sin(np.pi / L))
        theta = 2.0 * np.pi * np.arange(L) / L
        pos = radius * np.column_stack([np.cos(theta), np.sin(theta)])
        return Geometry(pos, spacing, boundary="ring")
    turns = tuple(int(t) for t in turns)
    if any(t < 1 or t > L - 2 for t in turns):
        raise InvalidGeometryError(f"turn indices must lie in [1, L-2], got {turns}")
    if list(turns) != sorted(set(turns)):
        raise InvalidGeometryError(f"turn indices must be strictly increasing, got {turns}")
    angle = np.deg2rad(turn_angle_deg)
    turn_set = set(turns)
    heading = 0.0
    pos = np.zeros((L, 2))
    for i in range(1, L):
        if (i - 1) in turn_set:
            heading += angle
        pos[i] = pos[i - 1] + spacing * np.array([np.cos(heading), np.sin(heading)])
    return Geometry(pos, spacing, boundary="open", turns=turns, turn_angle_deg=turn_angle_deg)


@dataclass(frozen=True)
class CouplingMatrix:
    """Symmetric van der Waals couplings U_ij in rad/us (zero diagonal)."""

    u: np.ndarray
    truncation: str = "full"

    def __post_init__(self):
        u = np.asarray(self.u, dtype=float)
        if u.ndim != 2 or u.shape[0] != u.shape[1]:
            raise ValueError(f"coupling matrix must be square, got {u.shape}")
        if not np.allclose(u, u.T, atol=0.0):
            raise ValueError("coupling matrix must be symmetric")
        if np.any(np.diag(u) != 0.0):
            raise ValueError("coupling matrix must have a zero diagonal")
        if self.truncation not in ("full", "nearest_neighbor"):
            raise ValueError(f"unknown truncation {self.truncation!r}")
        u = u.copy()
        u.flags.writeable = False
        object.__setattr__(self, "u", u)

    @property
    def L(self) -> int:
        return self.u.shape[0]

    def pairs(self) -> Iterator[tuple[int, int, float]]:
        """Yield (i, j, U_ij) for i < j with nonzero coupling."""
        iu, ju = np.nonzero(np.triu(self.u, k=1))
        for i, j in zip(iu.tolist(), ju.tolist()):
            yield i, j, float(self.u[i, j])

    def row_shift(self) -> np.ndarray:
        """Per-site longitudinal shift sum_j U_ij / 4 from the Pauli expansion."""
        return np.sum(self.u, axis=1) / 4.0


def vdw_couplings(
    geometry: Geometry, c6: float = C6_DEFAULT, truncation: str = "full"
) -> CouplingMatrix:
    """U_ij = C6 / r_ij^6 for all pairs, optionally truncated to neighbours.

    ``truncation='nearest_neighbor'`` keeps |i-j| = 1 bonds only (plus the
    wrap-around bond on a ring).
    """
    if c6 <= 0:
        raise ValueError(f"C6 must be positive, got {c6}")
    d = pairwise_distances(geometry.positions)
    L = geometry.L
    if np.min(d[np.triu_indices(L, k=1)]) < _SPACING_TOL:
        raise SingularCouplingError("coincident atoms give a divergent coupling")
    with np.errstate(divide="ignore"):
        u = c6 / d**6
    np.fill_diagonal(u, 0.0)
    if truncation == "nearest_neighbor":
        keep = np.zeros((L, L), dtype=bool)
        idx = np.arange(L - 1)
        keep[idx, idx + 1] = keep[idx + 1, idx] = True
        if geometry.boundary == "ring":
            keep[0, L - 1] = keep[L - 1, 0] = True
        u = np.where(keep, u, 0.0)
    elif truncation != "full":
        raise ValueError(f"unknown truncation {truncation!r}")
    return CouplingMatrix(u, truncation=truncation)


@dataclass(frozen=True)
class RydbergParams:
    """Hold-plateau drive values (rad/us) plus the local-detuning pattern.

    ``h_pattern`` entries weight the local detuning per site and must lie in
    [0, 1]. The drive phase is fixed to zero; the transverse term is exactly
    -(Omega/2) sigma^x per site.
    """

    omega: float
    delta_glo: float
    delta_loc: float
    h_pattern: np.ndarray

    def __post_init__(self):
        h = np.asarray(self.h_pattern, dtype=float)
        if h.ndim != 1 or h.size < 2:
            raise ValueError(f"h_pattern must be a 1-d array of L>=2 weights, got shape {h.shape}")
        if np.any((h < 0.0) | (h > 1.0)):
            raise ValueError("h_pattern entries must lie in [0, 1]")
        if self.omega < 0.0:
            raise ValueError(f"omega must be >= 0 (drive phase is fixed), got {self.omega}")
        h = h.copy()
        h.flags.writeable = False
        object.__setattr__(self, "h_pattern", h)

    @property
    def L(self) -> int:
        return self.h_pattern.size


@dataclass(frozen=True)
class IsingParams:
    """Ferromagnetic-frame parameters: H = -J sum (hx sx + hz_i sz + sz sz)."""

    j: float
    hx: float
    hz: np.ndarray

    def __post_init__(self):
        hz = np.atleast_1d(np.asarray(self.hz, dtype=float)).copy()
        hz.flags.writeable = False
        object.__setattr__(self, "hz", hz)
        if self.j <= 0.0:
            raise ValueError(f"J must be positive, got {self.j}")
        if self.hx < 0.0:
            raise ValueError(f"hx must be >= 0, got {self.hx}")

    @classmethod
    def uniform(cls, j: float, hx: float, hz: float, L: int) -> "IsingParams":
        return cls(j=j, hx=hx, hz=np.full(L, float(hz)))

    @property
    def L(self) -> int:
        return self.hz.size

    def uniform_hz(self) -> float:
        """The common hz value; raises MappingError if the field is not uniform."""
        if not np.allclose(self.hz, self.hz[0], rtol=0.0, atol=1e-12):
            raise MappingError("longitudinal field is not uniform")
        return float(self.hz[0])


def map_ising_to_rydberg(
    ising: IsingParams,
    u_nn: float = U_NN_DEFAULT,
    one_parity: int = 1,
    delta_glo_sign: int = +1,
) -> RydbergParams:
    """Global drive values realizing a uniform-(hx, hz) Ising chain.

        Omega     = hx * U_nn / 2
        Delta_glo = U_nn * (1 + sign * hz / 2)
        Delta_loc = -U_nn * hz

    with the alternating h-pattern h_i = 1 on parity ``one_parity`` sites.
    ``delta_glo_sign=-1`` selects the U_nn (1 - hz/2) convention; the
    default +1 is the one whose inverse gives back a uniform hz. The
    longitudinal field must be uniform for a global-knob realization.
    """
    if u_nn <= 0:
        raise MappingError(f"U_nn must be positive, got {u_nn}")
    if delta_glo_sign not in (+1, -1):
        raise MappingError(f"delta_glo_sign must be +1 or -1, got {delta_glo_sign}")
    hz = ising.uniform_hz()
    return RydbergParams(
        omega=ising.hx * u_nn / 2.0,
        delta_glo=u_nn * (1.0 + delta_glo_sign * hz / 2.0),
        delta_loc=-u_nn * hz,
        h_pattern=alternating_h_pattern(ising.L, one_parity=one_parity),
    )


def map_rydberg_to_ising(
    ryd: RydbergParams,
    u_nn: float = U_NN_DEFAULT,
    plus_parity: int = 0,
) -> IsingParams:
    """Invert the drive mapping site by site.

        J    = U_nn / 4
        hx   = 2 Omega / U_nn
        hz_i = [2 (Delta_glo + h_i Delta_loc) / U_nn - 2] * sign_i

    where sign_i is the sublattice sign with ``plus_parity``. Any h-pattern
    is accepted; the result is uniform exactly when the pattern alternates
    with the parity paired to ``plus_parity`` and Delta_glo follows the +1
    convention.
    """
    if u_nn <= 0:
        raise MappingError(f"U_nn must be positive, got {u_nn}")
    signs = staggering_signs(ryd.L, plus_parity)
    hz = (2.0 * (ryd.delta_glo + ryd.h_pattern * ryd.delta_loc) / u_nn - 2.0) * signs
    return IsingParams(j=u_nn / 4.0, hx=2.0 * ryd.omega / u_nn, hz=hz)


@dataclass(frozen=True)
class ChainModel:
    """A concrete chain instance: geometry plus the Ising target it realizes.

    ``h_pattern=None`` means the default alternating pattern with ones on
    parity ``one_parity`` sites. An explicit pattern (e.g. all ones) keeps
    the same mapped drive values but changes which Ising field pattern the
    hardware actually applies.
    """

    geometry: Geometry
    c6: float = C6_DEFAULT
    hx: float = 0.25
    hz: float = 0.0
    one_parity: int = 1
    delta_glo_sign: int = +1
    h_pattern: np.ndarray | None = None

    def __post_init__(self):
        if self.h_pattern is not None:
            h = np.asarray(self.h_pattern, dtype=float).copy()
            if h.size != self.geometry.L:
                raise ValueError(
                    f"h_pattern has {h.size} entries for {self.geometry.L} sites"
                )
            if np.any((h < 0.0) | (h > 1.0)):
                raise ValueError("h_pattern entries must lie in [0, 1]")
            h.flags.writeable = False
            object.__setattr__(self, "h_pattern", h)

    @property
    def L(self) -> int:
        return self.geometry.L

    @property
    def plus_parity(self) -> int:
        """Sublattice parity whose sign is +1; paired to sit on the h = 0 sites."""
        return 1 - self.one_parity

    @property
    def u_nn(self) -> float:
        return self.c6 / self.geometry.spacing**6

    def resolved_h_pattern(self) -> np.ndarray:
        if self.h_pattern is not None:
            return np.asarray(self.h_pattern, dtype=float)
        return alternating_h_pattern(self.L, one_parity=self.one_parity)

    def couplings(self, truncation: str = "full") -> CouplingMatrix:
        return vdw_couplings(self.geometry, self.c6, truncation=truncation)

    def rydberg(self) -> RydbergParams:
        base = map_ising_to_rydberg(
            self.ising(), self.u_nn,
            one_parity=self.one_parity, delta_glo_sign=self.delta_glo_sign,
        )
        return replace(base, h_pattern=self.resolved_h_pattern())

    def ising(self) -> IsingParams:
        return IsingParams.uniform(self.u_nn / 4.0, self.hx, self.hz, self.L)

    def to_doc(self) -> dict:
        """JSON-ready description (frequencies in MHz_2pi units)."""
        return {
            "L": self.L,
            "a_um": self.geometry.spacing,
            "turns": list(self.geometry.turns),
            "turn_angle_deg": self.geometry.turn_angle_deg,
            "boundary": self.geometry.boundary,
            "C6_MHz2pi_um6": to_mhz2pi(self.c6),
            "hx": self.hx,
            "hz": self.hz,
            "h_pattern": self.resolved_h_pattern().tolist(),
        }

    @classmethod
    def from_doc(cls, doc: dict) -> "ChainModel":
        known = {
            "L", "a_um", "turns", "turn_angle_deg", "boundary",
            "C6_MHz2pi_um6", "hx", "hz", "h_pattern",
        }
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown model keys: {sorted(unknown)}")
        geometry = build_geometry(
            L=int(doc["L"]),
            spacing=float(doc.get("a_um", SPACING_DEFAULT)),
            turns=tuple(doc.get("turns", ())),
            turn_angle_deg=float(doc.get("turn_angle_deg", 60.0)),
            boundary=doc.get("boundary", "open"),
        )
        h_pattern = doc.get("h_pattern")
        one_parity = 1
        if h_pattern is not None:
            h_arr = np.asarray(h_pattern, dtype=float)
            # alternating patterns round-trip their parity; anything else
            # keeps the default and is carried verbatim
            for parity in (0, 1):
                if np.array_equal(h_arr, alternating_h_pattern(geometry.L, parity)):
                    one_parity = parity
                    h_pattern = None
                    break
        return cls(
            geometry=geometry,
            c6=from_mhz2pi(float(doc.get("C6_MHz2pi_um6", to_mhz2pi(C6_DEFAULT)))),
            hx=float(doc.get("hx", 0.25)),
            hz=float(doc.get("hz", 0.0)),
            one_parity=one_parity,
            h_pattern=None if h_pattern is None else np.asarray(h_pattern, dtype=float),
        )
