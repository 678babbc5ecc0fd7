"""Connected spin correlations, front extraction, and shot-file handling.

The central object is the distance-resolved connected correlator

    C_d = (1 / N_d) sum_i [ <sz_i sz_{i+d}> - <sz_i><sz_{i+d}> ]

averaged over all pairs whose members both lie in the bulk window (open
chains drop ``bulk_margin`` sites per edge; rings use every site and no
margin). The staggered representation multiplies by (-1)^d, which removes
the antiferromagnetic alternation of the Rydberg frame; its values match
the plain correlator of the ferromagnetically rotated frame. Tables are
written with staggered values.

Shot-based estimates use the same formula with sample moments, so they
converge to the state-vector path as the shot count grows.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .engine import StateVector, init_basis_state, magnetizations, neel_bits, zz_matrix


class AnalysisError(ValueError):
    """Raised for ill-posed correlation requests."""


class ShotFileError(ValueError):
    """Raised for malformed shot CSV files (message carries the line number)."""


def max_distance(L: int, bulk_margin: int, boundary: str = "open") -> int:
    """Largest distance with at least one bulk pair."""
    if boundary == "ring":
        return L // 2
    return L - 1 - 2 * bulk_margin


def _check_window(L: int, d_max: int, bulk_margin: int, boundary: str) -> None:
    if boundary not in ("open", "ring"):
        raise AnalysisError(f"boundary must be 'open' or 'ring', got {boundary!r}")
    if boundary == "ring" and bulk_margin != 0:
        raise AnalysisError("bulk_margin must be 0 on a ring")
    if bulk_margin < 0:
        raise AnalysisError(f"bulk_margin must be >= 0, got {bulk_margin}")
    if d_max < 1:
        raise AnalysisError(f"d_max must be >= 1, got {d_max}")
    cap = max_distance(L, bulk_margin, boundary)
    if d_max > cap:
        raise AnalysisError(
            f"d_max={d_max} has no bulk pairs for L={L}, margin={bulk_margin}, "
            f"{boundary} boundary (max {cap})"
        )


def _connected_from_moments(
    m: np.ndarray, g: np.ndarray, d_max: int, bulk_margin: int, boundary: str
) -> np.ndarray:
    L = m.size
    _check_window(L, d_max, bulk_margin, boundary)
    conn = g - np.outer(m, m)
    out = np.empty(d_max)
    for d in range(1, d_max + 1):
        if boundary == "ring":
            i = np.arange(L)
            out[d - 1] = float(np.mean(conn[i, (i + d) % L]))
        else:
            lo, hi = bulk_margin, L - 1 - bulk_margin
            i = np.arange(lo, hi - d + 1)
            out[d - 1] = float(np.mean(conn[i, i + d]))
    return out


def correlations_from_state(
    state: StateVector, d_max: int, bulk_margin: int = 2, boundary: str = "open"
) -> np.ndarray:
    """Plain (unstaggered) C_d for d = 1..d_max from exact moments."""
    return _connected_from_moments(
        magnetizations(state), zz_matrix(state), d_max, bulk_margin, boundary
    )


def correlations_from_shots(
    shots: np.ndarray, d_max: int, bulk_margin: int = 2, boundary: str = "open"
) -> np.ndarray:
    """Plain C_d from a (n_shots, L) array of 0/1 outcomes."""
    shots = np.asarray(shots)
    if shots.ndim != 2 or shots.shape[0] < 1:
        raise AnalysisError(f"shots must be (n_shots, L), got {shots.shape}")
    s = 2.0 * shots.astype(np.float64) - 1.0
    m = s.mean(axis=0)
    g = (s.T @ s) / s.shape[0]
    return _connected_from_moments(m, g, d_max, bulk_margin, boundary)


def connected_correlations(source, d_max: int, bulk_margin: int = 2, boundary: str = "open"):
    """Dispatch: StateVector -> exact moments, ndarray of shots -> estimates."""
    if isinstance(source, StateVector):
        return correlations_from_state(source, d_max, bulk_margin, boundary)
    return correlations_from_shots(np.asarray(source), d_max, bulk_margin, boundary)


@dataclass(frozen=True)
class CorrelationTable:
    """Distance-resolved correlations on a time grid.

    ``values[t_idx, d_idx]`` holds C_{d} at times[t_idx] with
    d = distances[d_idx]; ``staggered`` records whether the (-1)^d sign has
    been applied. ``std`` is the across-realization standard deviation when
    the table came from an ensemble (None for single runs).
    """

    times: np.ndarray
    distances: np.ndarray
    values: np.ndarray
    staggered: bool = True
    std: np.ndarray | None = None
    n_realizations: int = 1
    bulk_margin: int = 0
    boundary: str = "open"

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        d = np.asarray(self.distances, dtype=int)
        v = np.asarray(self.values, dtype=float)
        if v.shape != (t.size, d.size):
            raise AnalysisError(
                f"values shape {v.shape} does not match {t.size} times x {d.size} distances"
            )
        if self.std is not None and np.asarray(self.std).shape != v.shape:
            raise AnalysisError("std shape does not match values")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "distances", d)
        object.__setattr__(self, "values", v)

    def row(self, t: float) -> np.ndarray:
        """Values at the sample time nearest to t (must match within 1e-9)."""
        i = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[i] - t) > 1e-9:
            raise AnalysisError(f"no sample at t={t} (nearest is {self.times[i]})")
        return self.values[i]


def staggered(table: CorrelationTable) -> CorrelationTable:
    """Multiply by (-1)^d, toggling between plain and staggered values."""
    signs = np.where(table.distances % 2 == 0, 1.0, -1.0)
    return replace(table, values=table.values * signs, staggered=not table.staggered)


def table_from_states(
    times,
    states,
    d_max: int,
    bulk_margin: int = 2,
    boundary: str = "open",
    stagger: bool = True,
) -> CorrelationTable:
    """Staggered (default) correlation table from state snapshots."""
    rows = [correlations_from_state(s, d_max, bulk_margin, boundary) for s in states]
    table = CorrelationTable(
        times=np.asarray(times, dtype=float),
        distances=np.arange(1, d_max + 1),
        values=np.array(rows),
        staggered=False,
        bulk_margin=bulk_margin,
        boundary=boundary,
    )
    return staggered(table) if stagger else table


def neel_fidelity(state: StateVector, excited_parity: int = 0) -> float:
    """Overlap probability with the alternating product state."""
    target = init_basis_state(state.L, neel_bits(state.L, excited_parity))
    return float(np.abs(np.vdot(target.amps, state.amps)) ** 2)


def front_radius(table: CorrelationTable, t: float, theta_c: float = 0.01) -> int:
    """Largest d with |staggered C_d| >= theta_c at time t (0 if none).

    Scans from the largest tabulated distance downward, so interior dips
    below threshold do not truncate the front.
    """
    if not table.staggered:
        raise AnalysisError("front_radius expects a staggered table")
    if theta_c <= 0:
        raise AnalysisError(f"theta_c must be positive, got {theta_c}")
    row = table.row(t)
    for idx in range(len(row) - 1, -1, -1):
        if abs(row[idx]) >= theta_c:
            return int(table.distances[idx])
    return 0


# ---------------------------------------------------------------------------
# CSV interfaces


def _fmt(x: float) -> str:
    return repr(float(x))


def correlations_csv(table: CorrelationTable, ensemble: bool | None = None) -> str:
    """Long-format CSV; ensemble tables gain mean/std/realization columns."""
    if ensemble is None:
        ensemble = table.n_realizations > 1
    if ensemble and table.std is not None:
        header = "t_us,d,mean_stagC,std_stagC,n_realizations"
    elif ensemble:
        header = "t_us,d,mean_stagC,n_realizations"
    elif table.std is not None:
        header = "t_us,d,stagC,std"
    else:
        header = "t_us,d,stagC"
    lines = [header]
    for ti, t in enumerate(table.times):
        for di, d in enumerate(table.distances):
            cells = [_fmt(t), str(int(d)), _fmt(table.values[ti, di])]
            if table.std is not None:
                cells.append(_fmt(table.std[ti, di]))
            if ensemble:
                cells.append(str(table.n_realizations))
            lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def read_correlations_csv(text: str) -> CorrelationTable:
    """Inverse of :func:`correlations_csv` (accepts every header variant)."""
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise AnalysisError("empty correlations CSV")
    header = lines[0].split(",")
    known = {
        ("t_us", "d", "stagC"): (False, False),
        ("t_us", "d", "stagC", "std"): (True, False),
        ("t_us", "d", "mean_stagC", "std_stagC", "n_realizations"): (True, True),
        ("t_us", "d", "mean_stagC", "n_realizations"): (False, True),
    }
    key = tuple(header)
    if key not in known:
        raise AnalysisError(f"unrecognized correlations header: {lines[0]!r}")
    has_std, has_n = known[key]
    rows = []
    for ln in lines[1:]:
        cells = ln.split(",")
        if len(cells) != len(header):
            raise AnalysisError(f"row with {len(cells)} cells under {len(header)} columns")
        rows.append(cells)
    times = sorted({float(r[0]) for r in rows})
    dists = sorted({int(r[1]) for r in rows})
    t_idx = {repr(t): i for i, t in enumerate(times)}
    d_idx = {d: i for i, d in enumerate(dists)}
    values = np.full((len(times), len(dists)), np.nan)
    std = np.full((len(times), len(dists)), np.nan) if has_std else None
    n_real = 1
    for r in rows:
        i, j = t_idx[repr(float(r[0]))], d_idx[int(r[1])]
        values[i, j] = float(r[2])
        if has_std:
            std[i, j] = float(r[3])
        if has_n:
            n_real = int(r[-1])
    if np.any(np.isnan(values)):
        raise AnalysisError("correlations CSV does not cover the full time x distance grid")
    return CorrelationTable(
        times=np.array(times),
        distances=np.array(dists),
        values=values,
        staggered=True,
        std=std,
        n_realizations=n_real,
    )


def shots_csv(groups: list[tuple[float, np.ndarray]]) -> str:
    """Serialize [(t_us, (n, L) 0/1 array), ...] as t_us,bitstring rows."""
    lines = ["t_us,bitstring"]
    for t, shots in groups:
        for row in np.asarray(shots):
            lines.append(f"{_fmt(t)},{''.join(str(int(b)) for b in row)}")
    return "\n".join(lines) + "\n"


def ingest_shots(text: str) -> list[tuple[float, np.ndarray]]:
    """Parse a shot CSV into per-time groups, sorted by time.

    Rows are grouped by their literal time field; all bitstrings must share
    one length. Malformed rows raise :class:`ShotFileError` with the
    offending 1-based line number.
    """
    lines = text.splitlines()
    if not lines or lines[0].strip() != "t_us,bitstring":
        raise ShotFileError("line 1: expected header 't_us,bitstring'")
    groups: dict[str, list[list[int]]] = {}
    length = None
    for ln_no, ln in enumerate(lines[1:], start=2):
        if not ln.strip():
            continue
        cells = ln.split(",")
        if len(cells) != 2:
            raise ShotFileError(f"line {ln_no}: expected 2 fields, got {len(cells)}")
        t_str, bits = cells[0].strip(), cells[1].strip()
        try:
            float(t_str)
        except ValueError:
            raise ShotFileError(f"line {ln_no}: bad time {t_str!r}") from None
        if not bits or any(c not in "01" for c in bits):
            raise ShotFileError(f"line {ln_no}: bitstring must be nonempty 0/1, got {bits!r}")
        if length is None:
            length = len(bits)
        elif len(bits) != length:
            raise ShotFileError(
                f"line {ln_no}: bitstring length {len(bits)} != {length} seen earlier"
            )
        groups.setdefault(t_str, []).append([int(c) for c in bits])
    if not groups:
        raise ShotFileError("line 2: file contains no shot rows")
    out = [(float(t), np.array(rows, dtype=np.uint8)) for t, rows in groups.items()]
    out.sort(key=lambda pair: pair[0])
    return out


def table_from_shot_groups(
    groups: list[tuple[float, np.ndarray]],
    d_max: int,
    bulk_margin: int = 2,
    boundary: str = "open",
) -> CorrelationTable:
    """Staggered correlation table estimated from ingested shots."""
    rows = [correlations_from_shots(s, d_max, bulk_margin, boundary) for _, s in groups]
    table = CorrelationTable(
        times=np.array([t for t, _ in groups]),
        distances=np.arange(1, d_max + 1),
        values=np.array(rows),
        staggered=False,
        bulk_margin=bulk_margin,
        boundary=boundary,
    )
    return staggered(table)
