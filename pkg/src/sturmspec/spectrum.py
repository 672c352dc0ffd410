"""Band approximations of the spectrum and fractal estimators.

At level ``k`` the spectrum is approximated by the bands ``{E : |y_k(E)| <= 1}``
of the ``q_k``-periodic approximant, where ``y_k`` is the half-trace produced
by the trace map.  Evaluating ``y_k`` costs O(k) per energy, so the search
works on dense energy grids and only bisects where an edge is bracketed.
"""

from __future__ import annotations

import bisect
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .numberth import ContinuedFraction, approximants
from .tracemap import ModelParams, orbit_point, orbit_with_derivative

__all__ = [
    "Band",
    "BandSet",
    "Gap",
    "ThicknessReport",
    "GapOpeningRow",
    "BandCountError",
    "bands",
    "spectrum_cover",
    "gaps_from_bands",
    "box_dimension",
    "default_scales",
    "box_counts",
    "thickness_denseness",
    "gap_opening_study",
    "floquet_band_edges",
]

log = logging.getLogger(__name__)

GRID_FACTOR = 8
MAX_REFINE = 6
MAX_DEPTH = 40
MAX_LEVEL_SIZE = 5 * 10**4
BOX_SNAP = 1e-9


class BandCountError(RuntimeError):
    """The number of bands found differs from ``q_k`` after all refinements."""


@dataclass(frozen=True)
class Band:
    lo: float
    hi: float
    level: int


@dataclass(frozen=True)
class BandSet:
    lo: np.ndarray
    hi: np.ndarray
    level: int | tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lo", np.asarray(self.lo, dtype=float))
        object.__setattr__(self, "hi", np.asarray(self.hi, dtype=float))

    def __len__(self) -> int:
        return len(self.lo)

    def __iter__(self):
        lvl = self.level if isinstance(self.level, int) else self.level[0]
        for a, b in zip(self.lo, self.hi):
            yield Band(float(a), float(b), lvl)

    @property
    def total_measure(self) -> float:
        return float(np.sum(self.hi - self.lo))

    @property
    def hull(self) -> tuple[float, float]:
        return float(self.lo[0]), float(self.hi[-1])

    @classmethod
    def from_intervals(cls, intervals: Iterable[tuple[float, float]], level=0) -> "BandSet":
        iv = sorted(intervals)
        return cls(np.array([a for a, _ in iv]), np.array([b for _, b in iv]), level)

    def contains(self, E, tol: float = 0.0) -> np.ndarray:
        E = np.atleast_1d(np.asarray(E, dtype=float))
        i = np.searchsorted(self.lo, E + tol, side="right") - 1
        ok = i >= 0
        ic = np.clip(i, 0, None)
        return ok & (E <= self.hi[ic] + tol)


@dataclass(frozen=True)
class Gap:
    lo: float
    hi: float
    label: int | None = None
    ids_value: float | None = None
    level: int | tuple[int, ...] = 0

    @property
    def width(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)


def _q(alpha: ContinuedFraction, k: int) -> int:
    return 1 if k == 0 else approximants(alpha, k)[-1].q


# -- band search -------------------------------------------------------------


def _evaluate(params: ModelParams, k: int, E: np.ndarray):
    p, dp = orbit_with_derivative(params, E, k)
    y = np.asarray(p.y, dtype=float)
    dy = np.asarray(dp.y, dtype=float)
    return y, dy


def _hermite_extremum(e0, e1, y0, y1, d0, d1):
    """Value of the cubic Hermite interpolant at its interior critical point."""
    h = e1 - e0
    # cubic in t in [0,1]: c0 + c1 t + c2 t^2 + c3 t^3
    c0, c1 = y0, d0 * h
    c2 = 3 * (y1 - y0) - (2 * d0 + d1) * h
    c3 = 2 * (y0 - y1) + (d0 + d1) * h
    a, b, c = 3 * c3, 2 * c2, c1
    out = np.where(np.abs(y0) < np.abs(y1), y0, y1)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        disc = b * b - 4 * a * c
        sq = np.sqrt(np.maximum(disc, 0.0))
        for sgn in (1.0, -1.0):
            t = np.where(np.abs(a) > 1e-300, (-b + sgn * sq) / (2 * a), -c / np.where(b == 0, 1.0, b))
            inside = (disc >= 0) & (t > 0) & (t < 1)
            val = c0 + t * (c1 + t * (c2 + t * c3))
            better = inside & (np.abs(val) < np.abs(out))
            out = np.where(better, val, out)
    return out


def _unresolved(e0, e1, y0, y1, d0, d1):
    """Cells that may hide band edges beyond what the endpoint states show."""
    fin = np.isfinite(y0) & np.isfinite(y1) & np.isfinite(d0) & np.isfinite(d1)
    in0, in1 = np.abs(y0) <= 1, np.abs(y1) <= 1
    turn = d0 * d1 < 0
    # inside a band y is monotone, so a turning point means a hidden gap
    both_in = in0 & in1 & turn
    # y on the same side of the band window with a turning point: a hidden
    # pair of bands unless the extremum stays clear of the window
    same_out = ~in0 & ~in1 & (np.sign(y0) == np.sign(y1))
    ext = _hermite_extremum(e0, e1, y0, y1, d0, d1)
    margin = 0.5 * (np.minimum(np.abs(y0), np.abs(y1)) - 1.0)
    near = np.abs(ext) < 1.0 + np.maximum(margin, 0.0)
    hidden_pair = same_out & turn & near
    # opposite sides: y runs through the whole window, so a band is inside
    cross = ~in0 & ~in1 & (np.sign(y0) != np.sign(y1))
    # an edge-containing cell with a turning point may hold three edges
    edge_turn = (in0 != in1) & turn
    return fin & (both_in | hidden_pair | cross | edge_turn)


def _grid_cells(windows: np.ndarray, n: int):
    """Cells of uniform grids laid over each window, ``n`` points in total.

    Returns the grid points and index pairs ``(i, i+1)`` of cells that lie
    inside one window.
    """
    width = windows[:, 1] - windows[:, 0]
    per = np.maximum(4, np.ceil(n * width / width.sum()).astype(np.int64))
    pts = np.concatenate([np.linspace(a, b, m + 1) for (a, b), m in zip(windows, per)])
    start = np.concatenate([[0], np.cumsum(per + 1)[:-1]])
    left = np.concatenate([np.arange(s0, s0 + m) for s0, m in zip(start, per)])
    return pts, left


def _isolate(params: ModelParams, k: int, windows: np.ndarray, n: int) -> np.ndarray:
    """Brackets ``(a, b)`` with exactly one change of the in-band state."""
    E, left = _grid_cells(windows, n)
    y, dy = _evaluate(params, k, E)
    brackets = []
    e0, e1 = E[left], E[left + 1]
    y0, y1, d0, d1 = y[left], y[left + 1], dy[left], dy[left + 1]
    for depth in range(MAX_DEPTH + 1):
        with np.errstate(invalid="ignore", over="ignore"):
            state0 = np.abs(y0) <= 1
            state1 = np.abs(y1) <= 1
            flag = _unresolved(e0, e1, y0, y1, d0, d1) if depth < MAX_DEPTH else np.zeros(len(e0), bool)
        done = ~flag & (state0 != state1)
        if np.any(done):
            brackets.append(np.column_stack([e0[done], e1[done]]))
        if not np.any(flag):
            break
        a, b = e0[flag], e1[flag]
        ya, yb, da, db = y0[flag], y1[flag], d0[flag], d1[flag]
        mid = 0.5 * (a + b)
        ym, dm = _evaluate(params, k, mid)
        e0 = np.concatenate([a, mid])
        e1 = np.concatenate([mid, b])
        y0 = np.concatenate([ya, ym])
        y1 = np.concatenate([ym, yb])
        d0 = np.concatenate([da, dm])
        d1 = np.concatenate([dm, db])
    if not brackets:
        return np.empty((0, 2))
    out = np.concatenate(brackets)
    return out[np.argsort(out[:, 0])]


def _bisect_edges(params: ModelParams, k: int, brackets: np.ndarray, tol: float):
    """Shrink each bracket to ``tol`` (0 means to adjacent doubles); returns the
    in-band endpoint of each bracket and whether the left end was in-band."""
    a = brackets[:, 0].copy()
    b = brackets[:, 1].copy()
    with np.errstate(invalid="ignore"):
        in_a = np.abs(np.asarray(orbit_point(params, a, k).y)) <= 1
    for _ in range(80):
        mid = 0.5 * (a + b)
        active = (b - a > tol) & (mid > a) & (mid < b)
        if not np.any(active):
            break
        with np.errstate(invalid="ignore"):
            in_m = np.abs(np.asarray(orbit_point(params, mid[active], k).y)) <= 1
        same = in_m == in_a[active]
        ai, bi = a[active], b[active]
        a[active] = np.where(same, mid[active], ai)
        b[active] = np.where(same, bi, mid[active])
    return np.where(in_a, a, b), in_a


def _search(params, k, windows, n, edge_tol):
    br = _isolate(params, k, windows, n)
    edges, _ = _bisect_edges(params, k, br, edge_tol)
    if len(edges) % 2:
        return None
    return BandSet(edges[0::2], edges[1::2], k)


def _nested_windows(params: ModelParams, k: int, **kw) -> np.ndarray:
    """Slightly padded components of the level ``k-2`` cover, which contains
    the level-``k`` bands."""
    cover = spectrum_cover(params, k - 2, **kw)
    pad = 1e-7 * (cover.hi - cover.lo) + 1e-12
    lo, hi = _merge(cover.lo - pad, cover.hi + pad)
    return np.column_stack([lo, hi])


def bands(
    params: ModelParams,
    k: int,
    grid_factor: int = GRID_FACTOR,
    edge_tol: float = 0.0,
    max_refine: int = MAX_REFINE,
    check_count: bool = True,
) -> BandSet:
    """Maximal intervals of ``{E : |y_k(E)| <= 1}`` inside ``[-2-lambda, 2+lambda]``.

    The first pass grids the whole window ``[-2-lambda, 2+lambda]``.  For
    ``lambda > 0`` the number of bands must equal ``q_k``; on a mismatch
    (typically narrow bands separated by regions where ``y_k`` overflows)
    the search is restricted to the level ``k-2`` cover and the grid there is
    doubled up to ``max_refine`` times before ``BandCountError`` is raised.
    ``edge_tol=0`` bisects edges to adjacent floats.
    """
    if k < 1:
        raise ValueError("level must be >= 1")
    q = _q(params.alpha, k)
    if q > MAX_LEVEL_SIZE:
        raise ValueError(f"q_{k} = {q} exceeds {MAX_LEVEL_SIZE}")
    bound = params.energy_bound
    n = grid_factor * q
    # offset keeps grid points off the symmetric free band edges
    whole = np.array([[-bound - 1e-9, bound + 1e-9 * math.pi]])
    found = _search(params, k, whole, n, edge_tol)
    if found is not None and (params.lam == 0 or not check_count or len(found) == q):
        return found
    if k < 3:
        windows, attempts = whole, range(1, max_refine + 1)
    else:
        windows, attempts = _nested_windows(params, k, grid_factor=grid_factor, edge_tol=edge_tol,
                                            max_refine=max_refine, check_count=check_count), range(max_refine + 1)
    for attempt in attempts:
        log.debug("level %d: %s bands, expected %d; refining", k, None if found is None else len(found), q)
        found = _search(params, k, windows, n * 2**attempt, edge_tol)
        if found is not None and (not check_count or len(found) == q):
            return found
    got = "odd edge count" if found is None else f"{len(found)} bands"
    raise BandCountError(f"level {k}: {got}, expected q_k = {q} after {max_refine} refinements")


def _merge(lo: np.ndarray, hi: np.ndarray, tol: float = 0.0):
    order = np.argsort(lo, kind="stable")
    lo, hi = lo[order], hi[order]
    out_lo, out_hi = [lo[0]], [hi[0]]
    for a, b in zip(lo[1:], hi[1:]):
        if a <= out_hi[-1] + tol:
            out_hi[-1] = max(out_hi[-1], b)
        else:
            out_lo.append(a)
            out_hi.append(b)
    return np.array(out_lo), np.array(out_hi)


def spectrum_cover(params: ModelParams, k: int, merge_tol: float = 0.0, **kw) -> BandSet:
    """Coalesced union of the level-``k`` and level-``k+1`` bands."""
    b1 = bands(params, k, **kw)
    b2 = bands(params, k + 1, **kw)
    lo, hi = _merge(np.concatenate([b1.lo, b2.lo]), np.concatenate([b1.hi, b2.hi]), merge_tol)
    return BandSet(lo, hi, (k, k + 1))


def gaps_from_bands(bs: BandSet) -> list[Gap]:
    if len(bs) == 0:
        raise ValueError("empty band set")
    return [Gap(float(a), float(b), level=bs.level) for a, b in zip(bs.hi[:-1], bs.lo[1:]) if b > a]


def floquet_band_edges(params: ModelParams, k: int) -> np.ndarray:
    """Band edges from dense eigenproblems (periodic and antiperiodic).

    Independent of the trace map; used as an oracle.  Costs O(q_k^3).
    """
    from .words import rotation_sequence

    q = _q(params.alpha, k)
    v = params.lam * np.frombuffer(rotation_sequence(params.alpha, 0.0, q).encode(), np.uint8) - 48 * params.lam
    edges = []
    for corner in (1.0, -1.0):
        h = np.diag(v.astype(float)) + np.diag(np.ones(q - 1), 1) + np.diag(np.ones(q - 1), -1)
        if q == 1:
            h[0, 0] += 2 * corner
        elif q == 2:
            h[0, 1] += corner
            h[1, 0] += corner
        else:
            h[0, -1] += corner
            h[-1, 0] += corner
        edges.append(np.linalg.eigvalsh(h))
    return np.sort(np.concatenate(edges)).reshape(-1, 2)


# -- fractal estimators ------------------------------------------------------


def default_scales(bs: BandSet, octaves: int = 8, first: int = 2) -> np.ndarray:
    """Box sizes ``diam * 2^-j`` for ``j = first .. first + octaves``."""
    lo, hi = bs.hull
    return (hi - lo) * 2.0 ** -np.arange(first, first + octaves + 1)


def box_counts(bs: BandSet, scales: Sequence[float]) -> np.ndarray:
    """Number of half-open boxes ``[E0 + i s, E0 + (i+1) s)`` meeting the band set.

    A band counts the boxes it overlaps in positive length (a closed right
    endpoint sitting exactly on a box boundary does not open a new box);
    degenerate bands count the one box holding them.
    """
    e0 = bs.lo[0]
    out = []
    for s in scales:
        # endpoints within BOX_SNAP box widths of a boundary count as on it
        i0 = np.floor((bs.lo - e0) / s + BOX_SNAP).astype(np.int64)
        i1 = np.maximum(np.ceil((bs.hi - e0) / s - BOX_SNAP).astype(np.int64) - 1, i0)
        # bands are sorted and disjoint: count the union of [i0, i1]
        start = np.maximum(i0, np.concatenate([[i0[0] - 1], np.maximum.accumulate(i1)[:-1]]) + 1)
        out.append(int(np.sum(np.maximum(i1 - start + 1, 0))))
    return np.array(out)


def box_dimension(bs: BandSet, scales: Sequence[float] | None = None) -> float:
    """Least-squares slope of ``log N(s)`` against ``log(1/s)``."""
    scales = default_scales(bs) if scales is None else np.asarray(scales, dtype=float)
    if len(scales) < 4 or np.log10(scales.max() / scales.min()) < 2:
        raise ValueError("need at least 4 scales spanning 2 decades")
    counts = box_counts(bs, scales)
    slope, _ = np.polyfit(np.log(1.0 / scales), np.log(counts), 1)
    return float(slope)


@dataclass(frozen=True)
class ThicknessReport:
    tau: float
    theta: float
    dim_lower: float
    dim_upper: float

    def as_dict(self) -> dict:
        return {"tau": self.tau, "theta": self.theta, "dim_lower": self.dim_lower, "dim_upper": self.dim_upper}


def _dim_bound(t: float) -> float:
    if t <= 0:
        return 0.0
    if math.isinf(t):
        return 1.0
    return math.log(2.0) / math.log(2.0 + 1.0 / t)


def thickness_denseness(bs: BandSet) -> ThicknessReport:
    """Thickness and denseness for the presentation ordered by decreasing gap length."""
    if len(bs) < 2:
        raise ValueError("need at least two bands")
    g_lo, g_hi = bs.hi[:-1], bs.lo[1:]
    width = g_hi - g_lo
    keep = width > 0
    g_lo, g_hi, width = g_lo[keep], g_hi[keep], width[keep]
    hull_lo, hull_hi = bs.hull
    order = np.argsort(-width, kind="stable")
    removed: list[int] = []  # positions (gap indices) already removed, sorted
    ratios = []
    for idx in order:
        pos = bisect.bisect_left(removed, idx)
        left = g_hi[removed[pos - 1]] if pos > 0 else hull_lo
        right = g_lo[removed[pos]] if pos < len(removed) else hull_hi
        removed.insert(pos, idx)
        w = width[idx]
        ratios.append((g_lo[idx] - left) / w)
        ratios.append((right - g_hi[idx]) / w)
    tau, theta = float(min(ratios)), float(max(ratios))
    return ThicknessReport(tau, theta, _dim_bound(tau), _dim_bound(theta))


# -- gap opening -------------------------------------------------------------


@dataclass(frozen=True)
class GapOpeningRow:
    lam: float
    width: float | None
    ratio: float | None
    ids_value: float | None
    lo: float | None = None
    hi: float | None = None
    error: str | None = None


def gap_opening_study(
    alpha: ContinuedFraction,
    m: int,
    lambdas: Sequence[float],
    level: int = 12,
    size: int = 10**4,
    tol: float | None = None,
) -> list[GapOpeningRow]:
    """Width of the gap labelled ``m`` as the coupling decreases.

    The gap is found among the gaps of the level-``level`` cover by matching
    the density of states at its midpoint against ``{m alpha}``.
    """
    from .ids import count_below_energies, gap_labels, potential

    tol = 3.0 / size if tol is None else tol
    target = gap_labels(alpha, [m])[0][1]
    rows = []
    for lam in lambdas:
        if lam <= 0:
            raise ValueError("lambdas must be positive")
        params = ModelParams(float(lam), alpha)
        try:
            gaps = gaps_from_bands(spectrum_cover(params, level))
        except BandCountError as exc:
            rows.append(GapOpeningRow(lam, None, None, None, error=str(exc)))
            continue
        mids = np.array([g.midpoint for g in gaps])
        n = count_below_energies(potential(params, 0.0, size), mids) / size
        hit = np.flatnonzero(np.abs(n - target) < tol)
        if len(hit) == 0:
            rows.append(GapOpeningRow(lam, None, None, None, error=f"no gap with IDS {target:.6f} at level {level}"))
            continue
        if len(hit) > 1:
            rows.append(GapOpeningRow(lam, None, None, None, error="ambiguous gap match"))
            continue
        g = gaps[hit[0]]
        rows.append(GapOpeningRow(lam, g.width, g.width / lam, float(n[hit[0]]), g.lo, g.hi))
    return rows
