"""Integrated density of states by Sturm (inertia) counting."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from typing import Iterable, Sequence

import numpy as np

from .numberth import ContinuedFraction, approximants, quadratic_irrational
from .spectrum import Gap
from .tracemap import ModelParams
from .words import rotation_sequence

__all__ = [
    "DirichletOperator",
    "IDSTable",
    "LocalDimensionEstimate",
    "GapMatch",
    "potential",
    "count_below",
    "count_below_energies",
    "ids_curve",
    "free_ids",
    "gap_labels",
    "match_gaps_to_labels",
    "dos_local_dimension",
    "default_epsilons",
    "approximant_matrix",
]

PIVOT_FLOOR = 1e-300
DEFAULT_SIZE = 10**4


@dataclass(frozen=True)
class DirichletOperator:
    """``H^{[1,L]}``: diagonal ``lambda v(n)``, off-diagonals all one."""

    diagonal: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "diagonal", np.asarray(self.diagonal, dtype=float))

    @property
    def size(self) -> int:
        return len(self.diagonal)

    def dense(self) -> np.ndarray:
        n = self.size
        return np.diag(self.diagonal) + np.diag(np.ones(n - 1), 1) + np.diag(np.ones(n - 1), -1)


def potential(params: ModelParams, omega: float, size: int) -> DirichletOperator:
    if size < 1:
        raise ValueError("size must be >= 1")
    word = rotation_sequence(params.alpha, omega, size)
    v = np.frombuffer(word.encode("ascii"), dtype=np.uint8) - 48
    return DirichletOperator(params.lam * v.astype(float))


def count_below_energies(op: DirichletOperator, energies) -> np.ndarray:
    """Eigenvalues strictly below each energy, via the LDL^T pivot signs.

    Pivots ``d_1 = v_1 - E``, ``d_n = v_n - E - 1/d_{n-1}``; pivots smaller than
    ``PIVOT_FLOOR`` in magnitude are replaced by ``PIVOT_FLOOR`` with their sign
    (an exact zero counts as positive).
    """
    E = np.atleast_1d(np.asarray(energies, dtype=float))
    count = np.zeros(E.shape, dtype=np.int64)
    if op.size == 0:
        return count
    d = np.empty_like(E)
    mag = np.empty_like(E)
    inv = np.zeros_like(E)
    for v in op.diagonal:
        np.subtract(v, E, out=d)
        d -= inv
        np.abs(d, out=mag)
        np.maximum(mag, PIVOT_FLOOR, out=mag)
        np.copysign(mag, d, out=d)
        count += d < 0
        np.divide(1.0, d, out=inv)
    return count


def count_below(op: DirichletOperator, E: float) -> int:
    return int(count_below_energies(op, [E])[0])


@dataclass(frozen=True)
class IDSTable:
    energies: np.ndarray
    values: np.ndarray
    size: int

    def __call__(self, E):
        return np.interp(E, self.energies, self.values)

    @property
    def spacing(self) -> float:
        return float(np.min(np.diff(self.energies)))

    def inverse(self, u):
        """Smallest grid energy with ``N(E) >= u``."""
        i = np.searchsorted(self.values, u, side="left")
        return self.energies[np.clip(i, 0, len(self.energies) - 1)]


def ids_curve(params: ModelParams, omega: float, size: int, grid, workers: int = 1) -> IDSTable:
    """``N(E) = count_below(E) / L`` on a sorted grid.

    With ``workers > 1`` the grid is split into contiguous chunks counted in
    a thread pool; the result does not depend on the worker count.
    """
    grid = np.asarray(grid, dtype=float)
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")
    op = potential(params, omega, size)
    if workers <= 1 or len(grid) < 2 * workers:
        counts = count_below_energies(op, grid)
    else:
        chunks = np.array_split(grid, workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = np.concatenate(list(pool.map(lambda e: count_below_energies(op, e), chunks)))
    return IDSTable(grid, counts / size, size)


def free_ids(E):
    E = np.asarray(E, dtype=float)
    out = np.arccos(-np.clip(E, -2.0, 2.0) / 2.0) / np.pi
    return np.where(E <= -2, 0.0, np.where(E >= 2, 1.0, out))


def gap_labels(alpha: ContinuedFraction, m_range: Iterable[int]) -> list[tuple[int, float]]:
    """``(m, {m alpha})`` computed from the exact quadratic irrational."""
    a, b, c, d = quadratic_irrational(alpha)
    out = []
    with localcontext() as ctx:
        ctx.prec = 50
        value = (Decimal(a) + Decimal(b) * Decimal(d).sqrt()) / Decimal(c)
        for m in m_range:
            x = m * value
            out.append((int(m), float(x - x.to_integral_value(rounding="ROUND_FLOOR"))))
    return out


@dataclass
class GapMatch:
    gaps: list[Gap]
    unmatched_gaps: list[Gap] = field(default_factory=list)
    unmatched_labels: list[int] = field(default_factory=list)
    ambiguous: list[tuple[Gap, list[int]]] = field(default_factory=list)


def match_gaps_to_labels(
    gaps: Sequence[Gap],
    ids_values: Sequence[float] | IDSTable,
    labels: Sequence[tuple[int, float]],
    tol: float,
) -> GapMatch:
    """Attach to each gap the label ``m`` whose ``{m alpha}`` is within ``tol``
    of the density of states at the gap midpoint.  Label 0 is never used."""
    if isinstance(ids_values, IDSTable):
        ids_values = ids_values(np.array([g.midpoint for g in gaps]))
    labels = [(m, v) for m, v in labels if m != 0]
    vals = np.array([v for _, v in labels])
    result = GapMatch([])
    used = set()
    for g, n in zip(gaps, ids_values):
        hits = [labels[i][0] for i in np.flatnonzero(np.abs(vals - n) < tol)] if len(vals) else []
        if len(hits) == 1:
            result.gaps.append(Gap(g.lo, g.hi, hits[0], float(n), g.level))
            used.add(hits[0])
        else:
            unl = Gap(g.lo, g.hi, None, float(n), g.level)
            result.gaps.append(unl)
            if hits:
                result.ambiguous.append((unl, hits))
            else:
                result.unmatched_gaps.append(unl)
    result.unmatched_labels = [m for m, _ in labels if m not in used]
    return result


@dataclass
class LocalDimensionEstimate:
    d_estimate: float
    samples: list[tuple[float, float, float]]
    epsilons: np.ndarray
    discarded: int

    def as_dict(self) -> dict:
        return {
            "d_estimate": self.d_estimate,
            "epsilons": [float(e) for e in self.epsilons],
            "slopes": [s for _, s, _ in self.samples],
            "residuals": [r for _, _, r in self.samples],
            "energies": [e for e, _, _ in self.samples],
            "discarded": self.discarded,
        }


def default_epsilons(table: IDSTable, count: int = 9) -> np.ndarray:
    h = table.spacing
    diam = table.energies[-1] - table.energies[0]
    return np.geomspace(10 * h, 0.1 * diam, count)


def dos_local_dimension(
    table: IDSTable,
    epsilons: Sequence[float] | None = None,
    sample_count: int = 200,
    seed: int = 0,
    max_draws: int | None = None,
) -> LocalDimensionEstimate:
    """Median over dN-distributed energies of the slope of
    ``log(N(E+eps) - N(E-eps))`` against ``log eps``."""
    eps = default_epsilons(table) if epsilons is None else np.asarray(epsilons, dtype=float)
    if len(eps) < 4 or np.log10(eps.max() / eps.min()) < 2:
        raise ValueError("epsilons must contain >= 4 values spanning 2 decades")
    if eps.min() < 2 * table.spacing:
        raise ValueError("epsilons must be at least two grid spacings")
    rng = np.random.default_rng(seed)
    max_draws = 20 * sample_count if max_draws is None else max_draws
    log_eps = np.log(eps)
    samples, discarded, draws = [], 0, 0
    while len(samples) < sample_count and draws < max_draws:
        draws += 1
        E = float(table.inverse(rng.uniform(0.0, 1.0)))
        incr = table(E + eps) - table(E - eps)
        if np.any(incr <= 0):
            discarded += 1
            continue
        coef, res, *_ = np.polyfit(log_eps, np.log(incr), 1, full=True)
        samples.append((E, float(coef[0]), float(res[0]) if len(res) else 0.0))
    if not samples:
        raise RuntimeError("no usable samples")
    d = float(np.median([s for _, s, _ in samples]))
    return LocalDimensionEstimate(d, samples, eps, discarded)


def approximant_matrix(params: ModelParams, k: int, boundary: str = "dirichlet", size: int | None = None) -> np.ndarray:
    """Dense ``q_k x q_k`` matrix of the level-``k`` potential word.

    ``boundary`` is ``dirichlet``, ``periodic``, ``antiperiodic`` or ``bloch``
    (quasi-momentum pi/2, complex Hermitian).
    """
    q = approximants(params.alpha, k)[-1].q
    n = q if size is None else size
    h = potential(params, 0.0, n).dense().astype(complex if boundary == "bloch" else float)
    corner = {"dirichlet": 0.0, "periodic": 1.0, "antiperiodic": -1.0, "bloch": 1j}[boundary]
    if corner != 0:
        h[0, -1] += corner
        h[-1, 0] += np.conj(corner)
    return h
