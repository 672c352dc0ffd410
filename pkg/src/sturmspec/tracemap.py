"""Trace maps for Sturmian Schrödinger operators.

Points are half-trace triples ``(x, y, z)``.  All point-valued functions
accept scalars or numpy arrays of matching shape, so a whole energy grid can
be pushed through the dynamics at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

import numpy as np

from .numberth import ContinuedFraction, approximants
from .words import rotation_sequence

__all__ = [
    "TracePoint",
    "ModelParams",
    "OrbitResult",
    "QFReport",
    "chebyshev_U",
    "chebyshev_U_with_derivative",
    "matrix_power_via_chebyshev",
    "trace_step",
    "trace_step_with_derivative",
    "apply_U",
    "apply_P",
    "aux_maps",
    "fricke_vogt",
    "initial_point",
    "orbit_point",
    "orbit_with_derivative",
    "trace_orbit",
    "transfer_matrices",
    "transfer_half_traces",
    "trace_jacobian",
    "jacobian_at_P1",
    "eigenvalues_at_P1",
    "semiconjugacy_F",
    "torus_step",
    "torus_matrix",
    "expanding_direction",
    "qf_check",
    "J_prime",
]

P1 = (1.0, 1.0, 1.0)


class TracePoint(NamedTuple):
    x: float | np.ndarray
    y: float | np.ndarray
    z: float | np.ndarray

    def norm(self):
        return np.maximum(np.maximum(np.abs(self.x), np.abs(self.y)), np.abs(self.z))


@dataclass(frozen=True)
class ModelParams:
    lam: float
    alpha: ContinuedFraction

    def __post_init__(self):
        if not self.lam >= 0:
            raise ValueError("lambda must be >= 0")

    @property
    def invariant(self) -> float:
        """Level ``lambda^2/4`` of the Fricke-Vogt invariant."""
        return self.lam * self.lam / 4.0

    @property
    def energy_bound(self) -> float:
        return 2.0 + self.lam


# -- Chebyshev polynomials ---------------------------------------------------


def chebyshev_U(a: int, x):
    """Chebyshev polynomial of the second kind, ``U_{-1} = 0``, ``U_0 = 1``."""
    if a < -1:
        raise ValueError("a must be >= -1")
    x = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    prev, cur = 0.0 * x, 1.0 + 0.0 * x
    if a == -1:
        return prev
    for _ in range(a):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur


def chebyshev_U_with_derivative(a: int, x):
    """``(U_{a-2}, U_{a-1}, U_a)`` and their derivatives, for ``a >= 1``."""
    zero = 0.0 * np.asarray(x, dtype=float)
    u = [zero, zero + 1.0]  # U_{-1}, U_0
    du = [zero, zero]
    for _ in range(a):
        u.append(2.0 * x * u[-1] - u[-2])
        du.append(2.0 * u[-2] + 2.0 * x * du[-1] - du[-2])
    return (u[-3], u[-2], u[-1]), (du[-3], du[-2], du[-1])


def matrix_power_via_chebyshev(A: np.ndarray, a: int) -> np.ndarray:
    """``A^a = U_{a-1}(x) A - U_{a-2}(x) I`` with ``x = tr(A)/2``; needs ``det A = 1``."""
    A = np.asarray(A, dtype=float)
    if abs(np.linalg.det(A) - 1.0) > 1e-12:
        raise ValueError("matrix is not unimodular")
    if a < 1:
        raise ValueError("a must be >= 1")
    x = 0.5 * np.trace(A)
    u1 = chebyshev_U(a - 1, x)
    u2 = chebyshev_U(a - 2, x) if a >= 1 else 0.0
    return u1 * A - u2 * np.eye(2)


# -- the maps ----------------------------------------------------------------


def trace_step(a: int, p: TracePoint) -> TracePoint:
    """``T_a(x, y, z) = (x U_a(y) - z U_{a-1}(y), x U_{a-1}(y) - z U_{a-2}(y), y)``."""
    x, y, z = p
    u0, u1 = 1.0 + 0.0 * y, 0.0 * y  # U_0, U_{-1}
    # advance to (U_{a-1}, U_{a-2}) then one more step for U_a
    for _ in range(a - 1):
        u0, u1 = 2.0 * y * u0 - u1, u0
    ua = 2.0 * y * u0 - u1
    return TracePoint(x * ua - z * u0, x * u0 - z * u1, y)


def trace_step_with_derivative(a: int, p: TracePoint, dp: TracePoint):
    """Push a point and a tangent vector through ``T_a``."""
    x, y, z = p
    dx, dy, dz = dp
    (u2, u1, u0), (du2, du1, du0) = chebyshev_U_with_derivative(a, y)
    new = TracePoint(x * u0 - z * u1, x * u1 - z * u2, y)
    dnew = TracePoint(
        u0 * dx + (x * du0 - z * du1) * dy - u1 * dz,
        u1 * dx + (x * du1 - z * du2) * dy - u2 * dz,
        dy,
    )
    return new, dnew


def apply_U(p: TracePoint) -> TracePoint:
    x, y, z = p
    return TracePoint(2.0 * x * z - y, x, z)


def apply_P(p: TracePoint) -> TracePoint:
    x, y, z = p
    return TracePoint(x, z, y)


def aux_maps(which: str, p: TracePoint) -> TracePoint:
    if which == "U":
        return apply_U(p)
    if which == "P":
        return apply_P(p)
    raise ValueError(f"unknown auxiliary map {which!r}")


def fricke_vogt(p: TracePoint):
    x, y, z = p
    return x * x + y * y + z * z - 2.0 * x * y * z - 1.0


def initial_point(params: ModelParams, E) -> TracePoint:
    E = np.asarray(E, dtype=float) if not np.isscalar(E) else float(E)
    return TracePoint(0.5 * (E - params.lam), 0.5 * E, 1.0 + 0.0 * E)


def orbit_point(params: ModelParams, E, k: int) -> TracePoint:
    """``(x_k, y_k, z_k)(E)``; no escape detection, overflow propagates as inf/nan."""
    p = initial_point(params, E)
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, k + 1):
            p = trace_step(params.alpha[j], p)
    return p


def orbit_with_derivative(params: ModelParams, E, k: int):
    """Level-``k`` point and its energy derivative (chain rule through ``DT_a``)."""
    p = initial_point(params, E)
    one = 1.0 + 0.0 * np.asarray(E, dtype=float)
    dp = TracePoint(0.5 * one, 0.5 * one, 0.0 * one)
    with np.errstate(over="ignore", invalid="ignore"):
        for j in range(1, k + 1):
            p, dp = trace_step_with_derivative(params.alpha[j], p, dp)
    return p, dp


@dataclass
class OrbitResult:
    escaped: bool
    escape_step: int | None
    steps: int
    max_norm: float
    invariant_drift: float
    overflow: bool = False
    trajectory: list[tuple[int, int, TracePoint]] = field(default_factory=list)

    @property
    def status(self) -> str:
        if self.escaped:
            return f"escaped at step {self.escape_step}"
        return f"bounded through {self.steps}"


ESCAPE_RUN = 3


def escape_radius(lam: float) -> float:
    return max(4.0, 2.0 + lam)


def trace_orbit(params: ModelParams, E: float, kmax: int, keep_trajectory: bool = True) -> OrbitResult:
    """Iterate the trace map along the partial quotients of ``alpha``.

    The orbit is declared escaped once its max-norm exceeds
    ``max(4, 2 + lambda)`` after growing on ``ESCAPE_RUN`` consecutive steps.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    r_esc = escape_radius(params.lam)
    level = params.invariant
    p = initial_point(params, float(E))
    traj = [(0, 0, p)] if keep_trajectory else []
    norm = float(p.norm())
    max_norm, drift = norm, abs(fricke_vogt(p) - level)
    run = 0
    for k in range(1, kmax + 1):
        a = params.alpha[k]
        with np.errstate(over="ignore", invalid="ignore"):
            p = trace_step(a, p)
        new_norm = float(p.norm())
        if not math.isfinite(new_norm):
            return OrbitResult(True, k, k, math.inf, drift, overflow=True, trajectory=traj)
        if keep_trajectory:
            traj.append((k, a, p))
        drift = max(drift, abs(fricke_vogt(p) - level))
        max_norm = max(max_norm, new_norm)
        run = run + 1 if new_norm > norm else 0
        norm = new_norm
        if norm > r_esc and run >= ESCAPE_RUN:
            return OrbitResult(True, k, k, max_norm, drift, trajectory=traj)
    return OrbitResult(False, None, kmax, max_norm, drift, trajectory=traj)


# -- explicit transfer matrices (oracle) -------------------------------------


def _letter_matrix(E, v):
    """Transfer matrices ``[[E - v, -1], [1, 0]]`` stacked along the energy axis."""
    E = np.atleast_1d(np.asarray(E, dtype=float))
    m = np.zeros(E.shape + (2, 2))
    m[..., 0, 0] = E - v
    m[..., 0, 1] = -1.0
    m[..., 1, 0] = 1.0
    return m


def transfer_matrices(params: ModelParams, k: int, E) -> tuple[np.ndarray, np.ndarray]:
    """``(A_k(E), A_{k-1}(E))`` by explicit products over the potential word.

    ``A_{-1} = [[1, -lambda], [0, 1]]`` and ``A_0 = [[E, -1], [1, 0]]``.
    """
    lam = params.lam
    E = np.atleast_1d(np.asarray(E, dtype=float))
    a0 = _letter_matrix(E, 0.0)
    am1 = np.broadcast_to(np.array([[1.0, -lam], [0.0, 1.0]]), E.shape + (2, 2)).copy()
    if k == 0:
        return a0, am1
    if k < 0:
        raise ValueError("level must be >= 0")
    qs = [1] + [ap.q for ap in approximants(params.alpha, k)]
    if qs[k] > 10**5:
        raise ValueError(f"q_{k} = {qs[k]} too large for explicit products")
    word = rotation_sequence(params.alpha, 0.0, qs[k])
    m0, m1 = _letter_matrix(E, 0.0), _letter_matrix(E, lam)
    prod = np.broadcast_to(np.eye(2), E.shape + (2, 2)).copy()
    prev = a0 if k == 1 else None
    for n, letter in enumerate(word, start=1):
        prod = (m1 if letter == "1" else m0) @ prod
        if k >= 2 and n == qs[k - 1]:
            prev = prod.copy()
    return prod, prev


def transfer_half_traces(params: ModelParams, k: int, E) -> TracePoint:
    """``(tr(A_k A_{k-1})/2, tr(A_k)/2, tr(A_{k-1})/2)``."""
    ak, akm1 = transfer_matrices(params, k, E)
    x = 0.5 * np.trace(ak @ akm1, axis1=-2, axis2=-1)
    y = 0.5 * np.trace(ak, axis1=-2, axis2=-1)
    z = 0.5 * np.trace(akm1, axis1=-2, axis2=-1)
    if np.isscalar(E) or np.ndim(E) == 0:
        return TracePoint(float(x[0]), float(y[0]), float(z[0]))
    return TracePoint(x, y, z)


# -- derivatives -------------------------------------------------------------


def trace_jacobian(a: int, p: TracePoint) -> np.ndarray:
    x, y, z = (float(c) for c in p)
    (u2, u1, u0), (du2, du1, du0) = chebyshev_U_with_derivative(a, y)
    return np.array(
        [
            [u0, x * du0 - z * du1, -u1],
            [u1, x * du1 - z * du2, -u2],
            [0.0, 1.0, 0.0],
        ]
    )


def jacobian_at_P1(a: int) -> np.ndarray:
    return np.array([[a + 1, a * a + a, -a], [a, a * a - a, 1 - a], [0, 1, 0]], dtype=float)


def eigenvalues_at_P1(a: int) -> np.ndarray:
    """Closed-form spectrum of ``DT_a(1,1,1)``: expanding, contracting, -1."""
    r = a * math.sqrt(a * a + 4.0)
    return np.array([(a * a + r) / 2.0 + 1.0, (a * a - r) / 2.0 + 1.0, -1.0])


# -- torus factor ------------------------------------------------------------


def semiconjugacy_F(theta, phi) -> TracePoint:
    two_pi = 2.0 * np.pi
    return TracePoint(np.cos(two_pi * (theta + phi)), np.cos(two_pi * theta), np.cos(two_pi * phi))


def torus_step(a: int, theta, phi):
    return np.mod(a * theta + phi, 1.0), np.mod(theta, 1.0)


def torus_matrix(a: int) -> np.ndarray:
    return np.array([[a, 1], [1, 0]], dtype=np.int64)


def expanding_direction(alpha: ContinuedFraction, j: int) -> tuple[int, int]:
    """``(M_{a_j} ... M_{a_1})^T (1, 0)``, which equals ``(q_j, p_j)``."""
    m = [[1, 0], [0, 1]]
    for i in range(1, j + 1):
        a = alpha[i]
        # left-multiply by [[a, 1], [1, 0]]
        m = [[a * m[0][0] + m[1][0], a * m[0][1] + m[1][1]], [m[0][0], m[0][1]]]
    return m[0][0], m[0][1]


# -- quadratic forms at the singularity --------------------------------------

DU_P1 = np.array([[2, -1, 2], [1, 0, 0], [0, 0, 1]], dtype=np.int64)
DUP_P1 = np.array([[2, 2, -1], [1, 0, 0], [0, 1, 0]], dtype=np.int64)


def J_prime(v):
    x, y, z = v
    return x * x + y * y + z * z - 2 * (x * y + x * z + y * z)


def _linear_coc(x, y, z):
    return (x + 0.75 * y + 1.25 * z, -0.25 * y + 0.25 * z, y + z)


@dataclass
class QFReport:
    lattice_vectors: int
    failures: dict[str, int]
    coc_max_error: float
    coc_exact: bool

    @property
    def ok(self) -> bool:
        return not any(self.failures.values()) and self.coc_exact


def qf_check(radius: int = 10, samples: int = 1000, seed: int = 0) -> QFReport:
    """Check that ``DU(P1)`` and ``D(UP)(P1)`` preserve ``J'`` exactly on an integer
    lattice, and that the linear change of coordinates turns ``J'`` into
    ``x^2 + y^2 - z^2``."""
    from fractions import Fraction

    r = np.arange(-radius, radius + 1, dtype=np.int64)
    v = np.array(list(product(r, r, r)), dtype=np.int64).T
    base = J_prime(v)
    failures = {}
    for name, m in (("DU(P1)", DU_P1), ("D(UP)(P1)", DUP_P1)):
        failures[name] = int(np.count_nonzero(J_prime(m @ v) != base))
    rng = np.random.default_rng(seed)
    x, y, z = rng.uniform(-10, 10, size=(3, samples))
    coc_err = float(np.max(np.abs(J_prime(_linear_coc(x, y, z)) - (x * x + y * y - z * z))))
    exact = True
    for xi, yi, zi in rng.integers(-50, 51, size=(50, 3)):
        xf, yf, zf = Fraction(int(xi)), Fraction(int(yi)), Fraction(int(zi))
        w = (xf + Fraction(3, 4) * yf + Fraction(5, 4) * zf, Fraction(-1, 4) * yf + Fraction(1, 4) * zf, yf + zf)
        exact &= J_prime(w) == xf * xf + yf * yf - zf * zf
    return QFReport(v.shape[1], failures, coc_err, bool(exact))
