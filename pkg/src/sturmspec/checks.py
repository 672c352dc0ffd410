"""Quick self-checks of the trace-map identities and word combinatorics.

Each check returns a :class:`CheckResult`; :func:`run_all` collects them.
Everything here runs in well under a second.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .numberth import parse_cf
from .tracemap import (
    ModelParams,
    TracePoint,
    eigenvalues_at_P1,
    fricke_vogt,
    initial_point,
    jacobian_at_P1,
    qf_check,
    semiconjugacy_F,
    torus_step,
    trace_jacobian,
    trace_step,
)
from .words import (
    abelianization,
    cmps_substitution,
    complexity,
    cutting_sequence,
    fixed_point,
    letter_counts,
    rotation_sequence,
    rotation_slope,
)

__all__ = ["CheckResult", "run_all", "CHECKS"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    tol: float

    def as_dict(self) -> dict:
        return asdict(self)


def check_invariant(rng, n=1000, amax=8, box=1.0) -> CheckResult:
    # outside the unit cube |T_a p| grows like U_a(y) and rounding in I grows
    # with its square, so the fixed relative bound is only meaningful here
    pts = TracePoint(*rng.uniform(-box, box, size=(3, n)))
    worst = 0.0
    for a in range(1, amax + 1):
        q = trace_step(a, pts)
        err = np.abs(fricke_vogt(q) - fricke_vogt(pts)) / (1 + pts.norm() ** 3)
        worst = max(worst, float(err.max()))
    return CheckResult("fricke_vogt_invariant", worst <= 1e-12, worst, 1e-12)


def check_initial_line(rng, n=100) -> CheckResult:
    # energies range over the a priori spectral window [-2 - lambda, 2 + lambda]
    lam = rng.uniform(0, 2, n)
    E = rng.uniform(-1, 1, n) * (2 + lam)
    golden = parse_cf("[0;(1)]")
    worst = 0.0
    for l, e in zip(lam, E):
        p = initial_point(ModelParams(float(l), golden), float(e))
        worst = max(worst, float(abs(fricke_vogt(p) - l * l / 4)))
    return CheckResult("initial_line_on_surface", worst <= 1e-14, worst, 1e-14)


def check_semiconjugacy(rng, n=100, amax=6) -> CheckResult:
    th, ph = rng.uniform(0, 1, size=(2, n))
    worst = 0.0
    for a in range(1, amax + 1):
        lhs = semiconjugacy_F(*torus_step(a, th, ph))
        rhs = trace_step(a, semiconjugacy_F(th, ph))
        worst = max(worst, max(float(np.abs(np.asarray(u) - np.asarray(v)).max()) for u, v in zip(lhs, rhs)))
    return CheckResult("torus_semiconjugacy", worst <= 1e-10, worst, 1e-10)


def check_jacobian(rng, amax=8, h=1e-6) -> CheckResult:
    worst = 0.0
    for a in range(1, amax + 1):
        p = rng.uniform(-1, 1, 3)
        jac = trace_jacobian(a, TracePoint(*p))
        fd = np.empty((3, 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = h
            fd[:, j] = (np.array(trace_step(a, TracePoint(*(p + e)))) - np.array(trace_step(a, TracePoint(*(p - e))))) / (2 * h)
        worst = max(worst, float(np.abs(jac - fd).max() / (1 + np.abs(jac).max())))
    return CheckResult("jacobian_finite_difference", worst <= 1e-5, worst, 1e-5)


def check_eigenvalues(amax=8) -> CheckResult:
    worst = 0.0
    for a in range(1, amax + 1):
        ev = np.sort(np.linalg.eigvals(jacobian_at_P1(a)).real)
        worst = max(worst, float(np.abs(ev - np.sort(eigenvalues_at_P1(a))).max()))
    return CheckResult("jacobian_eigenvalues_at_singularity", worst <= 1e-10, worst, 1e-10)


def check_quadratic_forms() -> CheckResult:
    rep = qf_check()
    bad = sum(rep.failures.values())
    return CheckResult("quadratic_form_preserved", bool(rep.ok and rep.coc_max_error <= 1e-9), float(bad), 0.0)


def check_complexity(nmax=30, size=10**4) -> CheckResult:
    worst = 0
    for text in ("[0;(1)]", "[0;(2)]", "[0;2,(1,3)]"):
        w = rotation_sequence(parse_cf(text), 0.0, size)
        worst = max(worst, max(abs(complexity(w, n) - (n + 1)) for n in range(1, nmax + 1)))
    return CheckResult("sturmian_complexity", worst == 0, float(worst), 0.0)


def check_cmps(n=1000) -> CheckResult:
    bad = 0
    for text in ("[0;(1)]", "[0;(2)]", "[0;(1,2)]", "[0;2,(1,3)]"):
        beta = rotation_slope(parse_cf(text))
        s = cmps_substitution(beta)
        if s is None or fixed_point(s, n) != cutting_sequence(beta, n):
            bad += 1
    return CheckResult("substitution_fixed_point", bad == 0, float(bad), 0.0)


def check_abelianization(rng, trials=50) -> CheckResult:
    from .words import Substitution

    bad = 0
    for _ in range(trials):
        img = ["".join(rng.choice(["0", "1"], size=rng.integers(1, 6))) for _ in range(2)]
        s = Substitution(*img)
        w = "".join(rng.choice(["0", "1"], size=rng.integers(1, 40)))
        bad += not np.array_equal(letter_counts(s(w)), abelianization(s) @ letter_counts(w))
    return CheckResult("abelianization_counts", bad == 0, float(bad), 0.0)


CHECKS = (
    "fricke_vogt_invariant",
    "initial_line_on_surface",
    "torus_semiconjugacy",
    "jacobian_finite_difference",
    "jacobian_eigenvalues_at_singularity",
    "quadratic_form_preserved",
    "sturmian_complexity",
    "substitution_fixed_point",
    "abelianization_counts",
)


def run_all(seed: int = 0) -> list[CheckResult]:
    rng = np.random.default_rng(seed)
    return [
        check_invariant(rng),
        check_initial_line(rng),
        check_semiconjugacy(rng),
        check_jacobian(rng),
        check_eigenvalues(),
        check_quadratic_forms(),
        check_complexity(),
        check_cmps(),
        check_abelianization(rng),
    ]
