"""The twelve acceptance criteria as plain functions.

Each returns ``(passed, detail)``.  ``python3 tests/acceptance.py`` prints
one line per criterion; the pytest suite runs the same functions.
"""

import math
import sys
import time

import numpy as np

from sturmspec.checks import (
    check_abelianization,
    check_cmps,
    check_complexity,
    check_eigenvalues,
    check_initial_line,
    check_invariant,
    check_jacobian,
    check_semiconjugacy,
)
from sturmspec.ids import (
    approximant_matrix,
    count_below_energies,
    dos_local_dimension,
    free_ids,
    gap_labels,
    ids_curve,
    match_gaps_to_labels,
    potential,
)
from sturmspec.numberth import approximants, parse_cf
from sturmspec.spectrum import (
    BandSet,
    bands,
    box_dimension,
    default_scales,
    gap_opening_study,
    gaps_from_bands,
    spectrum_cover,
    thickness_denseness,
)
from sturmspec.tracemap import ModelParams, orbit_point, qf_check, transfer_half_traces

GOLDEN = parse_cf("[0;(1)]")
SILVER = parse_cf("[0;(2)]")
L = 10**4


def ids_grid(params, points=2001):
    b = params.energy_bound
    return np.linspace(-b - 0.05, b + 0.05, points)


def c1_invariant():
    rng = np.random.default_rng(0)
    a, b = check_invariant(rng), check_initial_line(rng)
    return a.passed and b.passed, f"invariant drift {a.value:.2e}, initial line {b.value:.2e}"


def c2_oracle():
    worst, compared = 0.0, 0
    for cf in (GOLDEN, SILVER):
        kmax = max(ap.k for ap in approximants(cf, 40) if ap.q <= L)
        for lam in (0.5, 1.0):
            params = ModelParams(lam, cf)
            E = np.linspace(-2 - lam, 2 + lam, 41)[1:-1]
            for k in range(1, kmax + 1):
                with np.errstate(over="ignore", invalid="ignore"):
                    got = np.array(orbit_point(params, E, k))
                    ref = np.array(transfer_half_traces(params, k, E))
                    ok = np.all(np.isfinite(ref) & (np.abs(ref) < 1e150), axis=0)
                    rel = np.abs(got[:, ok] - ref[:, ok]) / np.maximum(1.0, np.abs(ref[:, ok]))
                compared += int(ok.sum())
                worst = max(worst, float(rel.max(initial=0.0)))
    return worst <= 1e-8, f"max relative difference {worst:.2e} over {compared} finite points"


def c3_semiconjugacy():
    r = check_semiconjugacy(np.random.default_rng(0))
    return r.passed, f"max error {r.value:.2e}"


def c4_jacobian():
    a, b = check_jacobian(np.random.default_rng(0)), check_eigenvalues()
    return a.passed and b.passed, f"finite differences {a.value:.2e}, eigenvalues {b.value:.2e}"


def c5_quadratic_forms():
    rep = qf_check()
    ok = sum(rep.failures.values()) == 0 and rep.coc_exact and rep.coc_max_error <= 1e-12
    return ok, f"{rep.lattice_vectors} lattice vectors, failures {rep.failures}, change of coordinates {rep.coc_max_error:.1e}"


def c6_free():
    params = ModelParams(0.0, GOLDEN)
    cov_err = 0.0
    for k in (8, 10):
        cov = spectrum_cover(params, k)
        gaps = gaps_from_bands(cov)
        cov_err = max(cov_err, abs(cov.hull[0] + 2), abs(cov.hull[1] - 2), max((g.width for g in gaps), default=0.0))
    E = ids_grid(params)
    ids_err = float(np.max(np.abs(ids_curve(params, 0.0, L, E).values - free_ids(E))))
    return cov_err <= 1e-3 and ids_err <= 2e-3, f"cover deviation {cov_err:.1e}, IDS deviation {ids_err:.1e}"


def c7_band_eigenvalues():
    params = ModelParams(1.0, GOLDEN)
    bs = bands(params, 10)
    ev = np.linalg.eigvalsh(approximant_matrix(params, 10))
    per_band = np.array([np.sum((ev >= lo) & (ev <= hi)) for lo, hi in zip(bs.lo, bs.hi)])
    ok = len(bs) == 89 and np.all(per_band == 1)
    return bool(ok), f"{len(bs)} bands; {int(np.sum(per_band == 1))}/89 closures hold exactly one eigenvalue of the {len(ev)}-site Dirichlet matrix"


def c8_gap_labels():
    params = ModelParams(1.0, GOLDEN)
    gaps = gaps_from_bands(spectrum_cover(params, 10))
    h = float(np.diff(ids_grid(params))[0])
    n = count_below_energies(potential(params, 0.0, L), [g.midpoint for g in gaps]) / L
    labels = gap_labels(GOLDEN, range(-10, 11))
    match = match_gaps_to_labels(gaps, n, labels, 3 / L)
    wide = [g for g in match.gaps if g.width > 10 * h]
    wide_ok = all(g.label is not None for g in wide)
    realized = {g.label for g in match.gaps if g.label is not None}
    missing = sorted(set(range(-10, 11)) - {0} - realized)
    return wide_ok and not missing, f"{sum(g.label is not None for g in wide)}/{len(wide)} wide gaps labelled, missing labels {missing}"


def c9_gap_opening():
    rows = gap_opening_study(GOLDEN, 1, [0.4, 0.2, 0.1, 0.05], level=12, size=L)
    ratios = [r.ratio for r in rows]
    if any(r is None or r <= 0 for r in ratios):
        return False, f"ratios {ratios}"
    a, b = ratios[-2:]
    spread = abs(a - b) / max(a, b)
    return spread < 0.2, "ratios " + ", ".join(f"{r:.3f}" for r in ratios) + f"; last two differ by {spread:.1%}"


def _cantor(levels):
    iv = [(0.0, 1.0)]
    for _ in range(levels):
        iv = [x for a, b in iv for x in ((a, a + (b - a) / 3), (b - (b - a) / 3, b))]
    return BandSet.from_intervals(iv)


def c10_dimension():
    est = {}
    for lam in (0.1, 0.2, 0.4, 0.8):
        cov = spectrum_cover(ModelParams(lam, GOLDEN), 12)
        th = thickness_denseness(cov)
        est[lam] = (box_dimension(cov, default_scales(cov)), th)
    box = {lam: v[0] for lam, v in est.items()}
    tau = {lam: v[1].tau for lam, v in est.items()}
    bracket = all(th.dim_lower - 0.05 <= d <= th.dim_upper + 0.05 for d, th in est.values())
    cantor = box_dimension(_cantor(8), 3.0 ** -np.arange(1, 9))
    ok = box[0.2] > box[0.8] and tau[0.1] > tau[0.4] and bracket and abs(cantor - math.log(2) / math.log(3)) <= 0.02
    detail = "box " + ", ".join(f"{lam}:{d:.3f}" for lam, d in box.items())
    detail += "; tau " + ", ".join(f"{lam}:{t:.2f}" for lam, t in tau.items())
    detail += f"; bracket {'holds' if bracket else 'fails'}; middle thirds {cantor:.4f}"
    return ok, detail


def c11_dos_dimension():
    d = {}
    for lam in (0.0, 0.2, 0.5, 0.8):
        params = ModelParams(lam, GOLDEN)
        d[lam] = dos_local_dimension(ids_curve(params, 0.0, L, ids_grid(params, 20001)), seed=0).d_estimate
    cov = spectrum_cover(ModelParams(0.5, GOLDEN), 12)
    box = box_dimension(cov, default_scales(cov))
    ok = abs(d[0.0] - 1) <= 0.05 and d[0.2] > d[0.8] and d[0.5] < box - 0.03
    detail = "d " + ", ".join(f"{lam}:{v:.3f}" for lam, v in d.items()) + f"; box(0.5) {box:.3f}"
    return ok, detail


def c12_combinatorics():
    rs = [check_complexity(), check_cmps(), check_abelianization(np.random.default_rng(0))]
    return all(r.passed for r in rs), "; ".join(f"{r.name} {'ok' if r.passed else 'FAIL'}" for r in rs)


CRITERIA = [
    (1, "invariant suite", c1_invariant, 1),
    (2, "trace map vs transfer matrices", c2_oracle, 10),
    (3, "semi-conjugacy", c3_semiconjugacy, 1),
    (4, "Jacobian", c4_jacobian, 1),
    (5, "quadratic forms", c5_quadratic_forms, 1),
    (6, "free case", c6_free, 30),
    (7, "band/eigenvalue consistency", c7_band_eigenvalues, 10),
    (8, "gap labelling", c8_gap_labels, 60),
    (9, "linear gap opening", c9_gap_opening, 120),
    (10, "dimension trends", c10_dimension, 120),
    (11, "density of states dimension", c11_dos_dimension, 300),
    (12, "combinatorics", c12_combinatorics, 10),
]


def run(number):
    _, name, fn, budget = CRITERIA[number - 1]
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    passed = bool(ok) and elapsed < budget
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {name}: {detail} ({elapsed:.1f}s of {budget}s)"
    return passed, line


if __name__ == "__main__":
    results = [run(n) for n, *_ in CRITERIA]
    for _, line in results:
        print(line, flush=True)
    sys.exit(0 if all(p for p, _ in results) else 1)
