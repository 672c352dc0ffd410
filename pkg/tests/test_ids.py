import numpy as np
import pytest

from sturmspec.ids import (
    DirichletOperator,
    count_below,
    count_below_energies,
    dos_local_dimension,
    free_ids,
    gap_labels,
    ids_curve,
    match_gaps_to_labels,
    potential,
)
from sturmspec.numberth import parse_cf
from sturmspec.spectrum import Gap, gaps_from_bands, spectrum_cover
from sturmspec.tracemap import ModelParams

GOLDEN = parse_cf("[0;(1)]")
rng = np.random.default_rng(7)


def test_count_examples():
    assert count_below(DirichletOperator([2.0, 0.0, 2.0]), 1.0) == 1
    free = DirichletOperator(np.zeros(100))
    # eigenvalues 2cos(pi j/101) avoid 0 and split evenly
    assert count_below(free, 0.0) == 50
    assert count_below(free, 2.5) == 100
    assert count_below(free, -2.5) == 0


def test_potential_example():
    op = potential(ModelParams(2.0, GOLDEN), 0.0, 3)
    assert list(op.diagonal) == [2.0, 0.0, 2.0]
    with pytest.raises(ValueError):
        potential(ModelParams(2.0, GOLDEN), 0.0, 0)


@pytest.mark.parametrize("lam", [0.0, 0.5, 3.0])
def test_count_matches_eigvalsh(lam):
    op = potential(ModelParams(lam, GOLDEN), 0.3, 300)
    ev = np.linalg.eigvalsh(op.dense())
    E = rng.uniform(-2 - lam, 2 + lam, 200)
    # stay clear of eigenvalues so rounding cannot flip a count
    E = E[np.min(np.abs(E[:, None] - ev[None, :]), axis=1) > 1e-9]
    ref = np.sum(ev[None, :] < E[:, None], axis=1)
    assert np.array_equal(count_below_energies(op, E), ref)


def test_counts_monotone():
    op = potential(ModelParams(1.0, GOLDEN), 0.0, 2000)
    c = count_below_energies(op, np.linspace(-3.5, 3.5, 3001))
    assert np.all(np.diff(c) >= 0) and c[0] == 0 and c[-1] == 2000


def test_free_ids():
    E = np.linspace(-2.2, 2.2, 441)
    tab = ids_curve(ModelParams(0.0, GOLDEN), 0.0, 10**4, E)
    assert np.max(np.abs(tab.values - free_ids(E))) < 2e-3
    assert free_ids(0.0) == pytest.approx(0.5)
    assert free_ids(-3.0) == 0 and free_ids(3.0) == 1


def test_omega_independence():
    E = np.linspace(-2.5, 2.5, 301)
    p = ModelParams(1.0, GOLDEN)
    tabs = [ids_curve(p, w, 4000, E).values for w in (0.0, 0.3, 0.7)]
    for t in tabs[1:]:
        assert np.max(np.abs(t - tabs[0])) <= 2 / 4000 + 1e-15


def test_workers_deterministic():
    p = ModelParams(1.0, GOLDEN)
    E = np.linspace(-3, 3, 501)
    a = ids_curve(p, 0.0, 3000, E, workers=1)
    b = ids_curve(p, 0.0, 3000, E, workers=3)
    assert np.array_equal(a.values, b.values)
    with pytest.raises(ValueError):
        ids_curve(p, 0.0, 10, [0.0, 0.0])


def test_gap_labels():
    labels = dict(gap_labels(GOLDEN, range(-2, 3)))
    assert labels[1] == pytest.approx(0.6180339887, abs=1e-10)
    assert labels[2] == pytest.approx(0.2360679775, abs=1e-10)
    assert labels[-1] == pytest.approx(0.3819660113, abs=1e-10)
    assert labels[0] == 0


def test_match_labels():
    p = ModelParams(1.0, GOLDEN)
    cov = spectrum_cover(p, 8)
    gaps = gaps_from_bands(cov)
    tab = ids_curve(p, 0.0, 5000, np.array([g.midpoint for g in gaps]))
    labels = gap_labels(GOLDEN, range(-15, 16))
    res = match_gaps_to_labels(gaps, tab.values, labels, 3 / 5000)
    named = [g for g in res.gaps if g.label is not None]
    assert len(named) >= 20 and not res.ambiguous
    for g in named:
        assert abs(dict(labels)[g.label] - g.ids_value) < 3 / 5000
    none = match_gaps_to_labels(gaps, tab.values, labels, 0.0)
    assert len(none.unmatched_gaps) == len(gaps)
    assert 0 not in none.unmatched_labels


def test_match_accepts_table():
    gaps = [Gap(0.0, 1.0)]
    tab = ids_curve(ModelParams(1.0, GOLDEN), 0.0, 500, np.linspace(-3, 3, 11))
    res = match_gaps_to_labels(gaps, tab, [(1, float(tab(0.5)))], 1e-9)
    assert res.gaps[0].label == 1


def test_free_dos_dimension():
    E = np.linspace(-2.1, 2.1, 12001)
    tab = ids_curve(ModelParams(0.0, GOLDEN), 0.0, 10**4, E)
    est = dos_local_dimension(tab, sample_count=100, seed=1)
    assert est.d_estimate == pytest.approx(1.0, abs=0.1)
    again = dos_local_dimension(tab, sample_count=100, seed=1)
    assert again.d_estimate == est.d_estimate
    with pytest.raises(ValueError):
        dos_local_dimension(tab, epsilons=[0.01, 0.02, 0.04, 0.08])
