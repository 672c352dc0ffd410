import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sturmspec.numberth import ContinuedFraction, approximants, cf_value, parse_cf
from sturmspec.words import (
    H1,
    H2,
    PI,
    RHO,
    SIGMA,
    Substitution,
    abelianization,
    apply_substitution,
    cmps_substitution,
    complexity,
    compose,
    cutting_sequence,
    decompose_monoid,
    fixed_point,
    is_primitive,
    letter_counts,
    letter_frequency,
    multiply_generators,
    parse_slope,
    rotation_sequence,
    rotation_sequence_exact,
    rotation_slope,
    sturmian_word_by_recursion,
)

GOLDEN = parse_cf("[0;(1)]")
binary = st.text(alphabet="01", max_size=100)
images = st.text(alphabet="01", min_size=1, max_size=6)


def test_generators_act():
    assert SIGMA("0") == "01"
    assert PI("0110") == "1001"
    assert RHO("0") == "10"
    assert SIGMA("") == ""


def test_abelianization_examples():
    assert np.array_equal(abelianization(compose(SIGMA, PI)), [[1, 1], [0, 1]])
    assert np.array_equal(abelianization(PI), H1)
    assert np.array_equal(abelianization(SIGMA), H2)
    assert np.array_equal(abelianization(RHO), H2)


def test_primitivity():
    assert is_primitive(H2)
    assert not is_primitive(np.eye(2, dtype=int))
    assert not is_primitive([[1, 1], [0, 1]])


def test_decompose_examples():
    m = H2 @ H1
    assert decompose_monoid(m) == ["h2", "h1"]
    assert decompose_monoid(np.eye(2, dtype=int)) == []
    assert decompose_monoid([[2, 1], [1, 1]]) == ["h2", "h2"]
    with pytest.raises(ValueError):
        decompose_monoid([[2, 0], [0, 1]])


@given(st.lists(st.sampled_from(["h1", "h2"]), max_size=12))
@settings(max_examples=200)
def test_decompose_roundtrip(gens):
    m = multiply_generators(gens)
    assert np.array_equal(multiply_generators(decompose_monoid(m)), m)


@given(images, images, binary)
def test_letter_count_identity(a, b, w):
    s = Substitution(a, b)
    assert np.array_equal(letter_counts(apply_substitution(s, w)), abelianization(s) @ letter_counts(w))


def test_fixed_points():
    assert fixed_point(SIGMA, 13) == "0100101001001"
    s1 = Substitution("1", "10")
    assert fixed_point(s1, 9) == "101101011"
    with pytest.raises(ValueError):
        fixed_point(PI, 5)


def test_rotation_sequence_examples():
    assert rotation_sequence(GOLDEN, 0.0, 3) == "101"
    assert rotation_sequence(parse_cf("[0;(2)]"), 0.0, 1) == "0"


@pytest.mark.parametrize("text", ["[0;(1)]", "[0;(2)]", "[0;5,(1)]", "[0;2,(1,3)]", "[0;1,4,(2)]"])
def test_rotation_float_matches_exact(text):
    cf = parse_cf(text)
    assert rotation_sequence(cf, 0.0, 10**4) == rotation_sequence_exact(cf, 10**4)


@pytest.mark.parametrize("text", ["[0;(1)]", "[0;(2)]", "[0;5,(1)]", "[0;2,(1,3)]", "[0;1,4,(2)]"])
def test_standard_words(text):
    cf = parse_cf(text)
    ref = rotation_sequence_exact(cf, 1000)
    aps = approximants(cf, 12)
    for ap in aps:
        w = sturmian_word_by_recursion(cf, ap.k)
        assert len(w) == ap.q
        assert w.count("1") == ap.p
        n = min(len(w), 1000)
        assert w[:n] == ref[:n]


def test_complexity():
    w = fixed_point(SIGMA, 10**4)
    assert complexity(w, 5) == 6
    assert complexity("01" * 20, 2) == 2
    assert complexity("0", 0) == 1
    with pytest.raises(ValueError):
        complexity("0101", 3)


@pytest.mark.parametrize("text", ["[0;(1)]", "[0;(2)]", "[0;5,(1)]", "[0;2,(1,3)]"])
def test_sturmian_complexity(text):
    w = rotation_sequence(parse_cf(text), 0.0, 10**4)
    assert [complexity(w, n) for n in range(1, 31)] == list(range(2, 32))


def test_letter_frequency():
    assert letter_frequency(rotation_sequence(GOLDEN, 0.0, 10**5)) == pytest.approx(0.618, abs=1e-3)
    assert letter_frequency("0101") == 0.5
    assert letter_frequency(fixed_point(SIGMA, 10**5)) == pytest.approx(0.382, abs=1e-3)


def test_rotation_slope_values():
    for text in ["[0;(1)]", "[0;(2)]", "[0;5,(1)]", "[0;2,(1,3)]", "[0;1,4,(2)]"]:
        a = cf_value(parse_cf(text))
        assert float(rotation_slope(parse_cf(text))) == pytest.approx(a / (1 - a), rel=1e-14)


@pytest.mark.parametrize("text", ["[0;(1)]", "[0;(2)]", "[0;(1,2)]", "[0;2,(1,3)]", "[0;(3,1)]", "[0;1,(2)]"])
def test_cmps_fixes_cutting_sequence(text):
    cf = parse_cf(text)
    beta = rotation_slope(cf)
    s = cmps_substitution(beta)
    assert s is not None
    cut = cutting_sequence(beta, 10**4)
    fp = fixed_point(s, 10**4)
    assert fp == cut
    assert fp == rotation_sequence_exact(cf, 10**4)
    assert s(cut)[: len(cut)] == cut


def test_cmps_perron_vector():
    # the frequency vector (1 - alpha, alpha) is an eigenvector of M_s
    for text in ["[0;(1)]", "[0;(2)]", "[0;2,(1,3)]"]:
        cf = parse_cf(text)
        a = cf_value(cf)
        m = abelianization(cmps_substitution(rotation_slope(cf))).astype(float)
        v = np.array([1 - a, a])
        w = m @ v
        assert w[1] / w.sum() == pytest.approx(a, abs=1e-10)


def test_cmps_none_cases():
    assert cmps_substitution(rotation_slope(parse_cf("[0;5,(1)]"))) is None
    # b_n < b_0
    assert cmps_substitution(parse_slope("[3;(1,2)]")) is None


def test_golden_cmps_matrix_is_h2_conjugate():
    s = cmps_substitution(parse_slope("[1;(1)]"))
    m = abelianization(s)
    assert sorted(np.linalg.eigvals(m).round(9)) == sorted(np.linalg.eigvals(H2).round(9))
