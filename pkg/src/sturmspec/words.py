"""Binary words, substitutions and Sturmian sequences.

Words are plain ``str`` objects over the letters ``'0'`` and ``'1'``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .numberth import (
    ContinuedFraction,
    QuadraticIrrational,
    approximants,
    floor_multiples,
    fractional_parts,
    quadratic_irrational,
)

__all__ = [
    "Substitution",
    "PI",
    "SIGMA",
    "RHO",
    "H1",
    "H2",
    "apply_substitution",
    "compose",
    "power",
    "abelianization",
    "letter_counts",
    "is_primitive",
    "decompose_monoid",
    "SlopeExpansion",
    "parse_slope",
    "rotation_slope",
    "cmps_substitution",
    "cutting_sequence",
    "fixed_point",
    "rotation_sequence",
    "rotation_sequence_exact",
    "sturmian_word_by_recursion",
    "complexity",
    "letter_frequency",
]

PRIMITIVITY_MAX_POWER = 8
COMPLEXITY_MARGIN = 10


@dataclass(frozen=True)
class Substitution:
    image0: str
    image1: str

    def __post_init__(self):
        for w in (self.image0, self.image1):
            if not w or set(w) - {"0", "1"}:
                raise ValueError(f"substitution images must be nonempty binary words, got {w!r}")

    def __call__(self, w: str) -> str:
        return apply_substitution(self, w)

    def __matmul__(self, other: "Substitution") -> "Substitution":
        return compose(self, other)


PI = Substitution("1", "0")
SIGMA = Substitution("01", "0")
RHO = Substitution("10", "0")
IDENTITY = Substitution("0", "1")

H1 = np.array([[0, 1], [1, 0]], dtype=np.int64)
H2 = np.array([[1, 1], [1, 0]], dtype=np.int64)


def apply_substitution(s: Substitution, w: str) -> str:
    return w.translate({48: s.image0, 49: s.image1})


def compose(s: Substitution, t: Substitution) -> Substitution:
    """``s o t``: apply ``t`` first."""
    return Substitution(s(t.image0), s(t.image1))


def power(s: Substitution, n: int) -> Substitution:
    out = IDENTITY
    for _ in range(n):
        out = compose(s, out)
    return out


def letter_counts(w: str) -> np.ndarray:
    ones = w.count("1")
    return np.array([len(w) - ones, ones], dtype=np.int64)


def abelianization(s: Substitution) -> np.ndarray:
    """Columns hold the letter counts of ``s(0)`` and ``s(1)``."""
    return np.column_stack([letter_counts(s.image0), letter_counts(s.image1)])


def is_primitive(m: np.ndarray, max_power: int = PRIMITIVITY_MAX_POWER) -> bool:
    m = np.asarray(m, dtype=object)
    p = m.copy()
    for _ in range(max_power):
        if all(v > 0 for v in p.flat):
            return True
        p = p.dot(m)
    return False


def decompose_monoid(m: np.ndarray) -> list[str]:
    """Write a nonnegative unimodular 2x2 matrix as a word in ``h1``, ``h2``.

    Greedy Euclid-style peeling from the left: take ``h2`` whenever the first
    row dominates the second, otherwise swap rows with ``h1``.
    """
    (p, q), (r, s) = (int(v) for v in m[0]), (int(v) for v in m[1])
    if min(p, q, r, s) < 0 or abs(p * s - q * r) != 1:
        raise ValueError("matrix is not a nonnegative unimodular matrix")
    out: list[str] = []
    swapped = False
    while (p, q, r, s) != (1, 0, 0, 1):
        if p >= r and q >= s:
            out.append("h2")
            p, q, r, s = r, s, p - r, q - s
            swapped = False
        elif swapped:
            # the pair of rows is incomparable in both orders
            raise ValueError("matrix is not in the monoid generated by h1, h2")
        else:
            out.append("h1")
            p, q, r, s = r, s, p, q
            swapped = True
    return out


def multiply_generators(names: Sequence[str]) -> np.ndarray:
    out = np.eye(2, dtype=np.int64)
    for g in names:
        out = out @ {"h1": H1, "h2": H2}[g]
    return out


# -- slopes and their substitutions -----------------------------------------


@dataclass(frozen=True)
class SlopeExpansion:
    """Slope ``beta = [lead; pre, (period)]`` of a cutting sequence."""

    lead: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def value(self) -> QuadraticIrrational:
        if self.lead > 0:
            frac = quadratic_irrational(ContinuedFraction(self.preperiod, self.period))
            a, b, c, d = frac
            return QuadraticIrrational(a + self.lead * c, b, c, d)
        return quadratic_irrational(ContinuedFraction(self.preperiod, self.period))

    def __float__(self) -> float:
        return float(self.value())


_SLOPE_RE = re.compile(r"^\[\s*(\d+)\s*;\s*((?:\d+\s*,\s*)*)\(\s*(\d+(?:\s*,\s*\d+)*)\s*\)\s*\]$")


def parse_slope(text: str) -> SlopeExpansion:
    m = _SLOPE_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed slope expansion {text!r}")
    pre = [int(t) for t in m.group(2).replace(" ", "").split(",") if t]
    per = [int(t) for t in m.group(3).split(",")]
    if any(a < 1 for a in pre + per):
        raise ValueError(f"zero partial quotient in {text!r}")
    return SlopeExpansion(int(m.group(1)), tuple(pre), tuple(per))


def _minimal_period(per: tuple[int, ...]) -> tuple[int, ...]:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            return per[:d]
    return per


def _tail(alpha: ContinuedFraction, k: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """(preperiod, period) of the quotient sequence a_{k+1}, a_{k+2}, ..."""
    m, n = len(alpha.preperiod), len(alpha.period)
    if k <= m:
        return alpha.preperiod[k:], alpha.period
    r = (k - m) % n
    return (), alpha.period[r:] + alpha.period[:r]


def rotation_slope(alpha: ContinuedFraction) -> SlopeExpansion:
    """Slope ``beta = alpha / (1 - alpha)`` whose cutting sequence equals ``R_alpha``."""
    a1 = alpha[1]
    if a1 >= 2:
        pre, per = _tail(alpha, 1)
        return SlopeExpansion(0, (a1 - 1, *pre), per)
    # a_1 = 1: beta = 1/[0; a_2, a_3, ...] = [a_2; a_3, ...]
    pre, per = _tail(alpha, 2)
    return SlopeExpansion(alpha[2], pre, per)


def _normalize_slope(beta: SlopeExpansion) -> tuple[int, tuple[int, ...]] | None:
    """Return ``(b_0, (b_1..b_n))`` in the normal form used to build the substitution, or None.

    For ``beta > 1`` the form is ``[b_0; (b_1..b_n)]``; for ``beta < 1`` it is
    ``[0; b_0, (b_1..b_n)]``.  Other shapes cannot be fixed by a substitution.
    """
    per = _minimal_period(beta.period)
    pre = beta.preperiod
    if beta.lead >= 1:
        # absorb a preperiod that is a rotation of the period
        while pre and pre[-1] == per[-1]:
            pre, per = pre[:-1], per[-1:] + per[:-1]
        if pre:
            return None
        return beta.lead, per
    if not pre:
        # [0; (c_1..c_n)] = [0; c_1, (c_2..c_n, c_1)]
        pre, per = per[:1], per[1:] + per[:1]
    while len(pre) > 1 and pre[-1] == per[-1]:
        pre, per = pre[:-1], per[-1:] + per[:-1]
    if len(pre) != 1:
        return None
    return pre[0], per


def cmps_substitution(beta: SlopeExpansion | str) -> Substitution | None:
    """Substitution fixing the cutting sequence ``C_beta``, or None if none exists."""
    if isinstance(beta, str):
        beta = parse_slope(beta)
    normal = _normalize_slope(beta)
    if normal is None:
        return None
    b0, per = normal
    if per[-1] < b0:
        return None
    exps = [b0, *per[:-1], per[-1] - b0]
    sp = compose(SIGMA, PI)
    s = IDENTITY
    for i, e in enumerate(exps):
        if i:
            s = compose(s, PI)
        s = compose(s, power(sp, e))
    if beta.lead >= 1:
        s = compose(compose(PI, s), PI)
    return s


def cutting_sequence(beta: SlopeExpansion | QuadraticIrrational, n_letters: int) -> str:
    """First ``n_letters`` letters of ``C_beta`` (0 = vertical, 1 = horizontal crossing)."""
    x = beta.value() if isinstance(beta, SlopeExpansion) else beta
    parts = []
    total = 0
    i = 1
    prev = 0
    while total < n_letters:
        cur = floor_multiples(x, [i])[0]
        chunk = "1" * (cur - prev) + "0"
        parts.append(chunk)
        total += len(chunk)
        prev = cur
        i += 1
    return "".join(parts)[:n_letters]


# -- fixed points and rotation sequences -----------------------------------


def fixed_point(s: Substitution, n_letters: int, letter: str | None = None) -> str:
    """Prefix of the fixed point ``lim s^k(letter)``."""
    candidates = [letter] if letter is not None else ["0", "1"]
    for a in candidates:
        img = s.image0 if a == "0" else s.image1
        if img[0] == a and len(img) >= 2:
            break
    else:
        raise ValueError("substitution is not prolongable on any letter")
    w = a
    while len(w) < n_letters:
        w = s(w)
    return w[:n_letters]


def rotation_sequence(alpha: ContinuedFraction, omega: float, n_letters: int) -> str:
    """``R_{alpha,omega}(n)`` for ``n = 1..n_letters`` as a word."""
    if n_letters < 1:
        raise ValueError("n_letters must be >= 1")
    n = np.arange(1, n_letters + 1)
    frac = fractional_parts(alpha, n, omega)
    from .numberth import cf_value

    bits = frac >= 1.0 - cf_value(alpha)
    return bits.astype(np.uint8).__add__(48).tobytes().decode("ascii")


def rotation_sequence_exact(alpha: ContinuedFraction, n_letters: int) -> str:
    """``R_{alpha,0}`` via exact floors: ``R(n) = floor((n+1)alpha) - floor(n alpha)``."""
    x = quadratic_irrational(alpha)
    f = floor_multiples(x, range(1, n_letters + 2))
    return "".join("1" if f[i + 1] - f[i] else "0" for i in range(n_letters))


def sturmian_word_by_recursion(alpha: ContinuedFraction, k: int) -> str:
    """Standard word ``w_k`` of length ``q_k``.

    ``w_0 = 0``, ``w_1 = 0^(a_1 - 1) 1`` and ``w_{k+1} = w_k^(a_{k+1}) w_{k-1}``;
    ``w_k`` is the length-``q_k`` prefix of ``R_{alpha,0}``.
    """
    if k < 0:
        raise ValueError("k must be >= 0")
    prev, cur = "0", "0" * (alpha[1] - 1) + "1"
    if k == 0:
        return prev
    for j in range(2, k + 1):
        prev, cur = cur, cur * alpha[j] + prev
    return cur


def complexity(w: str, n: int) -> int:
    """Number of distinct factors of length ``n``."""
    if n == 0:
        return 1
    if len(w) < n + COMPLEXITY_MARGIN * n:
        raise ValueError(f"word of length {len(w)} too short for saturated count at n={n}")
    return len({w[i:i + n] for i in range(len(w) - n + 1)})


def letter_frequency(w: str) -> float:
    if not w:
        raise ValueError("empty word")
    return w.count("1") / len(w)


def word_counts_match(alpha: ContinuedFraction, k: int) -> bool:
    ap = approximants(alpha, k)[-1]
    w = sturmian_word_by_recursion(alpha, k)
    return w.count("1") == ap.p and len(w) == ap.q
