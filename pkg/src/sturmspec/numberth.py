"""Continued fractions with an eventually periodic tail.

Angles are written ``[0; a_1, ..., a_m, (a_{m+1}, ..., a_{m+n})]`` where the
parenthesised block repeats forever.  Because the tail is periodic every such
number is a quadratic irrational, so values and floors can be computed
exactly with integer arithmetic.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

import numpy as np

__all__ = [
    "ContinuedFraction",
    "Approximant",
    "QuadraticIrrational",
    "CFParseError",
    "parse_cf",
    "format_cf",
    "cf_value",
    "approximants",
    "quadratic_irrational",
    "floor_multiples",
    "fractional_parts",
]

# Approximants are carried as (at most) 128-bit signed integers.
INT_BITS = 128
_INT_MAX = 2 ** (INT_BITS - 1) - 1


class CFParseError(ValueError):
    """Raised for strings that do not follow the continued-fraction grammar."""


@dataclass(frozen=True)
class ContinuedFraction:
    """Eventually periodic expansion ``[0; preperiod, (period)]``."""

    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "preperiod", tuple(int(a) for a in self.preperiod))
        object.__setattr__(self, "period", tuple(int(a) for a in self.period))
        if not self.period:
            raise ValueError("period must be nonempty")
        if any(a < 1 for a in self.preperiod + self.period):
            raise ValueError("partial quotients must be >= 1")

    def __getitem__(self, i: int) -> int:
        """Partial quotient ``a_i`` (1-based, as in ``[0; a_1, a_2, ...]``)."""
        if i < 1:
            raise IndexError("partial quotients are indexed from 1")
        m = len(self.preperiod)
        if i <= m:
            return self.preperiod[i - 1]
        return self.period[(i - m - 1) % len(self.period)]

    def quotients(self) -> Iterator[int]:
        """Infinite iterator over a_1, a_2, ..."""
        i = 1
        while True:
            yield self[i]
            i += 1

    def head(self, k: int) -> list[int]:
        return [self[i] for i in range(1, k + 1)]

    def __str__(self) -> str:
        return format_cf(self)


class Approximant(NamedTuple):
    k: int
    p: int
    q: int


_CF_RE = re.compile(
    r"""^\[\s*0\s*;\s*
        (?P<pre>\d+(?:\s*,\s*\d+)*)?\s*
        (?:,\s*)?
        \(\s*(?P<per>\d+(?:\s*,\s*\d+)*)\s*\)\s*
        \]$""",
    re.VERBOSE,
)


def parse_cf(text: str) -> ContinuedFraction:
    """Parse ``"[0;5,(1)]"``-style strings.

    >>> parse_cf("[0;5,(1)]")
    ContinuedFraction(preperiod=(5,), period=(1,))
    """
    s = text.strip()
    if s.count("(") != s.count(")") or s.count("[") != 1 or s.count("]") != 1:
        raise CFParseError(f"malformed continued fraction {text!r}")
    if "(" not in s:
        raise CFParseError(f"missing period in {text!r}")
    m = _CF_RE.match(s)
    if m is None:
        raise CFParseError(f"malformed continued fraction {text!r}")
    pre_txt = m.group("pre")
    # a comma separates preperiod and period, and only then
    if (pre_txt is not None) != bool(re.search(r",\s*\(", s)):
        raise CFParseError(f"malformed continued fraction {text!r}")
    pre = [int(t) for t in pre_txt.split(",")] if pre_txt else []
    per = [int(t) for t in m.group("per").split(",")]
    if any(a == 0 for a in pre + per):
        raise CFParseError(f"zero partial quotient in {text!r}")
    return ContinuedFraction(tuple(pre), tuple(per))


def format_cf(cf: ContinuedFraction) -> str:
    per = "(" + ",".join(map(str, cf.period)) + ")"
    return "[0;" + ",".join([*map(str, cf.preperiod), per]) + "]"


class QuadraticIrrational(NamedTuple):
    """The number ``(a + b*sqrt(d)) / c`` with integers, ``c > 0``, ``d`` not a square."""

    a: int
    b: int
    c: int
    d: int

    def __float__(self) -> float:
        return float(self.decimal(40))

    def decimal(self, digits: int = 40) -> Decimal:
        with localcontext() as ctx:
            ctx.prec = digits + 10
            val = (Decimal(self.a) + Decimal(self.b) * Decimal(self.d).sqrt()) / Decimal(self.c)
        return +val


def _mobius(quotients: Sequence[int]) -> tuple[int, int, int, int]:
    # t -> 1/(a_1 + 1/(a_2 + ... 1/(a_n + t)))  as  (A t + B) / (C t + D)
    A, B, C, D = 1, 0, 0, 1
    for a in quotients:
        # compose with t -> 1/(a + t) = (0 t + 1)/(1 t + a)
        A, B, C, D = B, A + B * a, D, C + D * a
    return A, B, C, D


def quadratic_irrational(cf: ContinuedFraction) -> QuadraticIrrational:
    """Exact closed form of the value of ``cf``."""
    # periodic tail t solves C t^2 + (D - A) t - B = 0, positive root
    A, B, C, D = _mobius(cf.period)
    disc = (D - A) ** 2 + 4 * B * C
    r = math.isqrt(disc)
    if r * r == disc:
        raise ValueError("degenerate period: value is rational")
    # t = (A - D + sqrt(disc)) / (2C), as an element p + s*sqrt(disc) of Q(sqrt(disc))
    p, s = Fraction(A - D, 2 * C), Fraction(1, 2 * C)
    for a in reversed(cf.preperiod):
        # t <- 1/(a + t)
        p = p + a
        norm = p * p - s * s * disc
        p, s = p / norm, -s / norm
    den = math.lcm(p.denominator, s.denominator)
    a_, b_ = int(p * den), int(s * den)
    g = math.gcd(math.gcd(a_, b_), den)
    return QuadraticIrrational(a_ // g, b_ // g, den // g, disc)


def cf_value(cf: ContinuedFraction) -> float:
    """Value of the expansion, correctly rounded from a 40-digit evaluation."""
    return float(quadratic_irrational(cf))


def approximants(cf: ContinuedFraction, kmax: int) -> list[Approximant]:
    """Convergents ``p_k/q_k`` for ``k = 1..kmax``.

    Seeds are ``p_0 = 0, p_1 = 1`` and ``q_0 = 1, q_1 = a_1``.  Raises
    ``OverflowError`` once a value no longer fits in a signed 128-bit integer.
    """
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    p_prev, q_prev = 0, 1
    p, q = 1, cf[1]
    out = [Approximant(1, p, q)]
    for k in range(2, kmax + 1):
        a = cf[k]
        p, p_prev = a * p + p_prev, p
        q, q_prev = a * q + q_prev, q
        if q > _INT_MAX:
            raise OverflowError(
                f"q_{k} needs {q.bit_length() + 1} bits, exceeds {INT_BITS}-bit range"
            )
        out.append(Approximant(k, p, q))
    return out


def denominators(cf: ContinuedFraction, kmax: int) -> list[int]:
    """``[q_0, q_1, ..., q_kmax]``."""
    return [1] + [ap.q for ap in approximants(cf, kmax)] if kmax >= 1 else [1]


def level_for_size(cf: ContinuedFraction, qmax: int) -> int:
    """Largest level ``k >= 1`` with ``q_k <= qmax``."""
    k, q_prev, q = 1, 1, cf[1]
    if q > qmax:
        return 0
    while True:
        q_next = cf[k + 1] * q + q_prev
        if q_next > qmax:
            return k
        q_prev, q = q, q_next
        k += 1


def floor_multiples(x: QuadraticIrrational, n: np.ndarray | Sequence[int]) -> list[int]:
    """Exact ``floor(n * x)`` for nonnegative integers ``n``."""
    a, b, c, d = x
    out = []
    for m in n:
        m = int(m)
        s = math.isqrt(m * m * b * b * d)
        # floor(sqrt(v)) = s; sqrt(v) never integral for m > 0
        if m == 0:
            out.append(0)
            continue
        root_floor = s if b >= 0 else -s - 1
        out.append((m * a + root_floor) // c)
    return out


def _split(value: QuadraticIrrational) -> tuple[float, float]:
    # hi carries 26 significant bits so n*hi is exact for n < 2**27
    v = value.decimal(40)
    hi = math.ldexp(math.floor(math.ldexp(float(v), 26)), -26)
    lo = float(v - Decimal(hi))
    return hi, lo


def fractional_parts(cf: ContinuedFraction, n: np.ndarray, omega: float = 0.0) -> np.ndarray:
    """``{n*alpha + omega}`` with a split-constant product.

    ``alpha = hi + lo`` where ``n*hi`` is exact in double precision; the
    rounding error is then O(n * ulp(lo)) instead of O(n * ulp(alpha)).
    """
    n = np.asarray(n, dtype=np.int64)
    if n.size and (n.max() >= 2**27 or n.min() < 0):
        raise ValueError("n must lie in [0, 2**27)")
    hi, lo = _split(quadratic_irrational(cf))
    nh = n * hi
    t = (nh - np.floor(nh)) + (n * lo + omega)
    return t - np.floor(t)
