"""Digit-stream generators for the concatenation and power-series number families.

Three concatenation families (consecutive integers, primes, squares) plus the
coprime power series sum(1 / (c^n * b^(c^n + s))).  All digits come from exact
integer arithmetic; term end positions have closed-form or sieve-backed sums,
so random access never streams from the start.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction

from . import primes
from .radix import DigitStream

_FAMILIES = ("integers", "primes", "squares")


@dataclass(frozen=True)
class ConcatSpec:
    """A concatenation family and its output base."""

    family: str
    base: int = 10

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {_FAMILIES}")
        if self.base < 2:
            raise ValueError("base must be >= 2")
        if self.family == "primes" and self.base != 10:
            raise ValueError("the primes family is generated in base 10 only")


@dataclass(frozen=True)
class StonehamSpec:
    """Parameters of the series sum(1 / (c^n * b^(c^n + s))), digits in base b."""

    b: int
    c: int
    s: int = 0

    def __post_init__(self):
        if self.b < 2 or self.c < 2:
            raise ValueError("b and c must both be >= 2")
        if math.gcd(self.b, self.c) != 1:
            raise ValueError(f"gcd(b, c) must be 1, got gcd({self.b}, {self.c}) = {math.gcd(self.b, self.c)}")
        if self.s < 0:
            raise ValueError("s must be a nonnegative integer")


def _len_in_base(m: int, base: int) -> int:
    if base == 10:
        return len(str(m))
    n = 0
    while m:
        m //= base
        n += 1
    return max(n, 1)


def _digits_in_base(m: int, base: int) -> list[int]:
    if base == 10:
        return [int(c) for c in str(m)]
    out = []
    while m:
        m, d = divmod(m, base)
        out.append(d)
    return out[::-1] or [0]


def _integer_concat_length(n: int, base: int) -> int:
    # sum of digit lengths of 1..n: d-digit terms form contiguous runs
    total = 0
    low = 1
    d = 1
    while low <= n:
        high = min(n, low * base - 1)
        total += d * (high - low + 1)
        low *= base
        d += 1
    return total


def _square_concat_length(n: int, base: int) -> int:
    # k^2 has d digits iff base^(d-1) <= k^2 < base^d, so the d-digit squares
    # are k in (isqrt(base^(d-1) - 1), isqrt(base^d - 1)]
    total = 0
    d = 1
    lo = 1
    while lo <= n:
        hi = min(math.isqrt(base**d - 1), n)
        if hi >= lo:
            total += d * (hi - lo + 1)
        lo = math.isqrt(base**d - 1) + 1
        d += 1
    return total


class _PrimeLengths:
    """Grow-only cumulative digit lengths of the primes, base 10."""

    def __init__(self):
        self._lock = threading.Lock()
        self._cumlen: list[int] = [0]  # index n -> total digits of p_1..p_n

    def upto_term(self, n: int) -> int:
        with self._lock:
            if n >= len(self._cumlen):
                ps = primes.first_primes(max(n, 2 * (len(self._cumlen) - 1), 64))
                cum = self._cumlen
                for i in range(len(cum) - 1, len(ps)):
                    cum.append(cum[-1] + len(str(ps[i])))
            return self._cumlen[n]

    def term_count_for_digits(self, want: int) -> int:
        """Smallest n with cumulative length >= want."""
        n = 64
        while self.upto_term(n) < want:
            n *= 2
        lo, hi = 1, n
        while lo < hi:
            mid = (lo + hi) // 2
            if self.upto_term(mid) < want:
                lo = mid + 1
            else:
                hi = mid
        return lo


_prime_lengths = _PrimeLengths()


def exponent_a(family: str, n: int) -> int:
    """Decimal position at which the family's n-th term ends in the concatenation."""
    if n < 1:
        raise ValueError("term index must be >= 1")
    if family == "integers":
        return _integer_concat_length(n, 10)
    if family == "squares":
        return _square_concat_length(n, 10)
    if family == "primes":
        return _prime_lengths.upto_term(n)
    raise ValueError(f"unknown family {family!r}")


def _end_position(spec: ConcatSpec, n: int) -> int:
    if spec.family == "integers":
        return _integer_concat_length(n, spec.base)
    if spec.family == "squares":
        return _square_concat_length(n, spec.base)
    return _prime_lengths.upto_term(n)


def _term(spec: ConcatSpec, n: int) -> int:
    if spec.family == "integers":
        return n
    if spec.family == "squares":
        return n * n
    return primes.first_primes(n)[-1]


def concat_digits(spec: ConcatSpec, n_digits: int) -> DigitStream:
    """Stream of the first digits of the concatenation number."""
    if n_digits < 1:
        raise ValueError("digit count must be >= 1")

    if spec.family == "primes":

        def produce(n: int) -> list[int]:
            count = _prime_lengths.term_count_for_digits(n)
            out: list[int] = []
            for p in primes.first_primes(count):
                out.extend(int(c) for c in str(p))
            return out[:n]

    else:

        def produce(n: int) -> list[int]:
            out: list[int] = []
            k = 1
            while len(out) < n:
                out.extend(_digits_in_base(_term(spec, k), spec.base))
                k += 1
            return out[:n]

    label = f"concat-{spec.family}-b{spec.base}"
    stream = DigitStream(spec.base, produce, label=label)
    stream.ensure(n_digits)
    return stream


def digit_at(spec: ConcatSpec, position: int) -> int:
    """Random access into the concatenation: the digit at 1-indexed ``position``.

    Binary search over term end positions, then an index into the term.
    """
    if position < 1:
        raise ValueError("position must be >= 1")
    lo, hi = 1, 2
    while _end_position(spec, hi) < position:
        lo = hi
        hi *= 2
    while lo < hi:
        mid = (lo + hi) // 2
        if _end_position(spec, mid) < position:
            lo = mid + 1
        else:
            hi = mid
    term_digits = _digits_in_base(_term(spec, lo), spec.base)
    offset = position - _end_position(spec, lo - 1) - 1 if lo > 1 else position - 1
    return term_digits[offset]


def stoneham_digits(spec: StonehamSpec, n_digits: int, guard: int = 10) -> DigitStream:
    """First base-b digits of the series, certified against the truncated tail.

    Terms with c^n + s > n_digits + guard are dropped; the exact rational
    partial sum is accepted only once the tail bound provably cannot reach the
    next digit boundary (the guard widens automatically in the rare case it
    could).
    """
    if n_digits < 1:
        raise ValueError("digit count must be >= 1")

    def produce(n: int) -> list[int]:
        return _stoneham_prefix(spec, n, guard)

    label = f"stoneham-b{spec.b}-c{spec.c}-s{spec.s}"
    stream = DigitStream(spec.b, produce, label=label)
    stream.ensure(n_digits)
    return stream


def _stoneham_prefix(spec: StonehamSpec, n_digits: int, guard: int) -> list[int]:
    b, c, s = spec.b, spec.c, spec.s
    for _ in range(8):
        total = Fraction(0)
        n = 1
        while c**n + s <= n_digits + guard:
            total += Fraction(1, c**n * b ** (c**n + s))
            n += 1
        # tail < 2 * first omitted term (each successive term shrinks by > 1/2)
        tail = Fraction(2, c**n * b ** (c**n + s))
        scaled = total * b**n_digits
        ipart = scaled.numerator // scaled.denominator
        if (scaled - ipart) + tail * b**n_digits < 1:
            out = []
            v = ipart
            for _ in range(n_digits):
                v, d = divmod(v, b)
                out.append(d)
            return out[::-1]
        guard += 10
    raise ArithmeticError("tail bound failed to certify digits after widening the guard")


def prime_terms(n_max: int) -> list[int]:
    """The first n_max primes, sieve-backed."""
    if n_max < 1:
        raise ValueError("count must be >= 1")
    return primes.first_primes(n_max)
