"""Dual-certified decimal digit engines for pi, ln 10, and ln pi.

Each constant is evaluated by two independent integer-only fixed-point
methods (an arctangent-family series against Chudnovsky binary splitting for
pi; an atanh series against Newton inversion of the exponential series for
the logarithms).  Digits are released only where both computations agree and
the guard digits sit far from a rounding boundary, so every released digit is
exact.
"""

from __future__ import annotations

import math
import os
import sys
import tempfile
import threading
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .radix import DigitStream, read_digit_file, write_digit_file

if hasattr(sys, "set_int_max_str_digits"):
    # big-integer digit strings are the whole point; lift the conversion limit
    sys.set_int_max_str_digits(0)

DIGIT_CEILING = 100_000
CACHE_ENV = "PI_LAB_CACHE"

_INT_PARTS = {"pi": 3, "ln10": 2, "ln_pi": 1}
_METHODS = ("primary", "cross-check")

# Engine error budgets in last-place units of the working scale.  The primary
# series engines stay within a few ulp per term; the exp/Newton cross-check
# amplifies its series floors by up to 2^(reduction+1), so both budgets scale
# with the working precision.  The guard is >= 0.1 N + 10 digits, so the
# boundary margin always sits far below one released-digit unit.


def _agree_ulp(w: int) -> int:
    return 16384 * (w // 3 + 128)


def _boundary_ulp(w: int) -> int:
    return 128 * _agree_ulp(w)

_memo_lock = threading.Lock()
_memo: dict[tuple[str, int], tuple[int, int]] = {}


class MethodDisagreementError(ArithmeticError):
    """The two engines for a constant disagree on a released digit."""

    def __init__(self, name: str, index: int):
        super().__init__(f"{name}: methods first disagree at digit index {index} (0 = integer part)")
        self.name = name
        self.index = index


class PrecisionCeilingError(ValueError):
    """A request exceeded the configured digit ceiling."""


@dataclass(frozen=True)
class ConstantRequest:
    """A named constant, a digit count, and which engine's digits to release."""

    name: str
    digits: int
    method: str = "primary"

    def __post_init__(self):
        if self.name not in _INT_PARTS:
            raise ValueError(f"unknown constant {self.name!r}; expected one of {sorted(_INT_PARTS)}")
        if self.digits < 1:
            raise ValueError("digit count must be >= 1")
        if self.method not in _METHODS:
            raise ValueError(f"method must be one of {_METHODS}")


def _working_digits(n: int) -> int:
    # ceil(1.1 n) + 10 guard policy
    return -(-11 * n // 10) + 10


def _atan_inv_scaled(x: int, one: int) -> int:
    """atan(1/x) * one for integer x >= 2; error a few ulp per term."""
    power = one // x
    total = power
    x2 = x * x
    j = 1
    sign = -1
    while power:
        power //= x2
        total += sign * (power // (2 * j + 1))
        j += 1
        sign = -sign
    return total


def _pi_machin(one: int) -> int:
    return 16 * _atan_inv_scaled(5, one) - 4 * _atan_inv_scaled(239, one)


def _chud_split(a: int, b: int) -> tuple[int, int, int]:
    if b - a == 1:
        if a == 0:
            return 1, 1, 13591409
        k = a
        p = (6 * k - 5) * (2 * k - 1) * (6 * k - 1)
        q = k * k * k * 10939058860032000
        t = (13591409 + 545140134 * k) * p
        if k & 1:
            t = -t
        return p, q, t
    m = (a + b) // 2
    p1, q1, t1 = _chud_split(a, m)
    p2, q2, t2 = _chud_split(m, b)
    return p1 * p2, q1 * q2, q2 * t1 + p1 * t2


def _pi_chudnovsky(one: int, w: int) -> int:
    terms = w // 14 + 2
    _, q, t = _chud_split(0, terms)
    s = math.isqrt(10005 * one * one)
    return 426880 * q * s // t


# Logarithms run on binary fixed point internally: normalizing a series term
# is then a shift instead of a quadratic division by a w-digit denominator.

_LOG2_10 = 3.321928094887362


def _bits_for(w: int) -> int:
    return int(w * _LOG2_10) + 64


def _bin_to_decimal(v_bin: int, bits: int, w: int) -> int:
    return v_bin * 10**w >> bits


def _atanh_bin(u_bin: int, bits: int) -> int:
    """atanh(u) * 2^bits for 0 <= u * 2^-bits < 1."""
    u2 = u_bin * u_bin >> bits
    power = u_bin
    total = u_bin
    j = 1
    while power:
        power = power * u2 >> bits
        total += power // (2 * j + 1)
        j += 1
    return total


def _atanh_small_bin(a: int, b: int, bits: int) -> int:
    """atanh(a/b) * 2^bits for small 0 < a < b: per-term cost is one small
    multiply and one small divide instead of a full-width product."""
    a2, b2 = a * a, b * b
    power = (a << bits) // b
    total = power
    j = 1
    while power:
        power = power * a2 // b2
        total += power // (2 * j + 1)
        j += 1
    return total


def _ln2_bin(bits: int) -> int:
    return 2 * _atanh_small_bin(1, 3, bits)


def _ln_rational_atanh(num: int, den: int, w: int) -> int:
    """ln(num/den) * 10^w via power-of-two reduction to [2/3, 4/3] plus atanh."""
    if num <= 0 or den <= 0:
        raise ValueError("log argument must be positive")
    bits = _bits_for(w)
    k = num.bit_length() - den.bit_length()
    y_num, y_den = num, den
    if k >= 0:
        y_den <<= k
    else:
        y_num <<= -k
    while 3 * y_num < 2 * y_den:  # y < 2/3: double y, lower k
        y_num <<= 1
        k -= 1
    while 3 * y_num > 4 * y_den:  # y > 4/3: halve y, raise k
        y_den <<= 1
        k += 1
    u_num = y_num - y_den
    u_den = y_num + y_den
    sign = 1 if u_num >= 0 else -1
    if abs(u_num).bit_length() + u_den.bit_length() <= 128:
        at = _atanh_small_bin(abs(u_num), u_den, bits)
    else:
        at = _atanh_bin((abs(u_num) << bits) // u_den, bits)
    result = k * _ln2_bin(bits) + 2 * sign * at
    return _bin_to_decimal(result, bits, w)


def _exp_bin(y_bin: int, bits: int) -> int:
    """exp(y * 2^-bits) * 2^bits for |y * 2^-bits| <= 8: reduce, Taylor, square."""
    neg = y_bin < 0
    y = -y_bin if neg else y_bin
    j = max(0, y.bit_length() - bits + 10)  # reduced argument below 2^-10
    t = y >> j
    term = t
    acc = (1 << bits) + t
    i = 2
    while term:
        term = (term * t >> bits) // i
        acc += term
        i += 1
    for _ in range(j):
        acc = acc * acc >> bits
    if neg:
        acc = (1 << 2 * bits) // acc
    return acc


def _ln_rational_newton(num: int, den: int, w: int) -> int:
    """ln(num/den) * 10^w by Newton inversion of the exponential series.

    Precision doubles each iteration, so the total cost is a small multiple
    of the final full-precision exponential.
    """
    if num <= 0 or den <= 0:
        raise ValueError("log argument must be positive")
    bits = _bits_for(w)
    y = int((math.log(num) - math.log(den)) * 2.0**48)
    b = 48
    while b < bits:
        b_next = min(max(2 * b - 8, b + 1), bits)
        y <<= b_next - b
        e = _exp_bin(y, b_next)
        target = (num << b_next) // den
        y += ((target - e) << b_next) // e
        b = b_next
    return _bin_to_decimal(y, bits, w)


def _pi_scaled_pair(w: int) -> tuple[int, int]:
    one = 10**w
    return _pi_machin(one), _pi_chudnovsky(one, w)


def _ln10_scaled_pair(w: int) -> tuple[int, int]:
    return _ln_rational_atanh(10, 1, w), _ln_rational_newton(10, 1, w)


def _ln_pi_scaled_pair(w: int) -> tuple[int, int]:
    # ln(pi_hat) with pi_hat = P/10^(w+5); the substitution error is below
    # 10^-(w+4) and the truncation P is itself dual-certified.
    p_scaled = _certified_scaled("pi", w + 5)
    den = 10 ** (w + 5)
    return (
        _ln_rational_atanh(p_scaled, den, w),
        _ln_rational_newton(p_scaled, den, w),
    )


_ENGINES = {
    "pi": _pi_scaled_pair,
    "ln10": _ln10_scaled_pair,
    "ln_pi": _ln_pi_scaled_pair,
}


def _first_diff_index(v1: int, v2: int, w: int) -> int:
    s1 = str(v1).rjust(w + 1, "0")
    s2 = str(v2).rjust(w + 1, "0")
    for i, (c1, c2) in enumerate(zip(s1, s2)):
        if c1 != c2:
            return i
    return min(len(s1), len(s2))


def _certified_scaled(name: str, n_digits: int) -> int:
    """floor(value * 10^n_digits) with every digit certified by both engines."""
    with _memo_lock:
        hit = _memo.get((name, n_digits))
    if hit is not None:
        return hit[0]
    w = _working_digits(n_digits)
    for _ in range(10):
        v1, v2 = _ENGINES[name](w)
        if abs(v1 - v2) > _agree_ulp(w):
            raise MethodDisagreementError(name, _first_diff_index(v1, v2, w))
        shift = 10 ** (w - n_digits)
        margin = _boundary_ulp(w)
        rem = v1 % shift
        if margin < rem < shift - margin:
            released = v1 // shift
            with _memo_lock:
                _memo[(name, n_digits)] = (released, w)
            return released
        w += 32  # released digit sat on a rounding boundary; widen the guard
    raise MethodDisagreementError(name, n_digits)


def _certified_fraction_digits(name: str, n_digits: int) -> str:
    scaled = _certified_scaled(name, n_digits)
    frac = scaled - _INT_PARTS[name] * 10**n_digits
    if not 0 <= frac < 10**n_digits:
        raise MethodDisagreementError(name, 0)
    return str(frac).rjust(n_digits, "0")


def integer_part(name: str) -> int:
    """The integer part of a supported constant (digit streams carry only the fraction)."""
    if name not in _INT_PARTS:
        raise ValueError(f"unknown constant {name!r}")
    return _INT_PARTS[name]


def _cache_path(name: str) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"{name}.digits"


def _cache_load(name: str, n_digits: int) -> str | None:
    path = _cache_path(name)
    if path is None or not path.exists():
        return None
    try:
        stream = read_digit_file(path)
    except (ValueError, OSError):
        return None
    if stream.length is not None and stream.length >= n_digits:
        return stream.prefix_string(n_digits)
    return None


def _cache_store(name: str, digits: str) -> None:
    path = _cache_path(name)
    if path is None:
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    stream = DigitStream.from_digits([int(c) for c in digits], base=10, label=name)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{name}.")
    os.close(fd)
    try:
        write_digit_file(tmp, stream, len(digits), label=name)
        os.replace(tmp, path)  # atomic: readers never observe a partial file
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)


def _released_digits(name: str, n_digits: int) -> str:
    cached = _cache_load(name, n_digits)
    if cached is not None:
        return cached
    digits = _certified_fraction_digits(name, n_digits)
    _cache_store(name, digits)
    return digits


def const_digits(req: ConstantRequest) -> DigitStream:
    """Certified fractional digits of a constant as an extensible stream.

    Both engines always run; the stream is released only after they agree on
    every digit (the ``method`` field selects whose output is returned, which
    is identical by then).  The integer part is exposed via integer_part().
    """
    if req.digits > DIGIT_CEILING:
        raise PrecisionCeilingError(f"{req.digits} digits exceeds ceiling {DIGIT_CEILING}")

    def produce(n: int) -> list[int]:
        if n > DIGIT_CEILING:
            raise PrecisionCeilingError(f"{n} digits exceeds ceiling {DIGIT_CEILING}")
        return [int(c) for c in _released_digits(req.name, n)]

    stream = DigitStream(10, produce, label=req.name)
    stream.ensure(req.digits)
    return stream


def pi_stream(n_digits: int = 64) -> DigitStream:
    """Convenience stream of pi's fractional digits, extensible on demand."""
    return const_digits(ConstantRequest("pi", n_digits))


def x_sequence(n_max: int, precision: int = 30) -> list[Fraction]:
    """The values n*ln(10) + ln(pi) for n = 1..n_max.

    Each entry is an exact rational within 10^-precision of the true value.
    """
    if n_max < 1:
        raise ValueError("sequence starts at n = 1")
    if precision < 1:
        raise ValueError("precision must be >= 1")
    w = precision + len(str(n_max)) + 2
    if w > DIGIT_CEILING:
        raise PrecisionCeilingError(f"{w} working digits exceeds ceiling {DIGIT_CEILING}")
    v10 = _certified_scaled("ln10", w)
    vpi = _certified_scaled("ln_pi", w)
    den = 10**w
    return [Fraction(n * v10 + vpi, den) for n in range(1, n_max + 1)]
