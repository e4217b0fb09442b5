"""Exact base-b digit expansions of reals in [0,1) and fractional-part arithmetic."""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, Union

_DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"
_LINE_WIDTH = 80


class EmptyTruncationError(ValueError):
    """A zero-digit truncation was requested."""


class ProducerExhaustedError(RuntimeError):
    """A stream cannot supply the requested digit index."""

    def __init__(self, index: int, available: int):
        super().__init__(f"digit {index} requested but only {available} can be supplied")
        self.index = index
        self.available = available


class AmbiguousFloorError(ArithmeticError):
    """A value sits too close to an integer to certify its floor at the given guard."""


class DigitStream:
    """Base-b digits of a real in [0,1), materialized lazily in blocks.

    ``produce(n)`` must deterministically return at least the first ``n``
    digits of the expansion.  Producers are assumed cheap in bulk and
    expensive per digit, so consumers should declare how many digits they
    need up front; internally requests are batched with doubling growth.

    Digits are 1-indexed.  ``exact`` carries the represented value when it is
    a known rational; ``length`` bounds finite streams.  A stream may be read
    concurrently once its first N digits are materialized; extending a shared
    stream must be serialized by the caller.
    """

    def __init__(
        self,
        base: int,
        produce: Callable[[int], Sequence[int]],
        label: str = "",
        exact: Optional[Fraction] = None,
        length: Optional[int] = None,
    ):
        if base < 2:
            raise ValueError(f"base must be >= 2, got {base}")
        self.base = base
        self.label = label
        self.exact = exact
        self.length = length
        self._produce = produce
        self._digits: list[int] = []

    @property
    def available(self) -> int:
        return len(self._digits)

    def ensure(self, n: int) -> None:
        """Materialize at least the first ``n`` digits."""
        if n <= len(self._digits):
            return
        if self.length is not None and n > self.length:
            raise ProducerExhaustedError(n, self.length)
        want = max(n, 64, 2 * len(self._digits))
        if self.length is not None:
            want = min(want, self.length)
        got = list(self._produce(want))
        if len(got) < n:
            raise ProducerExhaustedError(n, len(got))
        base = self.base
        for d in got[len(self._digits):]:
            if not 0 <= d < base:
                raise ValueError(f"digit {d} outside [0, {base})")
        self._digits = got

    def digit(self, i: int) -> int:
        """The i-th digit, 1-indexed."""
        if i < 1:
            raise ValueError(f"digit index must be >= 1, got {i}")
        self.ensure(i)
        return self._digits[i - 1]

    def prefix(self, n: int) -> list[int]:
        """The first ``n`` digits as a list."""
        if n < 0:
            raise ValueError("prefix length must be >= 0")
        self.ensure(n)
        return self._digits[:n]

    def prefix_string(self, n: int) -> str:
        return "".join(_DIGIT_CHARS[d] for d in self.prefix(n))

    @classmethod
    def from_rational(cls, value: Fraction, base: int = 10, label: str = "") -> "DigitStream":
        """Exact expansion of a rational in [0,1).

        Long division yields the canonical form: terminating values end in
        zeros, never in a trail of (base-1)s.
        """
        value = Fraction(value)
        if not 0 <= value < 1:
            raise ValueError(f"value must lie in [0,1), got {value}")

        def produce(n: int, num=value.numerator, den=value.denominator, b=base) -> list[int]:
            out = []
            r = num
            for _ in range(n):
                r *= b
                d, r = divmod(r, den)
                out.append(d)
            return out

        return cls(base, produce, label=label, exact=value)

    @classmethod
    def from_digits(
        cls,
        digits: Iterable[int],
        base: int = 10,
        label: str = "",
        exact: Optional[Fraction] = None,
    ) -> "DigitStream":
        """A finite stream over a fixed digit list."""
        digs = list(digits)
        for d in digs:
            if not 0 <= d < base:
                raise ValueError(f"digit {d} outside [0, {base})")
        return cls(base, lambda n: digs, label=label, exact=exact, length=len(digs))


def truncate(stream: DigitStream, n_digits: int) -> Fraction:
    """Exact value of the first ``n_digits`` digits: sum of d_i * b^-i.

    The represented real lies in [result, result + b^-n_digits).
    """
    if n_digits < 1:
        raise EmptyTruncationError("cannot truncate to zero digits")
    digs = stream.prefix(n_digits)
    val = 0
    b = stream.base
    for d in digs:
        val = val * b + d
    return Fraction(val, b**n_digits)


def shifted_fraction(stream: DigitStream, shift: int, n_digits: int) -> DigitStream:
    """The stream dropping the first ``shift`` digits: digit i becomes d_{shift+i}.

    This realizes the fractional part {x * b^shift} exactly for x in (0,1).
    ``n_digits`` declares how many digits the consumer needs, so the parent
    can batch; shift=0 returns an equivalent stream over the same producer.
    """
    if shift < 0:
        raise ValueError("shift must be >= 0")
    if n_digits < 0:
        raise ValueError("digit demand must be >= 0")
    stream.ensure(shift + n_digits)
    exact = None
    if stream.exact is not None:
        exact = (stream.exact * stream.base**shift) % 1
    length = None if stream.length is None else max(stream.length - shift, 0)

    def produce(n: int) -> list[int]:
        return stream.prefix(shift + n)[shift:]

    label = stream.label and f"{stream.label}<<{shift}"
    return DigitStream(stream.base, produce, label=label, exact=exact, length=length)


def fractional_part(x: Union[Fraction, int], guard: int) -> Fraction:
    """Fractional part {x} of a value carried with absolute error < 10^-guard.

    Raises AmbiguousFloorError when x is within 10^-guard of an integer
    without being one exactly: the floor of the underlying real could not be
    certified.  Exact integers pass through to 0.
    """
    if guard < 1:
        raise ValueError("guard must be >= 1")
    x = Fraction(x)
    frac = x - (x.numerator // x.denominator)
    if frac != 0:
        eps = Fraction(1, 10**guard)
        if frac <= eps or 1 - frac <= eps:
            raise AmbiguousFloorError(
                f"value within 10^-{guard} of an integer; floor not certified"
            )
    return frac


def write_digit_file(
    path: Union[str, Path],
    stream: DigitStream,
    count: int,
    label: Optional[str] = None,
) -> None:
    """Write ``count`` digits in the exchange format.

    One header line ``base=<b> count=<N> label=<string>``, then the digits
    with no separators, broken every 80 columns.  Bit-exact round trip.
    """
    if stream.base > len(_DIGIT_CHARS):
        raise ValueError(f"digit files support bases up to {len(_DIGIT_CHARS)}")
    text = stream.prefix_string(count)
    lines = [f"base={stream.base} count={count} label={label if label is not None else stream.label}"]
    for i in range(0, len(text), _LINE_WIDTH):
        lines.append(text[i : i + _LINE_WIDTH])
    Path(path).write_text("\n".join(lines) + "\n", encoding="ascii")


def read_digit_file(path: Union[str, Path]) -> DigitStream:
    """Read a digit file back into a finite stream."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines:
        raise ValueError(f"{path}: empty digit file")
    header = lines[0]
    try:
        base_part, count_part, label_part = header.split(" ", 2)
        base = int(base_part.removeprefix("base="))
        count = int(count_part.removeprefix("count="))
        label = label_part.removeprefix("label=")
    except (ValueError, IndexError) as exc:
        raise ValueError(f"{path}: malformed header {header!r}") from exc
    body = "".join(lines[1:])
    if len(body) != count:
        raise ValueError(f"{path}: header promises {count} digits, found {len(body)}")
    digits = [_DIGIT_CHARS.index(ch) for ch in body]
    return DigitStream.from_digits(digits, base=base, label=label)
