"""Equidistribution and normality statistics: Weyl sums, star discrepancy,
block frequencies, exponential sums over subgroups of prime fields, and the
chord-length pairing that links rational residues to fractional parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import constants
from .radix import DigitStream, fractional_part, shifted_fraction, truncate
from .groups import SubgroupReport

_FLOAT_SLOP = 5e-16  # per-point trig rounding folded into reported error bounds


class TableCapError(ValueError):
    """A block-frequency table would exceed the configured size cap."""


@dataclass(frozen=True)
class PointSet:
    """Points in [0,1) with a shared certified absolute error bound."""

    points: tuple[float, ...]
    eps: float
    label: str = ""

    def __post_init__(self):
        for u in self.points:
            if not 0.0 <= u < 1.0:
                raise ValueError(f"point {u} outside [0,1)")

    def __len__(self) -> int:
        return len(self.points)

    @classmethod
    def from_fractions(cls, values: Iterable[Fraction], eps: float, label: str = "") -> "PointSet":
        pts = tuple(min(float(v), math.nextafter(1.0, 0.0)) for v in values)
        return cls(points=pts, eps=eps + 2e-16, label=label)


@dataclass(frozen=True)
class WeylRow:
    m: int
    magnitude: float
    error_bound: float


@dataclass(frozen=True)
class WeylReport:
    n_points: int
    label: str
    rows: tuple[WeylRow, ...]


@dataclass(frozen=True)
class BlockStats:
    base: int
    block_len: int
    windows: int
    counts: dict[str, int]  # nonzero patterns only; all base^k patterns enter the stats
    max_abs_dev: float
    chi_square: float
    dof: int


@dataclass(frozen=True)
class ExpSumReport:
    modulus: int
    generator: int
    subgroup_order: int
    c: float
    max_magnitude: float
    argmax: int
    bound: float
    ratio: float
    method: str


@dataclass(frozen=True)
class LipschitzReport:
    n: int
    q: int
    s: int
    delta: Fraction  # truncated {x 10^n} minus s/q
    chord: float     # |e(2 pi {x 10^n}) - e(2 pi s/q)|
    rhs_scale: float  # 1/q^2
    ratio: float      # chord * q^2
    chord_arc_ok: bool


def weyl_sum(pts: PointSet, m_list: Sequence[int]) -> WeylReport:
    """Normalized magnitudes |sum e(2 pi i m u_n)| / N for each frequency m != 0.

    Summation is exactly rounded (math.fsum); the reported error bound folds
    in the propagated point error 2 pi |m| eps.
    """
    n = len(pts)
    if n < 1:
        raise ValueError("point set is empty")
    arr = np.asarray(pts.points, dtype=np.float64)
    rows = []
    for m in m_list:
        if m == 0:
            raise ValueError("frequency m = 0 is not admissible")
        phase = 2.0 * math.pi * m * arr
        mag = math.hypot(math.fsum(np.cos(phase)), math.fsum(np.sin(phase))) / n
        err = 2.0 * math.pi * abs(m) * pts.eps + _FLOAT_SLOP
        rows.append(WeylRow(m=m, magnitude=mag, error_bound=err))
    return WeylReport(n_points=n, label=pts.label, rows=tuple(rows))


def star_discrepancy(pts: PointSet) -> float:
    """Exact 1-D star discrepancy D*_N via the sorted-points formula."""
    n = len(pts)
    if n < 1:
        raise ValueError("point set is empty")
    u = np.sort(np.asarray(pts.points, dtype=np.float64))
    i = np.arange(1, n + 1, dtype=np.float64)
    return float(np.maximum(i / n - u, u - (i - 1) / n).max())


def block_frequency(
    digits: DigitStream, n_digits: int, block_len: int, table_cap: int = 10**7
) -> BlockStats:
    """Overlapping block counts over the first ``n_digits`` digits.

    All base^k patterns enter max_abs_dev and the chi-square statistic, seen
    or not; a table larger than ``table_cap`` asks for a smaller block length.
    """
    b = digits.base
    k = block_len
    if k < 1:
        raise ValueError("block length must be >= 1")
    if n_digits < k:
        raise ValueError("need at least one full window: n_digits >= block length")
    n_patterns = b**k
    if n_patterns > table_cap:
        raise TableCapError(
            f"base^k = {n_patterns} exceeds the table cap {table_cap}; use a smaller block length"
        )
    arr = np.asarray(digits.prefix(n_digits), dtype=np.int64)
    windows = n_digits - k + 1
    codes = np.zeros(windows, dtype=np.int64)
    for i in range(k):
        codes = codes * b + arr[i : i + windows]
    counts = np.bincount(codes, minlength=n_patterns)
    expected = windows / n_patterns
    max_abs_dev = float(np.abs(counts / windows - 1.0 / n_patterns).max())
    chi_square = float(((counts - expected) ** 2 / expected).sum())
    nonzero = {}
    for code in np.flatnonzero(counts):
        pattern = np.base_repr(int(code), base=b).rjust(k, "0") if b != 10 else str(int(code)).rjust(k, "0")
        nonzero[pattern.lower()] = int(counts[code])
    return BlockStats(
        base=b, block_len=k, windows=windows, counts=nonzero,
        max_abs_dev=max_abs_dev, chi_square=chi_square, dof=n_patterns - 1,
    )


def expsum_magnitudes(elements: Sequence[int], p: int, method: str = "fft") -> np.ndarray:
    """|sum_{x in H} e(2 pi i a x / p)| for every a = 0..p-1.

    The transform path evaluates all frequencies as the DFT of the indicator
    vector of H; the naive path sums unit vectors directly.  Both must agree
    to 1e-9 and the tests hold them to it.
    """
    if method == "fft":
        v = np.zeros(p, dtype=np.float64)
        for x in elements:
            v[x % p] += 1.0
        return np.abs(np.fft.fft(v))
    if method == "naive":
        out = np.empty(p, dtype=np.float64)
        xs = np.asarray([x % p for x in elements], dtype=np.float64)
        for a in range(p):
            phase = 2.0 * math.pi * a * xs / p
            out[a] = math.hypot(math.fsum(np.cos(phase)), math.fsum(np.sin(phase)))
        return out
    raise ValueError(f"unknown method {method!r}")


def subgroup_expsum(report: SubgroupReport, c: float = 0.5, method: str = "fft") -> ExpSumReport:
    """Exhaustive max over a = 1..p-1 of the subgroup exponential sum magnitude,
    with the reference envelope exp(-(log p)^c) * #H and their ratio."""
    p = report.modulus
    if not _is_prime(p):
        raise ValueError(f"modulus {p} is not prime")
    if report.elements is None:
        raise ValueError("subgroup elements are not materialized; raise the element cap")
    if c <= 0:
        raise ValueError("c must be positive")
    mags = expsum_magnitudes(report.elements, p, method=method)
    a_max = int(np.argmax(mags[1:]) + 1)
    max_mag = float(mags[a_max])
    bound = math.exp(-((math.log(p)) ** c)) * report.order
    return ExpSumReport(
        modulus=p, generator=report.generator, subgroup_order=report.order,
        c=c, max_magnitude=max_mag, argmax=a_max, bound=bound,
        ratio=max_mag / bound, method=method,
    )


def parseval_sum(elements: Sequence[int], p: int, method: str = "fft") -> tuple[float, int]:
    """(sum_a |S(a)|^2, p * #H): the two sides of the Parseval identity."""
    mags = expsum_magnitudes(elements, p, method=method)
    return float(np.sum(mags * mags)), p * len(elements)


def _is_prime(n: int) -> bool:
    from . import primes

    return primes.is_prime(n)


def lipschitz_pairing(n: int, q: int, s_n: int, digits: DigitStream) -> LipschitzReport:
    """Chord length |e(2 pi {x 10^n}) - e(2 pi s_n/q)| against the 1/q^2 scale.

    Also verifies the chord-arc inequality chord <= 2 pi |delta| that drives
    the pairing argument.
    """
    if q < 1:
        raise ValueError("q must be >= 1")
    prec = max(2 * len(str(q)) + 12, 24)
    digits.ensure(n + prec)
    value = truncate(shifted_fraction(digits, n, prec), prec)
    delta = value - Fraction(s_n, q)
    delta_f = float(delta)
    chord = abs(2.0 * math.sin(math.pi * delta_f))
    rhs_scale = 1.0 / (q * q)
    chord_arc_ok = chord <= 2.0 * math.pi * abs(delta_f) + 1e-15
    return LipschitzReport(
        n=n, q=q, s=s_n, delta=delta, chord=chord, rhs_scale=rhs_scale,
        ratio=chord * q * q, chord_arc_ok=chord_arc_ok,
    )


def shifted_points(digits: DigitStream, n_points: int, shift_digits: int = 24) -> PointSet:
    """The point set { x * b^n mod 1 : n = 1..N } built from exact digit shifts.

    Each point is the shift's ``shift_digits``-digit truncation, so the
    certified error is b^-shift_digits plus float conversion.
    """
    if n_points < 1:
        raise ValueError("need at least one point")
    b = digits.base
    digits.ensure(n_points + shift_digits)
    digs = digits.prefix(n_points + shift_digits)
    scale = b**shift_digits
    pts = []
    code = 0
    for d in digs[:shift_digits]:
        code = code * b + d
    # rolling window: drop the leading digit, append the next one
    drop_scale = b ** (shift_digits - 1)
    for n in range(1, n_points + 1):
        code = (code - digs[n - 1] * drop_scale) * b + digs[n + shift_digits - 1]
        pts.append(code / scale)
    eps = 1.0 / scale + 2e-16
    label = digits.label and f"{digits.label}-shifts"
    return PointSet(points=tuple(pts), eps=eps, label=label)


def wall_criterion_report(
    digits: DigitStream,
    n_points: int,
    k_max: int,
    m_max: int,
    shift_digits: int = 24,
) -> dict:
    """Both sides of the base-b normality equivalence in one report.

    Builds the shift point set { x b^n mod 1 }, runs Weyl magnitudes for
    m = 1..m_max and the star discrepancy, and tabulates block frequencies
    for k = 1..k_max over the same digits.
    """
    if k_max < 1 or m_max < 1:
        raise ValueError("k_max and m_max must be >= 1")
    if n_points < 10 * k_max:
        raise ValueError("need n_points >= 10 * k_max for meaningful block statistics")
    lead = digits.prefix(n_points)
    if all(d == 0 for d in lead):
        raise ValueError("degenerate stream: all digits are zero")
    pts = shifted_points(digits, n_points, shift_digits=shift_digits)
    weyl = weyl_sum(pts, list(range(1, m_max + 1)))
    disc = star_discrepancy(pts)
    blocks = {}
    for k in range(1, k_max + 1):
        stats = block_frequency(digits, n_points, k)
        blocks[str(k)] = {
            "windows": stats.windows,
            "max_abs_dev": stats.max_abs_dev,
            "chi_square": stats.chi_square,
            "dof": stats.dof,
        }
    return {
        "label": digits.label,
        "base": digits.base,
        "n_points": n_points,
        "point_eps": pts.eps,
        "weyl": [
            {"m": row.m, "magnitude": row.magnitude, "error_bound": row.error_bound}
            for row in weyl.rows
        ],
        "star_discrepancy": disc,
        "blocks": blocks,
    }


def x_sequence_audit(n_max: int, m_max: int = 5, precision: int = 30) -> dict:
    """Weyl magnitudes and discrepancy for the fractional parts of
    n*ln(10) + ln(pi), n = 1..n_max."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    xs = constants.x_sequence(n_max, precision=precision)
    fracs = [fractional_part(x, precision) for x in xs]
    pts = PointSet.from_fractions(fracs, eps=10.0**-precision, label="log-lattice")
    weyl = weyl_sum(pts, list(range(1, m_max + 1)))
    return {
        "label": pts.label,
        "n_points": n_max,
        "point_eps": pts.eps,
        "precision": precision,
        "weyl": [
            {"m": row.m, "magnitude": row.magnitude, "error_bound": row.error_bound}
            for row in weyl.rows
        ],
        "star_discrepancy": star_discrepancy(pts),
    }
