"""Continued-fraction convergents, residue decompositions, and interval audits
of the fractional parts {pi * 10^n}.

Audits never hard-fail on inequality violations: each row records pass/fail
plus signed margins, and findings are data for the caller to interpret.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import constants, groups
from .radix import DigitStream, ProducerExhaustedError, shifted_fraction, truncate


class InsufficientPrecisionError(ArithmeticError):
    """Not enough certified input digits to release a partial quotient."""

    def __init__(self, first_uncertified: int):
        super().__init__(f"first uncertified partial quotient has index {first_uncertified}")
        self.first_uncertified = first_uncertified


class TerminatedExpansionError(ValueError):
    """A rational input's expansion ended before the requested depth."""


@dataclass(frozen=True)
class Convergent:
    """One continued-fraction step: quotient a_k and the reduced p_k/q_k."""

    k: int
    a: int
    p: int
    q: int

    @property
    def value(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class ResidueDecomposition:
    """Exact division data: 10^n p = a_n q + r_n and (p q + 1) 10^n = b_n q^2 + s_n q + c_n."""

    n: int
    modulus: int
    a_n: int
    r_n: int
    b_n: int
    s_n: int
    c_n: int

    def reconstructs(self, p: int, q: int) -> bool:
        first = 10**self.n * p == self.a_n * self.modulus + self.r_n
        second = (p * q + 1) * 10**self.n == (
            self.b_n * self.modulus**2 + self.s_n * self.modulus + self.c_n
        )
        return first and second


@dataclass(frozen=True)
class AuditConfig:
    """Shared audit knobs: irrationality-measure parameter and row range."""

    mu: float = 2.0
    n_max: int = 12
    implied_constant_report: bool = False

    def __post_init__(self):
        if self.mu < 2:
            raise ValueError("mu must be >= 2")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")


@dataclass(frozen=True)
class AuditRow:
    n: int
    r: int
    s: Optional[int]
    c: Optional[int]
    lower: Fraction
    upper: Fraction
    value: Fraction
    value_error_exp: int
    passed: bool
    margin_lower: Fraction
    margin_upper: Fraction
    lower_exact: bool = True


@dataclass(frozen=True)
class LemmaAudit:
    lemma: str
    k: int
    p: int
    q: int
    mu: float
    k_even: bool
    rows: tuple[AuditRow, ...]


@dataclass(frozen=True)
class PrimeAuditRow:
    n: int
    case: str
    r: int
    s: int
    c: int
    value: Fraction
    value_error_exp: int
    lower_base: Fraction
    upper_base: Fraction
    residual_lower: Fraction
    residual_upper: Fraction
    scaled_lower: Fraction
    scaled_upper: Fraction


@dataclass(frozen=True)
class PrimeLemmaAudit:
    lemma: str
    k: int
    p: int
    q_k: int
    prime: int
    window: tuple[int, int]
    mu: float
    rows: tuple[PrimeAuditRow, ...]


@dataclass(frozen=True)
class GapReport:
    """Signed gap pi - p/q with certified error, plus the three interval flags."""

    k: int
    p: int
    q: int
    gap: Fraction
    error_exp: int
    lower_half_inv_qsq: bool  # 1/(2 q^2) <= gap
    upper_inv_qsq: bool       # gap <= 1/q^2
    classical: bool           # |gap| < 1/(q * q_next)


def _euclid_quotients(x: Fraction, limit: Optional[int] = None) -> list[int]:
    out = []
    num, den = x.numerator, x.denominator
    while den:
        a, rem = divmod(num, den)
        out.append(a)
        num, den = den, rem
        if limit is not None and len(out) > limit:
            break
    return out


def convergents_from_quotients(quotients: Sequence[int]) -> list[Convergent]:
    """Fold partial quotients into convergents via the standard recurrence."""
    out = []
    p_prev, p_prev2 = 1, 0
    q_prev, q_prev2 = 0, 1
    for k, a in enumerate(quotients):
        if k > 0 and a < 1:
            raise ValueError(f"partial quotient a_{k} must be >= 1, got {a}")
        p = a * p_prev + p_prev2
        q = a * q_prev + q_prev2
        p_prev2, p_prev = p_prev, p
        q_prev2, q_prev = q_prev, q
        out.append(Convergent(k=k, a=a, p=p, q=q))
    return out


def _certified_quotients(value_lo: Fraction, width: Fraction) -> list[int]:
    # Quotients shared by the continued fractions of both interval endpoints
    # are quotients of every number in between (fundamental-interval nesting);
    # the last quotient of each terminating expansion may still move, so it is
    # dropped.
    lo = _euclid_quotients(value_lo)[:-1]
    hi = _euclid_quotients(value_lo + width)[:-1]
    agreed = []
    for a, b in zip(lo, hi):
        if a != b:
            break
        agreed.append(a)
    return agreed


def cf_expand(stream: DigitStream, integer_part: int, depth: int) -> list[Convergent]:
    """Partial quotients a_0..a_depth and their convergents.

    Quotients from digit streams are certified twice: the expansion interval
    of the truncation must pin each quotient, and a recomputation at doubled
    precision must agree.  Streams carrying an exact rational expand by plain
    Euclid and terminate; requesting quotients past termination is an error.
    """
    if depth < 0:
        raise ValueError("depth must be >= 0")
    if stream.exact is not None:
        quotients = _euclid_quotients(integer_part + stream.exact)
        if len(quotients) < depth + 1:
            raise TerminatedExpansionError(
                f"expansion terminates after index {len(quotients) - 1}, depth {depth} requested"
            )
        return convergents_from_quotients(quotients[: depth + 1])

    m = 48
    best = 0
    while True:
        try:
            stream.ensure(2 * m)
        except ProducerExhaustedError:
            if stream.length is not None and stream.length >= 2:
                cert = _stream_certified(stream, integer_part, stream.length // 2)
                if len(cert) >= depth + 1:
                    return convergents_from_quotients(cert[: depth + 1])
                best = max(best, len(cert))
            raise InsufficientPrecisionError(best)
        cert = _stream_certified(stream, integer_part, m)
        if len(cert) >= depth + 1:
            return convergents_from_quotients(cert[: depth + 1])
        best = max(best, len(cert))
        m *= 2
        if m > 1 << 22:
            raise InsufficientPrecisionError(best)


def _stream_certified(stream: DigitStream, integer_part: int, m: int) -> list[int]:
    base = stream.base
    once = _certified_quotients(integer_part + truncate(stream, m), Fraction(1, base**m))
    twice = _certified_quotients(integer_part + truncate(stream, 2 * m), Fraction(1, base ** (2 * m)))
    agreed = []
    for a, b in zip(once, twice):
        if a != b:
            break
        agreed.append(a)
    return agreed


_pi_lock = threading.Lock()
_pi_shared: Optional[DigitStream] = None


def pi_convergents(depth: int) -> list[Convergent]:
    """Convergents of pi through index ``depth``."""
    # fresh stream per call: shared-stream extension would need serializing,
    # and digit recomputation is memoized inside the constants module
    return cf_expand(constants.pi_stream(64), 3, depth)


def frac_pi_shift(n: int, n_digits: int) -> Fraction:
    """Truncation of {pi * 10^n} to ``n_digits`` digits, exact via digit shift.

    The true fractional part lies in [result, result + 10^-n_digits).
    """
    if n < 0:
        raise ValueError("shift must be >= 0")
    global _pi_shared
    with _pi_lock:
        if _pi_shared is None:
            _pi_shared = constants.pi_stream(64)
        stream = _pi_shared
        stream.ensure(n + n_digits)
        return truncate(shifted_fraction(stream, n, n_digits), n_digits)


def residue_decompose(conv: Convergent, n: int) -> ResidueDecomposition:
    """Exact integer divisions of 10^n p_k and (p_k q_k + 1) 10^n by q_k powers."""
    if n < 1:
        raise ValueError("n must be >= 1")
    q = conv.q
    a_n, r_n = divmod(10**n * conv.p, q)
    b_n, rem = divmod((conv.p * q + 1) * 10**n, q * q)
    s_n, c_n = divmod(rem, q)
    return ResidueDecomposition(n=n, modulus=q, a_n=a_n, r_n=r_n, b_n=b_n, s_n=s_n, c_n=c_n)


def _nth_root_floor(x: int, n: int) -> int:
    if x < 0 or n < 1:
        raise ValueError("nth root needs x >= 0, n >= 1")
    if x in (0, 1) or n == 1:
        return x
    r = 1 << -(-x.bit_length() // n)
    while True:
        nxt = ((n - 1) * r + x // r ** (n - 1)) // n
        if nxt >= r:
            break
        r = nxt
    while r**n > x:
        r -= 1
    return r


def _inv_power(base_int: int, exponent: float, prec: int) -> tuple[Fraction, bool]:
    """1 / base_int^exponent as a Fraction; exact when the exponent is integral,
    otherwise a certified fixed-point value within 2 * 10^-prec."""
    ex = Fraction(exponent).limit_denominator(10**6)
    if ex.denominator == 1:
        return Fraction(1, base_int ** ex.numerator), True
    a, b = ex.numerator, ex.denominator
    scaled = _nth_root_floor(10 ** (prec * b) // base_int**a, b)
    return Fraction(scaled, 10**prec), False


def _value_with_margin(
    lower: Fraction, upper: Fraction, n: int, q: int
) -> tuple[Fraction, int, bool]:
    """Certified pass/fail of lower <= {pi 10^n} <= upper, widening precision
    until the truncated value clears both endpoints decisively."""
    prec = n + 2 * len(str(q)) + 20
    for _ in range(4):
        v = frac_pi_shift(n, prec)
        eps = Fraction(1, 10**prec)
        # true value in [v, v + eps)
        lower_ok = v >= lower
        lower_fail = v + eps <= lower
        upper_ok = v + eps <= upper
        upper_fail = v > upper
        if (lower_ok or lower_fail) and (upper_ok or upper_fail):
            return v, -prec, lower_ok and upper_ok
        prec *= 2
    raise InsufficientPrecisionError(n)


def audit_lemma_caseI(conv: Convergent, cfg: AuditConfig = AuditConfig()) -> LemmaAudit:
    """Interval audit r/q + 10^n/(2q^2) <= {pi 10^n} <= (r+1)/q over 10^n <= q_k.

    The bounds are formulated for even k (where pi - p_k/q_k > 0); odd k is
    audited anyway with the parity recorded, since findings are data.
    """
    q = conv.q
    rows = []
    n = 1
    while 10**n <= q and n <= cfg.n_max:
        dec = residue_decompose(conv, n)
        lower = Fraction(dec.r_n, q) + Fraction(10**n, 2 * q * q)
        upper = Fraction(dec.r_n + 1, q)
        value, err_exp, passed = _value_with_margin(lower, upper, n, q)
        rows.append(
            AuditRow(
                n=n, r=dec.r_n, s=None, c=None, lower=lower, upper=upper,
                value=value, value_error_exp=err_exp, passed=passed,
                margin_lower=value - lower, margin_upper=upper - value,
            )
        )
        n += 1
    return LemmaAudit(
        lemma="caseI", k=conv.k, p=conv.p, q=q, mu=cfg.mu,
        k_even=conv.k % 2 == 0, rows=tuple(rows),
    )


def audit_lemma_caseII(conv: Convergent, cfg: AuditConfig = AuditConfig()) -> LemmaAudit:
    """Interval audit r/q + q^-(mu-1) <= {pi 10^n} <= s/q + c/q^2 over 10^n > q_k."""
    q = conv.q
    rows = []
    n = len(str(q))  # smallest n with 10^n > q
    prec_for_mu = 2 * len(str(q)) + 20
    term, exact = _inv_power(q, cfg.mu - 1.0, prec_for_mu)
    while n <= cfg.n_max:
        dec = residue_decompose(conv, n)
        lower = Fraction(dec.r_n, q) + term
        upper = Fraction(dec.s_n, q) + Fraction(dec.c_n, q * q)
        value, err_exp, passed = _value_with_margin(lower, upper, n, q)
        rows.append(
            AuditRow(
                n=n, r=dec.r_n, s=dec.s_n, c=dec.c_n, lower=lower, upper=upper,
                value=value, value_error_exp=err_exp, passed=passed,
                margin_lower=value - lower, margin_upper=upper - value,
                lower_exact=exact,
            )
        )
        n += 1
    return LemmaAudit(
        lemma="caseII", k=conv.k, p=conv.p, q=q, mu=cfg.mu,
        k_even=conv.k % 2 == 0, rows=tuple(rows),
    )


def audit_lemma_prime_variant(
    conv: Convergent,
    cfg: AuditConfig = AuditConfig(),
    window_factor: float = 1.0,
) -> PrimeLemmaAudit:
    """Prime-modulus forms of both interval audits with explicit residuals.

    The unspecified O(1/q^2) corrections are never assumed: each row reports
    the raw residual against the stated endpoint and the residual scaled by
    q^2 (the implied constant that would be needed).
    """
    q0 = conv.q
    prime, window = groups.nearest_prime_in_window(q0, window_factor=window_factor)
    rows = []
    prec_for_mu = 2 * len(str(prime)) + 20
    for n in range(1, cfg.n_max + 1):
        a_n, r_n = divmod(10**n * conv.p, prime)
        b_n, rem = divmod((conv.p * q0 + 1) * 10**n, prime * prime)
        s_n, c_n = divmod(rem, prime)
        if 10**n <= q0:
            case = "I"
            lower = Fraction(r_n, 2 * prime)
            upper = Fraction(r_n + 1, prime)
        else:
            case = "II"
            term, _ = _inv_power(2 * prime, cfg.mu - 1.0, prec_for_mu)
            lower = Fraction(r_n, 2 * prime) + term
            upper = Fraction(s_n, prime)
        prec = n + 2 * len(str(prime)) + 20
        value = frac_pi_shift(n, prec)
        res_lower = value - lower
        res_upper = upper - value
        rows.append(
            PrimeAuditRow(
                n=n, case=case, r=r_n, s=s_n, c=c_n, value=value,
                value_error_exp=-prec, lower_base=lower, upper_base=upper,
                residual_lower=res_lower, residual_upper=res_upper,
                scaled_lower=res_lower * prime * prime,
                scaled_upper=res_upper * prime * prime,
            )
        )
    return PrimeLemmaAudit(
        lemma="prime", k=conv.k, p=conv.p, q_k=q0, prime=prime,
        window=window, mu=cfg.mu, rows=tuple(rows),
    )


def approximation_gap(
    conv: Convergent,
    next_conv: Convergent,
    pi_value: Optional[Fraction] = None,
    error_exp: Optional[int] = None,
) -> GapReport:
    """The signed gap pi - p_k/q_k with certified comparisons.

    ``pi_value`` must carry absolute error below 10^error_exp; by default a
    sufficiently precise truncation is fetched internally.  Every flag is
    decided with the error interval taken into account; an undecidable
    comparison raises rather than guessing.
    """
    need = 2 * len(str(conv.q)) + 12
    if pi_value is None:
        m = need
        pi_value = Fraction(3) + frac_pi_shift(0, m)
        error_exp = -m
    elif error_exp is None or -error_exp < need:
        raise InsufficientPrecisionError(conv.k)

    eps = Fraction(1, 10 ** (-error_exp))
    target = conv.value
    gap_lo = pi_value - target
    gap_hi = gap_lo + eps

    def decide(holds_everywhere: bool, fails_everywhere: bool) -> bool:
        if holds_everywhere:
            return True
        if fails_everywhere:
            return False
        raise InsufficientPrecisionError(conv.k)

    q = conv.q
    half_qsq = Fraction(1, 2 * q * q)
    inv_qsq = Fraction(1, q * q)
    classical = Fraction(1, q * next_conv.q)
    lower_flag = decide(gap_lo >= half_qsq, gap_hi < half_qsq)
    upper_flag = decide(gap_hi <= inv_qsq, gap_lo > inv_qsq)
    abs_hi = max(abs(gap_lo), abs(gap_hi))
    abs_lo = Fraction(0) if gap_lo <= 0 <= gap_hi else min(abs(gap_lo), abs(gap_hi))
    classical_flag = decide(abs_hi < classical, abs_lo >= classical)
    return GapReport(
        k=conv.k, p=conv.p, q=q, gap=gap_lo, error_exp=error_exp,
        lower_half_inv_qsq=lower_flag, upper_inv_qsq=upper_flag,
        classical=classical_flag,
    )


def _frac_str(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


def audit_to_jsonable(audit, include_scaled: bool = True) -> dict:
    """Serialize an audit with exact rationals rendered as num/den strings."""
    if isinstance(audit, LemmaAudit):
        return {
            "lemma": audit.lemma,
            "k": audit.k,
            "p": str(audit.p),
            "q": str(audit.q),
            "mu": repr(audit.mu),
            "k_even": audit.k_even,
            "rows": [
                {
                    "n": row.n,
                    "r": row.r,
                    "s": row.s,
                    "c": row.c,
                    "lower": _frac_str(row.lower),
                    "upper": _frac_str(row.upper),
                    "value": _frac_str(row.value),
                    "value_error_exp": row.value_error_exp,
                    "pass": row.passed,
                    "margin_lower": _frac_str(row.margin_lower),
                    "margin_upper": _frac_str(row.margin_upper),
                    "lower_exact": row.lower_exact,
                }
                for row in audit.rows
            ],
        }
    if isinstance(audit, PrimeLemmaAudit):
        rows = []
        for row in audit.rows:
            entry = {
                "n": row.n,
                "case": row.case,
                "r": row.r,
                "s": row.s,
                "c": row.c,
                "value": _frac_str(row.value),
                "value_error_exp": row.value_error_exp,
                "lower": _frac_str(row.lower_base),
                "upper": _frac_str(row.upper_base),
                "residual_lower": _frac_str(row.residual_lower),
                "residual_upper": _frac_str(row.residual_upper),
            }
            if include_scaled:
                entry["scaled_lower"] = _frac_str(row.scaled_lower)
                entry["scaled_upper"] = _frac_str(row.scaled_upper)
            rows.append(entry)
        return {
            "lemma": audit.lemma,
            "k": audit.k,
            "p": str(audit.p),
            "q_k": str(audit.q_k),
            "q": str(audit.prime),
            "window": list(audit.window),
            "mu": repr(audit.mu),
            "rows": rows,
        }
    raise TypeError(f"cannot serialize {type(audit).__name__}")
