"""Multiplicative orders, subgroups of (Z/mZ)*, and Artin primitive-root scans.

Order computation factors the totient (trial division, then Brent's rho with
deterministic parameters) and descends through divisors; anything left
unfactored aborts loudly rather than risking a wrong order.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from . import primes

DEFAULT_ELEMENT_CAP = 1 << 16
_TRIAL_LIMIT = 10**6


class FactoringError(RuntimeError):
    """Factoring gave up; the offending composite is named."""

    def __init__(self, composite: int):
        super().__init__(f"could not factor composite {composite}")
        self.composite = composite


class WindowExhaustedError(RuntimeError):
    """No prime was found inside the configured search window."""


@dataclass(frozen=True)
class SubgroupReport:
    """The cyclic subgroup generated by ``generator`` in (Z/modulus Z)*."""

    modulus: int
    generator: int
    order: int
    totient: int
    is_primitive: bool
    elements: Optional[tuple[int, ...]]  # materialized only when order <= cap


@dataclass(frozen=True)
class CosetReport:
    """The sets {p 10^n mod q} and {(p q + 1) 10^n mod q} against <10> mod q."""

    p: int
    q: int
    hypothesis_ok: bool  # gcd(10, q) == 1
    base: Optional[SubgroupReport]
    g_size: int
    h_size: int
    h_equals_subgroup: bool
    g_equals_coset: bool
    g_elements: Optional[tuple[int, ...]]
    h_elements: Optional[tuple[int, ...]]


@dataclass(frozen=True)
class ArtinScan:
    limit: int
    count_primes: int
    count_artin: int
    density: float


@dataclass(frozen=True)
class ArtinWindow:
    q_k: int
    window: tuple[int, int]
    prime: Optional[int]  # least qualifying prime, None when the window has none
    count: int


def _brent_rho(n: int) -> int:
    # deterministic parameter sweep; n must be odd, composite, not a prime power handled upstream
    if n % 2 == 0:
        return 2
    for c in range(1, 50):
        y, m = 2, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r <<= 1
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g
    raise FactoringError(n)


def factorize(n: int) -> dict[int, int]:
    """Prime factorization as {prime: exponent}."""
    if n < 1:
        raise ValueError("factorize needs n >= 1")
    factors: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            factors[p] = factors.get(p, 0) + 1
            n //= p
    d = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while d * d <= n and d < _TRIAL_LIMIT:
        while n % d == 0:
            factors[d] = factors.get(d, 0) + 1
            n //= d
        d += wheel[i]
        i = (i + 1) % len(wheel)
    if n > 1:
        stack = [n]
        while stack:
            m = stack.pop()
            if m == 1:
                continue
            if primes.is_prime(m):
                factors[m] = factors.get(m, 0) + 1
                continue
            if m < _TRIAL_LIMIT * _TRIAL_LIMIT:
                # trial division already covered sqrt(m); cannot happen
                raise FactoringError(m)
            g = _brent_rho(m)
            stack.extend((g, m // g))
    return factors


def euler_phi(m: int) -> int:
    if m < 1:
        raise ValueError("totient needs m >= 1")
    phi = 1
    for p, e in factorize(m).items():
        phi *= (p - 1) * p ** (e - 1)
    return phi


def mult_order(g: int, m: int) -> int:
    """Least n >= 1 with g^n = 1 mod m, via totient factorization and descent."""
    if m < 2:
        raise ValueError("modulus must be >= 2")
    if math.gcd(g, m) != 1:
        raise ValueError(f"gcd({g}, {m}) = {math.gcd(g, m)} != 1: {g} is not a unit mod {m}")
    order = euler_phi(m)
    for ell in factorize(order):
        while order % ell == 0 and pow(g, order // ell, m) == 1:
            order //= ell
    return order


def subgroup(g: int, m: int, element_cap: int = DEFAULT_ELEMENT_CAP) -> SubgroupReport:
    """Report on <g> mod m; elements are materialized only up to the cap."""
    order = mult_order(g, m)
    totient = euler_phi(m)
    elements = None
    if order <= element_cap:
        elems = []
        x = 1 % m
        for _ in range(order):
            elems.append(x)
            x = x * g % m
        elements = tuple(sorted(elems))
    return SubgroupReport(
        modulus=m, generator=g % m, order=order, totient=totient,
        is_primitive=order == totient, elements=elements,
    )


def _power_set_sorted(start: int, g: int, m: int, count: int) -> np.ndarray:
    out = np.empty(count, dtype=np.int64)
    x = start % m
    for i in range(count):
        out[i] = x
        x = x * g % m
    out.sort()
    return out


def coset_structure(conv, element_cap: int = DEFAULT_ELEMENT_CAP) -> CosetReport:
    """Build {p 10^n mod q} and {(p q + 1) 10^n mod q} literally and compare.

    The second set must coincide with <10> (its multiplier is 1 mod q) and the
    first with the coset p * <10>; gcd(10, q) != 1 is reported as a hypothesis
    failure, not raised.
    """
    p, q = conv.p, conv.q
    if math.gcd(10, q) != 1:
        return CosetReport(
            p=p, q=q, hypothesis_ok=False, base=None, g_size=0, h_size=0,
            h_equals_subgroup=False, g_equals_coset=False,
            g_elements=None, h_elements=None,
        )
    base = subgroup(10, q, element_cap=element_cap)
    order = base.order
    if q * q < 2**62:
        ten_set = _power_set_sorted(1, 10, q, order)
        h_set = _power_set_sorted((p * q + 1) % q, 10, q, order)
        g_set = _power_set_sorted(p % q, 10, q, order)
        coset = np.sort(ten_set * (p % q) % q)
        h_equals = bool(np.array_equal(h_set, ten_set))
        g_equals = bool(np.array_equal(g_set, coset))
        g_unique = np.unique(g_set)
        h_unique = np.unique(h_set)
        g_size, h_size = len(g_unique), len(h_unique)
        g_elems = tuple(int(x) for x in g_unique) if order <= element_cap else None
        h_elems = tuple(int(x) for x in h_unique) if order <= element_cap else None
    else:
        # q^2 would overflow int64 lanes; fall back to exact Python sets
        ten = set()
        x = 1
        for _ in range(order):
            ten.add(x)
            x = x * 10 % q
        h = {(p * q + 1) % q * pow(10, n, q) % q for n in range(order)}
        g = {p % q * pow(10, n, q) % q for n in range(order)}
        h_equals = h == ten
        g_equals = g == {p % q * t % q for t in ten}
        g_size, h_size = len(g), len(h)
        g_elems = tuple(sorted(g)) if order <= element_cap else None
        h_elems = tuple(sorted(h)) if order <= element_cap else None
    return CosetReport(
        p=p, q=q, hypothesis_ok=True, base=base,
        g_size=g_size, h_size=h_size,
        h_equals_subgroup=h_equals, g_equals_coset=g_equals,
        g_elements=g_elems, h_elements=h_elems,
    )


def _order_of_ten(q: int) -> int:
    # q prime, q not 2 or 5: descent over the factorization of q - 1
    order = q - 1
    for ell in factorize(q - 1):
        while order % ell == 0 and pow(10, order // ell, q) == 1:
            order //= ell
    return order


def artin_rows(limit: int) -> Iterator[tuple[int, int, bool]]:
    """(q, ord_q(10), is_artin) for every prime q <= limit except 2 and 5."""
    if limit < 7:
        raise ValueError("limit must be >= 7")
    for q in primes.primes_upto(limit):
        if q in (2, 5):
            continue
        order = _order_of_ten(q)
        yield q, order, order == q - 1


def artin_scan(limit: int, threads: int = 1) -> ArtinScan:
    """Empirical density of primes <= limit for which 10 is a primitive root.

    Primes 2 and 5 are excluded (10 is not a unit there).  The scan partitions
    into chunks whose counts merge by summation, so any thread count yields
    identical results.
    """
    if limit < 100:
        raise ValueError("limit must be >= 100")
    qs = [q for q in primes.primes_upto(limit) if q not in (2, 5)]

    def chunk_counts(chunk: Sequence[int]) -> int:
        return sum(1 for q in chunk if _order_of_ten(q) == q - 1)

    if threads > 1:
        n_chunks = min(threads * 4, len(qs)) or 1
        chunks = [qs[i::n_chunks] for i in range(n_chunks)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            artin = sum(pool.map(chunk_counts, chunks))
    else:
        artin = chunk_counts(qs)
    return ArtinScan(
        limit=limit, count_primes=len(qs), count_artin=artin,
        density=artin / len(qs),
    )


def _window_bounds(q: int, window_factor: float) -> tuple[int, int]:
    width = math.ceil(window_factor * q / math.log(q)) if window_factor > 0 else 0
    return q, q + width


def nearest_prime_in_window(q: int, window_factor: float = 1.0) -> tuple[int, tuple[int, int]]:
    """Least prime in [q, q + ceil(window_factor * q / ln q)]; error when none."""
    if q < 3:
        raise ValueError("window search needs q >= 3")
    lo, hi = _window_bounds(q, window_factor)
    c = lo
    while c <= hi:
        if primes.is_prime(c):
            return c, (lo, hi)
        c += 1
    raise WindowExhaustedError(f"no prime in [{lo}, {hi}]")


def find_artin_prime_near(conv, window_factor: float = 1.0) -> ArtinWindow:
    """Least prime q in the window above q_k with ord_q(10) = q - 1 and
    gcd(p_k q_k + 1, q) = 1, plus the count of all such primes.

    An empty window is an outcome (count 0, prime None), not an error.
    """
    q0 = conv.q
    if q0 < 11:
        raise ValueError("window scan needs q_k >= 11")
    lo, hi = _window_bounds(q0, window_factor)
    pq1 = conv.p * q0 + 1
    found = []
    for q in primes.primes_in_range(lo, hi):
        if math.gcd(pq1, q) != 1:
            continue
        if _order_of_ten(q) == q - 1:
            found.append(q)
    return ArtinWindow(
        q_k=q0, window=(lo, hi),
        prime=found[0] if found else None, count=len(found),
    )
