"""Exact integer and multiplicative-function primitives.

Everything here is pure integer arithmetic: factorization, modular
inverses, CRT recombination, the standard multiplicative functions
(Mobius, Euler phi, generalized divisor counts tau_l), distance to the
nearest integer, and sieves for smooth squarefree moduli.  All heavier
modules build on these.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache, reduce

import numpy as np

from .errors import DomainError, NotCoprime, NotInvertible, NotSquarefree

MAX_VALUE = 1 << 62

# Deterministic Miller-Rabin witnesses for all n < 3.3 * 10^24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)

_SMALL_SIEVE_LIMIT = 10**6


def is_prime(n: int) -> bool:
    """Deterministic primality test for n up to 2^62."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=None)
def _spf_sieve(limit: int) -> np.ndarray:
    """Smallest-prime-factor table for 0..limit (spf[p] = p for primes)."""
    spf = np.arange(limit + 1, dtype=np.int64)
    for p in range(2, math.isqrt(limit) + 1):
        if spf[p] == p:
            sl = spf[p * p :: p]
            np.minimum(sl, p, out=sl)
    return spf


@lru_cache(maxsize=None)
def primes_up_to(limit: int) -> tuple[int, ...]:
    """All primes <= limit, ascending."""
    if limit < 2:
        return ()
    spf = _spf_sieve(limit)
    idx = np.arange(limit + 1)
    return tuple(int(p) for p in idx[2:][spf[2:] == idx[2:]])


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        seed += 1
        y, c, m = seed, seed + 1, 128
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
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


@dataclass(frozen=True)
class FactoredInteger:
    """A positive integer together with its full prime factorization.

    factors is a tuple of (prime, exponent) pairs with strictly
    increasing primes and exponents >= 1; their product equals value.
    """

    value: int
    factors: tuple[tuple[int, int], ...]
    squarefree: bool = field(init=False)

    def __post_init__(self) -> None:
        if not (1 <= self.value <= MAX_VALUE):
            raise DomainError(f"value {self.value} outside [1, 2^62]")
        prod = 1
        prev = 1
        for p, e in self.factors:
            if p <= prev:
                raise DomainError("primes must be strictly increasing")
            if e < 1:
                raise DomainError("exponents must be >= 1")
            prev = p
            prod *= p**e
        if prod != self.value:
            raise DomainError(f"factors do not multiply to {self.value}")
        object.__setattr__(
            self, "squarefree", all(e == 1 for _, e in self.factors)
        )

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def divisors(self) -> list[int]:
        """All positive divisors, ascending."""
        divs = [1]
        for p, e in self.factors:
            divs = [d * pe for d in divs for pe in _prime_powers(p, e)]
        return sorted(divs)


def _prime_powers(p: int, e: int) -> list[int]:
    out = [1]
    for _ in range(e):
        out.append(out[-1] * p)
    return out


@dataclass(frozen=True)
class SmoothnessSpec:
    """Admits integers all of whose prime factors are <= bound."""

    bound: int

    def __post_init__(self) -> None:
        if self.bound < 1:
            raise DomainError("smoothness bound must be >= 1")

    def admits(self, n: FactoredInteger) -> bool:
        return all(p <= self.bound for p in n.primes)


@dataclass(frozen=True)
class ModulusSplit:
    """An ordered factorization q = q0 * q1 * ... * ql of a squarefree modulus.

    The squarefree product guarantees the parts are pairwise coprime.
    """

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts:
            raise DomainError("split needs at least one part")
        if any(p < 1 for p in self.parts):
            raise DomainError("parts must be positive")
        if not factorize(self.modulus).squarefree:
            raise NotSquarefree(f"product {self.modulus} is not squarefree")

    @property
    def modulus(self) -> int:
        return reduce(lambda a, b: a * b, self.parts, 1)

    @property
    def l(self) -> int:
        return len(self.parts) - 1


def inv_mod(a: int, q: int) -> int:
    """Inverse of a modulo q, in [1, q).  Requires gcd(a, q) = 1 and q >= 2."""
    if q < 2:
        raise DomainError(f"modulus {q} must be >= 2")
    g = math.gcd(a, q)
    if g != 1:
        raise NotInvertible(f"gcd({a}, {q}) = {g}")
    return pow(a, -1, q)


def crt_pair(r1: int, q1: int, r2: int, q2: int) -> int:
    """The unique x in [0, q1*q2) with x = r1 (mod q1) and x = r2 (mod q2)."""
    if q1 < 1 or q2 < 1:
        raise DomainError("moduli must be positive")
    if math.gcd(q1, q2) != 1:
        raise NotCoprime(f"gcd({q1}, {q2}) > 1")
    if q1 == 1:
        return r2 % q2
    if q2 == 1:
        return r1 % q1
    m = inv_mod(q1, q2)
    return (r1 + (r2 - r1) * m % q2 * q1) % (q1 * q2)


def factorize(n: int) -> FactoredInteger:
    """Full prime factorization of n, 1 <= n <= 2^62.

    Small n go through a smallest-prime-factor sieve; larger n use trial
    division by sieved primes and fall back to Pollard rho for any
    remaining cofactor.
    """
    if not (1 <= n <= MAX_VALUE):
        raise DomainError(f"n = {n} outside [1, 2^62]")
    if n <= _SMALL_SIEVE_LIMIT:
        spf = _spf_sieve(_SMALL_SIEVE_LIMIT)
        factors = []
        m = n
        while m > 1:
            p = int(spf[m])
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            factors.append((p, e))
        return FactoredInteger(n, tuple(factors))

    factors: dict[int, int] = {}
    m = n
    for p in primes_up_to(10**4):
        if p * p > m:
            break
        while m % p == 0:
            factors[p] = factors.get(p, 0) + 1
            m //= p
    if m > 1:
        stack = [m]
        resolved: list[int] = []
        while stack:
            c = stack.pop()
            if c == 1:
                continue
            if is_prime(c):
                resolved.append(c)
                continue
            d = _pollard_rho(c)
            stack.append(d)
            stack.append(c // d)
        for p in resolved:
            factors[p] = factors.get(p, 0) + 1
    return FactoredInteger(n, tuple(sorted(factors.items())))


def multiplicative_profile(n: FactoredInteger, l: int = 2) -> tuple[int, int, int]:
    """(mu, phi, tau_l) for a factored integer.

    tau_l counts ordered l-tuples of positive integers with product n;
    tau_2 is the ordinary divisor-count function.
    """
    if l < 2:
        raise DomainError(f"l = {l} must be >= 2")
    mu = 0 if not n.squarefree else (-1) ** len(n.factors)
    phi = 1
    tau_l = 1
    for p, e in n.factors:
        phi *= (p - 1) * p ** (e - 1)
        tau_l *= math.comb(e + l - 1, l - 1)
    return mu, phi, tau_l


def nearest_int_distance(x: float) -> float:
    """Distance from x to the nearest integer, in [0, 1/2]."""
    if not math.isfinite(x):
        raise DomainError("x must be finite")
    return min(abs(x - math.floor(x)), abs(math.ceil(x) - x), 0.5)


def smooth_squarefree_moduli(
    lo: int, hi: int, spec: SmoothnessSpec
) -> list[FactoredInteger]:
    """All squarefree integers in [lo, hi] whose prime factors are <= spec.bound.

    Materialized eagerly with a segmented factor sieve; the span hi - lo
    is capped at 10^8 and hi at 2^40.
    """
    if not (1 <= lo <= hi):
        raise DomainError(f"bad range [{lo}, {hi}]")
    if hi > 1 << 40 or hi - lo > 10**8:
        raise DomainError("range too large for eager enumeration")
    span = hi - lo + 1
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    ok = np.ones(span, dtype=bool)
    factor_lists: list[list[tuple[int, int]]] = [[] for _ in range(span)]

    sieve_limit = min(spec.bound, math.isqrt(hi))
    for p in primes_up_to(sieve_limit):
        start = (-lo) % p
        for i in range(start, span, p):
            if not ok[i]:
                continue
            e = 0
            m = int(rem[i])
            while m % p == 0:
                m //= p
                e += 1
            if e >= 2:
                ok[i] = False
            else:
                rem[i] = m
                factor_lists[i].append((p, 1))

    out: list[FactoredInteger] = []
    for i in range(span):
        if not ok[i]:
            continue
        m = int(rem[i])
        fl = factor_lists[i]
        if m > 1:
            # m has no prime factor <= min(bound, sqrt(hi)); it is either a
            # prime in (sqrt(hi), hi] or has only factors above the bound.
            if m > spec.bound or not is_prime(m):
                continue
            fl = fl + [(m, 1)]
        out.append(FactoredInteger(lo + i, tuple(fl)))
    return out


@lru_cache(maxsize=512)
def inverse_table(q: int) -> np.ndarray:
    """inv[n] for n in [0, q) with n invertible mod q, and -1 elsewhere."""
    if q < 1:
        raise DomainError("modulus must be positive")
    inv = np.full(q, -1, dtype=np.int64)
    if q == 1:
        inv[0] = 0
        inv.flags.writeable = False
        return inv
    if is_prime(q):
        # O(q) recurrence valid for prime modulus.
        inv[1] = 1
        for i in range(2, q):
            inv[i] = (q - (q // i) * inv[q % i]) % q
    else:
        for n in range(1, q):
            if math.gcd(n, q) == 1:
                inv[n] = pow(n, -1, q)
    inv.flags.writeable = False
    return inv


@lru_cache(maxsize=512)
def unit_mask(q: int) -> np.ndarray:
    """Boolean mask over [0, q) marking residues coprime to q."""
    if q < 1:
        raise DomainError("modulus must be positive")
    mask = inverse_table(q) >= 0
    mask.flags.writeable = False
    return mask
