"""Divisor sums over arithmetic progressions, by two independent algorithms.

D(x, q, a) sums tau(n) over n <= x with n = a (mod q).  The `hyperbola`
algorithm counts lattice points (u, v) with u*v <= x and u*v = a (mod q)
directly, one residue class of u at a time; the `sieve` algorithm
tabulates tau up to x and adds along the progression.  The main term
D(x, q) and the error E(x, q, a) = D(x, q, a) - D(x, q) are exact
rationals with denominator dividing phi(q), so zero-sum identities over
residue classes can be asserted exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from .arith import factorize, multiplicative_profile, unit_mask
from .errors import DomainError, NotCoprime

HYPERBOLA_X_CAP = 10**9
SIEVE_X_CAP = 10**8
_CHUNK = 1 << 18


@dataclass(frozen=True)
class ApQuery:
    """A divisor-sum query: sum limit x, modulus q, residue a."""

    x: int
    q: int
    a: int

    def __post_init__(self) -> None:
        if self.x < 1:
            raise DomainError(f"x = {self.x} must be >= 1")
        if self.q < 1:
            raise DomainError(f"q = {self.q} must be >= 1")


class ExactValue(NamedTuple):
    """An exact rational together with its floating-point image."""

    rational: Fraction
    real: float


@lru_cache(maxsize=4)
def tau_table(x: int) -> np.ndarray:
    """tau(n) for n = 0..x (tau(0) set to 0)."""
    if x > SIEVE_X_CAP:
        raise DomainError(f"sieve limited to x <= {SIEVE_X_CAP}")
    tau = np.zeros(x + 1, dtype=np.int64)
    for d in range(1, x + 1):
        tau[d::d] += 1
    tau.flags.writeable = False
    return tau


@lru_cache(maxsize=256)
def _progression_tables(q: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per residue class c mod q: g = gcd(c, q), q' = q/g, inv((c/g) mod q').

    These turn the per-u solvability and solution class of
    u*v = a (mod q) into O(1) table lookups.
    """
    classes = np.arange(q, dtype=np.int64)
    g = np.gcd(classes, q)
    g[0] = q
    qp = q // g
    invp = np.zeros(q, dtype=np.int64)
    for c in range(q):
        m = int(qp[c])
        if m > 1:
            invp[c] = pow(int(c // g[c]), -1, m)
    for arr in (g, qp, invp):
        arr.flags.writeable = False
    return g, qp, invp


@lru_cache(maxsize=32)
def _x_over_u(x: int, lo: int) -> np.ndarray:
    u = np.arange(lo, min(lo + _CHUNK, x + 1), dtype=np.int64)
    r = x // u
    r.flags.writeable = False
    return r


@lru_cache(maxsize=24)
def _residue_chunk(x: int, q: int, lo: int) -> np.ndarray:
    u = np.arange(lo, min(lo + _CHUNK, x + 1), dtype=np.int64)
    c = u % q
    c.flags.writeable = False
    return c


def _hyperbola_count(x: int, q: int, a: int) -> int:
    """Number of pairs u*v <= x with u*v = a (mod q), by lattice counting."""
    a %= q
    g_tab, qp_tab, invp_tab = _progression_tables(q)
    # smallest admissible v per residue class of u; x + 1 marks classes
    # where u*v = a (mod q) has no solution
    solvable = a % g_tab == 0
    v0 = (a // g_tab) * invp_tab % qp_tab
    first = np.where(v0 == 0, qp_tab, v0)
    first = np.where(solvable, first, x + 1)
    total = 0
    for lo in range(1, x + 1, _CHUNK):
        c = _residue_chunk(x, q, lo)
        big_x = _x_over_u(x, lo)
        f = first[c]
        qp = qp_tab[c]
        cnt = np.where(f <= big_x, (big_x - f) // qp + 1, 0)
        total += int(cnt.sum())
    return total


def divisor_sum_ap(query: ApQuery, method: str = "hyperbola") -> int:
    """Exact D(x, q, a) by the requested algorithm."""
    x, q, a = query.x, query.q, query.a
    if method == "hyperbola":
        if x > HYPERBOLA_X_CAP:
            raise DomainError(f"hyperbola limited to x <= {HYPERBOLA_X_CAP}")
        return _hyperbola_count(x, q, a)
    if method == "sieve":
        tau = tau_table(x)
        return int(tau[a % q :: q].sum())
    raise DomainError(f"unknown method {method!r}")


def divisor_sum_ap_all(x: int, q: int) -> list[int]:
    """D(x, q, a) for every residue a in [0, q), from one tau table.

    Exact despite the float accumulator: every partial sum is an integer
    far below 2^53.
    """
    if x < 1 or q < 1:
        raise DomainError("x and q must be >= 1")
    tau = tau_table(x)
    idx = np.arange(x + 1, dtype=np.int64) % q
    sums = np.bincount(idx, weights=tau, minlength=q)
    return [int(v) for v in sums]


def coprime_tau_sum(x: int, q: int, method: str = "hyperbola") -> int:
    """Sum of tau(n) over n <= x with gcd(n, q) = 1.

    The `hyperbola` route counts lattice points with both coordinates
    coprime to q (inner counts are Mobius sums over the squarefree
    divisors of q); `sieve` masks a tau table.
    """
    if x < 1:
        return 0
    units = unit_mask(q)
    if method == "sieve":
        tau = tau_table(x)
        keep = units[np.arange(x + 1, dtype=np.int64) % q]
        return int(tau[keep].sum())
    if method != "hyperbola":
        raise DomainError(f"unknown method {method!r}")
    fq = factorize(q)
    sf_divs: list[tuple[int, int]] = [(1, 1)]
    for p in fq.primes:
        sf_divs += [(d * p, -s) for d, s in sf_divs]
    total = 0
    for lo in range(1, x + 1, _CHUNK):
        keep = units[_residue_chunk(x, q, lo)]
        big_x = _x_over_u(x, lo)[keep]
        acc = np.zeros(len(big_x), dtype=np.int64)
        for d, s in sf_divs:
            acc += s * (big_x // d)
        total += int(acc.sum())
    return total


def divisor_main_term(x: int, q: int, method: str = "hyperbola") -> ExactValue:
    """D(x, q) = (1/phi(q)) * sum of tau(n) over n <= x coprime to q, exactly."""
    if q < 1:
        raise DomainError(f"q = {q} must be >= 1")
    if x < 1:
        return ExactValue(Fraction(0), 0.0)
    _, phi, _ = multiplicative_profile(factorize(q))
    value = Fraction(coprime_tau_sum(x, q, method), phi)
    return ExactValue(value, float(value))


def error_term(query: ApQuery) -> ExactValue:
    """E(x, q, a) = D(x, q, a) - D(x, q) as an exact rational."""
    if math.gcd(query.a, query.q) != 1:
        raise NotCoprime(f"gcd({query.a}, {query.q}) > 1")
    d_ap = divisor_sum_ap(query, "hyperbola")
    main = divisor_main_term(query.x, query.q)
    value = Fraction(d_ap) - main.rational
    return ExactValue(value, float(value))
