"""Brute-force reference implementations used only by the tests.

Everything here favors obviousness over speed: definitional loops in
plain Python, flat enumerations, no caching.  The one shared piece of
production code is window_objective, since the optimization target is
part of the contract being checked, not of the search being validated.
"""

from __future__ import annotations

import cmath
import itertools
import math

from kloosterlab.bounds_opt import WindowSpec, window_objective


def e_q(x: int, q: int) -> complex:
    return cmath.exp(2j * cmath.pi * (x % q) / q)


def kloosterman_brute(a: int, b: int, q: int) -> complex:
    """Definitional S(a, b; q) with per-term pow inverses."""
    if q == 1:
        return 1 + 0j
    total = 0j
    for n in range(1, q):
        if math.gcd(n, q) == 1:
            total += e_q(a * pow(n, -1, q) + b * n, q)
    return total


def incomplete_brute(a: int, q: int, m: int, n: int) -> complex:
    total = 0j
    for v in range(m, m + n):
        if math.gcd(v, q) == 1:
            total += e_q(a * pow(v % q, -1, q), q)
    return total


def interval_fourier_brute(m: int, n: int, q: int, k: int) -> complex:
    return sum(e_q(-v * k, q) for v in range(m, m + n))


def tau_brute(n: int) -> int:
    return sum(1 for d in range(1, n + 1) if n % d == 0)


def divisor_sum_brute(x: int, q: int, a: int) -> int:
    return sum(tau_brute(n) for n in range(1, x + 1) if n % q == a % q)


def mobius_brute(n: int) -> int:
    if n == 1:
        return 1
    m, cnt = n, 0
    for p in range(2, n + 1):
        if p * p > m:
            break
        if m % p == 0:
            m //= p
            cnt += 1
            if m % p == 0:
                return 0
    if m > 1:
        cnt += 1
    return (-1) ** cnt


def totient_brute(n: int) -> int:
    return sum(1 for k in range(1, n + 1) if math.gcd(k, n) == 1)


def tau_l_brute(n: int, l: int) -> int:
    """Ordered l-tuples with product n, by direct recursion."""
    if l == 1:
        return 1
    return sum(tau_l_brute(n // d, l - 1) for d in range(1, n + 1) if n % d == 0)


def assignment_products(primes: tuple[int, ...]) -> list[tuple[int, int, int, int]]:
    """Part products of every prime-to-part assignment, flat 4^omega order."""
    out = []
    for assign in itertools.product((0, 1, 2, 3), repeat=len(primes)):
        d = [1, 1, 1, 1]
        for p, j in zip(primes, assign):
            d[j] *= p
        out.append((d[0], d[1], d[2], d[3]))
    return out


def window_assignment_oracle(
    products: list[tuple[int, int, int, int]], windows: WindowSpec
):
    """Optimal feasible assignment by flat scan; None when infeasible."""
    (lo0, hi0), (lo1, hi1), (lo2, hi2), (lo3, hi3) = windows.intervals
    best = None
    for parts in products:
        d0, d1, d2, d3 = parts
        if (
            d0 < lo0 or d0 > hi0 or d1 < lo1 or d1 > hi1
            or d2 < lo2 or d2 > hi2 or d3 < lo3 or d3 > hi3
        ):
            continue
        cand = (window_objective(parts, windows), parts)
        if best is None or cand < best:
            best = cand
    return None if best is None else best[1]
