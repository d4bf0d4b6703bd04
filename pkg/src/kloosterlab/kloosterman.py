"""Exact evaluation of complete and incomplete Kloosterman sums.

The complete sum S(a, b; q) runs over residues n mod q coprime to q and
adds e^{2 pi i (a*nbar + b*n)/q}, nbar the inverse of n.  Composite
moduli are split by twisted multiplicativity,

    S(a, b; m*n) = S(a*nbar, b*nbar; m) * S(a*mbar, b*mbar; n),

so only sums to prime(-power) modulus are ever summed directly.  A
direct-summation mode is kept as the oracle for the split evaluator.

Every numeric result carries an absolute error bound: each evaluated
term contributes 4 machine epsilons, and products propagate first-order
error.  Sums are accumulated with numpy reductions, which are pairwise,
so the bound is very conservative.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .arith import ModulusSplit, factorize, inverse_table, is_prime, unit_mask
from .errors import DomainError, NotCoprime

_TERM_EPS = 4 * float(np.finfo(np.float64).eps)

# Direct phase arithmetic a*inv + b*n is done in int64; q*q must fit.
_DIRECT_MODULUS_CAP = 1 << 31


@dataclass(frozen=True)
class IntegerInterval:
    """The half-open integer interval [offset, offset + length)."""

    offset: int
    length: int

    def __post_init__(self) -> None:
        if self.length < 0:
            raise DomainError("interval length must be >= 0")

    def __len__(self) -> int:
        return self.length

    def values(self) -> range:
        return range(self.offset, self.offset + self.length)


@dataclass(frozen=True)
class SumValue:
    """A complex sum with an absolute bound on its accumulated rounding error.

    Comparisons that matter within err are inconclusive by contract.
    """

    re: float
    im: float
    err: float

    def __post_init__(self) -> None:
        if self.err < 0:
            raise DomainError("error bound must be >= 0")

    @property
    def as_complex(self) -> complex:
        return complex(self.re, self.im)

    @property
    def magnitude(self) -> float:
        return abs(self.as_complex)

    def mul(self, other: "SumValue") -> "SumValue":
        z = self.as_complex * other.as_complex
        err = (
            abs(self.as_complex) * other.err
            + abs(other.as_complex) * self.err
            + self.err * other.err
        )
        return SumValue(z.real, z.imag, err)


def _from_complex(z: complex, err: float) -> SumValue:
    return SumValue(z.real, z.imag, err)


@lru_cache(maxsize=1024)
def _base_table(q: int) -> np.ndarray:
    """S(1, k, q) for all k mod q, as one FFT of the inverse-phase vector.

    With y[n] = e_q(inv(n)) on units and 0 elsewhere, the sum S(1, k, q)
    = sum_n y[n] e^{2 pi i k n / q} is q times the inverse DFT of y.
    """
    if q == 1:
        t = np.array([1.0 + 0.0j])
    else:
        inv = inverse_table(q)
        units = inv >= 0
        y = np.zeros(q, dtype=np.complex128)
        y[units] = np.exp(2j * np.pi * inv[units] / q)
        t = np.fft.ifft(y) * q
    t.flags.writeable = False
    return t


@lru_cache(maxsize=4096)
def _twisted_table(a: int, q: int) -> np.ndarray:
    """S(a, k, q) for all k, for a sharing a factor with q (no unit rescale)."""
    inv = inverse_table(q)
    units = inv >= 0
    y = np.zeros(q, dtype=np.complex128)
    y[units] = np.exp(2j * np.pi * (a * inv[units] % q) / q)
    t = np.fft.ifft(y) * q
    t.flags.writeable = False
    return t


def table_err(q: int) -> float:
    """Per-entry absolute error bound for cached Kloosterman tables."""
    return _TERM_EPS * q


def kloosterman_table(a: int, q: int) -> np.ndarray:
    """Read-only array of S(a, k, q) for k = 0..q-1.

    For a coprime to q this is a permuted view of the base table, via
    S(a, k, q) = S(1, a*k, q); otherwise a dedicated table is built.
    """
    if q < 1:
        raise DomainError("modulus must be positive")
    a %= q
    if q == 1:
        return _base_table(1)
    if math.gcd(a, q) == 1:
        idx = a * np.arange(q, dtype=np.int64) % q
        t = _base_table(q)[idx]
        t.flags.writeable = False
        return t
    return _twisted_table(a, q)


def _direct_sum(a: int, b: int, q: int) -> SumValue:
    """Definitional summation over units mod q; the oracle evaluation path."""
    if q == 1:
        return SumValue(1.0, 0.0, 0.0)
    a %= q
    b %= q
    if q <= _DIRECT_MODULUS_CAP:
        inv = inverse_table(q)
        units = np.nonzero(inv >= 0)[0]
        phases = (a * inv[units] + b * units) % q
        z = complex(np.exp(2j * np.pi * phases / q).sum())
        n_terms = len(units)
    else:
        z = 0j
        n_terms = 0
        for n in range(1, q):
            if math.gcd(n, q) != 1:
                continue
            phases = (a * pow(n, -1, q) + b * n) % q
            z += cmath.exp(2j * cmath.pi * phases / q)
            n_terms += 1
    return _from_complex(z, _TERM_EPS * n_terms)


def _prime_part(a: int, b: int, p: int) -> SumValue:
    a %= p
    b %= p
    if a == 0 and b == 0:
        return SumValue(float(p - 1), 0.0, 0.0)
    if a == 0 or b == 0:
        # Ramanujan sum over units: exactly mu(p) = -1 for prime p.
        return SumValue(-1.0, 0.0, 0.0)
    z = complex(_base_table(p)[a * b % p])
    return _from_complex(z, table_err(p))


def complete_kloosterman(a: int, b: int, q: int, method: str = "crt") -> SumValue:
    """The complete Kloosterman sum S(a, b; q).

    method "crt" (default) splits q into prime-power parts by twisted
    multiplicativity; "direct" performs the definitional summation and
    serves as the independent oracle.
    """
    if q < 1:
        raise DomainError(f"modulus {q} must be >= 1")
    if method == "direct":
        return _direct_sum(a, b, q)
    if method != "crt":
        raise DomainError(f"unknown method {method!r}")
    if q == 1:
        return SumValue(1.0, 0.0, 0.0)
    a %= q
    b %= q
    parts = [p**e for p, e in factorize(q).factors]
    result = SumValue(1.0, 0.0, 0.0)
    for m in parts:
        c = q // m
        cbar = 1 if m == 1 else pow(c % m, -1, m)
        am = a * cbar % m
        bm = b * cbar % m
        if is_prime(m):
            part = _prime_part(am, bm, m)
        else:
            part = _direct_sum(am, bm, m)
        result = result.mul(part)
    return result


def kloosterman_crt(a: int, b: int, split: ModulusSplit) -> SumValue:
    """Two-factor twisted-multiplicativity evaluation of S(a, b; q0*q1)."""
    if len(split.parts) != 2:
        raise DomainError("split must have exactly two parts")
    q0, q1 = split.parts
    if math.gcd(q0, q1) != 1:
        raise NotCoprime(f"gcd({q0}, {q1}) > 1")
    q1bar = 1 if q0 == 1 else pow(q1 % q0, -1, q0)
    q0bar = 1 if q1 == 1 else pow(q0 % q1, -1, q1)
    left = complete_kloosterman(a * q1bar, b * q1bar, q0)
    right = complete_kloosterman(a * q0bar, b * q0bar, q1)
    return left.mul(right)


def incomplete_kloosterman(a: int, q: int, interval: IntegerInterval) -> SumValue:
    """Sum of e_q(a * nbar) over n in the interval with gcd(n, q) = 1.

    Requires gcd(a, q) = 1 and interval length at most q.
    """
    if q < 1:
        raise DomainError(f"modulus {q} must be >= 1")
    if interval.length > q:
        raise DomainError("interval longer than the period q")
    if math.gcd(a, q) != 1:
        raise NotCoprime(f"gcd({a}, {q}) > 1")
    if interval.length == 0:
        return SumValue(0.0, 0.0, 0.0)
    a %= q
    inv = inverse_table(q)
    residues = (interval.offset + np.arange(interval.length, dtype=np.int64)) % q
    invs = inv[residues]
    invs = invs[invs >= 0]
    if len(invs) == 0:
        return SumValue(0.0, 0.0, 0.0)
    phases = a * invs % q
    z = complex(np.exp(2j * np.pi * phases / q).sum())
    return _from_complex(z, _TERM_EPS * len(invs))


def coprime_count(q: int, interval: IntegerInterval) -> int:
    """Number of integers in the interval coprime to q."""
    if interval.length == 0:
        return 0
    mask = unit_mask(q)
    residues = (interval.offset + np.arange(interval.length, dtype=np.int64)) % q
    return int(mask[residues].sum())


def normalized_kl(a: int, p: int) -> float:
    """S(a, 1; p) / sqrt(p) for prime p not dividing a; lies in [-2, 2]."""
    if not is_prime(p):
        raise DomainError(f"{p} is not prime")
    if a % p == 0:
        raise DomainError(f"{p} divides a = {a}")
    value = complete_kloosterman(a, 1, p)
    return value.re / math.sqrt(p)
