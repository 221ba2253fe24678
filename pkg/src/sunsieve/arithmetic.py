"""Exact integer arithmetic: primality, factorization, Moebius, prime tables.

Everything here is a pure function of its arguments. Primality is
deterministic: fixed Miller-Rabin witness sets with proven bounds cover
every integer below 3.3e24, and the strong BPSW test takes over above that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import gmpy2
import numpy as np

TRIAL_BOUND = 10**5

# (exclusive upper bound, witnesses) for deterministic Miller-Rabin.
_MR_WITNESSES = (
    (2_047, (2,)),
    (1_373_653, (2, 3)),
    (25_326_001, (2, 3, 5)),
    (3_215_031_751, (2, 3, 5, 7)),
    (2_152_302_898_747, (2, 3, 5, 7, 11)),
    (3_474_749_660_383, (2, 3, 5, 7, 11, 13)),
    (341_550_071_728_321, (2, 3, 5, 7, 11, 13, 17)),
    (3_825_123_056_546_413_051, (2, 3, 5, 7, 11, 13, 17, 19, 23)),
    (1 << 64, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)),
    (3_317_044_064_679_887_385_961_981, (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)),
)

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


@dataclass(frozen=True)
class FactoredInteger:
    """An integer together with its prime factorization."""

    value: int
    factors: tuple[tuple[int, int], ...] = field(default=())

    @property
    def big_omega(self) -> int:
        return sum(e for _, e in self.factors)

    @property
    def omega(self) -> int:
        return len(self.factors)

    def as_dict(self) -> dict[int, int]:
        return dict(self.factors)

    def recompose(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out


@dataclass(frozen=True)
class PrimeTable:
    """All primes strictly below ``bound``, ascending."""

    bound: int
    primes: np.ndarray

    def __len__(self) -> int:
        return len(self.primes)

    def __iter__(self):
        return (int(p) for p in self.primes)

    def between(self, lo: float, hi: float) -> np.ndarray:
        """Primes p with lo <= p < hi (real endpoints allowed)."""
        i = np.searchsorted(self.primes, math.ceil(lo), side="left")
        j = np.searchsorted(self.primes, math.ceil(hi), side="left")
        return self.primes[i:j]


def is_prime(m: int) -> bool:
    if m < 2:
        return False
    for p in _SMALL_PRIMES:
        if m % p == 0:
            return m == p
    if m < 53 * 53:
        return True
    mm = gmpy2.mpz(m)
    for bound, witnesses in _MR_WITNESSES:
        if m < bound:
            return all(gmpy2.is_strong_prp(mm, a) for a in witnesses)
    return bool(gmpy2.is_strong_bpsw_prp(mm))


def primes_up_to(bound: int) -> PrimeTable:
    """Sieve of Eratosthenes; the table holds primes < bound."""
    if bound < 2:
        raise ValueError(f"bound must be >= 2, got {bound}")
    return PrimeTable(bound, _sieve(int(bound)))


@lru_cache(maxsize=8)
def _sieve(bound: int) -> np.ndarray:
    flags = np.ones(bound, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(bound - 1) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    out = np.flatnonzero(flags).astype(np.int64)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=4)
def _trial_primes(bound: int) -> tuple[int, ...]:
    return tuple(int(p) for p in _sieve(max(bound, 2)))


def _brent(m: int, c: int) -> int:
    """One Brent-rho attempt with x -> x^2 + c; returns a divisor (maybe m)."""
    y, r, q, g = 2, 1, 1, 1
    x = ys = y
    while g == 1:
        x = y
        for _ in range(r):
            y = (y * y + c) % m
        k = 0
        while k < r and g == 1:
            ys = y
            for _ in range(min(128, r - k)):
                y = (y * y + c) % m
                q = q * abs(x - y) % m
            g = math.gcd(q, m)
            k += 128
        r *= 2
    if g == m:
        # batch overshot; walk back one step at a time
        while True:
            ys = (ys * ys + c) % m
            g = math.gcd(abs(x - ys), m)
            if g > 1:
                break
    return g


def _split(m: int) -> int:
    """A nontrivial divisor of the odd composite m."""
    r = math.isqrt(m)
    if r * r == m:
        return r
    c = 1
    while True:
        d = _brent(m, c)
        if 1 < d < m:
            return d
        c += 1


def _factor_cofactor(m: int, out: dict[int, int]) -> None:
    stack = [m]
    while stack:
        k = stack.pop()
        if k == 1:
            continue
        if is_prime(k):
            out[k] = out.get(k, 0) + 1
            continue
        d = _split(k)
        stack.append(d)
        stack.append(k // d)


def factorize(m: int, trial_bound: int = TRIAL_BOUND) -> FactoredInteger:
    """Complete factorization by trial division followed by Brent's rho.

    Trial division stops early once the cofactor is 1, prime, or has no
    divisor below the current prime; what is left goes to rho with the
    deterministic parameter sequence c = 1, 2, 3, ...
    """
    if m < 1:
        raise ValueError(f"factorize needs m >= 1, got {m}")
    value = m
    out: dict[int, int] = {}
    for i, p in enumerate(_trial_primes(trial_bound)):
        if p * p > m:
            break
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            out[p] = e
            if m == 1:
                break
        if i == 24 and is_prime(m):
            break
    if m > 1:
        _factor_cofactor(m, out)
    return FactoredInteger(value, tuple(sorted(out.items())))


def big_omega(m: int) -> int:
    if m > 1 and is_prime(m):
        return 1
    return factorize(m).big_omega


def big_omega_array(values, trial_limit: int = 1 << 10) -> np.ndarray:
    """Omega for every entry of an integer array.

    Divides out primes below ``trial_limit`` with vectorised arithmetic, then
    classifies each cofactor: 1, prime below trial_limit**2, composite below
    trial_limit**3 (exactly two primes), otherwise full factorization.
    """
    vals = np.asarray(values)
    if vals.dtype == object:
        return np.array([big_omega(int(v)) for v in vals], dtype=np.int64)
    rest = vals.astype(np.int64).copy()
    counts = np.zeros(rest.shape, dtype=np.int64)
    for p in _sieve(trial_limit):
        p = int(p)
        hit = rest % p == 0
        while hit.any():
            counts += hit
            rest[hit] //= p
            hit = rest % p == 0
    sq, cube = trial_limit * trial_limit, trial_limit**3
    for i in np.flatnonzero(rest > 1):
        c = int(rest[i])
        if c < sq or is_prime(c):
            counts[i] += 1
        elif c < cube:
            counts[i] += 2
        else:
            counts[i] += factorize(c, trial_bound=2).big_omega
    return counts


def mobius(d: int) -> int:
    if d < 1:
        raise ValueError(f"mobius needs d >= 1, got {d}")
    fac = factorize(d)
    if any(e > 1 for _, e in fac.factors):
        return 0
    return -1 if fac.omega % 2 else 1


def is_squarefree(d: int) -> bool:
    return d >= 1 and all(e == 1 for _, e in factorize(d).factors)


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for an odd prime p."""
    a %= p
    if a == 0:
        return 0
    return 1 if pow(a, (p - 1) // 2, p) == 1 else -1


def sqrt_mod(a: int, p: int) -> int | None:
    """A square root of a modulo the prime p (Tonelli-Shanks), or None."""
    a %= p
    if p == 2 or a == 0:
        return a
    if legendre(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while legendre(z, p) != -1:
        z += 1
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        i, t2 = 0, t
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """The residue mod m1*m2 congruent to r1 (mod m1) and r2 (mod m2); coprime moduli."""
    return (r1 + m1 * ((r2 - r1) * pow(m1, -1, m2) % m2)) % (m1 * m2)
