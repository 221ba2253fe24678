"""The sifted sequences n + (n-1)y and (n+1)y^2 - 2ny + n^2 over 1 <= y < n.

Counts are exact integers. Roots of the polynomial modulo primes drive all
counting: divisibility counts come from roots modulo d and arithmetic
progressions, sifting counts from marking root progressions in a boolean
array over y.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .arithmetic import (
    PrimeTable,
    crt_pair,
    factorize,
    legendre,
    primes_up_to,
    sqrt_mod,
)

SEGMENT_SIZE = 1 << 20
INT64_MAX = np.iinfo(np.int64).max


@dataclass(frozen=True)
class SiftedSequence:
    """The multiset {F(y) : 1 <= y < n} for F = F_n^variant."""

    n: int
    variant: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.variant not in (1, 2):
            raise ValueError(f"variant must be 1 or 2, got {self.variant}")

    @property
    def X(self) -> int:
        return self.n - 1

    @property
    def degree(self) -> int:
        return self.variant

    def coefficients(self) -> tuple[int, ...]:
        """Coefficients (constant term first)."""
        n = self.n
        if self.variant == 1:
            return (n, n - 1)
        return (n * n, -2 * n, n + 1)

    def poly(self, y: int) -> int:
        """F(y) for any integer y, without range checking."""
        n = self.n
        if self.variant == 1:
            return n + (n - 1) * y
        return (n + 1) * y * y - 2 * n * y + n * n

    def max_element(self) -> int:
        # both polynomials are increasing on [1, n)
        return self.poly(self.n - 1)

    def elements(self, lo: int = 1, hi: int | None = None) -> np.ndarray:
        """F(y) for lo <= y < hi; int64 when it fits, Python ints otherwise."""
        hi = self.n if hi is None else hi
        if self.poly(max(hi - 1, lo)) <= INT64_MAX:
            y = np.arange(lo, hi, dtype=np.int64)
        else:
            y = np.array([int(v) for v in range(lo, hi)], dtype=object)
        n = self.n
        if self.variant == 1:
            return n + (n - 1) * y
        return ((n + 1) * y - 2 * n) * y + n * n

    def roots_mod_prime(self, p: int) -> tuple[int, ...]:
        """Residues y mod p with F(y) = 0 (mod p), ascending."""
        n = self.n
        if self.variant == 1:
            if (n - 1) % p == 0:
                return ()
            return ((-n * pow(n - 1, -1, p)) % p,)
        if p == 2:
            return tuple(y for y in range(2) if self.poly(y) % 2 == 0)
        if (n + 1) % p == 0:
            # leading coefficient vanishes: -2ny + n^2 = 0, and p does not divide n
            return ((n * pow(2, -1, p)) % p,)
        if n % p == 0:
            return (0,)
        s = sqrt_mod(-n, p)
        if s is None:
            return ()
        inv = pow(n + 1, -1, p)
        return tuple(sorted({n * (1 + s) * inv % p, n * (1 - s) * inv % p}))

    def roots_mod_prime_power(self, p: int, k: int) -> tuple[int, ...]:
        """Roots modulo p**k, lifted one power at a time by testing each of the p lifts."""
        roots = self.roots_mod_prime(p)
        mod = p
        for _ in range(k - 1):
            nxt = mod * p
            roots = tuple(
                sorted(
                    r + j * mod
                    for r in roots
                    for j in range(p)
                    if self.poly(r + j * mod) % nxt == 0
                )
            )
            mod = nxt
        return roots

    def roots_mod(self, d: int) -> tuple[int, ...]:
        """Roots modulo an arbitrary d >= 1, combined by CRT."""
        roots, mod = (0,), 1
        for p, k in factorize(d).factors:
            pk = p**k
            local = self.roots_mod_prime_power(p, k)
            roots = tuple(crt_pair(r, mod, s, pk) for r in roots for s in local)
            mod *= pk
            if not roots:
                return ()
        return tuple(sorted(roots))


@dataclass(frozen=True)
class DensityProfile:
    n: int
    variant: int
    z: float
    rho: dict[int, int] = field(repr=False)
    G: float

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "variant": self.variant,
            "z": self.z,
            "rho": {str(p): r for p, r in self.rho.items()},
            "G": self.G,
        }


@dataclass(frozen=True)
class RemainderSample:
    d: int
    exact_count: int
    expected: float
    eta: float

    def to_json(self) -> dict:
        return {"d": self.d, "exact_count": self.exact_count, "expected": self.expected, "eta": self.eta}


def eval_element(seq: SiftedSequence, y: int) -> int:
    if not 1 <= y < seq.n:
        raise ValueError(f"y must satisfy 1 <= y < {seq.n}, got {y}")
    return seq.poly(y)


def local_density(seq: SiftedSequence, p: int) -> int:
    """Number of roots of F modulo the prime p, by closed form."""
    n = seq.n
    if seq.variant == 1:
        return 0 if (n - 1) % p == 0 else 1
    if p == 2:
        # F(1) = n^2 - n + 1 is always odd; F(0) = n^2
        return 1 if n % 2 == 0 else 0
    if (n + 1) % p == 0 or n % p == 0:
        return 1
    # discriminant -4n^3 = -n (2n)^2
    return 1 + legendre(-n, p)


def local_densities(seq: SiftedSequence, primes) -> np.ndarray:
    primes = np.asarray(primes, dtype=np.int64)
    if seq.variant == 1:
        return np.where((seq.n - 1) % primes == 0, 0, 1).astype(np.int64)
    return np.array([local_density(seq, int(p)) for p in primes], dtype=np.int64)


def _require_squarefree(d: int) -> list[int]:
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    fac = factorize(d).factors
    if any(e > 1 for _, e in fac):
        raise ValueError(f"d = {d} is not squarefree")
    return [p for p, _ in fac]


def local_density_squarefree(seq: SiftedSequence, d: int) -> int:
    out = 1
    for p in _require_squarefree(d):
        out *= local_density(seq, p)
    return out


def global_density(seq: SiftedSequence, z: float) -> float:
    """G(z): product over primes p < z of (1 - rho(p)/p)."""
    if z < 2:
        raise ValueError(f"z must be >= 2, got {z}")
    return density_profile(seq, z).G


def density_profile(seq: SiftedSequence, z: float) -> DensityProfile:
    if z < 2:
        raise ValueError(f"z must be >= 2, got {z}")
    primes = primes_up_to(max(math.ceil(z), 2)).primes
    rho = local_densities(seq, primes)
    G = math.prod(1.0 - int(r) / int(p) for p, r in zip(primes, rho))
    return DensityProfile(seq.n, seq.variant, z, {int(p): int(r) for p, r in zip(primes, rho)}, G)


def _count_progressions(roots, d: int, n: int) -> int:
    """Number of y in [1, n) with y congruent to one of ``roots`` mod d."""
    if not len(roots):
        return 0
    r = np.asarray(roots, dtype=object if d > INT64_MAX // 2 else np.int64)
    return int(((n - 1 - r) // d - (-r) // d).sum())


def divisible_count(seq: SiftedSequence, d: int) -> int:
    """#{1 <= y < n : d | F(y)} from the roots of F modulo d."""
    if d < 1:
        raise ValueError(f"d must be >= 1, got {d}")
    return _count_progressions(seq.roots_mod(d), d, seq.n)


def divisible_count_scan(seq: SiftedSequence, d: int) -> int:
    """Direct-scan fallback for ``divisible_count``."""
    vals = seq.elements()
    return int(np.count_nonzero(vals % d == 0))


def remainder(seq: SiftedSequence, d: int) -> RemainderSample:
    rho_d = local_density_squarefree(seq, d)
    exact = divisible_count(seq, d)
    expected = rho_d * seq.X / d
    return RemainderSample(d, exact, expected, abs(exact - expected))


def _first_hit(r: int, p: int, lo: int) -> int:
    """Offset of the first y >= lo with y = r (mod p)."""
    return (r - lo) % p


def sieve_mask(
    seq: SiftedSequence,
    z: float,
    lo: int = 1,
    hi: int | None = None,
    table: PrimeTable | None = None,
) -> np.ndarray:
    """Boolean mask over y in [lo, hi): True where F(y) has a prime factor < z."""
    hi = seq.n if hi is None else hi
    mark = np.zeros(hi - lo, dtype=bool)
    if z <= 2:
        return mark
    table = table or primes_up_to(math.ceil(z))
    for p in table.between(2, z):
        p = int(p)
        for r in seq.roots_mod_prime(p):
            mark[_first_hit(r, p, lo) :: p] = True
    return mark


def sift_count(seq: SiftedSequence, z: float, segment_size: int = SEGMENT_SIZE) -> int:
    """S(A, z): elements coprime to every prime below z."""
    if z < 2:
        raise ValueError(f"z must be >= 2, got {z}")
    table = primes_up_to(max(math.ceil(z), 2))
    total = 0
    for lo in range(1, seq.n, segment_size):
        hi = min(lo + segment_size, seq.n)
        total += (hi - lo) - int(np.count_nonzero(sieve_mask(seq, z, lo, hi, table)))
    return total


def sift_count_q(seq: SiftedSequence, q: int, z: float) -> int:
    """S_q(A, z): elements divisible by q and coprime to every prime below z."""
    primes_q = _require_squarefree(q)
    if any(p < z for p in primes_q):
        raise ValueError(f"q = {q} has a prime factor below z = {z}")
    roots = seq.roots_mod(q)
    if not roots:
        return 0
    mask = sieve_mask(seq, z)
    count = 0
    for r in roots:
        start = r if r >= 1 else q
        ys = np.arange(start, seq.n, q)
        count += int(np.count_nonzero(~mask[ys - 1]))
    return count


def mertens_rho_sums(seq: SiftedSequence, z: float, w: float) -> tuple[float, float]:
    """(sum rho(p)/p, sum rho(p) log p / p) over primes z <= p < w."""
    if not 2 <= z <= w:
        raise ValueError(f"need 2 <= z <= w, got z={z}, w={w}")
    primes = primes_up_to(max(math.ceil(w), 2)).between(z, w)
    if len(primes) == 0:
        return 0.0, 0.0
    rho = local_densities(seq, primes)
    pf = primes.astype(float)
    terms = rho / pf
    return math.fsum(terms), math.fsum(terms * np.log(pf))
