"""Richert's weighted sifting function evaluated exactly on concrete sequences.

For z = X^(1/4) and y = X^(1/u), every element coprime to the primes below z
and free of p^2 for z <= p < y contributes

    1 - lambda * sum_{p | a, z <= p < y} (1 - u log p / log X)

Prime divisors in [z, y) are located by sieving the roots of F modulo each
such prime; ``weighted_count(..., method="factor")`` finds them by factoring
the survivors instead and serves as a cross-check.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .arithmetic import big_omega_array, factorize, primes_up_to
from .sequences import SiftedSequence, global_density, sieve_mask, sift_count
from .sievefuncs import F_upper, WeightConfig, f_lower, main_term_constant

SLACK = 1e-9


@dataclass(frozen=True)
class WeightedSieveReport:
    n: int
    variant: int
    cfg: WeightConfig
    z: float
    y_bound: float
    W_value: float
    almost_prime_count: int
    sifted_count: int
    excluded_count: int
    main_term: float
    comparable: bool

    def to_json(self) -> dict:
        out = asdict(self)
        out["cfg"] = self.cfg.to_json()
        return out


@dataclass(frozen=True)
class SelbergCheck:
    z: float
    lower: float
    exact: int
    upper: float

    @property
    def ratio_upper(self) -> float:
        return self.exact / self.upper

    @property
    def ratio_lower(self) -> float:
        return self.exact / self.lower if self.lower > 0 else math.inf


def _segment_weights(seq: SiftedSequence, cfg: WeightConfig, lo: int, hi: int, method: str):
    """Per-survivor weights (in y order) and the p^2-excluded count for y in [lo, hi)."""
    X = seq.X
    log_x = math.log(X)
    z, y_bound = X**0.25, X ** (1.0 / cfg.u)
    sifted = sieve_mask(seq, z, lo, hi) if z > 2 else np.zeros(hi - lo, dtype=bool)
    vals = seq.elements(lo, hi)
    table = primes_up_to(max(math.ceil(y_bound), 2))
    mid_primes = table.between(max(z, 2), y_bound)

    if method == "sieve":
        deduction = np.zeros(hi - lo)
        excluded = np.zeros(hi - lo, dtype=bool)
        for p in mid_primes:
            p = int(p)
            w = 1.0 - cfg.u * math.log(p) / log_x
            for r in seq.roots_mod_prime(p):
                idx = np.arange((r - lo) % p, hi - lo, p)
                deduction[idx] += w
                excluded[idx] |= vals[idx] % (p * p) == 0
        keep = ~sifted & ~excluded
        weights = 1.0 - cfg.lam * deduction[keep]
        return weights.tolist(), int(np.count_nonzero(~sifted & excluded))

    if method == "factor":
        weights, dropped = [], 0
        lo_p, hi_p = max(z, 2), y_bound
        for i in np.flatnonzero(~sifted):
            fac = factorize(int(vals[i])).factors
            mid = [(p, e) for p, e in fac if lo_p <= p < hi_p]
            if any(e > 1 for _, e in mid):
                dropped += 1
                continue
            weights.append(1.0 - cfg.lam * sum(1.0 - cfg.u * math.log(p) / log_x for p, _ in mid))
        return weights, dropped

    raise ValueError(f"unknown method {method!r}")


def weighted_count(
    seq: SiftedSequence,
    cfg: WeightConfig,
    *,
    method: str = "sieve",
    workers: int = 1,
    segment_size: int = 1 << 18,
) -> WeightedSieveReport:
    """Evaluate W(A, u, lambda) and the quantities it is compared against.

    Segments of the y-range are independent; the final sum is exactly
    rounded over all per-survivor weights, so the result does not depend on
    the number of workers or the segment size.
    """
    if cfg.g != seq.degree:
        raise ValueError(f"config is for degree {cfg.g}, sequence has degree {seq.degree}")
    X = seq.X
    z = X**0.25 if X > 1 else 1.0
    y_bound = X ** (1.0 / cfg.u) if X > 1 else 1.0
    bounds = [(lo, min(lo + segment_size, seq.n)) for lo in range(1, seq.n, segment_size)]
    if X <= 1:
        parts = [([1.0] * X, 0)]
    elif workers > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_segment_weights, *zip(*[(seq, cfg, lo, hi, method) for lo, hi in bounds])))
    else:
        parts = [_segment_weights(seq, cfg, lo, hi, method) for lo, hi in bounds]
    W = math.fsum(w for ws, _ in parts for w in ws)
    excluded = sum(d for _, d in parts)

    comparable = cfg.admissible and z >= 2
    sifted = sift_count(seq, z) if z >= 2 else X
    G = global_density(seq, z) if z >= 2 else 1.0
    return WeightedSieveReport(
        n=seq.n,
        variant=seq.variant,
        cfg=cfg,
        z=z,
        y_bound=y_bound,
        W_value=W,
        almost_prime_count=almost_prime_census(seq, cfg.r),
        sifted_count=sifted,
        excluded_count=excluded,
        main_term=X * G * main_term_constant(cfg),
        comparable=comparable,
    )


def almost_prime_census(seq: SiftedSequence, r: int) -> int:
    """#{a in A : Omega(a) <= r}, by factoring every element."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    omegas = big_omega_array(seq.elements())
    return int(np.count_nonzero(omegas <= r))


def selberg_bound_check(seq: SiftedSequence, z: float) -> SelbergCheck:
    """Main terms X G(z) f(s), X G(z) F(s) with s = log X / log z, next to S(A, z)."""
    X = seq.X
    if not 2 <= z <= X:
        raise ValueError(f"need 2 <= z <= X = {X}, got {z}")
    s = math.log(X) / math.log(z)
    main = X * global_density(seq, z)
    return SelbergCheck(z, main * f_lower(s), sift_count(seq, z), main * F_upper(s))
