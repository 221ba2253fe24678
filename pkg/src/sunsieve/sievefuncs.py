"""Linear-sieve functions F and f, and the weight calculus built on them.

F(u) = 2e^g/u on (0, 3], f(u) = 0 on (0, 2] and f(u) = 2e^g log(u-1)/u on
[2, 4]; beyond that the pair follows the coupled delay equations
(uF(u))' = f(u-1), (uf(u))' = F(u-1). Here g is Euler's constant.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import cumulative_simpson
from scipy.interpolate import CubicHermiteSpline

from .quadrature import adaptive_simpson

EULER_GAMMA = float("0.577215664901532860606512090082")
E_GAMMA = math.exp(EULER_GAMMA)
TWO_E_GAMMA = 2.0 * E_GAMMA
LOG3 = math.log(3.0)

DEFAULT_U_MAX = 10.0
DEFAULT_STEPS_PER_UNIT = 10_000
QUAD_TOL = 1e-10
DEFAULT_DELTA = 0.5


def _F_closed(u):
    return TWO_E_GAMMA / u


def _f_closed(u):
    return TWO_E_GAMMA * np.log(u - 1.0) / u


class SieveFunctionTable:
    """Tabulated (F, f) on a uniform grid over [2, u_max].

    Each unit interval is filled by cumulative Simpson integration of the
    delay equations, using values from the previous interval; lookups are
    cubic Hermite with the exact derivatives given by the equations.
    """

    def __init__(self, u_max: float = DEFAULT_U_MAX, steps_per_unit: int = DEFAULT_STEPS_PER_UNIT):
        if u_max < 6:
            raise ValueError(f"u_max must be >= 6, got {u_max}")
        self.u_max = float(u_max)
        self.h = 1.0 / steps_per_unit
        k = steps_per_unit
        units = math.ceil(u_max) - 2
        grid = 2.0 + np.arange(units * k + 1) * self.h
        F = np.full(grid.shape, np.nan)
        f = np.full(grid.shape, np.nan)

        def seg(a):  # grid slice for [a, a+1]
            i = (a - 2) * k
            return slice(i, i + k + 1)

        F[seg(2)] = _F_closed(grid[seg(2)])
        f[seg(2)] = _f_closed(grid[seg(2)])
        f[seg(3)] = _f_closed(grid[seg(3)])
        # F on [a, a+1] for a >= 3 from f on [a-1, a]; f on [a, a+1] for a >= 4 from F on [a-1, a]
        for a in range(3, 2 + units):
            t = grid[seg(a)]
            F[seg(a)] = (a * F[seg(a)][0] + cumulative_simpson(f[seg(a - 1)], dx=self.h, initial=0.0)) / t
            if a >= 4:
                f[seg(a)] = (a * f[seg(a)][0] + cumulative_simpson(F[seg(a - 1)], dx=self.h, initial=0.0)) / t
        self.grid, self.F_values, self.f_values = grid, F, f

        shifted_f = np.concatenate([np.zeros(k), f[:-k]])
        shifted_F = np.concatenate([_F_closed(grid[:k] - 1.0), F[:-k]])
        self._F = CubicHermiteSpline(grid, F, (shifted_f - F) / grid)
        self._f = CubicHermiteSpline(grid, f, (shifted_F - f) / grid)

    def F(self, u: float) -> float:
        self._check(u)
        return TWO_E_GAMMA / u if u <= 3 else float(self._F(u))

    def f(self, u: float) -> float:
        self._check(u)
        if u <= 2:
            return 0.0
        return float(_f_closed(u)) if u <= 4 else float(self._f(u))

    def _check(self, u):
        if u <= 0:
            raise ValueError(f"u must be positive, got {u}")
        if u > self.u_max:
            raise ValueError(f"u = {u} exceeds table range u_max = {self.u_max}")


@lru_cache(maxsize=4)
def default_table(u_max: float = DEFAULT_U_MAX) -> SieveFunctionTable:
    return SieveFunctionTable(u_max)


def F_upper(u: float, table: SieveFunctionTable | None = None) -> float:
    """Upper linear-sieve function F(u)."""
    if u <= 0:
        raise ValueError(f"u must be positive, got {u}")
    if u <= 3:
        return TWO_E_GAMMA / u
    if u <= 5:
        # f(t-1) is in closed form for t in [3, 5]
        integral = adaptive_simpson(lambda t: float(_f_closed(t - 1.0)), 3.0, u, tol=1e-13)
        return (TWO_E_GAMMA + integral) / u
    return (table or default_table()).F(u)


def f_lower(u: float, table: SieveFunctionTable | None = None) -> float:
    """Lower linear-sieve function f(u)."""
    if u <= 0:
        raise ValueError(f"u must be positive, got {u}")
    if u <= 2:
        return 0.0
    if u <= 4:
        return float(_f_closed(u))
    return (table or default_table()).f(u)


def D_closed(u: float) -> float:
    """u log(4/u) - (u-1) log(3/(u-1)) for 1 < u <= 4."""
    if not 1 < u <= 4:
        raise ValueError(f"D_closed needs 1 < u <= 4, got {u}")
    return u * math.log(4.0 / u) - (u - 1.0) * math.log(3.0 / (u - 1.0))


def richert_integral(u: float, tol: float = QUAD_TOL) -> float:
    """Integral over t in [u, 4] of F(4(1 - 1/t)) (1 - u/t) dt/t, by quadrature."""
    if not 1 < u <= 4:
        raise ValueError(f"richert_integral needs 1 < u <= 4, got {u}")

    def integrand(t):
        return F_upper(4.0 * (1.0 - 1.0 / t)) * (1.0 - u / t) / t

    return adaptive_simpson(integrand, u, 4.0, tol=tol)


def Lambda_r(r: int) -> float:
    return r + 1 - math.log(4.0 / (1.0 + 3.0**-r)) / LOG3


@dataclass(frozen=True)
class WeightConfig:
    r: int
    delta: float
    g: int
    u: float
    Lambda_r: float
    lam: float
    exponent_ok: bool
    positive_main_term: bool

    @property
    def admissible(self) -> bool:
        return self.exponent_ok and self.positive_main_term

    def to_json(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        out["admissible"] = self.admissible
        out["main_term_constant"] = main_term_constant(self)
        return out


def _constant(u: float, lam: float) -> float:
    return 0.5 * E_GAMMA * (LOG3 - lam * D_closed(u))


def make_weight_config(r: int, delta: float = DEFAULT_DELTA, g: int = 1) -> WeightConfig:
    """Weights u = 1 + 3^-r, 1/lambda = r + 1 - u(Lambda_r - delta) for degree g.

    Admissible when Lambda_r - delta exceeds g + 1 (elements grow like X^(g+1))
    and the main-term constant is positive.
    """
    if r < 2:
        raise ValueError(f"r must be >= 2, got {r}")
    if not 0 < delta <= 2 / 3:
        raise ValueError(f"delta must lie in (0, 2/3], got {delta}")
    if g not in (1, 2):
        raise ValueError(f"degree must be 1 or 2, got {g}")
    u = 1.0 + 3.0**-r
    lam_r = Lambda_r(r)
    lam = 1.0 / (r + 1 - u * (lam_r - delta))
    return WeightConfig(
        r=r,
        delta=delta,
        g=g,
        u=u,
        Lambda_r=lam_r,
        lam=lam,
        exponent_ok=lam_r - delta > g + 1,
        positive_main_term=_constant(u, lam) > 0,
    )


def main_term_constant(cfg: WeightConfig) -> float:
    """(e^g/2)(log 3 - lambda D(u)): the n-independent factor of the lower bound for W."""
    return _constant(cfg.u, cfg.lam)
