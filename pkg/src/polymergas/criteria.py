"""Fernandez-Procacci and Dobrushin convergence radii.

Both radii have the form ``mu_x / D_x(mu)``. For the Fernandez-Procacci
radius ``D_x`` is the partition function of the closed neighborhood of ``x``
(independent subsets only); for Dobrushin it is the sum over *all* subsets of
that neighborhood, i.e. ``prod (1 + mu_y)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from scipy.optimize import minimize_scalar

from .errors import EnumerationCapError, PolymerGasError
from .model import PolymerSystem, iter_bits
from .partition import BRUTE_CAP, as_activities, z_mask

CRITERIA = ("fp", "dobrushin")


def _mu_vector(system, mu):
    mu = as_activities(system, mu)
    for x, v in enumerate(mu):
        if v < 0:
            raise PolymerGasError(f"mu must be nonnegative; entry {x} is {v}")
    return mu


def _neighborhood_mask(system, x, cap):
    system.check_id(x)
    mask = system.neighbors[x]
    if bin(mask).count("1") > cap:
        raise EnumerationCapError(f"neighborhood of {x} exceeds enumeration cap {cap}")
    return mask


def phi_star(system: PolymerSystem, x: int, mu: Sequence, cap: int = BRUTE_CAP):
    """Partition function of the closed neighborhood of ``x`` at ``mu``."""
    mu = _mu_vector(system, mu)
    return z_mask(system, _neighborhood_mask(system, x, cap), mu)


def phi_dobrushin(system: PolymerSystem, x: int, mu: Sequence, cap: int = BRUTE_CAP):
    mu = _mu_vector(system, mu)
    value = Fraction(1)
    for y in iter_bits(_neighborhood_mask(system, x, cap)):
        value *= 1 + mu[y]
    return value


def fp_radius(system: PolymerSystem, x: int, mu: Sequence, cap: int = BRUTE_CAP):
    mu = _mu_vector(system, mu)
    return mu[x] / phi_star(system, x, mu, cap)


def dobrushin_radius(system: PolymerSystem, x: int, mu: Sequence, cap: int = BRUTE_CAP):
    mu = _mu_vector(system, mu)
    return mu[x] / phi_dobrushin(system, x, mu, cap)


def fp_radii(system: PolymerSystem, mu: Sequence, cap: int = BRUTE_CAP) -> tuple:
    return tuple(fp_radius(system, x, mu, cap) for x in range(system.n))


@dataclass(frozen=True)
class RadiusEntry:
    polymer: int
    label: str
    mu: Fraction
    fp: Fraction
    dobrushin: Fraction


@dataclass(frozen=True)
class RadiiReport:
    entries: tuple
    cap: Optional[int] = None

    @property
    def min_fp(self):
        return min((e.fp for e in self.entries), default=None)

    @property
    def min_dobrushin(self):
        return min((e.dobrushin for e in self.entries), default=None)

    @property
    def dominated(self) -> bool:
        """True when every FP radius is at least the Dobrushin radius."""
        return all(e.fp >= e.dobrushin for e in self.entries)


def radii_report(system: PolymerSystem, mu: Sequence, cap: int = BRUTE_CAP) -> RadiiReport:
    mu = _mu_vector(system, mu)
    entries = tuple(
        RadiusEntry(x, system.labels[x], mu[x], fp_radius(system, x, mu, cap),
                    dobrushin_radius(system, x, mu, cap))
        for x in range(system.n))
    return RadiiReport(entries, system.cap)


@dataclass(frozen=True)
class MuOptimum:
    """Result of the uniform-mu search.

    ``mu``/``radius`` come from the float search; ``mu_exact``/``radius_exact``
    re-evaluate the criterion exactly at a rational snap of ``mu``.
    ``at_boundary`` flags a maximizer sitting on the grid edge, in which case
    the objective may keep growing past ``hi``.
    """

    criterion: str
    mu: float
    radius: float
    mu_exact: Fraction
    radius_exact: Fraction
    at_boundary: bool


def uniform_objective(system: PolymerSystem, mu, criterion: str = "fp"):
    """Smallest radius over all polymers at uniform ``mu`` (float or exact)."""
    if criterion not in CRITERIA:
        raise PolymerGasError(f"unknown criterion {criterion!r}")
    if system.n == 0:
        raise PolymerGasError("empty system has no radii")
    vec = [mu] * system.n
    radius = fp_radius if criterion == "fp" else dobrushin_radius
    return min(radius(system, x, vec) for x in range(system.n))


def optimize_mu_uniform(system: PolymerSystem, lo: float, hi: float, steps: int,
                        refine_iters: int = 100, criterion: str = "fp",
                        max_denominator: int = 10**6) -> MuOptimum:
    """Maximize the uniform-mu radius by grid scan then golden-section refinement."""
    if lo < 0 or not hi > lo or steps < 2:
        raise PolymerGasError(f"degenerate mu grid lo={lo} hi={hi} steps={steps}")
    grid = [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]
    values = [float(uniform_objective(system, float(m), criterion)) for m in grid]
    best = max(range(steps), key=lambda i: (values[i], -i))
    at_boundary = best in (0, steps - 1)
    mu_star, r_star = grid[best], values[best]
    if not at_boundary and values[best - 1] < r_star and values[best + 1] < r_star:
        res = minimize_scalar(
            lambda m: -float(uniform_objective(system, float(m), criterion)),
            bracket=(grid[best - 1], grid[best], grid[best + 1]),
            method="golden", options={"maxiter": refine_iters, "xtol": 1e-12})
        if -res.fun >= r_star:
            mu_star, r_star = float(res.x), float(-res.fun)
    mu_exact = Fraction(mu_star).limit_denominator(max_denominator)
    radius_exact = uniform_objective(system, mu_exact, criterion)
    return MuOptimum(criterion, mu_star, r_star, mu_exact, radius_exact, at_boundary)


def remark_bound_holds(system: PolymerSystem, x: int, mu: Sequence, slack: float = 1e-9) -> bool:
    """``phi_star < exp(sum of mu over the neighborhood)``, checked in floats."""
    mu = _mu_vector(system, mu)
    total = sum(float(mu[y]) for y in iter_bits(system.neighbors[x]))
    return float(phi_star(system, x, mu)) < math.exp(total) + slack
