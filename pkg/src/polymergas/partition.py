"""Exact partition functions of a finite polymer system.

Two independent routes compute ``Z_Lambda(w)``: plain enumeration of the
independent subsets, and the deletion recursion
``Z_L = Z_{L - x} + w_x Z_{L - N(x)}`` with memoization on subset bitmasks.
Everything stays in :class:`fractions.Fraction` unless the caller passes
floats in, in which case the arithmetic simply follows the inputs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Optional, Sequence, Union

from .errors import EnumerationCapError, PolymerGasError, ZeroPartitionError
from .model import PolymerSystem, is_independent_mask, iter_bits

BRUTE_CAP = 24
SUBSET_CAP = 16

Activities = Sequence[Union[Fraction, int, float]]
Subset = Optional[Iterable[int]]


def as_activities(system: PolymerSystem, w: Activities) -> tuple:
    if len(w) != system.n:
        raise PolymerGasError(f"expected {system.n} activities, got {len(w)}")
    return tuple(v if isinstance(v, (Fraction, float)) else Fraction(v) for v in w)


def _require_nonnegative(w, what):
    for x, v in enumerate(w):
        if v < 0:
            raise PolymerGasError(f"{what} must be nonnegative; entry {x} is {v}")


def z_brute(system: PolymerSystem, lam: Subset, w: Activities, cap: int = BRUTE_CAP):
    """Sum of ``prod w_x`` over independent subsets of ``lam`` by enumeration."""
    w = as_activities(system, w)
    ids = list(iter_bits(system.mask(lam)))
    if len(ids) > cap:
        raise EnumerationCapError(
            f"|Lambda| = {len(ids)} exceeds brute-force cap {cap}; use z_recursive")
    total = Fraction(1)
    for local in range(1, 1 << len(ids)):
        mask = 0
        for i, x in enumerate(ids):
            if local >> i & 1:
                mask |= 1 << x
        if is_independent_mask(system, mask):
            term = 1
            for x in iter_bits(mask):
                term *= w[x]
            total += term
    return total


def lowest_pivot(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def z_recursive(system: PolymerSystem, lam: Subset, w: Activities,
                pivot: Callable[[int], int] = lowest_pivot, memo: Optional[dict] = None):
    """Partition function via the fundamental identity.

    ``pivot`` maps a nonempty bitmask to one of its members; ``memo`` may be
    shared between calls that use the same system and activities.
    """
    return z_mask(system, system.mask(lam), as_activities(system, w), pivot, memo)


def z_mask(system: PolymerSystem, mask: int, w: Activities,
           pivot: Callable[[int], int] = lowest_pivot, memo: Optional[dict] = None):
    """:func:`z_recursive` on a subset given as a bitmask."""
    if mask >> system.n:
        raise PolymerGasError("subset mask references unknown polymers")
    memo = {} if memo is None else memo
    nbr = system.neighbors

    def z(mask):
        if mask == 0:
            return Fraction(1)
        hit = memo.get(mask)
        if hit is not None:
            return hit
        x = pivot(mask)
        if not mask >> x & 1:
            raise PolymerGasError(f"pivot {x} is not in the current subset")
        value = z(mask & ~(1 << x)) + w[x] * z(mask & ~nbr[x])
        memo[mask] = value
        return value

    return z(mask)


def z_table(system: PolymerSystem, w: Activities, lam: Subset = None,
            cap: int = SUBSET_CAP) -> dict:
    """``{mask: Z_mask(w)}`` for every subset of ``lam``, by the deletion recursion."""
    w = as_activities(system, w)
    ids = list(iter_bits(system.mask(lam)))
    k = len(ids)
    if k > cap:
        raise EnumerationCapError(f"subset table over {k} polymers exceeds cap {cap}")
    local_nbr = []
    for x in ids:
        m = 0
        for i, y in enumerate(ids):
            if system.neighbors[x] >> y & 1:
                m |= 1 << i
        local_nbr.append(m)
    local = [Fraction(1)] * (1 << k)
    glob = [0] * (1 << k)
    for L in range(1, 1 << k):
        i = lowest_pivot(L)
        local[L] = local[L & (L - 1)] + w[ids[i]] * local[L & ~local_nbr[i]]
        glob[L] = glob[L & (L - 1)] | 1 << ids[i]
    return dict(zip(glob, local))


def z_brute_table(system: PolymerSystem, w: Activities, lam: Subset = None,
                  cap: int = SUBSET_CAP) -> dict:
    """Same table as :func:`z_table`, built by summing independent-set weights
    over subsets (a subset-sum transform); shares no code path with the
    deletion recursion."""
    w = as_activities(system, w)
    ids = list(iter_bits(system.mask(lam)))
    k = len(ids)
    if k > cap:
        raise EnumerationCapError(f"subset table over {k} polymers exceeds cap {cap}")
    glob = [0] * (1 << k)
    f = [Fraction(0)] * (1 << k)
    for L in range(1 << k):
        mask = 0
        for i in range(k):
            if L >> i & 1:
                mask |= 1 << ids[i]
        glob[L] = mask
        if is_independent_mask(system, mask):
            term = Fraction(1)
            for x in iter_bits(mask):
                term *= w[x]
            f[L] = term
    for i in range(k):
        bit = 1 << i
        for L in range(1 << k):
            if L & bit:
                f[L] += f[L ^ bit]
    return dict(zip(glob, f))


def negate(p: Activities) -> tuple:
    return tuple(-v for v in p)


def q_value(system: PolymerSystem, subset: Subset, p: Activities):
    """``Q_S(p) = Z_S(-p)`` for nonnegative ``p``."""
    p = as_activities(system, p)
    _require_nonnegative(p, "Q transform activities")
    return z_recursive(system, subset, negate(p))


def correlation(system: PolymerSystem, lam: Subset, subset: Iterable[int], w: Activities):
    """Probability-like weight ``prod_{x in S} w_x * Z_{L-S} / Z_L``.

    Exactly zero when ``S`` is not an independent set.
    """
    w = as_activities(system, w)
    lam_mask = system.mask(lam)
    s_mask = system.mask(subset)
    if s_mask & ~lam_mask:
        raise PolymerGasError("correlation set must be contained in Lambda")
    memo = {}
    z_lam = z_mask(system, lam_mask, w, memo=memo)
    if z_lam == 0:
        raise ZeroPartitionError("Z_Lambda(w) = 0: evaluation at a zero of the partition function")
    if not is_independent_mask(system, s_mask):
        return Fraction(0)
    weight = Fraction(1)
    for x in iter_bits(s_mask):
        weight *= w[x]
    return weight * z_mask(system, lam_mask & ~s_mask, w, memo=memo) / z_lam


def check_log_subadditivity(system: PolymerSystem, s: Iterable[int], t: Iterable[int],
                            mu: Activities) -> bool:
    """Exact test of ``Z_{S u T}(mu) <= Z_S(mu) Z_T(mu)`` for ``mu >= 0``."""
    mu = as_activities(system, mu)
    _require_nonnegative(mu, "mu")
    sm, tm = system.mask(s), system.mask(t)
    memo = {}
    return (z_mask(system, sm | tm, mu, memo=memo)
            <= z_mask(system, sm, mu, memo=memo) * z_mask(system, tm, mu, memo=memo))
