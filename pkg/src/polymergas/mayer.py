"""Ursell coefficients, truncated Mayer series and the Theta log-ratios.

For a tuple ``(x_1..x_n)`` let ``H`` be the graph on positions ``1..n`` with
an edge wherever the two polymers are incompatible (equal polymers always
are). Since every Boltzmann factor is 0 or 1, each edge carries weight -1 and
the Ursell coefficient is the signed count of connected spanning subgraphs of
``H``. Two evaluators are provided:

* :func:`ursell` uses the exponential-formula recursion on subsets of
  positions, grouped by polymer multiplicity so repeated polymers cost nothing.
* :func:`ursell_by_subgraphs` enumerates edge subsets directly and is kept as
  an independent oracle for small ``n``.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, combinations_with_replacement, product
from typing import Iterable, Sequence

from .errors import EnumerationCapError, PolymerGasError, PositivityError
from .model import PolymerSystem, is_independent_mask, iter_bits
from .partition import Activities, Subset, as_activities, negate, z_mask

URSELL_CAP = 7
MAYER_ORDER_CAP = 6
MAYER_VOLUME_CAP = 8
SUBGRAPH_CAP = 7


def _check_tuple(system: PolymerSystem, t: Sequence[int]) -> None:
    if len(t) < 1:
        raise PolymerGasError("cluster tuple must have length >= 1")
    for x in t:
        system.check_id(x)


@lru_cache(maxsize=None)
def _connected_weight(compat: tuple, counts: tuple) -> int:
    """Signed connected-subgraph count for a multiset of polymer types.

    ``compat[i][j]`` is True when types ``i`` and ``j`` are compatible
    (never for ``i == j``); ``counts[i]`` is the multiplicity of type ``i``.
    """
    total = sum(counts)
    if total == 0:
        return 0
    if total == 1:
        return 1
    i0 = next(i for i, c in enumerate(counts) if c)
    acc = _empty_weight(compat, counts)
    ranges = [range(1, c + 1) if i == i0 else range(c + 1) for i, c in enumerate(counts)]
    for sub in product(*ranges):
        if sub == counts:
            continue
        rest = tuple(c - s for c, s in zip(counts, sub))
        a = _empty_weight(compat, rest)
        if not a:
            continue
        ways = 1
        for i, (c, s) in enumerate(zip(counts, sub)):
            ways *= math.comb(c - 1, s - 1) if i == i0 else math.comb(c, s)
        acc -= ways * _connected_weight(compat, sub)
    return acc


def _empty_weight(compat: tuple, counts: tuple) -> int:
    """Signed count of all spanning subgraphs: 1 iff the vertex set carries no edge."""
    present = [i for i, c in enumerate(counts) if c]
    if any(counts[i] > 1 for i in present):
        return 0
    for i, j in combinations(present, 2):
        if not compat[i][j]:
            return 0
    return 1


def _types(system: PolymerSystem, counter: dict) -> tuple[tuple, tuple]:
    ids = sorted(counter)
    compat = tuple(tuple(not system.neighbors[x] >> y & 1 for y in ids) for x in ids)
    return compat, tuple(counter[x] for x in ids)


def ursell(system: PolymerSystem, t: Sequence[int], cap: int = URSELL_CAP) -> int:
    """Ursell coefficient of the tuple ``t`` (an integer)."""
    _check_tuple(system, t)
    if len(t) > cap:
        raise EnumerationCapError(f"tuple length {len(t)} exceeds Ursell cap {cap}")
    return _connected_weight(*_types(system, Counter(t)))


def ursell_by_subgraphs(system: PolymerSystem, t: Sequence[int], cap: int = SUBGRAPH_CAP) -> int:
    """Same coefficient by summing (-1)^|E| over connected spanning edge sets."""
    _check_tuple(system, t)
    n = len(t)
    if n > cap:
        raise EnumerationCapError(f"tuple length {n} exceeds subgraph-enumeration cap {cap}")
    if n == 1:
        return 1
    edges = [(i, j) for i, j in combinations(range(n), 2)
             if system.neighbors[t[i]] >> t[j] & 1]
    total = 0
    for chosen in range(1 << len(edges)):
        parent = list(range(n))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        components = n
        for k, (i, j) in enumerate(edges):
            if chosen >> k & 1:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
                    components -= 1
        if components == 1:
            total += -1 if bin(chosen).count("1") % 2 else 1
    return total


def _check_guard(system, lam_mask, order, order_cap, volume_cap):
    if order < 1:
        raise PolymerGasError("series truncation order must be >= 1")
    if order > order_cap:
        raise EnumerationCapError(f"order {order} exceeds Mayer order guard {order_cap}")
    size = bin(lam_mask).count("1")
    if size > volume_cap:
        raise EnumerationCapError(f"|Lambda| = {size} exceeds Mayer volume guard {volume_cap}")


def _multiset_terms(system, ids, order, must_contain=None):
    """Yield ``(size, counter, coefficient)`` for every multiset of ``ids`` of size
    ``1..order``; the coefficient already folds the multinomial count, i.e. it
    equals ``ursell / prod(m_i!)``."""
    for n in range(1, order + 1):
        for combo in combinations_with_replacement(ids, n):
            if must_contain is not None and must_contain not in combo:
                continue
            counter = Counter(combo)
            phi = _connected_weight(*_types(system, counter))
            if phi == 0:
                continue
            denom = 1
            for m in counter.values():
                denom *= math.factorial(m)
            yield n, counter, Fraction(phi, denom)


def mayer_polynomial(system: PolymerSystem, lam: Subset, order: int,
                     order_cap: int = MAYER_ORDER_CAP,
                     volume_cap: int = MAYER_VOLUME_CAP) -> dict:
    """Coefficients of the order-``order`` truncated Mayer series of ``log Z``.

    Keys are multiplicity tuples aligned with ``sorted(lam)``.
    """
    lam_mask = system.mask(lam)
    _check_guard(system, lam_mask, order, order_cap, volume_cap)
    ids = sorted(iter_bits(lam_mask))
    poly = {}
    for _, counter, coef in _multiset_terms(system, ids, order):
        poly[tuple(counter.get(x, 0) for x in ids)] = coef
    return poly


def _evaluate(counter, w):
    term = Fraction(1)
    for x, m in counter.items():
        term *= w[x] ** m
    return term


def mayer_partial_sums(system: PolymerSystem, lam: Subset, w: Activities, order: int,
                       order_cap: int = MAYER_ORDER_CAP,
                       volume_cap: int = MAYER_VOLUME_CAP,
                       must_contain=None) -> list:
    """Exact partial sums ``S_1..S_order`` of the Mayer series at ``w``.

    With ``must_contain`` set, only clusters containing that polymer count,
    which gives the series of ``Theta`` instead of ``log Z``.
    """
    w = as_activities(system, w)
    lam_mask = system.mask(lam)
    _check_guard(system, lam_mask, order, order_cap, volume_cap)
    ids = sorted(iter_bits(lam_mask))
    by_order = [Fraction(0)] * (order + 1)
    for n, counter, coef in _multiset_terms(system, ids, order, must_contain):
        by_order[n] += coef * _evaluate(counter, w)
    sums, acc = [], Fraction(0)
    for n in range(1, order + 1):
        acc += by_order[n]
        sums.append(acc)
    return sums


def mayer_log_z(system: PolymerSystem, lam: Subset, w: Activities, order: int, **guards) -> float:
    if not system.mask(lam):
        return 0.0
    return float(mayer_partial_sums(system, lam, w, order, **guards)[-1])


def theta_series(system: PolymerSystem, lam: Subset, x: int, w: Activities, order: int,
                 **guards) -> list:
    """Partial sums of the clusters of ``lam`` that contain ``x``."""
    system.check_id(x)
    if not system.mask(lam) >> x & 1:
        raise PolymerGasError(f"polymer {x} is not in Lambda")
    return mayer_partial_sums(system, lam, w, order, must_contain=x, **guards)


def _log_ratio(num, den, what):
    if num <= 0 or den <= 0:
        raise PositivityError(f"{what}: partition functions {num} and {den} must both be positive")
    return math.log(num / den)


def theta_exact_ratio(system: PolymerSystem, lam: Subset, x: int, w: Activities):
    """``(Z_lam(w), Z_{lam - x}(w))`` as exact values."""
    w = as_activities(system, w)
    lam_mask = system.mask(lam)
    system.check_id(x)
    if not lam_mask >> x & 1:
        raise PolymerGasError(f"polymer {x} is not in Lambda")
    memo = {}
    return z_mask(system, lam_mask, w, memo=memo), z_mask(system, lam_mask & ~(1 << x), w, memo=memo)


def theta_exact(system: PolymerSystem, lam: Subset, x: int, w: Activities) -> float:
    """``log Z_lam(w) - log Z_{lam - x}(w)`` from one log of the exact ratio."""
    z_full, z_less = theta_exact_ratio(system, lam, x, w)
    return _log_ratio(z_full, z_less, "Theta outside the positivity region")


def abs_theta(system: PolymerSystem, lam: Subset, x: int, p: Activities) -> float:
    """Positive-term majorant ``log(Q_{lam - x}(p) / Q_lam(p))`` for ``p >= 0``."""
    p = as_activities(system, p)
    if any(v < 0 for v in p):
        raise PolymerGasError("abs_theta needs nonnegative activities")
    q_full, q_less = theta_exact_ratio(system, lam, x, negate(p))
    if q_full <= 0 or q_less <= 0:
        raise PositivityError(
            f"activity vector outside positivity region: Q_Lambda = {q_full}, Q_Lambda-x = {q_less}")
    return _log_ratio(q_less, q_full, "abs_theta")


def _ordering_mask(system, lam_mask, ordering):
    seen = 0
    for x in ordering:
        system.check_id(x)
        if seen >> x & 1:
            raise PolymerGasError(f"polymer {x} repeated in ordering")
        seen |= 1 << x
    if seen != lam_mask:
        raise PolymerGasError("ordering must be a permutation of Lambda")


def _theta_from_table(memo, system, mask, x, w):
    z_full = z_mask(system, mask, w, memo=memo)
    z_less = z_mask(system, mask & ~(1 << x), w, memo=memo)
    return _log_ratio(z_full, z_less, "Theta outside the positivity region")


def telescope_log_z(system: PolymerSystem, lam: Subset, w: Activities,
                    ordering: Iterable[int]) -> float:
    """``log Z_lam`` as a sum of Theta terms, removing polymers in ``ordering``."""
    w = as_activities(system, w)
    lam_mask = system.mask(lam)
    ordering = list(ordering)
    _ordering_mask(system, lam_mask, ordering)
    memo = {}
    total, mask = 0.0, lam_mask
    for x in ordering:
        total += _theta_from_table(memo, system, mask, x, w)
        mask &= ~(1 << x)
    return total


def telescope_correlation(system: PolymerSystem, lam: Subset, subset: Iterable[int],
                          w: Activities) -> float:
    """Correlation of ``subset`` rebuilt as ``prod w * exp(-sum of Thetas)``."""
    w = as_activities(system, w)
    lam_mask = system.mask(lam)
    s_mask = system.mask(subset)
    if s_mask & ~lam_mask:
        raise PolymerGasError("correlation set must be contained in Lambda")
    if not is_independent_mask(system, s_mask):
        raise PolymerGasError("telescoped correlation needs an independent set")
    order = sorted(iter_bits(s_mask))
    memo = {}
    exponent, mask = 0.0, lam_mask
    # remove x_p from Lambda first, then x_{p-1}, ...
    for x in reversed(order):
        exponent += _theta_from_table(memo, system, mask, x, w)
        mask &= ~(1 << x)
    weight = Fraction(1)
    for x in order:
        weight *= w[x]
    return float(weight) * math.exp(-exponent)
