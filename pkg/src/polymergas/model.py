"""Polymer systems: the incompatibility graph, test families and subset gases.

Polymers are dense integer ids ``0..n-1``. A subset of polymers is handled
internally as an int bitmask; the public functions accept any iterable of ids
and return ``frozenset`` objects.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Optional, Sequence

from .errors import InvalidPolymerError, PolymerGasError


@dataclass(frozen=True)
class PolymerSystem:
    """Finite polymer set with a symmetric, reflexive incompatibility relation.

    ``neighbors[x]`` is the bitmask of the closed neighborhood of ``x``: every
    polymer incompatible with ``x``, ``x`` included.
    """

    labels: tuple[str, ...]
    neighbors: tuple[int, ...]
    supports: Optional[tuple[frozenset, ...]] = field(default=None, compare=False)
    cap: Optional[int] = field(default=None, compare=False)

    def __post_init__(self):
        n = len(self.labels)
        if len(self.neighbors) != n:
            raise PolymerGasError("one neighborhood mask per polymer required")
        for x, mask in enumerate(self.neighbors):
            if mask >> n:
                raise InvalidPolymerError(f"neighborhood of {x} references unknown polymers")
            if not mask >> x & 1:
                raise PolymerGasError(f"polymer {x} must be incompatible with itself")
            for y in iter_bits(mask):
                if not self.neighbors[y] >> x & 1:
                    raise PolymerGasError(f"incompatibility {x}-{y} is not symmetric")

    @classmethod
    def from_pairs(cls, n: int, pairs: Iterable[tuple[int, int]], labels=None, **kw):
        """Build a system from its cross-incompatible pairs (self-loops implicit)."""
        if n < 0:
            raise PolymerGasError("negative polymer count")
        masks = [1 << x for x in range(n)]
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise InvalidPolymerError(f"pair ({x}, {y}) out of range for {n} polymers")
            masks[x] |= 1 << y
            masks[y] |= 1 << x
        if labels is None:
            labels = [str(i) for i in range(n)]
        return cls(tuple(labels), tuple(masks), **kw)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def incompatible(self, x: int, y: int) -> bool:
        self.check_id(x)
        self.check_id(y)
        return bool(self.neighbors[x] >> y & 1)

    def check_id(self, x: int) -> None:
        if not isinstance(x, int) or not 0 <= x < self.n:
            raise InvalidPolymerError(f"invalid polymer id {x!r} (system has {self.n})")

    def mask(self, ids: Optional[Iterable[int]]) -> int:
        """Bitmask of ``ids``; ``None`` means the whole system."""
        if ids is None:
            return self.full_mask
        if isinstance(ids, int):
            raise TypeError("expected an iterable of polymer ids, not an int")
        m = 0
        for x in ids:
            self.check_id(x)
            m |= 1 << x
        return m

    def cross_pairs(self) -> list[tuple[int, int]]:
        return [(x, y) for x, y in combinations(range(self.n), 2)
                if self.neighbors[x] >> y & 1]


def iter_bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members(mask: int) -> frozenset:
    return frozenset(iter_bits(mask))


def neighborhood(system: PolymerSystem, x: int) -> frozenset:
    system.check_id(x)
    return members(system.neighbors[x])


def is_independent_mask(system: PolymerSystem, mask: int) -> bool:
    for x in iter_bits(mask):
        if system.neighbors[x] & mask & ~(1 << x):
            return False
    return True


def is_independent(system: PolymerSystem, subset: Iterable[int]) -> bool:
    return is_independent_mask(system, system.mask(subset))


FAMILIES = ("path", "cycle", "complete", "edgeless")


def make_family(kind: str, n: int) -> PolymerSystem:
    """Standard test families on ``n`` polymers."""
    if n < 1:
        raise PolymerGasError("family size must be at least 1")
    if kind == "path":
        pairs = [(i, i + 1) for i in range(n - 1)]
    elif kind == "cycle":
        pairs = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(i, i + 1) for i in range(n - 1)]
    elif kind == "complete":
        pairs = list(combinations(range(n), 2))
    elif kind == "edgeless":
        pairs = []
    else:
        raise PolymerGasError(f"unknown family {kind!r}; expected one of {', '.join(FAMILIES)}")
    return PolymerSystem.from_pairs(n, pairs)


@dataclass(frozen=True)
class SubsetGasSpec:
    """Finite underlying space plus a polymer size cap.

    When ``edges`` is given, only subsets that are connected in that site
    graph become polymers.
    """

    space: tuple[str, ...]
    max_polymer_size: int
    edges: Optional[frozenset] = None

    def __post_init__(self):
        if not self.space:
            raise PolymerGasError("subset gas needs a nonempty space")
        if len(set(self.space)) != len(self.space):
            raise PolymerGasError("duplicate site labels")
        if not 1 <= self.max_polymer_size <= len(self.space):
            raise PolymerGasError(
                f"max_polymer_size must lie in 1..{len(self.space)}, got {self.max_polymer_size}")
        if self.edges is not None:
            for u, v in self.edges:
                if u not in self.space or v not in self.space:
                    raise PolymerGasError(f"edge ({u}, {v}) uses an unknown site")


def _connected(sites: tuple, adjacency: dict) -> bool:
    seen = {sites[0]}
    stack = [sites[0]]
    pool = set(sites)
    while stack:
        u = stack.pop()
        for v in adjacency.get(u, ()):
            if v in pool and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(pool)


def build_subset_gas(spec: SubsetGasSpec) -> PolymerSystem:
    """Polymers are nonempty subsets of the space; two overlap iff incompatible."""
    adjacency = None
    if spec.edges is not None:
        adjacency = {}
        for u, v in spec.edges:
            adjacency.setdefault(u, set()).add(v)
            adjacency.setdefault(v, set()).add(u)
    supports = []
    for size in range(1, spec.max_polymer_size + 1):
        for sites in combinations(spec.space, size):
            if adjacency is None or _connected(sites, adjacency):
                supports.append(frozenset(sites))
    order = {s: i for i, s in enumerate(spec.space)}
    labels = ["{" + ",".join(sorted(s, key=order.__getitem__)) + "}" for s in supports]
    pairs = [(i, j) for i, j in combinations(range(len(supports)), 2)
             if supports[i] & supports[j]]
    return PolymerSystem.from_pairs(len(supports), pairs, labels,
                                    supports=tuple(supports), cap=spec.max_polymer_size)


def restrict_to(system: PolymerSystem, subset: Iterable[int]) -> tuple[PolymerSystem, tuple[int, ...]]:
    """Induced subsystem on ``subset``; returns it with the map new id -> old id."""
    keep = tuple(sorted(members(system.mask(subset))))
    index = {old: new for new, old in enumerate(keep)}
    masks = []
    for old in keep:
        m = 0
        for y in iter_bits(system.neighbors[old]):
            if y in index:
                m |= 1 << index[y]
        masks.append(m)
    supports = None
    if system.supports is not None:
        supports = tuple(system.supports[old] for old in keep)
    sub = PolymerSystem(tuple(system.labels[old] for old in keep), tuple(masks),
                        supports=supports, cap=system.cap)
    return sub, keep


def polymers_within(system: PolymerSystem, sites: Iterable) -> frozenset:
    """Ids of subset-gas polymers whose support lies inside ``sites``."""
    if system.supports is None:
        raise PolymerGasError("system carries no site supports (not a subset gas)")
    sites = frozenset(sites)
    return frozenset(i for i, s in enumerate(system.supports) if s <= sites)


def relabel(system: PolymerSystem, perm: Sequence[int]) -> PolymerSystem:
    """Isomorphic copy where old polymer ``x`` becomes ``perm[x]``."""
    n = system.n
    if sorted(perm) != list(range(n)):
        raise PolymerGasError("relabel needs a permutation of the polymer ids")
    pairs = [(perm[x], perm[y]) for x, y in system.cross_pairs()]
    labels = [None] * n
    for old, new in enumerate(perm):
        labels[new] = system.labels[old]
    return PolymerSystem.from_pairs(n, pairs, labels)
