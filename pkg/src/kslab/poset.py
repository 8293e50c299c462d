"""Finite posets stored as transitively closed strict relations.

Element ids are 1-based.  Internally every element also carries two bitmasks
(strict down-set and strict up-set) with bit ``u - 1`` standing for ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Sequence


class PosetError(ValueError):
    pass


class WidthError(PosetError):
    pass


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length()
        mask ^= low


@dataclass(frozen=True)
class Poset:
    n: int
    rel: tuple[tuple[bool, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 0 or len(self.rel) != self.n or any(len(r) != self.n for r in self.rel):
            raise PosetError("relation matrix has the wrong shape")
        up = self.up_masks
        for u in range(self.n):
            if up[u] >> u & 1:
                raise PosetError("not a partial order")
            for v in _bits(up[u]):
                if up[v - 1] >> u & 1:
                    raise PosetError("not a partial order")
                if up[v - 1] & ~up[u]:
                    raise PosetError("relation is not transitively closed")

    @classmethod
    def from_up_masks(cls, n: int, up: Sequence[int]) -> Poset:
        rel = tuple(tuple(bool(up[u] >> v & 1) for v in range(n)) for u in range(n))
        return cls(n, rel)

    @cached_property
    def up_masks(self) -> tuple[int, ...]:
        return tuple(sum(1 << v for v in range(self.n) if row[v]) for row in self.rel)

    @cached_property
    def down_masks(self) -> tuple[int, ...]:
        return tuple(
            sum(1 << u for u in range(self.n) if self.rel[u][v]) for v in range(self.n)
        )

    @property
    def elements(self) -> range:
        return range(1, self.n + 1)

    def less(self, u: int, v: int) -> bool:
        return self.rel[u - 1][v - 1]

    def comparable(self, u: int, v: int) -> bool:
        return u == v or self.rel[u - 1][v - 1] or self.rel[v - 1][u - 1]

    def incomparable(self, u: int, v: int) -> bool:
        return not self.comparable(u, v)

    def below(self, u: int) -> list[int]:
        return list(_bits(self.down_masks[u - 1]))

    def above(self, u: int) -> list[int]:
        return list(_bits(self.up_masks[u - 1]))

    def relations(self) -> list[tuple[int, int]]:
        return [
            (u, v) for u in self.elements for v in self.elements if self.rel[u - 1][v - 1]
        ]

    def cover_relations(self) -> list[tuple[int, int]]:
        up = self.up_masks
        out = []
        for u in range(self.n):
            for v in _bits(up[u]):
                if not any(up[w - 1] >> (v - 1) & 1 for w in _bits(up[u])):
                    out.append((u + 1, v))
        return out


def poset_from_relations(n: int, pairs: Iterable[tuple[int, int]]) -> Poset:
    """Transitive closure of a generating set of strict relations."""
    if n < 0:
        raise PosetError("element count must be nonnegative")
    up = [0] * n
    for u, v in pairs:
        if not (1 <= u <= n and 1 <= v <= n):
            raise PosetError(f"index out of range: ({u}, {v}) with n={n}")
        if u == v:
            raise PosetError("not a partial order")
        up[u - 1] |= 1 << (v - 1)
    # Warshall over bitmasks
    for k in range(n):
        bit = 1 << k
        for u in range(n):
            if up[u] & bit:
                up[u] |= up[k]
    if any(up[u] >> u & 1 for u in range(n)):
        raise PosetError("not a partial order")
    return Poset.from_up_masks(n, up)


def chain(n: int) -> Poset:
    return poset_from_relations(n, [(i, i + 1) for i in range(1, n)])


def antichain(n: int) -> Poset:
    return poset_from_relations(n, [])


def disjoint_chains(a: int, b: int) -> Poset:
    """C_a + C_b with ids 1..a for the first chain and a+1..a+b for the second."""
    pairs = [(i, i + 1) for i in range(1, a)]
    pairs += [(a + j, a + j + 1) for j in range(1, b)]
    return poset_from_relations(a + b, pairs)


def dual(p: Poset) -> Poset:
    return Poset(p.n, tuple(tuple(p.rel[v][u] for v in range(p.n)) for u in range(p.n)))


def down_count(p: Poset, u: int) -> int:
    return p.down_masks[u - 1].bit_count()


def up_count(p: Poset, u: int) -> int:
    return p.up_masks[u - 1].bit_count()


def between_count(p: Poset, x: int, y: int) -> int:
    return (p.up_masks[x - 1] & p.down_masks[y - 1]).bit_count()


@dataclass(frozen=True)
class LinearExtension:
    """values[u - 1] is the rank L(u) of element u."""

    values: tuple[int, ...]

    def __call__(self, u: int) -> int:
        return self.values[u - 1]

    @property
    def n(self) -> int:
        return len(self.values)

    def order(self) -> tuple[int, ...]:
        out = [0] * len(self.values)
        for u, r in enumerate(self.values, start=1):
            out[r - 1] = u
        return tuple(out)

    @classmethod
    def from_order(cls, order: Sequence[int]) -> LinearExtension:
        vals = [0] * len(order)
        for r, u in enumerate(order, start=1):
            vals[u - 1] = r
        return cls(tuple(vals))

    def is_valid_for(self, p: Poset) -> bool:
        if sorted(self.values) != list(range(1, p.n + 1)):
            return False
        return all(self.values[u - 1] < self.values[v - 1] for u, v in p.relations())


def _extension_orders(p: Poset) -> list[tuple[int, ...]]:
    """All linear extensions as element orders, in the canonical backtracking order."""
    n = p.n
    down = p.down_masks
    full = (1 << n) - 1
    out: list[tuple[int, ...]] = []
    prefix: list[int] = []

    def rec(placed: int) -> None:
        if placed == full:
            out.append(tuple(prefix))
            return
        for u in range(n):
            if not placed >> u & 1 and down[u] & ~placed == 0:
                prefix.append(u + 1)
                rec(placed | 1 << u)
                prefix.pop()

    rec(0)
    return out


def enumerate_extensions(p: Poset) -> Iterator[LinearExtension]:
    """Yield every linear extension once; minimal elements are tried in ascending id order."""
    n = p.n
    down = p.down_masks
    full = (1 << n) - 1
    prefix: list[int] = []

    def rec(placed: int) -> Iterator[LinearExtension]:
        if placed == full:
            yield LinearExtension.from_order(prefix)
            return
        for u in range(n):
            if not placed >> u & 1 and down[u] & ~placed == 0:
                prefix.append(u + 1)
                yield from rec(placed | 1 << u)
                prefix.pop()

    yield from rec(0)


def extension_orders(p: Poset) -> list[tuple[int, ...]]:
    return _extension_orders(p)


def ideals(p: Poset) -> list[int]:
    """All down-closed subsets as bitmasks, sorted by size then value."""
    n = p.n
    down = p.down_masks
    seen = {0}
    layer = [0]
    out = [0]
    while layer:
        nxt = set()
        for mask in layer:
            for u in range(n):
                if not mask >> u & 1 and down[u] & ~mask == 0:
                    m = mask | 1 << u
                    if m not in seen:
                        seen.add(m)
                        nxt.add(m)
        layer = sorted(nxt)
        out.extend(layer)
    return out


def count_extensions(p: Poset) -> int:
    """e(P) by dynamic programming over the lattice of down-sets."""
    n = p.n
    down = p.down_masks
    ways = {0: 1}
    for mask in ideals(p):
        w = ways[mask]
        for u in range(n):
            if not mask >> u & 1 and down[u] & ~mask == 0:
                m = mask | 1 << u
                ways[m] = ways.get(m, 0) + w
    return ways[(1 << n) - 1]


@dataclass(frozen=True)
class ChainPartition:
    c1: tuple[int, ...]
    c2: tuple[int, ...]

    @property
    def a(self) -> int:
        return len(self.c1)

    @property
    def b(self) -> int:
        return len(self.c2)

    def validate(self, p: Poset) -> None:
        ids = list(self.c1) + list(self.c2)
        if sorted(ids) != list(p.elements):
            raise PosetError("chains must cover every element exactly once")
        for ch in (self.c1, self.c2):
            for u, v in zip(ch, ch[1:]):
                if not p.less(u, v):
                    raise PosetError(f"chain is not increasing at ({u}, {v})")

    def locate(self, u: int) -> tuple[int, int]:
        """(chain number, 1-based index in that chain)."""
        if u in self.c1:
            return 1, self.c1.index(u) + 1
        if u in self.c2:
            return 2, self.c2.index(u) + 1
        raise PosetError(f"element {u} is not in the partition")

    def swapped(self) -> ChainPartition:
        return ChainPartition(self.c2, self.c1)


def width2_partition(p: Poset) -> ChainPartition:
    """Cover by at most two chains via maximum matching on the comparability DAG."""
    n = p.n
    up = p.up_masks
    match_right: dict[int, int] = {}

    def augment(u: int, seen: set[int]) -> bool:
        for v in _bits(up[u]):
            if v in seen:
                continue
            seen.add(v)
            if v not in match_right or augment(match_right[v] - 1, seen):
                match_right[v] = u + 1
                return True
        return False

    size = sum(augment(u, set()) for u in range(n))
    if n - size > 2:
        raise WidthError("width > 2")
    succ = {u: v for v, u in match_right.items()}
    starts = [u for u in p.elements if u not in match_right]
    chains = []
    for s in sorted(starts):
        ch = [s]
        while ch[-1] in succ:
            ch.append(succ[ch[-1]])
        chains.append(tuple(ch))
    if not chains:
        return ChainPartition((), ())
    if len(chains) == 1:
        return ChainPartition(chains[0], ())
    return ChainPartition(chains[0], chains[1])


def relabel(p: Poset, perm: Sequence[int]) -> Poset:
    """Poset with element u renamed perm[u - 1]."""
    pairs = [(perm[u - 1], perm[v - 1]) for u, v in p.relations()]
    return poset_from_relations(p.n, pairs)


def adjoin_top(p: Poset) -> Poset:
    """Add a maximum element with id n + 1."""
    pairs = p.relations() + [(u, p.n + 1) for u in p.elements]
    return poset_from_relations(p.n + 1, pairs)


def adjoin_bottom(p: Poset) -> Poset:
    """Add a minimum element with id n + 1."""
    pairs = p.relations() + [(p.n + 1, u) for u in p.elements]
    return poset_from_relations(p.n + 1, pairs)
