"""Poset generators: all posets up to isomorphism, random posets, all regions."""

from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator

from .poset import Poset, ideals, poset_from_relations
from .region import Region, enumerate_regions, monotone_sequences


def _refine(n: int, up: list[int], down: list[int], colour: list[int]) -> list[int]:
    """Equitable refinement of a vertex colouring (colours are dense ranks)."""
    while True:
        k = max(colour) + 1 if n else 0
        keys = []
        for v in range(n):
            ups = [0] * k
            downs = [0] * k
            m = up[v]
            while m:
                low = m & -m
                ups[colour[low.bit_length() - 1]] += 1
                m ^= low
            m = down[v]
            while m:
                low = m & -m
                downs[colour[low.bit_length() - 1]] += 1
                m ^= low
            keys.append((colour[v], tuple(ups), tuple(downs)))
        ranks = {key: i for i, key in enumerate(sorted(set(keys)))}
        new = [ranks[key] for key in keys]
        if len(ranks) == k:
            return new
        colour = new


def _certificate(n: int, up: list[int], weight: list[int]) -> tuple[tuple, list[int]]:
    """Canonical form of a vertex-weighted strict order by individualization-refinement."""
    down = [0] * n
    for u in range(n):
        m = up[u]
        while m:
            low = m & -m
            down[low.bit_length() - 1] |= 1 << u
            m ^= low
    init = {w: i for i, w in enumerate(sorted(set(weight)))}
    best: list = [None, None]

    def search(colour: list[int]) -> None:
        colour = _refine(n, up, down, colour)
        k = max(colour) + 1 if n else 0
        if k == n:
            order = sorted(range(n), key=lambda v: colour[v])
            pos = {v: i for i, v in enumerate(order)}
            cert = (
                tuple(weight[v] for v in order),
                tuple(sorted((pos[u], pos[v]) for u in range(n) for v in range(n) if up[u] >> v & 1)),
            )
            if best[0] is None or cert < best[0]:
                best[0], best[1] = cert, order
            return
        sizes = {}
        for c in colour:
            sizes[c] = sizes.get(c, 0) + 1
        target = min((s, c) for c, s in sizes.items() if s > 1)[1]
        for v in range(n):
            if colour[v] == target:
                nxt = [2 * c + (1 if c > target or (c == target and u != v) else 0) for u, c in enumerate(colour)]
                search(nxt)

    search([init[w] for w in weight])
    return best[0], best[1]


def canonical_form(p: Poset) -> tuple[tuple, Poset]:
    """Isomorphism-invariant certificate and a canonically relabelled copy."""
    n = p.n
    up, down = p.up_masks, p.down_masks
    classes: dict[tuple[int, int], list[int]] = {}
    for u in range(n):
        classes.setdefault((down[u], up[u]), []).append(u)
    reps = list(classes.values())
    index = {}
    for i, members in enumerate(reps):
        for u in members:
            index[u] = i
    qup = []
    for members in reps:
        m = 0
        for v in range(n):
            if up[members[0]] >> v & 1:
                m |= 1 << index[v]
        qup.append(m)
    cert, order = _certificate(len(reps), qup, [len(m) for m in reps])
    perm = [0] * n
    nxt = 1
    for c in order:
        for u in reps[c]:
            perm[u] = nxt
            nxt += 1
    pairs = [(perm[u - 1], perm[v - 1]) for u, v in p.relations()]
    return cert, poset_from_relations(n, pairs)


@lru_cache(maxsize=None)
def posets_of_size(n: int) -> tuple[Poset, ...]:
    """Every poset on n elements up to isomorphism, canonically labelled and sorted."""
    if n == 0:
        return (poset_from_relations(0, []),)
    found: dict[tuple, Poset] = {}
    for q in posets_of_size(n - 1):
        base = q.relations()
        for ideal in ideals(q):
            pairs = base + [(u + 1, n) for u in range(n - 1) if ideal >> u & 1]
            cert, canon = canonical_form(poset_from_relations(n, pairs))
            if cert not in found:
                found[cert] = canon
    return tuple(found[c] for c in sorted(found))


def all_posets(max_n: int, min_n: int = 1) -> Iterator[Poset]:
    for n in range(min_n, max_n + 1):
        yield from posets_of_size(n)


def random_poset(n: int, density: float, rng: random.Random) -> Poset:
    """Random order relation: random linear order, each forward pair kept with probability density, then closure."""
    perm = list(range(1, n + 1))
    rng.shuffle(perm)
    pairs = [
        (perm[i], perm[j]) for i in range(n) for j in range(i + 1, n) if rng.random() < density
    ]
    return poset_from_relations(n, pairs)


def random_region(a: int, b: int, rng: random.Random) -> Region:
    """Uniform noncrossing pair of boundary paths, by rejection."""
    seqs = monotone_sequences(a, b)
    while True:
        low, high = rng.choice(seqs), rng.choice(seqs)
        if all(g <= h for g, h in zip(low, high)):
            return Region.from_heights(a, b, low, high)


def regions_up_to(total: int) -> Iterator[Region]:
    """Every region with a + b <= total (a, b >= 0), grouped by (a, b)."""
    for n in range(total + 1):
        for a in range(n + 1):
            yield from enumerate_regions(a, n - a)
