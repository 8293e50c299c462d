"""Rank statistics of linear extensions: N(k), F(k) and their weighted refinements."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Union

from .paths import E1, LevelAnchors, count_paths_q, level_poly_factored
from .poset import ChainPartition, LinearExtension, Poset, extension_orders
from .qpoly import MultiPoly, QPoly, coeffwise_geq
from .region import GridPoint, Region, region_of

Value = Union[int, QPoly, MultiPoly]


class SameChainError(ValueError):
    pass


SAME_CHAIN_MESSAGE = (
    "the weighted Kahn-Saks inequality needs x and y in the same chain of the partition; "
    "it fails otherwise, e.g. for two disjoint 3-chains with x = alpha_1, y = beta_3: "
    "F_q(2)^2 - F_q(1) F_q(3) = q^26 - q^25"
)


@dataclass(frozen=True)
class Distribution:
    kind: str  # "N" or "F"
    x: int
    y: int | None
    table: dict[int, Value] = field(default_factory=dict)

    def __getitem__(self, k: int) -> Value:
        if k in self.table:
            return self.table[k]
        sample = next(iter(self.table.values()), 0)
        if isinstance(sample, QPoly):
            return QPoly()
        if isinstance(sample, MultiPoly):
            return MultiPoly(sample.arity)
        return 0

    def support(self) -> list[int]:
        return sorted(self.table)

    def total(self) -> int:
        return sum(v if isinstance(v, int) else v.at_one() for v in self.table.values())


def _accumulate(orders, key: Callable[[tuple[int, ...], list[int]], int | None], weight) -> dict:
    table: dict[int, dict] = {}
    for order in orders:
        rank = [0] * (len(order) + 1)
        for r, u in enumerate(order, start=1):
            rank[u] = r
        k = key(order, rank)
        if k is None:
            continue
        wt = weight(rank)
        bucket = table.setdefault(k, {})
        bucket[wt] = bucket.get(wt, 0) + 1
    return table


def _n_key(x):
    return lambda order, rank: rank[x]


def _f_key(x, y):
    return lambda order, rank: rank[y] - rank[x]


def _count(table) -> dict[int, int]:
    return {k: sum(b.values()) for k, b in table.items()}


def _q_weight(cp: ChainPartition):
    c1 = cp.c1
    return lambda rank: sum(rank[u] for u in c1)


def _mq_weight(cp: ChainPartition):
    c1 = cp.c1

    def weight(rank):
        prev = 0
        out = []
        for u in c1:
            out.append(rank[u] - prev)
            prev = rank[u]
        return tuple(out)

    return weight


def n_dist(p: Poset, x: int) -> Distribution:
    t = _accumulate(extension_orders(p), _n_key(x), lambda rank: 0)
    return Distribution("N", x, None, _count(t))


def n_q_dist(p: Poset, cp: ChainPartition, x: int) -> Distribution:
    cp.validate(p)
    t = _accumulate(extension_orders(p), _n_key(x), _q_weight(cp))
    return Distribution("N", x, None, {k: QPoly(b) for k, b in t.items()})


def n_mq_dist(p: Poset, cp: ChainPartition, x: int) -> Distribution:
    cp.validate(p)
    t = _accumulate(extension_orders(p), _n_key(x), _mq_weight(cp))
    return Distribution("N", x, None, {k: MultiPoly(cp.a, b) for k, b in t.items()})


def f_dist(p: Poset, x: int, y: int) -> Distribution:
    if x == y:
        raise ValueError("x and y must be distinct")
    t = _accumulate(extension_orders(p), _f_key(x, y), lambda rank: 0)
    return Distribution("F", x, y, _count(t))


def f_q_dist(p: Poset, cp: ChainPartition, x: int, y: int) -> Distribution:
    if x == y:
        raise ValueError("x and y must be distinct")
    cp.validate(p)
    t = _accumulate(extension_orders(p), _f_key(x, y), _q_weight(cp))
    return Distribution("F", x, y, {k: QPoly(b) for k, b in t.items()})


def f_mq_dist(p: Poset, cp: ChainPartition, x: int, y: int) -> Distribution:
    if x == y:
        raise ValueError("x and y must be distinct")
    cp.validate(p)
    t = _accumulate(extension_orders(p), _f_key(x, y), _mq_weight(cp))
    return Distribution("F", x, y, {k: MultiPoly(cp.a, b) for k, b in t.items()})


def f_q_level(p: Poset, cp: ChainPartition, x: int, y: int, w: int, k: int) -> QPoly:
    """Weighted count of extensions with L(x) = w and L(y) = w + k."""
    cp.validate(p)
    q = _q_weight(cp)
    total: dict[int, int] = {}
    for order in extension_orders(p):
        if order[w - 1] == x and 0 < w + k <= len(order) and order[w + k - 1] == y:
            rank = [0] * (len(order) + 1)
            for r, u in enumerate(order, start=1):
                rank[u] = r
            e = q(rank)
            total[e] = total.get(e, 0) + 1
    return QPoly(total)


# ------------------------------------------------- lattice-path evaluations


def n_q_dist_paths(p: Poset, cp: ChainPartition, x: int) -> Distribution:
    """N_q by splitting each path at the step belonging to x."""
    r = region_of(p, cp)
    chain, s = cp.locate(x)
    Q = GridPoint(r.a, r.b)
    table = {}
    for k in range(1, r.n + 1):
        if chain == 1:
            Y = GridPoint(s - 1, k - s)
            val = (count_paths_q(r, (0, 0), Y) * count_paths_q(r, Y + E1, Q)).shift(k)
        else:
            Y = GridPoint(k - s, s - 1)
            val = count_paths_q(r, (0, 0), Y) * count_paths_q(r, (k - s, s), Q)
        if val:
            table[k] = val
    return Distribution("N", x, None, table)


def f_q_dist_paths(p: Poset, cp: ChainPartition, x: int, y: int) -> Distribution:
    """F_q for a same-chain pair as a sum of factored level polynomials."""
    (cx, s), (cy, t) = cp.locate(x), cp.locate(y)
    if cx != cy:
        raise SameChainError(SAME_CHAIN_MESSAGE)
    r = region_of(p, cp)
    n = r.n
    sign = 1
    if s > t:
        s, t, sign = t, s, -1
    if cx == 2:
        r = r.transpose()
    anchors = LevelAnchors(s, t - s)
    table: dict[int, QPoly] = {}
    for k in range(1, n):
        acc = QPoly()
        for v in range(1, n - k + 1):
            acc = acc + level_poly_factored(r, anchors, v, k)
        if acc:
            if cx == 2:
                acc = acc.reflect(n * (n + 1) // 2)
            table[sign * k] = acc
    return Distribution("F", x, y, table)


# ------------------------------------------------------------ checkers


@dataclass(frozen=True)
class KVerdict:
    k: int
    holds: bool
    difference: Value


def _log_concavity(dist: Distribution, ks) -> list[KVerdict]:
    out = []
    for k in ks:
        lhs = dist[k] * dist[k]
        rhs = dist[k - 1] * dist[k + 1]
        if isinstance(lhs, int):
            out.append(KVerdict(k, lhs >= rhs, lhs - rhs))
        else:
            out.append(KVerdict(k, coeffwise_geq(lhs, rhs), lhs - rhs))
    return out


def check_stanley(p: Poset, x: int) -> list[KVerdict]:
    return _log_concavity(n_dist(p, x), range(2, p.n))


def check_ks(p: Poset, x: int, y: int) -> list[KVerdict]:
    return _log_concavity(f_dist(p, x, y), range(2, p.n))


def check_q_stanley(p: Poset, cp: ChainPartition, x: int) -> list[KVerdict]:
    return _log_concavity(n_q_dist(p, cp, x), range(2, p.n))


def _require_same_chain(cp: ChainPartition, x: int, y: int) -> None:
    if cp.locate(x)[0] != cp.locate(y)[0]:
        raise SameChainError(SAME_CHAIN_MESSAGE)


def check_q_ks(p: Poset, cp: ChainPartition, x: int, y: int) -> list[KVerdict]:
    _require_same_chain(cp, x, y)
    return _log_concavity(f_q_dist(p, cp, x, y), range(2, p.n))


def check_mq_stanley(p: Poset, cp: ChainPartition, x: int) -> list[KVerdict]:
    if cp.locate(x)[0] != 1:
        raise SameChainError("the multivariate Stanley inequality is stated for x in the first chain")
    return _log_concavity(n_mq_dist(p, cp, x), range(2, p.n))


def check_mq_ks(p: Poset, cp: ChainPartition, x: int, y: int) -> list[KVerdict]:
    if cp.locate(x)[0] != 1 or cp.locate(y)[0] != 1:
        raise SameChainError("the multivariate Kahn-Saks inequality is stated for x, y in the first chain")
    return _log_concavity(f_mq_dist(p, cp, x, y), range(2, p.n))
