"""Equality and vanishing predicates, the extension-rotation maps, and the
implication harness for the flatness conjecture on F(k).

Pentagon and midway predicates that refer to indices outside a chain treat
position 0 as a virtual bottom element and position len+1 as a virtual top
element, both comparable to everything.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .poset import (
    ChainPartition,
    LinearExtension,
    Poset,
    between_count,
    down_count,
    dual,
    extension_orders,
    up_count,
)
from .qpoly import QPoly
from .region import region_of
from .stats import (
    SAME_CHAIN_MESSAGE,
    SameChainError,
    f_dist,
    f_q_dist,
    n_dist,
    n_q_dist,
)


class PreconditionError(ValueError):
    pass


class StepUndefined(ValueError):
    def __init__(self, msg: str = "step undefined"):
        super().__init__(msg)


BOTTOM, TOP = "bottom", "top"


def _less(p: Poset, u, v) -> bool:
    if u == BOTTOM:
        return v != BOTTOM
    if v == TOP:
        return u != TOP
    if u == TOP or v == BOTTOM:
        return False
    return p.less(u, v)


# ------------------------------------------------------------ vanishing


def stanley_vanishing(p: Poset, x: int, k: int) -> bool:
    """N(k) > 0 predicted from the ideal sizes of x."""
    return down_count(p, x) <= k - 1 and up_count(p, x) <= p.n - k


def ks_vanishing(p: Poset, x: int, y: int, k: int) -> bool:
    """F(k) > 0 predicted from ideal sizes; only defined for x < y."""
    if not p.less(x, y):
        raise PreconditionError("the positivity window is only known for x < y")
    return between_count(p, x, y) < k < p.n - down_count(p, x) - up_count(p, y)


# ------------------------------------------------------ Stanley equality


def pentagon_property(p: Poset, cp: ChainPartition, x: int, k: int) -> bool:
    chain, r = cp.locate(x)
    own, other = (cp.c1, cp.c2) if chain == 1 else (cp.c2, cp.c1)

    def alpha(i):
        if i <= 0:
            return BOTTOM
        if i > len(own):
            return TOP
        return own[i - 1]

    j = k - r
    if not (1 <= j and j + 1 <= len(other)):
        return False
    b1, b2 = other[j - 1], other[j]
    return (
        _less(p, alpha(r - 1), b1)
        and p.less(b1, b2)
        and _less(p, b2, alpha(r + 1))
        and p.incomparable(x, b1)
        and p.incomparable(x, b2)
    )


def svh_condition(p: Poset, x: int, k: int) -> bool:
    """Every y above x has f(y) > k and every y below x has g(y) > n-k+1,
    with a virtual top (f = n) and bottom (g = n) included."""
    n = p.n
    if not (1 < k < n):
        return False
    return all(down_count(p, y) > k for y in p.above(x)) and all(
        up_count(p, y) > n - k + 1 for y in p.below(x)
    )


# ------------------------------------------------------------- midway


def midway_property(p: Poset, x: int, y: int, k: int) -> bool:
    n = p.n
    gy = up_count(p, y)
    for z in p.above(x):
        if not p.less(y, z) and z != y and down_count(p, z) + gy <= n - k:
            return False
    for z in p.below(x):
        if between_count(p, z, y) <= k:
            return False
    return down_count(p, y) > k


def dual_midway_property(p: Poset, x: int, y: int, k: int) -> bool:
    n = p.n
    fx = down_count(p, x)
    for z in p.below(y):
        if not p.less(z, x) and z != x and up_count(p, z) + fx <= n - k:
            return False
    for z in p.above(y):
        if between_count(p, x, z) <= k:
            return False
    return up_count(p, x) > k


def midway_interval_form(p: Poset, cp: ChainPartition, x: int, y: int, k: int) -> bool:
    """Width-two reformulation of the midway property for x = alpha_s, y = alpha_{s+r}:
    some window 1 < c < d <= n of second-chain elements sits incomparably beside x
    and is pinned between the chain neighbours of x, while y is pinned between
    the shifted window ends."""
    chain, s = cp.locate(x)
    chain_y, t = cp.locate(y)
    if chain != chain_y or t <= s:
        raise SameChainError("x and y must lie in one chain with x first")
    own, other = (cp.c1, cp.c2) if chain == 1 else (cp.c2, cp.c1)
    r = t - s
    n = p.n
    b = len(other)

    def alpha(i):
        if i <= 0:
            return BOTTOM
        if i > len(own):
            return TOP
        return own[i - 1]

    def beta(j):
        if j <= 0:
            return BOTTOM
        if j > b:
            return TOP
        return other[j - 1]

    for c in range(2, n + 1):
        for d in range(c + 1, n + 1):
            lo, hi = c - s, d - s
            if lo < 1 or hi > b:
                continue
            if not _less(p, alpha(s - 1), beta(lo)) or not _less(p, beta(hi), alpha(s + 1)):
                continue
            if not all(p.incomparable(x, other[j - 1]) for j in range(lo, hi + 1)):
                continue
            shift = k - r - s
            if not _less(p, beta(c + shift), y) or not _less(p, y, beta(d + shift)):
                continue
            inner = range(c + shift + 1, d + shift)
            if all(1 <= j <= b and p.incomparable(y, other[j - 1]) for j in inner):
                return True
    return False


# ------------------------------------------------------------ witnesses


@dataclass(frozen=True)
class Witness:
    z: int
    neighbours: tuple[tuple[LinearExtension, int, int], ...]


def _fiber(p: Poset, x: int, y: int, k: int) -> Iterator[tuple[int, ...]]:
    for order in extension_orders(p):
        if order.index(y) - order.index(x) == k:
            yield order


def condition_b_witness(p: Poset, x: int, y: int, k: int) -> Witness | None:
    """An element z in {x, y} flanked in every extension of the k-fiber by two elements incomparable to z."""
    fiber = list(_fiber(p, x, y, k))
    if not fiber:
        raise PreconditionError("F(k) = 0")
    for z in (x, y):
        rows = []
        for order in fiber:
            i = order.index(z)
            if i == 0 or i == len(order) - 1:
                break
            u, v = order[i - 1], order[i + 1]
            if not (p.incomparable(u, z) and p.incomparable(v, z)):
                break
            rows.append((LinearExtension.from_order(order), u, v))
        else:
            return Witness(z, tuple(rows))
    return None


# ------------------------------------------------ positivity construction


def _ext(order: list[int]) -> LinearExtension:
    return LinearExtension.from_order(order)


def phi_step(p: Poset, x: int, y: int, L: LinearExtension) -> LinearExtension:
    """Pull the first element after y that is incomparable to y in front of y."""
    o = list(L.order())
    py = o.index(y)
    for pw in range(py + 1, len(o)):
        if p.incomparable(o[pw], y):
            return _ext(o[:py] + [o[pw]] + o[py:pw] + o[pw + 1 :])
    raise StepUndefined()


def psi_step(p: Poset, x: int, y: int, L: LinearExtension) -> LinearExtension:
    """Shrink L(y) - L(x) by one using an element strictly between x and y."""
    o = list(L.order())
    px, py = o.index(x), o.index(y)
    for pw in range(px + 1, py):
        if p.incomparable(o[pw], x):
            return _ext(o[:px] + [o[pw]] + o[px:pw] + o[pw + 1 :])
    for pw in range(py - 1, px, -1):
        if p.incomparable(o[pw], y):
            return _ext(o[:pw] + o[pw + 1 : py + 1] + [o[pw]] + o[py + 1 :])
    raise StepUndefined()


def anchored_start(p: Poset, x: int, c: int) -> LinearExtension:
    """An extension with L(x) = c built greedily by smallest available id."""
    n = p.n
    down = p.down_masks
    placed = 0
    order: list[int] = []

    def take(allowed) -> bool:
        nonlocal placed
        for u in range(1, n + 1):
            bit = 1 << (u - 1)
            if not placed & bit and down[u - 1] & ~placed == 0 and allowed(u):
                order.append(u)
                placed |= bit
                return True
        return False

    below_x = p.down_masks[x - 1]
    while below_x & ~placed:
        take(lambda u: below_x >> (u - 1) & 1)
    not_above = lambda u: u != x and not p.less(x, u)  # noqa: E731
    while len(order) < c - 1:
        if not take(not_above):
            raise PreconditionError(f"no extension with L(x) = {c}")
    if len(order) != c - 1:
        raise PreconditionError(f"no extension with L(x) = {c}")
    order.append(x)
    placed |= 1 << (x - 1)
    while len(order) < n:
        take(lambda u: True)
    return _ext(order)


@dataclass(frozen=True)
class DriverTrace:
    start: LinearExtension
    final: LinearExtension
    steps: tuple[str, ...]


def ks_fiber_driver(p: Poset, x: int, y: int, k: int) -> DriverTrace:
    """Reach an extension with L(y) - L(x) = k from the anchored start, one unit of gap per step."""
    if not ks_vanishing(p, x, y, k):
        raise PreconditionError("F(k) = 0")
    n = p.n
    c = min(n - up_count(p, x), n - k - up_count(p, y))
    L = start = anchored_start(p, x, c)
    steps = []
    gap = L(y) - L(x)
    for _ in range(n * max(1, abs(gap - k))):
        if gap == k:
            break
        if gap < k:
            nxt, tag = phi_step(p, x, y, L), "phi"
        else:
            nxt, tag = psi_step(p, x, y, L), "psi"
        new_gap = nxt(y) - nxt(x)
        assert abs(new_gap - k) == abs(gap - k) - 1, "rotation did not move the gap by one"
        L, gap = nxt, new_gap
        steps.append(tag)
    assert gap == k
    return DriverTrace(start, L, tuple(steps))


# ------------------------------------------- flatness normalization maps


def omega_step(p: Poset, x: int, y: int, k: int, L: LinearExtension) -> LinearExtension:
    """Raise L(y) by one inside the k-fiber, moving x one step right past its incomparable successor."""
    o = list(L.order())
    px, py = o.index(x), o.index(y)
    if py - px != k or k < 2:
        raise StepUndefined()
    if py + 1 >= p.n - up_count(p, y):
        raise StepUndefined()
    v = o[px + 1]
    if not p.incomparable(v, x):
        raise StepUndefined()
    for pp in range(py + 1, len(o)):
        if p.incomparable(o[pp], y):
            o = o[:py] + [o[pp]] + o[py:pp] + o[pp + 1 :]
            o[px], o[px + 1] = o[px + 1], o[px]
            return _ext(o)
    raise StepUndefined()


def theta_step(p: Poset, x: int, y: int, w: int, L: LinearExtension) -> LinearExtension:
    """Lower L(w) by one keeping L(x) and L(y), for x < w and w not above y."""
    o = list(L.order())
    px, py, pw = o.index(x), o.index(y), o.index(w)
    if not p.less(x, w) or p.less(y, w) or w == y:
        raise StepUndefined()
    if pw + 1 <= down_count(p, w) + 1:
        raise StepUndefined()
    for pp in range(pw - 1, -1, -1):
        if p.incomparable(o[pp], w):
            break
    else:
        raise StepUndefined()
    v = o[px + 1]
    o = o[:pp] + o[pp + 1 : pw + 1] + [o[pp]] + o[pw + 1 :]
    if pp < px:
        if not p.incomparable(v, x):
            raise StepUndefined()
        o[px - 1], o[px] = o[px], o[px - 1]
    out = _ext(o)
    assert out(x) == px + 1 and out(y) == py + 1
    return out


def _claim_first(p: Poset, x: int, y: int, k: int, w: int | None, L: LinearExtension) -> LinearExtension:
    n = p.n
    target_y = n - up_count(p, y)
    for _ in range(n):
        if L(y) == target_y:
            break
        nxt = omega_step(p, x, y, k, L)
        assert nxt(y) == L(y) + 1 and nxt(y) - nxt(x) == k
        L = nxt
    assert L(y) == target_y
    if w is None:
        return L
    target_w = down_count(p, w) + 1
    for _ in range(n):
        if L(w) == target_w:
            break
        nxt = theta_step(p, x, y, w, L)
        assert nxt(w) == L(w) - 1 and nxt(y) - nxt(x) == k and nxt(y) == target_y
        L = nxt
    assert L(w) == target_w
    return L


def _reverse(L: LinearExtension) -> LinearExtension:
    return LinearExtension.from_order(tuple(reversed(L.order())))


def claim_replay(p: Poset, x: int, y: int, k: int, z: int, w: int | None = None) -> LinearExtension:
    """Normalize an extension of the k-fiber with the rotation maps.

    For z = x and w above x but not above y the result has L(y) = n - g(y) and
    L(w) = f(w) + 1.  For z = y the dual statement is replayed in the reversed
    order: w below y but not below x, and the result has L(x) = f(x) + 1,
    L(w) = n - g(w).  Without w only the first half is replayed.
    """
    start = next(_fiber(p, x, y, k), None)
    if start is None:
        raise PreconditionError("F(k) = 0")
    if z == x:
        return _claim_first(p, x, y, k, w, LinearExtension.from_order(start))
    if z == y:
        q = dual(p)
        L = _claim_first(q, y, x, k, w, _reverse(LinearExtension.from_order(start)))
        return _reverse(L)
    raise PreconditionError("z must be x or y")


def claim_targets(p: Poset, x: int, y: int, z: int) -> list[int]:
    """The elements w for which the normalization applies."""
    if z == x:
        return [w for w in p.above(x) if w != y and not p.less(y, w)]
    return [w for w in p.below(y) if w != x and not p.less(w, x)]


# ---------------------------------------------------------- level profile


@dataclass(frozen=True)
class LevelProfile:
    u0: int
    u1: int
    u2: int
    u3: int
    w0: int
    w1: int
    w2: int
    w3: int

    @property
    def vmin(self) -> int:
        return max(self.u0, self.w0)

    @property
    def vmax(self) -> int:
        return min(self.u3, self.w3)


def level_profile(p: Poset, cp: ChainPartition, x: int, y: int, k: int) -> LevelProfile:
    (cx, s), (cy, t) = cp.locate(x), cp.locate(y)
    if cx != cy or t <= s:
        raise SameChainError("x and y must lie in one chain with x first")
    reg = region_of(p, cp)
    if cx == 2:
        reg = reg.transpose()
    G = (0,) + reg.low + (reg.b,)
    H = (0,) + reg.high + (reg.b,)
    off = t - k
    return LevelProfile(
        u0=G[s] + s,
        u1=H[s - 1] + s,
        u2=G[s + 1] + s,
        u3=H[s] + s,
        w0=G[t] + off,
        w1=H[t - 1] + off,
        w2=G[t + 1] + off,
        w3=H[t] + off,
    )


# ---------------------------------------------------------- full reports


@dataclass(frozen=True)
class EqualityReport:
    k: int
    conds: dict[str, bool]
    epsilon: int | None = None

    @property
    def consistent(self) -> bool:
        return len(set(self.conds.values())) <= 1


def _q_flat(cur: QPoly, prev: QPoly, nxt: QPoly, eps: int) -> bool:
    return cur == prev.shift(eps) and cur == nxt.shift(-eps)


def stanley_equality_report(p: Poset, cp: ChainPartition, x: int, k: int) -> EqualityReport:
    N = n_dist(p, x)
    Nq = n_q_dist(p, cp, x)
    eps = 1 if cp.locate(x)[0] == 1 else -1
    conds = {
        "a": N[k] ** 2 == N[k - 1] * N[k + 1],
        "b": N[k] == N[k - 1] == N[k + 1],
        "c": Nq[k] * Nq[k] == Nq[k - 1] * Nq[k + 1],
        "d": _q_flat(Nq[k], Nq[k - 1], Nq[k + 1], eps),
        "e": pentagon_property(p, cp, x, k),
    }
    return EqualityReport(k, conds, eps)


def ks_equality_report(p: Poset, cp: ChainPartition, x: int, y: int, k: int) -> EqualityReport:
    if cp.locate(x)[0] != cp.locate(y)[0]:
        raise SameChainError(SAME_CHAIN_MESSAGE)
    F = f_dist(p, x, y)
    Fq = f_q_dist(p, cp, x, y)
    found = [e for e in (1, -1) if _q_flat(Fq[k], Fq[k - 1], Fq[k + 1], e)]
    conds = {
        "a": F[k] ** 2 == F[k - 1] * F[k + 1],
        "b": F[k] == F[k - 1] == F[k + 1],
        "c": Fq[k] * Fq[k] == Fq[k - 1] * Fq[k + 1],
        "d": bool(found),
        "e": F[k] > 0 and condition_b_witness(p, x, y, k) is not None,
    }
    return EqualityReport(k, conds, found[0] if found else None)


# ----------------------------------------------------------- the harness


@dataclass
class ScanReport:
    """Aggregated scan results.

    violations: instances contradicting a proven implication (flanking witness
    without flatness on any pair, or witness and midway disagreeing for x < y).
    outside: witness and midway disagreeing for an incomparable pair, where the
    equivalence is not backed by a proof and in fact fails.
    specimens: flat instances with no midway pair.
    """

    instances: int = 0
    flat: int = 0
    witnessed: int = 0
    midway: int = 0
    violations: list[dict] = field(default_factory=list)
    outside: list[dict] = field(default_factory=list)
    specimens: list[dict] = field(default_factory=list)

    def merge(self, other: ScanReport) -> ScanReport:
        return ScanReport(
            self.instances + other.instances,
            self.flat + other.flat,
            self.witnessed + other.witnessed,
            self.midway + other.midway,
            self.violations + other.violations,
            self.outside + other.outside,
            self.specimens + other.specimens,
        )

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_json(self) -> dict:
        return {
            "instances": self.instances,
            "flat": self.flat,
            "witnessed": self.witnessed,
            "midway": self.midway,
            "violations": self.violations,
            "outside": self.outside,
            "specimens": self.specimens,
        }


def instance_record(p: Poset, x: int, y: int, k: int, F: dict[int, int]) -> dict:
    return {
        "n": p.n,
        "relations": [list(e) for e in p.cover_relations()],
        "x": x,
        "y": y,
        "k": k,
        "pair": "comparable" if p.comparable(x, y) else "incomparable",
        "F": [str(F.get(k - 1, 0)), str(F.get(k, 0)), str(F.get(k + 1, 0))],
    }


def scan_poset(p: Poset, k_range: Iterable[int] | None = None) -> ScanReport:
    """Evaluate flatness (a), the flanking witness (b) and the midway pair (c)
    for every ordered pair and every admissible k of one poset."""
    from .batch import ExtensionTable

    table = ExtensionTable(p)
    rep = ScanReport()
    n = p.n
    ks = list(k_range) if k_range is not None else list(range(2, n - 1))
    for x in p.elements:
        for y in p.elements:
            if x == y:
                continue
            F = table.gap_counts(x, y)
            for k in ks:
                if not (2 <= k <= n - 2) or F.get(k, 0) == 0:
                    continue
                rep.instances += 1
                a = F.get(k - 1, 0) == F[k] == F.get(k + 1, 0)
                b = table.witness(x, y, k) is not None
                c = midway_property(p, x, y, k) or dual_midway_property(p, x, y, k)
                rep.flat += a
                rep.witnessed += b
                rep.midway += c
                if (b and not a) or (b != c and p.less(x, y)):
                    rec = instance_record(p, x, y, k, F)
                    rec.update(a=a, b=b, c=c)
                    rep.violations.append(rec)
                elif b != c:
                    rec = instance_record(p, x, y, k, F)
                    rec.update(a=a, b=b, c=c)
                    rep.outside.append(rec)
                if a and not c:
                    rep.specimens.append(instance_record(p, x, y, k, F))
    return rep


def conjecture_scan(source: Iterable[Poset], k_range: Iterable[int] | None = None) -> ScanReport:
    ks = list(k_range) if k_range is not None else None
    rep = ScanReport()
    for p in source:
        rep = rep.merge(scan_poset(p, ks))
    return rep
