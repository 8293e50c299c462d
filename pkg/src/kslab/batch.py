"""Vectorized tables behind the exhaustive sweeps.

Everything here is exact: integer numpy arrays for counts and, for polynomial
identities, arithmetic modulo a prime below 2^26 in an evaluation basis, with
coefficients recovered by an exact inverse Vandermonde transform whenever the
true coefficients are provably smaller than half the prime.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .poset import Poset, extension_orders, ideals


class ExtensionTable:
    """All linear extensions of a small poset as an (e, n) array of ranks."""

    def __init__(self, p: Poset):
        self.p = p
        n = p.n
        orders = np.array(extension_orders(p), dtype=np.int16).reshape(-1, n)
        e = orders.shape[0]
        ranks = np.empty_like(orders)
        rows = np.arange(e)[:, None]
        ranks[rows, orders - 1] = np.arange(1, n + 1, dtype=np.int16)
        self.orders = orders
        self.ranks = ranks
        inc = np.zeros((n + 1, n + 1), dtype=bool)
        for u in range(1, n + 1):
            for v in range(1, n + 1):
                inc[u, v] = p.incomparable(u, v)
        self.inc = inc

    @cached_property
    def flanked(self) -> np.ndarray:
        """flanked[e, z-1]: both rank-neighbours of z exist and are incomparable to z."""
        e, n = self.orders.shape
        padded = np.zeros((e, n + 2), dtype=np.int16)
        padded[:, 1 : n + 1] = self.orders
        rows = np.arange(e)[:, None]
        prev = padded[rows, self.ranks - 1]
        nxt = padded[rows, self.ranks + 1]
        z = np.arange(1, n + 1)[None, :]
        return self.inc[z, prev] & self.inc[z, nxt]

    def gaps(self, x: int, y: int) -> np.ndarray:
        return self.ranks[:, y - 1] - self.ranks[:, x - 1]

    def gap_counts(self, x: int, y: int) -> dict[int, int]:
        vals, counts = np.unique(self.gaps(x, y), return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def rank_counts(self, x: int) -> dict[int, int]:
        vals, counts = np.unique(self.ranks[:, x - 1], return_counts=True)
        return {int(v): int(c) for v, c in zip(vals, counts)}

    def witness(self, x: int, y: int, k: int) -> int | None:
        fib = self.gaps(x, y) == k
        if not fib.any():
            return None
        for z in (x, y):
            if self.flanked[fib, z - 1].all():
                return z
        return None


class IdealTable:
    """Down-sets of a poset as bitmasks, for positivity questions without enumeration."""

    def __init__(self, p: Poset):
        self.p = p
        self.masks = np.array(ideals(p), dtype=np.int64)
        self.sizes = np.array([int(m).bit_count() for m in ideals(p)], dtype=np.int64)

    def _addable(self, u: int) -> np.ndarray:
        """Ideals I with u not in I and I + u still an ideal."""
        bit = 1 << (u - 1)
        need = self.p.down_masks[u - 1]
        m = self.masks
        return ((m & bit) == 0) & ((m & need) == need)

    def rank_support(self, x: int) -> set[int]:
        """All k with some extension placing x at rank k."""
        return {int(s) + 1 for s in self.sizes[self._addable(x)]}

    def gap_support(self, x: int, y: int) -> set[int]:
        """All positive k with some extension having L(y) - L(x) = k."""
        bx, by = 1 << (x - 1), 1 << (y - 1)
        I = self.masks[self._addable(x)] | bx
        J = self.masks[self._addable(y)]
        inside = (J & bx) != 0
        J = J[inside]
        if len(I) == 0 or len(J) == 0:
            return set()
        nested = (I[:, None] & ~J[None, :]) == 0
        si = np.array([int(v).bit_count() for v in I])
        sj = np.array([int(v).bit_count() for v in J])
        diff = sj[None, :] - si[:, None] + 1
        return {int(d) for d in np.unique(diff[nested])}


# ------------------------------------------------------------ region tables
#
# Element ids follow the canonical labelling of a region's poset:
# alpha_h = h (first chain, East steps) and beta_k = a + k (second chain).


@lru_cache(maxsize=None)
def rectangle_paths(a: int, b: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """All NE paths of the a x b rectangle.

    Returns (heights, ranks, orders): heights[p, i] is the height of the
    (i+1)-th East step, ranks[p, u] the rank of element u (column 0 unused)
    and orders[p, r] the element at rank r with sentinels 0 at r = 0, n + 1.
    """
    from itertools import combinations_with_replacement

    n = a + b
    seqs = list(combinations_with_replacement(range(b + 1), a))
    heights = np.array(seqs, dtype=np.int64).reshape(len(seqs), a)
    P = heights.shape[0]
    ranks = np.zeros((P, n + 1), dtype=np.int64)
    ranks[:, 1 : a + 1] = heights + np.arange(1, a + 1)
    for k in range(1, b + 1):
        ranks[:, a + k] = k + (heights < k).sum(axis=1)
    orders = np.zeros((P, n + 2), dtype=np.int64)
    rows = np.arange(P)[:, None]
    orders[rows, ranks[:, 1:]] = np.arange(1, n + 1)
    return heights, ranks, orders


def region_incomparability(a: int, b: int, low, high) -> np.ndarray:
    """inc[u, v] for the canonical poset of a region; row and column 0 are a False sentinel."""
    n = a + b
    inc = np.zeros((n + 1, n + 1), dtype=bool)
    for h in range(1, a + 1):
        ks = np.arange(low[h - 1] + 1, high[h - 1] + 1)
        inc[h, a + ks] = True
        inc[a + ks, h] = True
    return inc


@dataclass
class RegionTable:
    a: int
    b: int
    low: tuple[int, ...]
    high: tuple[int, ...]
    ranks: np.ndarray
    orders: np.ndarray
    weight: np.ndarray  # weight minus the weight of the lower boundary path
    wmin: int

    @property
    def n(self) -> int:
        return self.a + self.b

    @property
    def width(self) -> int:
        """Length of a dense coefficient vector holding any single weight."""
        return self.a * self.b + 1

    @classmethod
    def of(cls, reg) -> RegionTable:
        a, b = reg.a, reg.b
        heights, ranks, orders = rectangle_paths(a, b)
        if a:
            mask = ((heights >= np.array(reg.low)) & (heights <= np.array(reg.high))).all(axis=1)
        else:
            mask = np.ones(heights.shape[0], dtype=bool)
        ranks, orders = ranks[mask], orders[mask]
        wmin = sum(i + 1 + g for i, g in enumerate(reg.low))
        weight = ranks[:, 1 : a + 1].sum(axis=1) - wmin
        return cls(a, b, tuple(reg.low), tuple(reg.high), ranks, orders, weight, wmin)

    @cached_property
    def inc(self) -> np.ndarray:
        return region_incomparability(self.a, self.b, self.low, self.high)

    @cached_property
    def flanked(self) -> np.ndarray:
        """flanked[p, u]: both rank-neighbours of u exist and are incomparable to u (column 0 unused)."""
        P = self.ranks.shape[0]
        rows = np.arange(P)[:, None]
        prev = self.orders[rows, self.ranks - 1 + (self.ranks == 0)]
        nxt = self.orders[rows, self.ranks + 1]
        u = np.arange(self.n + 1)[None, :]
        out = self.inc[u, prev] & self.inc[u, nxt]
        out[:, 0] = False
        return out

    def same_chain_pairs(self) -> list[tuple[int, int]]:
        a, n = self.a, self.n
        first = [(x, y) for x in range(1, a + 1) for y in range(1, a + 1) if x != y]
        second = [(x, y) for x in range(a + 1, n + 1) for y in range(a + 1, n + 1) if x != y]
        return first + second

    def rank_polys(self) -> np.ndarray:
        """N[u, k, w]: number of paths with L(u) = k and relative weight w (k from 0 to n + 1)."""
        n, D = self.n, self.width
        P = self.ranks.shape[0]
        u = np.broadcast_to(np.arange(1, n + 1), (P, n))
        idx = (u * (n + 2) + self.ranks[:, 1:]) * D + self.weight[:, None]
        out = np.bincount(idx.ravel(), minlength=(n + 1) * (n + 2) * D)
        return out.reshape(n + 1, n + 2, D)

    def gap_polys(self, pairs: list[tuple[int, int]]) -> tuple[np.ndarray, np.ndarray]:
        """F[i, k, w] for pair i, gaps 0..n+1 (negative gaps dropped), plus the raw gap matrix."""
        n, D = self.n, self.width
        xs = np.array([x for x, _ in pairs], dtype=np.int64)
        ys = np.array([y for _, y in pairs], dtype=np.int64)
        gaps = self.ranks[:, ys] - self.ranks[:, xs]
        m = len(pairs)
        keep = gaps >= 0
        pid = np.broadcast_to(np.arange(m), gaps.shape)
        w = np.broadcast_to(self.weight[:, None], gaps.shape)
        idx = (pid[keep] * (n + 2) + gaps[keep]) * D + w[keep]
        out = np.bincount(idx, minlength=m * (n + 2) * D)
        return out.reshape(m, n + 2, D), gaps


def convolve(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    """Batched product of dense coefficient vectors along the last axis.

    Runs in float64, which is exact while every partial sum stays below 2^53;
    the counts handled here are many orders of magnitude smaller.
    """
    D1, D2 = X.shape[-1], Y.shape[-1]
    lead = np.broadcast_shapes(X.shape[:-1], Y.shape[:-1])
    pad = np.zeros(lead + (D2 + 2 * (D1 - 1),))
    pad[..., D1 - 1 : D1 - 1 + D2] = Y
    win = np.lib.stride_tricks.sliding_window_view(pad, D1, axis=-1)[..., ::-1]
    Xf = np.broadcast_to(X, lead + (D1,)).astype(np.float64)
    out = np.matmul(win, Xf[..., None])[..., 0]
    return np.rint(out).astype(np.int64)


def shifted(X: np.ndarray, e: int) -> np.ndarray:
    """Multiply by q^e inside a window padded by one slot on each side."""
    pad = np.zeros(X.shape[:-1] + (X.shape[-1] + 2,), dtype=X.dtype)
    pad[..., 1 + e : 1 + e + X.shape[-1]] = X
    return pad


@dataclass
class SweepTally:
    """Counters and the first few offending instances of an exhaustive sweep."""

    regions: int = 0
    instances: int = 0
    failures: int = 0
    examples: list = field(default_factory=list)

    def fail(self, record: dict, keep: int = 5) -> None:
        self.failures += 1
        if len(self.examples) < keep:
            self.examples.append(record)

    @property
    def ok(self) -> bool:
        return self.failures == 0


def pentagon_table(t: RegionTable) -> np.ndarray:
    """pent[u, k]: the k-pentagon property of element u, read off the boundary heights.

    Out-of-range chain neighbours count as a virtual bottom or top.
    """
    a, b, n = t.a, t.b, t.n
    G, H = t.low, t.high
    out = np.zeros((n + 1, n + 2), dtype=bool)
    # alpha_r against beta_j, beta_{j+1}
    for r in range(1, a + 1):
        for k in range(1, n + 1):
            j = k - r
            if j < 1 or j + 1 > b:
                continue
            below = r == 1 or j > H[r - 2]
            above = r == a or j + 1 <= G[r]
            beside = G[r - 1] < j and j + 1 <= H[r - 1]
            out[r, k] = below and above and beside
    # beta_r against alpha_j, alpha_{j+1}: alpha_i < beta_r iff r > H_i, beta_r < alpha_i iff r <= G_i
    for r in range(1, b + 1):
        for k in range(1, n + 1):
            j = k - r
            if j < 1 or j + 1 > a:
                continue
            below = r == 1 or (r - 1) <= G[j - 1]
            above = r == b or (r + 1) > H[j]
            beside = G[j - 1] < r <= H[j - 1] and G[j] < r <= H[j]
            out[a + r, k] = below and above and beside
    return out


def _flat_q(cur, prev, nxt, eps: int) -> np.ndarray:
    c = shifted(cur, 0)
    return (c == shifted(prev, eps)).all(-1) & (c == shifted(nxt, -eps)).all(-1)


def _equality_conditions(T: np.ndarray, ks: np.ndarray, eps) -> np.ndarray:
    """Stack the five flatness conditions over the leading axis and the k-range.

    T[i, k, w] holds dense polynomials; eps is a per-row shift, or None to allow
    either sign.  The fifth row is left for the caller.
    """
    C = T.sum(-1)
    cur, prev, nxt = T[:, ks], T[:, ks - 1], T[:, ks + 1]
    cc, cp, cn = C[:, ks], C[:, ks - 1], C[:, ks + 1]
    out = np.zeros((5,) + cc.shape, dtype=bool)
    out[0] = cc * cc == cp * cn
    out[1] = (cc == cp) & (cc == cn)
    out[2] = (convolve(cur, cur) == convolve(prev, nxt)).all(-1)
    if eps is None:
        out[3] = _flat_q(cur, prev, nxt, 1) | _flat_q(cur, prev, nxt, -1)
    else:
        up = _flat_q(cur, prev, nxt, 1)
        down = _flat_q(cur, prev, nxt, -1)
        out[3] = np.where(eps[:, None] > 0, up, down)
    return out


def stanley_condition_table(t: RegionTable) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Conditions (a)-(e) for every element x and 1 <= k <= n - 1.

    Returns (cond, live, krange) with cond[c, x - 1, j] for k = krange[j] and
    live marking N(k) > 0.
    """
    n, a = t.n, t.a
    N = t.rank_polys()[1:]
    krange = np.arange(1, n)
    eps = np.where(np.arange(1, n + 1) <= a, 1, -1)
    cond = _equality_conditions(N, krange, eps)
    cond[4] = pentagon_table(t)[1:, krange]
    live = N.sum(-1)[:, krange] > 0
    return cond, live, krange


def ks_condition_table(
    t: RegionTable, pairs: list[tuple[int, int]], F: np.ndarray, gaps: np.ndarray
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Conditions (a)-(e) for every pair and 2 <= k <= n - 2, with F(k) > 0 marked live."""
    n = t.n
    m = len(pairs)
    kr = np.arange(2, n - 1)
    cond = _equality_conditions(F, kr, None)
    fl = t.flanked
    pid = np.broadcast_to(np.arange(m), gaps.shape)
    wit = np.zeros((m, n + 2), dtype=bool)
    for side in (0, 1):
        zs = np.array([p[side] for p in pairs])
        keep = (~fl[:, zs]) & (gaps >= 0)
        idx = pid[keep] * (n + 2) + gaps[keep]
        wit |= np.bincount(idx, minlength=m * (n + 2)).reshape(m, n + 2) == 0
    cond[4] = wit[:, kr]
    live = F.sum(-1)[:, kr] > 0
    return cond, live, kr


def sweep_region(reg, ks: SweepTally, sta: SweepTally, kse: SweepTally) -> None:
    """One region through the log-concavity check and both equality suites."""
    t = RegionTable.of(reg)
    n = t.n
    for tally in (ks, sta, kse):
        tally.regions += 1
    if n < 2:
        return
    desc = {"a": t.a, "b": t.b, "low": list(t.low), "high": list(t.high)}

    cond, live, krange = stanley_condition_table(t)
    sta.instances += int(live.sum())
    split = live & (cond.any(0) != cond.all(0))
    for i, j in zip(*np.nonzero(split)):
        sta.fail(dict(desc, x=int(i + 1), k=int(krange[j]), conds=cond[:, i, j].tolist()))

    pairs = t.same_chain_pairs()
    if not pairs or n < 3:
        return
    F, gaps = t.gap_polys(pairs)

    # q-log-concavity for every k > 1
    kr = np.arange(2, n)
    cur = F[:, kr]
    diff = convolve(cur, cur) - convolve(F[:, kr - 1], F[:, kr + 1])
    bad = (diff < 0).any(-1)
    ks.instances += bad.size
    for i, j in zip(*np.nonzero(bad)):
        x, y = pairs[i]
        ks.fail(dict(desc, x=x, y=y, k=int(kr[j])))

    if n < 4:
        return
    cond, live, kr = ks_condition_table(t, pairs, F, gaps)
    kse.instances += int(live.sum())
    split = live & (cond.any(0) != cond.all(0))
    for i, j in zip(*np.nonzero(split)):
        x, y = pairs[i]
        kse.fail(dict(desc, x=x, y=y, k=int(kr[j]), conds=cond[:, i, j].tolist()))


# ------------------------------------------------- modular evaluation engine
#
# Polynomials in q are represented by their values at q = 1, ..., N modulo a
# prime PRIME < 2^26, so a product of two residues fits in int64.  A polynomial
# of degree < N whose integer coefficients lie in (-PRIME/2, PRIME/2) is
# recovered exactly by inverting the Vandermonde matrix modulo PRIME.


def _is_prime(m: int) -> bool:
    if m < 2:
        return False
    f = 2
    while f * f <= m:
        if m % f == 0:
            return False
        f += 1
    return True


def _largest_prime_below(bound: int) -> int:
    m = bound - 1
    while not _is_prime(m):
        m -= 1
    return m


PRIME = _largest_prime_below(1 << 26)


@lru_cache(maxsize=None)
def power_table(N: int, emax: int) -> np.ndarray:
    """qp[e, m] = (m + 1)^e mod PRIME for 0 <= e <= emax."""
    q = np.arange(1, N + 1, dtype=np.int64)
    out = np.ones((emax + 1, N), dtype=np.int64)
    for e in range(1, emax + 1):
        out[e] = out[e - 1] * q % PRIME
    return out


@lru_cache(maxsize=None)
def inverse_vandermonde(N: int) -> np.ndarray:
    """W with coeffs = W @ values (mod PRIME) for degree < N, points 1..N."""
    p = PRIME
    rows = [[pow(m, d, p) for d in range(N)] + [1 if i == m - 1 else 0 for i in range(N)] for m in range(1, N + 1)]
    for col in range(N):
        piv = next(r for r in range(col, N) if rows[r][col] % p)
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = pow(rows[col][col], p - 2, p)
        rows[col] = [v * inv % p for v in rows[col]]
        for r in range(N):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [(v - f * w) % p for v, w in zip(rows[r], rows[col])]
    return np.array([row[N:] for row in rows], dtype=np.int64)


def interpolate(values: np.ndarray) -> np.ndarray:
    """Signed integer coefficients from values at 1..N (last axis)."""
    N = values.shape[-1]
    W = inverse_vandermonde(N)
    c = (values.reshape(-1, N) @ W.T) % PRIME
    c = np.where(c > PRIME // 2, c - PRIME, c)
    return c.reshape(values.shape)


def _mul(*xs: np.ndarray) -> np.ndarray:
    out = xs[0]
    for x in xs[1:]:
        out = out * x % PRIME
    return out


class PathEvaluator:
    """K_q(A, B) for all grid points A, B of a region, evaluated at q = 1..N mod PRIME.

    Weights use the time rule: an East step leaving (i, j) contributes i + j + 1.
    Points outside the grid map to a zero row and column.
    """

    def __init__(self, reg, N: int):
        a, b = reg.a, reg.b
        self.a, self.b, self.N = a, b, N
        G = (a + 1) * (b + 1)
        self.sink = G
        qp = power_table(N, a + b + 1)
        K = np.zeros((G + 1, G + 1, N), dtype=np.int64)
        inside = np.zeros(G + 1, dtype=bool)
        for i in range(a + 1):
            lo, hi = reg.column_range(i)
            inside[i * (b + 1) + lo : i * (b + 1) + hi + 1] = True
        for i in range(a + 1):
            for j in range(b + 1):
                d = i * (b + 1) + j
                if not inside[d]:
                    continue
                col = np.zeros((G + 1, N), dtype=np.int64)
                if i > 0 and inside[d - b - 1]:
                    col += K[:, d - b - 1] * qp[i + j] % PRIME
                if j > 0 and inside[d - 1]:
                    col += K[:, d - 1]
                col[d] += 1
                K[:, d] = col % PRIME
        self.K = K

    def index(self, i, j) -> np.ndarray:
        i, j = np.asarray(i), np.asarray(j)
        ok = (i >= 0) & (i <= self.a) & (j >= 0) & (j <= self.b)
        return np.where(ok, i * (self.b + 1) + j, self.sink)


@dataclass
class STally:
    regions: int = 0
    pairs: int = 0
    terms: int = 0
    grouping_failures: int = 0
    regroup_failures: int = 0
    negative: int = 0
    examples: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not (self.grouping_failures or self.regroup_failures or self.negative)

    def note(self, record: dict) -> None:
        if len(self.examples) < 5:
            self.examples.append(record)


def s_terms_region(reg, tally: STally, keep: bool = False) -> list[dict]:
    """Check the S(u;w) decomposition for every first-chain pair of one region.

    For each pair x = alpha_s, y = alpha_{s+r} and 1 <= k <= n - 1 this checks,
    modulo PRIME at 2 * area + 1 points (area = number of cells between the
    boundaries, which bounds the weight spread of a pair of paths): the grouping of the log-concavity
    difference into S terms, agreement of the level-product form with the
    regrouped path-product form, and (after exact interpolation) that each
    S(u;w) has nonnegative coefficients.  With keep=True the interpolated
    S terms are returned.
    """
    a, b = reg.a, reg.b
    n = a + b
    tally.regions += 1
    if a < 2:
        return []
    N = 2 * sum(h - g for g, h in zip(reg.low, reg.high)) + 1
    ev = PathEvaluator(reg, N)
    K = ev.K
    qp = power_table(N, 6 * n + 8)
    wmin = sum(i + 1 + g for i, g in enumerate(reg.low))
    unshift = power_table(N, 2 * wmin)[2 * wmin]
    unshift = np.array([pow(int(v), PRIME - 2, PRIME) for v in unshift], dtype=np.int64)
    inv2 = (PRIME + 1) // 2
    origin, top = ev.index(0, 0), ev.index(a, b)
    kept = []
    V = np.arange(0, n + 2)
    T = np.arange(0, 2 * n + 4)
    J = np.arange(0, n + 2)
    for s in range(1, a + 1):
        for r in range(1, a - s + 1):
            tally.pairs += 1
            P = K[origin, ev.index(s - 1, V - s)]  # (v, N)
            R = K[ev.index(s + r, T - s - r), top]  # (t, N)
            M = K[ev.index(s, V - s)[:, None], ev.index(s + r - 1, T - s - r)[None, :]]  # (v, t, N)
            vv, jj = np.meshgrid(V, J, indexing="ij")
            tt = vv + jj
            F = _mul(qp[2 * vv + jj], P[vv], M[vv, tt], R[tt])  # (v, j, N)

            vlo, vhi = s + reg.low[s - 1], s + reg.high[s - 1]
            ws, us = [], []
            for w in range(vlo, vhi + 2):
                for u in range(w - 1, vhi + 1):
                    ws.append(w)
                    us.append(u)
            uu = np.array(us)[:, None]
            ww = np.array(ws)[:, None]
            # outside [gmin - 1, gmax + 1] every level polynomial in S vanishes
            gmin = r + max(0, reg.low[s + r - 1] - reg.high[s - 1])
            gmax = r + reg.high[s + r - 1] - reg.low[s - 1]
            klist = np.arange(max(1, gmin - 1), min(n - 1, gmax + 1) + 1)
            ks = klist[None, :]
            direct = (
                _mul(F[uu, ks], F[ww, ks])
                + _mul(F[ww - 1, ks], F[uu + 1, ks])
                - _mul(F[uu, ks + 1], F[ww, ks - 1])
                - _mul(F[uu + 1, ks - 1], F[ww - 1, ks + 1])
            ) % PRIME  # (uw, k, N)

            tot = F.sum(axis=0) % PRIME  # (j, N)
            kk = np.arange(1, n)
            delta = (_mul(tot[kk], tot[kk]) - _mul(tot[kk - 1], tot[kk + 1])) % PRIME
            diag = (uu == ww - 1)[..., None]
            weight = np.where(diag, inv2, 1)
            grouped = np.zeros_like(delta)
            grouped[klist - 1] = (direct * weight % PRIME).sum(axis=0) % PRIME
            if not (grouped == delta).all():
                tally.grouping_failures += 1
                tally.note({"check": "grouping", "low": list(reg.low), "high": list(reg.high), "s": s, "r": r})

            Pu, Pu1, Pw, Pw1 = P[uu], P[uu + 1], P[ww], P[ww - 1]
            p_, p1 = _mul(Pu1, Pw1), _mul(Pu, Pw)
            m1 = _mul(M[uu + 1, uu + ks + 1], M[ww - 1, ww + ks - 1])
            m2 = _mul(M[uu, uu + ks], M[ww, ww + ks])
            m3 = _mul(M[uu + 1, uu + ks], M[ww - 1, ww + ks])
            m4 = _mul(M[uu, uu + ks + 1], M[ww, ww + ks - 1])
            rr = _mul(R[uu + ks + 1], R[ww + ks - 1])
            rr1 = _mul(R[uu + ks], R[ww + ks])
            body = (
                _mul((p1 - p_) % PRIME, (_mul(m2, rr1) - _mul(m4, rr)) % PRIME)
                + _mul(p_, (m2 - m3) % PRIME, (rr1 - rr) % PRIME)
                + _mul(p_, (m1 + m2 - m3 - m4) % PRIME, rr)
            ) % PRIME
            regrouped = _mul(body, qp[2 * uu + 2 * ww + 2 * ks])
            lgv = (_mul(M[uu + 1, uu + ks + 1], M[uu, uu + ks]) - _mul(M[uu, uu + ks + 1], M[uu + 1, uu + ks])) % PRIME
            outer = _mul(P[uu], P[uu + 1], R[uu + ks], R[uu + ks + 1])
            lgv_form = _mul(outer, lgv, qp[4 * uu + 2 + 2 * ks]) * 2 % PRIME
            regrouped = np.where(diag, lgv_form, regrouped)
            if not (regrouped == direct).all():
                tally.regroup_failures += 1
                tally.note({"check": "regroup", "low": list(reg.low), "high": list(reg.high), "s": s, "r": r})

            coeffs = interpolate(_mul(direct, unshift))
            tally.terms += coeffs.shape[0] * coeffs.shape[1]
            neg = (coeffs < 0).any(-1)
            if neg.any():
                tally.negative += int(neg.sum())
                i, j = np.argwhere(neg)[0]
                tally.note({"check": "sign", "low": list(reg.low), "high": list(reg.high), "s": s, "r": r,
                            "u": int(us[i]), "w": int(ws[i]), "k": int(klist[j])})
            if keep:
                for i in range(len(us)):
                    for j, k in enumerate(klist.tolist()):
                        kept.append({"s": s, "r": r, "u": us[i], "w": ws[i], "k": k,
                                     "shift": 2 * wmin, "coeffs": coeffs[i, j].tolist()})
    return kept


# ------------------------------------------------------- path-pair lemmas
#
# Points of the a x b rectangle are indexed i * (b + 1) + j.  A configuration is
# a row of point indices; a region admits it when all its points lie inside.


def region_path_table(reg) -> np.ndarray:
    """K[src, tgt, e]: number of region paths src -> tgt of weight e (time rule)."""
    a, b = reg.a, reg.b
    npts = (a + 1) * (b + 1)
    D = a * (a + 1) // 2 + a * b + 1
    K = np.zeros((npts, npts, D), dtype=np.int64)
    for i in range(a + 1):
        lo, hi = reg.column_range(i)
        for j in range(lo, hi + 1):
            t = i * (b + 1) + j
            K[t, t, 0] = 1
            if i > 0 and reg.contains((i - 1, j)):
                e = i + j  # East step leaving (i - 1, j)
                K[:, t, e:] += K[:, t - (b + 1), : D - e]
            if j > lo:
                K[:, t] += K[:, t - 1]
    return K


def region_point_mask(reg) -> np.ndarray:
    a, b = reg.a, reg.b
    inside = np.zeros((a + 1) * (b + 1), dtype=bool)
    for i in range(a + 1):
        lo, hi = reg.column_range(i)
        inside[i * (b + 1) + lo : i * (b + 1) + hi + 1] = True
    return inside


@lru_cache(maxsize=None)
def pair_configs(a: int, b: int) -> np.ndarray:
    """Rows (A, A', B, B', C, D) of every two-pair configuration in the rectangle."""
    rows = []
    for i in range(a + 1):
        for i2 in range(i, a + 1):
            for B2 in range(b + 1):
                for t in range(b + 1 - B2):
                    for Ap in range(B2, b + 1 - t):
                        for C2 in range(b + 1):
                            for D2 in range(b + 1):
                                if Ap - B2 >= C2 - D2:
                                    rows.append(((i, Ap + t), (i, Ap), (i, B2), (i, B2 + t), (i2, C2), (i2, D2)))
    return _point_rows(rows, b, 6)


@lru_cache(maxsize=None)
def criss_cross_configs(a: int, b: int) -> np.ndarray:
    """Rows (A, A', B, B', C, C', D, D') of every criss-cross configuration in the rectangle."""
    rows = []
    for i in range(a + 1):
        for i2 in range(i, a + 1):
            for B2 in range(b + 1):
                for t in range(b + 1 - B2):
                    for Ap in range(B2, b + 1 - t):
                        A2 = Ap + t
                        for D2 in range(b + 1):
                            C2 = D2 + A2 - B2
                            if C2 > b or D2 + t > b:
                                continue
                            rows.append(
                                ((i, A2), (i, Ap), (i, B2), (i, B2 + t), (i2, C2), (i2, C2 - t), (i2, D2), (i2, D2 + t))
                            )
    return _point_rows(rows, b, 8)


def _point_rows(rows, b: int, width: int) -> np.ndarray:
    arr = np.array(rows, dtype=np.int64).reshape(len(rows), width, 2)
    return arr[..., 0] * (b + 1) + arr[..., 1]


@dataclass
class LemmaTally:
    regions: int = 0
    configs: int = 0
    failures: int = 0
    examples: list = field(default_factory=list)

    def fail(self, record: dict) -> None:
        self.failures += 1
        if len(self.examples) < 5:
            self.examples.append(record)

    @property
    def ok(self) -> bool:
        return self.failures == 0


def lemma_sweep_region(reg, pairs: LemmaTally, criss: LemmaTally) -> None:
    """Two-pair inequality and criss-cross difference for every admissible configuration of one region."""
    K = region_path_table(reg)
    inside = region_point_mask(reg)
    desc = {"a": reg.a, "b": reg.b, "low": list(reg.low), "high": list(reg.high)}
    for tally in (pairs, criss):
        tally.regions += 1

    cfg = pair_configs(reg.a, reg.b)
    c = cfg[inside[cfg].all(axis=1)]
    pairs.configs += len(c)
    if len(c):
        A, A_, B, B_, C, D = c.T
        diff = convolve(K[A_, C], K[B_, D]) - convolve(K[A, C], K[B, D])
        for row in c[(diff < 0).any(axis=1)]:
            pairs.fail(dict(desc, points=row.tolist()))

    cfg = criss_cross_configs(reg.a, reg.b)
    c = cfg[inside[cfg].all(axis=1)]
    criss.configs += len(c)
    if len(c):
        A, A_, B, B_, C, C_, D, D_ = c.T
        delta = (
            convolve(K[A, C], K[B, D])
            + convolve(K[A_, C_], K[B_, D_])
            - convolve(K[A_, C], K[B_, D])
            - convolve(K[A, C_], K[B, D_])
        )
        for row in c[(delta < 0).any(axis=1)]:
            criss.fail(dict(desc, points=row.tolist()))


@dataclass
class KappaTally:
    configs: int = 0
    pairs: int = 0
    not_injective: int = 0
    wrong_endpoints: int = 0
    weight_changed: int = 0
    escaped: int = 0
    examples: list = field(default_factory=list)

    def note(self, record: dict) -> None:
        if len(self.examples) < 5:
            self.examples.append(record)

    @property
    def ok(self) -> bool:
        return not (self.not_injective or self.wrong_endpoints or self.weight_changed or self.escaped)


def _hull_bounds(points, a: int, b: int) -> tuple[list[int], list[int]]:
    """Per column, the bounds shared by every region containing the points.

    The largest admissible lower boundary is the suffix minimum of the column
    minima; the smallest upper boundary is the prefix maximum of the column
    maxima.  Each is attained by a region, so a point set lies in every region
    containing ``points`` exactly when it lies within these bounds.
    """
    cmin = [b + 1] * (a + 1)
    cmax = [-1] * (a + 1)
    for i, j in points:
        cmin[i] = min(cmin[i], j)
        cmax[i] = max(cmax[i], j)
    low = [0] * (a + 1)
    run = b
    for i in range(a, 0, -1):
        run = min(run, cmin[i])
        low[i] = run
    high = [b] * (a + 1)
    run = 0
    for i in range(a):
        run = max(run, cmax[i])
        high[i] = run
    return low, high


def kappa_sweep_rectangle(a: int, b: int, tally: KappaTally) -> None:
    """Check the two-pair injection on every configuration of the a x b rectangle.

    Injectivity and weights are checked on the full rectangle domain, which
    contains the domain of every smaller region.  Landing in the codomain is
    checked against the intersection of all regions admitting the configuration
    and both input paths, which is exactly the worst case over regions.
    """
    from .paths import kappa, path_weight
    from .region import GridPoint, Region, enumerate_paths

    rect = Region.rectangle(a, b)
    for row in pair_configs(a, b):
        pts = [GridPoint(int(v) // (b + 1), int(v) % (b + 1)) for v in row]
        A, A_, B, B_, C, D = pts
        tally.configs += 1
        gammas = list(enumerate_paths(rect, A, C))
        deltas = list(enumerate_paths(rect, B, D))
        seen = set()
        for g in gammas:
            gp = g.points()
            wg = path_weight(g)
            for d in deltas:
                tally.pairs += 1
                g2, d2 = kappa(rect, A, A_, B, B_, C, D, g, d)
                key = (g2.steps, d2.steps)
                rec = {"a": a, "b": b, "points": [list(p) for p in pts], "gamma": g.steps, "delta": d.steps}
                if key in seen:
                    tally.not_injective += 1
                    tally.note(dict(rec, check="injective"))
                seen.add(key)
                if g2.start != A_ or g2.end != C or d2.start != B_ or d2.end != D:
                    tally.wrong_endpoints += 1
                    tally.note(dict(rec, check="endpoints"))
                if path_weight(g2) + path_weight(d2) != wg + path_weight(d):
                    tally.weight_changed += 1
                    tally.note(dict(rec, check="weight"))
                low, high = _hull_bounds(gp + d.points() + pts, a, b)
                if any(not low[i] <= j <= high[i] for i, j in g2.points() + d2.points()):
                    tally.escaped += 1
                    tally.note(dict(rec, check="codomain"))
