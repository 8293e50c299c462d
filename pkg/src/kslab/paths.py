"""Weighted path counting inside a region and the path-pair lemmas built on it.

Weight rule: an East step leaving (i, j) contributes q^(i+j+1), i.e. the time
index of that step in the corresponding linear extension.  With this rule the
weight of a full path equals the sum of the ranks of the first chain, and
weights add under concatenation.  The alternative "area" rule (an East step at
height j contributes q^j) is available for comparing normalizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

from .qpoly import QPoly
from .region import E1, E2, GridPoint, NEPath, Region, RegionError, enumerate_paths


class GeometryError(ValueError):
    pass


ONE = QPoly({0: 1})
ZERO = QPoly()


def step_exponent(i: int, j: int, weighting: str = "time") -> int:
    if weighting == "time":
        return i + j + 1
    if weighting == "area":
        return j
    raise ValueError(f"unknown weighting {weighting!r}")


def path_weight(path: NEPath, weighting: str = "time") -> int:
    total = 0
    x, y = path.start
    for s in path.steps:
        if s == "E":
            total += step_exponent(x, y, weighting)
            x += 1
        else:
            y += 1
    return total


@lru_cache(maxsize=4096)
def paths_from(r: Region, A: GridPoint, weighting: str = "time") -> dict[GridPoint, QPoly]:
    """K_q(A, B) for every region point B reachable from A (column-sweep DP)."""
    out: dict[GridPoint, QPoly] = {}
    if not r.contains(A):
        return out
    for i in range(A.x1, r.a + 1):
        lo, hi = r.column_range(i)
        for j in range(max(lo, A.x2), hi + 1):
            pt = GridPoint(i, j)
            if pt == A:
                acc = ONE
            else:
                acc = ZERO
                left = out.get(GridPoint(i - 1, j))
                if left is not None and left:
                    acc = acc + left.shift(step_exponent(i - 1, j, weighting))
                below = out.get(GridPoint(i, j - 1))
                if below is not None and below:
                    acc = acc + below
            out[pt] = acc
    return out


def count_paths_q(r: Region, A: Sequence[int], B: Sequence[int], weighting: str = "time") -> QPoly:
    A, B = GridPoint(*A), GridPoint(*B)
    if not (r.contains(A) and r.contains(B)) or A.x1 > B.x1 or A.x2 > B.x2:
        return ZERO
    return paths_from(r, A, weighting).get(B, ZERO)


def count_paths(r: Region, A: Sequence[int], B: Sequence[int]) -> int:
    return count_paths_q(r, A, B).at_one()


# ---------------------------------------------------------------- injection


def _same_line(*pts: GridPoint) -> bool:
    return len({p.x1 for p in pts}) == 1


def check_pair_geometry(
    r: Region, A, A_, B, B_, C, D
) -> tuple[GridPoint, GridPoint, GridPoint, GridPoint, GridPoint, GridPoint]:
    A, A_, B, B_, C, D = (GridPoint(*p) for p in (A, A_, B, B_, C, D))
    ok = (
        _same_line(A, A_, B, B_)
        and _same_line(C, D)
        and C.x1 >= A.x1
        and A.x2 - A_.x2 == B_.x2 - B.x2 >= 0
        and A_.x2 >= B.x2
        and A_.x2 - B.x2 >= C.x2 - D.x2
        and all(r.contains(p) for p in (A, A_, B, B_, C, D))
    )
    if not ok:
        raise GeometryError("geometry mismatch")
    return A, A_, B, B_, C, D


def kappa(r: Region, A, A_, B, B_, C, D, gamma: NEPath, delta: NEPath) -> tuple[NEPath, NEPath]:
    """Map a pair (A->C, B->D) to a pair (A'->C, B'->D) by cutting at the first meeting point."""
    A, A_, B, B_, C, D = check_pair_geometry(r, A, A_, B, B_, C, D)
    if gamma.start != A or gamma.end != C or delta.start != B or delta.end != D:
        raise GeometryError("geometry mismatch")
    if not (r.contains_path(gamma) and r.contains_path(delta)):
        raise GeometryError("geometry mismatch")
    v = A_ - B
    hat = delta.translate(v)
    hat_pts = hat.points()
    index_in_hat = {p: i for i, p in enumerate(hat_pts)}
    for gi, p in enumerate(gamma.points()):
        if p in index_in_hat:
            hi = index_in_hat[p]
            break
    else:
        raise AssertionError("translated path does not meet the first path")
    g_len = len(gamma.steps)
    h_len = len(hat.steps)
    gamma_new = hat.segment(0, hi) + gamma.segment(gi, g_len)
    delta_new = (gamma.segment(0, gi) + hat.segment(hi, h_len)).translate((-v.x1, -v.x2))
    return gamma_new, delta_new


@dataclass(frozen=True)
class PairComparison:
    lhs: QPoly
    rhs: QPoly

    @property
    def difference(self) -> QPoly:
        return self.lhs - self.rhs

    @property
    def holds(self) -> bool:
        return self.difference.is_nonnegative()

    @property
    def equal(self) -> bool:
        return self.lhs == self.rhs


def check_lemma_pairs(r: Region, A, A_, B, B_, C, D) -> PairComparison:
    """K(A',C) K(B',D) versus K(A,C) K(B,D)."""
    A, A_, B, B_, C, D = check_pair_geometry(r, A, A_, B, B_, C, D)
    lhs = count_paths_q(r, A_, C) * count_paths_q(r, B_, D)
    rhs = count_paths_q(r, A, C) * count_paths_q(r, B, D)
    return PairComparison(lhs, rhs)


def check_criss_cross_geometry(r: Region, A, A_, B, B_, C, C_, D, D_):
    pts = tuple(GridPoint(*p) for p in (A, A_, B, B_, C, C_, D, D_))
    A, A_, B, B_, C, C_, D, D_ = pts
    t = A.x2 - A_.x2
    ok = (
        _same_line(A, A_, B, B_)
        and _same_line(C, C_, D, D_)
        and C.x1 >= A.x1
        and t >= 0
        and B_.x2 - B.x2 == t
        and C.x2 - C_.x2 == t
        and D_.x2 - D.x2 == t
        and A.x2 - B.x2 == C.x2 - D.x2
        and A_.x2 >= B.x2
        and all(r.contains(p) for p in pts)
    )
    if not ok:
        raise GeometryError("geometry mismatch")
    return pts


def criss_cross_delta2(r: Region, A, A_, B, B_, C, C_, D, D_) -> QPoly:
    A, A_, B, B_, C, C_, D, D_ = check_criss_cross_geometry(r, A, A_, B, B_, C, C_, D, D_)
    K = lambda P, Q: count_paths_q(r, P, Q)  # noqa: E731
    return (
        K(A, C) * K(B, D)
        + K(A_, C_) * K(B_, D_)
        - K(A_, C) * K(B_, D)
        - K(A, C_) * K(B, D_)
    )


# ------------------------------------------------------- boundary predicates


def _segment_points(P1: GridPoint, P2: GridPoint) -> list[GridPoint]:
    if P1.x1 == P2.x1:
        lo, hi = sorted((P1.x2, P2.x2))
        return [GridPoint(P1.x1, j) for j in range(lo, hi + 1)]
    if P1.x2 == P2.x2:
        lo, hi = sorted((P1.x1, P2.x1))
        return [GridPoint(i, P1.x2) for i in range(lo, hi + 1)]
    raise GeometryError("segment must be horizontal or vertical")


def segment_on_lower_boundary(r: Region, P1, P2) -> bool:
    pts = set(r.lower.points())
    return all(p in pts for p in _segment_points(GridPoint(*P1), GridPoint(*P2)))


def segment_on_upper_boundary(r: Region, P1, P2) -> bool:
    pts = set(r.upper.points())
    return all(p in pts for p in _segment_points(GridPoint(*P1), GridPoint(*P2)))


@dataclass(frozen=True)
class ForcedPoint:
    point: GridPoint
    case: str  # "a": E = A, "b": E = D, "c": any other point


def forced_point(r: Region, A, B, C, D) -> ForcedPoint | None:
    """Point through which every path of the four families passes, when the
    two-pair inequality K(A,C)K(B,D) >= K(B,C)K(A,D) is tight and nonzero."""
    A, B, C, D = (GridPoint(*p) for p in (A, B, C, D))
    if not (A.x1 == B.x1 and C.x1 == D.x1 and A.x2 >= B.x2 and C.x2 >= D.x2 and C.x1 >= A.x1):
        raise GeometryError("geometry mismatch")
    K = lambda P, Q: count_paths_q(r, P, Q)  # noqa: E731
    lhs = K(A, C) * K(B, D)
    rhs = K(B, C) * K(A, D)
    if lhs != rhs or lhs.is_zero():
        return None
    others = sorted(p for p in r.points() if p not in (A, D))
    for E in [A, D] + others:
        if (
            K(A, C) == K(A, E) * K(E, C)
            and K(B, D) == K(B, E) * K(E, D)
            and K(B, C) == K(B, E) * K(E, C)
            and K(A, D) == K(A, E) * K(E, D)
        ):
            case = "a" if E == A else "b" if E == D else "c"
            return ForcedPoint(E, case)
    return None


# --------------------------------------------------- level decomposition


@dataclass(frozen=True)
class LevelAnchors:
    """x = alpha_s and y = alpha_{s+r} of the chain ``chain``."""

    s: int
    r: int
    chain: int = 1

    def Y(self, u: int) -> GridPoint:
        return GridPoint(self.s - 1, u - self.s)

    def V(self, u: int) -> GridPoint:
        return GridPoint(self.s + self.r - 1, u - self.s - self.r)


@lru_cache(maxsize=1024)
def level_table(r: Region, s: int, gap: int) -> dict[tuple[int, int], QPoly]:
    """F_q(v; j) for x = alpha_s, y = alpha_{s+gap}, by enumerating region paths."""
    acc: dict[tuple[int, int], dict[int, int]] = {}
    for path in enumerate_paths(r):
        h = path.east_heights()
        lx = s + h[s - 1]
        ly = s + gap + h[s + gap - 1]
        w = sum(i + 1 + hi for i, hi in enumerate(h))
        d = acc.setdefault((lx, ly - lx), {})
        d[w] = d.get(w, 0) + 1
    return {key: QPoly(v) for key, v in acc.items()}


def level_poly(r: Region, anchors: LevelAnchors, v: int, j: int) -> QPoly:
    return level_table(r, anchors.s, anchors.r).get((v, j), ZERO)


def level_poly_factored(r: Region, anchors: LevelAnchors, v: int, j: int, weighting: str = "time") -> QPoly:
    """F_q(v; j) assembled from the three path segments around the x- and y-steps."""
    Q = GridPoint(r.a, r.b)
    Y, V = anchors.Y(v), anchors.V(v + j)
    core = (
        count_paths_q(r, (0, 0), Y, weighting)
        * count_paths_q(r, Y + E1, V, weighting)
        * count_paths_q(r, V + E1, Q, weighting)
    )
    if core.is_zero():
        return core
    if weighting == "time":
        return core.shift(2 * v + j)
    a, s, gap = r.a, anchors.s, anchors.r
    return core.shift(a * (a + 1) // 2 + 2 * v + j - 2 * s - gap)


@dataclass(frozen=True)
class STerm:
    u: int
    w: int
    k: int
    direct: QPoly
    regrouped: QPoly
    parts: dict = field(default_factory=dict)

    @property
    def agrees(self) -> bool:
        return self.direct == self.regrouped

    @property
    def nonnegative(self) -> bool:
        return self.direct.is_nonnegative()

    @property
    def parts_nonnegative(self) -> bool:
        return all(p.is_nonnegative() for p in self.parts.values())


def _s_term_first_chain(r: Region, anchors: LevelAnchors, k: int, u: int, w: int) -> STerm:
    F = lambda v, j: level_poly(r, anchors, v, j)  # noqa: E731
    direct = F(u, k) * F(w, k) + F(w - 1, k) * F(u + 1, k) - F(u, k + 1) * F(w, k - 1) - F(u + 1, k - 1) * F(w - 1, k + 1)

    Q = GridPoint(r.a, r.b)
    K = lambda P, R: count_paths_q(r, P, R)  # noqa: E731
    P_ = lambda v: K((0, 0), anchors.Y(v))  # noqa: E731
    M_ = lambda v, t: K(anchors.Y(v) + E1, anchors.V(t))  # noqa: E731
    R_ = lambda t: K(anchors.V(t) + E1, Q)  # noqa: E731

    if u == w - 1:
        lgv = M_(u + 1, u + k + 1) * M_(u, u + k) - M_(u, u + k + 1) * M_(u + 1, u + k)
        outer = P_(u) * P_(u + 1) * R_(u + k) * R_(u + k + 1)
        regrouped = (outer * lgv).shift(4 * u + 2 + 2 * k) * 2
        return STerm(u, w, k, direct, regrouped, {"lgv": lgv})
    if u < w - 1:
        raise ValueError("levels must satisfy u >= w - 1")
    p = P_(u + 1) * P_(w - 1)
    p1 = P_(u) * P_(w)
    m1 = M_(u + 1, u + k + 1) * M_(w - 1, w + k - 1)
    m2 = M_(u, u + k) * M_(w, w + k)
    m3 = M_(u + 1, u + k) * M_(w - 1, w + k)
    m4 = M_(u, u + k + 1) * M_(w, w + k - 1)
    rr = R_(u + k + 1) * R_(w + k - 1)
    rr1 = R_(u + k) * R_(w + k)
    parts = {
        "prefix": p1 - p,
        "middle_tail": m2 * rr1 - m4 * rr,
        "middle": m2 - m3,
        "tail": rr1 - rr,
        "second_difference": m1 + m2 - m3 - m4,
    }
    body = (
        parts["prefix"] * parts["middle_tail"]
        + p * parts["middle"] * parts["tail"]
        + p * parts["second_difference"] * rr
    )
    return STerm(u, w, k, direct, body.shift(2 * u + 2 * w + 2 * k), parts)


def s_term(r: Region, anchors: LevelAnchors, k: int, u: int, w: int) -> STerm:
    """S(u; w) computed from level polynomials and, independently, from path-count products."""
    if anchors.r < 1 or anchors.s < 1:
        raise GeometryError("x and y must be distinct elements of one chain, x first")
    if anchors.chain == 1:
        if anchors.s + anchors.r > r.a:
            raise GeometryError("anchors out of range")
        return _s_term_first_chain(r, anchors, k, u, w)
    if anchors.chain == 2:
        if anchors.s + anchors.r > r.b:
            raise GeometryError("anchors out of range")
        t = _s_term_first_chain(r.transpose(), LevelAnchors(anchors.s, anchors.r, 1), k, u, w)
        total = r.n * (r.n + 1)
        return STerm(u, w, k, t.direct.reflect(total), t.regrouped.reflect(total), t.parts)
    raise GeometryError("chain must be 1 or 2")
