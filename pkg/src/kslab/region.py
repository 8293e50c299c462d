"""Width-two posets as staircase regions of monotone lattice paths.

Conventions: the first chain of the partition moves East (x1 axis), the second
moves North (x2 axis).  A monotone path from (0,0) to (a,b) is described by the
heights of its East steps, h_1 <= ... <= h_a, where h_i counts the North steps
taken before the i-th East step.  A region is the set of lattice points between
a lower boundary (heights G) and an upper boundary (heights H) with G <= H.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations_with_replacement
from typing import Iterator, NamedTuple, Sequence

from .poset import ChainPartition, LinearExtension, Poset, PosetError, poset_from_relations


class RegionError(ValueError):
    pass


class GridPoint(NamedTuple):
    x1: int
    x2: int

    def __add__(self, other):  # type: ignore[override]
        return GridPoint(self.x1 + other[0], self.x2 + other[1])

    def __sub__(self, other):
        return GridPoint(self.x1 - other[0], self.x2 - other[1])


E1 = GridPoint(1, 0)
E2 = GridPoint(0, 1)


@dataclass(frozen=True)
class NEPath:
    start: GridPoint
    steps: str

    def __post_init__(self) -> None:
        if set(self.steps) - {"E", "N"}:
            raise RegionError("steps must be over the alphabet {E, N}")
        object.__setattr__(self, "start", GridPoint(*self.start))

    @property
    def end(self) -> GridPoint:
        e = self.steps.count("E")
        return GridPoint(self.start.x1 + e, self.start.x2 + len(self.steps) - e)

    def points(self) -> list[GridPoint]:
        x, y = self.start
        out = [GridPoint(x, y)]
        for s in self.steps:
            if s == "E":
                x += 1
            else:
                y += 1
            out.append(GridPoint(x, y))
        return out

    def east_heights(self) -> tuple[int, ...]:
        """x2-coordinates at which the East steps are taken."""
        y = self.start.x2
        out = []
        for s in self.steps:
            if s == "E":
                out.append(y)
            else:
                y += 1
        return tuple(out)

    def __add__(self, other: NEPath) -> NEPath:
        if self.end != other.start:
            raise RegionError("paths do not concatenate")
        return NEPath(self.start, self.steps + other.steps)

    def translate(self, v: Sequence[int]) -> NEPath:
        return NEPath(self.start + v, self.steps)

    def segment(self, i: int, j: int) -> NEPath:
        """Sub-path between the i-th and j-th points (0-based, inclusive)."""
        return NEPath(self.points()[i], self.steps[i:j])

    @classmethod
    def from_heights(cls, heights: Sequence[int], b: int) -> NEPath:
        steps = []
        y = 0
        for h in heights:
            steps.append("N" * (h - y))
            steps.append("E")
            y = h
        steps.append("N" * (b - y))
        return cls(GridPoint(0, 0), "".join(steps))

    def transpose(self) -> NEPath:
        return NEPath(
            GridPoint(self.start.x2, self.start.x1),
            self.steps.translate(str.maketrans("EN", "NE")),
        )


def _check_heights(h: Sequence[int], b: int) -> None:
    if any(x < 0 or x > b for x in h) or any(x > y for x, y in zip(h, h[1:])):
        raise RegionError(f"heights {tuple(h)} are not a monotone path with b={b}")


@dataclass(frozen=True)
class Region:
    a: int
    b: int
    lower: NEPath
    upper: NEPath

    def __post_init__(self) -> None:
        for path in (self.lower, self.upper):
            if path.start != (0, 0) or path.end != (self.a, self.b):
                raise RegionError("boundary paths must run from (0,0) to (a,b)")
        if any(g > h for g, h in zip(self.low, self.high)):
            raise RegionError("lower boundary rises above the upper boundary")

    @classmethod
    def from_heights(cls, a: int, b: int, low: Sequence[int], high: Sequence[int]) -> Region:
        if len(low) != a or len(high) != a:
            raise RegionError("height sequences must have length a")
        _check_heights(low, b)
        _check_heights(high, b)
        return cls(a, b, NEPath.from_heights(low, b), NEPath.from_heights(high, b))

    @classmethod
    def from_strings(cls, lower: str, upper: str) -> Region:
        a = lower.count("E")
        b = len(lower) - a
        return cls(a, b, NEPath(GridPoint(0, 0), lower), NEPath(GridPoint(0, 0), upper))

    @classmethod
    def rectangle(cls, a: int, b: int) -> Region:
        return cls.from_heights(a, b, (0,) * a, (b,) * a)

    @cached_property
    def low(self) -> tuple[int, ...]:
        return self.lower.east_heights()

    @cached_property
    def high(self) -> tuple[int, ...]:
        return self.upper.east_heights()

    @property
    def n(self) -> int:
        return self.a + self.b

    def column_range(self, i: int) -> tuple[int, int]:
        """Lowest and highest x2 of region points on the line x1 = i."""
        lo = 0 if i == 0 else self.low[i - 1]
        hi = self.b if i == self.a else self.high[i]
        return lo, hi

    def contains(self, pt: Sequence[int]) -> bool:
        i, j = pt
        if not (0 <= i <= self.a and 0 <= j <= self.b):
            return False
        lo, hi = self.column_range(i)
        return lo <= j <= hi

    def contains_path(self, path: NEPath) -> bool:
        return all(self.contains(p) for p in path.points())

    def points(self) -> list[GridPoint]:
        out = []
        for i in range(self.a + 1):
            lo, hi = self.column_range(i)
            out.extend(GridPoint(i, j) for j in range(lo, hi + 1))
        return out

    def to_strings(self) -> tuple[str, str]:
        return self.lower.steps, self.upper.steps

    def transpose(self) -> Region:
        """Mirror across the diagonal; the two chains swap roles."""
        return Region(self.b, self.a, self.upper.transpose(), self.lower.transpose())

    def on_lower_vertical(self, i: int) -> tuple[int, int]:
        """x2-range of the vertical run of the lower boundary on the line x1 = i."""
        g = (0,) + self.low + (self.b,)
        return g[i], g[i + 1]

    def on_upper_vertical(self, i: int) -> tuple[int, int]:
        h = (0,) + self.high + (self.b,)
        return h[i], h[i + 1]


def region_of(p: Poset, cp: ChainPartition) -> Region:
    """Reg(P): East step of alpha_h lies between max{k: beta_k < alpha_h} and min{k: alpha_h < beta_k} - 1."""
    cp.validate(p)
    a, b = cp.a, cp.b
    low, high = [], []
    for alpha in cp.c1:
        below = [k for k, beta in enumerate(cp.c2, start=1) if p.less(beta, alpha)]
        above = [k for k, beta in enumerate(cp.c2, start=1) if p.less(alpha, beta)]
        low.append(max(below, default=0))
        high.append(min(above, default=b + 1) - 1)
    return Region.from_heights(a, b, low, high)


def path_of_extension(p: Poset, cp: ChainPartition, L: LinearExtension) -> NEPath:
    first = set(cp.c1)
    steps = "".join("E" if u in first else "N" for u in L.order())
    return NEPath(GridPoint(0, 0), steps)


def extension_of_path(p: Poset, cp: ChainPartition, path: NEPath) -> LinearExtension:
    if path.start != (0, 0) or path.end != (cp.a, cp.b):
        raise RegionError("not an extension path")
    if not region_of(p, cp).contains_path(path):
        raise RegionError("not an extension path")
    i = j = 0
    order = []
    for s in path.steps:
        if s == "E":
            order.append(cp.c1[i])
            i += 1
        else:
            order.append(cp.c2[j])
            j += 1
    return LinearExtension.from_order(order)


def poset_of_region(r: Region) -> tuple[Poset, ChainPartition]:
    """Canonical width-two poset: alpha_h = h, beta_k = a + k."""
    a, b = r.a, r.b
    pairs = [(h, h + 1) for h in range(1, a)] + [(a + k, a + k + 1) for k in range(1, b)]
    for h in range(1, a + 1):
        g, hh = r.low[h - 1], r.high[h - 1]
        pairs += [(a + k, h) for k in range(1, g + 1)]
        pairs += [(h, a + k) for k in range(hh + 1, b + 1)]
    p = poset_from_relations(a + b, pairs)
    return p, ChainPartition(tuple(range(1, a + 1)), tuple(range(a + 1, a + b + 1)))


def monotone_sequences(a: int, b: int) -> list[tuple[int, ...]]:
    """Nondecreasing sequences of length a over 0..b, in lexicographic order."""
    return list(combinations_with_replacement(range(b + 1), a))


def enumerate_regions(a: int, b: int) -> Iterator[Region]:
    seqs = monotone_sequences(a, b)
    for low in seqs:
        for high in seqs:
            if all(g <= h for g, h in zip(low, high)):
                yield Region.from_heights(a, b, low, high)


def enumerate_paths(r: Region, A: Sequence[int] = (0, 0), B: Sequence[int] | None = None) -> Iterator[NEPath]:
    """All NE paths A -> B inside the region, East tried before North."""
    B = GridPoint(r.a, r.b) if B is None else GridPoint(*B)
    A = GridPoint(*A)
    if not (r.contains(A) and r.contains(B)) or A.x1 > B.x1 or A.x2 > B.x2:
        return
    steps: list[str] = []

    def rec(x: int, y: int) -> Iterator[NEPath]:
        if (x, y) == B:
            yield NEPath(A, "".join(steps))
            return
        if x < B.x1 and r.contains((x + 1, y)):
            steps.append("E")
            yield from rec(x + 1, y)
            steps.pop()
        if y < B.x2 and r.contains((x, y + 1)):
            steps.append("N")
            yield from rec(x, y + 1)
            steps.pop()

    yield from rec(A.x1, A.x2)


def render(r: Region, path: NEPath | None = None) -> str:
    """ASCII picture: one character per lattice point, top row first.

    'o' marks region points, '.' points outside, '*' points of an overlaid path.
    """
    marked = set(path.points()) if path is not None else set()
    rows = []
    for j in range(r.b, -1, -1):
        row = []
        for i in range(r.a + 1):
            if (i, j) in marked:
                row.append("*")
            elif r.contains((i, j)):
                row.append("o")
            else:
                row.append(".")
        rows.append(" ".join(row))
    lo, hi = r.to_strings()
    rows.append(f"lower: {lo or '-'}")
    rows.append(f"upper: {hi or '-'}")
    return "\n".join(rows)
