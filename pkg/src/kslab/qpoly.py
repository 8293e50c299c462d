"""Sparse exact polynomials in one variable q or in several variables q_1..q_a.

Coefficients are Python integers (arbitrary precision).  Differences of
counting polynomials may have negative coefficients, so the containers accept
any nonzero integer; zero coefficients are never stored.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Union


class ArityError(ValueError):
    pass


class QPoly:
    """Laurent-capable sparse polynomial in q (exponent -> coefficient)."""

    __slots__ = ("_c",)

    def __init__(self, coeffs: Mapping[int, int] | None = None):
        c: dict[int, int] = {}
        if coeffs:
            for e, v in coeffs.items():
                v = int(v)
                if v:
                    c[int(e)] = v
        self._c = c

    @classmethod
    def _raw(cls, c: dict[int, int]) -> QPoly:
        p = cls.__new__(cls)
        p._c = c
        return p

    @classmethod
    def monomial(cls, exp: int, coeff: int = 1) -> QPoly:
        return cls({exp: coeff})

    @classmethod
    def from_exponents(cls, exps: Iterable[int]) -> QPoly:
        c: dict[int, int] = {}
        for e in exps:
            c[e] = c.get(e, 0) + 1
        return cls._raw(c)

    @classmethod
    def from_dense(cls, dense: Iterable[int], offset: int = 0) -> QPoly:
        return cls({offset + i: v for i, v in enumerate(dense) if v})

    @property
    def coeffs(self) -> dict[int, int]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def __eq__(self, other: object) -> bool:
        if isinstance(other, int):
            other = QPoly({0: other})
        if not isinstance(other, QPoly):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(frozenset(self._c.items()))

    def __add__(self, other: QPoly | int) -> QPoly:
        if isinstance(other, int):
            other = QPoly({0: other})
        c = dict(self._c)
        for e, v in other._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return QPoly._raw(c)

    __radd__ = __add__

    def __neg__(self) -> QPoly:
        return QPoly._raw({e: -v for e, v in self._c.items()})

    def __sub__(self, other: QPoly | int) -> QPoly:
        if isinstance(other, int):
            other = QPoly({0: other})
        return self + (-other)

    def __rsub__(self, other: int) -> QPoly:
        return QPoly({0: other}) - self

    def __mul__(self, other: QPoly | int) -> QPoly:
        if isinstance(other, int):
            return QPoly({e: v * other for e, v in self._c.items()})
        if not self._c or not other._c:
            return QPoly()
        c: dict[int, int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = e1 + e2
                c[e] = c.get(e, 0) + v1 * v2
        return QPoly._raw({e: v for e, v in c.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> QPoly:
        out = QPoly({0: 1})
        for _ in range(k):
            out = out * self
        return out

    def shift(self, k: int) -> QPoly:
        """Multiply by q^k."""
        return QPoly._raw({e + k: v for e, v in self._c.items()})

    def reflect(self, total: int) -> QPoly:
        """Return q^total * p(1/q)."""
        return QPoly._raw({total - e: v for e, v in self._c.items()})

    def at(self, q: int) -> int:
        return sum(v * q**e for e, v in self._c.items())

    def at_one(self) -> int:
        return sum(self._c.values())

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._c.values())

    @property
    def degree(self) -> int | None:
        return max(self._c) if self._c else None

    @property
    def low_degree(self) -> int | None:
        return min(self._c) if self._c else None

    def to_json(self) -> dict[str, str]:
        return {str(e): str(v) for e, v in sorted(self._c.items())}

    @classmethod
    def from_json(cls, data: Mapping[str, str]) -> QPoly:
        return cls({int(e): int(v) for e, v in data.items()})

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        parts = []
        for e, v in sorted(self._c.items(), reverse=True):
            mag = abs(v)
            if e == 0:
                term = str(mag)
            else:
                mono = "q" if e == 1 else f"q^{e}"
                term = mono if mag == 1 else f"{mag}{mono}"
            parts.append(("-" if v < 0 else "+", term))
        sign, first = parts[0]
        out = ("-" if sign == "-" else "") + first
        for sign, term in parts[1:]:
            out += f" {sign} {term}"
        return out


class MultiPoly:
    """Sparse polynomial in q_1..q_arity keyed by exponent tuples."""

    __slots__ = ("arity", "_c")

    def __init__(self, arity: int, coeffs: Mapping[tuple[int, ...], int] | None = None):
        self.arity = arity
        c: dict[tuple[int, ...], int] = {}
        if coeffs:
            for e, v in coeffs.items():
                e = tuple(int(t) for t in e)
                if len(e) != arity:
                    raise ArityError(f"exponent {e} does not have length {arity}")
                v = int(v)
                if v:
                    c[e] = v
        self._c = c

    @classmethod
    def _raw(cls, arity: int, c: dict) -> MultiPoly:
        p = cls.__new__(cls)
        p.arity = arity
        p._c = c
        return p

    @classmethod
    def from_exponents(cls, arity: int, exps: Iterable[tuple[int, ...]]) -> MultiPoly:
        c: dict[tuple[int, ...], int] = {}
        for e in exps:
            c[e] = c.get(e, 0) + 1
        return cls._raw(arity, c)

    @property
    def coeffs(self) -> dict[tuple[int, ...], int]:
        return dict(self._c)

    def items(self):
        return sorted(self._c.items())

    def __bool__(self) -> bool:
        return bool(self._c)

    def is_zero(self) -> bool:
        return not self._c

    def _check(self, other: MultiPoly) -> None:
        if not isinstance(other, MultiPoly) or other.arity != self.arity:
            raise ArityError("multivariate polynomials of different arity")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MultiPoly):
            return NotImplemented
        return self.arity == other.arity and self._c == other._c

    def __hash__(self) -> int:
        return hash((self.arity, frozenset(self._c.items())))

    def __add__(self, other: MultiPoly) -> MultiPoly:
        self._check(other)
        c = dict(self._c)
        for e, v in other._c.items():
            s = c.get(e, 0) + v
            if s:
                c[e] = s
            else:
                c.pop(e, None)
        return MultiPoly._raw(self.arity, c)

    def __neg__(self) -> MultiPoly:
        return MultiPoly._raw(self.arity, {e: -v for e, v in self._c.items()})

    def __sub__(self, other: MultiPoly) -> MultiPoly:
        return self + (-other)

    def __mul__(self, other: MultiPoly) -> MultiPoly:
        self._check(other)
        c: dict[tuple[int, ...], int] = {}
        for e1, v1 in self._c.items():
            for e2, v2 in other._c.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c[e] = c.get(e, 0) + v1 * v2
        return MultiPoly._raw(self.arity, {e: v for e, v in c.items() if v})

    def at_one(self) -> int:
        return sum(self._c.values())

    def is_nonnegative(self) -> bool:
        return all(v > 0 for v in self._c.values())

    def specialize(self, powers: Iterable[int] | None = None) -> QPoly:
        """Substitute q_i := q^powers[i] (default: every q_i equal to q).

        Rank gaps of the first chain telescope, so powers (a, a-1, ..., 1)
        turn the multivariate weight into the sum-of-ranks weight.
        """
        pw = tuple(powers) if powers is not None else (1,) * self.arity
        if len(pw) != self.arity:
            raise ArityError(f"need {self.arity} powers, got {len(pw)}")
        c: dict[int, int] = {}
        for e, v in self._c.items():
            s = sum(t * m for t, m in zip(e, pw))
            c[s] = c.get(s, 0) + v
        return QPoly(c)

    def to_json(self) -> dict[str, str]:
        return {",".join(map(str, e)): str(v) for e, v in sorted(self._c.items())}

    def __repr__(self) -> str:
        if not self._c:
            return "0"
        terms = []
        for e, v in sorted(self._c.items(), reverse=True):
            mono = "*".join(
                f"q{i + 1}" if t == 1 else f"q{i + 1}^{t}" for i, t in enumerate(e) if t
            )
            terms.append(f"{v}" + (f"*{mono}" if mono else ""))
        return " + ".join(terms)


Poly = Union[QPoly, MultiPoly]


def coeffwise_geq(f: Poly, g: Poly) -> bool:
    """True iff f - g has only nonnegative coefficients."""
    if isinstance(f, QPoly) and isinstance(g, QPoly):
        return (f - g).is_nonnegative()
    if isinstance(f, MultiPoly) and isinstance(g, MultiPoly):
        if f.arity != g.arity:
            raise ArityError("multivariate polynomials of different arity")
        return (f - g).is_nonnegative()
    raise ArityError("cannot compare a univariate with a multivariate polynomial")
