"""JSON documents for posets and reports.

Big integers are written as decimal strings so that no consumer loses
precision.  Relations may be any generating set on input; output always lists
the cover relations in sorted order, which makes the round trip stable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from .poset import ChainPartition, Poset, PosetError, poset_from_relations
from .qpoly import MultiPoly, QPoly


class DocumentError(ValueError):
    pass


@dataclass
class PosetDocument:
    n: int
    relations: list[tuple[int, int]]
    chains: tuple[tuple[int, ...], tuple[int, ...]] | None = None
    labels: dict[int, str] = field(default_factory=dict)

    def poset(self) -> Poset:
        return poset_from_relations(self.n, self.relations)

    def partition(self) -> ChainPartition | None:
        if self.chains is None:
            return None
        cp = ChainPartition(*self.chains)
        cp.validate(self.poset())
        return cp

    def to_json(self) -> dict:
        out: dict[str, Any] = {"n": self.n, "relations": [list(e) for e in self.relations]}
        if self.chains is not None:
            out["chains"] = {"c1": list(self.chains[0]), "c2": list(self.chains[1])}
        if self.labels:
            out["labels"] = {str(k): v for k, v in sorted(self.labels.items())}
        return out

    @classmethod
    def from_json(cls, data: Any) -> PosetDocument:
        if not isinstance(data, dict):
            raise DocumentError("document must be a JSON object")
        try:
            n = int(data["n"])
            rels = [(int(u), int(v)) for u, v in data.get("relations", [])]
        except (KeyError, TypeError, ValueError) as exc:
            raise DocumentError(f"malformed poset document: {exc}") from exc
        chains = None
        if "chains" in data:
            c = data["chains"]
            try:
                chains = (tuple(int(u) for u in c["c1"]), tuple(int(u) for u in c.get("c2", [])))
            except (KeyError, TypeError, ValueError) as exc:
                raise DocumentError(f"malformed chains: {exc}") from exc
        labels = {int(k): str(v) for k, v in data.get("labels", {}).items()}
        doc = cls(n, rels, chains, labels)
        try:
            p = doc.poset()
            doc.partition()
        except PosetError as exc:
            raise DocumentError(str(exc)) from exc
        for u in labels:
            if not 1 <= u <= p.n:
                raise DocumentError(f"label for unknown element {u}")
        return doc

    @classmethod
    def of(cls, p: Poset, cp: ChainPartition | None = None, labels: dict[int, str] | None = None) -> PosetDocument:
        chains = (cp.c1, cp.c2) if cp is not None else None
        return cls(p.n, sorted(p.cover_relations()), chains, dict(labels or {}))

    def canonical(self) -> PosetDocument:
        return PosetDocument.of(self.poset(), self.partition(), self.labels)


def load_document(path: str | Path) -> PosetDocument:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"{path}: invalid JSON ({exc})") from exc
    return PosetDocument.from_json(data)


def poset_hash(p: Poset) -> str:
    """Digest of the labelled order (cover relations), stable across runs."""
    blob = json.dumps([p.n, sorted(p.cover_relations())], separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def encode_value(v: Any) -> Any:
    """JSON form of counts and polynomials: integers as decimal strings."""
    if isinstance(v, bool):
        return v
    if isinstance(v, int):
        return str(v)
    if isinstance(v, QPoly):
        return {str(e): str(c) for e, c in sorted(v.coeffs.items())}
    if isinstance(v, MultiPoly):
        return {",".join(map(str, e)): str(c) for e, c in sorted(v.coeffs.items())}
    raise TypeError(f"cannot encode {type(v).__name__}")


def dumps(report: dict) -> str:
    """Deterministic serialization used for every report."""
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
