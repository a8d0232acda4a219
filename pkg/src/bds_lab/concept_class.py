"""Finite concept classes over a finite domain.

Labels are the integers ``1..k`` and instances are indexed ``0..n-1``.
Hypotheses are stored as a lexicographically sorted tuple of label
tuples, so every iteration order in the package is canonical.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

Vector = tuple[int, ...]

#: Refuse to enumerate more than this many label vectors in ``full_class``.
ENUMERATION_CAP = 1 << 20


class ClassFormatError(ValueError):
    """Malformed concept-class input (bad labels, duplicates, arity)."""


@dataclass(frozen=True)
class ConceptClass:
    k: int
    n: int
    hypotheses: tuple[Vector, ...]

    def __post_init__(self):
        if self.k < 1:
            raise ClassFormatError(f"k must be >= 1, got {self.k}")
        if self.n < 0:
            raise ClassFormatError(f"n must be >= 0, got {self.n}")
        if not self.hypotheses:
            raise ClassFormatError("a concept class needs at least one hypothesis")
        for h in self.hypotheses:
            if len(h) != self.n:
                raise ClassFormatError(f"hypothesis {h} has length {len(h)}, expected {self.n}")
            for y in h:
                if not 1 <= y <= self.k:
                    raise ClassFormatError(f"label {y} outside 1..{self.k} in {h}")
        if len(set(self.hypotheses)) != len(self.hypotheses):
            raise ClassFormatError("duplicate hypotheses")
        if list(self.hypotheses) != sorted(self.hypotheses):
            raise ClassFormatError("hypotheses must be sorted; use ConceptClass.build")

    @classmethod
    def build(cls, k: int, n: int, hypotheses: Iterable[Sequence[int]]) -> "ConceptClass":
        """Construct from any iterable of vectors; duplicates are rejected."""
        vecs = [tuple(int(y) for y in h) for h in hypotheses]
        if len(set(vecs)) != len(vecs):
            raise ClassFormatError("duplicate hypotheses")
        return cls(k, n, tuple(sorted(vecs)))

    def __len__(self) -> int:
        return len(self.hypotheses)

    def __iter__(self):
        return iter(self.hypotheses)

    def __contains__(self, h) -> bool:
        return tuple(h) in self._index

    @property
    def _index(self) -> frozenset:
        # frozen dataclass: cache through object.__setattr__
        try:
            return self.__dict__["_idx"]
        except KeyError:
            idx = frozenset(self.hypotheses)
            object.__setattr__(self, "_idx", idx)
            return idx

    def labels_at(self, x: int) -> tuple[int, ...]:
        """Sorted distinct labels the class assigns to instance ``x``."""
        return tuple(sorted({h[x] for h in self.hypotheses}))

    def to_dict(self) -> dict:
        return {"k": self.k, "n": self.n, "hypotheses": [list(h) for h in self.hypotheses]}


def check_sequence(cls: ConceptClass, seq: Sequence[int]) -> tuple[int, ...]:
    seq = tuple(int(s) for s in seq)
    for s in seq:
        if not 0 <= s < cls.n:
            raise IndexError(f"instance {s} out of range 0..{cls.n - 1}")
    return seq


def restrict(cls: ConceptClass, seq: Sequence[int]) -> tuple[Vector, ...]:
    """Project the class onto an instance sequence (repeats allowed).

    Returns the deduplicated patterns ``(h(s_1), ..., h(s_d))`` in
    lexicographic order.
    """
    seq = check_sequence(cls, seq)
    return tuple(sorted({tuple(h[s] for s in seq) for h in cls.hypotheses}))


def project(vectors: Iterable[Vector], coords: Sequence[int]) -> tuple[Vector, ...]:
    """Restrict already-projected vectors to a sub-sequence of coordinates."""
    return tuple(sorted({tuple(v[c] for c in coords) for v in vectors}))


def i_neighbors(proj: Iterable[Vector], f: Vector, i: int) -> tuple[Vector, ...]:
    """All ``g`` in ``proj`` that differ from ``f`` exactly at coordinate ``i``.

    ``i`` is 0-based here; the sorted result has pairwise-distinct labels at ``i``.
    """
    proj = tuple(proj)
    f = tuple(f)
    if f not in set(proj):
        raise KeyError(f"{f} is not in the projected class")
    if not 0 <= i < len(f):
        raise IndexError(f"coordinate {i} out of range for arity {len(f)}")
    return tuple(
        g for g in proj
        if g[i] != f[i] and all(g[j] == f[j] for j in range(len(f)) if j != i)
    )


def full_class(n: int, k: int) -> ConceptClass:
    if k ** n > ENUMERATION_CAP:
        raise ValueError(f"k**n = {k ** n} exceeds the enumeration cap {ENUMERATION_CAP}")
    return ConceptClass(k, n, tuple(itertools.product(range(1, k + 1), repeat=n)))


def random_class(n: int, k: int, count: int, seed: int) -> ConceptClass:
    """``count`` distinct vectors drawn uniformly from ``[k]^n``."""
    total = k ** n
    if not 1 <= count <= total:
        raise ValueError(f"count must lie in 1..{total}, got {count}")
    rng = random.Random(seed)
    if total <= ENUMERATION_CAP:
        codes = rng.sample(range(total), count)
    else:
        picked: set[int] = set()
        while len(picked) < count:
            picked.add(rng.randrange(total))
        codes = sorted(picked)
    vecs = []
    for c in codes:
        v = []
        for _ in range(n):
            c, r = divmod(c, k)
            v.append(r + 1)
        vecs.append(tuple(reversed(v)))
    return ConceptClass.build(k, n, vecs)


# -- file I/O ---------------------------------------------------------------

def from_dict(data: dict) -> ConceptClass:
    try:
        k, n, hyps = int(data["k"]), int(data["n"]), data["hypotheses"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ClassFormatError(f"malformed concept-class object: {exc}") from exc
    if not isinstance(hyps, list) or not all(isinstance(h, list) for h in hyps):
        raise ClassFormatError("'hypotheses' must be a list of integer lists")
    for h in hyps:
        if not all(isinstance(y, int) and not isinstance(y, bool) for y in h):
            raise ClassFormatError(f"non-integer label in {h}")
    return ConceptClass.build(k, n, hyps)


def loads(text: str, fmt: str = "json", k: int | None = None) -> ConceptClass:
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ClassFormatError(str(exc)) from exc
        return from_dict(data)
    if fmt == "csv":
        rows = [r for r in csv.reader(io.StringIO(text)) if r]
        try:
            vecs = [tuple(int(c) for c in r) for r in rows]
        except ValueError as exc:
            raise ClassFormatError(str(exc)) from exc
        if not vecs:
            raise ClassFormatError("empty CSV class")
        n = len(vecs[0])
        if k is None:
            k = max(max(v) for v in vecs) if n else 1
        return ConceptClass.build(k, n, vecs)
    raise ValueError(f"unknown class format {fmt!r}")


def dumps(cls: ConceptClass, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(cls.to_dict(), separators=(",", ":")) + "\n"
    if fmt == "csv":
        return "".join(",".join(str(y) for y in h) + "\n" for h in cls.hypotheses)
    raise ValueError(f"unknown class format {fmt!r}")


def _fmt_for(path: Path) -> str:
    return "csv" if path.suffix.lower() == ".csv" else "json"


def load(path, k: int | None = None) -> ConceptClass:
    """Read a class file; ``.csv`` files are header-less label rows."""
    path = Path(path)
    return loads(path.read_text(), _fmt_for(path), k=k)


def save(cls: ConceptClass, path) -> None:
    path = Path(path)
    path.write_text(dumps(cls, _fmt_for(path)))
