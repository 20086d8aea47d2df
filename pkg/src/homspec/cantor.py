"""Clopen subsets of the binary Cantor space.

A clopen set is stored as a finite antichain of binary words, where the word
``w`` stands for the cylinder of all infinite sequences starting with ``w``.
Sibling cylinders ``w0`` and ``w1`` are always merged into ``w``, which makes
the representation canonical: two clopens are equal as sets exactly when their
word tuples are equal.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence

from .errors import MalformedWord, NotAPartition

__all__ = [
    "Clopen",
    "ZERO",
    "ONE",
    "canonicalize",
    "boolean_op",
    "meet",
    "join",
    "diff",
    "complement",
    "is_partition",
    "check_partition",
    "common_refinement",
    "split",
    "generated_atoms",
    "cylinders",
]


def _validate(word: str) -> str:
    if not isinstance(word, str) or any(ch not in "01" for ch in word):
        raise MalformedWord(f"not a binary word: {word!r}")
    return word


def _reduce(words: Iterable[str]) -> tuple[str, ...]:
    pool = set(words)
    # Drop words that extend another word of the pool.
    kept = {w for w in pool if not any(w[:i] in pool for i in range(len(w)))}
    # Merge siblings, deepest first, until nothing changes.
    changed = True
    while changed:
        changed = False
        for w in sorted(kept, key=len, reverse=True):
            if not w or w not in kept:
                continue
            sibling = w[:-1] + ("1" if w[-1] == "0" else "0")
            if sibling in kept:
                kept.discard(w)
                kept.discard(sibling)
                kept.add(w[:-1])
                changed = True
    return tuple(sorted(kept))


@dataclass(frozen=True, order=False)
class Clopen:
    """A clopen set in canonical form.

    Build instances with :func:`canonicalize` or :meth:`Clopen.of`; the raw
    constructor trusts its argument to be canonical already.
    """

    words: tuple[str, ...]

    @classmethod
    def of(cls, *words: str) -> "Clopen":
        return canonicalize(words)

    @property
    def is_zero(self) -> bool:
        return not self.words

    @property
    def is_one(self) -> bool:
        return self.words == ("",)

    @property
    def is_proper(self) -> bool:
        return not self.is_zero and not self.is_one

    @property
    def depth(self) -> int:
        return max((len(w) for w in self.words), default=0)

    def sort_key(self) -> tuple[str, ...]:
        return self.words

    def __lt__(self, other: "Clopen") -> bool:
        return self.words < other.words

    def __and__(self, other: "Clopen") -> "Clopen":
        return meet(self, other)

    def __or__(self, other: "Clopen") -> "Clopen":
        return join(self, other)

    def __sub__(self, other: "Clopen") -> "Clopen":
        return diff(self, other)

    def __invert__(self) -> "Clopen":
        return complement(self)

    def contains(self, other: "Clopen") -> bool:
        """True when ``other`` is a subset of ``self``."""
        return diff(other, self).is_zero

    def disjoint(self, other: "Clopen") -> bool:
        return meet(self, other).is_zero

    def __repr__(self) -> str:
        if self.is_zero:
            return "Clopen(0)"
        if self.is_one:
            return "Clopen(1)"
        return "Clopen(" + ",".join(self.words) + ")"

    def to_json(self) -> list[str]:
        return list(self.words)

    @classmethod
    def from_json(cls, data: Sequence[str]) -> "Clopen":
        return canonicalize(data)


ZERO = Clopen(())
ONE = Clopen(("",))


def canonicalize(words: Iterable[str]) -> Clopen:
    """Return the canonical clopen denoting the union of the given cylinders."""
    return Clopen(_reduce(_validate(w) for w in words))


def _meet_words(a: tuple[str, ...], b: tuple[str, ...]) -> list[str]:
    out = []
    for u in a:
        for v in b:
            if v.startswith(u):
                out.append(v)
            elif u.startswith(v):
                out.append(u)
    return out


def _complement_words(words: tuple[str, ...]) -> list[str]:
    out: list[str] = []

    def walk(prefix: str, pool: list[str]) -> None:
        if not pool:
            out.append(prefix)
            return
        if prefix in pool:
            return
        n = len(prefix)
        walk(prefix + "0", [w for w in pool if w[n] == "0"])
        walk(prefix + "1", [w for w in pool if w[n] == "1"])

    walk("", list(words))
    return out


def meet(a: Clopen, b: Clopen) -> Clopen:
    return Clopen(_reduce(_meet_words(a.words, b.words)))


def join(a: Clopen, b: Clopen) -> Clopen:
    return Clopen(_reduce(a.words + b.words))


def complement(a: Clopen) -> Clopen:
    return Clopen(_reduce(_complement_words(a.words)))


def diff(a: Clopen, b: Clopen) -> Clopen:
    return meet(a, complement(b))


def boolean_op(kind: str, a: Clopen, b: Clopen | None = None) -> Clopen:
    """Dispatch ``meet``, ``join``, ``diff`` or ``complement`` by name."""
    if kind == "complement":
        return complement(a)
    if b is None:
        raise ValueError(f"{kind} needs two operands")
    ops = {"meet": meet, "join": join, "diff": diff}
    if kind not in ops:
        raise ValueError(f"unknown boolean operation {kind!r}")
    return ops[kind](a, b)


def is_partition(parts: Sequence[Clopen], whole: Clopen = ONE) -> bool:
    if not parts or any(p.is_zero for p in parts):
        return False
    for i, p in enumerate(parts):
        for q in parts[i + 1 :]:
            if not p.disjoint(q):
                return False
    return reduce(join, parts, ZERO) == whole


def check_partition(parts: Sequence[Clopen], whole: Clopen = ONE) -> None:
    if not is_partition(parts, whole):
        raise NotAPartition(f"{list(parts)} is not a partition of {whole}")


def _ordered(parts: Iterable[Clopen]) -> list[Clopen]:
    return sorted(parts, key=Clopen.sort_key)


def common_refinement(partitions: Sequence[Sequence[Clopen]]) -> list[Clopen]:
    """Coarsest partition refining every input, parts ordered by smallest word."""
    if not partitions:
        raise NotAPartition("no partitions given")
    whole = reduce(join, partitions[0], ZERO)
    for parts in partitions:
        check_partition(parts, whole)
    current = list(partitions[0])
    for parts in partitions[1:]:
        current = [m for p in current for q in parts if not (m := meet(p, q)).is_zero]
    return _ordered(current)


def split(a: Clopen, k: int) -> list[Clopen]:
    """Split a non-zero clopen into ``k`` non-zero disjoint pieces.

    The smallest word ``w`` of ``a`` is cut into ``w0, w10, ..., w1^(k-2)0,
    w1^(k-1)``; any remaining words of ``a`` join the last piece.
    """
    if a.is_zero:
        raise ValueError("cannot split the empty clopen")
    if k < 1:
        raise ValueError("k must be positive")
    if k == 1:
        return [a]
    head, rest = a.words[0], a.words[1:]
    pieces = [head + "1" * i + "0" for i in range(k - 1)]
    pieces.append(head + "1" * (k - 1))
    out = [canonicalize([p]) for p in pieces[:-1]]
    out.append(canonicalize((pieces[-1],) + rest))
    return out


def generated_atoms(generators: Iterable[Clopen]) -> list[Clopen]:
    """Atoms of the finite subalgebra generated by ``generators`` and 1."""
    atoms = [ONE]
    for g in generators:
        refined = []
        for atom in atoms:
            inside, outside = meet(atom, g), diff(atom, g)
            refined.extend(x for x in (inside, outside) if not x.is_zero)
        atoms = refined
    return _ordered(atoms)


def cylinders(length: int) -> list[Clopen]:
    """All cylinders whose word has exactly ``length`` letters, in lex order."""
    return [Clopen((format(i, f"0{length}b") if length else "",)) for i in range(2**length)]
