"""Trinary spectra, binary spectra and partially ordered spectra.

A spectrum handle describes a set of triples ``(a, b, c)`` of elements with a
constant sum ``e``.  Intensional handles (:class:`Full`, :class:`Good`,
:class:`SkewProduct`, ...) decide membership by a formula and know closed-form
witnesses for the existential axioms; a :class:`Fragment` is a finite set of
triples, searched exhaustively.

Axiom checks are three-valued: ``pass`` on every enumerated premise up to the
bound, ``fail`` with a counterexample, or ``unresolved`` when a witness search
gave up.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Iterable, Iterator, Sequence

from .coeff import (
    EMPTY,
    Element,
    IntLex,
    IntVector,
    ModInt,
    Product,
    RatLex,
    RatVector,
    System,
    between,
    div_exact,
    dump_element,
    load_element,
    parse_system,
)
from .errors import (
    BadIndex,
    BadRestriction,
    NotNullSequence,
    NotOrdered,
    NoWitnessUpToBound,
    PremiseViolated,
    SystemMismatch,
    TooLarge,
    UnknownSystem,
    ZeroInLambdaPrime,
)

__all__ = [
    "Spectrum",
    "Full",
    "Good",
    "Fragment",
    "SkewProduct",
    "SkewPower",
    "Restriction",
    "FromHomspec2",
    "FromPospec",
    "Homspec2",
    "Pospec",
    "LinearPospec",
    "AxiomResult",
    "AxiomReport",
    "ZeroClassification",
    "AXIOMS",
    "member",
    "delta_member",
    "check_axioms",
    "witness_sp",
    "build",
    "h3_to_h2",
    "h2_to_h3",
    "pospec_to_h2",
    "h2_to_pospec",
    "check_pospec",
    "check_h2",
    "classify_zero",
    "enumerate_h2_small",
    "project_spectrum",
    "index_tuples",
]

Triple = tuple[Element, Element, Element]

AXIOMS = ("Sp0", "Sp1", "Sp2", "Sp3", "Sp4a", "Sp4b", "Sp4", "Sp5")

DEFAULT_SEARCH = 64


def index_tuples(k: int) -> Iterator[tuple[int, ...]]:
    """All k-tuples of naturals, ordered by their maximum and then lexicographically."""
    if k == 0:
        yield ()
        return
    m = 0
    while True:
        yield from _tuples_with_max(k, m, True)
        m += 1


def _tuples_with_max(k: int, m: int, need: bool) -> Iterator[tuple[int, ...]]:
    """Lexicographic k-tuples over ``0..m``; with ``need`` they must contain ``m``."""
    if k == 0:
        if not need:
            yield ()
        return
    for x in range(m + 1):
        rest_need = need and x != m
        if rest_need and k == 1:
            continue
        for rest in _tuples_with_max(k - 1, m, rest_need):
            yield (x,) + rest


def fair_product(sources: Sequence[Iterable[Any]]) -> Iterator[tuple[Any, ...]]:
    """Cartesian product of possibly infinite iterables, fair in every factor."""
    iters = [iter(s) for s in sources]
    cache: list[list[Any]] = [[] for _ in sources]
    done = [False] * len(sources)

    def get(i: int, n: int) -> bool:
        while len(cache[i]) <= n and not done[i]:
            try:
                cache[i].append(next(iters[i]))
            except StopIteration:
                done[i] = True
        return n < len(cache[i])

    m = 0
    while True:
        if all(done[i] and len(cache[i]) <= m for i in range(len(sources))) and m > 0:
            return
        produced = False
        for t in itertools.product(range(m + 1), repeat=len(sources)):
            if max(t) != m:
                continue
            if all(get(i, n) for i, n in enumerate(t)):
                produced = True
                yield tuple(cache[i][n] for i, n in enumerate(t))
        if not produced and all(done):
            return
        m += 1


def _check_system(system: System, items: Iterable[Element]) -> None:
    for x in items:
        if not isinstance(x, Element) or x.system != system:
            raise SystemMismatch(f"{x!r} is not an element of {system}")


def _triple_key(t: Sequence[Element]):
    return tuple(x.sort_key() for x in t)


# ---------------------------------------------------------------------------
# Handles
# ---------------------------------------------------------------------------


class Spectrum:
    """Base class of trinary-spectrum handles."""

    system: System
    total: Element
    finite = False

    # Membership ------------------------------------------------------------
    def member(self, a: Element, b: Element, c: Element) -> bool:
        raise NotImplementedError

    def pair_member(self, a: Element, b: Element) -> bool:
        """Membership in the set of pairs ``(f, g+h)`` for ``(f, g, h)`` in the spectrum."""
        if a + b != self.total:
            return False
        return self.first_member(a)

    def first_member(self, a: Element) -> bool:
        """Whether ``a`` occurs as a coordinate of some triple."""
        try:
            self.refine_pair(self.total - a, a, search=self.default_search())
            return True
        except NoWitnessUpToBound:
            pass
        for x in self._candidates(self.default_search()):
            if self.member(a, x, self.total - a - x):
                return True
        return False

    # Enumeration -------------------------------------------------------------
    def enumerate_triples(self) -> Iterator[Triple]:
        system = self.system
        for a, b in fair_product([system.elements(), system.elements()]):
            c = self.total - a - b
            if self.member(a, b, c):
                yield (a, b, c)

    def enumerate_pairs(self) -> Iterator[tuple[Element, Element]]:
        for a in self.system.elements():
            b = self.total - a
            if self.pair_member(a, b):
                yield (a, b)

    def triples(self, bound: int) -> list[Triple]:
        return list(itertools.islice(self.enumerate_triples(), bound))

    def pairs(self, bound: int) -> list[tuple[Element, Element]]:
        return list(itertools.islice(self.enumerate_pairs(), bound))

    def default_search(self) -> int:
        return DEFAULT_SEARCH

    def _candidates(self, search: int) -> list[Element]:
        out = [self.system.zero_element]
        for x in itertools.islice(self.system.elements(), search):
            if x not in out:
                out.append(x)
        return out

    # Witnesses ---------------------------------------------------------------
    def refine_pair(self, delta: Element, v: Element, search: int | None = None) -> tuple[Element, Element]:
        """Return ``(x, y)`` with ``x + y = v`` and ``(x, y, delta)`` in the spectrum."""
        search = search or self.default_search()
        for x in self._candidates(search):
            y = v - x
            if self.member(x, y, delta):
                return (x, y)
        raise NoWitnessUpToBound(f"no refinement of {v!r} beside {delta!r} within {search}")

    def sp4_witness(self, a, b, p, q, r, search: int | None = None):
        """Solid witness ``(x, y, u, v)``; the generic rule searches over ``x``."""
        search = search or self.default_search()
        for x in self._candidates(search):
            y, u = p - x, a - x
            v = q - u
            if self.member(x, y, q + r) and self.member(u, v, p + r):
                return (x, y, u, v)
        raise NoWitnessUpToBound("no solid witness within the search bound")

    def sp4b_witness(self, a, b, p, q, r, search: int | None = None):
        """Witness ``(x, y, z, u, v, w)``; the generic rule searches over ``x``."""
        search = search or self.default_search()
        try:
            return _sp4b_from_sp4(self.sp4_witness(a, b, p, q, r, search=search), q, r, p)
        except NoWitnessUpToBound:
            pass
        y, v = q + r, p + r
        for x in self._candidates(search):
            z, u = p - x, a - x
            w = q - u
            if sp4b_pattern(self, (x, y, z), (u, v, w)) is not None:
                return (x, y, z, u, v, w)
        raise NoWitnessUpToBound("no witness for the four-element split within the search bound")

    def sp5_witness(self, x: Element, y: Element, search: int | None = None):
        """Return ``(bs, ws)`` for the pair ``(x, y)``; the generic rule is a prefix-sum search."""
        search = search or self.default_search()
        return _sp5_search(self, x, y, search)

    # JSON --------------------------------------------------------------------
    def to_json(self) -> dict:
        raise NotImplementedError


def _sp4b_from_sp4(wit, q, r, p):
    x_, y_, u_, v_ = wit
    return (x_, q + r, y_, u_, p + r, v_)


def sp4b_pattern(spec: Spectrum, first: Triple, second: Triple) -> str | None:
    """Which membership pattern a pair of triples satisfies for the four-element split.

    Returns ``"direct"`` when the first triple lies in the spectrum or the
    zero-right extension and the second in the spectrum or the zero-left
    extension, ``"converse"`` for the swapped pattern, and ``None`` otherwise.
    """
    zero = spec.system.zero_element

    def in_right(t):
        return spec.member(*t) or (t[2] == zero and spec.pair_member(t[0], t[1]))

    def in_left(t):
        return spec.member(*t) or (t[0] == zero and spec.pair_member(t[1], t[2]))

    if in_right(first) and in_left(second):
        return "direct"
    if in_left(first) and in_right(second):
        return "converse"
    return None


@dataclass(frozen=True, eq=False)
class Full(Spectrum):
    """All triples with sum ``E``."""

    system: System
    total: Element

    def __post_init__(self):
        _check_system(self.system, [self.total])

    def member(self, a, b, c):
        _check_system(self.system, (a, b, c))
        return a + b + c == self.total

    def pair_member(self, a, b):
        _check_system(self.system, (a, b))
        return a + b == self.total

    def first_member(self, a):
        return True

    def unit(self) -> Element:
        for x in self.system.elements():
            if not x.is_zero:
                return x
        return self.system.zero_element

    def refine_pair(self, delta, v, search=None):
        if delta + v != self.total:
            raise PremiseViolated(f"{delta!r} + {v!r} is not the total")
        t = self.unit()
        return (v - t, t)

    def sp4_witness(self, a, b, p, q, r, search=None):
        zero = self.system.zero_element
        return (a, p - a, zero, q)

    def sp4b_witness(self, a, b, p, q, r, search=None):
        zero = self.system.zero_element
        return (a, q + r, p - a, zero, p + r, q)

    def sp5_witness(self, x, y, search=None):
        zero = self.system.zero_element
        bs = (self.total, zero, zero)
        return bs, tuple(x - b for b in bs)

    def enumerate_pairs(self):
        for a in self.system.elements():
            yield (a, self.total - a)

    def enumerate_triples(self):
        for a, b in fair_product([self.system.elements(), self.system.elements()]):
            yield (a, b, self.total - a - b)

    def to_json(self):
        return {"ctor": "Full", "system": self.system.to_json(), "e": self.total.to_json()}

    def __repr__(self):
        return f"Full({self.system}, {self.total!r})"


@dataclass(frozen=True, eq=False)
class Good(Spectrum):
    """Triples of positive elements summing to ``omega`` in an ordered group."""

    system: System
    omega: Element

    def __post_init__(self):
        if not self.system.is_ordered:
            raise NotOrdered(f"{self.system} carries no order")
        _check_system(self.system, [self.omega])
        if not self.system.zero_element < self.omega:
            raise PremiseViolated("omega must be positive")

    @property
    def total(self):  # type: ignore[override]
        return self.omega

    @property
    def dense(self) -> bool:
        return self.system.is_densely_ordered

    def _positive(self, x: Element) -> bool:
        return self.system.zero_element < x

    def epsilon(self) -> Element:
        """Least positive element of an integer lex system."""
        d = self.system.d  # type: ignore[attr-defined]
        return self.system.wrap((0,) * (d - 1) + (1,))

    def _splittable(self, b: Element) -> bool:
        return self._positive(b) and (self.dense or b != self.epsilon())

    def member(self, a, b, c):
        _check_system(self.system, (a, b, c))
        return self._positive(a) and self._positive(b) and self._positive(c) and a + b + c == self.omega

    def pair_member(self, a, b):
        _check_system(self.system, (a, b))
        return self._positive(a) and self._splittable(b) and a + b == self.omega

    def first_member(self, a):
        return self._positive(a) and self._splittable(self.omega - a)

    def refine_pair(self, delta, v, search=None):
        if not (self._positive(delta) and delta + v == self.omega and self._splittable(v)):
            raise PremiseViolated(f"cannot refine {v!r} beside {delta!r}")
        if self.dense:
            half = div_exact(v, 2)
            return (half, v - half)
        eps = self.epsilon()
        return (v - eps, eps)

    def sp4_witness(self, a, b, p, q, r, search=None):
        if not self.dense:
            return super().sp4_witness(a, b, p, q, r, search)
        zero = self.system.zero_element
        lo = max(zero, a - q)
        hi = min(a, p)
        x = between(lo, hi)
        y, u = p - x, a - x
        return (x, y, u, q - u)

    def sp5_witness(self, x, y, search=None):
        if not self.dense:
            return super().sp5_witness(x, y, search)
        search = search or self.default_search()
        for n in range(3, max(search, 3) + 1):
            b = div_exact(self.omega, n)
            if b < x:
                return (b,) * n, (x - b,) * n
        raise NoWitnessUpToBound(f"no equal chain below {x!r} with at most {search} steps")

    def enumerate_triples(self):
        zero = self.system.zero_element
        for a, b in fair_product([self.system.elements(), self.system.elements()]):
            if zero < a and zero < b:
                c = self.omega - a - b
                if zero < c:
                    yield (a, b, c)

    def to_json(self):
        return {"ctor": "Good", "system": self.system.to_json(), "omega": self.omega.to_json()}

    def __repr__(self):
        return f"Good({self.system}, {self.omega!r})"


@dataclass(frozen=True, eq=False)
class Fragment(Spectrum):
    """A finite set of triples taken as the whole spectrum."""

    system: System
    members: frozenset

    finite = True

    def __post_init__(self):
        for t in self.members:
            _check_system(self.system, t)
        sums = {a + b + c for a, b, c in self.members}
        if len(sums) > 1:
            # Kept as data so that the axiom checker can report the violation.
            object.__setattr__(self, "_sums", sums)

    @classmethod
    def of(cls, system: System, triples: Iterable[Sequence[Any]]) -> "Fragment":
        members = set()
        for t in triples:
            members.add(tuple(x if isinstance(x, Element) else system(x) for x in t))
        return cls(system, frozenset(members))

    @classmethod
    def from_rule(cls, system: System, rule: Callable[[Element, Element, Element], bool], search: int) -> "Fragment":
        """Collect the triples among the first ``search`` elements satisfying ``rule``."""
        pool = list(itertools.islice(system.elements(), search))
        return cls(system, frozenset(t for t in itertools.product(pool, repeat=3) if rule(*t)))

    @property
    def total(self):  # type: ignore[override]
        ordered = self.sorted_members()
        if not ordered:
            return self.system.zero_element
        a, b, c = ordered[0]
        return a + b + c

    def sorted_members(self) -> list[Triple]:
        return sorted(self.members, key=_triple_key)

    def member(self, a, b, c):
        _check_system(self.system, (a, b, c))
        return (a, b, c) in self.members

    def pair_member(self, a, b):
        return any(t[0] == a and t[1] + t[2] == b for t in self.members)

    def first_member(self, a):
        return any(t[0] == a for t in self.members)

    def default_search(self):
        return len(self._coords())

    def _coords(self) -> list[Element]:
        coords = {x for t in self.members for x in t}
        coords.add(self.system.zero_element)
        return sorted(coords, key=Element.sort_key)

    def _candidates(self, search):
        return self._coords()

    def enumerate_triples(self):
        return iter(self.sorted_members())

    def enumerate_pairs(self):
        pairs = {(t[0], t[1] + t[2]) for t in self.members}
        return iter(sorted(pairs, key=_triple_key))

    def to_json(self):
        return {
            "ctor": "Fragment",
            "system": self.system.to_json(),
            "triples": [[x.to_json() for x in t] for t in self.sorted_members()],
        }

    def __repr__(self):
        return f"Fragment({self.system}, {len(self.members)} triples)"


@dataclass(frozen=True, eq=False)
class Restriction(Spectrum):
    """Spectrum of a measure restricted to a clopen of value ``m_j`` with complement value ``d``."""

    base: Spectrum
    m_j: Element
    d: Element

    def __post_init__(self):
        _check_system(self.base.system, (self.m_j, self.d))
        if self.m_j + self.d != self.base.total:
            raise BadRestriction(f"{self.m_j!r} + {self.d!r} differs from the base total")

    @property
    def system(self):  # type: ignore[override]
        return self.base.system

    @property
    def total(self):  # type: ignore[override]
        return self.m_j

    def member(self, a, b, c):
        _check_system(self.system, (a, b, c))
        if a + b + c != self.m_j:
            return False
        return self.base.member(a, b, c + self.d) and self.base.member(a + b, c, self.d)

    def pair_member(self, a, b):
        _check_system(self.system, (a, b))
        return a + b == self.m_j and self.base.member(a, b, self.d)

    def first_member(self, a):
        return self.pair_member(a, self.m_j - a)

    def to_json(self):
        return {"ctor": "Restriction", "base": self.base.to_json(), "m_j": self.m_j.to_json(), "d": self.d.to_json()}

    def __repr__(self):
        return f"Restriction({self.base!r}, {self.m_j!r}, {self.d!r})"


class SkewProduct(Spectrum):
    """Componentwise product of finitely many spectra."""

    def __init__(self, factors: Sequence[Spectrum], null_tail: bool = False):
        if not factors:
            raise ValueError("a product needs at least one factor")
        self.factors = tuple(factors)
        self.null_tail = null_tail
        if null_tail:
            last = self.factors[-1]
            zero = last.system.zero_element
            if not last.member(zero, zero, zero):
                raise NotNullSequence("the tail factor does not contain the zero triple")
        self.system = Product(tuple(f.system for f in self.factors))
        self.total = Element(self.system, tuple(f.total.value for f in self.factors))

    def _split(self, x: Element) -> list[Element]:
        _check_system(self.system, [x])
        return [Element(f.system, v) for f, v in zip(self.factors, x.value)]

    def _join(self, parts: Sequence[Element]) -> Element:
        return Element(self.system, tuple(p.value for p in parts))

    def member(self, a, b, c):
        return all(f.member(x, y, z) for f, x, y, z in zip(self.factors, self._split(a), self._split(b), self._split(c)))

    def pair_member(self, a, b):
        return all(f.pair_member(x, y) for f, x, y in zip(self.factors, self._split(a), self._split(b)))

    def first_member(self, a):
        return all(f.first_member(x) for f, x in zip(self.factors, self._split(a)))

    def _componentwise(self, method: str, args: Sequence[Element], search):
        columns = list(zip(*(self._split(x) for x in args)))
        parts = [getattr(f, method)(*col, search=search) for f, col in zip(self.factors, columns)]
        return tuple(self._join(list(c)) for c in zip(*parts))

    def refine_pair(self, delta, v, search=None):
        return self._componentwise("refine_pair", (delta, v), search)

    def sp4_witness(self, a, b, p, q, r, search=None):
        return self._componentwise("sp4_witness", (a, b, p, q, r), search)

    def sp4b_witness(self, a, b, p, q, r, search=None):
        try:
            return _sp4b_from_sp4(self.sp4_witness(a, b, p, q, r, search), q, r, p)
        except NoWitnessUpToBound:
            return Spectrum.sp4b_witness(self, a, b, p, q, r, search)

    def sp5_witness(self, x, y, search=None):
        # Each factor contributes a chain; pad shorter chains with copies of a
        # factor's own witness is not valid, so only equal lengths combine.
        chains = [f.sp5_witness(xs, ys, search) for f, xs, ys in zip(self.factors, self._split(x), self._split(y))]
        lengths = {len(bs) for bs, _ in chains}
        if len(lengths) == 1:
            bs = tuple(self._join([c[0][k] for c in chains]) for k in range(lengths.pop()))
            return bs, tuple(x - b for b in bs)
        return Spectrum.sp5_witness(self, x, y, search)

    def enumerate_triples(self):
        for combo in fair_product([f.enumerate_triples() for f in self.factors]):
            yield tuple(self._join([t[i] for t in combo]) for i in range(3))

    def enumerate_pairs(self):
        for combo in fair_product([f.enumerate_pairs() for f in self.factors]):
            yield tuple(self._join([t[i] for t in combo]) for i in range(2))

    def project(self, s: int) -> Spectrum:
        if not 1 <= s <= len(self.factors):
            raise BadIndex(f"coordinate {s} outside 1..{len(self.factors)}")
        return self.factors[s - 1]

    def to_json(self):
        return {"ctor": "SkewProduct", "factors": [f.to_json() for f in self.factors], "null_tail": self.null_tail}

    def __repr__(self):
        return "SkewProduct(" + ", ".join(map(repr, self.factors)) + ")"


class SkewPower(SkewProduct):
    """``length`` copies of one spectrum; the last coordinate stands for the constant tail."""

    def __init__(self, base: Spectrum, length: int):
        if length < 1:
            raise ValueError("length must be positive")
        self.base = base
        self.length = length
        super().__init__([base] * length)

    def to_json(self):
        return {"ctor": "SkewPower", "base": self.base.to_json(), "length": self.length}

    def __repr__(self):
        return f"SkewPower({self.base!r}, {self.length})"


class FromHomspec2(Spectrum):
    """Triples ``(a, b, E-a-b)`` for pairs ``(a, b)`` of a binary spectrum."""

    def __init__(self, h2: "Homspec2"):
        self.h2 = h2
        self.system = h2.system
        self.total = h2.e

    def member(self, a, b, c):
        _check_system(self.system, (a, b, c))
        return a + b + c == self.total and self.h2.member(a, b)

    def first_member(self, a):
        return self.h2.prime_member(a)

    def enumerate_triples(self):
        for a, b in self.h2.enumerate():
            yield (a, b, self.total - a - b)

    def to_json(self):
        return {"ctor": "FromHomspec2", "homspec2": self.h2.to_json()}


class FromPospec(FromHomspec2):
    """The trinary spectrum induced by a solid pospec."""

    def __init__(self, pospec: "Pospec"):
        self.pospec = pospec
        super().__init__(pospec_to_h2(pospec))
        self._good = pospec.as_good()

    def member(self, a, b, c):
        if self._good is not None:
            return self._good.member(a, b, c)
        return super().member(a, b, c)

    def first_member(self, a):
        return self.pospec.interior(a)

    def refine_pair(self, delta, v, search=None):
        if self._good is not None:
            return self._good.refine_pair(delta, v, search)
        return super().refine_pair(delta, v, search)

    def sp4_witness(self, *args, search=None):
        if self._good is not None:
            return self._good.sp4_witness(*args, search=search)
        return super().sp4_witness(*args, search=search)

    def sp5_witness(self, x, y, search=None):
        if self._good is not None:
            return self._good.sp5_witness(x, y, search)
        return super().sp5_witness(x, y, search)

    def enumerate_triples(self):
        if self._good is not None:
            return self._good.enumerate_triples()
        return super().enumerate_triples()

    def to_json(self):
        return {"ctor": "FromPospec", "pospec": self.pospec.to_json()}


# ---------------------------------------------------------------------------
# Generic searches
# ---------------------------------------------------------------------------


def _sp5_search(spec: Spectrum, x: Element, y: Element, search: int):
    e = spec.total
    cands = spec._candidates(search)
    ends = [b for b in cands if spec.member(b, x - b, y)]
    if not ends:
        raise NoWitnessUpToBound(f"no admissible block below {x!r}")
    end_set = set(ends)
    # Layer k maps a prefix sum after k blocks to the block sequence reaching it.
    layer: dict[Element, tuple[Element, ...]] = {}
    for b in ends:
        layer.setdefault(b, (b,))
    for n in range(3, max(search, 3) + 1):
        nxt: dict[Element, tuple[Element, ...]] = {}
        for s, seq in layer.items():
            for b in ends:
                t = s + b
                if t in nxt:
                    continue
                if spec.member(s, b, e - t):
                    nxt[t] = seq + (b,)
        for s, seq in sorted(nxt.items(), key=lambda kv: kv[0].sort_key()):
            last = e - s
            if last in end_set:
                bs = seq + (last,)
                return bs, tuple(x - b for b in bs)
        if not nxt:
            break
        layer = nxt
    raise NoWitnessUpToBound(f"no chain for {x!r} with at most {search} blocks")


# ---------------------------------------------------------------------------
# Axiom checking
# ---------------------------------------------------------------------------


@dataclass
class AxiomResult:
    axiom: str
    verdict: str
    witnesses: int = 0
    bound: int = 0
    counterexample: tuple | None = None
    detail: str = ""
    certificate: list = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"axiom": self.axiom, "verdict": self.verdict, "witnesses": self.witnesses, "bound": self.bound}
        if self.counterexample is not None:
            out["counterexample"] = [_dump_any(x) for x in self.counterexample]
        if self.detail:
            out["detail"] = self.detail
        if self.certificate:
            out["certificate"] = [_dump_any(c) for c in self.certificate]
        return out


def _dump_any(x: Any) -> Any:
    if isinstance(x, Element) or x is EMPTY:
        return dump_element(x)
    if isinstance(x, (tuple, list)):
        return [_dump_any(y) for y in x]
    return x


@dataclass
class AxiomReport:
    results: list[AxiomResult]

    def __getitem__(self, axiom: str) -> AxiomResult:
        for r in self.results:
            if r.axiom == axiom:
                return r
        raise KeyError(axiom)

    def verdict(self, axiom: str) -> str:
        return self[axiom].verdict

    @property
    def all_pass(self) -> bool:
        return all(r.verdict == "pass" for r in self.results)

    @property
    def overall(self) -> str:
        verdicts = {r.verdict for r in self.results}
        if "fail" in verdicts:
            return "fail"
        if "unresolved" in verdicts:
            return "unresolved"
        return "pass"

    def to_json(self) -> list[dict]:
        return [r.to_json() for r in self.results]


class _Tally:
    def __init__(self, axiom: str, bound: int):
        self.result = AxiomResult(axiom, "pass", bound=bound)

    def witness(self, cert=None):
        self.result.witnesses += 1
        if cert is not None and len(self.result.certificate) < 3:
            self.result.certificate.append(cert)

    def fail(self, counterexample, detail=""):
        self.result.verdict = "fail"
        self.result.counterexample = tuple(counterexample)
        self.result.detail = detail
        return self.result

    def unresolved(self, detail=""):
        if self.result.verdict == "pass":
            self.result.verdict = "unresolved"
            self.result.detail = detail


def _premise_pairs(spec: Spectrum, triples: list[Triple], bound: int):
    """Premise instances ``(a, b, p, q, r)`` for the four-element split, up to ``bound``."""
    count = 0
    by_third: dict[Element, list[Triple]] = {}
    for t in triples:
        by_third.setdefault(t[2], []).append(t)
    zero = spec.system.zero_element
    pairs = spec.pairs(max(1, int(math.isqrt(bound)) + 1)) if not spec.finite else list(spec.enumerate_pairs())
    streams = []
    for group in by_third.values():
        streams.append(((a, b, p, q, r) for (a, b, r), (p, q, _) in itertools.product(group, group)))
    streams.append(((a, b, p, q, zero) for (a, b), (p, q) in itertools.product(pairs, pairs)))
    for inst in itertools.chain(*streams):
        if count >= bound and not spec.finite:
            return
        count += 1
        yield inst


def check_axioms(spec: Spectrum, which: Iterable[str] = AXIOMS, bound: int = 100) -> AxiomReport:
    """Check the spectrum axioms on the first ``bound`` enumerated instances."""
    if bound < 1:
        raise ValueError("bound must be positive")
    which = list(which)
    triples = spec.triples(bound) if not spec.finite else list(spec.enumerate_triples())
    results = []
    for axiom in which:
        checker = _CHECKERS.get(axiom)
        if checker is None:
            raise ValueError(f"unknown axiom {axiom!r}")
        results.append(checker(spec, triples, bound))
    return AxiomReport(results)


def _check_sp0(spec, triples, bound):
    tally = _Tally("Sp0", bound)
    if triples:
        tally.witness(triples[0])
        return tally.result
    if spec.finite:
        return tally.fail((), "the spectrum is empty")
    tally.unresolved("no triple found within the bound")
    return tally.result


def _check_sp1(spec, triples, bound):
    tally = _Tally("Sp1", bound)
    for t in triples:
        for perm in itertools.permutations(t):
            if not spec.member(*perm):
                return tally.fail(t, f"permutation {perm!r} missing")
        tally.witness()
    return tally.result


def _check_sp2(spec, triples, bound):
    tally = _Tally("Sp2", bound)
    if not triples:
        return tally.result
    e = sum(triples[0][1:], triples[0][0])
    for t in triples:
        if t[0] + t[1] + t[2] != e:
            return tally.fail(t, "sum differs from the first triple")
        tally.witness()
    return tally.result


def _check_sp3(spec, triples, bound):
    tally = _Tally("Sp3", bound)
    by_first: dict[Element, list[Triple]] = {}
    for t in triples:
        by_first.setdefault(t[0], []).append(t)
    count = 0
    for a, b, cd in triples:
        for s, c, d in by_first.get(a + b, []):
            if c + d != cd:
                continue
            count += 1
            if not spec.member(a, b + c, d):
                return tally.fail((a, b, c, d), "(a, b+c, d) missing")
            tally.witness()
            if count >= bound * 4 and not spec.finite:
                return tally.result
    return tally.result


def _witness_or(tally: _Tally, spec: Spectrum, instance, fn, check):
    try:
        wit = fn()
    except (NoWitnessUpToBound, PremiseViolated):
        wit = None
    if wit is not None and check(wit):
        tally.witness((instance, wit))
        return True
    if spec.finite:
        tally.fail(instance, "no witness inside the fragment")
        return False
    tally.unresolved("witness search exhausted")
    return True


def _check_sp4a(spec, triples, bound):
    tally = _Tally("Sp4a", bound)
    for a, b, c in triples:
        ok = _witness_or(
            tally,
            spec,
            (a, b, c),
            lambda: spec.refine_pair(b + c, a),
            lambda w: w[0] + w[1] == a and spec.member(w[0], w[1], b + c),
        )
        if not ok:
            return tally.result
    return tally.result


def _verify_sp4b(spec, inst, wit) -> bool:
    a, b, p, q, r = inst
    x, y, z, u, v, w = wit
    equations = x + z == p and y == q + r and u + w == q and v == p + r and a == x + u and b == z + w
    return equations and sp4b_pattern(spec, (x, y, z), (u, v, w)) is not None


def _verify_sp4(spec, inst, wit) -> bool:
    a, b, p, q, r = inst
    x, y, u, v = wit
    return (
        spec.member(x, y, q + r)
        and spec.member(u, v, p + r)
        and p == x + y
        and q == u + v
        and a == x + u
        and b == y + v
    )


def _check_sp4_family(name, method, verify):
    def checker(spec, triples, bound):
        tally = _Tally(name, bound)
        for inst in _premise_pairs(spec, triples, bound):
            ok = _witness_or(
                tally, spec, inst, lambda: getattr(spec, method)(*inst), lambda w: verify(spec, inst, w)
            )
            if not ok:
                return tally.result
        return tally.result

    return checker


def _verify_sp5(spec, x, y, wit) -> bool:
    bs, ws = wit
    n = len(bs)
    if n < 3 or len(ws) != n:
        return False
    total = bs[0]
    for b in bs[1:]:
        total = total + b
    if total != spec.total:
        return False
    prefix = bs[0]
    for k in range(1, n - 1):
        suffix = spec.total - prefix - bs[k]
        if not spec.member(prefix, bs[k], suffix):
            return False
        prefix = prefix + bs[k]
    for b, w in zip(bs, ws):
        if b + w != x or w + y != spec.total - b or not spec.member(b, w, y):
            return False
    return True


def _check_sp5(spec, triples, bound):
    tally = _Tally("Sp5", bound)
    pairs = list(spec.enumerate_pairs()) if spec.finite else spec.pairs(bound)
    for x, y in pairs:
        ok = _witness_or(
            tally,
            spec,
            (x, y),
            lambda: spec.sp5_witness(x, y, search=bound),
            lambda w: _verify_sp5(spec, x, y, w),
        )
        if not ok:
            return tally.result
    return tally.result


_CHECKERS = {
    "Sp0": _check_sp0,
    "Sp1": _check_sp1,
    "Sp2": _check_sp2,
    "Sp3": _check_sp3,
    "Sp4a": _check_sp4a,
    "Sp4b": _check_sp4_family("Sp4b", "sp4b_witness", _verify_sp4b),
    "Sp4": _check_sp4_family("Sp4", "sp4_witness", _verify_sp4),
    "Sp5": _check_sp5,
}


def witness_sp(kind: str, spec: Spectrum, instance: Sequence[Element], search: int | None = None):
    """Witnesses for one instance of an existential axiom, after checking its premise."""
    if kind == "Sp4a":
        a, b, c = instance
        if not spec.member(a, b, c):
            raise PremiseViolated("the triple is not in the spectrum")
        wit = spec.refine_pair(b + c, a, search=search)
        return (wit[0], wit[1], b + c)
    if kind in ("Sp4b", "Sp4"):
        a, b, p, q, r = instance
        zero = spec.system.zero_element
        ok = a + b == p + q and (
            (spec.member(a, b, r) and spec.member(p, q, r))
            or (r == zero and spec.pair_member(a, b) and spec.pair_member(p, q))
        )
        if not ok:
            raise PremiseViolated("premise of the four-element split fails")
        if kind == "Sp4b":
            wit = spec.sp4b_witness(a, b, p, q, r, search=search)
            if not _verify_sp4b(spec, instance, wit):
                raise NoWitnessUpToBound("produced witness does not verify")
        else:
            wit = spec.sp4_witness(a, b, p, q, r, search=search)
            if not _verify_sp4(spec, instance, wit):
                raise NoWitnessUpToBound("produced witness does not verify")
        return wit
    if kind == "Sp5":
        x, y = instance
        if not spec.pair_member(x, y):
            raise PremiseViolated("the pair is not in the pair spectrum")
        wit = spec.sp5_witness(x, y, search=search)
        if not _verify_sp5(spec, x, y, wit):
            raise NoWitnessUpToBound("produced witness does not verify")
        return wit
    raise ValueError(f"unknown axiom {kind!r}")


def member(spec: Spectrum, t: Sequence[Element]) -> bool:
    return spec.member(*t)


def delta_member(spec: Spectrum, t: Sequence[Element]) -> bool:
    """Whether ``t`` is the value tuple of some ordered partition into ``len(t)`` parts."""
    n = len(t)
    if n < 1:
        raise ValueError("tuple must be nonempty")
    _check_system(spec.system, t)
    if n == 1:
        return t[0] == spec.total
    if n == 2:
        return spec.pair_member(t[0], t[1])
    if n == 3:
        return spec.member(*t)
    prefix = t[0]
    total = t[0]
    for x in t[1:]:
        total = total + x
    if total != spec.total:
        return False
    for k in range(1, n - 1):
        suffix = total - prefix - t[k]
        if not spec.member(prefix, t[k], suffix):
            return False
        prefix = prefix + t[k]
    return True


# ---------------------------------------------------------------------------
# Binary spectra
# ---------------------------------------------------------------------------


class Homspec2:
    """A pair ``(E, L)`` with ``L`` a set of pairs, given by a predicate or a finite set."""

    def __init__(
        self,
        system: System,
        e: Element,
        pairs: Iterable[tuple[Element, Element]] | None = None,
        predicate: Callable[[Element, Element], bool] | None = None,
        prime: Callable[[Element], bool] | None = None,
        enumerator: Callable[[], Iterator[tuple[Element, Element]]] | None = None,
    ):
        self.system = system
        self.e = e
        if pairs is not None:
            self.finite_pairs: frozenset | None = frozenset(tuple(p) for p in pairs)
        else:
            self.finite_pairs = None
        self._predicate = predicate
        self._prime = prime
        self._enumerator = enumerator

    @property
    def finite(self) -> bool:
        return self.finite_pairs is not None

    def member(self, a: Element, b: Element) -> bool:
        if self.finite_pairs is not None:
            return (a, b) in self.finite_pairs
        return bool(self._predicate(a, b))

    def prime_member(self, a: Element) -> bool:
        if self.finite_pairs is not None:
            return any(p[0] == a for p in self.finite_pairs)
        if self._prime is not None:
            return self._prime(a)
        return any(self.member(a, b) for b in itertools.islice(self.system.elements(), DEFAULT_SEARCH))

    def prime(self) -> list[Element]:
        if self.finite_pairs is None:
            raise ValueError("the first-coordinate set is only listed for finite pair sets")
        return sorted({p[0] for p in self.finite_pairs}, key=Element.sort_key)

    def enumerate(self) -> Iterator[tuple[Element, Element]]:
        if self.finite_pairs is not None:
            return iter(sorted(self.finite_pairs, key=_triple_key))
        if self._enumerator is not None:
            return self._enumerator()
        return (
            (a, b)
            for a, b in fair_product([self.system.elements(), self.system.elements()])
            if self.member(a, b)
        )

    def key(self):
        if self.finite_pairs is None:
            raise ValueError("only finite binary spectra have a key")
        return (self.e.sort_key(), tuple(sorted(_triple_key(p) for p in self.finite_pairs)))

    def to_json(self) -> dict:
        out = {"system": self.system.to_json(), "e": self.e.to_json()}
        if self.finite_pairs is not None:
            out["pairs"] = [[a.to_json(), b.to_json()] for a, b in self.enumerate()]
        return out

    def __repr__(self):
        if self.finite_pairs is not None:
            body = "{" + ", ".join(f"({a!r},{b!r})" for a, b in self.enumerate()) + "}"
        else:
            body = "<predicate>"
        return f"Homspec2({self.e!r}, {body})"


def h3_to_h2(spec: Spectrum) -> Homspec2:
    if spec.finite:
        return Homspec2(spec.system, spec.total, pairs={(a, b) for a, b, _ in spec.enumerate_triples()})
    return Homspec2(
        spec.system,
        spec.total,
        predicate=lambda a, b: spec.member(a, b, spec.total - a - b),
        prime=spec.first_member,
        enumerator=lambda: ((a, b) for a, b, _ in spec.enumerate_triples()),
    )


def h2_to_h3(h2: Homspec2) -> Spectrum:
    if h2.finite:
        return Fragment(h2.system, frozenset((a, b, h2.e - a - b) for a, b in h2.finite_pairs))
    return FromHomspec2(h2)


def check_h2(h2: Homspec2, solid: bool = False) -> dict[str, bool]:
    """Exact check of the binary-spectrum axioms on a finite pair set."""
    if not h2.finite:
        raise ValueError("exact binary checks need a finite pair set")
    lam = h2.finite_pairs
    e = h2.e
    zero = h2.system.zero_element
    prime = set(h2.prime())
    elements = h2.system.all_elements() if h2.system.is_finite else sorted(
        {x for p in lam for x in p} | {zero}, key=Element.sort_key
    )
    out = {"GrSp0": bool(lam)}
    out["GrSp1"] = all((b, a) in lam and (a, e - a - b) in lam for a, b in lam)
    out["GrSp2"] = all(
        (a, b + c) in lam for a, b in lam for c in elements if (a + b, c) in lam
    )
    out["GrSp3a"] = all(any(x + y == a for x, y in lam) for a, _ in lam)

    right = lam | {(p, zero) for p in prime}
    left = lam | {(zero, p) for p in prime}

    def premises():
        for a, b in lam:
            for c in elements:
                if (c, a + b - c) in lam:
                    yield a, b, c
        for a in prime:
            for c in prime:
                yield a, e - a, c

    def split_ok(a, b, c) -> bool:
        for x in elements:
            s, t = (x, a - x), (c - x, b - c + x)
            if solid:
                if s in lam and t in lam:
                    return True
            elif (s in right and t in left) or (s in left and t in right):
                return True
        return False

    out["GrSp3" if solid else "GrSp3b"] = all(split_ok(a, b, c) for a, b, c in premises())
    return out


def enumerate_h2_small(system: System) -> list[Homspec2]:
    """Every binary spectrum in a group with at most four elements."""
    if not system.is_finite:
        raise TooLarge(f"{system} is infinite")
    elements = system.all_elements()
    if len(elements) > 4:
        raise TooLarge(f"{system} has {len(elements)} elements; at most 4 are supported")
    found: dict = {}
    for e in elements:
        triples = [(a, b, e - a - b) for a in elements for b in elements]
        orbits = []
        seen = set()
        for t in triples:
            if t in seen:
                continue
            orbit = frozenset(itertools.permutations(t))
            seen |= orbit
            orbits.append(orbit)
        for r in range(1, len(orbits) + 1):
            for chosen in itertools.combinations(orbits, r):
                lam = {(a, b) for orbit in chosen for a, b, _ in orbit}
                h2 = Homspec2(system, e, pairs=lam)
                if all(check_h2(h2).values()):
                    found[h2.key()] = h2
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------------------
# Pospecs
# ---------------------------------------------------------------------------


def _val(x: Any, system: System) -> Element:
    return system.zero_element if x is EMPTY else x


class Pospec:
    """A partially ordered set ``{EMPTY, omega} | I`` inside a group."""

    linear = False

    def __init__(
        self,
        system: System,
        omega: Element,
        interior: Callable[[Element], bool],
        precedes: Callable[[Any, Any], bool],
        enumerator: Callable[[], Iterator[Element]] | None = None,
    ):
        self.system = system
        self.omega = omega
        self._interior = interior
        self._precedes = precedes
        self._enumerator = enumerator

    def interior(self, x: Any) -> bool:
        return x is not EMPTY and x != self.omega and bool(self._interior(x))

    def in_j(self, x: Any) -> bool:
        return x is EMPTY or x == self.omega or self.interior(x)

    def precedes(self, a: Any, b: Any) -> bool:
        if a is b or (a is not EMPTY and b is not EMPTY and a == b):
            return False
        if b is EMPTY or (a is not EMPTY and a == self.omega):
            return False
        if a is EMPTY or b == self.omega:
            return True
        return bool(self._precedes(a, b))

    def enumerate_interior(self) -> Iterator[Element]:
        if self._enumerator is not None:
            return self._enumerator()
        return (x for x in self.system.elements() if self.interior(x))

    def enumerate_j(self) -> Iterator[Any]:
        yield EMPTY
        yield self.omega
        yield from self.enumerate_interior()

    def sub(self, b: Any, a: Any) -> Element:
        return _val(b, self.system) - _val(a, self.system)

    def add(self, a: Any, b: Any) -> Element:
        return _val(a, self.system) + _val(b, self.system)

    def as_good(self) -> Good | None:
        return None

    def to_json(self) -> dict:
        raise ValueError("only linear pospecs have a JSON form")


class LinearPospec(Pospec):
    """The interval ``0 < g < omega`` of a lexicographically ordered group."""

    linear = True

    def __init__(self, system: System, omega: Element):
        system, omega = _lex_view(system, omega)
        if not system.is_ordered:
            raise NotOrdered(f"{system} carries no order")
        zero = system.zero_element
        enumerator = None
        if isinstance(system, IntLex) and system.d == 1:
            # The interval is finite; filtering all of Z would never terminate.
            top = omega.value[0]
            enumerator = lambda: (system.wrap((k,)) for k in range(1, max(top, 1)))  # noqa: E731
        super().__init__(
            system,
            omega,
            interior=lambda x: zero < x < omega,
            precedes=lambda a, b: a < b,
            enumerator=enumerator,
        )
        # Lex systems compare raw tuples lexicographically, which is the order itself.
        self._zero_raw = system.zero()

    def precedes(self, a, b):
        if a is EMPTY and b is EMPTY:
            return False
        zero = self._zero_raw
        x = zero if a is EMPTY else a.value
        y = zero if b is EMPTY else b.value
        return x < y

    def as_good(self) -> Good | None:
        return Good(self.system, self.omega) if self.system.is_densely_ordered else None

    def to_json(self):
        return {"kind": "linear", "system": self.system.to_json(), "omega": self.omega.to_json()}

    def __repr__(self):
        return f"LinearPospec({self.system}, {self.omega!r})"


def _lex_view(system: System, omega: Element) -> tuple[System, Element]:
    """Read the natural order of a one-dimensional vector group as its lex order."""
    if isinstance(system, IntVector) and system.d == 1:
        target: System = IntLex(1)
    elif isinstance(system, RatVector) and system.d == 1:
        target = RatLex(1)
    else:
        return system, omega
    return target, Element(target, omega.value)


def pospec_to_h2(p: Pospec) -> Homspec2:
    def lam(a, b):
        s = a + b
        return p.interior(a) and p.interior(b) and p.interior(s) and p.precedes(a, s)

    def enum():
        return (
            (a, b)
            for a, b in fair_product([p.enumerate_interior(), p.enumerate_interior()])
            if lam(a, b)
        )

    return Homspec2(p.system, p.omega, predicate=lam, prime=p.interior, enumerator=enum)


def h2_to_pospec(h2: Homspec2) -> Pospec:
    zero = h2.system.zero_element
    if h2.prime_member(zero):
        raise ZeroInLambdaPrime("0 occurs as a first coordinate")
    return Pospec(
        h2.system,
        h2.e,
        interior=h2.prime_member,
        precedes=lambda a, b: h2.member(a, b - a),
        enumerator=(lambda: iter(h2.prime())) if h2.finite else None,
    )


def _chain_ok(p: Pospec, chain: Sequence[Any], x: Element) -> bool:
    if chain[0] is not EMPTY or chain[-1] != p.omega:
        return False
    for lo, hi in zip(chain, chain[1:]):
        if not p.precedes(lo, hi):
            return False
        if not p.precedes(p.sub(hi, lo), x):
            return False
    return True


def pospec5_chain(p: Pospec, x: Element, bound: int) -> list[Any] | None:
    """Search a chain from EMPTY to omega with steps below ``x``, of length at most ``bound``."""
    system = p.system
    for n in range(1, bound + 1):
        try:
            step = div_exact(p.omega, n)
        except Exception:
            continue
        chain = [EMPTY] + [step * k for k in range(1, n)] + [p.omega]
        if _chain_ok(p, chain, x):
            return chain
    if system.is_densely_ordered:
        step = x
        for _ in range(bound):
            step = between(system.zero_element, step)
            chain: list[Any] = [EMPTY]
            current = system.zero_element
            while len(chain) <= bound and current + step < p.omega:
                current = current + step
                chain.append(current)
            chain.append(p.omega)
            if len(chain) - 1 <= bound and _chain_ok(p, chain, x):
                return chain
    return None


def _pospec_tuples(p: Pospec, k: int, limit: int) -> Iterator[tuple]:
    cache: list[Any] = []
    source = p.enumerate_j()
    exhausted = False
    for idx in index_tuples(k):
        top = max(idx) if idx else 0
        while len(cache) <= top and not exhausted:
            try:
                cache.append(next(source))
            except StopIteration:
                exhausted = True
        if top >= len(cache):
            # Tuples come ordered by their maximum, so none of the rest fit either.
            return
        yield tuple(cache[i] for i in idx)
        limit -= 1
        if limit <= 0:
            return


def check_pospec(
    p: Pospec,
    bound: int = 100,
    supersolid: bool = False,
    probes: Sequence[Element] | None = None,
    chain_bound: int | None = None,
) -> AxiomReport:
    """Check a pospec; linear ones use the least-element criterion."""
    results: list[AxiomResult] = []
    scan = bound * bound
    results.append(_posp0(p, scan, bound))
    results.append(_posp1(p, scan, bound))
    if not p.linear:
        results.append(_posp2(p, scan * bound, bound))
    results.append(_posp3(p, scan * bound, bound))
    if p.linear:
        results.append(_no_least(p, bound))
    else:
        results.append(_posp4(p, scan * bound, bound))
    if supersolid:
        chain_bound = chain_bound or bound
        tally = _Tally("PoSp5", chain_bound)
        points = list(probes) if probes is not None else list(itertools.islice(p.enumerate_interior(), 10))
        for x in points:
            chain = pospec5_chain(p, x, chain_bound)
            if chain is None:
                tally.unresolved(f"no chain below {x!r} with at most {chain_bound} steps")
                tally.result.counterexample = (x,)
            else:
                tally.witness((x, chain))
        results.append(tally.result)
    return AxiomReport(results)


def _posp0(p, limit, bound):
    tally = _Tally("PoSp0", bound)
    if not p.precedes(EMPTY, p.omega):
        return tally.fail((EMPTY, p.omega), "EMPTY does not precede omega")
    for (x,) in _pospec_tuples(p, 1, limit):
        if p.interior(x) and not (p.precedes(EMPTY, x) and p.precedes(x, p.omega)):
            return tally.fail((x,), "not between the extremes")
        tally.witness()
    return tally.result


def _posp1(p, limit, bound):
    tally = _Tally("PoSp1", bound)
    for a, b in _pospec_tuples(p, 2, limit):
        if p.precedes(a, b) and not (a is EMPTY and b == p.omega):
            if not p.interior(p.sub(b, a)):
                return tally.fail((a, b), "difference leaves the interior")
            tally.witness()
    return tally.result


def _posp2(p, limit, bound):
    tally = _Tally("PoSp2", bound)
    for a, b, c in _pospec_tuples(p, 3, limit):
        if p.precedes(a, b) and p.precedes(b, c):
            cb, ca, ba = p.sub(c, b), p.sub(c, a), p.sub(b, a)
            if not (p.precedes(cb, ca) and p.precedes(ba, ca)):
                return tally.fail((a, b, c), "differences out of order")
            tally.witness()
    return tally.result


def _posp3(p, limit, bound):
    tally = _Tally("PoSp3", bound)
    for a, b, c in _pospec_tuples(p, 3, limit):
        if b is EMPTY or not p.precedes(a, c):
            continue
        ca = p.sub(c, a)
        if not p.precedes(b, ca):
            continue
        s = p.add(a, b)
        if not (p.interior(s) and p.precedes(a, s) and p.precedes(s, c)):
            return tally.fail((a, b, c), "a+b misplaced")
        tally.witness()
    return tally.result


def _posp4(p, limit, bound):
    tally = _Tally("PoSp4", bound)
    cands = list(itertools.islice(p.enumerate_interior(), bound))
    for a, b, c in _pospec_tuples(p, 3, limit):
        if not (p.precedes(EMPTY, a) and p.precedes(a, c) and p.precedes(EMPTY, b) and p.precedes(b, c)):
            continue
        cb = p.sub(c, b)
        hit = next(
            (x for x in cands if p.precedes(x, a) and p.precedes(x, b) and p.precedes(p.sub(a, x), cb)), None
        )
        if hit is None:
            tally.unresolved(f"no common lower element found for {(a, b, c)!r}")
        else:
            tally.witness()
    return tally.result


def _no_least(p: Pospec, bound: int) -> AxiomResult:
    tally = _Tally("NoLeast", bound)
    system = p.system
    zero = system.zero_element
    if isinstance(system, IntLex):
        eps = system.wrap((0,) * (system.d - 1) + (1,))
        if p.interior(eps):
            return tally.fail((eps,), "the interior has a least element")
        return tally.result
    for x in itertools.islice(p.enumerate_interior(), bound):
        if system.is_densely_ordered:
            y = between(zero, x)
            if not p.interior(y):
                return tally.fail((x,), "no smaller interior element found")
            tally.witness((x, y))
        else:
            tally.unresolved("no descent rule for this order")
    return tally.result


# ---------------------------------------------------------------------------
# Zero-valued spectra
# ---------------------------------------------------------------------------


@dataclass
class ZeroClassification:
    generators: list[Element]
    finite_elements: list[Element] | None
    verified: int

    def to_json(self):
        out = {"generators": [g.to_json() for g in self.generators], "verified": self.verified}
        if self.finite_elements is not None:
            out["elements"] = [g.to_json() for g in self.finite_elements]
        return out


def _span(system: System, gens: Sequence[Element]) -> set[Element]:
    zero = system.zero_element
    out = {zero}
    frontier = [zero]
    while frontier:
        x = frontier.pop()
        for g in gens:
            for y in (x + g, x - g):
                if y not in out:
                    out.add(y)
                    frontier.append(y)
    return out


def classify_zero(spec: Spectrum, bound: int = 100) -> ZeroClassification | None:
    """Describe the subgroup behind a spectrum containing the zero triple, else None."""
    system = spec.system
    zero = system.zero_element
    if not spec.member(zero, zero, zero):
        return None
    firsts = sorted({a for a, _ in itertools.islice(spec.enumerate_pairs(), bound)} - {zero}, key=Element.sort_key)
    finite_elements = None
    if system.is_finite:
        gens: list[Element] = []
        span = {zero}
        for a in firsts:
            if a not in span:
                gens.append(a)
                span = _span(system, gens)
        finite_elements = sorted(span, key=Element.sort_key)
    elif isinstance(system, (IntVector, IntLex)) and system.d == 1:
        g = 0
        for a in firsts:
            g = math.gcd(g, a.value[0])
        gens = [system.wrap((g,))] if g else []
    else:
        gens = firsts
    verified = 0
    in_group = (lambda x: x in set(finite_elements)) if finite_elements is not None else None
    if in_group is None and isinstance(system, (IntVector, IntLex)) and system.d == 1:
        g = gens[0].value[0] if gens else 0
        in_group = (lambda x: x.value[0] % g == 0) if g else (lambda x: x.is_zero)
    if in_group is not None:
        pool = list(itertools.islice(system.elements(), max(4, int(math.isqrt(bound)) + 1)))
        for x, y in itertools.product(pool, pool):
            z = zero - x - y
            expected = in_group(x) and in_group(y)
            if spec.member(x, y, z) != expected:
                raise PremiseViolated(f"membership disagrees with the subgroup rule at {(x, y, z)!r}")
            verified += 1
    return ZeroClassification(gens, finite_elements, verified)


def project_spectrum(spec: Spectrum, s: int) -> Spectrum:
    if not isinstance(spec, SkewProduct):
        raise BadIndex("only product spectra have coordinates")
    return spec.project(s)


# ---------------------------------------------------------------------------
# JSON constructor trees
# ---------------------------------------------------------------------------


def build(desc: dict) -> Spectrum:
    """Build a handle from a JSON constructor tree."""
    ctor = desc.get("ctor")
    if ctor == "Full":
        system = parse_system(desc["system"])
        return Full(system, load_element(system, desc["e"]))
    if ctor == "Good":
        system = parse_system(desc["system"])
        return Good(system, load_element(system, desc["omega"]))
    if ctor == "Fragment":
        system = parse_system(desc["system"])
        return Fragment.of(system, [[load_element(system, x) for x in t] for t in desc["triples"]])
    if ctor == "SkewProduct":
        return SkewProduct([build(f) for f in desc["factors"]], null_tail=bool(desc.get("null_tail", False)))
    if ctor == "SkewPower":
        return SkewPower(build(desc["base"]), int(desc["length"]))
    if ctor == "Restriction":
        base = build(desc["base"])
        return Restriction(base, load_element(base.system, desc["m_j"]), load_element(base.system, desc["d"]))
    if ctor == "FromPospec":
        return FromPospec(build_pospec(desc["pospec"]))
    if ctor == "FromHomspec2":
        return h2_to_h3(build_h2(desc["homspec2"]))
    raise UnknownSystem(f"unknown constructor {ctor!r}")


def build_pospec(desc: dict) -> Pospec:
    if desc.get("kind", "linear") != "linear":
        raise UnknownSystem("only linear pospecs are read from JSON")
    system = parse_system(desc["system"])
    return LinearPospec(system, load_element(system, desc["omega"]))


def build_h2(desc: dict) -> Homspec2:
    system = parse_system(desc["system"])
    pairs = [(load_element(system, a), load_element(system, b)) for a, b in desc["pairs"]]
    return Homspec2(system, load_element(system, desc["e"]), pairs=pairs)
