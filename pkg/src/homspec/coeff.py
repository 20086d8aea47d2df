"""Exact coefficient groups in which measures take their values.

Every system is an abelian group.  Values are kept in a raw form (tuples of
``int`` or :class:`~fractions.Fraction`, a residue, or a tuple of factor
values for products) and wrapped in :class:`Element`, which carries its system
so that mixing systems is caught early.  The distinguished sentinel
:data:`EMPTY` is a neutral element that belongs to no system; it is used for
empty matrix entries and empty sums.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Iterable, Iterator, Sequence

from .errors import (
    EmptyInterval,
    NotAGroup,
    NotDivisible,
    NotOrdered,
    NotUnique,
    SystemMismatch,
    UnknownSystem,
)

__all__ = [
    "System",
    "IntVector",
    "RatVector",
    "ModInt",
    "RatMod1",
    "RatLex",
    "IntLex",
    "Product",
    "Element",
    "EMPTY",
    "Empty",
    "arith",
    "opt_sum",
    "between",
    "div_exact",
    "divisions",
    "parse_system",
    "parse_fraction",
]


def parse_fraction(token: Any) -> Fraction:
    """Read ``3``, ``"3"``, ``"-2/5"`` or a Fraction exactly (no floats)."""
    if isinstance(token, bool):
        raise ValueError("booleans are not numbers")
    if isinstance(token, (int, Fraction)):
        return Fraction(token)
    if isinstance(token, str):
        return Fraction(token.strip())
    raise ValueError(f"cannot read an exact number from {token!r}")


def _dump_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _int_of_size(t: int) -> list[int]:
    return [0] if t == 1 else [t - 1, -(t - 1)]


def _rat_of_size(t: int) -> list[Fraction]:
    if t == 1:
        return [Fraction(0)]
    out = []
    for q in range(1, t):
        p = t - q
        if math.gcd(p, q) == 1:
            out.extend([Fraction(p, q), Fraction(-p, q)])
    return out


class Empty:
    """The empty symbol: neutral for addition and a member of no system."""

    _instance: "Empty | None" = None

    def __new__(cls) -> "Empty":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __add__(self, other: Any) -> Any:
        return other

    __radd__ = __add__

    def __repr__(self) -> str:
        return "EMPTY"

    def __reduce__(self):
        return (Empty, ())


EMPTY = Empty()


class System:
    """Base class of the built-in coefficient groups."""

    kind: str = "?"
    is_group = True
    is_ordered = False
    is_densely_ordered = False
    is_divisible = False

    # Raw arithmetic --------------------------------------------------------
    def zero(self) -> Any:
        raise NotImplementedError

    def add(self, x: Any, y: Any) -> Any:
        raise NotImplementedError

    def neg(self, x: Any) -> Any:
        raise NotImplementedError

    def sub(self, x: Any, y: Any) -> Any:
        return self.add(x, self.neg(y))

    def mul_int(self, n: int, x: Any) -> Any:
        if n < 0:
            return self.mul_int(-n, self.neg(x))
        out, base = self.zero(), x
        while n:
            if n & 1:
                out = self.add(out, base)
            base = self.add(base, base)
            n >>= 1
        return out

    def canon(self, raw: Any) -> Any:
        raise NotImplementedError

    def raw_divisions(self, x: Any, n: int) -> list[Any]:
        raise NotImplementedError

    def raw_lt(self, x: Any, y: Any) -> bool:
        raise NotOrdered(f"{self} carries no order")

    # Enumeration by canonical size ----------------------------------------
    min_size = 1
    max_size: int | None = None

    def values_of_size(self, t: int) -> list[Any]:
        raise NotImplementedError

    def raw_size(self, x: Any) -> int:
        raise NotImplementedError

    def iter_values(self) -> Iterator[Any]:
        t = self.min_size
        while self.max_size is None or t <= self.max_size:
            yield from self.values_of_size(t)
            t += 1

    @property
    def is_finite(self) -> bool:
        return self.max_size is not None

    # JSON -------------------------------------------------------------------
    def to_json(self) -> dict:
        raise NotImplementedError

    def dump(self, raw: Any) -> Any:
        raise NotImplementedError

    def load(self, data: Any) -> Any:
        raise NotImplementedError

    # Element helpers ---------------------------------------------------------
    def __call__(self, *coords: Any) -> "Element":
        """Build an element from plain coordinates, e.g. ``RatVector(2)(1, "1/2")``."""
        if len(coords) == 1 and isinstance(coords[0], (list, tuple)):
            return Element(self, self.load(list(coords[0])))
        return Element(self, self.load(list(coords)))

    def wrap(self, raw: Any) -> "Element":
        return Element(self, self.canon(raw))

    @property
    def zero_element(self) -> "Element":
        return Element(self, self.zero())

    def elements(self) -> Iterator["Element"]:
        for raw in self.iter_values():
            yield Element(self, raw)

    def all_elements(self) -> list["Element"]:
        if not self.is_finite:
            raise ValueError(f"{self} is infinite")
        return list(self.elements())

    # Ring structure used by the product-formula joint target ---------------
    def ring_mul(self, x: Any, y: Any) -> Any:
        raise NotAGroup(f"{self} has no ring multiplication")

    def ring_inverse(self, x: Any) -> Any | None:
        raise NotAGroup(f"{self} has no ring multiplication")


@dataclass(frozen=True)
class _Vector(System):
    d: int

    integral = False

    def zero(self):
        return (0,) * self.d if self.integral else (Fraction(0),) * self.d

    def add(self, x, y):
        return tuple(a + b for a, b in zip(x, y))

    def neg(self, x):
        return tuple(-a for a in x)

    def mul_int(self, n, x):
        return tuple(n * a for a in x)

    def canon(self, raw):
        if len(raw) != self.d:
            raise SystemMismatch(f"{self} expects {self.d} coordinates, got {len(raw)}")
        if self.integral:
            out = []
            for a in raw:
                f = parse_fraction(a)
                if f.denominator != 1:
                    raise ValueError(f"{self} needs integer coordinates, got {a!r}")
                out.append(int(f))
            return tuple(out)
        return tuple(parse_fraction(a) for a in raw)

    def raw_divisions(self, x, n):
        if self.integral:
            if any(a % n for a in x):
                return []
            return [tuple(a // n for a in x)]
        return [tuple(a / n for a in x)]

    @property
    def min_size(self):
        return self.d

    def values_of_size(self, t):
        return list(_vector_values(self.integral, self.d, t))

    def raw_size(self, x):
        if self.integral:
            return sum(abs(a) + 1 for a in x)
        return sum(abs(a.numerator) + a.denominator for a in x)

    def to_json(self):
        return {"kind": self.kind, "d": self.d}

    def dump(self, raw):
        return list(raw) if self.integral else [_dump_fraction(a) for a in raw]

    def load(self, data):
        if not isinstance(data, (list, tuple)):
            data = [data]
        return self.canon(tuple(data))

    def ring_mul(self, x, y):
        return tuple(a * b for a, b in zip(x, y))

    def ring_inverse(self, x):
        if self.integral:
            return tuple(x) if all(a in (1, -1) for a in x) else None
        if any(a == 0 for a in x):
            return None
        return tuple(1 / a for a in x)

    def __repr__(self):
        return f"{self.kind}({self.d})"


@lru_cache(maxsize=None)
def _vector_values(integral: bool, d: int, t: int) -> tuple:
    coord = _int_of_size if integral else _rat_of_size
    if d == 1:
        return tuple((v,) for v in coord(t))
    out = []
    for first in range(1, t - d + 2):
        heads = coord(first)
        tails = _vector_values(integral, d - 1, t - first)
        out.extend((h,) + tail for h in heads for tail in tails)
    return tuple(out)


@dataclass(frozen=True, repr=False)
class IntVector(_Vector):
    kind = "IntVector"
    integral = True


@dataclass(frozen=True, repr=False)
class RatVector(_Vector):
    kind = "RatVector"
    is_divisible = True


@dataclass(frozen=True, repr=False)
class IntLex(_Vector):
    kind = "IntLex"
    integral = True
    is_ordered = True

    def raw_lt(self, x, y):
        return x < y


@dataclass(frozen=True, repr=False)
class RatLex(_Vector):
    kind = "RatLex"
    is_ordered = True
    is_densely_ordered = True
    is_divisible = True

    def raw_lt(self, x, y):
        return x < y


@dataclass(frozen=True)
class ModInt(System):
    m: int
    kind = "ModInt"

    def __post_init__(self):
        if self.m < 1:
            raise UnknownSystem("modulus must be positive")

    def zero(self):
        return 0

    def add(self, x, y):
        return (x + y) % self.m

    def neg(self, x):
        return (-x) % self.m

    def mul_int(self, n, x):
        return (n * x) % self.m

    def canon(self, raw):
        f = parse_fraction(raw)
        if f.denominator != 1:
            raise ValueError("residues must be integers")
        return int(f) % self.m

    def raw_divisions(self, x, n):
        return [y for y in range(self.m) if (n * y - x) % self.m == 0]

    @property
    def max_size(self):
        return self.m

    def values_of_size(self, t):
        return [t - 1] if 1 <= t <= self.m else []

    def raw_size(self, x):
        return x + 1

    def to_json(self):
        return {"kind": "ModInt", "m": self.m}

    def dump(self, raw):
        return [raw]

    def load(self, data):
        if isinstance(data, (list, tuple)):
            if len(data) != 1:
                raise SystemMismatch("ModInt elements have one coordinate")
            data = data[0]
        return self.canon(data)

    def ring_mul(self, x, y):
        return (x * y) % self.m

    def ring_inverse(self, x):
        try:
            return pow(x, -1, self.m) if self.m > 1 else 0
        except ValueError:
            return None

    def __repr__(self):
        return f"ModInt({self.m})"


@dataclass(frozen=True)
class RatMod1(System):
    kind = "RatMod1"
    is_divisible = True

    def zero(self):
        return Fraction(0)

    def add(self, x, y):
        return (x + y) % 1

    def neg(self, x):
        return (-x) % 1

    def mul_int(self, n, x):
        return (n * x) % 1

    def canon(self, raw):
        return parse_fraction(raw) % 1

    def raw_divisions(self, x, n):
        return [(x + k) / n for k in range(n)]

    def values_of_size(self, t):
        if t == 1:
            return [Fraction(0)]
        return [Fraction(t - q, q) for q in range(2, t) if t - q < q and math.gcd(t - q, q) == 1]

    def raw_size(self, x):
        return x.numerator + x.denominator

    def to_json(self):
        return {"kind": "RatMod1"}

    def dump(self, raw):
        return [_dump_fraction(raw)]

    def load(self, data):
        if isinstance(data, (list, tuple)):
            if len(data) != 1:
                raise SystemMismatch("RatMod1 elements have one coordinate")
            data = data[0]
        return self.canon(data)

    def __repr__(self):
        return "RatMod1"


@dataclass(frozen=True)
class Product(System):
    """Direct product of systems; a value is a tuple of factor values."""

    factors: tuple[System, ...]
    kind = "Product"

    @property
    def is_divisible(self):  # type: ignore[override]
        return all(f.is_divisible for f in self.factors)

    def zero(self):
        return tuple(f.zero() for f in self.factors)

    def add(self, x, y):
        return tuple(f.add(a, b) for f, a, b in zip(self.factors, x, y))

    def neg(self, x):
        return tuple(f.neg(a) for f, a in zip(self.factors, x))

    def mul_int(self, n, x):
        return tuple(f.mul_int(n, a) for f, a in zip(self.factors, x))

    def canon(self, raw):
        if len(raw) != len(self.factors):
            raise SystemMismatch(f"{self} expects {len(self.factors)} components")
        return tuple(f.canon(a) for f, a in zip(self.factors, raw))

    def raw_divisions(self, x, n):
        options = [f.raw_divisions(a, n) for f, a in zip(self.factors, x)]
        return [tuple(c) for c in itertools.product(*options)]

    @property
    def min_size(self):
        return sum(f.min_size for f in self.factors)

    @property
    def max_size(self):
        sizes = [f.max_size for f in self.factors]
        return None if any(s is None for s in sizes) else sum(sizes)

    def values_of_size(self, t):
        return _product_values(self.factors, t)

    def raw_size(self, x):
        return sum(f.raw_size(a) for f, a in zip(self.factors, x))

    def to_json(self):
        return {"kind": "Product", "factors": [f.to_json() for f in self.factors]}

    def dump(self, raw):
        return [f.dump(a) for f, a in zip(self.factors, raw)]

    def load(self, data):
        if len(data) != len(self.factors):
            raise SystemMismatch(f"{self} expects {len(self.factors)} components")
        return tuple(f.load(a) for f, a in zip(self.factors, data))

    def __call__(self, *coords):
        return Element(self, tuple(f.load(c) if not isinstance(c, Element) else c.value
                                   for f, c in zip(self.factors, coords)))

    def __repr__(self):
        return "Product(" + ", ".join(map(repr, self.factors)) + ")"


def _product_values(factors: tuple[System, ...], t: int) -> list:
    if len(factors) == 1:
        return [(v,) for v in factors[0].values_of_size(t)]
    head, rest = factors[0], factors[1:]
    rest_min = sum(f.min_size for f in rest)
    out = []
    top = t - rest_min
    if head.max_size is not None:
        top = min(top, head.max_size)
    for s in range(head.min_size, top + 1):
        heads = head.values_of_size(s)
        if not heads:
            continue
        tails = _product_values(rest, t - s)
        out.extend((h,) + tail for h in heads for tail in tails)
    return out


def parse_system(data: dict) -> System:
    """Rebuild a system from its JSON descriptor."""
    kind = data.get("kind")
    if kind in ("IntVector", "RatVector", "IntLex", "RatLex"):
        cls = {"IntVector": IntVector, "RatVector": RatVector, "IntLex": IntLex, "RatLex": RatLex}[kind]
        return cls(int(data.get("d", 1)))
    if kind == "ModInt":
        return ModInt(int(data["m"]))
    if kind == "RatMod1":
        return RatMod1()
    if kind == "Product":
        return Product(tuple(parse_system(f) for f in data["factors"]))
    raise UnknownSystem(f"unknown system descriptor {data!r}")


class Element:
    """An exact value together with the system it lives in."""

    __slots__ = ("system", "value")

    def __init__(self, system: System, value: Any):
        self.system = system
        self.value = value

    def _check(self, other: "Element") -> None:
        if not isinstance(other, Element):
            raise SystemMismatch(f"cannot combine {self!r} with {other!r}")
        if other.system is not self.system and other.system != self.system:
            raise SystemMismatch(f"{self.system} vs {other.system}")

    def __add__(self, other):
        if other is EMPTY:
            return self
        self._check(other)
        return Element(self.system, self.system.add(self.value, other.value))

    __radd__ = __add__

    def __sub__(self, other):
        if other is EMPTY:
            return self
        self._check(other)
        return Element(self.system, self.system.sub(self.value, other.value))

    def __neg__(self):
        return Element(self.system, self.system.neg(self.value))

    def __mul__(self, n):
        if isinstance(n, bool) or not isinstance(n, (int, Fraction)):
            return NotImplemented
        if isinstance(n, Fraction):
            return self.scale(n)
        return Element(self.system, self.system.mul_int(n, self.value))

    __rmul__ = __mul__

    def scale(self, r: Fraction) -> "Element":
        """Multiply by a rational number when the result is unique."""
        r = Fraction(r)
        base = self.system.mul_int(r.numerator, self.value)
        if r.denominator == 1:
            return Element(self.system, base)
        return div_exact(Element(self.system, base), r.denominator)

    def __eq__(self, other):
        return isinstance(other, Element) and self.system == other.system and self.value == other.value

    def __hash__(self):
        return hash((self.system, self.value))

    def __lt__(self, other):
        self._check(other)
        return self.system.raw_lt(self.value, other.value)

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return other < self

    def __ge__(self, other):
        return self == other or other < self

    @property
    def is_zero(self) -> bool:
        return self.value == self.system.zero()

    @property
    def size(self) -> int:
        return self.system.raw_size(self.value)

    def sort_key(self):
        return (self.size, _value_key(self.value))

    def to_json(self):
        return self.system.dump(self.value)

    def __repr__(self):
        dumped = self.system.dump(self.value)
        if isinstance(dumped, list) and len(dumped) == 1 and not isinstance(dumped[0], list):
            dumped = dumped[0]
        return f"<{dumped}>" if not isinstance(dumped, list) else f"<{','.join(map(str, dumped))}>"


def _value_key(v: Any):
    if isinstance(v, tuple):
        return tuple(_value_key(a) for a in v)
    return v


def opt_key(x: Any):
    """Sort key that places EMPTY before every element."""
    return (0,) if x is EMPTY else (1, x.sort_key())


def opt_sum(items: Iterable[Any]) -> Any:
    """Sum of a multiset of elements-or-EMPTY; the empty sum is EMPTY."""
    total: Any = EMPTY
    for x in items:
        total = total + x
    return total


def arith(op: str, *args: Any, system: System | None = None) -> Any:
    """Uniform entry point for ``add``, ``neg`` and ``sum``."""
    if op == "add":
        x, y = args
        return x + y
    if op == "neg":
        (x,) = args
        if not x.system.is_group:
            raise NotAGroup(f"{x.system} is not a group")
        return -x
    if op == "sum":
        (items,) = args
        items = list(items)
        if any(i is EMPTY for i in items) or (not items and system is None):
            return opt_sum(items)
        if not items:
            return system.zero_element
        total = items[0]
        for x in items[1:]:
            total = total + x
        return total
    raise ValueError(f"unknown operation {op!r}")


def between(lo: Element, hi: Element) -> Element:
    """Coordinatewise midpoint, which lies strictly between in lex order."""
    lo._check(hi)
    system = lo.system
    if not system.is_densely_ordered:
        raise NotOrdered(f"{system} is not densely ordered")
    if not lo < hi:
        raise EmptyInterval(f"{lo!r} is not below {hi!r}")
    mid = tuple((a + b) / 2 for a, b in zip(lo.value, hi.value))
    return Element(system, mid)


def divisions(x: Element, n: int) -> list[Element]:
    """All solutions y of n*y = x, in canonical order."""
    if n < 1:
        raise ValueError("n must be positive")
    sols = [Element(x.system, y) for y in x.system.raw_divisions(x.value, n)]
    return sorted(sols, key=Element.sort_key)


def div_exact(x: Element, n: int) -> Element:
    sols = divisions(x, n)
    if not sols:
        raise NotDivisible(f"{x!r} is not divisible by {n} in {x.system}")
    if len(sols) > 1:
        raise NotUnique(f"{x!r}/{n} has {len(sols)} solutions in {x.system}")
    return sols[0]


def load_element(system: System, data: Any) -> Any:
    """Read an element, mapping JSON null to EMPTY."""
    return EMPTY if data is None else Element(system, system.load(data))


def dump_element(x: Any) -> Any:
    return None if x is EMPTY else x.to_json()


def sum_elements(system: System, items: Sequence[Element]) -> Element:
    total = system.zero()
    for x in items:
        total = system.add(total, x.value)
    return Element(system, total)
