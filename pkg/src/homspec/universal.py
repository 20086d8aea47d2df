"""Injective weightings, diagonal measures and exact representation of measures."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Sequence

from .coeff import Element, IntLex, IntVector, Product, RatLex, RatVector, System
from .errors import DomainMismatch, DuplicateVectors, NoRepresentation, UnknownSystem
from .measure import FiniteMeasure

__all__ = [
    "WeightVector",
    "Representation",
    "injective_weights",
    "diagonal_measure",
    "represent_measure",
    "flatten_value",
]


@dataclass(frozen=True)
class WeightVector:
    """Weights ``a_k`` strictly inside ``(3^-k, 2^-k)``; ``normalization`` is their sum."""

    weights: tuple[Fraction, ...]

    @property
    def normalization(self) -> Fraction:
        return sum(self.weights, Fraction(0))

    def box(self, k: int) -> tuple[Fraction, Fraction]:
        return Fraction(1, 3 ** (k + 1)), Fraction(1, 2 ** (k + 1))

    def in_boxes(self) -> bool:
        return all(lo < a < hi for k, a in enumerate(self.weights) for lo, hi in [self.box(k)])

    def apply(self, x: Sequence[Any]) -> Fraction:
        return sum((a * Fraction(c) for a, c in zip(self.weights, x)), Fraction(0))

    def to_json(self) -> dict:
        return {"weights": [str(a) for a in self.weights], "normalization": str(self.normalization)}


def injective_weights(vectors: Sequence[Sequence[Any]]) -> WeightVector:
    """Weights making ``x -> sum a_k x_k`` injective on the given rational vectors.

    Coordinates are fixed left to right.  At step ``k`` each pair whose
    difference has its last non-zero coordinate at ``k`` forbids one value of
    ``a_k``; the weight is the midpoint of the largest remaining gap of its box.
    """
    points = [tuple(Fraction(c) for c in v) for v in vectors]
    if len(set(points)) != len(points):
        raise DuplicateVectors("vectors must be pairwise distinct")
    n = max((len(p) for p in points), default=0)
    if any(len(p) != n for p in points):
        raise ValueError("vectors must share one length")
    diffs = []
    for i, x in enumerate(points):
        for y in points[i + 1 :]:
            d = tuple(a - b for a, b in zip(x, y))
            last = max(k for k, c in enumerate(d) if c != 0)
            diffs.append((last, d))
    weights: list[Fraction] = []
    for k in range(n):
        lo, hi = Fraction(1, 3 ** (k + 1)), Fraction(1, 2 ** (k + 1))
        forbidden = set()
        for last, d in diffs:
            if last == k:
                value = -sum((weights[j] * d[j] for j in range(k)), Fraction(0)) / d[k]
                if lo < value < hi:
                    forbidden.add(value)
        cuts = [lo] + sorted(forbidden) + [hi]
        gaps = [(cuts[i + 1] - cuts[i], -i) for i in range(len(cuts) - 1)]
        _, neg_i = max(gaps)
        i = -neg_i
        weights.append((cuts[i] + cuts[i + 1]) / 2)
    out = WeightVector(tuple(weights))
    images = [out.apply(p) for p in points]
    if len(set(images)) != len(images):
        raise ArithmeticError("weights failed to separate the vectors")
    return out


def diagonal_measure(ms: Sequence[FiniteMeasure]) -> FiniteMeasure:
    """Atomwise tuple of values in the product system; one measure maps to itself."""
    if not ms:
        raise ValueError("at least one measure is required")
    atoms = ms[0].atoms
    for m in ms[1:]:
        if m.atoms != atoms:
            raise DomainMismatch("measures must share their atoms")
    if len(ms) == 1:
        return ms[0]
    system = Product(tuple(m.system for m in ms))
    values = tuple(Element(system, tuple(m.values[i].value for m in ms)) for i in range(len(atoms)))
    return FiniteMeasure(system, atoms, values)


def flatten_value(system: System, raw: Any) -> tuple[Fraction, ...]:
    """Rational coordinates of a value in a torsion-free vector-like system."""
    if isinstance(system, (IntVector, IntLex, RatVector, RatLex)):
        return tuple(Fraction(c) for c in raw)
    if isinstance(system, Product):
        out: tuple[Fraction, ...] = ()
        for f, part in zip(system.factors, raw):
            out += flatten_value(f, part)
        return out
    raise UnknownSystem(f"{system} has no rational coordinates")


def unflatten_value(system: System, coords: Sequence[Fraction]) -> Element:
    def build(s: System, cs: list[Fraction]):
        if isinstance(s, (IntVector, IntLex, RatVector, RatLex)):
            part = cs[: s.d]
            del cs[: s.d]
            if isinstance(s, (IntVector, IntLex)):
                if any(c.denominator != 1 for c in part):
                    raise NoRepresentation("image is not integral")
                return tuple(int(c) for c in part)
            return tuple(part)
        if isinstance(s, Product):
            return tuple(build(f, cs) for f in s.factors)
        raise UnknownSystem(f"{s} has no rational coordinates")

    return system.wrap(build(system, list(coords)))


@dataclass
class Representation:
    """A map on the span of ``m``'s values, stored on an echelon basis."""

    mode: str
    source: System
    target: System
    basis: list[tuple[Fraction, ...]]
    images: list[tuple[Fraction, ...]]
    pivots: list[int]

    def _coefficients_of(self, x: tuple[Fraction, ...]) -> list[Fraction]:
        rest = list(x)
        coeffs = []
        for b, p in zip(self.basis, self.pivots):
            c = rest[p] / b[p]
            if self.mode == "group" and c.denominator != 1:
                raise NoRepresentation("value lies outside the generated group")
            coeffs.append(c)
            rest = [r - c * bb for r, bb in zip(rest, b)]
        if any(rest):
            raise NoRepresentation("value lies outside the span")
        return coeffs

    def apply(self, x: Element) -> Element:
        coeffs = self._coefficients_of(flatten_value(self.source, x.value))
        width = len(self.images[0]) if self.images else len(flatten_value(self.target, self.target.zero()))
        out = [Fraction(0)] * width
        for c, img in zip(coeffs, self.images):
            out = [o + c * i for o, i in zip(out, img)]
        return unflatten_value(self.target, out)

    @property
    def coefficients(self) -> list[tuple[Fraction, ...]]:
        """Matrix rows ``F`` with ``f(x) = F x``, zero on the unit vectors completing the basis."""
        dim = len(flatten_value(self.source, self.source.zero()))
        width = len(flatten_value(self.target, self.target.zero()))
        basis = list(self.basis)
        images = list(self.images)
        pivots = list(self.pivots)
        for k in range(dim):
            if k not in pivots:
                basis.append(tuple(Fraction(int(i == k)) for i in range(dim)))
                images.append(tuple(Fraction(0) for _ in range(width)))
                pivots.append(k)
        # Solve F * B = Images column by column via Gauss-Jordan on B.
        n = len(basis)
        aug = [list(basis[i]) + list(images[i]) for i in range(n)]
        for col in range(dim):
            p = next(i for i in range(col, n) if aug[i][col] != 0)
            aug[col], aug[p] = aug[p], aug[col]
            pv = aug[col][col]
            aug[col] = [x / pv for x in aug[col]]
            for i in range(n):
                if i != col and aug[i][col] != 0:
                    f = aug[i][col]
                    aug[i] = [x - f * y for x, y in zip(aug[i], aug[col])]
        # Row k of aug now holds f(e_k).
        return [tuple(aug[k][dim + t] for k in range(dim)) for t in range(width)]

    @property
    def singleton_family(self) -> bool:
        """True unless ``m`` is the diagonal of two or more measures."""
        return not isinstance(self.source, Product)

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "singleton_family": self.singleton_family,
            "basis": [[str(c) for c in b] for b in self.basis],
            "images": [[str(c) for c in i] for i in self.images],
            "coefficients": [[str(c) for c in row] for row in self.coefficients],
        }


def _reduce_rows(rows: list[tuple[list[Fraction], list[Fraction]]], integral: bool):
    """Echelon form of the value part, applying the same operations to the image part."""
    rows = [(list(a), list(b)) for a, b in rows]
    width = len(rows[0][0]) if rows else 0
    basis, images, pivots = [], [], []
    for col in range(width):
        live = [r for r in rows if r[0][col] != 0]
        if not live:
            continue
        if integral:
            while len([r for r in rows if r[0][col] != 0]) > 1:
                live = sorted((r for r in rows if r[0][col] != 0), key=lambda r: abs(r[0][col]))
                piv = live[0]
                for r in live[1:]:
                    q = r[0][col] // piv[0][col]
                    r[0][:] = [x - q * y for x, y in zip(r[0], piv[0])]
                    r[1][:] = [x - q * y for x, y in zip(r[1], piv[1])]
            piv = next(r for r in rows if r[0][col] != 0)
        else:
            piv = live[0]
            for r in live[1:]:
                q = r[0][col] / piv[0][col]
                r[0][:] = [x - q * y for x, y in zip(r[0], piv[0])]
                r[1][:] = [x - q * y for x, y in zip(r[1], piv[1])]
        rows.remove(piv)
        basis.append(tuple(piv[0]))
        images.append(tuple(piv[1]))
        pivots.append(col)
    for a, b in rows:
        if any(b):
            raise NoRepresentation("a relation among the values of m is not respected")
    return basis, images, pivots


def represent_measure(nu: FiniteMeasure, m: FiniteMeasure, mode: str = "qlinear") -> Representation:
    """Find ``f`` with ``nu(a) = f(m(a))`` on every atom, linear or additive per ``mode``."""
    if mode not in ("qlinear", "group"):
        raise ValueError("mode must be 'qlinear' or 'group'")
    if nu.atoms != m.atoms:
        raise DomainMismatch("measures must share their atoms")
    source_rows = [flatten_value(m.system, v.value) for v in m.values]
    target_rows = [flatten_value(nu.system, v.value) for v in nu.values]
    integral = mode == "group"
    if integral:
        denom = 1
        for r in source_rows:
            for c in r:
                denom = denom * c.denominator // _gcd(denom, c.denominator)
        scaled = [tuple(c * denom for c in r) for r in source_rows]
    else:
        denom = 1
        scaled = source_rows
    basis, images, pivots = _reduce_rows([(list(a), list(b)) for a, b in zip(scaled, target_rows)], integral)
    basis = [tuple(c / denom for c in b) for b in basis]
    rep = Representation(mode, m.system, nu.system, basis, images, pivots)
    for x, y in zip(m.values, nu.values):
        if rep.apply(x) != y:
            raise NoRepresentation("representation failed verification")
    return rep


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a
