"""Finite measures on the clopen algebra and the synthesis of homogeneous ones.

A :class:`FiniteMeasure` assigns one value to each atom of a finite partition
of the Cantor space and extends additively to every join of atoms.  The
extension steps here refine a measure while keeping it compatible with a
spectrum: :func:`split_atoms` cuts atoms in two, :func:`realize_split` carves
any element of the domain into two parts of prescribed values, and
:func:`synthesize` drives both through a fixed schedule.
"""

from __future__ import annotations

import copy
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

from .cantor import ONE, ZERO, Clopen, canonicalize, check_partition, cylinders, join, split
from .coeff import Element, Product, RatLex, System, dump_element, load_element, parse_system, divisions
from .errors import (
    DomainMismatch,
    NoPartition,
    NonUnique,
    NotASpectrum,
    NotInDomain,
    NoWitnessUpToBound,
    PreconditionViolated,
    PremiseViolated,
    SystemMismatch,
)
from .spectrum import Full, Good, Restriction, SkewProduct, Spectrum, delta_member, sp4b_pattern

__all__ = [
    "FiniteMeasure",
    "PartialIso",
    "SynthLog",
    "SynthContext",
    "EquiPartition",
    "FillingReport",
    "IndependenceReport",
    "evaluate",
    "is_compatible",
    "values_compatible",
    "split_atoms",
    "realize_split",
    "synthesize",
    "replay",
    "extend_partial_iso",
    "equi_partition",
    "mu_N",
    "filling_check",
    "make_injective_rational",
    "check_independent",
    "realized_triples",
    "find_three_partition",
    "subset_with_sum",
]

STATE_CAP = 1 << 18
# Smaller cap for opportunistic searches whose failure only costs extra atoms.
SEARCH_CAP = 1 << 12


@dataclass(frozen=True)
class FiniteMeasure:
    """Values on the atoms of a finite partition, kept in canonical atom order."""

    system: System
    atoms: tuple[Clopen, ...]
    values: tuple[Element, ...]

    def __post_init__(self):
        if len(self.atoms) != len(self.values):
            raise ValueError("one value per atom is required")
        for v in self.values:
            if v.system != self.system:
                raise SystemMismatch(f"{v!r} is not in {self.system}")
        order = sorted(range(len(self.atoms)), key=lambda i: self.atoms[i].sort_key())
        if order != list(range(len(self.atoms))):
            object.__setattr__(self, "atoms", tuple(self.atoms[i] for i in order))
            object.__setattr__(self, "values", tuple(self.values[i] for i in order))

    @classmethod
    def build(cls, system: System, table: dict | Iterable[tuple[Any, Any]]) -> "FiniteMeasure":
        """Build from ``{word-or-clopen: value}``; words may be strings or clopens."""
        items = table.items() if isinstance(table, dict) else table
        atoms, values = [], []
        for a, v in items:
            atoms.append(a if isinstance(a, Clopen) else canonicalize([a]))
            values.append(v if isinstance(v, Element) else system(v))
        check_partition(atoms)
        return cls(system, tuple(atoms), tuple(values))

    @property
    def total(self) -> Element:
        return self._sum(range(len(self.atoms)))

    @property
    def depth(self) -> int:
        return max((a.depth for a in self.atoms), default=0)

    def _sum(self, indices: Iterable[int]) -> Element:
        raw = self.system.zero()
        for i in indices:
            raw = self.system.add(raw, self.values[i].value)
        return Element(self.system, raw)

    def atoms_below(self, a: Clopen) -> list[int]:
        """Indices of atoms inside ``a``; raises NotInDomain if ``a`` cuts an atom."""
        inside = []
        for i, atom in enumerate(self.atoms):
            m = atom & a
            if m.is_zero:
                continue
            if m != atom:
                raise NotInDomain(f"{a!r} is not a join of atoms")
            inside.append(i)
        return inside

    def in_domain(self, a: Clopen) -> bool:
        try:
            self.atoms_below(a)
            return True
        except NotInDomain:
            return False

    def evaluate(self, a: Clopen) -> Element:
        return self._sum(self.atoms_below(a))

    def value_of_atom(self, atom: Clopen) -> Element:
        return self.values[self.atoms.index(atom)]

    def refine(self, table: dict[Clopen, Sequence[tuple[Clopen, Element]]]) -> "FiniteMeasure":
        """Replace atoms by the given pieces, checking that values add up."""
        atoms, values = [], []
        for atom, value in zip(self.atoms, self.values):
            if atom not in table:
                atoms.append(atom)
                values.append(value)
                continue
            pieces = table[atom]
            check_partition([p for p, _ in pieces], atom)
            total = self.system.zero_element
            for p, v in pieces:
                total = total + v
                atoms.append(p)
                values.append(v)
            if total != value:
                raise PreconditionViolated(f"pieces of {atom!r} do not add up to its value")
        return FiniteMeasure(self.system, tuple(atoms), tuple(values))

    def coarsen(self, generators: Sequence[Clopen]) -> "FiniteMeasure":
        """Restriction to the subalgebra generated by ``generators``."""
        from .cantor import generated_atoms

        atoms = generated_atoms(generators)
        return FiniteMeasure(self.system, tuple(atoms), tuple(self.evaluate(a) for a in atoms))

    def relabel(self, mapping: dict[Clopen, Clopen]) -> "FiniteMeasure":
        atoms = [mapping.get(a, a) for a in self.atoms]
        check_partition(atoms)
        return FiniteMeasure(self.system, tuple(atoms), self.values)

    def to_json(self) -> dict:
        return {
            "atoms": [list(a.words) if len(a.words) != 1 else a.words[0] for a in self.atoms],
            "values": [v.to_json() for v in self.values],
            "system": self.system.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict) -> "FiniteMeasure":
        system = parse_system(data["system"])
        atoms = [canonicalize([a]) if isinstance(a, str) else canonicalize(a) for a in data["atoms"]]
        values = [load_element(system, v) for v in data["values"]]
        check_partition(atoms)
        return cls(system, tuple(atoms), tuple(values))

    def __repr__(self):
        body = ", ".join(f"{','.join(a.words) or '1'}:{v!r}" for a, v in zip(self.atoms, self.values))
        return f"FiniteMeasure({body})"


def evaluate(mu: FiniteMeasure, a: Clopen) -> Element:
    return mu.evaluate(a)


# ---------------------------------------------------------------------------
# Compatibility
# ---------------------------------------------------------------------------


def _three_partition_sums(values: Sequence[Element], cap: int = STATE_CAP):
    """All ordered sums ``(s1, s2)`` over assignments of values to three nonempty parts."""
    system = values[0].system
    zero = system.zero()
    states = {(zero, zero, 0)}
    for v in values:
        nxt = set()
        for s1, s2, mask in states:
            nxt.add((system.add(s1, v.value), s2, mask | 1))
            nxt.add((s1, system.add(s2, v.value), mask | 2))
            nxt.add((s1, s2, mask | 4))
        if len(nxt) > cap:
            raise OverflowError("too many partial sums")
        states = nxt
    return {(s1, s2) for s1, s2, mask in states if mask == 7}


def values_compatible(values: Sequence[Element], spec: Spectrum) -> bool:
    """Compatibility of a measure given by its atom values."""
    n = len(values)
    for v in values:
        if v.system != spec.system:
            raise SystemMismatch(f"{v!r} is not in {spec.system}")
    total = values[0]
    for v in values[1:]:
        total = total + v
    if n == 1:
        return total == spec.total
    if n == 2:
        return spec.pair_member(values[0], values[1]) and spec.pair_member(values[1], values[0])
    if isinstance(spec, Full):
        return total == spec.total
    if isinstance(spec, Good):
        zero = spec.system.zero_element
        return total == spec.omega and all(zero < v for v in values)
    if isinstance(spec, SkewProduct):
        columns = zip(*(spec._split(v) for v in values))
        return all(values_compatible(list(col), f) for f, col in zip(spec.factors, columns))
    if isinstance(spec, Restriction):
        return total == spec.m_j and values_compatible(list(values) + [spec.d], spec.base)
    if total != spec.total:
        return False
    system = spec.system
    for s1, s2 in _three_partition_sums(values):
        a, b = Element(system, s1), Element(system, s2)
        if not spec.member(a, b, total - a - b):
            return False
    return True


def is_compatible(mu: FiniteMeasure, spec: Spectrum) -> bool:
    if mu.system != spec.system:
        raise SystemMismatch(f"{mu.system} vs {spec.system}")
    return values_compatible(mu.values, spec)


def realized_triples(mu: FiniteMeasure) -> set[tuple[Element, Element, Element]]:
    """Value triples of all ordered 3-partitions of the domain."""
    if len(mu.atoms) < 3:
        return set()
    total = mu.total
    out = set()
    for s1, s2 in _three_partition_sums(mu.values):
        a, b = Element(mu.system, s1), Element(mu.system, s2)
        out.add((a, b, total - a - b))
    return out


def _colourings(mu: FiniteMeasure, indices: Sequence[int]):
    """Map ``(sum1, sum2) -> list of (mask1, mask2, mask3)`` over 3-colourings of ``indices``."""
    system = mu.system
    zero = system.zero()
    out = {}
    for colours in itertools.product(range(3), repeat=len(indices)):
        s = [zero, zero]
        masks = [0, 0, 0]
        for i, c in zip(indices, colours):
            masks[c] |= 1 << i
            if c < 2:
                s[c] = system.add(s[c], mu.values[i].value)
        out.setdefault((s[0], s[1]), []).append(tuple(masks))
    return out


def find_three_partition(mu: FiniteMeasure, triple: Sequence[Element]) -> tuple[Clopen, Clopen, Clopen] | None:
    """An ordered 3-partition of the domain with the given values, by meet in the middle."""
    a, b, c = triple
    if a + b + c != mu.total or len(mu.atoms) < 3:
        return None
    n = len(mu.atoms)
    left, right = list(range(n // 2)), list(range(n // 2, n))
    table = _colourings(mu, left)
    system = mu.system
    for (r1, r2), right_masks in _colourings(mu, right).items():
        key = (system.sub(a.value, r1), system.sub(b.value, r2))
        for lm in table.get(key, ()):
            for rm in right_masks:
                masks = [x | y for x, y in zip(lm, rm)]
                if all(masks):
                    return tuple(_mask_clopen(mu, m) for m in masks)  # type: ignore[return-value]
    return None


def subset_with_sum(
    values: Sequence[Element],
    target: Element,
    proper: bool = True,
    allowed: Sequence[int] | None = None,
    cap: int = STATE_CAP,
) -> int | None:
    """Bitmask of a nonempty (and, if ``proper``, non-full) subset with the given sum."""
    idx = list(range(len(values))) if allowed is None else list(allowed)
    if not idx:
        return None
    system = target.system
    full = 0
    for i in idx:
        full |= 1 << i
    states: dict[Any, list[int]] = {system.zero(): [0]}
    for i in idx:
        v = values[i].value
        nxt = {k: list(m) for k, m in states.items()}
        for s, masks in states.items():
            t = system.add(s, v)
            bucket = nxt.setdefault(t, [])
            for m in masks:
                if len(bucket) >= 3:
                    break
                cand = m | (1 << i)
                if cand not in bucket:
                    bucket.append(cand)
        if len(nxt) > cap:
            return None
        states = nxt
    for m in sorted(states.get(target.value, [])):
        if m != 0 and (not proper or m != full):
            return m
    return None


def _mask_clopen(mu: FiniteMeasure, mask: int) -> Clopen:
    out = ZERO
    for i, a in enumerate(mu.atoms):
        if mask >> i & 1:
            out = out | a
    return out


# ---------------------------------------------------------------------------
# Basic extension steps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitDirective:
    atom: Clopen
    beta: Element
    gamma: Element
    pieces: tuple[Clopen, Clopen] | None = None


def _directive(d: Any) -> SplitDirective:
    if isinstance(d, SplitDirective):
        return d
    if len(d) == 3:
        return SplitDirective(d[0], d[1], d[2])
    return SplitDirective(d[0], d[1], d[2], tuple(d[3]))


def split_atoms(
    mu: FiniteMeasure, spec: Spectrum, directives: Sequence[Any], verify: bool = True
) -> FiniteMeasure:
    """Split atoms in two with prescribed values, keeping compatibility.

    Each directive is ``(atom, beta, gamma)`` or ``(atom, beta, gamma, (b, c))``;
    without explicit pieces the atom is cut by :func:`cantor.split`.  The
    directives are applied one after another, each checked against the
    measure produced so far.  ``verify`` re-checks compatibility at the end.
    """
    current = mu
    for raw in directives:
        d = _directive(raw)
        if d.atom not in current.atoms:
            raise PreconditionViolated(f"{d.atom!r} is not an atom of the domain")
        value = current.value_of_atom(d.atom)
        if d.beta + d.gamma != value:
            raise PreconditionViolated("beta + gamma differs from the value of the atom")
        if len(current.atoms) > 1:
            rest = current.total - value
            if not spec.member(d.beta, d.gamma, rest):
                raise PreconditionViolated("(beta, gamma, value of the complement) is not in the spectrum")
        elif not spec.pair_member(d.beta, d.gamma):
            raise PreconditionViolated("(beta, gamma) is not in the pair spectrum")
        pieces = d.pieces or tuple(split(d.atom, 2))
        if len(pieces) != 2 or any(p.is_zero for p in pieces):
            raise PreconditionViolated("pieces must be two nonzero clopens")
        current = current.refine({d.atom: [(pieces[0], d.beta), (pieces[1], d.gamma)]})
    if verify and not is_compatible(current, spec):
        raise NotASpectrum("a split that satisfies its hypotheses broke compatibility")
    return current


def realize_split(
    mu: FiniteMeasure, spec: Spectrum, w: Clopen, target: tuple[Element, Element]
) -> tuple[FiniteMeasure, Clopen, Clopen]:
    """Extend ``mu`` so that ``w`` is the disjoint union of ``u, v`` with the target values.

    Follows the inductive construction: merge the last two atoms of ``w``,
    recurse, reduce the domain to the coarse atoms plus ``u`` and ``v``, then
    use the four-element-split witness to re-cut the merged atom.
    """
    alpha, beta = target
    if w.is_zero:
        raise PreconditionViolated("w must be nonzero")
    inside = mu.atoms_below(w)
    if alpha + beta != mu.evaluate(w):
        raise PreconditionViolated("alpha + beta differs from the value of w")
    if w.is_one:
        if not spec.pair_member(alpha, beta):
            raise PreconditionViolated("(alpha, beta) is not in the pair spectrum")
    elif not spec.member(alpha, beta, mu.total - mu.evaluate(w)):
        raise PreconditionViolated("(alpha, beta, value of the complement) is not in the spectrum")
    out, u, v = _realize(mu, spec, w, alpha, beta, inside)
    # Each level is compatible in theory; verify once on the final measure.
    if not is_compatible(out, spec):
        raise NotASpectrum("re-cut measure is not compatible")
    return out, u, v


def _realize(mu, spec, w, alpha, beta, inside):
    if len(inside) == 1:
        atom = mu.atoms[inside[0]]
        u, v = split(atom, 2)
        return split_atoms(mu, spec, [(atom, alpha, beta, (u, v))], verify=False), u, v

    last_two = [mu.atoms[i] for i in inside[-2:]]
    a_prev, a_last = last_two
    rho_prev, rho_last = mu.values[inside[-2]], mu.values[inside[-1]]
    merged = a_prev | a_last
    coarse_atoms = [a for a in mu.atoms if a not in last_two] + [merged]
    coarse = mu.coarsen(coarse_atoms)
    coarse_inside = coarse.atoms_below(w)
    deep, u, v = _realize(coarse, spec, w, alpha, beta, coarse_inside)

    # Reduce to the algebra generated by the coarse atoms together with u and v.
    reduced = deep.coarsen(coarse_atoms + [u, v])
    u1, v1 = u & merged, v & merged
    rest_value = mu.total - (rho_prev + rho_last)

    if u1.is_zero or v1.is_zero:
        whole = merged
        out = split_atoms(reduced, spec, [(whole, rho_prev, rho_last, (a_prev, a_last))], verify=False)
        return out, u, v

    p, q = reduced.evaluate(u1), reduced.evaluate(v1)
    try:
        wit = spec.sp4b_witness(rho_prev, rho_last, p, q, rest_value)
    except NoWitnessUpToBound as exc:
        raise NoWitnessUpToBound(f"four-element split witness missing: {exc}") from exc
    x, y, z, uu, vv, ww = wit
    if not (x + z == p and y == q + rest_value and uu + ww == q and vv == p + rest_value
            and rho_prev == x + uu and rho_last == z + ww):
        raise NotASpectrum("four-element split witness violates its equations")
    first, second = (x, y, z), (uu, vv, ww)
    pieces = _choose_pieces(spec, first, second, a_prev, a_last)
    if pieces is None:
        raise NotASpectrum("no admissible placement for the four-element split witness")
    (new_u1, split_u), (new_v1, split_v) = pieces

    relabelled = reduced.relabel({u1: new_u1, v1: new_v1})
    directives = []
    if split_u is not None:
        directives.append((new_u1, first[0], first[2], split_u))
    if split_v is not None:
        directives.append((new_v1, second[0], second[2], split_v))
    out = split_atoms(relabelled, spec, directives, verify=False) if directives else relabelled
    new_u = (u - merged) | new_u1
    new_v = (v - merged) | new_v1
    return out, new_u, new_v


def _choose_pieces(spec, first, second, a_prev, a_last):
    """Place the re-cut halves of the merged atom, preferring fewer splits.

    Returns ``((u_part, cut_or_None), (v_part, cut_or_None))`` where a cut is
    the pair of pieces (inside ``a_prev``, inside ``a_last``) to split into.
    """
    zero = spec.system.zero_element
    x_prev, x_next = split(a_prev, 2)
    y_prev, y_next = split(a_last, 2)

    def types(t, forms):
        out = []
        if spec.member(*t):
            out.append("both")
        if "left" in forms and t[2] == zero and spec.pair_member(t[0], t[1]):
            out.append("left")
        if "right" in forms and t[0] == zero and spec.pair_member(t[1], t[2]):
            out.append("right")
        return out

    layouts = {
        ("both", "both"): ((x_prev | y_prev, (x_prev, y_prev)), (x_next | y_next, (x_next, y_next))),
        ("left", "both"): ((x_prev, None), (x_next | a_last, (x_next, a_last))),
        ("both", "right"): ((a_prev | y_prev, (a_prev, y_prev)), (y_next, None)),
        ("left", "right"): ((a_prev, None), (a_last, None)),
        ("right", "both"): ((y_prev, None), (a_prev | y_next, (a_prev, y_next))),
        ("both", "left"): ((x_prev | a_last, (x_prev, a_last)), (x_next, None)),
        ("right", "left"): ((a_last, None), (a_prev, None)),
    }
    options = []
    for t0 in types(first, ("left", "right")):
        for t1 in types(second, ("left", "right")):
            key = (t0, t1)
            if key not in layouts:
                continue
            direct = t0 in ("both", "left") and t1 in ("both", "right")
            converse = t0 in ("both", "right") and t1 in ("both", "left")
            if not (direct or converse):
                continue
            splits = (t0 == "both") + (t1 == "both")
            options.append((splits, list(layouts).index(key), key))
    if not options:
        return None
    _, _, key = min(options)
    return layouts[key]


# ---------------------------------------------------------------------------
# Synthesis
# ---------------------------------------------------------------------------


@dataclass
class SynthLog:
    """Refinement steps; replaying them from the seed measure reproduces the output."""

    seed: FiniteMeasure
    steps: list[dict] = field(default_factory=list)

    def record(self, step: str, before: FiniteMeasure, after: FiniteMeasure, **info) -> None:
        table = {}
        old = set(before.atoms)
        for atom in before.atoms:
            if atom in after.atoms:
                continue
            pieces = [(a, v) for a, v in zip(after.atoms, after.values) if atom.contains(a)]
            table[",".join(atom.words) or ""] = [[list(a.words), v.to_json()] for a, v in pieces]
        if not table and not info.get("keep_empty"):
            return
        info.pop("keep_empty", None)
        entry = {"step": step, "refine": table}
        entry.update(info)
        self.steps.append(entry)
        del old

    def to_json(self) -> dict:
        return {"seed": self.seed.to_json(), "steps": self.steps}


def replay(log: SynthLog | dict) -> FiniteMeasure:
    """Rebuild a measure from its log without any search."""
    data = log.to_json() if isinstance(log, SynthLog) else log
    mu = FiniteMeasure.from_json(data["seed"])
    system = mu.system
    for entry in data["steps"]:
        table = {}
        for key, pieces in entry["refine"].items():
            atom = canonicalize(key.split(",")) if key else ONE
            table[atom] = [(canonicalize(words), load_element(system, v)) for words, v in pieces]
        mu = mu.refine(table)
    return mu


class SynthContext:
    """A measure under construction together with its spectrum and log."""

    def __init__(self, spec: Spectrum | None, measure: FiniteMeasure, log: SynthLog | None = None):
        self.spec = spec
        self.measure = measure
        self.log = log if log is not None else SynthLog(measure)

    @classmethod
    def seed(cls, spec: Spectrum) -> "SynthContext":
        return cls(spec, FiniteMeasure(spec.system, (ONE,), (spec.total,)))

    def copy(self) -> "SynthContext":
        return SynthContext(self.spec, self.measure, copy.deepcopy(self.log))

    def _commit(self, new: FiniteMeasure, step: str, **info) -> None:
        self.log.record(step, self.measure, new, **info)
        self.measure = new

    def ensure(self, c: Clopen, step: str = "ext1") -> None:
        """Refine the domain until ``c`` is a join of atoms."""
        mu = self.measure
        spec = self._require_spec()
        for atom in list(mu.atoms):
            inner, outer = atom & c, atom - c
            if inner.is_zero or outer.is_zero:
                continue
            value = mu.value_of_atom(atom)
            if len(mu.atoms) == 1:
                pair = next(iter(spec.enumerate_pairs()), None)
                if pair is None:
                    raise NotASpectrum("the pair spectrum is empty")
                beta, gamma = pair
            else:
                try:
                    beta, gamma = spec.refine_pair(mu.total - value, value)
                except (NoWitnessUpToBound, PremiseViolated) as exc:
                    raise NotASpectrum(f"no refinement witness for {atom!r}: {exc}") from exc
            mu = split_atoms(mu, spec, [(atom, beta, gamma, (inner, outer))])
        if mu is not self.measure:
            self._commit(mu, step, clopen=list(c.words))

    def _require_spec(self) -> Spectrum:
        if self.spec is None:
            raise PreconditionViolated("this context has no spectrum to extend with")
        return self.spec

    def carve(self, w: Clopen, alpha: Element, beta: Element, step: str = "carve") -> tuple[Clopen, Clopen]:
        """Realize ``w = u | v`` with values ``(alpha, beta)``, reusing atoms where possible."""
        spec = self._require_spec()
        mu = self.measure
        inside = mu.atoms_below(w)
        found = _carve_existing(mu, inside, alpha)
        if found is not None:
            u = _mask_clopen(mu, found)
            return u, w - u
        cut = _carve_one_atom(mu, spec, inside, alpha)
        if cut is not None:
            atom, mask, b, g = cut
            p0, p1 = split(atom, 2)
            new = split_atoms(mu, spec, [(atom, b, g, (p0, p1))])
            self._commit(new, step, target=[alpha.to_json(), beta.to_json()])
            u = _mask_clopen(mu, mask) | p0
            return u, w - u
        new, u, v = realize_split(mu, spec, w, (alpha, beta))
        self._commit(new, step, target=[alpha.to_json(), beta.to_json()], via="split-lemma")
        return u, v


def _carve_existing(mu, inside, alpha):
    if len(inside) < 2:
        return None
    return subset_with_sum(mu.values, alpha, proper=True, allowed=inside, cap=SEARCH_CAP)


def _carve_one_atom(mu, spec, inside, alpha, mask_cap: int = 1024):
    """Find an atom to split in two so that one half plus other atoms has value ``alpha``.

    Subsets of the other atoms are tried by increasing size, at most ``mask_cap`` per atom.
    """
    total = mu.total
    for i in inside:
        atom, value = mu.atoms[i], mu.values[i]
        others = [j for j in inside if j != i]
        for mask in _small_masks(others, mask_cap):
            s = mu._sum(j for j in others if mask >> j & 1)
            b = alpha - s
            g = value - b
            if len(mu.atoms) > 1:
                ok = spec.member(b, g, total - value)
            else:
                ok = spec.pair_member(b, g)
            if ok:
                return atom, mask, b, g
    return None


def _small_masks(indices: Sequence[int], cap: int):
    """Bitmasks over ``indices`` by increasing popcount, at most ``cap`` of them."""
    count = 0
    for size in range(len(indices) + 1):
        for combo in itertools.combinations(indices, size):
            if count >= cap:
                return
            count += 1
            yield sum(1 << j for j in combo)


def synthesize(
    spec: Spectrum,
    depth: int,
    realize_pairs: int = 0,
    realize_4ep: int = 0,
    triple_scan: int = 200,
    realize_triples: int = 0,
) -> tuple[FiniteMeasure, SynthLog]:
    """Build a compatible measure resolving cylinders, pairs and split instances.

    ``realize_triples`` additionally carves the first enumerated triples as
    3-partitions of the whole space.
    """
    ctx = SynthContext.seed(spec)
    if next(iter(spec.enumerate_triples()), None) is None and next(iter(spec.enumerate_pairs()), None) is None:
        raise NotASpectrum("the spectrum has no members")
    _check_requirements(spec)
    probes: list[Clopen] = []
    for length in range(1, depth + 1):
        for c in cylinders(length):
            ctx.ensure(c)
            probes.append(c)

    pairs = spec.pairs(realize_pairs) if realize_pairs else []
    for eta, nu in pairs:
        if _has_split(ctx.measure, ONE, eta):
            continue
        ctx.carve(ONE, eta, nu, step="ext2")

    if realize_4ep:
        triples = spec.triples(triple_scan)
        done = 0
        order = sorted(
            ((j, k) for j in range(len(probes)) for k in range(len(triples))),
            key=lambda jk: (max(jk), jk[0], jk[1]),
        )
        for j, k in order:
            if done >= realize_4ep:
                break
            a = probes[j]
            alpha, beta, gamma = triples[k]
            mu = ctx.measure
            if mu.evaluate(a) != alpha + beta or mu.total - mu.evaluate(a) != gamma:
                continue
            done += 1
            if _has_split(mu, a, alpha):
                continue
            ctx.carve(a, alpha, beta, step="ext3")

    for alpha, beta, gamma in spec.triples(realize_triples) if realize_triples else []:
        if find_three_partition(ctx.measure, (alpha, beta, gamma)) is not None:
            continue
        _, rest = ctx.carve(ONE, alpha, beta + gamma, step="triple")
        ctx.carve(rest, beta, gamma, step="triple")
    return ctx.measure, ctx.log


def _check_requirements(spec: Spectrum) -> None:
    """Reject spectra whose triples cannot be refined at all."""
    if not spec.finite:
        return
    for a, b, c in spec.enumerate_triples():
        try:
            spec.refine_pair(b + c, a)
        except NoWitnessUpToBound as exc:
            raise NotASpectrum(f"no refinement of {a!r} beside {b + c!r}") from exc


def _has_split(mu: FiniteMeasure, w: Clopen, alpha: Element) -> bool:
    inside = mu.atoms_below(w)
    return len(inside) >= 2 and subset_with_sum(mu.values, alpha, proper=True, allowed=inside, cap=SEARCH_CAP) is not None


# ---------------------------------------------------------------------------
# Partial isomorphisms
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PartialIso:
    """An atom bijection between two partitions; value preservation is checked on creation."""

    source: tuple[Clopen, ...]
    target: tuple[Clopen, ...]

    @classmethod
    def make(cls, measure: FiniteMeasure, source: Sequence[Clopen], target: Sequence[Clopen]) -> "PartialIso":
        if len(source) != len(target):
            raise PreconditionViolated("source and target need the same number of atoms")
        check_partition(list(source))
        check_partition(list(target))
        for a, b in zip(source, target):
            if measure.evaluate(a) != measure.evaluate(b):
                raise PreconditionViolated(f"{a!r} and {b!r} carry different values")
        return cls(tuple(source), tuple(target))

    @classmethod
    def identity(cls, measure: FiniteMeasure) -> "PartialIso":
        return cls.make(measure, [ONE], [ONE])

    def inverse(self) -> "PartialIso":
        return PartialIso(self.target, self.source)

    def image(self, c: Clopen) -> Clopen:
        """Image of a join of source atoms."""
        out = ZERO
        for a, b in zip(self.source, self.target):
            m = a & c
            if m.is_zero:
                continue
            if m != a:
                raise NotInDomain(f"{c!r} is not in the source algebra")
            out = out | b
        return out

    def preserves_values(self, measure: FiniteMeasure, sample: int = 64) -> bool:
        """Exhaustive check over all joins of atoms, via the set of value differences."""
        diffs = {measure.system.zero_element}
        for a, b in zip(self.source, self.target):
            d = measure.evaluate(a) - measure.evaluate(b)
            diffs |= {x + d for x in diffs}
            if len(diffs) > 1:
                return False
        n = len(self.source)
        for mask in itertools.islice(range(1, 1 << n), sample):
            src = join_all(a for i, a in enumerate(self.source) if mask >> i & 1)
            if measure.evaluate(src) != measure.evaluate(self.image(src)):
                return False
        return True

    def to_json(self) -> dict:
        return {"source": [a.to_json() for a in self.source], "target": [b.to_json() for b in self.target]}


def join_all(parts: Iterable[Clopen]) -> Clopen:
    out = ZERO
    for p in parts:
        out = out | p
    return out


def extend_partial_iso(ctx: SynthContext, phi: PartialIso, b: Clopen, side: str = "source") -> PartialIso:
    """Extend ``phi`` so that ``b`` lies in its source (or target) algebra."""
    if side == "target":
        return extend_partial_iso(ctx, phi.inverse(), b, "source").inverse()
    if side != "source":
        raise ValueError("side must be 'source' or 'target'")
    ctx.ensure(b, step="iso-host")
    for a, t in zip(phi.source, phi.target):
        ctx.ensure(a, step="iso-host")
        ctx.ensure(t, step="iso-host")
    mu = ctx.measure
    if not phi.preserves_values(mu):
        raise PreconditionViolated("phi does not preserve values")
    new_source: list[Clopen] = []
    new_target: list[Clopen] = []
    for a, t in zip(phi.source, phi.target):
        inner, outer = a & b, a - b
        if inner.is_zero or outer.is_zero:
            new_source.append(a)
            new_target.append(t)
            continue
        alpha, beta = ctx.measure.evaluate(inner), ctx.measure.evaluate(outer)
        try:
            d, d2 = ctx.carve(t, alpha, beta, step="iso-forth")
        except PreconditionViolated as exc:
            raise NoWitnessUpToBound(f"cannot split the image of {a!r}: {exc}") from exc
        new_source += [inner, outer]
        new_target += [d, d2]
    out = PartialIso.make(ctx.measure, new_source, new_target)
    if not out.preserves_values(ctx.measure):
        raise NotASpectrum("extension failed to preserve values")
    return out


# ---------------------------------------------------------------------------
# Equi-measured partitions
# ---------------------------------------------------------------------------


@dataclass
class EquiPartition:
    parts: list[Clopen]
    common: Element
    realizable: list[Element]

    @property
    def non_unique(self) -> bool:
        return len(self.realizable) > 1


def _equi_admissible(ctx: SynthContext, j: Clopen, c: Element, n: int) -> bool:
    spec = ctx._require_spec()
    mu = ctx.measure
    if j.is_one:
        local: Spectrum = spec
    else:
        local = Restriction(spec, mu.evaluate(j), mu.total - mu.evaluate(j))
    return delta_member(local, [c] * n)


def _realize_equi(ctx: SynthContext, j: Clopen, c: Element, n: int) -> list[Clopen]:
    parts = []
    rest = j
    for k in range(n - 1):
        left = c * (n - k - 1)
        u, v = ctx.carve(rest, c, left, step="equi")
        parts.append(u)
        rest = v
    parts.append(rest)
    return parts


def equi_partition(ctx: SynthContext, j: Clopen, n: int) -> EquiPartition | None:
    """Partition ``j`` into ``n`` parts of equal value, committing the least realizable value."""
    if j.is_zero or n < 1:
        raise PreconditionViolated("j must be nonzero and n positive")
    ctx.ensure(j, step="equi-host")
    value = ctx.measure.evaluate(j)
    if n == 1:
        return EquiPartition([j], value, [value])
    found = []
    for c in divisions(value, n):
        if not _equi_admissible(ctx, j, c, n):
            continue
        trial = ctx.copy()
        try:
            parts = _realize_equi(trial, j, c, n)
        except (PreconditionViolated, NoWitnessUpToBound, NotASpectrum):
            continue
        found.append((c, trial, parts))
    if not found:
        return None
    c, trial, parts = found[0]
    ctx.measure, ctx.log = trial.measure, trial.log
    return EquiPartition(parts, c, [f[0] for f in found])


def mu_N(ctx: SynthContext, n: int) -> FiniteMeasure:
    """Atomwise common values of equi-measured ``n``-partitions of the current atoms."""
    base = ctx.measure
    values = []
    for atom in base.atoms:
        result = equi_partition(ctx, atom, n)
        if result is None:
            raise NoPartition(f"{atom!r} has no equi-measured {n}-partition")
        if result.non_unique:
            raise NonUnique(f"{atom!r} admits common values {result.realizable!r}")
        values.append(result.common)
    return FiniteMeasure(base.system, base.atoms, tuple(values))


# ---------------------------------------------------------------------------
# Filling and injectivity
# ---------------------------------------------------------------------------


@dataclass
class FillingReport:
    verdict: str
    probes: int
    failure: tuple | None = None

    def to_json(self):
        out = {"verdict": self.verdict, "probes": self.probes}
        if self.failure is not None:
            probe, g = self.failure
            out["failure"] = {"probe": probe.to_json(), "value": dump_element(g)}
        return out


def _proper_clopens(depth: int, within: Clopen) -> list[Clopen]:
    cells = [c for c in cylinders(depth) if within.contains(c)]
    out = []
    seen = set()
    for r in range(1, len(cells) + 1):
        for chosen in itertools.combinations(cells, r):
            c = join_all(chosen)
            if c.is_proper and c not in seen:
                seen.add(c)
                out.append(c)
    return sorted(out, key=lambda c: (c.depth, c.sort_key()))


def filling_check(
    ctx: SynthContext,
    group: System | Sequence[Element],
    probe_depth: int,
    within: Clopen = ONE,
    values: int = 12,
    deepen: bool = False,
) -> FillingReport:
    """Check that every proper probe clopen contains nonzero proper parts of each value."""
    if isinstance(group, System):
        targets = group.all_elements() if group.is_finite else list(itertools.islice(group.elements(), values))
    else:
        targets = list(group)
    probes = _proper_clopens(probe_depth, within)
    for a in probes:
        ctx.ensure(a, step="probe-host") if ctx.spec is not None else None
        mu = ctx.measure
        inside = mu.atoms_below(a)
        for g in targets:
            if len(inside) >= 2 and subset_with_sum(mu.values, g, proper=True, allowed=inside, cap=SEARCH_CAP) is not None:
                continue
            if deepen and ctx.spec is not None:
                rest = mu.evaluate(a) - g
                try:
                    ctx.carve(a, g, rest, step="probe-deepen")
                    mu = ctx.measure
                    inside = mu.atoms_below(a)
                    continue
                except (PreconditionViolated, NoWitnessUpToBound, NotASpectrum):
                    pass
            return FillingReport("fail", len(probes), (a, g))
    return FillingReport("pass", len(probes))


def make_injective_rational(depth: int) -> FiniteMeasure:
    """Rational measure with pairwise distinct subset sums and total 1."""
    if depth < 1:
        raise ValueError("depth must be positive")
    system = RatLex(1)
    atoms = cylinders(depth)
    weights = [Fraction(1, 3**k) for k in range(1, len(atoms))]
    weights.append(1 - sum(weights))
    mu = FiniteMeasure(system, tuple(atoms), tuple(system.wrap((w,)) for w in weights))
    if not has_injective_sums(mu):
        raise NotASpectrum("subset sums collide")
    return mu


def has_injective_sums(mu: FiniteMeasure) -> bool:
    sums = {mu.system.zero()}
    for v in mu.values:
        shifted = {mu.system.add(s, v.value) for s in sums}
        if shifted & sums:
            return False
        sums |= shifted
    return len(sums) == 1 << len(mu.values)


# ---------------------------------------------------------------------------
# Independence
# ---------------------------------------------------------------------------


@dataclass
class IndependenceReport:
    compatible: bool
    realized: int
    sampled: int
    missing: list = field(default_factory=list)

    @property
    def verdict(self) -> str:
        if not self.compatible:
            return "not-independent"
        return "independent" if not self.missing else "not-independent-up-to-bound"

    def to_json(self):
        return {
            "verdict": self.verdict,
            "compatible": self.compatible,
            "realized": self.realized,
            "sampled": self.sampled,
            "missing": [[x.to_json() for x in t] for t in self.missing[:5]],
        }


def check_independent(ms: Sequence[FiniteMeasure], specs: Sequence[Spectrum], sample: int = 10) -> IndependenceReport:
    from .universal import diagonal_measure

    if len(ms) != len(specs):
        raise SystemMismatch("one spectrum per measure is required")
    for m, s in zip(ms, specs):
        if m.system != s.system:
            raise SystemMismatch(f"{m.system} vs {s.system}")
    diag = diagonal_measure(ms)
    product = specs[0] if len(specs) == 1 else SkewProduct(list(specs))
    compatible = is_compatible(diag, product)
    wanted = product.triples(sample)
    missing = [t for t in wanted if find_three_partition(diag, t) is None]
    return IndependenceReport(compatible, len(wanted) - len(missing), len(wanted), missing)
