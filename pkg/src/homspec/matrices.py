"""Compatible matrices, polycycles and their morphisms.

Matrices carry entries in ``S`` extended by the sentinel :data:`coeff.EMPTY`
(printed as ``null`` in JSON), which is neutral for addition.  A morphism
stores its map from the *target* indices to the *source* indices: a morphism
from ``A`` into ``B`` is ``f: J -> I`` where ``I`` indexes ``A`` and ``J``
indexes ``B``, and every entry of ``A`` is the block sum of ``B`` over ``f``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Hashable, Iterable, Sequence

from .coeff import (
    EMPTY,
    Element,
    IntLex,
    IntVector,
    ModInt,
    Product,
    RatLex,
    RatMod1,
    RatVector,
    System,
    dump_element,
    load_element,
    opt_key,
    opt_sum,
    parse_system,
)
from .errors import (
    FiberJointFailed,
    IncompatibleInput,
    NotCyclic,
    NotDivisible,
    NotInvertible,
    PreconditionViolated,
    SystemMismatch,
    UnknownSystem,
)
from .spectrum import Full, Good, Spectrum, delta_member

__all__ = [
    "CompatMatrix",
    "MatrixMorphism",
    "Polycycle",
    "PolycycleMorphism",
    "ExhaustedBound",
    "JointTarget",
    "gamma_of",
    "is_compatible_matrix",
    "check_equivalent",
    "verify_morphism",
    "compose",
    "identity_morphism",
    "cyclic_decompose",
    "is_cyclic",
    "polycycle_convert",
    "polycycle_compatible",
    "joint_target_ring",
    "joint_target_qvector",
    "joint_polycycle_goodlike",
    "bounded_joint_search",
    "naive_joint_search",
    "amalgamate_polycycles",
    "goodlike_fiber_recipe",
    "rokhlin_criterion",
]


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


def _label_json(x: Hashable) -> Any:
    return [_label_json(y) for y in x] if isinstance(x, tuple) else x


def _label_load(x: Any) -> Hashable:
    return tuple(_label_load(y) for y in x) if isinstance(x, list) else x


@dataclass(frozen=True)
class CompatMatrix:
    """Square matrix over ``S`` plus the empty entry, indexed by opaque labels."""

    system: System
    indices: tuple
    entries: tuple

    def __post_init__(self):
        n = len(self.indices)
        if n == 0:
            raise ValueError("a matrix needs at least one index")
        if len(set(self.indices)) != n:
            raise ValueError("indices must be distinct")
        rows = tuple(tuple(r) for r in self.entries)
        if len(rows) != n or any(len(r) != n for r in rows):
            raise ValueError("matrix must be square and match its indices")
        for r in rows:
            for x in r:
                if x is not EMPTY and (not isinstance(x, Element) or x.system != self.system):
                    raise SystemMismatch(f"{x!r} is not in {self.system}")
        object.__setattr__(self, "entries", rows)
        object.__setattr__(self, "_pos", {label: i for i, label in enumerate(self.indices)})

    @classmethod
    def from_rows(cls, system: System, rows: Sequence[Sequence[Any]], indices: Sequence | None = None) -> "CompatMatrix":
        """Build from raw rows; ``None`` and ``EMPTY`` denote the empty entry."""
        def conv(x):
            if x is None or x is EMPTY:
                return EMPTY
            if isinstance(x, Element):
                return x
            return system(*x) if isinstance(x, (tuple, list)) else system(x)

        entries = tuple(tuple(conv(x) for x in r) for r in rows)
        labels = tuple(indices) if indices is not None else tuple(range(len(entries)))
        return cls(system, labels, entries)

    @property
    def dim(self) -> int:
        return len(self.indices)

    def pos(self, label) -> int:
        return self._pos[label]  # type: ignore[attr-defined]

    def __getitem__(self, key: tuple) -> Any:
        u, v = key
        return self.entries[self.pos(u)][self.pos(v)]

    def row_sum(self, label) -> Any:
        return opt_sum(self.entries[self.pos(label)])

    def col_sum(self, label) -> Any:
        k = self.pos(label)
        return opt_sum(r[k] for r in self.entries)

    def nonempty(self) -> list[Element]:
        return [x for r in self.entries for x in r if x is not EMPTY]

    def total(self) -> Any:
        return opt_sum(self.nonempty())

    def relabel(self, mapping: dict) -> "CompatMatrix":
        return CompatMatrix(self.system, tuple(mapping[i] for i in self.indices), self.entries)

    def to_json(self) -> dict:
        return {
            "indices": [_label_json(i) for i in self.indices],
            "entries": [[dump_element(x) for x in r] for r in self.entries],
            "system": self.system.to_json(),
        }

    @classmethod
    def from_json(cls, data: dict, system: System | None = None) -> "CompatMatrix":
        system = system or parse_system(data["system"])
        entries = [[load_element(system, x) for x in r] for r in data["entries"]]
        indices = data.get("indices") or list(range(len(entries)))
        return cls(system, tuple(_label_load(i) for i in indices), tuple(map(tuple, entries)))

    def __repr__(self):
        rows = "; ".join(" ".join("⌀" if x is EMPTY else repr(x) for x in r) for r in self.entries)
        return f"CompatMatrix([{rows}])"


@dataclass(frozen=True)
class MatrixMorphism:
    """Morphism from ``source`` into ``target``; ``mapping`` sends target labels to source labels."""

    source: CompatMatrix
    target: CompatMatrix
    mapping: dict

    def __call__(self, label):
        return self.mapping[label]

    def to_json(self) -> dict:
        return {"map": [[_label_json(k), _label_json(v)] for k, v in self.mapping.items()]}


@dataclass(frozen=True)
class Polycycle:
    """Tuple of ``(value, cycle length)`` pairs."""

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((g, int(n)) for g, n in self.pairs)
        if not pairs:
            raise ValueError("a polycycle needs at least one pair")
        system = pairs[0][0].system
        for g, n in pairs:
            if not isinstance(g, Element) or g.system != system:
                raise SystemMismatch("polycycle values must share one system")
            if n < 1:
                raise ValueError("cycle lengths must be positive")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def of(cls, system: System, pairs: Iterable[tuple[Any, int]]) -> "Polycycle":
        return cls(tuple((g if isinstance(g, Element) else system(g), n) for g, n in pairs))

    @property
    def system(self) -> System:
        return self.pairs[0][0].system

    def __len__(self):
        return len(self.pairs)

    def flatten(self) -> list[Element]:
        return [g for g, n in self.pairs for _ in range(n)]

    def to_json(self) -> list:
        return [[g.to_json(), n] for g, n in self.pairs]

    @classmethod
    def from_json(cls, system: System, data: list) -> "Polycycle":
        return cls(tuple((load_element(system, g), n) for g, n in data))

    def __repr__(self):
        return "Polycycle(" + ", ".join(f"({g!r},{n})" for g, n in self.pairs) + ")"


@dataclass(frozen=True)
class PolycycleMorphism:
    """Morphism from ``source`` into ``target``; ``mapping[j]`` is the source position of target pair ``j``."""

    source: Polycycle
    target: Polycycle
    mapping: tuple

    def to_json(self) -> dict:
        return {"map": list(self.mapping)}


@dataclass(frozen=True)
class ExhaustedBound:
    """No joint target exists up to ``max_dim``."""

    max_dim: int
    candidates: int

    def to_json(self) -> dict:
        return {"result": "ExhaustedBound", "max_dim": self.max_dim, "candidates": self.candidates}


@dataclass(frozen=True)
class JointTarget:
    target: Any
    left: Any
    right: Any

    def __iter__(self):
        return iter((self.target, self.left, self.right))

    def to_json(self) -> dict:
        return {"target": self.target.to_json(), "left": self.left.to_json(), "right": self.right.to_json()}


# ---------------------------------------------------------------------------
# Basic predicates
# ---------------------------------------------------------------------------


def gamma_of(phi, measure) -> CompatMatrix:
    """Matrix of values of ``a_j & phi(a_k)`` over the source atoms of ``phi``."""
    rows = []
    for a in phi.source:
        row = []
        for t in phi.target:
            m = a & t
            row.append(EMPTY if m.is_zero else measure.evaluate(m))
        rows.append(tuple(row))
    return CompatMatrix(measure.system, tuple(range(len(phi.source))), tuple(rows))


def is_compatible_matrix(m: CompatMatrix, spec: Spectrum) -> bool:
    if m.system != spec.system:
        raise SystemMismatch(f"{m.system} vs {spec.system}")
    for label in m.indices:
        r, c = m.row_sum(label), m.col_sum(label)
        if r is EMPTY or r != c:
            return False
    values = sorted(m.nonempty(), key=opt_key)
    return bool(values) and delta_member(spec, values)


def _signature(m: CompatMatrix, i: int):
    row = sorted((opt_key(x) for x in m.entries[i]))
    col = sorted((opt_key(r[i]) for r in m.entries))
    return (opt_key(m.entries[i][i]), tuple(row), tuple(col))


def check_equivalent(a: CompatMatrix, b: CompatMatrix) -> dict | None:
    """A relabeling ``sigma`` with ``a[u, v] == b[sigma(u), sigma(v)]``, or None."""
    if a.dim != b.dim or a.system != b.system:
        return None
    if sorted(map(opt_key, (x for r in a.entries for x in r))) != sorted(map(opt_key, (x for r in b.entries for x in r))):
        return None
    n = a.dim
    sig_a = [_signature(a, i) for i in range(n)]
    sig_b = [_signature(b, i) for i in range(n)]
    if sorted(sig_a) != sorted(sig_b):
        return None
    assign: list[int] = []
    used = [False] * n

    def consistent(i: int, j: int) -> bool:
        if a.entries[i][i] != b.entries[j][j]:
            return False
        for k, jk in enumerate(assign):
            if a.entries[i][k] != b.entries[j][jk] or a.entries[k][i] != b.entries[jk][j]:
                return False
        return True

    def search(i: int) -> bool:
        if i == n:
            return True
        for j in range(n):
            if not used[j] and sig_a[i] == sig_b[j] and consistent(i, j):
                used[j] = True
                assign.append(j)
                if search(i + 1):
                    return True
                assign.pop()
                used[j] = False
        return False

    if not search(0):
        return None
    return {a.indices[i]: b.indices[j] for i, j in enumerate(assign)}


def _verify_matrix_morphism(m: MatrixMorphism) -> bool:
    a, b, f = m.source, m.target, m.mapping
    if set(f) != set(b.indices) or any(v not in a._pos for v in f.values()):  # type: ignore[attr-defined]
        return False
    if set(f.values()) != set(a.indices):
        return False
    blocks: dict[tuple, list] = {}
    for p in b.indices:
        for q in b.indices:
            blocks.setdefault((f[p], f[q]), []).append(b[p, q])
    for u in a.indices:
        for v in a.indices:
            if opt_sum(blocks.get((u, v), [])) != a[u, v]:
                return False
    return True


def _verify_polycycle_morphism(m: PolycycleMorphism) -> bool:
    src, tgt, u = m.source, m.target, m.mapping
    if len(u) != len(tgt) or set(u) != set(range(len(src))):
        return False
    for s, (g, n) in enumerate(src.pairs):
        total = g.system.zero_element
        for j, (h, k) in enumerate(tgt.pairs):
            if u[j] != s:
                continue
            if k % n:
                return False
            total = total + h * (k // n)
        if total != g:
            return False
    return True


def verify_morphism(m: MatrixMorphism | PolycycleMorphism) -> bool:
    if isinstance(m, PolycycleMorphism):
        return _verify_polycycle_morphism(m)
    return _verify_matrix_morphism(m)


def compose(first, second):
    """``first``: A into B, ``second``: B into C; returns A into C."""
    if isinstance(first, PolycycleMorphism):
        mapping = tuple(first.mapping[j] for j in second.mapping)
        return PolycycleMorphism(first.source, second.target, mapping)
    mapping = {k: first.mapping[v] for k, v in second.mapping.items()}
    return MatrixMorphism(first.source, second.target, mapping)


def identity_morphism(x):
    if isinstance(x, Polycycle):
        return PolycycleMorphism(x, x, tuple(range(len(x))))
    return MatrixMorphism(x, x, {i: i for i in x.indices})


# ---------------------------------------------------------------------------
# Cyclic matrices and polycycles
# ---------------------------------------------------------------------------


def is_cyclic(m: CompatMatrix) -> bool:
    n = m.dim
    for i in range(n):
        if sum(x is not EMPTY for x in m.entries[i]) != 1:
            return False
        if sum(m.entries[k][i] is not EMPTY for k in range(n)) != 1:
            return False
    return True


def _find_cycle(b: list[list[Any]], start: tuple[int, int], positive) -> list[int]:
    t0, t1 = start
    path = [t0, t1]
    while path[-1] not in path[:-1]:
        last = path[-1]
        nxt = next(k for k in range(len(b)) if positive(b[last][k]))
        path.append(nxt)
    first = path.index(path[-1])
    return path[first:]


def cyclic_decompose(a: CompatMatrix, spec: Spectrum) -> tuple[CompatMatrix, MatrixMorphism]:
    """Greedy extraction of closed positive paths into a block-diagonal cyclic matrix."""
    system = a.system
    if not system.is_ordered:
        raise PreconditionViolated("cyclic decomposition needs an ordered system")
    zero = system.zero_element
    for x in a.nonempty():
        if not zero < x:
            raise PreconditionViolated(f"entry {x!r} is not positive")
    if not is_compatible_matrix(a, spec):
        raise IncompatibleInput("input matrix is not compatible")
    n = a.dim
    b = [[zero if x is EMPTY else x for x in r] for r in a.entries]
    positive = lambda x: zero < x  # noqa: E731
    cycles: list[tuple[list[int], Element]] = []
    while True:
        start = next(((i, j) for i in range(n) for j in range(n) if positive(b[i][j])), None)
        if start is None:
            break
        path = _find_cycle(b, start, positive)
        g = min(b[path[k - 1]][path[k]] for k in range(1, len(path)))
        for k in range(1, len(path)):
            b[path[k - 1]][path[k]] = b[path[k - 1]][path[k]] - g
        cycles.append((path, g))

    labels, mapping = [], {}
    for q, (path, g) in enumerate(cycles):
        for j in range(1, len(path)):
            label = (q, j - 1)
            labels.append(label)
            mapping[label] = a.indices[path[j]]
    pos = {label: i for i, label in enumerate(labels)}
    entries = [[EMPTY] * len(labels) for _ in labels]
    for q, (path, g) in enumerate(cycles):
        m = len(path) - 1
        for j in range(m):
            entries[pos[(q, j)]][pos[(q, (j + 1) % m)]] = g
    c = CompatMatrix(system, tuple(labels), tuple(map(tuple, entries)))
    f = MatrixMorphism(a, c, mapping)
    if not verify_morphism(f) or not is_compatible_matrix(c, spec):
        raise PreconditionViolated("decomposition failed verification")
    return c, f


def polycycle_convert(x: CompatMatrix | Polycycle):
    """Cyclic matrix to polycycle (orbits in index order) or back."""
    if isinstance(x, Polycycle):
        labels, rows = [], []
        for q, (g, n) in enumerate(x.pairs):
            labels += [(q, j) for j in range(n)]
        pos = {label: i for i, label in enumerate(labels)}
        entries = [[EMPTY] * len(labels) for _ in labels]
        for q, (g, n) in enumerate(x.pairs):
            for j in range(n):
                entries[pos[(q, j)]][pos[(q, (j + 1) % n)]] = g
        return CompatMatrix(x.system, tuple(labels), tuple(map(tuple, entries)))
    if not is_cyclic(x):
        raise NotCyclic("every row and column needs exactly one non-empty entry")
    n = x.dim
    succ = [next(k for k in range(n) if x.entries[i][k] is not EMPTY) for i in range(n)]
    seen = [False] * n
    pairs = []
    for i in range(n):
        if seen[i]:
            continue
        orbit, j = [], i
        while not seen[j]:
            seen[j] = True
            orbit.append(j)
            j = succ[j]
        values = {x.entries[k][succ[k]] for k in orbit}
        if len(values) != 1:
            raise NotCyclic("entries along an orbit differ")
        pairs.append((values.pop(), len(orbit)))
    return Polycycle(tuple(pairs))


def polycycle_compatible(p: Polycycle, spec: Spectrum) -> bool:
    if p.system != spec.system:
        raise SystemMismatch(f"{p.system} vs {spec.system}")
    return delta_member(spec, p.flatten())


# ---------------------------------------------------------------------------
# Joint targets
# ---------------------------------------------------------------------------


def _require_compatible(spec: Spectrum, *ms: CompatMatrix) -> None:
    for m in ms:
        if not is_compatible_matrix(m, spec):
            raise IncompatibleInput(f"{m!r} is not compatible")


def _product_target(a, b, cell, system) -> JointTarget:
    labels = [(j, p) for j in a.indices for p in b.indices]
    rows = []
    for j, p in labels:
        row = []
        for k, q in labels:
            x, y = a[j, k], b[p, q]
            row.append(EMPTY if x is EMPTY or y is EMPTY else cell(j, k, p, q, x, y))
        rows.append(tuple(row))
    c = CompatMatrix(system, tuple(labels), tuple(rows))
    f = MatrixMorphism(a, c, {s: s[0] for s in labels})
    g = MatrixMorphism(b, c, {s: s[1] for s in labels})
    return JointTarget(c, f, g)


def _verified(jt: JointTarget, spec: Spectrum) -> JointTarget:
    if not (verify_morphism(jt.left) and verify_morphism(jt.right) and is_compatible_matrix(jt.target, spec)):
        raise IncompatibleInput("joint target failed verification")
    return jt


def joint_target_ring(a: CompatMatrix, b: CompatMatrix, spec: Spectrum) -> JointTarget:
    """Product recipe ``c = a * E^-1 * b`` over the coordinatewise ring structure."""
    system = spec.system
    _require_compatible(spec, a, b)
    if a.dim < 2 or b.dim < 2:
        raise PreconditionViolated("both matrices need dimension above one")
    inv = system.ring_inverse(spec.total.value)
    if inv is None:
        raise NotInvertible(f"{spec.total!r} has no inverse")

    def cell(j, k, p, q, x, y):
        return Element(system, system.canon(system.ring_mul(system.ring_mul(x.value, inv), y.value)))

    return _verified(_product_target(a, b, cell, system), spec)


def _index_cycle(m: CompatMatrix) -> set[tuple]:
    """Edges of a closed path of non-empty entries, found by walking from the first one."""
    n = m.dim
    nonempty = lambda x: x is not EMPTY  # noqa: E731
    rows = [list(r) for r in m.entries]
    start = next(((i, j) for i in range(n) for j in range(n) if nonempty(rows[i][j])), None)
    if start is None:
        raise IncompatibleInput("matrix has no non-empty entry")
    path = _find_cycle(rows, start, nonempty)
    return {(m.indices[path[k - 1]], m.indices[path[k]]) for k in range(1, len(path))}


def joint_target_qvector(a: CompatMatrix, b: CompatMatrix, spec: Spectrum) -> JointTarget:
    """Joint target for zero-total full spectra over rational vector spaces."""
    system = spec.system
    if not system.is_divisible:
        raise PreconditionViolated("the system must be divisible")
    for m in (a, b):
        if m.dim < 2:
            raise PreconditionViolated("both matrices need dimension above one")
        for label in m.indices:
            if m.row_sum(label) is EMPTY:
                raise IncompatibleInput(f"row {label!r} is empty")
    _require_compatible(spec, a, b)
    nu = _index_cycle(a)
    eta = _index_cycle(b)
    big_m, big_n = len(nu), len(eta)

    def cell(j, k, p, q, x, y):
        out = system.zero_element
        if (p, q) in eta:
            out = out + x.scale(Fraction(1, big_n))
        if (j, k) in nu:
            out = out + y.scale(Fraction(1, big_m))
        return out

    return _verified(_product_target(a, b, cell, system), spec)


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


def joint_polycycle_goodlike(gamma: Polycycle, delta: Polycycle, omega: Element) -> JointTarget:
    """Common refinement of two polycycles over a divisible densely ordered group."""
    system = omega.system
    if not system.is_ordered or not system.is_divisible:
        raise NotDivisible(f"{system} must be ordered and divisible")
    spec = Good(system, omega)
    for p in (gamma, delta):
        if not polycycle_compatible(p, spec):
            raise IncompatibleInput(f"{p!r} is not compatible")
    lengths = [n for _, n in gamma.pairs] + [k for _, k in delta.pairs]
    big_n = _lcm(lengths)
    if big_n == 1:
        big_n = 2
    rows = [g.scale(Fraction(n, big_n)) for g, n in gamma.pairs]
    cols = [h.scale(Fraction(k, big_n)) for h, k in delta.pairs]
    zero = system.zero_element
    cells: list[tuple[int, int, Element]] = []
    i = j = 0
    rows_left, cols_left = list(rows), list(cols)
    while i < len(rows) and j < len(cols):
        w = min(rows_left[i], cols_left[j])
        if zero < w:
            cells.append((i, j, w))
        rows_left[i] = rows_left[i] - w
        cols_left[j] = cols_left[j] - w
        if rows_left[i] == zero:
            i += 1
        if j < len(cols) and cols_left[j] == zero:
            j += 1
    eps = Polycycle(tuple((w, big_n) for _, _, w in cells))
    tau = PolycycleMorphism(gamma, eps, tuple(c[0] for c in cells))
    rho = PolycycleMorphism(delta, eps, tuple(c[1] for c in cells))
    jt = JointTarget(eps, tau, rho)
    if not (verify_morphism(tau) and verify_morphism(rho) and polycycle_compatible(eps, spec)):
        raise IncompatibleInput("joint polycycle failed verification")
    return jt


# ---------------------------------------------------------------------------
# Bounded search
# ---------------------------------------------------------------------------


def _integer_solve(rows: list[list[int]], rhs: list[int]) -> list[int] | None:
    """Integer solution of ``rows @ x = rhs`` by unimodular column reduction."""
    k = len(rows)
    n = len(rows[0]) if rows else 0
    m = [list(r) for r in rows]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def col_op(dst, src, factor):
        for r in m:
            r[dst] -= factor * r[src]
        for r in v:
            r[dst] -= factor * r[src]

    def swap(c1, c2):
        for r in m:
            r[c1], r[c2] = r[c2], r[c1]
        for r in v:
            r[c1], r[c2] = r[c2], r[c1]

    pivots: list[int | None] = []
    col = 0
    for i in range(k):
        while True:
            nz = [c for c in range(col, n) if m[i][c] != 0]
            if len(nz) <= 1:
                break
            c0 = min(nz, key=lambda c: abs(m[i][c]))
            for c in nz:
                if c != c0:
                    col_op(c, c0, m[i][c] // m[i][c0])
        nz = [c for c in range(col, n) if m[i][c] != 0]
        if nz:
            swap(col, nz[0])
            pivots.append(col)
            col += 1
        else:
            pivots.append(None)
    y = [0] * n
    for i in range(k):
        s = sum(m[i][c] * y[c] for c in range(n))
        residual = rhs[i] - s
        p = pivots[i]
        if p is None:
            if residual != 0:
                return None
            continue
        if residual % m[i][p]:
            return None
        y[p] = residual // m[i][p]
    return [sum(v[r][c] * y[c] for c in range(n)) for r in range(n)]


def _rational_solve(rows: list[list[int]], rhs: list[Fraction]) -> list[Fraction] | None:
    k = len(rows)
    n = len(rows[0]) if rows else 0
    aug = [[Fraction(x) for x in r] + [Fraction(b)] for r, b in zip(rows, rhs)]
    pivot_cols = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, k) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(k):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivot_cols.append(c)
        r += 1
    if any(all(x == 0 for x in row[:-1]) and row[-1] != 0 for row in aug):
        return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivot_cols):
        x[c] = aug[i][-1]
    return x


def _coords(e: Element) -> tuple:
    v = e.value
    return tuple(v) if isinstance(v, tuple) else (v,)


def _solve_in_system(system: System, rows: list[list[int]], rhs: list[Element]) -> list[Element] | None:
    """Solve the integer-coefficient system for unknowns in ``system``."""
    n = len(rows[0]) if rows else 0
    if isinstance(system, ModInt):
        mod = system.m
        ext = [r + [mod if i == j else 0 for j in range(len(rows))] for i, r in enumerate(rows)]
        sol = _integer_solve(ext, [e.value for e in rhs])
        return None if sol is None else [system.wrap(x) for x in sol[:n]]
    if isinstance(system, (IntVector, IntLex)):
        columns = []
        for d in range(system.d):
            sol = _integer_solve(rows, [_coords(e)[d] for e in rhs])
            if sol is None:
                return None
            columns.append(sol)
        return [system.wrap(tuple(col[i] for col in columns)) for i in range(n)]
    if isinstance(system, (RatVector, RatLex)):
        columns = []
        for d in range(system.d):
            sol = _rational_solve(rows, [_coords(e)[d] for e in rhs])
            if sol is None:
                return None
            columns.append(sol)
        return [system.wrap(tuple(col[i] for col in columns)) for i in range(n)]
    raise PreconditionViolated(f"bounded search does not support {system}")


def _assignments(a: CompatMatrix, b: CompatMatrix, dim: int, canonical: bool):
    pairs = [(u, p) for u in a.indices for p in b.indices]
    source = (
        itertools.combinations_with_replacement(pairs, dim) if canonical else itertools.product(pairs, repeat=dim)
    )
    for labels in source:
        if {x[0] for x in labels} == set(a.indices) and {x[1] for x in labels} == set(b.indices):
            yield labels


def _solve_assignment(a, b, spec, labels) -> JointTarget | None:
    system = spec.system
    n = len(labels)
    allowed = [
        (i, j)
        for i in range(n)
        for j in range(n)
        if a[labels[i][0], labels[j][0]] is not EMPTY and b[labels[i][1], labels[j][1]] is not EMPTY
    ]
    if any(not any(i == r for r, _ in allowed) for i in range(n)):
        return None
    var = {cell: k for k, cell in enumerate(allowed)}
    rows, rhs = [], []
    for m, side in ((a, 0), (b, 1)):
        for u in m.indices:
            for v in m.indices:
                cells = [var[(i, j)] for i, j in allowed if labels[i][side] == u and labels[j][side] == v]
                target = m[u, v]
                if target is EMPTY:
                    continue
                if not cells:
                    return None
                row = [0] * len(allowed)
                for c in cells:
                    row[c] = 1
                rows.append(row)
                rhs.append(target)
    zero = system.zero_element
    for i in range(n):
        row = [0] * len(allowed)
        for (r, c), k in var.items():
            if r == i:
                row[k] += 1
            if c == i:
                row[k] -= 1
        if any(row):
            rows.append(row)
            rhs.append(zero)
    sol = _solve_in_system(system, rows, rhs)
    if sol is None:
        return None
    entries = [[EMPTY] * n for _ in range(n)]
    for (i, j), k in var.items():
        entries[i][j] = sol[k]
    clabels = tuple((t,) + tuple(labels[t]) for t in range(n))
    c = CompatMatrix(system, clabels, tuple(map(tuple, entries)))
    f = MatrixMorphism(a, c, {cl: cl[1] for cl in clabels})
    g = MatrixMorphism(b, c, {cl: cl[2] for cl in clabels})
    jt = JointTarget(c, f, g)
    if verify_morphism(f) and verify_morphism(g) and is_compatible_matrix(c, spec):
        return jt
    return None


def _joint_search(a, b, spec, max_dim, canonical) -> JointTarget | ExhaustedBound:
    _require_compatible(spec, a, b)
    if check_equivalent(a, b) == {i: i for i in a.indices}:
        return JointTarget(a, identity_morphism(a), identity_morphism(a))
    if not isinstance(spec, Full):
        raise PreconditionViolated("bounded search supports full spectra only")
    count = 0
    for dim in range(max(a.dim, b.dim), max_dim + 1):
        for labels in _assignments(a, b, dim, canonical):
            count += 1
            hit = _solve_assignment(a, b, spec, labels)
            if hit is not None:
                return hit
    return ExhaustedBound(max_dim, count)


def bounded_joint_search(a: CompatMatrix, b: CompatMatrix, spec: Spectrum, max_dim: int) -> JointTarget | ExhaustedBound:
    """Search all targets up to ``max_dim`` indices, one per index multiset.

    For a full spectrum, any solution remains a solution after turning every
    admissible empty cell into a zero entry, so only the maximal pattern of
    non-empty cells is solved, exactly, per assignment of labels.
    """
    return _joint_search(a, b, spec, max_dim, canonical=True)


def naive_joint_search(a: CompatMatrix, b: CompatMatrix, spec: Spectrum, max_dim: int) -> JointTarget | ExhaustedBound:
    """Same search over label sequences instead of multisets; a reference for tests."""
    return _joint_search(a, b, spec, max_dim, canonical=False)


# ---------------------------------------------------------------------------
# Amalgamation
# ---------------------------------------------------------------------------

FiberRecipe = Callable[[Polycycle, Polycycle, Element], JointTarget]


def goodlike_fiber_recipe(gamma: Polycycle, delta: Polycycle, omega: Element) -> JointTarget:
    return joint_polycycle_goodlike(gamma, delta, omega)


def amalgamate_polycycles(
    base: Polycycle,
    gamma: Polycycle,
    delta: Polycycle,
    u: PolycycleMorphism,
    v: PolycycleMorphism,
    recipe: FiberRecipe = goodlike_fiber_recipe,
) -> tuple[Polycycle, PolycycleMorphism, PolycycleMorphism]:
    """Amalgamate ``gamma`` and ``delta`` over ``base`` along ``u`` and ``v``.

    Each base pair ``(f_z, nu_z)`` yields fibers with lengths divided by
    ``nu_z``; a fiber joint target is found by ``recipe`` and its cycles are
    stretched by ``nu_z`` so that they run through all copies of the base part.
    """
    if not (verify_morphism(u) and verify_morphism(v)):
        raise PreconditionViolated("base morphisms must verify")
    if u.source != base or v.source != base or u.target != gamma or v.target != delta:
        raise PreconditionViolated("morphisms must go from the base into gamma and delta")
    if gamma == delta and u.mapping == v.mapping:
        ident = identity_morphism(gamma)
        return gamma, ident, ident

    pairs: list[tuple[Element, int]] = []
    s_map: list[int] = []
    t_map: list[int] = []
    for z, (fz, nu) in enumerate(base.pairs):
        js = [j for j in range(len(gamma)) if u.mapping[j] == z]
        ks = [k for k in range(len(delta)) if v.mapping[k] == z]
        gz = Polycycle(tuple((gamma.pairs[j][0], gamma.pairs[j][1] // nu) for j in js))
        dz = Polycycle(tuple((delta.pairs[k][0], delta.pairs[k][1] // nu) for k in ks))
        try:
            eta_z, s_z, t_z = recipe(gz, dz, fz)
        except (IncompatibleInput, NotDivisible, PreconditionViolated) as exc:
            raise FiberJointFailed(f"fiber {z}: {exc}") from exc
        if isinstance(eta_z, ExhaustedBound):
            raise FiberJointFailed(f"fiber {z}: search exhausted")
        for i, (w, xi) in enumerate(eta_z.pairs):
            pairs.append((w, xi * nu))
            s_map.append(js[s_z.mapping[i]])
            t_map.append(ks[t_z.mapping[i]])
    eta = Polycycle(tuple(pairs))
    s = PolycycleMorphism(gamma, eta, tuple(s_map))
    t = PolycycleMorphism(delta, eta, tuple(t_map))
    if not (verify_morphism(s) and verify_morphism(t)):
        raise FiberJointFailed("amalgam morphisms failed verification")
    if any(u.mapping[s_map[i]] != v.mapping[t_map[i]] for i in range(len(eta))):
        raise FiberJointFailed("amalgam square does not commute")
    return eta, s, t


# ---------------------------------------------------------------------------
# Closed-form criteria
# ---------------------------------------------------------------------------


def _vector_space_field(system: System) -> str | None:
    """``"Q"``, ``"p=<prime>"`` or None when the system is not a vector space over a prime field."""
    if isinstance(system, (RatVector, RatLex)):
        return "Q"
    if isinstance(system, (IntVector, IntLex, RatMod1)):
        return None
    if isinstance(system, ModInt):
        m = system.m
        return f"p={m}" if m > 1 and all(m % d for d in range(2, math.isqrt(m) + 1)) else None
    if isinstance(system, Product):
        fields = {_vector_space_field(f) for f in system.factors}
        return fields.pop() if len(fields) == 1 else None
    raise UnknownSystem(f"{system} is not in the catalogue")


def rokhlin_criterion(kind: str, e: Any = None, system: System | None = None) -> bool:
    """Closed-form Rokhlin criteria: ``zd`` for integer lattices, ``filling`` for group-filling measures."""
    if kind == "zd":
        coords = [int(x) for x in (e.value if isinstance(e, Element) else e)]
        return any(coords) and math.gcd(*coords) == 1
    if kind == "filling":
        if system is None:
            raise UnknownSystem("a coefficient system is required")
        field_name = _vector_space_field(system)
        if isinstance(e, Element):
            is_zero = e.is_zero
        else:
            is_zero = not any(e if isinstance(e, (tuple, list)) else (e,))
        if is_zero:
            return field_name == "Q"
        return field_name is not None
    raise ValueError(f"unknown criterion {kind!r}")
