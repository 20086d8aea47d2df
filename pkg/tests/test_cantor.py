import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homspec.cantor import (
    ONE,
    ZERO,
    Clopen,
    boolean_op,
    canonicalize,
    check_partition,
    common_refinement,
    cylinders,
    generated_atoms,
    is_partition,
    split,
)
from homspec.errors import MalformedWord, NotAPartition

words = st.text(alphabet="01", max_size=5)
clopens = st.lists(words, max_size=6).map(canonicalize)


def cells(c: Clopen, depth: int = 6) -> frozenset[str]:
    """Brute-force set of depth-``depth`` cylinders inside ``c``."""
    return frozenset(
        "".join(bits)
        for bits in itertools.product("01", repeat=depth)
        if any("".join(bits).startswith(w) for w in c.words)
    )


class TestCanonicalize:
    def test_sibling_merge(self):
        assert canonicalize({"00", "01"}) == Clopen.of("0")

    def test_prefix_absorption(self):
        assert canonicalize({"0", "00"}) == Clopen.of("0")

    def test_full_merge_to_one(self):
        assert canonicalize({"1", "000", "001", "01"}) == ONE

    def test_empty_is_zero(self):
        assert canonicalize([]) == ZERO
        assert ZERO.is_zero and ONE.is_one

    def test_malformed(self):
        with pytest.raises(MalformedWord):
            canonicalize(["012"])

    def test_json_roundtrip(self):
        c = Clopen.of("00", "1")
        assert Clopen.from_json(c.to_json()) == c
        assert ONE.to_json() == [""]
        assert ZERO.to_json() == []

    @given(st.lists(words, max_size=6))
    def test_idempotent_and_order_free(self, ws):
        c = canonicalize(ws)
        assert canonicalize(c.words) == c
        assert canonicalize(list(reversed(ws))) == c

    @given(st.lists(words, max_size=6))
    def test_antichain_and_merged(self, ws):
        c = canonicalize(ws)
        for a, b in itertools.permutations(c.words, 2):
            assert not b.startswith(a)
        for w in c.words:
            if w:
                sibling = w[:-1] + ("1" if w[-1] == "0" else "0")
                assert sibling not in c.words

    @given(st.lists(words, max_size=6))
    def test_same_point_set(self, ws):
        expected = frozenset(
            "".join(b) for b in itertools.product("01", repeat=6) if any("".join(b).startswith(w) for w in ws)
        )
        assert cells(canonicalize(ws)) == expected


class TestBooleanOps:
    def test_examples(self):
        assert boolean_op("meet", Clopen.of("0"), Clopen.of("01")) == Clopen.of("01")
        assert boolean_op("complement", Clopen.of("0")) == Clopen.of("1")
        assert boolean_op("join", Clopen.of("00"), Clopen.of("01")) == Clopen.of("0")
        assert boolean_op("diff", ONE, Clopen.of("1")) == Clopen.of("0")

    @given(clopens, clopens, clopens)
    def test_laws(self, a, b, c):
        assert (a & b) & c == a & (b & c)
        assert (a | b) | c == a | (b | c)
        assert a & (b | c) == (a & b) | (a & c)
        assert ~(a | b) == ~a & ~b
        assert ~(a & b) == ~a | ~b
        assert a - b == a & ~b
        assert a | ~a == ONE and (a & ~a).is_zero

    @given(clopens, clopens)
    def test_against_point_sets(self, a, b):
        assert cells(a & b) == cells(a) & cells(b)
        assert cells(a | b) == cells(a) | cells(b)
        assert cells(a - b) == cells(a) - cells(b)


class TestPartitions:
    def test_relative_partition(self):
        assert common_refinement([[Clopen.of("0")]]) == [Clopen.of("0")]

    def test_refinement_examples(self):
        p = [Clopen.of("0"), Clopen.of("1")]
        assert common_refinement([p, p]) == p
        q = [Clopen.of("00", "1"), Clopen.of("01")]
        assert common_refinement([p, q]) == [Clopen.of("00"), Clopen.of("01"), Clopen.of("1")]
        assert common_refinement([q]) == sorted(q, key=lambda c: c.sort_key())

    def test_refinement_rejects_non_partitions(self):
        with pytest.raises(NotAPartition):
            common_refinement([[Clopen.of("0")], [Clopen.of("1")]])
        with pytest.raises(NotAPartition):
            common_refinement([])
        with pytest.raises(NotAPartition):
            check_partition([Clopen.of("0"), Clopen.of("0", "1")])

    def test_split_examples(self):
        assert split(Clopen.of("0"), 2) == [Clopen.of("00"), Clopen.of("01")]
        assert split(Clopen.of("0"), 3) == [Clopen.of("00"), Clopen.of("010"), Clopen.of("011")]
        assert split(ONE, 1) == [ONE]

    @given(clopens.filter(lambda c: not c.is_zero), st.integers(1, 6))
    def test_split_is_partition(self, a, k):
        parts = split(a, k)
        assert len(parts) == k
        assert is_partition(parts, a)

    def test_generated_atoms_examples(self):
        assert generated_atoms([Clopen.of("0")]) == [Clopen.of("0"), Clopen.of("1")]
        assert generated_atoms([]) == [ONE]
        got = generated_atoms([Clopen.of("0"), Clopen.of("00", "10")])
        assert got == [Clopen.of(w) for w in ("00", "01", "10", "11")]

    @given(st.lists(clopens, max_size=4))
    def test_generated_atoms_properties(self, gens):
        atoms = generated_atoms(gens)
        assert is_partition(atoms)
        for g in gens:
            below = [a for a in atoms if g.contains(a)]
            assert all(a.disjoint(g) for a in atoms if a not in below)
            joined = ZERO
            for a in below:
                joined = joined | a
            assert joined == g

    @given(st.lists(st.lists(clopens, max_size=3), min_size=1, max_size=3))
    def test_refinement_refines(self, gen_sets):
        partitions = [generated_atoms(g) for g in gen_sets]
        out = common_refinement(partitions)
        assert is_partition(out)
        for p in partitions:
            for part in out:
                assert sum(1 for q in p if q.contains(part)) == 1

    def test_cylinders(self):
        assert cylinders(2) == [Clopen.of(w) for w in ("00", "01", "10", "11")]
