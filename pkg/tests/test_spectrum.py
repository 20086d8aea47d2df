import itertools
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from homspec.coeff import IntLex, IntVector, ModInt, RatLex
from homspec.errors import BadIndex, BadRestriction, PremiseViolated, TooLarge
from homspec.spectrum import (
    AXIOMS,
    Fragment,
    Full,
    Good,
    LinearPospec,
    Restriction,
    SkewPower,
    SkewProduct,
    build,
    check_axioms,
    check_h2,
    check_pospec,
    classify_zero,
    delta_member,
    enumerate_h2_small,
    h2_to_h3,
    h2_to_pospec,
    h3_to_h2,
    index_tuples,
    member,
    pospec_to_h2,
    project_spectrum,
    witness_sp,
)

Q = RatLex(1)
Z = IntVector(1)
GOOD = Good(Q, Q(1))
unit = st.fractions(min_value=0, max_value=1, max_denominator=24)


def q(*xs):
    return tuple(Q(x) for x in xs)


class TestMembership:
    def test_examples(self):
        assert member(GOOD, q("1/2", "1/4", "1/4"))
        assert not member(GOOD, q("1/2", "1/2", "1/2"))
        Z2 = ModInt(2)
        assert member(Full(Z2, Z2(1)), (Z2(0), Z2(0), Z2(1)))

    def test_delta(self):
        assert delta_member(GOOD, q(*["1/4"] * 4))
        assert not delta_member(GOOD, q("1/2", "1/2", 0, 0))
        assert delta_member(Full(Z, Z(5)), (Z(5), Z(0), Z(0)))
        assert delta_member(GOOD, q(1))
        assert delta_member(GOOD, q("1/3", "2/3"))

    @given(unit, unit, unit)
    def test_good_rule(self, a, b, c):
        assert member(GOOD, q(a, b, c)) == (a > 0 and b > 0 and c > 0 and a + b + c == 1)

    @given(unit, unit)
    def test_symmetry(self, a, b):
        t = q(a, b, 1 - a - b)
        verdicts = {member(GOOD, p) for p in itertools.permutations(t)}
        assert len(verdicts) == 1

    def test_enumerators_are_sound(self):
        Z3 = ModInt(3)
        handles = [GOOD, Full(Z, Z(2)), Full(Z3, Z3(1)), SkewProduct([GOOD, Full(Z, Z(0))]), SkewPower(GOOD, 2)]
        for spec in handles:
            e = spec.total
            for t in spec.triples(40):
                assert member(spec, t)
                assert t[0] + t[1] + t[2] == e
            for a, b in spec.pairs(20):
                assert spec.pair_member(a, b)

    def test_skew_product(self):
        sp = SkewProduct([GOOD, GOOD])
        P = sp.system
        t = [P.wrap(((F(a),), (F(b),))) for a, b in (("1/2", "1/3"), ("1/4", "1/3"), ("1/4", "1/3"))]
        assert member(sp, t)
        bad = [P.wrap(((F(a),), (F(b),))) for a, b in (("1/2", 0), ("1/4", "1/2"), ("1/4", "1/2"))]
        assert not member(sp, bad)

    def test_restriction(self):
        r = Restriction(GOOD, Q("1/2"), Q("1/2"))
        assert member(r, q("1/4", "1/8", "1/8"))
        assert not member(r, q("1/4", "1/8", "1/4"))
        with pytest.raises(BadRestriction):
            Restriction(GOOD, Q("1/2"), Q("1/3"))

    def test_projection(self):
        sp = SkewProduct([GOOD, Full(Z, Z(0))])
        assert project_spectrum(sp, 2).to_json() == Full(Z, Z(0)).to_json()
        assert project_spectrum(sp, 1).to_json() == GOOD.to_json()
        with pytest.raises(BadIndex):
            project_spectrum(sp, 3)

    def test_json_roundtrip(self):
        handles = [
            GOOD,
            Full(ModInt(3), ModInt(3)(1)),
            Fragment.of(Z, [[1, 1, 1]]),
            SkewProduct([GOOD, Full(Z, Z(0))]),
            SkewPower(GOOD, 3),
            Restriction(GOOD, Q("1/2"), Q("1/2")),
        ]
        for h in handles:
            again = build(h.to_json())
            assert again.to_json() == h.to_json()
            assert all(member(again, t) for t in h.triples(10))


class TestAxioms:
    def test_good_passes_everything(self):
        report = check_axioms(GOOD, bound=200)
        assert report.all_pass, report.to_json()
        assert [r.axiom for r in report.results] == list(AXIOMS)

    def test_fragment_fails_sp4a(self):
        frag = Fragment.of(Z, [[1, 1, 1]])
        report = check_axioms(frag, bound=10)
        r = report["Sp4a"]
        assert r.verdict == "fail"
        # The counterexample is re-checkable by membership alone.
        a, b, c = r.counterexample[:3]
        assert member(frag, (a, b, c))
        assert not any(member(frag, (x, y, z)) for (x, y, z) in frag.triples(10) if z == a + b)

    def test_zero_fragment(self):
        frag = Fragment.of(Z, [[0, 0, 0]])
        assert check_axioms(frag, AXIOMS[:6], 10).overall == "pass"

    def test_full_spectra(self):
        for spec in (Full(Z, Z(2)), Full(ModInt(3), ModInt(3)(1))):
            report = check_axioms(spec, AXIOMS[:6], bound=60)
            assert report.all_pass

    def test_witness_closed_forms(self):
        x, y, z, u, v, w = witness_sp("Sp4b", Full(Z, Z(2)), [Z(1)] * 4 + [Z(0)])
        assert (x, u, z, w) == (Z(1), Z(0), Z(0), Z(1))
        assert z + w == Z(1)
        assert witness_sp("Sp4", GOOD, q(*["1/4"] * 4, "1/2")) == q(*["1/8"] * 4)
        assert member(GOOD, q("1/8", "1/8", "3/4"))
        bs, ws = witness_sp("Sp5", GOOD, q("1/3", "2/3"))
        assert bs == q(*["1/4"] * 4) and ws == q(*["1/12"] * 4)
        assert member(GOOD, q("1/4", "1/12", "2/3"))

    def test_witness_premise(self):
        with pytest.raises(PremiseViolated):
            witness_sp("Sp4b", Full(Z, Z(2)), [Z(1)] * 5)


class TestBinarySpectra:
    def test_full_mod2_is_everything(self):
        Z2 = ModInt(2)
        h = h3_to_h2(Full(Z2, Z2(1)))
        assert all(h.member(Z2(a), Z2(b)) for a in range(2) for b in range(2))

    def test_pospec_conversion(self):
        h = pospec_to_h2(LinearPospec(Q, Q(1)))
        assert h.e == Q(1)
        assert h.member(Q("1/4"), Q("1/2"))
        assert not h.member(Q("1/2"), Q("1/2"))
        p = h2_to_pospec(h)
        assert p.interior(Q("1/3")) and not p.interior(Q(1))

    @given(unit, unit)
    def test_roundtrip_h3_h2_h3(self, a, b):
        again = h2_to_h3(h3_to_h2(GOOD))
        t = q(a, b, 1 - a - b)
        assert member(again, t) == member(GOOD, t)

    def test_small_groups(self):
        assert len(enumerate_h2_small(ModInt(1))) == 1
        Z2 = ModInt(2)
        found = {(h.e, frozenset(h.enumerate())) for h in enumerate_h2_small(Z2)}
        everything = frozenset((Z2(a), Z2(b)) for a in range(2) for b in range(2))
        for expected in [(Z2(0), frozenset({(Z2(0), Z2(0))})), (Z2(0), everything), (Z2(1), everything)]:
            assert expected in found
        with pytest.raises(TooLarge):
            enumerate_h2_small(ModInt(5))

    def test_small_groups_satisfy_axioms(self):
        for h in enumerate_h2_small(ModInt(3)):
            assert all(check_h2(h).values())
            assert check_axioms(h2_to_h3(h), AXIOMS[:6], bound=40).all_pass


class TestPospecs:
    def test_integer_interval_has_least_element(self):
        report = check_pospec(LinearPospec(Z, Z(5)), bound=20)
        assert report.overall == "fail"
        assert report["NoLeast"].counterexample == (IntLex(1)(1),)

    def test_rationals_supersolid(self):
        report = check_pospec(LinearPospec(Q, Q(1)), bound=20, supersolid=True)
        assert report.all_pass

    def test_lex_plane_not_supersolid(self):
        Q2 = RatLex(2)
        report = check_pospec(LinearPospec(Q2, Q2(1, 0)), bound=20, supersolid=True, probes=[Q2(0, 1)], chain_bound=12)
        assert report.verdict("PoSp5") == "unresolved"
        assert all(r.verdict == "pass" for r in report.results if r.axiom != "PoSp5")


class TestZeroClassification:
    def test_not_applicable(self):
        assert classify_zero(GOOD) is None

    def test_finite_group(self):
        Z3 = ModInt(3)
        out = classify_zero(Full(Z3, Z3(0)))
        assert out.finite_elements == [Z3(0), Z3(1), Z3(2)]

    def test_even_integers(self):
        frag = Fragment.of(Z, [[x, y, -x - y] for x in range(-6, 7, 2) for y in range(-6, 7, 2)])
        assert classify_zero(frag).generators == [Z(2)]


def test_index_tuples_order():
    got = list(itertools.islice(index_tuples(2), 9))
    assert got == [(0, 0), (0, 1), (1, 0), (1, 1), (0, 2), (1, 2), (2, 0), (2, 1), (2, 2)]
