from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from homspec.coeff import (
    EMPTY,
    IntLex,
    IntVector,
    ModInt,
    Product,
    RatLex,
    RatMod1,
    RatVector,
    arith,
    between,
    div_exact,
    divisions,
    dump_element,
    load_element,
    opt_sum,
    parse_system,
)
from homspec.errors import EmptyInterval, NotDivisible, NotOrdered, NotUnique, SystemMismatch

fractions = st.fractions(min_value=-20, max_value=20, max_denominator=12)


def rat_lex(d: int):
    s = RatLex(d)
    return st.tuples(*[fractions] * d).map(lambda c: s.wrap(tuple(c)))


class TestArithmetic:
    def test_examples(self):
        V = IntVector(2)
        assert V(1, 2) + V(3, -1) == V(4, 1)
        M = RatMod1()
        assert M("3/4") + M("1/2") == M("1/4")
        assert opt_sum([]) is EMPTY
        assert arith("sum", [], system=V) == V.zero_element

    def test_empty_is_neutral_and_distinct_from_zero(self):
        Q = RatLex(1)
        assert EMPTY + Q(1) == Q(1)
        assert Q(1) + EMPTY == Q(1)
        assert EMPTY != Q(0)
        assert opt_sum([EMPTY, Q(2), EMPTY]) == Q(2)

    def test_mismatch(self):
        with pytest.raises(SystemMismatch):
            RatLex(1)(1) + IntVector(1)(1)

    def test_canonical_residues(self):
        assert ModInt(5)(7) == ModInt(5)(2)
        assert -ModInt(5)(2) == ModInt(5)(3)
        assert RatMod1()("5/4") == RatMod1()("1/4")

    @given(rat_lex(2), rat_lex(2), rat_lex(2))
    def test_group_laws(self, x, y, z):
        assert x + y == y + x
        assert (x + y) + z == x + (y + z)
        assert x + (-x) == x.system.zero_element

    @given(st.integers(), st.integers(), st.integers())
    def test_mod_laws(self, a, b, c):
        M = ModInt(6)
        assert (M(a) + M(b)) + M(c) == M(a) + (M(b) + M(c))
        assert M(a) + M(b) == M(b) + M(a)

    def test_json_roundtrip(self):
        for s in (IntVector(2), RatVector(2), ModInt(3), RatMod1(), RatLex(2), IntLex(1)):
            assert parse_system(s.to_json()) == s
            x = next(iter(s.elements()))
            assert load_element(s, dump_element(x)) == x
        P = Product((RatLex(1), ModInt(2)))
        assert parse_system(P.to_json()) == P
        assert load_element(RatLex(1), None) is EMPTY
        assert dump_element(EMPTY) is None


class TestCapabilities:
    def test_flags(self):
        assert RatLex(2).is_densely_ordered and RatLex(2).is_divisible
        assert IntLex(1).is_ordered and not IntLex(1).is_densely_ordered
        assert not IntVector(1).is_ordered
        assert RatVector(3).is_divisible and RatMod1().is_divisible
        assert not ModInt(4).is_divisible
        assert all(s.is_group for s in (IntVector(1), RatVector(1), ModInt(2), RatMod1(), RatLex(1), IntLex(2)))

    def test_lex_order(self):
        Q = RatLex(2)
        assert Q(0, 5) < Q(1, -5)
        assert not Q(1, 0) < Q(0, 9)


class TestBetween:
    def test_examples(self):
        Q = RatLex(2)
        assert between(Q(0, 0), Q(1, 0)) == Q("1/2", 0)
        assert between(Q(0, 0), Q(0, 1)) == Q(0, "1/2")
        with pytest.raises(EmptyInterval):
            between(RatLex(1)(1), RatLex(1)(1))
        with pytest.raises(NotOrdered):
            between(IntLex(1)(0), IntLex(1)(2))

    @given(rat_lex(3), rat_lex(3))
    def test_strictly_between(self, a, b):
        assume(a != b)
        lo, hi = (a, b) if a < b else (b, a)
        mid = between(lo, hi)
        assert lo < mid < hi


class TestDivision:
    def test_examples(self):
        assert div_exact(RatVector(2)(1, 3), 3) == RatVector(2)("1/3", 1)
        with pytest.raises(NotDivisible):
            div_exact(IntVector(1)(3), 2)
        with pytest.raises(NotUnique):
            div_exact(ModInt(4)(2), 2)
        assert divisions(ModInt(4)(2), 2) == [ModInt(4)(1), ModInt(4)(3)]

    def test_rational_circle_is_never_unique(self):
        # n*y = x has n solutions in Q/Z.
        assert len(divisions(RatMod1()("1/2"), 3)) == 3
        with pytest.raises(NotUnique):
            div_exact(RatMod1()("1/2"), 3)

    @given(rat_lex(2), st.integers(1, 7))
    def test_division_inverts_multiplication(self, x, n):
        assert div_exact(x.scale(Fraction(n)), n) == x

    @given(st.integers(-50, 50), st.integers(1, 7))
    def test_integer_division(self, k, n):
        Z = IntVector(1)
        assert div_exact(Z(k * n), n) == Z(k)

    @given(st.integers(0, 6), st.integers(1, 7))
    def test_mod_divisions_are_all_solutions(self, a, n):
        M = ModInt(7)
        sols = divisions(M(a), n)
        brute = [M(y) for y in range(7) if M(y).scale(Fraction(n)) == M(a)]
        assert sols == brute
