import random

import pytest
from hypothesis import given, settings, strategies as st

from freezeml.parser import parse_term, parse_type
from freezeml.syntax import (
    Forall,
    Freeze,
    Gen,
    Inst,
    App,
    Kind,
    Lam,
    Let,
    TermClass,
    TVar,
    TypeEnv,
    Var,
    alpha_eq,
    classify,
    decompose,
    desugar,
    foralls,
    ftv_ordered,
    is_guarded,
    is_gval,
    is_monotype,
    is_value,
    t_int,
)

from generators import random_surface_term, random_type


def ty(src: str):
    return parse_type(src)


class TestKind:
    def test_join_total(self):
        assert Kind.MONO.join(Kind.MONO) is Kind.MONO
        assert Kind.MONO.join(Kind.POLY) is Kind.POLY
        assert Kind.POLY.join(Kind.MONO) is Kind.POLY
        assert Kind.POLY.join(Kind.POLY) is Kind.POLY

    def test_order(self):
        assert Kind.MONO.le(Kind.POLY)
        assert not Kind.POLY.le(Kind.MONO)


class TestFtvOrdered:
    def test_first_occurrence_order(self):
        assert ftv_ordered(ty("(a -> b) -> (a -> c)")) == ["a", "b", "c"]

    def test_closed(self):
        assert ftv_ordered(t_int) == []

    def test_bound_excluded(self):
        assert ftv_ordered(ty("forall a. a -> b")) == ["b"]

    def test_shadowing(self):
        assert ftv_ordered(Forall("a", ty("a -> b"))) == ["b"]

    def test_no_duplicates_no_bound(self):
        rng = random.Random(7)
        for _ in range(300):
            t = random_type(rng, ("m",), ("p",), depth=4)
            free = ftv_ordered(t)
            assert len(free) == len(set(free))
            # q-prefixed names are only introduced bound
            assert all(not v.startswith("q") for v in free)


class TestSyntacticClasses:
    def test_monotype_excludes_any_quantifier(self):
        assert is_monotype(ty("Int -> [a]"))
        assert not is_monotype(ty("[forall a. a -> a]"))
        assert not is_monotype(ty("forall a. a"))

    def test_guarded_only_constrains_the_root(self):
        assert is_guarded(ty("Int"))
        assert is_guarded(ty("[forall a. a -> a]"))
        assert not is_guarded(ty("forall a. a -> a"))


class TestTypeEnv:
    def test_lookup_returns_rightmost(self):
        env = TypeEnv((("x", t_int), ("x", ty("Bool"))))
        assert env.lookup("x") == ty("Bool")

    def test_extend_shadows(self):
        env = TypeEnv((("x", t_int),)).extend("x", ty("Bool"))
        assert env.lookup("x") == ty("Bool")
        assert len(env) == 2


class TestDecompose:
    def test_round_trip(self):
        rng = random.Random(11)
        for _ in range(300):
            t = random_type(rng, ("m",), ("p",), depth=4)
            prefix, body = decompose(t)
            assert foralls(prefix, body) == t
            assert not isinstance(body, Forall)


class TestClassify:
    def test_lambda_is_guarded(self):
        assert classify(parse_term("\\x. x")) is TermClass.GVAL

    def test_frozen_var_is_value_not_guarded(self):
        assert classify(Freeze("id")) is TermClass.VAL

    def test_let_with_plain_tail(self):
        term = parse_term("let y = ~id in y")
        assert classify(term) is TermClass.GVAL

    def test_let_with_frozen_tail(self):
        term = parse_term("let y = \\x. x in ~y")
        assert classify(term) is TermClass.VAL

    def test_application_is_nonval(self):
        assert classify(parse_term("id id")) is TermClass.NONVAL

    def test_gval_implies_val_generated(self):
        rng = random.Random(23)
        for _ in range(500):
            term = desugar(random_surface_term(rng, (), rng.randrange(0, 5)))
            if is_gval(term):
                assert is_value(term)


class TestAlphaEq:
    def test_renaming(self):
        assert alpha_eq(ty("forall a. a -> a"), ty("forall b. b -> b"))

    def test_order_of_quantifiers_matters(self):
        assert not alpha_eq(ty("forall a b. a -> b"), ty("forall b a. a -> b"))

    def test_free_variables_are_rigid(self):
        assert not alpha_eq(ty("a -> a"), ty("b -> b"))

    def test_shadowing(self):
        left = Forall("a", Forall("a", TVar("a")))
        right = Forall("b", Forall("c", TVar("c")))
        wrong = Forall("b", Forall("c", TVar("b")))
        assert alpha_eq(left, right)
        assert not alpha_eq(left, wrong)

    def test_reflexive_on_generated(self):
        rng = random.Random(3)
        for _ in range(200):
            t = random_type(rng, ("m",), ("p",), depth=4)
            assert alpha_eq(t, t)


class TestDesugar:
    def test_gen_expands_to_frozen_let(self):
        term = desugar(parse_term("$(\\x. x)"))
        assert isinstance(term, Let)
        assert isinstance(term.body, Freeze)
        assert term.body.name == term.var

    def test_inst_expands_to_plain_let(self):
        term = desugar(parse_term("(head ids)@"))
        assert isinstance(term, Let)
        assert isinstance(term.body, Var)
        assert term.body.name == term.var

    def test_no_sugar_unchanged(self):
        term = parse_term("\\x. x")
        assert desugar(term) == term

    def test_gen_of_value_is_val_not_gval(self):
        term = desugar(parse_term("$(\\x. x)"))
        assert classify(term) is TermClass.VAL

    def test_inst_of_value_is_gval(self):
        term = desugar(parse_term("(\\x. x)@"))
        assert classify(term) is TermClass.GVAL

    def test_fresh_names_avoid_capture(self):
        # A user cannot write %-names, but nested expansions must not collide.
        term = desugar(parse_term("$(\\x. $(\\y. y))"))
        outer = term
        inner = outer.bound.body  # \x. <inner let>
        assert outer.var != inner.var
