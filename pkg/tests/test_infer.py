import random

import pytest

from freezeml.infer import (
    AnnotationEscape,
    CannotUnify,
    InferError,
    UnboundVar,
    gen,
    infer,
    infer_top,
    make_supply,
    split,
)
from freezeml.parser import normalize_type_names, parse_term, parse_type
from freezeml.prelude import build_prelude
from freezeml.statics import StaticsError, wellscoped
from freezeml.syntax import (
    Kind,
    KindEnv,
    Lam,
    NameSupply,
    RefinedKindEnv,
    TVar,
    TypeEnv,
    Var,
    alpha_eq,
    arrow,
    desugar,
    ftv_ordered,
)

from generators import random_surface_term


PRELUDE = build_prelude()


def ty(src: str):
    return parse_type(src)


def infer_str(source: str):
    term = desugar(parse_term(source))
    return infer_top(PRELUDE, term)


def expect_type(source: str, expected: str):
    got = infer_str(source)
    assert alpha_eq(got, ty(expected)), f"{source}: got {got}, want {expected}"


def expect_failure(source: str):
    term = desugar(parse_term(source))
    with pytest.raises((InferError, StaticsError)):
        infer_top(PRELUDE, term)


class TestGenSplit:
    def test_gen_guarded_value(self):
        prefix, generalisable = gen((), ty("a -> a"), parse_term("\\x. x"))
        assert prefix == ("a",)
        assert generalisable == ("a",)

    def test_gen_non_value(self):
        prefix, generalisable = gen((), TVar("a"), parse_term("x y"))
        assert prefix == ()
        assert generalisable == ("a",)

    def test_gen_nothing_generalisable(self):
        prefix, generalisable = gen(("a",), ty("a -> a"), parse_term("\\x. x"))
        assert prefix == ()
        assert generalisable == ()

    def test_split_guarded_value(self):
        prefix, body = split(ty("forall a. a -> a"), parse_term("\\x. x"))
        assert prefix == ("a",)
        assert body == ty("a -> a")

    def test_split_non_guarded(self):
        prefix, body = split(ty("forall a. a -> a"), parse_term("~id"))
        assert prefix == ()
        assert body == ty("forall a. a -> a")

    def test_split_unquantified(self):
        prefix, body = split(ty("Int"), parse_term("\\x. x"))
        assert prefix == ()
        assert body == ty("Int")


class TestInferExamples:
    def test_lambda_residuals(self):
        expect_type("\\x y. y", "a -> b -> b")

    def test_generalised_lambda(self):
        expect_type("$(\\x y. y)", "forall a b. a -> b -> b")

    def test_choose_frozen_id(self):
        expect_type("choose ~id", "(forall a. a -> a) -> (forall a. a -> a)")

    def test_head_ids(self):
        expect_type("head ids", "forall a. a -> a")

    def test_instantiated_head_ids(self):
        expect_type("(head ids)@ 3", "Int")

    def test_bad5_rejected(self):
        expect_failure("let f = \\x. x in ~f 42")

    def test_choose_id_autoprime_rejected(self):
        expect_failure("choose id auto'")

    def test_monomorphic_parameter_rejected(self):
        expect_failure("\\f. (poly ~f, (f 42) + 1)")

    def test_poly_gen_lambda(self):
        expect_type("poly $(\\x. x)", "(Int, Bool)")

    def test_id_auto(self):
        expect_type("id auto", "(forall a. a -> a) -> (forall a. a -> a)")

    def test_ordered_quantifiers_reject_swapped(self):
        gamma = PRELUDE.extend("f", ty("(forall a b. a -> b -> (a, b)) -> Int"))
        ok = desugar(parse_term("f ~pair"))
        assert alpha_eq(infer_top(gamma, ok), ty("Int"))
        bad = desugar(parse_term("f ~pair'"))
        with pytest.raises(InferError):
            infer_top(gamma, bad)

    def test_unbound_variable(self):
        with pytest.raises(UnboundVar):
            infer_str("nonexistent")

    def test_annotation_escape(self):
        # the annotation's quantifier may not leak into the environment:
        # x's type would have to mention the bound variable
        expect_failure("\\x. let (g : forall a. a -> a) = \\(y : a). x in g")


class TestLetRestriction:
    def test_non_value_monomorphised(self):
        # (head ids)@ strips the quantifier, leaving a monomorphic use
        expect_type("choose (head ids)@", "(a -> a) -> (a -> a)")

    def test_non_value_cannot_feed_poly(self):
        expect_failure(
            "\\(bot : forall a. a). let f = bot bot in (poly ~f, (f 42) + 1)"
        )
        expect_failure(
            "\\(bot : forall a. a). let f = bot bot in ((f 42) + 1, poly ~f)"
        )

    def test_guarded_value_generalises(self):
        expect_type("let f = \\x. x in (f 1, f True)", "(Int, Bool)")

    def test_frozen_tail_blocks_generalisation(self):
        # binding a frozen variable re-exports its type verbatim
        expect_type("let g = ~id in poly ~g", "(Int, Bool)")


class TestInferTop:
    def test_returns_normalized_display(self):
        got = infer_top(PRELUDE, desugar(parse_term("\\x y. y")))
        assert ftv_ordered(got) == ["a", "b"]

    def test_id_poly_gen(self):
        expect_type("id poly $(\\x. x)", "(Int, Bool)")


class TestDeterminism:
    def test_same_inputs_same_outputs(self):
        source = "let f = \\x. choose x in (f 1, poly ~id)"
        term = desugar(parse_term(source))
        delta = KindEnv()
        theta = RefinedKindEnv()

        def run():
            supply = make_supply(delta, theta, PRELUDE, term)
            return infer(delta, theta, PRELUDE, term, supply)

        first = run()
        second = run()
        assert first.ty == second.ty
        assert first.env == second.env
        assert first.subst == second.subst

    def test_generated_terms_deterministic(self):
        rng = random.Random(13)
        delta = KindEnv()
        theta = RefinedKindEnv()
        checked = 0
        for _ in range(200):
            term = desugar(random_surface_term(rng, (), rng.randrange(0, 5)))
            try:
                wellscoped(delta, term)
            except StaticsError:
                continue

            def run():
                supply = make_supply(delta, theta, PRELUDE, term)
                return infer(delta, theta, PRELUDE, term, supply)

            try:
                first = run()
            except InferError:
                continue
            second = run()
            assert first.ty == second.ty and first.env == second.env
            checked += 1
        assert checked >= 30


class TestSchemeEdgeCases:
    def test_duplicate_quantifier_names_shadow_innermost(self):
        # a scheme with nested same-name quantifiers instantiates the
        # innermost binder for the body
        gamma = PRELUDE.extend("weird", ty("forall a. forall a. a -> a"))
        term = desugar(parse_term("weird 1"))
        assert infer_top(gamma, term) == ty("Int")

    def test_unused_quantifier_grounds_freely(self):
        gamma = PRELUDE.extend("konst", ty("forall a b. a -> a"))
        term = desugar(parse_term("konst 1"))
        assert infer_top(gamma, term) == ty("Int")


class TestErrorPayloads:
    def test_unify_failure_carries_types_and_span(self):
        term = desugar(parse_term("poly 1"))
        try:
            infer_top(PRELUDE, term)
        except CannotUnify as err:
            assert err.span is not None
            assert err.left is not None and err.right is not None
        else:
            pytest.fail("expected a unification failure")

    def test_unbound_var_carries_span(self):
        term = parse_term("missing 1")
        try:
            infer_top(PRELUDE, term)
        except UnboundVar as err:
            assert err.span is not None
            assert err.name == "missing"
        else:
            pytest.fail("expected an unbound variable failure")


class TestFreshnessHygiene:
    def test_untouched_flexibles_stay_identity(self):
        # flexible variables not free in the environment are untouched by
        # the substitution and absent from the result
        rng = random.Random(101)
        delta = KindEnv()
        checked = 0
        for _ in range(300):
            theta = RefinedKindEnv((("u", Kind.MONO), ("w", Kind.POLY)))
            gamma = PRELUDE.extend("x", arrow(TVar("u"), ty("Int")))
            term = desugar(random_surface_term(rng, ("x",), rng.randrange(0, 4)))
            try:
                wellscoped(delta, term)
                supply = make_supply(delta, theta, gamma, term)
                result = infer(delta, theta, gamma, term, supply)
            except (InferError, StaticsError):
                continue
            assert result.subst.lookup("w") == TVar("w")
            assert "w" not in ftv_ordered(result.ty)
            checked += 1
        assert checked >= 50
