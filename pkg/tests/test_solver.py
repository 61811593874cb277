import pytest

from cfgs.asp_core import (
    EQ, GE, GT, LE, LT, NEQ,
    Cmp, Int, Naf, Pos, Rule, Sym, Var, complete, parse_program,
)
from cfgs.engine import compile_spec, completed_spec
from cfgs.errors import (
    DepthLimitExceeded, TraceUnavailable, TypeMismatch, UnknownPredicateError,
)
from cfgs.solver import (
    EMPTY_SUBST, NumericSet, Subst, SymbolSet,
    assert_constraint, solve, trace, unify,
)

X, Y = Var("X"), Var("Y")


def interval(lo, hi):
    return NumericSet(((lo, hi),))


def constrained(var, c):
    return Subst({var: c})


# --- unify ---------------------------------------------------------------

def test_unify_binds_variable_to_symbol():
    s = unify(X, Sym("husband"), EMPTY_SUBST)
    assert s.walk(X) == Sym("husband")


def test_unify_distinct_symbols_fails():
    assert unify(Sym("husband"), Sym("wife"), EMPTY_SUBST) is None


def test_unify_respects_interval_constraint():
    s = constrained(X, interval(17, 90))
    assert unify(X, Int(7), s) is None
    s2 = unify(X, Int(40), s)
    assert s2.walk(X) == Int(40)


def test_unify_is_symmetric():
    left = unify(X, Sym("a"), EMPTY_SUBST)
    right = unify(Sym("a"), X, EMPTY_SUBST)
    assert left.walk(X) == right.walk(X) == Sym("a")


def test_unify_intersects_two_constrained_variables():
    s = Subst({X: interval(10, 30), Y: interval(20, 50)})
    s2 = unify(X, Y, s)
    assert s2 is not None
    assert s2.value_of(X) == interval(20, 30)
    assert s2.value_of(Y) == interval(20, 30)


# --- assert_constraint ----------------------------------------------------

def test_narrow_interval_with_strict_lower_bound():
    s = constrained(X, interval(17, 90))
    s2 = assert_constraint(Cmp(GT, X, Int(30)), s)
    assert s2.value_of(X) == interval(31, 90)


def test_empty_interval_fails():
    s = constrained(X, interval(17, 90))
    assert assert_constraint(Cmp(LE, X, Int(10)), s) is None


def test_symbol_set_narrows_on_disequality():
    s = constrained(Y, SymbolSet(("male", "female")))
    s2 = assert_constraint(Cmp(NEQ, Y, Sym("female")), s)
    assert s2.walk(Y) == Sym("male")


def test_interval_splits_on_disequality():
    s = constrained(X, interval(17, 90))
    s2 = assert_constraint(Cmp(NEQ, X, Int(40)), s)
    assert s2.value_of(X) == NumericSet(((17, 39), (41, 90)))


def test_ordered_comparison_over_symbols_raises():
    with pytest.raises(TypeMismatch):
        assert_constraint(Cmp(GE, Sym("a"), Int(1)), EMPTY_SUBST)
    with pytest.raises(TypeMismatch):
        assert_constraint(Cmp(LT, X, Sym("b")),
                          constrained(X, SymbolSet(("a", "b"))))


def test_fresh_variable_opens_full_interval():
    s = assert_constraint(Cmp(GE, X, Int(17)), EMPTY_SUBST)
    s = assert_constraint(Cmp(LE, X, Int(90)), s)
    assert s.value_of(X) == interval(17, 90)


# --- numeric sets -----------------------------------------------------------

def test_numeric_set_normalization_merges_adjacent():
    assert NumericSet.normalize([(5, 7), (8, 9)]) == interval(5, 9)
    assert NumericSet.normalize([(8, 9), (5, 6), (1, 2)]) == \
        NumericSet(((1, 2), (5, 6), (8, 9)))  # holes at 3..4 and 7 persist
    assert NumericSet.normalize([(5, 4)]) is None


def test_numeric_set_ops():
    s = interval(1, 10)
    assert s.remove(5) == NumericSet(((1, 4), (6, 10)))
    assert s.narrow(GE, 7) == interval(7, 10)
    assert s.intersect(interval(8, 20)) == interval(8, 10)
    assert interval(3, 3).singleton() == 3
    assert list(NumericSet(((1, 2), (5, 5))).values()) == [1, 2, 5]


# --- solve -----------------------------------------------------------------

def test_solve_enumerates_wrapper_answers_in_clause_order(married):
    dp = completed_spec(married)
    answers = [a.bindings["A"] for a in solve(dp, [Pos("married", (Var("A"),))])]
    assert answers == [Sym("husband"), Sym("wife")]


def test_solve_ground_domain_membership(married):
    dp = completed_spec(married)
    assert len(list(solve(dp, [Pos("f_domain", (Sym("age"), Int(25)))]))) == 1
    assert list(solve(dp, [Pos("f_domain", (Sym("age"), Int(16)))])) == []


def test_solve_negated_decision_component(married):
    dp = completed_spec(married)
    assert len(list(solve(dp, [Naf("lite_married", (Sym("unmarried"),))]))) == 1
    assert list(solve(dp, [Naf("lite_married", (Sym("husband"),))])) == []


def test_solve_interval_answer(married):
    dp = completed_spec(married)
    [ans] = solve(dp, [Pos("f_domain", (Sym("age"), Var("X")))])
    assert ans.bindings["X"] == NumericSet(((17, 90),))


def test_solve_unknown_predicate_raises(married):
    dp = completed_spec(married)
    with pytest.raises(UnknownPredicateError):
        list(solve(dp, [Pos("nonsense", (Var("A"),))]))


def test_solve_limit_and_determinism(married):
    dp = completed_spec(married)
    q = [Pos("f_domain", (Sym("relationship"), Var("A")))]
    first = [a.bindings for a in solve(dp, q)]
    second = [a.bindings for a in solve(dp, q)]
    assert first == second
    assert len(list(solve(dp, q, limit=2))) == 2


def test_solve_deduplicates_answers():
    dp = complete(parse_program("p(a). p(a). p(b)."))
    answers = [a.bindings["Z"] for a in solve(dp, [Pos("p", (Var("Z"),))])]
    assert answers == [Sym("a"), Sym("b")]


def test_step_budget_catches_runaway_recursion():
    dp = complete(parse_program("p :- p."))
    with pytest.raises(DepthLimitExceeded):
        list(solve(dp, [Pos("p", ())], step_limit=500))


def test_naf_coherence_on_ground_atoms(married_small):
    from cfgs.asp_core import dual_name
    dp = completed_spec(married_small)
    atoms = [Pos("married", (Sym(v),)) for v in ("husband", "wife", "unmarried")]
    atoms += [Pos("lite_married", (Sym(v),)) for v in ("husband", "wife", "unmarried")]
    atoms += [Pos("f_domain", (Sym("age"), Int(n))) for n in (16, 17, 20, 21)]
    for atom in atoms:
        pos = next(iter(solve(dp, [atom], limit=1)), None) is not None
        neg = next(iter(solve(dp, [Pos(dual_name(atom.pred), atom.args)],
                              limit=1)), None) is not None
        assert pos != neg, atom


def test_answer_soundness_against_ground_truth(married_small):
    from cfgs import oracle
    from helpers import expand_instance
    program = compile_spec(married_small)
    dp = completed_spec(married_small)
    allvars = (Var("A"), Var("B"), Var("C"))
    query = [Pos("married", (Var("A"),)), Pos("pre_realistic", allvars)]
    for ans in solve(dp, query):
        inst = {v.name: ans.bindings[v.name] for v in allvars}
        samples = list(expand_instance(inst))[:10]
        for sample in samples:
            values = dict(sample)
            args = tuple(values[v.name] if isinstance(values[v.name], (Sym, Int))
                         else (Sym(values[v.name]) if isinstance(values[v.name], str)
                               else Int(values[v.name]))
                         for v in allvars)
            assert oracle.ground_truth(program, Pos("married", (args[0],)))
            assert oracle.ground_truth(program, Pos("pre_realistic", args))


# --- traces ------------------------------------------------------------------

def test_trace_of_wrapper_answer_uses_decision_clause(married):
    dp = completed_spec(married)
    [ans] = solve(dp, [Pos("married", (Sym("husband"),))], trace=True)
    root = trace(ans)
    assert root.goal == Pos("married", (Sym("husband"),))
    assert isinstance(root.rule, Rule)
    lite = [c for c in root.children if getattr(c.goal, "pred", None) == "lite_married"]
    assert len(lite) == 1
    assert lite[0].goal == Pos("lite_married", (Sym("husband"),))
    assert isinstance(lite[0].rule, Rule)
    assert lite[0].rule.body == (Cmp(EQ, Var("X"), Sym("husband")),)


def test_trace_of_fact_query_is_a_single_leaf(married):
    dp = completed_spec(married)
    [ans] = solve(dp, [Pos("f_domain", (Sym("gender"), Sym("male")))], trace=True)
    root = trace(ans)
    assert root.rule == "fact"
    assert root.children == ()


def test_trace_of_negated_decision_has_disequality_leaves(married):
    dp = completed_spec(married)
    [ans] = solve(dp, [Naf("lite_married", (Sym("unmarried"),))], trace=True)
    root = trace(ans)
    assert root.rule == "dual"
    leaves = root.leaves()
    assert [l.rule for l in leaves] == ["constraint", "constraint"]
    assert [l.goal for l in leaves] == [
        Cmp(NEQ, Sym("unmarried"), Sym("husband")),
        Cmp(NEQ, Sym("unmarried"), Sym("wife")),
    ]


def test_trace_unavailable_when_disabled(married):
    dp = completed_spec(married)
    [ans] = solve(dp, [Pos("married", (Sym("husband"),))])
    with pytest.raises(TraceUnavailable):
        trace(ans)
