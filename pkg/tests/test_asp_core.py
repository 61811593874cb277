import pytest

from cfgs.asp_core import (
    EQ, GE, LE, NEQ,
    Cmp, Int, Naf, Pos, Program, Rule, Struct, Sym, Var,
    complete, detect_choice_pairs, domains_from_program, dual_name,
    parse_program, serialize, serialize_rule,
)
from cfgs.errors import (
    DualConflictError, RangeRestrictionError, RuleSyntaxError,
    StratificationError, UnboundedVariableError,
)
from cfgs.solver import solve


def proves(dp, literal):
    return next(iter(solve(dp, [literal], limit=1)), None) is not None


# --- parsing -----------------------------------------------------------------

def test_parse_single_fact():
    p = parse_program("f_domain(gender,male).")
    assert len(p.rules) == 1
    r = p.rules[0]
    assert r.head_pred == "f_domain"
    assert r.head_args == (Sym("gender"), Sym("male"))
    assert r.is_fact


def test_parse_empty_input():
    assert parse_program("") == Program([])


def test_parse_interval_domain_rule():
    p = parse_program("f_domain(age,X) :- X #>= 17, X #=< 90.")
    r = p.rules[0]
    assert r.head_args == (Sym("age"), Var("X"))
    assert r.body == (Cmp(GE, Var("X"), Int(17)), Cmp(LE, Var("X"), Int(90)))


def test_parse_naf_and_comparison_literals():
    p = parse_program("p(X) :- q(X), not r(X), X \\= a, X = b.")
    body = p.rules[0].body
    assert isinstance(body[0], Pos)
    assert body[1] == Naf("r", (Var("X"),))
    assert body[2] == Cmp(NEQ, Var("X"), Sym("a"))
    assert body[3] == Cmp(EQ, Var("X"), Sym("b"))


def test_parse_quoted_symbols_and_structs():
    p = parse_program("persons(X,'2') :- wrap(q(X,'Married-civ-spouse')).")
    r = p.rules[0]
    assert r.head_args[1] == Sym("2")
    inner = r.body[0].args[0]
    assert inner == Struct("q", (Var("X"), Sym("Married-civ-spouse")))


def test_parse_comments_and_whitespace():
    p = parse_program("% a comment\n  p(a).   % trailing\n\np(b).\n")
    assert [r.head_args for r in p.rules] == [(Sym("a"),), (Sym("b"),)]


@pytest.mark.parametrize("text,expected", [
    ("p(X) :- X #=< 23.25.", Cmp(LE, Var("X"), Int(23))),
    ("p(X) :- X #< 23.25.", Cmp(LE, Var("X"), Int(23))),
    ("p(X) :- X #> 23.25.", Cmp(GE, Var("X"), Int(24))),
    ("p(X) :- X #>= 23.25.", Cmp(GE, Var("X"), Int(24))),
    ("p(X) :- X #=< 6849.0.", Cmp(LE, Var("X"), Int(6849))),
    ("p(X) :- 23.25 #>= X.", Cmp(LE, Var("X"), Int(23))),
])
def test_fractional_bounds_normalize_to_integers(text, expected):
    assert parse_program(text).rules[0].body == (expected,)


def test_fractional_equality_is_rejected():
    with pytest.raises(RuleSyntaxError):
        parse_program("p(X) :- X = 23.25.")


def test_syntax_error_carries_position():
    with pytest.raises(RuleSyntaxError) as e:
        parse_program("p(a)\nq(b).")
    assert e.value.line == 2


def test_range_restriction_rejects_unbound_naf_variable():
    with pytest.raises(RangeRestrictionError) as e:
        parse_program("p(X) :- not q(Y).")
    assert e.value.variable == "Y"


def test_range_restriction_rejects_unbound_arith_variable():
    with pytest.raises(RangeRestrictionError):
        parse_program("p(X) :- X #= Y+1.")


def test_stratification_error_names_the_cycle():
    with pytest.raises(StratificationError) as e:
        parse_program("p :- not q. q :- not p.")
    assert {"p", "q"} <= set(e.value.cycle)


def test_choice_pair_is_not_a_stratification_error():
    p = parse_program(
        "f_domain(color,red). f_domain(color,blue).\n"
        "not_pick(X) :- f_domain(color,Y), pick(Y), Y \\= X.\n"
        "pick(X) :- not not_pick(X).")
    pairs = detect_choice_pairs(p)
    assert len(pairs) == 1
    assert pairs[0].member_pred == "pick"
    assert pairs[0].domain_key == Sym("color")


# --- serialization -----------------------------------------------------------

def test_serialize_empty_program():
    assert serialize(Program([])) == ""


def test_serialize_single_fact():
    p = Program([Rule("f_domain", (Sym("gender"), Sym("male")))])
    assert serialize(p) == "f_domain(gender,male).\n"


def test_serialize_interval_rule():
    text = "f_domain(age,X) :- X #>= 17, X #=< 90."
    assert serialize_rule(parse_program(text).rules[0]) == text


def test_serialize_quotes_non_identifier_symbols():
    p = Program([Rule("persons", (Var("X"), Sym("2")))])
    assert serialize(p) == "persons(X,'2').\n"


@pytest.mark.parametrize("text", [
    "f_domain(gender,male).",
    "f_domain(age,X) :- X #>= 17, X #=< 90.",
    "married(A) :- f_domain(relationship,A), pre_relationship(A), lite_married(A).",
    "q(X) :- r(X, f(X, a)), not s(X), X \\= b.",
    "measure(Z1,Z2,Z3,X) :- f_domain(restrict_C,Z1), f_domain(restrict_C,Z2), "
    "f_domain(restrict_N,Z3), Q3 #= Z3*Z3, X #= Z1+Z2+Q3.",
])
def test_round_trip(text):
    p = parse_program(text, validate=False)
    assert parse_program(serialize(p), validate=False) == p


# --- completion --------------------------------------------------------------

def test_dual_of_single_clause_over_missing_predicate():
    dp = complete(parse_program("p :- q."))
    assert proves(dp, Naf("p", ()))
    assert not proves(dp, Pos("p", ()))


def test_zero_clause_predicate_gets_unconditional_dual():
    dp = complete(parse_program("p :- r(a)."))
    # r has no clauses: not_r holds for anything.
    assert proves(dp, Pos(dual_name("r"), (Sym("zzz"),)))


LITE = """
f_domain(relationship,husband).
f_domain(relationship,wife).
f_domain(relationship,unmarried).
lite_married(X) :- X = husband.
lite_married(X) :- X = wife.
"""


def test_dual_of_decision_clauses_matches_ground_truth():
    from cfgs import oracle
    program = parse_program(LITE)
    dp = complete(program)
    # not_lite_married succeeds exactly on the domain minus {husband, wife}.
    for value in ("husband", "wife", "unmarried"):
        expected = oracle.ground_truth(program, Pos("lite_married", (Sym(value),)))
        assert proves(dp, Pos("lite_married", (Sym(value),))) is expected
        assert proves(dp, Pos("not_lite_married", (Sym(value),))) is not expected


def test_every_predicate_has_a_dual():
    dp = complete(parse_program(LITE))
    for pred in dp.original.predicates:
        assert dp.is_known(dual_name(pred)), pred


def test_completion_is_deterministic():
    a = complete(parse_program(LITE))
    b = complete(parse_program(LITE))
    assert a.duals == b.duals
    assert a == b


def test_dual_with_bounded_body_variable():
    dp = complete(parse_program(
        "f_domain(color,red). f_domain(color,blue).\n"
        "q(red).\n"
        "p :- f_domain(color,Y), q(Y)."))
    assert proves(dp, Pos("p", ()))
    assert not proves(dp, Naf("p", ()))
    dp2 = complete(parse_program(
        "f_domain(color,red). f_domain(color,blue).\n"
        "p :- f_domain(color,Y), q(Y)."))
    assert proves(dp2, Naf("p", ()))


def test_unbounded_body_variable_is_rejected():
    with pytest.raises(UnboundedVariableError):
        complete(parse_program("p :- q(Y).\nq(Z) :- Z #>= 1."))


def test_conflicting_not_definition_is_rejected():
    with pytest.raises(DualConflictError):
        complete(parse_program("foo(a). not_foo(b)."))


def test_domains_from_program():
    doms = domains_from_program(parse_program(
        "f_domain(gender,male). f_domain(gender,female).\n"
        "f_domain(age,X) :- X #>= 17, X #=< 90."))
    assert doms["gender"] == ("sym", ("male", "female"))
    assert doms["age"] == ("int", 17, 90)
