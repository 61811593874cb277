"""Problem specs and the compiled counterfactual engine.

A ProblemSpec declares features with domains and default mutability,
causal rules tying feature values together, and a rule-based decision
model for the undesired outcome.  compile_spec() turns it into a logic
program: domain facts and interval rules, pre/post-world property rules
with mutual exclusivity for categorical features, realistic-instance
rules carrying the causal constraints, the decision clauses plus a
pre-world wrapper, the counterfactual rule (the wrapper with its decision
component negated), restriction-code comparison rules, a cost rule
summing categorical codes and squared numeric codes, and a final rule
joining original, codes, counterfactual and cost.

explain() answers the joined rule for a concrete original instance,
walking restriction-code vectors in ascending-cost order, so results come
back cheapest-first and search can stop at a cost bound or result limit.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Optional, Union

from .asp_core import (
    EQ, GE, GT, LE, LT, NEQ,
    BinOp, Cmp, Int, Is, Naf, Pos, Program, Rule, Struct, Sym, Var,
    complete, validate_program,
)
from .errors import (
    DomainError,
    IllegalCode,
    InfeasibleRestrictions,
    NotUndesired,
    SpecValidationError,
    UnrealisticInstance,
    UnresolvedCode,
)
from .solver import NumericSet, SymbolSet, solve as _solve

# Compiled queries legitimately explore large joins before the restriction
# rules prune them; give engine-issued queries plenty of headroom.
_STEP_LIMIT = 5_000_000


def solve(dp, query, limit=None):
    return _solve(dp, query, limit=limit, step_limit=_STEP_LIMIT)

__all__ = [
    "FeatureSpec", "Condition", "NotAux", "DecisionClause", "AuxDef",
    "DecisionModel", "CausalRule", "ProblemSpec", "CounterfactualPair",
    "compile_spec", "completed_spec", "build_counterfactual_rule",
    "classify", "enumerate_undesired", "enumerate_counterfactuals",
    "check_restriction", "cost", "explain",
    "FREE", "normalize_restrictions",
]

CATEGORICAL = "categorical"
NUMERIC = "numeric"
FREE = "free"

_MUTABILITIES = ("free", "immutable", "increase_only", "decrease_only")
_CONDITION_OPS = (EQ, NEQ, GE, LE, GT, LT)

# Predicate names the compiler owns; feature/aux/target names must stay clear.
_RESERVED = {"f_domain", "restrict_C", "restrict_N", "compare_C", "compare_N",
             "id_restrict", "measure", "refined", "realistic", "not"}

_NAME_LETTERS = "ABCDEFGHIJKLMNOPQRST"


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str                        # "categorical" | "numeric"
    values: tuple = ()               # categorical domain, ordered
    lo: Optional[int] = None         # numeric bounds, inclusive
    hi: Optional[int] = None
    mutability: str = "free"

    @property
    def is_numeric(self):
        return self.kind == NUMERIC


@dataclass(frozen=True)
class Condition:
    """feature <op> value, with op one of = \\= #>= #=< #> #<."""
    feature: str
    op: str
    value: Union[str, int]


@dataclass(frozen=True)
class NotAux:
    """Negation-as-failure of an auxiliary decision predicate."""
    aux: str


ClauseCondition = Union[Condition, NotAux]


@dataclass(frozen=True)
class DecisionClause:
    conditions: tuple                # of ClauseCondition


@dataclass(frozen=True)
class AuxDef:
    name: str
    clauses: tuple                   # of DecisionClause


@dataclass(frozen=True)
class DecisionModel:
    """Classifies "undesired" iff at least one clause holds."""
    target: str
    clauses: tuple                   # of DecisionClause
    aux: tuple = ()                  # of AuxDef


@dataclass(frozen=True)
class CausalRule:
    """guard feature = value admits only worlds satisfying the conditions."""
    feature: str
    value: str
    conditions: tuple = ()           # of Condition (over other features)


@dataclass(frozen=True)
class ProblemSpec:
    features: tuple                  # of FeatureSpec
    decision: DecisionModel
    causal_rules: tuple = ()         # of CausalRule
    name: str = "spec"

    def feature(self, name: str) -> FeatureSpec:
        for f in self.features:
            if f.name == name:
                return f
        raise DomainError(f"unknown feature: {name}")

    def __post_init__(self):
        _validate_spec(self)


@dataclass(frozen=True)
class CounterfactualPair:
    original: tuple                  # of (feature, ground value)
    codes: tuple                     # of (feature, resolved code)
    counterfactual: tuple            # of (feature, value or constraint set)
    cost: int

    def original_dict(self):
        return dict(self.original)

    def codes_dict(self):
        return dict(self.codes)

    def counterfactual_dict(self):
        return dict(self.counterfactual)


# --- validation --------------------------------------------------------------

import re as _re

_IDENT = _re.compile(r"[a-z][a-z0-9_]*\Z")


def _validate_spec(spec: ProblemSpec):
    names = []
    for i, f in enumerate(spec.features):
        where = f"features[{i}]"
        if not _IDENT.match(f.name or ""):
            raise SpecValidationError(f"{where}.name",
                                      f"{f.name!r} is not a lowercase identifier")
        if f.name in _RESERVED or f.name in names:
            raise SpecValidationError(f"{where}.name", f"{f.name!r} is reserved or duplicate")
        names.append(f.name)
        if f.kind == CATEGORICAL:
            if not f.values:
                raise SpecValidationError(f"{where}.values", "empty categorical domain")
            if len(set(f.values)) != len(f.values):
                raise SpecValidationError(f"{where}.values", "duplicate values")
            if not all(isinstance(v, str) and v for v in f.values):
                raise SpecValidationError(f"{where}.values", "values must be non-empty strings")
            if f.mutability in ("increase_only", "decrease_only"):
                raise SpecValidationError(f"{where}.mutability",
                                          "directional mutability needs a numeric feature")
        elif f.kind == NUMERIC:
            if f.lo is None or f.hi is None or f.lo > f.hi:
                raise SpecValidationError(f"{where}.range", f"bad range [{f.lo}, {f.hi}]")
            if f.lo < -(2 ** 63) or f.hi > 2 ** 63 - 1:
                raise SpecValidationError(f"{where}.range", "outside the 64-bit range")
        else:
            raise SpecValidationError(f"{where}.kind", f"unknown kind {f.kind!r}")
        if f.mutability not in _MUTABILITIES:
            raise SpecValidationError(f"{where}.mutability", f"unknown {f.mutability!r}")
    if len(spec.features) > len(_NAME_LETTERS):
        raise SpecValidationError("features", f"at most {len(_NAME_LETTERS)} features supported")

    def check_condition(cond, where, guard_feature=None):
        if isinstance(cond, NotAux):
            if cond.aux not in {a.name for a in spec.decision.aux}:
                raise SpecValidationError(where, f"unknown auxiliary predicate {cond.aux!r}")
            return
        try:
            f = spec.feature(cond.feature)
        except DomainError:
            raise SpecValidationError(where, f"unknown feature {cond.feature!r}")
        if guard_feature is not None and cond.feature == guard_feature:
            raise SpecValidationError(where, "causal condition targets its own guard feature")
        if cond.op not in _CONDITION_OPS:
            raise SpecValidationError(where, f"unknown operator {cond.op!r}")
        if f.kind == CATEGORICAL:
            if cond.op not in (EQ, NEQ):
                raise SpecValidationError(where, "ordered comparison on a categorical feature")
            if cond.value not in f.values:
                raise SpecValidationError(where, f"{cond.value!r} not in domain of {f.name}")
        else:
            if not isinstance(cond.value, int):
                raise SpecValidationError(where, "numeric condition needs an integer bound")

    for i, cr in enumerate(spec.causal_rules):
        where = f"causal_rules[{i}]"
        try:
            g = spec.feature(cr.feature)
        except DomainError:
            raise SpecValidationError(where, f"unknown feature {cr.feature!r}")
        if g.kind != CATEGORICAL:
            raise SpecValidationError(where, "causal guard must be a categorical feature")
        if cr.value not in g.values:
            raise SpecValidationError(where, f"{cr.value!r} not in domain of {g.name}")
        for j, cond in enumerate(cr.conditions):
            check_condition(cond, f"{where}.conditions[{j}]", guard_feature=cr.feature)

    d = spec.decision
    if not _IDENT.match(d.target or "") or d.target in _RESERVED or d.target in names:
        raise SpecValidationError("decision.target", f"bad target name {d.target!r}")
    aux_names = [a.name for a in d.aux]
    if len(set(aux_names)) != len(aux_names):
        raise SpecValidationError("decision.aux", "duplicate auxiliary names")
    for a in d.aux:
        if not _IDENT.match(a.name) or a.name in _RESERVED or a.name in names:
            raise SpecValidationError("decision.aux", f"bad auxiliary name {a.name!r}")
    for ci, cl in enumerate(d.clauses):
        for j, cond in enumerate(cl.conditions):
            check_condition(cond, f"decision.clauses[{ci}].conditions[{j}]")
    # Aux references must name declared auxiliaries; cycles surface as
    # stratification errors when the program is compiled.
    declared = set(aux_names)
    for a in d.aux:
        for ci, cl in enumerate(a.clauses):
            for j, cond in enumerate(cl.conditions):
                where = f"decision.aux[{a.name}].clauses[{ci}].conditions[{j}]"
                if isinstance(cond, NotAux):
                    if cond.aux not in declared:
                        raise SpecValidationError(
                            where, f"unknown auxiliary predicate {cond.aux!r}")
                else:
                    check_condition(cond, where)


# --- compilation -------------------------------------------------------------

def _letter(i: int) -> str:
    return _NAME_LETTERS[i]


def _pre_var(i):
    return Var(_letter(i))


def _post_var(i):
    return Var(_letter(i) + "1")


def _value_term(f: FeatureSpec, value):
    if f.kind == CATEGORICAL:
        return Sym(str(value))
    return Int(int(value))


def _aux_features(spec: ProblemSpec) -> dict:
    """Feature lists per auxiliary predicate, in declaration order,
    closed over referenced auxiliaries."""
    from .errors import StratificationError
    by_name = {a.name: a for a in spec.decision.aux}
    feats: dict = {}
    in_progress: list = []

    def collect(a: AuxDef):
        if a.name in feats:
            return feats[a.name]
        if a.name in in_progress:
            raise StratificationError(in_progress + [a.name])
        in_progress.append(a.name)
        used = set()
        for cl in a.clauses:
            for cond in cl.conditions:
                if isinstance(cond, NotAux):
                    used |= set(collect(by_name[cond.aux]))
                else:
                    used.add(cond.feature)
        in_progress.pop()
        order = tuple(f.name for f in spec.features if f.name in used)
        feats[a.name] = order
        return order

    for a in spec.decision.aux:
        collect(a)
    return feats


def used_features(spec: ProblemSpec) -> tuple:
    """Features the decision model depends on, in declaration order."""
    aux_feats = _aux_features(spec)
    used = set()
    for cl in spec.decision.clauses:
        for cond in cl.conditions:
            if isinstance(cond, NotAux):
                used |= set(aux_feats[cond.aux])
            else:
                used.add(cond.feature)
    return tuple(f.name for f in spec.features if f.name in used)


def _condition_literal(cond: Condition, var_of: Mapping[str, Var], spec) -> Cmp:
    f = spec.feature(cond.feature)
    return Cmp(cond.op, var_of[cond.feature], _value_term(f, cond.value))


def _clause_body(clause: DecisionClause, var_of, spec, aux_feats) -> tuple:
    body = []
    for cond in clause.conditions:
        if isinstance(cond, NotAux):
            args = tuple(var_of[f] for f in aux_feats[cond.aux])
            body.append(Naf(cond.aux, args))
        else:
            body.append(_condition_literal(cond, var_of, spec))
    return tuple(body)


def _causal_groups(spec: ProblemSpec):
    """Per guard feature (declaration order): (pred name, constrained
    feature order, rules)."""
    grouped: dict = {}
    for cr in spec.causal_rules:
        grouped.setdefault(cr.feature, []).append(cr)
    out = []
    for f in spec.features:
        if f.name not in grouped:
            continue
        rules = grouped[f.name]
        cs = set()
        for cr in rules:
            cs |= {c.feature for c in cr.conditions}
        order = tuple(g.name for g in spec.features if g.name in cs)
        pred = "causal_" + "_".join((f.name,) + order)
        out.append((f.name, pred, order, tuple(rules)))
    return out


@lru_cache(maxsize=128)
def compile_spec(spec: ProblemSpec) -> Program:
    """Emit the full logic program for a problem spec."""
    rules = []
    n = len(spec.features)

    # Domains.
    for f in spec.features:
        if f.kind == CATEGORICAL:
            for v in f.values:
                rules.append(Rule("f_domain", (Sym(f.name), Sym(v))))
        else:
            x = Var("X")
            rules.append(Rule("f_domain", (Sym(f.name), x),
                              (Cmp(GE, x, Int(f.lo)), Cmp(LE, x, Int(f.hi)))))

    # World properties: numeric features are single-valued implicitly;
    # categorical features get the mutual-exclusivity pair per world.
    for f in spec.features:
        x, y = Var("X"), Var("Y")
        if f.kind == NUMERIC:
            for w in ("pre_", "post_"):
                rules.append(Rule(w + f.name, (x,), (Pos("f_domain", (Sym(f.name), x)),)))
        else:
            for w in ("pre_", "post_"):
                rules.append(Rule("not_" + w + f.name, (x,),
                                  (Pos("f_domain", (Sym(f.name), y)),
                                   Pos(w + f.name, (y,)),
                                   Cmp(NEQ, y, x))))
                rules.append(Rule(w + f.name, (x,),
                                  (Naf("not_" + w + f.name, (x,)),)))

    # Causal predicates.
    causal = _causal_groups(spec)
    for gname, pred, order, crs in causal:
        for cr in crs:
            if len(order) == 1:
                cvars = {order[0]: Var("Y")}
            else:
                cvars = {fn: Var(f"Y{i+1}") for i, fn in enumerate(order)}
            head = (Sym(cr.value),) + tuple(cvars[fn] for fn in order)
            body = tuple(_condition_literal(c, cvars, spec) for c in cr.conditions)
            rules.append(Rule(pred, head, body))

    # Realistic-instance rules for both worlds.
    feature_index = {f.name: i for i, f in enumerate(spec.features)}
    for w, mkvar in (("pre", _pre_var), ("post", _post_var)):
        allvars = {f.name: mkvar(i) for i, f in enumerate(spec.features)}
        body = [Pos("f_domain", (Sym(f.name), allvars[f.name])) for f in spec.features]
        body += [Pos(f"{w}_{f.name}", (allvars[f.name],)) for f in spec.features]
        for gname, pred, order, _ in causal:
            body.append(Pos(pred, (allvars[gname],) + tuple(allvars[fn] for fn in order)))
        rules.append(Rule(f"{w}_realistic",
                          tuple(allvars[f.name] for f in spec.features), tuple(body)))

    # Decision model: auxiliary predicates, then the lite clauses.
    aux_feats = _aux_features(spec)
    used = used_features(spec)
    for a in spec.decision.aux:
        order = aux_feats[a.name]
        var_of = {fn: Var(f"X{i+1}") for i, fn in enumerate(order)}
        for cl in a.clauses:
            rules.append(Rule(a.name, tuple(var_of[fn] for fn in order),
                              _clause_body(cl, var_of, spec, aux_feats)))
    lite = "lite_" + spec.decision.target
    if len(used) == 1:
        lite_vars = {used[0]: Var("X")}
    else:
        lite_vars = {fn: Var(f"X{i+1}") for i, fn in enumerate(used)}
    for cl in spec.decision.clauses:
        rules.append(Rule(lite, tuple(lite_vars[fn] for fn in used),
                          _clause_body(cl, lite_vars, spec, aux_feats)))

    # Pre-world wrapper and the counterfactual rule.
    pre_used = {fn: _pre_var(feature_index[fn]) for fn in used}
    body = []
    for fn in used:
        body.append(Pos("f_domain", (Sym(fn), pre_used[fn])))
        body.append(Pos("pre_" + fn, (pre_used[fn],)))
    body.append(Pos(lite, tuple(pre_used[fn] for fn in used)))
    rules.append(Rule(spec.decision.target,
                      tuple(pre_used[fn] for fn in used), tuple(body)))
    rules.append(build_counterfactual_rule(spec))

    # Restriction codes and comparison rules.
    has_cat = any(f.kind == CATEGORICAL for f in spec.features)
    has_num = any(f.kind == NUMERIC for f in spec.features)
    pre_x, post_x, z = Var("Pre_X"), Var("Post_X"), Var("Z")
    if has_cat:
        rules.append(Rule("f_domain", (Sym("restrict_C"), Int(0))))
        rules.append(Rule("f_domain", (Sym("restrict_C"), Int(1))))
        rules.append(Rule("compare_C", (pre_x, post_x, z),
                          (Pos("f_domain", (Sym("restrict_C"), z)),
                           Cmp(EQ, z, Int(0)), Cmp(EQ, pre_x, post_x))))
        rules.append(Rule("compare_C", (pre_x, post_x, z),
                          (Pos("f_domain", (Sym("restrict_C"), z)),
                           Cmp(EQ, z, Int(1)), Cmp(NEQ, pre_x, post_x))))
    if has_num:
        rules.append(Rule("f_domain", (Sym("restrict_N"), Int(0))))
        rules.append(Rule("f_domain", (Sym("restrict_N"), Int(1))))
        rules.append(Rule("f_domain", (Sym("restrict_N"), Int(-1))))
        rules.append(Rule("compare_N", (pre_x, post_x, z),
                          (Pos("f_domain", (Sym("restrict_N"), z)),
                           Cmp(EQ, z, Int(0)), Cmp(EQ, pre_x, post_x))))
        rules.append(Rule("compare_N", (pre_x, post_x, z),
                          (Pos("f_domain", (Sym("restrict_N"), z)),
                           Cmp(EQ, z, Int(1)), Cmp(LT, pre_x, post_x))))
        rules.append(Rule("compare_N", (pre_x, post_x, z),
                          (Pos("f_domain", (Sym("restrict_N"), z)),
                           Cmp(EQ, z, Int(-1)), Cmp(GT, pre_x, post_x))))

    # Per-pair restriction rule over all features.
    pre_vars = tuple(_pre_var(i) for i in range(n))
    post_vars = tuple(_post_var(i) for i in range(n))
    z_vars = tuple(Var(f"Z{i+1}") for i in range(n))
    body = []
    for i, f in enumerate(spec.features):
        cmp_pred = "compare_N" if f.kind == NUMERIC else "compare_C"
        body.append(Pos(cmp_pred, (pre_vars[i], post_vars[i], z_vars[i])))
    rules.append(Rule("id_restrict",
                      (Struct("original", pre_vars),
                       Struct("id", z_vars),
                       Struct("counterfactual", post_vars)),
                      tuple(body)))

    # Cost: categorical codes plus squared numeric codes.
    cost_var = Var("X")
    body = []
    terms = []
    for i, f in enumerate(spec.features):
        key = "restrict_N" if f.kind == NUMERIC else "restrict_C"
        body.append(Pos("f_domain", (Sym(key), z_vars[i])))
    for i, f in enumerate(spec.features):
        if f.kind == NUMERIC:
            q = Var(f"Q{i+1}")
            body.append(Is(q, BinOp("*", z_vars[i], z_vars[i])))
            terms.append(q)
        else:
            terms.append(z_vars[i])
    total = terms[0] if terms else Int(0)
    for t in terms[1:]:
        total = BinOp("+", total, t)
    body.append(Is(cost_var, total))
    rules.append(Rule("measure", z_vars + (cost_var,), tuple(body)))

    # The joined original/codes/counterfactual/cost rule.
    rules.append(Rule("refined",
                      (Struct("original", pre_vars),
                       Struct("id", z_vars),
                       Struct("counterfactual", post_vars),
                       cost_var),
                      (Pos(spec.decision.target, tuple(pre_used[fn] for fn in used)),
                       Pos("pre_realistic", pre_vars),
                       Pos("cf_" + spec.decision.target,
                           tuple(_post_var(feature_index[fn]) for fn in used)),
                       Pos("post_realistic", post_vars),
                       Pos("id_restrict",
                           (Struct("original", pre_vars),
                            Struct("id", z_vars),
                            Struct("counterfactual", post_vars))),
                       Pos("measure", z_vars + (cost_var,)))))

    program = Program(rules)
    validate_program(program)
    return program


def build_counterfactual_rule(spec: ProblemSpec) -> Rule:
    """The counterfactual rule: post-world properties for the decision's
    features with the decision component negated."""
    feature_index = {f.name: i for i, f in enumerate(spec.features)}
    used = used_features(spec)
    post_used = {fn: _post_var(feature_index[fn]) for fn in used}
    body = []
    for fn in used:
        body.append(Pos("f_domain", (Sym(fn), post_used[fn])))
        body.append(Pos("post_" + fn, (post_used[fn],)))
    body.append(Naf("lite_" + spec.decision.target, tuple(post_used[fn] for fn in used)))
    return Rule("cf_" + spec.decision.target,
                tuple(post_used[fn] for fn in used), tuple(body))


@lru_cache(maxsize=128)
def completed_spec(spec: ProblemSpec):
    return complete(compile_spec(spec))


# --- instances ---------------------------------------------------------------

def _check_value(f: FeatureSpec, value):
    if f.kind == CATEGORICAL:
        if not isinstance(value, str) or value not in f.values:
            raise DomainError(f"{f.name}: {value!r} not in {list(f.values)}")
    else:
        if isinstance(value, bool) or not isinstance(value, int):
            raise DomainError(f"{f.name}: {value!r} is not an integer")
        if not (f.lo <= value <= f.hi):
            raise DomainError(f"{f.name}: {value} outside [{f.lo}, {f.hi}]")


def _instance_terms(spec: ProblemSpec, instance: Mapping) -> tuple:
    unknown = set(instance) - {f.name for f in spec.features}
    if unknown:
        raise DomainError(f"unknown feature: {sorted(unknown)[0]}")
    terms = []
    for f in spec.features:
        if f.name not in instance:
            raise DomainError(f"missing feature: {f.name}")
        _check_value(f, instance[f.name])
        terms.append(_value_term(f, instance[f.name]))
    return tuple(terms)


def _from_solver_value(v):
    if isinstance(v, Sym):
        return v.name
    if isinstance(v, Int):
        return v.value
    if isinstance(v, (NumericSet, SymbolSet)):
        return v
    raise TypeError(v)


def _is_realistic(spec: ProblemSpec, terms) -> bool:
    dp = completed_spec(spec)
    q = [Pos("pre_realistic", terms)]
    return next(iter(solve(dp, q, limit=1)), None) is not None


def classify(spec: ProblemSpec, instance: Mapping) -> str:
    """"undesired" iff some decision clause holds for the instance."""
    terms = _instance_terms(spec, instance)
    if not _is_realistic(spec, terms):
        raise UnrealisticInstance(f"instance violates causal rules: {dict(instance)}")
    used = used_features(spec)
    dp = completed_spec(spec)
    index = {f.name: i for i, f in enumerate(spec.features)}
    lite = "lite_" + spec.decision.target
    if not dp.is_known(lite):
        return "desired"
    q = [Pos(lite, tuple(terms[index[fn]] for fn in used))]
    hit = next(iter(solve(dp, q, limit=1)), None)
    return "undesired" if hit is not None else "desired"


def _world_query(spec: ProblemSpec, world: str):
    used = used_features(spec)
    index = {f.name: i for i, f in enumerate(spec.features)}
    if world == "pre":
        mk, wrapper = _pre_var, spec.decision.target
    else:
        mk, wrapper = _post_var, "cf_" + spec.decision.target
    allvars = tuple(mk(i) for i in range(len(spec.features)))
    usedvars = tuple(mk(index[fn]) for fn in used)
    return [Pos(wrapper, usedvars), Pos(f"{world}_realistic", allvars)], allvars


def _instances(spec, world, limit) -> Iterator[dict]:
    dp = completed_spec(spec)
    query, allvars = _world_query(spec, world)
    for ans in solve(dp, query, limit=limit):
        yield {f.name: _from_solver_value(ans.bindings[v.name])
               for f, v in zip(spec.features, allvars)}


def enumerate_undesired(spec: ProblemSpec, limit: Optional[int] = None):
    """Realistic instances receiving the undesired outcome, as symbolic
    (possibly interval-valued) assignments."""
    return _instances(spec, "pre", limit)


def enumerate_counterfactuals(spec: ProblemSpec, limit: Optional[int] = None):
    """Realistic instances receiving the desired outcome."""
    return _instances(spec, "post", limit)


# --- restrictions and cost ---------------------------------------------------

def check_restriction(kind: str, pre, post, code: int) -> bool:
    """Relation a resolved code asserts between pre- and post-values."""
    if kind == CATEGORICAL:
        if code not in (0, 1):
            raise IllegalCode(f"categorical codes are 0 or 1, got {code}")
        return (pre == post) if code == 0 else (pre != post)
    if kind == NUMERIC:
        if code not in (0, 1, -1):
            raise IllegalCode(f"numeric codes are 0, 1 or -1, got {code}")
        if code == 0:
            return pre == post
        return (pre < post) if code == 1 else (pre > post)
    raise IllegalCode(f"unknown feature kind {kind!r}")


def cost(spec: ProblemSpec, codes: Mapping[str, int]) -> int:
    """Sum of categorical codes plus squared numeric codes; equals the
    number of changed features."""
    total = 0
    for f in spec.features:
        if f.name not in codes:
            raise UnresolvedCode(f"no code for feature {f.name}")
        z = codes[f.name]
        if isinstance(z, str):
            raise UnresolvedCode(f"unresolved code for feature {f.name}: {z!r}")
        if f.kind == CATEGORICAL:
            if z not in (0, 1):
                raise IllegalCode(f"{f.name}: categorical code {z}")
            total += z
        else:
            if z not in (0, 1, -1):
                raise IllegalCode(f"{f.name}: numeric code {z}")
            total += z * z
    return total


_CODE_WORDS = {"free": FREE, "inc": "inc", "dec": "dec",
               "increase": "inc", "decrease": "dec", "fixed": 0}


def normalize_restrictions(spec: ProblemSpec, restrictions: Optional[Mapping]) -> dict:
    """Allowed restriction codes per feature, in canonical order 0, 1, -1.

    Unmentioned features fall back to their declared default mutability.
    Accepted request values: 0 / 1 / -1, "free", "inc", "dec".
    """
    restrictions = dict(restrictions or {})
    unknown = set(restrictions) - {f.name for f in spec.features}
    if unknown:
        raise DomainError(f"unknown feature: {sorted(unknown)[0]}")
    allowed = {}
    for f in spec.features:
        if f.name in restrictions:
            raw = restrictions[f.name]
            if isinstance(raw, str):
                if raw.lstrip("-").isdigit():
                    raw = int(raw)
                else:
                    raw = _CODE_WORDS.get(raw.lower())
                    if raw is None:
                        raise IllegalCode(f"{f.name}: unknown restriction "
                                          f"{restrictions[f.name]!r}")
        else:
            raw = {"free": FREE, "immutable": 0,
                   "increase_only": "inc", "decrease_only": "dec"}[f.mutability]
        if f.kind == CATEGORICAL:
            options = {FREE: (0, 1), 0: (0,), 1: (1,)}
        else:
            options = {FREE: (0, 1, -1), 0: (0,), 1: (1,), -1: (-1,),
                       "inc": (0, 1), "dec": (0, -1)}
        if raw not in options:
            raise IllegalCode(f"{f.name}: code {raw!r} not legal for {f.kind} feature")
        allowed[f.name] = options[raw]
    return allowed


def _code_vectors(spec: ProblemSpec, allowed: dict, max_cost: int):
    """Yield (cost, codes-tuple) in ascending cost; within one cost level,
    changed-feature subsets enumerate in feature order and numeric
    directions in order 1, -1."""
    names = [f.name for f in spec.features]
    mandatory = [i for i, n in enumerate(names) if 0 not in allowed[n]]
    changeable = [i for i, n in enumerate(names)
                  if any(c != 0 for c in allowed[n]) and i not in mandatory]
    for level in range(0, max_cost + 1):
        extra = level - len(mandatory)
        if extra < 0:
            continue
        for combo in itertools.combinations(changeable, extra):
            changed = sorted(mandatory + list(combo))
            per_feature = []
            for i in changed:
                dirs = tuple(c for c in allowed[names[i]] if c != 0)
                per_feature.append(dirs)
            for dirs in itertools.product(*per_feature):
                codes = [0] * len(names)
                for i, d in zip(changed, dirs):
                    codes[i] = d
                yield level, tuple(codes)


def explain(spec: ProblemSpec, original: Mapping,
            restrictions: Optional[Mapping] = None,
            cost_bound: Optional[int] = None,
            limit: Optional[int] = None,
            minimal_only: bool = False) -> list:
    """All counterfactual pairs for an undesired original instance,
    cheapest first.

    Restriction codes fix the per-feature relation between original and
    counterfactual; free codes are resolved by the engine to the relation
    actually observed, so cost counts real changes.
    """
    terms = _instance_terms(spec, original)
    if not _is_realistic(spec, terms):
        raise UnrealisticInstance(f"instance violates causal rules: {dict(original)}")
    if classify(spec, original) == "desired":
        raise NotUndesired("instance already receives the desired outcome")

    allowed = normalize_restrictions(spec, restrictions)
    if all(allowed[f.name] == (0,) for f in spec.features):
        raise InfeasibleRestrictions(
            "every feature is pinned; flipping the outcome needs at least one change")
    for f in spec.features:
        if f.kind == CATEGORICAL and 0 not in allowed[f.name] and len(f.values) < 2:
            raise InfeasibleRestrictions(
                f"{f.name} must change but its domain has a single value")

    dp = completed_spec(spec)
    n = len(spec.features)
    index = {f.name: i for i, f in enumerate(spec.features)}
    used = used_features(spec)
    max_cost = n if cost_bound is None else max(0, min(cost_bound, n))
    cf_vars = tuple(Var(f"CF{i+1}") for i in range(n))
    cost_var = Var("COST")

    pairs = []
    seen = set()
    stop_after_level = None
    for level, codes in _code_vectors(spec, allowed, max_cost):
        if stop_after_level is not None and level > stop_after_level:
            break
        if limit is not None and len(pairs) >= limit:
            break
        # The conjuncts of the final joined rule, reordered so that each
        # feature's restriction comparison lands right after its domain
        # literal and prunes the counterfactual join immediately.  The
        # pre-world conjuncts are invariant across code vectors and were
        # already checked above.  Same answers as querying the joined
        # rule, in ordered, bounded search.
        code_terms = tuple(Int(c) for c in codes)
        query = []
        for i, f in enumerate(spec.features):
            cmp_pred = "compare_N" if f.kind == NUMERIC else "compare_C"
            query.append(Pos("f_domain", (Sym(f.name), cf_vars[i])))
            query.append(Pos(cmp_pred, (terms[i], cf_vars[i], code_terms[i])))
        query.append(Pos("cf_" + spec.decision.target,
                         tuple(cf_vars[index[fn]] for fn in used)))
        query.append(Pos("post_realistic", cf_vars))
        query.append(Pos("measure", code_terms + (cost_var,)))
        for ans in solve(dp, query):
            got_cost = ans.bindings[cost_var.name]
            assert isinstance(got_cost, Int) and got_cost.value == level
            cf = tuple((f.name, _from_solver_value(ans.bindings[v.name]))
                       for f, v in zip(spec.features, cf_vars))
            key = (codes, tuple((k, _freeze(v)) for k, v in cf))
            if key in seen:
                continue
            seen.add(key)
            pairs.append(CounterfactualPair(
                original=tuple((f.name, original[f.name]) for f in spec.features),
                codes=tuple((f.name, c) for f, c in zip(spec.features, codes)),
                counterfactual=cf,
                cost=level,
            ))
            if minimal_only and stop_after_level is None:
                stop_after_level = level
            if limit is not None and len(pairs) >= limit:
                break
    return pairs


def _freeze(v):
    if isinstance(v, NumericSet):
        return ("I", v.intervals)
    if isinstance(v, SymbolSet):
        return ("S", tuple(sorted(v.values)))
    return v
