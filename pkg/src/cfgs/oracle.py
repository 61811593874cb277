"""Brute-force reference implementation for small domains.

Everything here is computed by exhaustive ground evaluation, independently
of the parser-completion-solver pipeline: ground_truth materializes rule
extensions bottom-up by stratum, and brute_classify / brute_pairs evaluate
problem specs directly over the ground grid.  Shared dataclasses (the rule
AST, ProblemSpec) are consumed as plain data; none of the engine's
evaluation code is reused.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Optional

from .asp_core import Cmp, Int, Is, Naf, Pos, Program, Rule, Struct, Sym, Var, BinOp
from .engine import (
    CATEGORICAL, Condition, NotAux, ProblemSpec, CounterfactualPair,
    normalize_restrictions,
)
from .errors import DomainError, GridTooLarge, UnboundedVariableError, UnrealisticInstance

__all__ = ["GroundGrid", "ground_truth", "brute_classify", "brute_pairs"]

EXACT_LIMIT = 10_000
_EXTENSION_LIMIT = 500_000


# --- ground grid -------------------------------------------------------------

@dataclass
class GroundGrid:
    """Full list of ground values per feature.  Exact mode requires the
    total combination count to stay within EXACT_LIMIT; stride-sampled
    grids are for property tests only, never for exact equivalence."""

    spec: ProblemSpec
    stride: Optional[int] = None

    def __post_init__(self):
        self.values = {}
        for f in self.spec.features:
            if f.kind == CATEGORICAL:
                self.values[f.name] = list(f.values)
            else:
                step = 1
                if self.stride and (f.hi - f.lo + 1) > 1000:
                    step = self.stride
                vals = list(range(f.lo, f.hi + 1, step))
                if vals[-1] != f.hi:
                    vals.append(f.hi)
                self.values[f.name] = vals
        self.cardinality = 1
        for vals in self.values.values():
            self.cardinality *= len(vals)

    def check_exact(self):
        if self.stride:
            raise GridTooLarge(self.cardinality, EXACT_LIMIT)
        if self.cardinality > EXACT_LIMIT:
            raise GridTooLarge(self.cardinality, EXACT_LIMIT)

    def instances(self):
        names = [f.name for f in self.spec.features]
        for combo in itertools.product(*(self.values[n] for n in names)):
            yield dict(zip(names, combo))


# --- direct spec evaluation ---------------------------------------------------

def _holds(cond: Condition, instance: Mapping) -> bool:
    v = instance[cond.feature]
    if cond.op == "=":
        return v == cond.value
    if cond.op == "\\=":
        return v != cond.value
    if cond.op == "#>=":
        return v >= cond.value
    if cond.op == "#=<":
        return v <= cond.value
    if cond.op == "#>":
        return v > cond.value
    if cond.op == "#<":
        return v < cond.value
    raise ValueError(cond.op)


def is_realistic(spec: ProblemSpec, instance: Mapping) -> bool:
    """Every feature with causal rules must have some rule for its current
    value whose conditions all hold."""
    guarded = {}
    for cr in spec.causal_rules:
        guarded.setdefault(cr.feature, []).append(cr)
    for fname, rules in guarded.items():
        candidates = [cr for cr in rules if cr.value == instance[fname]]
        if not candidates:
            return False
        if not any(all(_holds(c, instance) for c in cr.conditions)
                   for cr in candidates):
            return False
    return True


def _check_domain(spec: ProblemSpec, instance: Mapping):
    for f in spec.features:
        if f.name not in instance:
            raise DomainError(f"missing feature: {f.name}")
        v = instance[f.name]
        if f.kind == CATEGORICAL:
            if v not in f.values:
                raise DomainError(f"{f.name}: {v!r} not in domain")
        else:
            if isinstance(v, bool) or not isinstance(v, int) or not (f.lo <= v <= f.hi):
                raise DomainError(f"{f.name}: {v!r} not in [{f.lo}, {f.hi}]")


def brute_classify(spec: ProblemSpec, instance: Mapping) -> str:
    """Direct clause evaluation, no logic engine."""
    _check_domain(spec, instance)
    if not is_realistic(spec, instance):
        raise UnrealisticInstance(str(dict(instance)))

    aux_by_name = {a.name: a for a in spec.decision.aux}

    def aux_holds(name):
        return any(clause_holds(cl) for cl in aux_by_name[name].clauses)

    def clause_holds(cl):
        for cond in cl.conditions:
            if isinstance(cond, NotAux):
                if aux_holds(cond.aux):
                    return False
            elif not _holds(cond, instance):
                return False
        return True

    undesired = any(clause_holds(cl) for cl in spec.decision.clauses)
    return "undesired" if undesired else "desired"


def _derived_codes(spec: ProblemSpec, original: Mapping, cf: Mapping) -> dict:
    codes = {}
    for f in spec.features:
        a, b = original[f.name], cf[f.name]
        if a == b:
            codes[f.name] = 0
        elif f.kind == CATEGORICAL:
            codes[f.name] = 1
        else:
            codes[f.name] = 1 if b > a else -1
    return codes


def brute_pairs(spec: ProblemSpec, original: Mapping,
                restrictions: Optional[Mapping] = None,
                cost_bound: Optional[int] = None) -> list:
    """Exhaustive counterfactual pairs over the exact grid.

    Filters realistic, desired, restriction-consistent and cost-bounded
    candidates; cost is the changed-feature count.
    """
    grid = GroundGrid(spec)
    grid.check_exact()
    _check_domain(spec, original)
    allowed = normalize_restrictions(spec, restrictions)
    pairs = []
    for cf in grid.instances():
        if not is_realistic(spec, cf):
            continue
        if brute_classify(spec, cf) != "desired":
            continue
        codes = _derived_codes(spec, original, cf)
        if any(codes[f.name] not in allowed[f.name] for f in spec.features):
            continue
        cost = sum(1 for f in spec.features if codes[f.name] != 0)
        if cost_bound is not None and cost > cost_bound:
            continue
        pairs.append(CounterfactualPair(
            original=tuple((f.name, original[f.name]) for f in spec.features),
            codes=tuple((f.name, codes[f.name]) for f in spec.features),
            counterfactual=tuple((f.name, cf[f.name]) for f in spec.features),
            cost=cost,
        ))
    pairs.sort(key=lambda p: (p.cost, p.codes, _pair_key(p.counterfactual)))
    return pairs


def _pair_key(items):
    out = []
    for name, v in items:
        out.append((name, str(type(v).__name__), str(v)))
    return tuple(out)


# --- ground truth over programs ------------------------------------------------

def ground_truth(program: Program, atom: Pos) -> bool:
    """Truth of a ground atom in the stratified model of the program,
    relative to the program's own ground grid (declared constants plus
    interval values).

    Computed demand-driven with memoization, which agrees with bottom-up
    stratified evaluation on the non-recursive programs this oracle
    supports; recursion is rejected.  Complementary choice pairs
    (single-valued world properties) are read as domain membership and
    its complement.
    """
    model = _Model.for_program(program)
    return model.holds(atom)


_model_cache: dict = {}


class _Model:
    def __init__(self, program: Program):
        self.program = program
        self.rules_by_pred = {}
        for r in program.rules:
            self.rules_by_pred.setdefault(r.head_pred, []).append(r)
        self.choice_members = {}
        self.choice_excluded = {}
        self._detect_choice_pairs()
        self.pool_syms, self.pool_ints = self._constant_pool()
        self._memo = {}
        self._in_progress = set()

    @staticmethod
    def for_program(program: Program):
        key = id(program)
        cached = _model_cache.get(key)
        if cached is not None and cached.program is program:
            return cached
        model = _Model(program)
        _model_cache[key] = model
        return model

    # Shape: p(X) :- not q(X).   q(X) :- dom(k, Y), p(Y), Y \= X.
    def _detect_choice_pairs(self):
        for pred, rules in self.rules_by_pred.items():
            if len(rules) != 1:
                continue
            r = rules[0]
            if not (len(r.head_args) == 1 and isinstance(r.head_args[0], Var)
                    and len(r.body) == 1 and isinstance(r.body[0], Naf)
                    and r.body[0].args == r.head_args):
                continue
            q = r.body[0].pred
            qrules = self.rules_by_pred.get(q, [])
            if len(qrules) != 1:
                continue
            s = qrules[0]
            if (len(s.head_args) == 1 and isinstance(s.head_args[0], Var)
                    and len(s.body) == 3
                    and isinstance(s.body[0], Pos) and len(s.body[0].args) == 2
                    and isinstance(s.body[0].args[0], Sym)
                    and isinstance(s.body[0].args[1], Var)
                    and isinstance(s.body[1], Pos) and s.body[1].pred == pred
                    and s.body[1].args == (s.body[0].args[1],)
                    and isinstance(s.body[2], Cmp) and s.body[2].op == "\\="
                    and s.body[2].lhs == s.body[0].args[1]
                    and s.body[2].rhs == s.head_args[0]):
                dom_pred, dom_key = s.body[0].pred, s.body[0].args[0]
                self.choice_members[pred] = (dom_pred, dom_key)
                self.choice_excluded[q] = (dom_pred, dom_key)

    def _constant_pool(self):
        """The ground grid: every symbol in the program plus every integer
        from facts and from interval rules (capped)."""
        syms, ints = [], []

        def scan_term(t):
            if isinstance(t, Sym) and t.name not in syms:
                syms.append(t.name)
            elif isinstance(t, Int) and t.value not in ints:
                ints.append(t.value)
            elif isinstance(t, Struct):
                for a in t.args:
                    scan_term(a)
            elif isinstance(t, BinOp):
                scan_term(t.lhs)
                scan_term(t.rhs)

        ranges = []
        for r in self.program.rules:
            for t in r.head_args:
                scan_term(t)
            for lit in r.body:
                if isinstance(lit, (Pos, Naf)):
                    for a in lit.args:
                        scan_term(a)
                elif isinstance(lit, Cmp):
                    if lit.op in ("=", "\\="):
                        scan_term(lit.lhs)
                        scan_term(lit.rhs)
                elif isinstance(lit, Is):
                    scan_term(lit.lhs)
                    scan_term(lit.rhs)
            for v in {v for t in r.head_args for v in _term_vars(t)}:
                rng = self._bounds_for(r, v)
                if rng is not None and len(rng) <= EXACT_LIMIT:
                    ranges.append(rng)
        pool_ints = list(ints)
        for rng in ranges:
            for v in rng:
                if v not in pool_ints:
                    pool_ints.append(v)
        return syms, pool_ints

    def _bounds_for(self, rule: Rule, var: Var):
        lo = hi = None
        for lit in rule.body:
            if isinstance(lit, Cmp) and lit.lhs == var and isinstance(lit.rhs, Int):
                if lit.op == "#>=":
                    lo = lit.rhs.value if lo is None else max(lo, lit.rhs.value)
                elif lit.op == "#>":
                    lo = lit.rhs.value + 1 if lo is None else max(lo, lit.rhs.value + 1)
                elif lit.op == "#=<":
                    hi = lit.rhs.value if hi is None else min(hi, lit.rhs.value)
                elif lit.op == "#<":
                    hi = lit.rhs.value - 1 if hi is None else min(hi, lit.rhs.value - 1)
        if lo is None or hi is None:
            return None
        return range(lo, hi + 1)

    def _candidates(self, rule: Rule, var: Var):
        rng = self._bounds_for(rule, var)
        if rng is not None:
            if len(rng) > EXACT_LIMIT:
                raise GridTooLarge(len(rng), EXACT_LIMIT)
            return list(rng)
        out = list(self.pool_syms) + list(self.pool_ints)
        for lit in rule.body:
            if isinstance(lit, Cmp) and lit.lhs == var and isinstance(lit.rhs, Int):
                k = lit.rhs.value
                keep = {"#>=": lambda v: v >= k, "#>": lambda v: v > k,
                        "#=<": lambda v: v <= k, "#<": lambda v: v < k}.get(lit.op)
                if keep:
                    out = [v for v in out if isinstance(v, int) and keep(v)]
        if len(out) > EXACT_LIMIT:
            raise GridTooLarge(len(out), EXACT_LIMIT)
        return out

    def holds(self, atom: Pos) -> bool:
        tup = tuple(_ground(a, {}) for a in atom.args)
        if any(t is None for t in tup):
            raise ValueError(f"atom {atom} is not ground")
        return self._truth(atom.pred, tup)

    def _truth(self, pred, tup) -> bool:
        if pred in self.choice_members:
            dom_pred, dom_key = self.choice_members[pred]
            return len(tup) == 1 and self._truth(dom_pred, (dom_key.name, tup[0]))
        if pred in self.choice_excluded:
            dom_pred, dom_key = self.choice_excluded[pred]
            return len(tup) == 1 and not self._truth(dom_pred, (dom_key.name, tup[0]))
        key = (pred, tup)
        if key in self._memo:
            return self._memo[key]
        if key in self._in_progress:
            raise ValueError(f"recursion through {pred} is outside the oracle fragment")
        self._in_progress.add(key)
        try:
            result = False
            for rule in self.rules_by_pred.get(pred, ()):
                if len(rule.head_args) != len(tup):
                    continue
                binding = _match_args(rule.head_args, tup, {})
                if binding is None:
                    continue
                if self._body_satisfiable(rule, list(rule.body), binding):
                    result = True
                    break
        finally:
            self._in_progress.discard(key)
        self._memo[key] = result
        return result

    def _body_satisfiable(self, rule, lits, binding) -> bool:
        if not lits:
            return True
        lit, rest = lits[0], lits[1:]
        if isinstance(lit, Pos):
            free = [v for a in lit.args for v in _term_vars(a) if v not in binding]
            if not free:
                tup = tuple(_ground(a, binding) for a in lit.args)
                return self._truth(lit.pred, tup) and \
                    self._body_satisfiable(rule, rest, binding)
            for combo in itertools.product(*(self._candidates(rule, v) for v in free)):
                b2 = dict(binding)
                b2.update(zip(free, combo))
                tup = tuple(_ground(a, b2) for a in lit.args)
                if self._truth(lit.pred, tup) and \
                        self._body_satisfiable(rule, rest, b2):
                    return True
            return False
        if isinstance(lit, Naf):
            tup = tuple(_ground(a, binding) for a in lit.args)
            if any(t is None for t in tup):
                raise UnboundedVariableError(
                    f"negated call with unbound argument in {rule}")
            return (not self._truth(lit.pred, tup)) and \
                self._body_satisfiable(rule, rest, binding)
        if isinstance(lit, Cmp):
            l = _ground(lit.lhs, binding)
            r = _ground(lit.rhs, binding)
            if l is None and isinstance(lit.lhs, Var):
                return any(self._body_satisfiable(rule, lits,
                                                  {**binding, lit.lhs: v})
                           for v in self._candidates(rule, lit.lhs))
            if r is None and isinstance(lit.rhs, Var):
                return any(self._body_satisfiable(rule, lits,
                                                  {**binding, lit.rhs: v})
                           for v in self._candidates(rule, lit.rhs))
            return _cmp_holds_safe(lit.op, l, r) and \
                self._body_satisfiable(rule, rest, binding)
        if isinstance(lit, Is):
            v = _eval_arith(lit.rhs, binding)
            l = _ground(lit.lhs, binding)
            if l is None and isinstance(lit.lhs, Var):
                return self._body_satisfiable(rule, rest, {**binding, lit.lhs: v})
            return ((l == v) != lit.negated) and \
                self._body_satisfiable(rule, rest, binding)
        raise TypeError(lit)


def _tuple_key(tup):
    return tuple((str(type(x).__name__), str(x)) for x in tup)


def _ground(term, binding):
    """Python value for a term: str for symbols, int for integers, tuples
    for compound terms; None if a variable is unbound."""
    if isinstance(term, Sym):
        return term.name
    if isinstance(term, Int):
        return term.value
    if isinstance(term, Var):
        return binding.get(term)
    if isinstance(term, Struct):
        args = tuple(_ground(a, binding) for a in term.args)
        if any(a is None for a in args):
            return None
        return (term.functor,) + args
    raise TypeError(term)


def _match_args(args, tup, binding):
    b = dict(binding)
    for a, v in zip(args, tup):
        if isinstance(a, Var):
            if a in b:
                if b[a] != v:
                    return None
            else:
                b[a] = v
        elif isinstance(a, Struct):
            if not isinstance(v, tuple) or v[0] != a.functor \
                    or len(v) - 1 != len(a.args):
                return None
            b2 = _match_args(a.args, v[1:], b)
            if b2 is None:
                return None
            b = b2
        else:
            if _ground(a, {}) != v:
                return None
    return b


def _cmp_holds_safe(op, l, r):
    if op == "=":
        return l == r
    if op == "\\=":
        return l != r
    if not isinstance(l, int) or not isinstance(r, int):
        return False
    return {"#>=": l >= r, "#=<": l <= r, "#>": l > r, "#<": l < r}[op]


def _term_vars(t):
    if isinstance(t, Var):
        return (t,)
    if isinstance(t, Struct):
        out = []
        for a in t.args:
            out.extend(_term_vars(a))
        return tuple(out)
    return ()


def _eval_arith(e, binding):
    if isinstance(e, Int):
        return e.value
    if isinstance(e, Var):
        v = binding.get(e)
        if v is None:
            raise UnboundedVariableError(f"unbound {e.name} in arithmetic")
        return v
    if isinstance(e, BinOp):
        l, r = _eval_arith(e.lhs, binding), _eval_arith(e.rhs, binding)
        return l + r if e.op == "+" else l * r
    raise TypeError(e)
