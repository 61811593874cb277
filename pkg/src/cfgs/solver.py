"""Goal-directed evaluation of completed programs.

The solver resolves queries top-down over a DualProgram.  Negation as
failure is evaluated constructively through the generated dual rules, so
a successful `not p(..)` call carries a derivation like any positive goal.
Numeric variables are narrowed as closed integer interval sets instead of
being enumerated; categorical values enumerate through domain facts and
may be narrowed as symbol sets.

Answers are deterministic (clause order, then fact order, then ascending
integers), canonicalized (bindings sorted by variable name, interval sets
normalized, singletons collapsed to ground values) and deduplicated.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .asp_core import (
    EQ, NEQ, GE, LE, GT, LT,
    BinOp, Cmp, DualProgram, Forall, Int, Is, Naf, Pos, Rule, Struct, Sym,
    Var, dual_name, serialize_literal,
)
from .errors import (
    ConstraintResidueError,
    DepthLimitExceeded,
    TraceUnavailable,
    TypeMismatch,
    UnboundedVariableError,
    UnknownPredicateError,
)

__all__ = [
    "NumericSet", "SymbolSet", "Subst", "Answer", "DerivationNode",
    "unify", "assert_constraint", "solve", "trace",
    "INT_MIN", "INT_MAX",
]

INT_MIN = -(2 ** 63)
INT_MAX = 2 ** 63 - 1

_FORALL_LIMIT = 10_000  # widest interval a bounded universal check may sweep


# --- constraint values -------------------------------------------------------

@dataclass(frozen=True)
class NumericSet:
    """Normalized union of closed integer intervals: sorted, disjoint,
    non-adjacent, never empty."""
    intervals: tuple  # of (lo, hi)

    @staticmethod
    def normalize(intervals):
        ivs = sorted((lo, hi) for lo, hi in intervals if lo <= hi)
        merged = []
        for lo, hi in ivs:
            if merged and lo <= merged[-1][1] + 1:
                merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
            else:
                merged.append((lo, hi))
        if not merged:
            return None
        return NumericSet(tuple(merged))

    @staticmethod
    def full():
        return NumericSet(((INT_MIN, INT_MAX),))

    @staticmethod
    def bounded(lo, hi):
        return NumericSet.normalize([(lo, hi)])

    def intersect(self, other: "NumericSet"):
        out = []
        for a_lo, a_hi in self.intervals:
            for b_lo, b_hi in other.intervals:
                lo, hi = max(a_lo, b_lo), min(a_hi, b_hi)
                if lo <= hi:
                    out.append((lo, hi))
        return NumericSet.normalize(out)

    def narrow(self, op, k: int):
        if op == GE:
            return self.intersect(NumericSet(((k, INT_MAX),)))
        if op == GT:
            if k == INT_MAX:
                return None
            return self.intersect(NumericSet(((k + 1, INT_MAX),)))
        if op == LE:
            return self.intersect(NumericSet(((INT_MIN, k),)))
        if op == LT:
            if k == INT_MIN:
                return None
            return self.intersect(NumericSet(((INT_MIN, k - 1),)))
        raise ValueError(op)

    def remove(self, k: int):
        out = []
        for lo, hi in self.intervals:
            if lo <= k <= hi:
                if lo <= k - 1:
                    out.append((lo, k - 1))
                if k + 1 <= hi:
                    out.append((k + 1, hi))
            else:
                out.append((lo, hi))
        return NumericSet.normalize(out)

    def contains(self, k: int) -> bool:
        return any(lo <= k <= hi for lo, hi in self.intervals)

    def singleton(self):
        if len(self.intervals) == 1 and self.intervals[0][0] == self.intervals[0][1]:
            return self.intervals[0][0]
        return None

    @property
    def min(self):
        return self.intervals[0][0]

    @property
    def max(self):
        return self.intervals[-1][1]

    def size(self):
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def values(self):
        for lo, hi in self.intervals:
            yield from range(lo, hi + 1)

    def __repr__(self):
        return "{" + ",".join(
            f"{lo}..{hi}" if lo != hi else str(lo) for lo, hi in self.intervals) + "}"


@dataclass(frozen=True)
class SymbolSet:
    """Non-empty set of admissible symbols for one variable.  Order is the
    order in which values were first admitted (deterministic)."""
    values: tuple

    def remove(self, name: str):
        out = tuple(v for v in self.values if v != name)
        return SymbolSet(out) if out else None

    def intersect(self, other: "SymbolSet"):
        keep = set(other.values)
        out = tuple(v for v in self.values if v in keep)
        return SymbolSet(out) if out else None

    def contains(self, name: str) -> bool:
        return name in self.values

    def singleton(self):
        return self.values[0] if len(self.values) == 1 else None

    def __eq__(self, other):
        return isinstance(other, SymbolSet) and set(self.values) == set(other.values)

    def __hash__(self):
        return hash(frozenset(self.values))

    def __repr__(self):
        return "{" + ",".join(self.values) + "}"


Constraint = Union[NumericSet, SymbolSet]


# --- substitutions -----------------------------------------------------------

class Subst:
    """Immutable variable store.  A variable maps to a ground term, a
    constraint set, or another variable (an internal alias, resolved away
    before an answer is built)."""

    __slots__ = ("_m",)

    def __init__(self, m=None):
        self._m = m or {}

    def _extended(self, var, value) -> "Subst":
        m = dict(self._m)
        m[var] = value
        return Subst(m)

    def walk(self, t):
        """Resolve t to a ground term or the representative variable."""
        while isinstance(t, Var):
            v = self._m.get(t)
            if isinstance(v, Var):
                t = v
            elif v is None or isinstance(v, (NumericSet, SymbolSet)):
                return t
            else:
                t = v
                break
        return t

    def constraint(self, var) -> Optional[Constraint]:
        v = self._m.get(var)
        return v if isinstance(v, (NumericSet, SymbolSet)) else None

    def resolve(self, t):
        """Walk fully, descending into structs."""
        t = self.walk(t)
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(self.resolve(a) for a in t.args))
        return t

    def value_of(self, var):
        """Ground term, constraint set, or None for the walked variable."""
        t = self.walk(var)
        if isinstance(t, Var):
            return self.constraint(t)
        return self.resolve(t)

    def items(self):
        return self._m.items()


EMPTY_SUBST = Subst()


def _is_ground(t) -> bool:
    if isinstance(t, (Sym, Int)):
        return True
    if isinstance(t, Struct):
        return all(_is_ground(a) for a in t.args)
    return False


def unify(a, b, s: Subst) -> Optional[Subst]:
    """Most general extension of s making a and b equal; None on failure."""
    a, b = s.walk(a), s.walk(b)
    if a == b and not isinstance(a, Struct):
        return s
    if isinstance(a, Var) and isinstance(b, Var):
        ca, cb = s.constraint(a), s.constraint(b)
        if ca is None:
            return s._extended(a, b)
        if cb is None:
            return s._extended(b, a)
        if isinstance(ca, NumericSet) and isinstance(cb, NumericSet):
            meet = ca.intersect(cb)
        elif isinstance(ca, SymbolSet) and isinstance(cb, SymbolSet):
            meet = ca.intersect(cb)
        else:
            return None
        if meet is None:
            return None
        single = meet.singleton()
        if single is not None:
            g = Int(single) if isinstance(meet, NumericSet) else Sym(single)
            return s._extended(a, g)._extended(b, g)
        return s._extended(a, b)._extended(b, meet)
    if isinstance(b, Var):
        a, b = b, a
    if isinstance(a, Var):
        c = s.constraint(a)
        if isinstance(b, Int):
            if c is None or (isinstance(c, NumericSet) and c.contains(b.value)):
                return s._extended(a, b)
            return None
        if isinstance(b, Sym):
            if c is None or (isinstance(c, SymbolSet) and c.contains(b.name)):
                return s._extended(a, b)
            return None
        if isinstance(b, Struct):
            if c is not None or a in _struct_vars(b):
                return None
            return s._extended(a, b)
        return None
    # both non-vars
    if isinstance(a, Struct) and isinstance(b, Struct):
        if a.functor != b.functor or len(a.args) != len(b.args):
            return None
        for x, y in zip(a.args, b.args):
            s = unify(x, y, s)
            if s is None:
                return None
        return s
    return None


def _struct_vars(t):
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Struct):
        out = set()
        for a in t.args:
            out |= _struct_vars(a)
        return out
    return set()


def assert_constraint(lit: Cmp, s: Subst) -> Optional[Subst]:
    """Apply a comparison constraint; None on failure.

    Ordered comparisons narrow interval sets; disequality narrows interval
    or symbol sets.  Ordered comparison over symbols raises TypeMismatch.
    """
    op = lit.op
    if op == EQ:
        return unify(lit.lhs, lit.rhs, s)
    a, b = s.resolve(lit.lhs), s.resolve(lit.rhs)
    if op == NEQ:
        return _assert_neq(a, b, s)
    return _assert_ordered(op, a, b, s)


def _assert_neq(a, b, s):
    if _is_ground(a) and _is_ground(b):
        return None if a == b else s
    if isinstance(a, Struct) or isinstance(b, Struct):
        if isinstance(a, Var) or isinstance(b, Var):
            v = a if isinstance(a, Var) else b
            if s.constraint(v) is not None:
                return s  # a set-constrained variable never equals a struct
            raise UnboundedVariableError(
                "cannot exclude a compound term from an unconstrained variable")
        # Pattern disunification: variables local to one struct pattern are
        # read universally, as generated dual branches require.
        trial = unify(a, b, s)
        if trial is None:
            return s
        if _is_ground(a) or _is_ground(b):
            return None
        raise ConstraintResidueError(
            "disequality between two non-ground compound terms")
    if isinstance(a, Var) and isinstance(b, Var):
        if a == b:
            return None
        ca, cb = s.constraint(a), s.constraint(b)
        if ca is None or cb is None:
            raise ConstraintResidueError(
                "disequality between two unconstrained variables")
        if type(ca) is not type(cb):
            return s
        if isinstance(ca, NumericSet):
            sa, sb = ca.singleton(), cb.singleton()
            if sa is not None and sb is not None:
                return None if sa == sb else s
            if sa is not None:
                return _assert_neq(b, Int(sa), s)
            if sb is not None:
                return _assert_neq(a, Int(sb), s)
        else:
            sa, sb = ca.singleton(), cb.singleton()
            if sa is not None and sb is not None:
                return None if sa == sb else s
            if sa is not None:
                return _assert_neq(b, Sym(sa), s)
            if sb is not None:
                return _assert_neq(a, Sym(sb), s)
            if not set(ca.values) & set(cb.values):
                return s
        raise ConstraintResidueError(
            "disequality between two set-constrained variables")
    if isinstance(b, Var):
        a, b = b, a
    # a is Var, b ground
    c = s.constraint(a)
    if isinstance(b, Int):
        if c is None:
            c = NumericSet.full()
        if isinstance(c, SymbolSet):
            return s  # symbolic variable can never equal an integer
        rest = c.remove(b.value)
        return _apply_numeric(a, rest, s)
    if isinstance(b, Sym):
        if c is None:
            raise UnboundedVariableError(
                f"cannot exclude symbol {b.name!r} from an unconstrained variable")
        if isinstance(c, NumericSet):
            return s
        rest = c.remove(b.name)
        if rest is None:
            return None
        single = rest.singleton()
        if single is not None:
            return s._extended(a, Sym(single))
        return s._extended(a, rest)
    return s


def _apply_numeric(var, narrowed, s):
    if narrowed is None:
        return None
    single = narrowed.singleton()
    if single is not None:
        return s._extended(var, Int(single))
    return s._extended(var, narrowed)


def _assert_ordered(op, a, b, s):
    for t in (a, b):
        if isinstance(t, (Sym, Struct)):
            raise TypeMismatch(f"ordered comparison over non-numeric term {t!r}")
        if isinstance(t, Var) and isinstance(s.constraint(t), SymbolSet):
            raise TypeMismatch("ordered comparison over a symbolic variable")
    if isinstance(a, Int) and isinstance(b, Int):
        ok = {GE: a.value >= b.value, LE: a.value <= b.value,
              GT: a.value > b.value, LT: a.value < b.value}[op]
        return s if ok else None
    if isinstance(a, Var) and isinstance(b, Var):
        if a == b:
            return s if op in (GE, LE) else None
        ca, cb = s.constraint(a), s.constraint(b)
        # Bounds-consistent narrowing would lose the relation between the
        # two variables; the fragment requires one side to be ground.
        raise ConstraintResidueError(
            f"ordered comparison {op} between two unbound variables")
    if isinstance(a, Var):
        c = s.constraint(a) or NumericSet.full()
        return _apply_numeric(a, c.narrow(op, b.value), s)
    # a ground int, b var: flip
    flipped = {GE: LE, LE: GE, GT: LT, LT: GT}[op]
    c = s.constraint(b) or NumericSet.full()
    return _apply_numeric(b, c.narrow(flipped, a.value), s)


def eval_expr(e, s: Subst) -> int:
    if isinstance(e, Int):
        return e.value
    if isinstance(e, Var):
        t = s.walk(e)
        if isinstance(t, Int):
            return t.value
        if isinstance(t, Var):
            c = s.constraint(t)
            if isinstance(c, NumericSet):
                single = c.singleton()
                if single is not None:
                    return single
        raise UnboundedVariableError(
            f"arithmetic over unbound variable {getattr(t, 'name', t)!r}")
    if isinstance(e, BinOp):
        l, r = eval_expr(e.lhs, s), eval_expr(e.rhs, s)
        return l + r if e.op == "+" else l * r
    if isinstance(e, Sym):
        raise TypeMismatch(f"arithmetic over symbol {e.name!r}")
    raise TypeError(e)


# --- derivations -------------------------------------------------------------

@dataclass(frozen=True)
class DerivationNode:
    goal: object                 # Literal
    rule: object                 # Rule, or "fact"/"constraint"/"dual"/"forall"/"query"
    children: tuple = ()

    def leaves(self):
        if not self.children:
            return (self,)
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return tuple(out)

    def pretty(self, indent=0):
        label = self.rule if isinstance(self.rule, str) else "rule"
        line = "  " * indent + f"{serialize_literal(self.goal)}  [{label}]"
        return "\n".join([line] + [c.pretty(indent + 1) for c in self.children])


@dataclass
class Answer:
    bindings: dict               # var name -> ground term or constraint set
    _trace: Optional[DerivationNode] = field(default=None, repr=False)

    def key(self):
        return tuple((k, _canon_value(v)) for k, v in self.bindings.items())


def _canon_value(v):
    if isinstance(v, Int):
        return ("i", v.value)
    if isinstance(v, Sym):
        return ("s", v.name)
    if isinstance(v, Struct):
        return ("t", v.functor, tuple(_canon_value(a) for a in v.args))
    if isinstance(v, NumericSet):
        return ("I", v.intervals)
    if isinstance(v, SymbolSet):
        return ("S", tuple(sorted(v.values)))
    raise TypeError(v)


def trace(answer: Answer) -> DerivationNode:
    if answer._trace is None:
        raise TraceUnavailable("answer was produced with tracing disabled")
    return answer._trace


# --- evaluation --------------------------------------------------------------

class _Ctx:
    __slots__ = ("dp", "tracing", "step_limit", "steps", "fresh", "_vars")

    def __init__(self, dp, tracing, step_limit):
        self.dp = dp
        self.tracing = tracing
        self.step_limit = step_limit
        self.steps = 0
        self.fresh = 0
        self._vars = dp.vars_cache  # id(rule) -> var tuple; rules outlive it

    def tick(self):
        self.steps += 1
        if self.steps > self.step_limit:
            raise DepthLimitExceeded(
                f"more than {self.step_limit} resolution steps for one answer")

    def rule_vars(self, rule: Rule):
        key = id(rule)
        got = self._vars.get(key)
        if got is None:
            from .asp_core import rule_vars
            got = tuple(rule_vars(rule))
            self._vars[key] = got
        return got


def _rename_apart(ctx: _Ctx, rule: Rule) -> Rule:
    rvars = ctx.rule_vars(rule)
    if not rvars:
        return rule
    from .asp_core import _rename_rule
    ctx.fresh += 1
    n = ctx.fresh
    mapping = {v: Var(f"{v.name}${n}") for v in rvars}
    return _rename_rule(rule, mapping)


def _subst_literal(lit, var, value):
    def rt(t):
        if t == var:
            return value
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(rt(a) for a in t.args))
        if isinstance(t, BinOp):
            return BinOp(t.op, rt(t.lhs), rt(t.rhs))
        return t

    if isinstance(lit, Pos):
        return Pos(lit.pred, tuple(rt(a) for a in lit.args))
    if isinstance(lit, Naf):
        return Naf(lit.pred, tuple(rt(a) for a in lit.args))
    if isinstance(lit, Cmp):
        return Cmp(lit.op, rt(lit.lhs), rt(lit.rhs))
    if isinstance(lit, Is):
        return Is(rt(lit.lhs), rt(lit.rhs), lit.negated)
    if isinstance(lit, Forall):
        return Forall(lit.var, lit.domain, _subst_literal(lit.goal, var, value))
    raise TypeError(lit)


def _solve_goal(ctx: _Ctx, lit, s: Subst):
    """Yield (subst, node) for every way to prove lit under s."""
    ctx.tick()
    if isinstance(lit, Cmp):
        s2 = assert_constraint(lit, s)
        if s2 is not None:
            yield s2, _node(ctx, lit, "constraint", s=s2)
        return
    if isinstance(lit, Is):
        v = eval_expr(lit.rhs, s)
        if lit.negated:
            s2 = _assert_neq(s.walk(lit.lhs), Int(v), s)
        else:
            s2 = unify(lit.lhs, Int(v), s)
        if s2 is not None:
            yield s2, _node(ctx, lit, "constraint", s=s2)
        return
    if isinstance(lit, Naf):
        target = dual_name(lit.pred)
        for s2, node in _solve_pred(ctx, target, lit.args, s):
            children = node.children if (ctx.tracing and node is not None) else ()
            yield s2, _node(ctx, lit, "dual", children, s=s2)
        return
    if isinstance(lit, Forall):
        yield from _solve_forall(ctx, lit, s)
        return
    if isinstance(lit, Pos):
        yield from _solve_pred(ctx, lit.pred, lit.args, s)
        return
    raise TypeError(lit)


def _node(ctx, lit, rule, children=(), s=None):
    if not ctx.tracing:
        return None
    if s is not None:
        lit = _resolve_literal(lit, s)
    return DerivationNode(lit, rule, tuple(children))


def _resolve_literal(lit, s: Subst):
    def rt(t):
        t = s.walk(t)
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(rt(a) for a in t.args))
        if isinstance(t, BinOp):
            return BinOp(t.op, rt(t.lhs), rt(t.rhs))
        return t

    if isinstance(lit, Pos):
        return Pos(lit.pred, tuple(rt(a) for a in lit.args))
    if isinstance(lit, Naf):
        return Naf(lit.pred, tuple(rt(a) for a in lit.args))
    if isinstance(lit, Cmp):
        return Cmp(lit.op, rt(lit.lhs), rt(lit.rhs))
    if isinstance(lit, Is):
        return Is(rt(lit.lhs), rt(lit.rhs), lit.negated)
    if isinstance(lit, Forall):
        return lit
    return lit


def _solve_pred(ctx: _Ctx, pred, args, s: Subst):
    first = s.walk(args[0]) if args else None
    first_ground = isinstance(first, (Sym, Int))
    for clause in ctx.dp.clauses(pred):
        ctx.tick()
        if len(args) != len(clause.head_args):
            continue
        if first_ground and clause.head_args and clause.head_args[0] != first \
                and isinstance(clause.head_args[0], (Sym, Int)):
            continue
        renamed = _rename_apart(ctx, clause)
        s1 = s
        for a, h in zip(args, renamed.head_args):
            s1 = unify(a, h, s1)
            if s1 is None:
                break
        if s1 is None:
            continue
        goal = Pos(pred, args)
        if not renamed.body:
            yield s1, _node(ctx, goal, "fact", s=s1)
            continue
        for s2, nodes in _solve_body(ctx, renamed.body, s1):
            yield s2, _node(ctx, goal, clause, nodes, s=s2)
    return


def _solve_body(ctx: _Ctx, body, s: Subst):
    """Yield (subst, child-node tuple) proving the whole conjunction."""
    if not body:
        yield s, ()
        return
    first, rest = body[0], body[1:]
    for s1, node in _solve_goal(ctx, first, s):
        for s2, nodes in _solve_body(ctx, rest, s1):
            if ctx.tracing:
                yield s2, (node,) + nodes
            else:
                yield s2, ()


def _solve_forall(ctx: _Ctx, lit: Forall, s: Subst):
    kind = lit.domain[0]
    if kind == "sym":
        values = [Sym(v) for v in lit.domain[1]]
    elif kind == "enum_int":
        values = [Int(v) for v in lit.domain[1]]
    else:
        lo, hi = lit.domain[1], lit.domain[2]
        if hi - lo + 1 > _FORALL_LIMIT:
            raise UnboundedVariableError(
                f"interval {lo}..{hi} too large for a bounded universal check")
        values = [Int(v) for v in range(lo, hi + 1)]
    states = [(s, ())]
    for v in values:
        goal = _subst_literal(lit.goal, lit.var, v)
        new_states = []
        for st, nodes in states:
            for st2, node in _solve_goal(ctx, goal, st):
                new_states.append((st2, nodes + (node,) if ctx.tracing else ()))
        if not new_states:
            return
        # Collapse states that became indistinguishable.
        seen, dedup = set(), []
        for st, nodes in new_states:
            key = id(st._m) if ctx.tracing else _state_key(st)
            if key in seen:
                continue
            seen.add(key)
            dedup.append((st, nodes))
        states = dedup
    for st, nodes in states:
        yield st, _node(ctx, lit, "forall", nodes, s=st)


def _state_key(s: Subst):
    out = []
    for k, v in s.items():
        if isinstance(v, (NumericSet, SymbolSet)):
            out.append((k.name, _canon_value(v)))
        elif isinstance(v, Var):
            out.append((k.name, ("v", v.name)))
        else:
            out.append((k.name, _canon_value(v)))
    return tuple(sorted(out))


def _collect_query_vars(query):
    from .asp_core import literal_vars
    out = []
    for lit in query:
        for v in sorted(literal_vars(lit), key=lambda v: v.name):
            if v not in out:
                out.append(v)
    return out


def _check_query(dp: DualProgram, query):
    for lit in query:
        if isinstance(lit, Pos):
            if not dp.is_known(lit.pred):
                raise UnknownPredicateError(lit.pred)
        elif isinstance(lit, Naf):
            if not (dp.is_known(lit.pred) or dp.is_known(dual_name(lit.pred))):
                raise UnknownPredicateError(lit.pred)


def _build_answer(query_vars, s: Subst, root, tracing) -> Answer:
    reps = {}
    bindings = {}
    for v in sorted(query_vars, key=lambda v: v.name):
        t = s.walk(v)
        if isinstance(t, Var):
            c = s.constraint(t)
            if c is None:
                raise ConstraintResidueError(
                    f"query variable {v.name} is unconstrained in an answer")
            prior = reps.get(t)
            if prior is not None and c.singleton() is None:
                raise ConstraintResidueError(
                    f"query variables {prior} and {v.name} remain aliased "
                    f"to one non-singleton constraint")
            reps[t] = v.name
            single = c.singleton()
            if single is not None:
                bindings[v.name] = Int(single) if isinstance(c, NumericSet) else Sym(single)
            else:
                bindings[v.name] = c
        else:
            t = s.resolve(t)
            if not _is_ground(t):
                raise ConstraintResidueError(
                    f"query variable {v.name} resolves to a non-ground term")
            bindings[v.name] = t
    return Answer(bindings, root if tracing else None)


def solve(dual_program: DualProgram, query, limit: Optional[int] = None,
          trace: bool = False, step_limit: int = 10_000) -> Iterator[Answer]:
    """Enumerate answers to a query (a literal or list of literals).

    Deterministic order, deduplicated after canonicalization; `limit`
    stops after that many answers; `step_limit` bounds resolution steps
    per answer and raises DepthLimitExceeded when exhausted.
    """
    if isinstance(query, (Pos, Naf, Cmp, Is)):
        query = [query]
    query = list(query)
    _check_query(dual_program, query)
    ctx = _Ctx(dual_program, trace, step_limit)
    qvars = _collect_query_vars(query)
    if limit is not None and limit <= 0:
        return
    seen = set()
    emitted = 0
    for s, nodes in _solve_body(ctx, tuple(query), EMPTY_SUBST):
        if trace:
            if len(nodes) == 1:
                root = nodes[0]
            else:
                root = DerivationNode(Pos("query", ()), "query", nodes)
        else:
            root = None
        ans = _build_answer(qvars, s, root, trace)
        k = ans.key()
        if k in seen:
            continue
        seen.add(k)
        emitted += 1
        ctx.steps = 0
        yield ans
        if limit is not None and emitted >= limit:
            return
