"""Rule language: AST, parser, serializer, and program completion.

The language is a restricted, stratified, range-restricted fragment of a
normal logic program with finite-domain comparison constraints:

    rule      := atom ( ":-" literal ("," literal)* )? "."
    literal   := "not" atom | atom | constraint
    constraint:= term cmpop term | term "#=" expr | term "#\\=" expr
    cmpop     := "=" | "\\=" | "#>=" | "#=<" | "#>" | "#<"
    expr      := mul ("+" mul)*      ; mul := term ("*" term)*
    term      := VARIABLE | INTEGER | atomterm
    atomterm  := NAME | QUOTED | NAME "(" term ("," term)* ")"

Variables begin with an uppercase letter or underscore; symbols and
predicate names begin with a lowercase letter (or are single-quoted).
`%` begins a line comment.  Fractional bounds in ordered comparisons are
normalized to equivalent integer bounds at parse time (x #=< 23.25 becomes
x #=< 23, x #> 23.25 becomes x #>= 24); the constraint domain is integral.

Completion turns a Program into a DualProgram: for every predicate p with
clauses C1..Ck it defines `not_p` as the conjunction of per-clause duals,
each dual constructively negating one clause.  Clause variables not bound
through the head are handled by a bounded universal check over their
declared finite or interval domain.

One rule shape gets special treatment: the complementary pair

    not_p(X) :- dom(F, Y), p(Y), Y \\= X.
    p(X)     :- not not_p(X).

declares p as "the single value feature F takes in a world".  Taken
literally the pair is a negation cycle; it is recognized and lowered to
domain membership (p(X) :- dom(F, X)) with not_p as its complement, which
keeps the program stratified and makes exactly one of p(c), not_p(c)
derivable for every constant c.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .errors import (
    DualConflictError,
    RangeRestrictionError,
    RuleSyntaxError,
    StratificationError,
    UnboundedVariableError,
)

__all__ = [
    "Var", "Sym", "Int", "Struct", "BinOp",
    "Pos", "Naf", "Cmp", "Is", "Forall",
    "Rule", "Program", "DualProgram",
    "EQ", "NEQ", "GE", "LE", "GT", "LT",
    "parse_program", "parse_term", "serialize", "serialize_rule",
    "complete", "domains_from_program", "dual_name",
]


# --- terms and literals ----------------------------------------------------

class Var:
    """A logic variable, identified by name.  Immutable by convention;
    hash is cached (variables are dictionary keys on every hot path)."""

    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return type(other) is Var and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.name


class Sym:
    """A constant symbol."""

    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("sym", name))

    def __eq__(self, other):
        return type(other) is Sym and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return self.name


class Int:
    """An integer constant (64-bit signed range)."""

    __slots__ = ("value", "_hash")

    def __init__(self, value: int):
        self.value = value
        self._hash = hash(("int", value))

    def __eq__(self, other):
        return type(other) is Int and other.value == self.value

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return str(self.value)


@dataclass(frozen=True)
class Struct:
    functor: str
    args: tuple

    def __repr__(self):
        return f"{self.functor}({','.join(map(repr, self.args))})"


Term = Union[Var, Sym, Int, Struct]


@dataclass(frozen=True)
class BinOp:
    """Arithmetic expression node; op is '+' or '*'."""
    op: str
    lhs: "Expr"
    rhs: "Expr"


Expr = Union[Term, BinOp]

INT64_MIN, INT64_MAX = -(2 ** 63), 2 ** 63 - 1

# Comparison operators, spelled as in the rule syntax.
EQ, NEQ, GE, LE, GT, LT = "=", "\\=", "#>=", "#=<", "#>", "#<"
ORDERED_OPS = (GE, LE, GT, LT)
_NEGATED_OP = {EQ: NEQ, NEQ: EQ, GE: LT, LT: GE, LE: GT, GT: LE}


@dataclass(frozen=True)
class Pos:
    pred: str
    args: tuple


@dataclass(frozen=True)
class Naf:
    pred: str
    args: tuple


@dataclass(frozen=True)
class Cmp:
    op: str
    lhs: Term
    rhs: Term


@dataclass(frozen=True)
class Is:
    """Arithmetic (dis)equality `lhs #= expr` / `lhs #\\= expr`."""
    lhs: Term
    rhs: Expr
    negated: bool = False


@dataclass(frozen=True)
class Forall:
    """Bounded universal check: goal must hold for every value of var in
    domain.  Internal to generated duals; never produced by the parser.
    domain is ("sym", values) or ("int", lo, hi)."""
    var: Var
    domain: tuple
    goal: "Literal"


Literal = Union[Pos, Naf, Cmp, Is, Forall]


@dataclass(frozen=True)
class Rule:
    head_pred: str
    head_args: tuple
    body: tuple = ()

    @property
    def is_fact(self):
        return not self.body

    def __str__(self):
        return serialize_rule(self)


class Program:
    """An ordered rule list with a predicate index.  Immutable."""

    def __init__(self, rules: Iterable[Rule]):
        self.rules = tuple(rules)
        index: dict = {}
        for r in self.rules:
            index.setdefault(r.head_pred, []).append(r)
        self._index = {k: tuple(v) for k, v in index.items()}

    def clauses(self, pred: str) -> tuple:
        return self._index.get(pred, ())

    @property
    def predicates(self) -> tuple:
        return tuple(self._index)

    def __eq__(self, other):
        return isinstance(other, Program) and self.rules == other.rules

    def __hash__(self):
        return hash(self.rules)

    def __repr__(self):
        return f"Program({len(self.rules)} rules)"


def term_vars(t) -> set:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Struct):
        out = set()
        for a in t.args:
            out |= term_vars(a)
        return out
    if isinstance(t, BinOp):
        return term_vars(t.lhs) | term_vars(t.rhs)
    return set()


def literal_vars(lit) -> set:
    if isinstance(lit, (Pos, Naf)):
        out = set()
        for a in lit.args:
            out |= term_vars(a)
        return out
    if isinstance(lit, Cmp):
        return term_vars(lit.lhs) | term_vars(lit.rhs)
    if isinstance(lit, Is):
        return term_vars(lit.lhs) | term_vars(lit.rhs)
    if isinstance(lit, Forall):
        return (literal_vars(lit.goal) | {lit.var}) - {lit.var}
    raise TypeError(lit)


def rule_vars(rule: Rule) -> set:
    out = set()
    for t in rule.head_args:
        out |= term_vars(t)
    for lit in rule.body:
        out |= literal_vars(lit)
    return out


# --- lexer -----------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>%[^\n]*)
    | (?P<float>-?\d+\.\d+)
    | (?P<int>-?\d+)
    | (?P<lname>[a-z][A-Za-z0-9_]*)
    | (?P<vname>[A-Z_][A-Za-z0-9_]*)
    | (?P<quoted>'[^'\n]*')
    | (?P<op>:-|\#>=|\#=<|\#\\=|\#>|\#<|\#=|\\=|=|\(|\)|,|\.|\+|\*)
    """,
    re.VERBOSE,
)


class _Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col


def _tokenize(text: str):
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise RuleSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok, line, col))
        newlines = tok.count("\n")
        if newlines:
            line += newlines
            col = len(tok) - tok.rindex("\n")
        else:
            col += len(tok)
        pos = m.end()
    tokens.append(_Token("eof", "", line, col))
    return tokens


# --- parser ----------------------------------------------------------------

class _Parser:
    def __init__(self, text):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text):
        t = self.next()
        if t.text != text:
            raise RuleSyntaxError(f"expected {text!r}, found {t.text!r}", t.line, t.col)
        return t

    def parse_program(self) -> Program:
        rules = []
        while self.peek().kind != "eof":
            rules.append(self.parse_rule())
        return Program(rules)

    def parse_rule(self) -> Rule:
        head = self.parse_atom()
        body = []
        if self.peek().text == ":-":
            self.next()
            body.append(self.parse_literal())
            while self.peek().text == ",":
                self.next()
                body.append(self.parse_literal())
        self.expect(".")
        return Rule(head.pred, head.args, tuple(body))

    def parse_atom(self) -> Pos:
        t = self.next()
        if t.kind != "lname":
            raise RuleSyntaxError(f"expected predicate name, found {t.text!r}", t.line, t.col)
        args = ()
        if self.peek().text == "(":
            self.next()
            parts = [self.parse_term()]
            while self.peek().text == ",":
                self.next()
                parts.append(self.parse_term())
            self.expect(")")
            args = tuple(parts)
        return Pos(t.text, args)

    def parse_literal(self):
        t = self.peek()
        if t.kind == "lname" and t.text == "not":
            self.next()
            atom = self.parse_atom()
            return Naf(atom.pred, atom.args)
        # Either a plain atom or a constraint whose lhs is a term/expr.
        start = self.i
        lhs = self.parse_expr()
        op_tok = self.peek()
        if op_tok.text in (EQ, NEQ, GE, LE, GT, LT, "#=", "#\\="):
            self.next()
            rhs = self.parse_expr()
            return self._make_constraint(op_tok, lhs, rhs)
        # Not a constraint: lhs must have been a bare atom.
        self.i = start
        atom = self.parse_atom()
        return atom

    def _make_constraint(self, op_tok, lhs, rhs):
        op = op_tok.text
        if op in ("#=", "#\\="):
            if isinstance(lhs, BinOp):
                raise RuleSyntaxError("left side of #= must be a plain term",
                                      op_tok.line, op_tok.col)
            self._check_no_float(lhs, op_tok)
            self._reject_floats_in_expr(rhs, op_tok)
            return Is(lhs, rhs, negated=(op == "#\\="))
        if isinstance(lhs, BinOp) or isinstance(rhs, BinOp):
            raise RuleSyntaxError(f"arithmetic expressions are only allowed with #=",
                                  op_tok.line, op_tok.col)
        if op in ORDERED_OPS:
            lhs, rhs, op = self._normalize_ordered(lhs, rhs, op, op_tok)
            return Cmp(op, lhs, rhs)
        # = / \= : integral terms only
        self._check_no_float(lhs, op_tok)
        self._check_no_float(rhs, op_tok)
        return Cmp(op, lhs, rhs)

    def _normalize_ordered(self, lhs, rhs, op, tok):
        # Fractional bounds collapse to the equivalent integer comparison.
        def norm(side, is_rhs):
            nonlocal op
            if isinstance(side, _Float):
                import math
                v = side.value
                # Orient so the float is on the right: a op f  (flip if left)
                if not is_rhs:
                    flip = {GE: LE, LE: GE, GT: LT, LT: GT}
                    op = flip[op]
                if op == LE:       # x =< f  ->  x =< floor(f)
                    return Int(math.floor(v)), True
                if op == LT:       # x < f   ->  x =< floor(f)   (f not integral)
                    op = LE
                    return Int(math.floor(v)), True
                if op == GE:       # x >= f  ->  x >= ceil(f)
                    return Int(math.ceil(v)), True
                if op == GT:       # x > f   ->  x >= ceil(f)
                    op = GE
                    return Int(math.ceil(v)), True
            return side, False

        if isinstance(lhs, _Float) and isinstance(rhs, _Float):
            raise RuleSyntaxError("comparison between two fractional constants",
                                  tok.line, tok.col)
        if isinstance(rhs, _Float):
            rhs, flipped = norm(rhs, True)
        elif isinstance(lhs, _Float):
            new_rhs, _ = norm(lhs, False)
            lhs, rhs = rhs, new_rhs
        return lhs, rhs, op

    def _check_no_float(self, t, tok):
        if isinstance(t, _Float):
            raise RuleSyntaxError(
                f"fractional constant {t.value} is only allowed in ordered comparisons",
                tok.line, tok.col)

    def _reject_floats_in_expr(self, e, tok):
        if isinstance(e, BinOp):
            self._reject_floats_in_expr(e.lhs, tok)
            self._reject_floats_in_expr(e.rhs, tok)
        else:
            self._check_no_float(e, tok)

    def parse_expr(self):
        node = self.parse_mul()
        while self.peek().text == "+":
            self.next()
            node = BinOp("+", node, self.parse_mul())
        return node

    def parse_mul(self):
        node = self.parse_term()
        while self.peek().text == "*":
            self.next()
            node = BinOp("*", node, self.parse_term())
        return node

    def parse_term(self):
        t = self.next()
        if t.kind == "int":
            v = int(t.text)
            if not (INT64_MIN <= v <= INT64_MAX):
                raise RuleSyntaxError(f"integer {v} outside the 64-bit range",
                                      t.line, t.col)
            return Int(v)
        if t.kind == "float":
            return _Float(float(t.text))
        if t.kind == "vname":
            return Var(t.text)
        if t.kind == "quoted":
            return Sym(t.text[1:-1])
        if t.kind == "lname":
            if self.peek().text == "(":
                self.next()
                parts = [self.parse_term()]
                while self.peek().text == ",":
                    self.next()
                    parts.append(self.parse_term())
                self.expect(")")
                return Struct(t.text, tuple(parts))
            return Sym(t.text)
        raise RuleSyntaxError(f"expected a term, found {t.text!r}", t.line, t.col)


@dataclass(frozen=True)
class _Float:
    """Parse-time only; normalized away before a literal is built."""
    value: float


def parse_program(text: str, validate: bool = True) -> Program:
    """Parse rule-language source into a Program.

    With validate=True (the default) the program is also checked for
    range restriction and stratification.
    """
    program = _Parser(text).parse_program()
    if validate:
        validate_program(program)
    return program


def parse_term(text: str):
    p = _Parser(text)
    t = p.parse_term()
    if p.peek().kind != "eof":
        tok = p.peek()
        raise RuleSyntaxError(f"trailing input {tok.text!r}", tok.line, tok.col)
    return t


# --- serializer ------------------------------------------------------------

_LNAME_RE = re.compile(r"[a-z][A-Za-z0-9_]*\Z")


def _serialize_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Int):
        return str(t.value)
    if isinstance(t, Sym):
        return t.name if _LNAME_RE.match(t.name) else f"'{t.name}'"
    if isinstance(t, Struct):
        return f"{t.functor}({','.join(_serialize_term(a) for a in t.args)})"
    raise TypeError(t)


def _serialize_expr(e) -> str:
    if isinstance(e, BinOp):
        lhs = _serialize_expr(e.lhs)
        rhs = _serialize_expr(e.rhs)
        if e.op == "+" :
            return f"{lhs}+{rhs}"
        # parenthesize additive children under *
        if isinstance(e.lhs, BinOp) and e.lhs.op == "+":
            lhs = f"({lhs})"
        if isinstance(e.rhs, BinOp) and e.rhs.op == "+":
            rhs = f"({rhs})"
        return f"{lhs}*{rhs}"
    return _serialize_term(e)


def serialize_literal(lit) -> str:
    if isinstance(lit, Pos):
        if lit.args:
            return f"{lit.pred}({','.join(_serialize_term(a) for a in lit.args)})"
        return lit.pred
    if isinstance(lit, Naf):
        inner = Pos(lit.pred, lit.args)
        return f"not {serialize_literal(inner)}"
    if isinstance(lit, Cmp):
        return f"{_serialize_term(lit.lhs)} {lit.op} {_serialize_term(lit.rhs)}"
    if isinstance(lit, Is):
        op = "#\\=" if lit.negated else "#="
        return f"{_serialize_term(lit.lhs)} {op} {_serialize_expr(lit.rhs)}"
    if isinstance(lit, Forall):
        if lit.domain[0] == "sym":
            dom = "{" + ",".join(lit.domain[1]) + "}"
        elif lit.domain[0] == "enum_int":
            dom = "{" + ",".join(str(v) for v in lit.domain[1]) + "}"
        else:
            dom = f"{lit.domain[1]}..{lit.domain[2]}"
        return f"forall({lit.var.name} in {dom}, {serialize_literal(lit.goal)})"
    raise TypeError(lit)


def serialize_rule(rule: Rule) -> str:
    head = serialize_literal(Pos(rule.head_pred, rule.head_args))
    if not rule.body:
        return f"{head}."
    return f"{head} :- {', '.join(serialize_literal(l) for l in rule.body)}."


def serialize(program: Program) -> str:
    """Textual form; parse_program(serialize(p)) == p for parseable programs."""
    if not program.rules:
        return ""
    return "\n".join(serialize_rule(r) for r in program.rules) + "\n"


# --- validation: range restriction -----------------------------------------

def _check_range_restriction(rule: Rule):
    """Negative and arithmetic uses of a variable must be reachable from
    the head or a preceding binding literal.  Head variables count as
    bound: rule heads are entry points and callers supply their values
    (or, for numeric positions, an interval is opened on first use)."""
    bound = set()
    for t in rule.head_args:
        bound |= term_vars(t)
    for lit in rule.body:
        if isinstance(lit, Pos):
            bound |= literal_vars(lit)
        elif isinstance(lit, Naf):
            for v in literal_vars(lit):
                if v not in bound:
                    raise RangeRestrictionError(serialize_rule(rule), v.name)
        elif isinstance(lit, Cmp):
            if lit.op == EQ:
                # An equation may bind one fresh side from the other.
                lv, rv = term_vars(lit.lhs), term_vars(lit.rhs)
                if lv <= bound:
                    bound |= rv
                elif rv <= bound:
                    bound |= lv
                else:
                    free = (lv | rv) - bound
                    raise RangeRestrictionError(serialize_rule(rule), free.pop().name)
            else:
                # Ordered ops open intervals at runtime; only fully fresh
                # symbolic disunification is unsupported, checked at runtime.
                pass
        elif isinstance(lit, Is):
            for v in term_vars(lit.rhs):
                if v not in bound:
                    raise RangeRestrictionError(serialize_rule(rule), v.name)
            bound |= term_vars(lit.lhs)
        elif isinstance(lit, Forall):
            pass


# --- choice pairs ----------------------------------------------------------

@dataclass(frozen=True)
class ChoicePair:
    """p/not_p pair declaring a single-valued choice over a finite domain:
    member(X) holds iff domain_pred(domain_key, X)."""
    member_pred: str        # e.g. pre_relationship
    excluded_pred: str      # e.g. not_pre_relationship
    domain_pred: str        # e.g. f_domain
    domain_key: Sym         # e.g. relationship


def detect_choice_pairs(program: Program) -> tuple:
    pairs = []
    for pred in program.predicates:
        clauses = program.clauses(pred)
        if len(clauses) != 1:
            continue
        r = clauses[0]
        # member shape: p(X) :- not q(X).
        if (len(r.head_args) == 1 and isinstance(r.head_args[0], Var)
                and len(r.body) == 1 and isinstance(r.body[0], Naf)
                and r.body[0].args == r.head_args):
            q = r.body[0].pred
            q_clauses = program.clauses(q)
            if len(q_clauses) != 1:
                continue
            s = q_clauses[0]
            # excluded shape: q(X) :- dom(key, Y), p(Y), Y \= X.
            if (len(s.head_args) == 1 and isinstance(s.head_args[0], Var)
                    and len(s.body) == 3):
                x = s.head_args[0]
                d, pcall, neq = s.body
                if (isinstance(d, Pos) and len(d.args) == 2
                        and isinstance(d.args[0], Sym) and isinstance(d.args[1], Var)
                        and isinstance(pcall, Pos) and pcall.pred == pred
                        and pcall.args == (d.args[1],)
                        and isinstance(neq, Cmp) and neq.op == NEQ
                        and neq.lhs == d.args[1] and neq.rhs == x
                        and d.args[1] != x):
                    pairs.append(ChoicePair(pred, q, d.pred, d.args[0]))
    return tuple(pairs)


def _lowered_rules(program: Program, pairs) -> dict:
    """Predicate definitions with choice pairs replaced by membership and
    its negation.  Returns pred -> clause tuple."""
    members = {p.member_pred: p for p in pairs}
    excluded = {p.excluded_pred: p for p in pairs}
    defs: dict = {}
    for rule in program.rules:
        pred = rule.head_pred
        if pred in members:
            cp = members[pred]
            x = Var("X")
            rule = Rule(pred, (x,), (Pos(cp.domain_pred, (cp.domain_key, x)),))
        elif pred in excluded:
            cp = excluded[pred]
            x = Var("X")
            rule = Rule(pred, (x,), (Naf(cp.domain_pred, (cp.domain_key, x)),))
        defs.setdefault(pred, []).append(rule)
    return {k: tuple(v) for k, v in defs.items()}


# --- validation: stratification --------------------------------------------

def _stratification_check(defs: dict):
    """Reject negation cycles on the (lowered) predicate dependency graph."""
    pos_edges: dict = {}
    neg_edges: dict = {}
    for pred, clauses in defs.items():
        pos_edges.setdefault(pred, set())
        neg_edges.setdefault(pred, set())
        for rule in clauses:
            for lit in rule.body:
                if isinstance(lit, Pos):
                    pos_edges[pred].add(lit.pred)
                elif isinstance(lit, Naf):
                    neg_edges[pred].add(lit.pred)

    # Tarjan SCC over the union graph.
    index_counter = [0]
    stack, lowlink, index, on_stack = [], {}, {}, set()
    sccs = []

    def edges(v):
        return sorted(pos_edges.get(v, ()) | neg_edges.get(v, ()))

    def strongconnect(v):
        work = [(v, iter(edges(v)))]
        index[v] = lowlink[v] = index_counter[0]
        index_counter[0] += 1
        stack.append(v)
        on_stack.add(v)
        while work:
            node, it = work[-1]
            advanced = False
            for w in it:
                if w not in defs:
                    continue
                if w not in index:
                    index[w] = lowlink[w] = index_counter[0]
                    index_counter[0] += 1
                    stack.append(w)
                    on_stack.add(w)
                    work.append((w, iter(edges(w))))
                    advanced = True
                    break
                elif w in on_stack:
                    lowlink[node] = min(lowlink[node], index[w])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = set()
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.add(w)
                    if w == node:
                        break
                sccs.append(comp)

    for v in sorted(defs):
        if v not in index:
            strongconnect(v)

    for comp in sccs:
        for p in sorted(comp):
            bad = sorted(q for q in neg_edges.get(p, ()) if q in comp)
            if bad:
                raise StratificationError(_find_cycle(p, bad[0], pos_edges, neg_edges, defs))


def _find_cycle(start, via, pos_edges, neg_edges, defs):
    """Shortest path via -> start, prefixed with start -naf-> via."""
    from collections import deque
    if via == start:
        return (start, via, start)
    prev = {via: None}
    q = deque([via])
    while q:
        v = q.popleft()
        for w in sorted(pos_edges.get(v, ()) | neg_edges.get(v, ())):
            if w not in defs or w in prev:
                continue
            prev[w] = v
            if w == start:
                path = [w]
                while path[-1] is not None and path[-1] != via:
                    path.append(prev[path[-1]])
                path = list(reversed([p for p in path if p is not None]))
                return tuple([start, *path])
            q.append(w)
    return (start, via, start)


def validate_program(program: Program):
    for rule in program.rules:
        _check_range_restriction(rule)
    pairs = detect_choice_pairs(program)
    defs = _lowered_rules(program, pairs)
    _stratification_check(defs)
    return pairs


# --- domain declarations ----------------------------------------------------

def domains_from_program(program: Program, domain_pred: str = "f_domain") -> dict:
    """Recover feature domains from domain facts and interval rules.

    Returns name -> ("sym", values) | ("int", lo, hi).
    """
    out: dict = {}
    for rule in program.clauses(domain_pred):
        if len(rule.head_args) != 2:
            continue
        key, val = rule.head_args
        if not isinstance(key, Sym):
            continue
        if rule.is_fact and isinstance(val, Sym):
            kind, values = out.get(key.name, ("sym", ()))
            if kind == "sym" and val.name not in values:
                out[key.name] = ("sym", values + (val.name,))
        elif rule.is_fact and isinstance(val, Int):
            kind, values = out.get(key.name, ("sym", ()))
            if kind == "sym":
                out[key.name] = ("sym", values + (str(val.value),))
        elif isinstance(val, Var):
            lo = hi = None
            for lit in rule.body:
                if isinstance(lit, Cmp) and lit.lhs == val and isinstance(lit.rhs, Int):
                    if lit.op == GE:
                        lo = lit.rhs.value
                    elif lit.op == GT:
                        lo = lit.rhs.value + 1
                    elif lit.op == LE:
                        hi = lit.rhs.value
                    elif lit.op == LT:
                        hi = lit.rhs.value - 1
            if lo is not None and hi is not None:
                out[key.name] = ("int", lo, hi)
    return out


# --- completion (dual rules) ------------------------------------------------

def dual_name(pred: str) -> str:
    return "not_" + pred


@dataclass
class DualProgram:
    """A program together with constructive definitions of every negation.

    `duals` holds the generated not_* rules; `defs` is the solver-facing
    index of every predicate (lowered originals plus duals)."""
    original: Program
    duals: tuple
    defs: dict = field(repr=False)
    choice_pairs: tuple = ()
    domains: dict = field(default_factory=dict, repr=False)
    vars_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def clauses(self, pred: str) -> tuple:
        return self.defs.get(pred, ())

    def is_known(self, pred: str) -> bool:
        return pred in self.defs

    def __eq__(self, other):
        return (isinstance(other, DualProgram)
                and self.original == other.original
                and self.duals == other.duals)


def _rename_rule(rule: Rule, mapping: dict) -> Rule:
    # Variables outside the mapping pass through: a Forall-quantified
    # variable is scoped to its quantifier and substituted per value, so
    # it needs no per-activation renaming.
    def rt(t):
        if isinstance(t, Var):
            return mapping.get(t, t)
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(rt(a) for a in t.args))
        if isinstance(t, BinOp):
            return BinOp(t.op, rt(t.lhs), rt(t.rhs))
        return t

    def rl(lit):
        if isinstance(lit, Pos):
            return Pos(lit.pred, tuple(rt(a) for a in lit.args))
        if isinstance(lit, Naf):
            return Naf(lit.pred, tuple(rt(a) for a in lit.args))
        if isinstance(lit, Cmp):
            return Cmp(lit.op, rt(lit.lhs), rt(lit.rhs))
        if isinstance(lit, Is):
            return Is(rt(lit.lhs), rt(lit.rhs), lit.negated)
        if isinstance(lit, Forall):
            return Forall(rt(lit.var), lit.domain, rl(lit.goal))
        raise TypeError(lit)

    return Rule(rule.head_pred,
                tuple(rt(a) for a in rule.head_args),
                tuple(rl(l) for l in rule.body))


def _subst_var(positions, var: Var, replacement):
    def rt(t):
        if t == var:
            return replacement
        if isinstance(t, Struct):
            return Struct(t.functor, tuple(rt(a) for a in t.args))
        if isinstance(t, BinOp):
            return BinOp(t.op, rt(t.lhs), rt(t.rhs))
        return t

    def rl(lit):
        if isinstance(lit, Pos):
            return Pos(lit.pred, tuple(rt(a) for a in lit.args))
        if isinstance(lit, Naf):
            return Naf(lit.pred, tuple(rt(a) for a in lit.args))
        if isinstance(lit, Cmp):
            return Cmp(lit.op, rt(lit.lhs), rt(lit.rhs))
        if isinstance(lit, Is):
            return Is(rt(lit.lhs), rt(lit.rhs), lit.negated)
        raise TypeError(lit)

    return [rl(l) for l in positions]


def _negate_literal(lit):
    if isinstance(lit, Pos):
        return Naf(lit.pred, lit.args)
    if isinstance(lit, Naf):
        return Pos(lit.pred, lit.args)
    if isinstance(lit, Cmp):
        return Cmp(_NEGATED_OP[lit.op], lit.lhs, lit.rhs)
    if isinstance(lit, Is):
        return Is(lit.lhs, lit.rhs, not lit.negated)
    raise TypeError(lit)


def _recover_domain(var: Var, body, domains: dict, program: Program):
    """Finite range for a clause variable: a domain-predicate literal, a
    pair of comparison bounds, or an all-facts argument position."""
    for lit in body:
        if (isinstance(lit, Pos) and len(lit.args) == 2
                and isinstance(lit.args[0], Sym) and lit.args[1] == var
                and lit.args[0].name in domains):
            d = domains[lit.args[0].name]
            if d[0] == "sym":
                return ("sym", d[1])
            return ("int", d[1], d[2])
    lo = hi = None
    for lit in body:
        if isinstance(lit, Cmp) and lit.lhs == var and isinstance(lit.rhs, Int):
            if lit.op == GE:
                lo = lit.rhs.value
            elif lit.op == GT:
                lo = lit.rhs.value + 1
            elif lit.op == LE:
                hi = lit.rhs.value
            elif lit.op == LT:
                hi = lit.rhs.value - 1
    if lo is not None and hi is not None:
        return ("int", lo, hi)
    for lit in body:
        if isinstance(lit, Pos):
            clauses = program.clauses(lit.pred)
            if clauses and all(r.is_fact for r in clauses):
                for i, a in enumerate(lit.args):
                    if a == var:
                        vals = []
                        for r in clauses:
                            t = r.head_args[i] if i < len(r.head_args) else None
                            if isinstance(t, Sym) and t.name not in vals:
                                vals.append(t.name)
                            elif isinstance(t, Int) and str(t.value) not in vals:
                                vals.append(str(t.value))
                        if vals and all(isinstance(r.head_args[i], (Sym, Int))
                                        for r in clauses):
                            kinds = {type(r.head_args[i]) for r in clauses}
                            if kinds == {Int}:
                                ints = sorted(r.head_args[i].value for r in clauses)
                                return ("enum_int", tuple(ints))
                            return ("sym", tuple(vals))
    return None


def _dual_clauses_for(pred, arity, clauses, domains, program, defined_not):
    """Build the dual definition of one predicate.

    Emits `not_p(V..) :- not_p__c1(V..), ..., not_p__ck(V..)` plus, per
    clause, branch rules each of which keeps a satisfied prefix and negates
    one literal.  Clause variables not determined through the head are
    wrapped in bounded universal checks.
    """
    nname = dual_name(pred)
    head_vars = tuple(Var(f"V{i+1}") for i in range(arity))
    rules = []
    conj = []
    for ci, clause in enumerate(clauses, start=1):
        cname = f"{nname}__c{ci}"
        conj.append(Pos(cname, head_vars))
        # Rename clause apart from V*.
        mapping = {v: Var(f"W{j+1}") for j, v in enumerate(sorted(rule_vars(clause), key=lambda v: v.name))}
        clause = _rename_rule(clause, mapping)
        # Head-normal positions: V_i = t_i equations, then the body.
        positions = [Cmp(EQ, hv, t) for hv, t in zip(head_vars, clause.head_args)]
        positions += list(clause.body)
        # Resolve equations that simply name a variable: substitute and drop.
        changed = True
        while changed:
            changed = False
            for idx, lit in enumerate(positions):
                if isinstance(lit, Cmp) and lit.op == EQ:
                    a, b = lit.lhs, lit.rhs
                    if isinstance(b, Var) and b not in head_vars and b not in term_vars(a):
                        positions = _subst_var(positions[:idx] + positions[idx+1:], b, a)
                        changed = True
                        break
                    if isinstance(a, Var) and a not in head_vars and a not in term_vars(b):
                        positions = _subst_var(positions[:idx] + positions[idx+1:], a, b)
                        changed = True
                        break
        # Determination: head vars, plus vars reachable from determined ones
        # through equations (struct decomposition) and functional Is bindings.
        determined = set(head_vars)
        fixpoint = False
        while not fixpoint:
            fixpoint = True
            for lit in positions:
                if isinstance(lit, Is) and not lit.negated and isinstance(lit.lhs, Var):
                    if lit.lhs not in determined and term_vars(lit.rhs) <= determined:
                        determined.add(lit.lhs)
                        fixpoint = False
                elif isinstance(lit, Cmp) and lit.op == EQ:
                    lv, rv = term_vars(lit.lhs), term_vars(lit.rhs)
                    if lv <= determined and not rv <= determined:
                        determined |= rv
                        fixpoint = False
                    elif rv <= determined and not lv <= determined:
                        determined |= lv
                        fixpoint = False
        free = []
        for lit in positions:
            for v in sorted(literal_vars(lit), key=lambda v: v.name):
                if v not in determined and v not in free:
                    free.append(v)
        branches = []
        for idx, lit in enumerate(positions):
            if isinstance(lit, Is) and not lit.negated and isinstance(lit.lhs, Var) \
                    and lit.lhs not in head_vars and lit.lhs in determined:
                continue  # functional definition; nothing to negate
            branches.append(tuple(positions[:idx]) + (_negate_literal(lit),))
        if not free:
            for body in branches:
                rules.append(Rule(cname, head_vars, body))
        else:
            inner = f"{cname}__any"
            inner_args = head_vars + tuple(free)
            goal: Literal = Pos(inner, inner_args)
            for v in reversed(free):
                dom = _recover_domain(v, list(clause.body), domains, program)
                if dom is None:
                    raise UnboundedVariableError(
                        f"variable {v.name} in a clause of {pred} has no "
                        f"recoverable finite or interval range")
                goal = Forall(v, dom, goal)
            rules.append(Rule(cname, head_vars, (goal,)))
            for body in branches:
                rules.append(Rule(inner, inner_args, body))
    rules.insert(0, Rule(nname, head_vars, tuple(conj)))
    return rules


def complete(program: Program, domains: Optional[dict] = None) -> DualProgram:
    """Program completion: define not_p for every predicate.

    Predicates with no clauses get the unconditionally-true dual.  Domains
    default to the ones recoverable from the program's f_domain clauses.
    """
    pairs = validate_program(program)
    if domains is None:
        domains = domains_from_program(program)

    member_of = {p.member_pred: p for p in pairs}
    excluded_of = {p.excluded_pred: p for p in pairs}

    # Explicit not_* definitions are only allowed as choice-pair members.
    for pred in program.predicates:
        if pred.startswith("not_"):
            base = pred[len("not_"):]
            if base in program._index and pred not in excluded_of:
                raise DualConflictError(
                    f"{pred} is defined alongside {base} but the pair does "
                    f"not match the complementary choice shape")

    defs = _lowered_rules(program, pairs)

    # Arity per predicate (definition order, then first reference).
    arities: dict = {}
    def note(pred, n):
        arities.setdefault(pred, n)
    for rule in program.rules:
        note(rule.head_pred, len(rule.head_args))
    for rules in defs.values():
        for rule in rules:
            for lit in rule.body:
                if isinstance(lit, (Pos, Naf)):
                    note(lit.pred, len(lit.args))

    duals = []
    for pred in arities:
        if pred in excluded_of:
            # not_(not_pre_f) is membership again.
            cp = excluded_of[pred]
            x = Var("X")
            duals.append(Rule(dual_name(pred), (x,),
                              (Pos(cp.domain_pred, (cp.domain_key, x)),)))
            continue
        if pred in member_of:
            # The explicit excluded predicate already is the dual; emit an
            # alias so dual_name(member) resolves for NAF calls.
            cp = member_of[pred]
            if dual_name(pred) != cp.excluded_pred:
                hv = (Var("X"),)
                duals.append(Rule(dual_name(pred), hv, (Pos(cp.excluded_pred, hv),)))
            continue
        clauses = defs.get(pred, ())
        if not clauses:
            hv = tuple(Var(f"V{i+1}") for i in range(arities[pred]))
            duals.append(Rule(dual_name(pred), hv, ()))
            continue
        duals.extend(_dual_clauses_for(pred, arities[pred], clauses,
                                       domains, program, defs))

    all_defs = dict(defs)
    for pred in arities:
        all_defs.setdefault(pred, ())
    for rule in duals:
        all_defs.setdefault(rule.head_pred, ())
        all_defs[rule.head_pred] = all_defs[rule.head_pred] + (rule,)
    return DualProgram(original=program, duals=tuple(duals), defs=all_defs,
                       choice_pairs=pairs, domains=domains)
