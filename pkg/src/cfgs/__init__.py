"""Counterfactual generation for rule-based classifiers.

Feature domains, causal rules, decision rules and mutability restrictions
compile into a logic program with dual rules; goal-directed evaluation of
that program enumerates cost-ranked (original, counterfactual) pairs.
"""

from .asp_core import (
    Cmp, DualProgram, Forall, Int, Is, Naf, Pos, Program, Rule, Struct, Sym,
    Var, complete, domains_from_program, parse_program, serialize,
)
from .solver import (
    Answer, DerivationNode, NumericSet, Subst, SymbolSet,
    assert_constraint, solve, trace, unify,
)
from .engine import (
    AuxDef, CausalRule, Condition, CounterfactualPair, DecisionClause,
    DecisionModel, FeatureSpec, NotAux, ProblemSpec,
    build_counterfactual_rule, classify, compile_spec, completed_spec, cost,
    check_restriction, enumerate_counterfactuals, enumerate_undesired, explain,
)
from . import errors

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
