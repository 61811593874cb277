"""The cfgs-spec/1 document format.

A problem spec file is a small YAML document, written by hand:

    schema: cfgs-spec/1
    metadata:
      dataset: married
      undesired: married
    features:
      - {name: relationship, kind: categorical, values: [husband, wife, unmarried]}
      - {name: gender, kind: categorical, values: [male, female], mutability: immutable}
      - {name: age, kind: numeric, range: [17, 90], mutability: increase_only}
    causal_rules:
      - when: {feature: relationship, value: husband}
        require:
          - {feature: gender, is_not: female}
    decision_rules:
      target: married
      clauses:
        - all:
            - {feature: relationship, is: husband}
        - all:
            - {feature: relationship, is: wife}

Conditions use one keyword operator per entry: is, is_not, at_least,
at_most, above, below, or the two-sided sugar between: [lo, hi]; a
negated auxiliary predicate is written {not: name}.  Auxiliary predicate
definitions live under decision_rules.aux and may only reference
auxiliaries declared before them.  Fractional numeric bounds are
normalized to the equivalent integer bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import yaml

from .engine import (
    AuxDef, CausalRule, Condition, DecisionClause, DecisionModel, FeatureSpec,
    NotAux, ProblemSpec,
)
from .errors import SpecValidationError

__all__ = ["SCHEMA", "SpecDocument", "load_document", "loads_document",
           "document_to_dict", "document_from_problem_spec"]

SCHEMA = "cfgs-spec/1"

_OP_KEYWORDS = {"is": "=", "is_not": "\\=", "at_least": "#>=",
                "at_most": "#=<", "above": "#>", "below": "#<"}


@dataclass
class SpecDocument:
    """A parsed spec file: raw metadata plus the validated ProblemSpec."""
    spec_id: str
    metadata: dict
    problem: ProblemSpec
    raw: dict = field(repr=False, default_factory=dict)


def _err(path, msg):
    raise SpecValidationError(path, msg)


def _expect_map(obj, path):
    if not isinstance(obj, Mapping):
        _err(path, f"expected a mapping, got {type(obj).__name__}")
    return obj


def _norm_int(value, op, path):
    """Integer bound; fractional values collapse onto the equivalent
    integer comparison (at_most 23.25 -> 23, at_least 23.25 -> 24)."""
    if isinstance(value, bool):
        _err(path, "boolean is not a numeric bound")
    if isinstance(value, int):
        return value, op
    if isinstance(value, float):
        if op == "#=<":
            return math.floor(value), op
        if op == "#<":
            return (math.floor(value), "#=<") if value != int(value) \
                else (int(value), op)
        if op == "#>=":
            return math.ceil(value), op
        if op == "#>":
            return (math.ceil(value), "#>=") if value != int(value) \
                else (int(value), op)
        _err(path, f"fractional value {value} not allowed with {op}")
    _err(path, f"expected a number, got {value!r}")


def _parse_condition(obj, path, features, aux_names):
    obj = _expect_map(obj, path)
    if "not" in obj:
        if set(obj) != {"not"}:
            _err(path, "a negated auxiliary takes no other keys")
        name = obj["not"]
        if name not in aux_names:
            _err(path, f"unknown auxiliary predicate {name!r}")
        return [NotAux(name)]
    if "feature" not in obj:
        _err(path, "condition needs a feature")
    fname = obj["feature"]
    f = features.get(fname)
    if f is None:
        _err(path, f"unknown feature {fname!r}")
    ops = [k for k in obj if k != "feature"]
    if len(ops) != 1:
        _err(path, f"condition needs exactly one operator, got {ops}")
    key = ops[0]
    if key == "between":
        pair = obj[key]
        if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
            _err(path, "between takes [lo, hi]")
        lo, lo_op = _norm_int(pair[0], "#>=", path)
        hi, hi_op = _norm_int(pair[1], "#=<", path)
        return [Condition(fname, lo_op, lo), Condition(fname, hi_op, hi)]
    if key not in _OP_KEYWORDS:
        _err(path, f"unknown operator {key!r}")
    op = _OP_KEYWORDS[key]
    value = obj[key]
    if f.kind == "numeric":
        if op in ("=", "\\="):
            if isinstance(value, float) and value == int(value):
                value = int(value)
            if not isinstance(value, int) or isinstance(value, bool):
                _err(path, f"numeric equality needs an integer, got {value!r}")
        else:
            value, op = _norm_int(value, op, path)
    else:
        value = str(value)
    return [Condition(fname, op, value)]


def _parse_clause(obj, path, features, aux_names):
    obj = _expect_map(obj, path)
    if set(obj) != {"all"}:
        _err(path, "a clause is written {all: [conditions...]}")
    conds = obj["all"]
    if not isinstance(conds, list):
        _err(path + ".all", "expected a list of conditions")
    out = []
    for i, c in enumerate(conds):
        out.extend(_parse_condition(c, f"{path}.all[{i}]", features, aux_names))
    return DecisionClause(tuple(out))


def loads_document(text: str, spec_id: str = "spec") -> SpecDocument:
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        _err("document", f"not valid YAML: {e}")
    if raw is None:
        _err("document", "empty document")
    raw = _expect_map(raw, "document")
    if raw.get("schema") != SCHEMA:
        _err("schema", f"expected {SCHEMA!r}, got {raw.get('schema')!r}")

    metadata = dict(raw.get("metadata") or {})

    flist = raw.get("features")
    if not isinstance(flist, list) or not flist:
        _err("features", "expected a non-empty list")
    features = []
    by_name = {}
    for i, fobj in enumerate(flist):
        path = f"features[{i}]"
        fobj = _expect_map(fobj, path)
        name = fobj.get("name")
        kind = fobj.get("kind")
        mutability = fobj.get("mutability", "free")
        if kind == "categorical":
            values = fobj.get("values")
            if not isinstance(values, list) or not values:
                _err(f"{path}.values", "expected a non-empty list")
            f = FeatureSpec(name=str(name), kind="categorical",
                            values=tuple(str(v) for v in values),
                            mutability=str(mutability))
        elif kind == "numeric":
            rng = fobj.get("range")
            if not (isinstance(rng, (list, tuple)) and len(rng) == 2):
                _err(f"{path}.range", "expected [lo, hi]")
            lo, _ = _norm_int(rng[0], "#>=", f"{path}.range")
            hi, _ = _norm_int(rng[1], "#=<", f"{path}.range")
            f = FeatureSpec(name=str(name), kind="numeric", lo=lo, hi=hi,
                            mutability=str(mutability))
        else:
            _err(f"{path}.kind", f"expected categorical or numeric, got {kind!r}")
        features.append(f)
        by_name[f.name] = f

    causal = []
    for i, cobj in enumerate(raw.get("causal_rules") or []):
        path = f"causal_rules[{i}]"
        cobj = _expect_map(cobj, path)
        when = _expect_map(cobj.get("when", {}), f"{path}.when")
        fname, value = when.get("feature"), when.get("value")
        if fname not in by_name:
            _err(f"{path}.when", f"unknown feature {fname!r}")
        conds = []
        for j, c in enumerate(cobj.get("require") or []):
            parsed = _parse_condition(c, f"{path}.require[{j}]", by_name, set())
            for p in parsed:
                if isinstance(p, NotAux):
                    _err(f"{path}.require[{j}]",
                         "causal rules cannot reference auxiliaries")
            conds.extend(parsed)
        causal.append(CausalRule(str(fname), str(value), tuple(conds)))

    dobj = _expect_map(raw.get("decision_rules", {}), "decision_rules")
    target = dobj.get("target")
    if not target:
        _err("decision_rules.target", "missing")
    aux_entries = [_expect_map(a, f"decision_rules.aux[{i}]")
                   for i, a in enumerate(dobj.get("aux") or [])]
    aux_names = {str(a.get("name")) for a in aux_entries}
    aux_defs = []
    for i, aobj in enumerate(aux_entries):
        path = f"decision_rules.aux[{i}]"
        name = aobj.get("name")
        clauses = tuple(
            _parse_clause(c, f"{path}.clauses[{j}]", by_name, aux_names)
            for j, c in enumerate(aobj.get("clauses") or []))
        aux_defs.append(AuxDef(str(name), clauses))
    clauses = tuple(
        _parse_clause(c, f"decision_rules.clauses[{i}]", by_name, aux_names)
        for i, c in enumerate(dobj.get("clauses") or []))

    problem = ProblemSpec(
        features=tuple(features),
        decision=DecisionModel(target=str(target), clauses=clauses,
                               aux=tuple(aux_defs)),
        causal_rules=tuple(causal),
        name=str(metadata.get("dataset", spec_id)),
    )
    return SpecDocument(spec_id=spec_id, metadata=metadata,
                        problem=problem, raw=dict(raw))


def load_document(path, spec_id: Optional[str] = None) -> SpecDocument:
    import pathlib
    p = pathlib.Path(path)
    return loads_document(p.read_text(encoding="utf-8"),
                          spec_id or p.stem)


_OP_TO_KEYWORD = {v: k for k, v in _OP_KEYWORDS.items()}


def _condition_to_dict(cond):
    if isinstance(cond, NotAux):
        return {"not": cond.aux}
    return {"feature": cond.feature, _OP_TO_KEYWORD[cond.op]: cond.value}


def document_from_problem_spec(problem: ProblemSpec, spec_id: str = "spec",
                               metadata: Optional[dict] = None) -> SpecDocument:
    """Inverse of loads_document, up to condition-sugar normalization."""
    raw = {"schema": SCHEMA, "metadata": dict(metadata or {"dataset": problem.name})}
    feats = []
    for f in problem.features:
        d = {"name": f.name, "kind": f.kind}
        if f.kind == "categorical":
            d["values"] = list(f.values)
        else:
            d["range"] = [f.lo, f.hi]
        if f.mutability != "free":
            d["mutability"] = f.mutability
        feats.append(d)
    raw["features"] = feats
    if problem.causal_rules:
        raw["causal_rules"] = [
            {"when": {"feature": cr.feature, "value": cr.value},
             "require": [_condition_to_dict(c) for c in cr.conditions]}
            for cr in problem.causal_rules]
    d = {"target": problem.decision.target,
         "clauses": [{"all": [_condition_to_dict(c) for c in cl.conditions]}
                     for cl in problem.decision.clauses]}
    if problem.decision.aux:
        d["aux"] = [{"name": a.name,
                     "clauses": [{"all": [_condition_to_dict(c) for c in cl.conditions]}
                                 for cl in a.clauses]}
                    for a in problem.decision.aux]
    raw["decision_rules"] = d
    return SpecDocument(spec_id=spec_id, metadata=raw["metadata"],
                        problem=problem, raw=raw)


def document_to_dict(doc: SpecDocument) -> dict:
    return {"id": doc.spec_id, **doc.raw}
