"""Wire/display encodings for engine values shared by the CLI and service.

Interval answers are reported with a boundary witness: the admissible
value closest to the original one (the smallest change that satisfies
the constraint).
"""

from __future__ import annotations

import hashlib
import json

from .engine import CounterfactualPair, ProblemSpec
from .solver import NumericSet, SymbolSet

__all__ = ["value_to_json", "pair_to_json", "instance_to_json",
           "pair_label", "canonical_json", "trace_id"]


def _witness(ns: NumericSet, reference=None):
    if reference is None:
        return ns.min
    if ns.contains(reference):
        return reference
    best = None
    for lo, hi in ns.intervals:
        for edge in (lo, hi):
            if best is None or abs(edge - reference) < abs(best - reference):
                best = edge
    return best


def _interval_label(ns: NumericSet, feature=None):
    parts = []
    for lo, hi in ns.intervals:
        if lo == hi:
            parts.append(str(lo))
        elif feature is not None and feature.lo == lo:
            parts.append(f"≤ {hi}")
        elif feature is not None and feature.hi == hi:
            parts.append(f"≥ {lo}")
        else:
            parts.append(f"{lo}..{hi}")
    return " or ".join(parts)


def value_to_json(value, feature=None, reference=None):
    """Scalar values pass through; set values become tagged objects."""
    if isinstance(value, NumericSet):
        return {
            "kind": "interval",
            "intervals": [[lo, hi] for lo, hi in value.intervals],
            "witness": _witness(value, reference),
            "label": _interval_label(value, feature),
        }
    if isinstance(value, SymbolSet):
        return {"kind": "oneof", "values": list(value.values),
                "witness": value.values[0],
                "label": " or ".join(value.values)}
    return value


def instance_to_json(spec: ProblemSpec, instance) -> dict:
    return {f.name: value_to_json(instance[f.name], feature=f)
            for f in spec.features}


def pair_to_json(spec: ProblemSpec, pair: CounterfactualPair) -> dict:
    original = dict(pair.original)
    return {
        "original": dict(pair.original),
        "codes": dict(pair.codes),
        "counterfactual": {
            name: value_to_json(v, feature=spec.feature(name),
                                reference=original[name])
            for name, v in pair.counterfactual},
        "cost": pair.cost,
    }


def pair_label(spec: ProblemSpec, pair: CounterfactualPair) -> str:
    """One-line rendering of the changed features: 'f: old -> new'."""
    codes = dict(pair.codes)
    original = dict(pair.original)
    bits = []
    for name, value in pair.counterfactual:
        if codes[name] == 0:
            continue
        if isinstance(value, NumericSet):
            shown = _interval_label(value, spec.feature(name))
        elif isinstance(value, SymbolSet):
            shown = " or ".join(value.values)
        else:
            shown = str(value)
        bits.append(f"{name}: {original[name]} → {shown}")
    return "; ".join(bits) if bits else "(no change)"


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def trace_id(pair_json: dict) -> str:
    return hashlib.sha1(canonical_json(pair_json).encode("utf-8")).hexdigest()[:12]
