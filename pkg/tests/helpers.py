"""Ground-expansion helpers shared across test modules."""

import itertools

from cfgs import NumericSet, SymbolSet


def value_choices(v):
    if isinstance(v, NumericSet):
        return list(v.values())
    if isinstance(v, SymbolSet):
        return list(v.values)
    return [v]


def expand_instance(inst):
    """Ground tuples covered by a (possibly set-valued) instance dict."""
    keys = list(inst)
    pools = [value_choices(inst[k]) for k in keys]
    for combo in itertools.product(*pools):
        yield tuple(zip(keys, combo))


def expand_pair(pair):
    """Ground (codes, counterfactual, cost) tuples covered by a pair."""
    keys = [k for k, _ in pair.counterfactual]
    pools = [value_choices(v) for _, v in pair.counterfactual]
    for combo in itertools.product(*pools):
        yield (pair.codes, tuple(zip(keys, combo)), pair.cost)
