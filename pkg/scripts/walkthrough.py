#!/usr/bin/env python3
"""End-to-end walkthrough on the demo spec.

Prints the compiled program, both symbolic worlds, the counterfactual
pairs for one instance, and a derivation tree justifying the flip.
"""

from cfgs import completed_spec, enumerate_counterfactuals, enumerate_undesired, explain
from cfgs.asp_core import Naf, Sym, serialize
from cfgs.fixtures import load_fixture
from cfgs.render import pair_label
from cfgs.solver import solve, trace


def main():
    spec = load_fixture("married").problem
    dp = completed_spec(spec)

    print("=== compiled program ===")
    print(serialize(dp.original))

    print("=== undesired world (symbolic) ===")
    for inst in enumerate_undesired(spec):
        print("  ", inst)
    print("=== counterfactual world (symbolic) ===")
    for inst in enumerate_counterfactuals(spec):
        print("  ", inst)

    original = {"relationship": "husband", "gender": "male", "age": 40}
    print(f"\n=== recourse for {original} (gender and age pinned) ===")
    for pair in explain(spec, original, {"gender": 0, "age": 0}):
        print(f"  cost {pair.cost}: {pair_label(spec, pair)}")

    print("\n=== why 'unmarried' escapes the decision ===")
    [answer] = solve(dp, [Naf("lite_married", (Sym("unmarried"),))], trace=True)
    print(trace(answer).pretty())


if __name__ == "__main__":
    main()
