#!/usr/bin/env python3
"""Per-fixture timing table: compile once, then time one explain call.

Mirrors the measurement protocol used for the shipped rule sets: one
undesired instance per dataset, time to produce its counterfactual pairs.
Numbers are hardware-dependent; the test suite only asserts ceilings.
"""

import time

from cfgs import classify, completed_spec, explain
from cfgs.fixtures import fixture_ids, load_fixture

import sys
import pathlib

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parent.parent / "tests"))
from test_acceptance import FIXTURE_SCENARIOS  # noqa: E402  (scenario table)


def main():
    print(f"{'fixture':20s} {'features':>8s} {'compile ms':>11s} "
          f"{'explain ms':>11s} {'pairs':>6s} {'min cost':>9s}")
    for spec_id in fixture_ids():
        spec = load_fixture(spec_id).problem
        t0 = time.perf_counter()
        completed_spec(spec)
        compile_ms = (time.perf_counter() - t0) * 1000
        instance, restrictions, bound = FIXTURE_SCENARIOS[spec_id]
        assert classify(spec, instance) == "undesired"
        t0 = time.perf_counter()
        pairs = explain(spec, instance, restrictions, cost_bound=bound, limit=10)
        explain_ms = (time.perf_counter() - t0) * 1000
        print(f"{spec_id:20s} {len(spec.features):>8d} {compile_ms:>11.1f} "
              f"{explain_ms:>11.1f} {len(pairs):>6d} "
              f"{pairs[0].cost if pairs else '-':>9}")


if __name__ == "__main__":
    main()
