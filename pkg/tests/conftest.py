import pytest

from cfgs import (
    CausalRule, Condition, DecisionClause, DecisionModel, FeatureSpec,
    ProblemSpec,
)


def married_spec(age_hi=90):
    """The running demo spec: relationship/gender/age with a causal tie."""
    return ProblemSpec(
        name="married",
        features=(
            FeatureSpec("relationship", "categorical",
                        values=("husband", "wife", "unmarried")),
            FeatureSpec("gender", "categorical", values=("male", "female")),
            FeatureSpec("age", "numeric", lo=17, hi=age_hi),
        ),
        decision=DecisionModel(
            target="married",
            clauses=(
                DecisionClause((Condition("relationship", "=", "husband"),)),
                DecisionClause((Condition("relationship", "=", "wife"),)),
            ),
        ),
        causal_rules=(
            CausalRule("relationship", "husband",
                       (Condition("gender", "\\=", "female"),)),
            CausalRule("relationship", "wife",
                       (Condition("gender", "\\=", "male"),)),
            CausalRule("relationship", "unmarried", ()),
        ),
    )


@pytest.fixture
def married():
    return married_spec()


@pytest.fixture
def married_small():
    """Same spec with age reduced to [17, 20] so the full grid is tiny."""
    return married_spec(age_hi=20)
