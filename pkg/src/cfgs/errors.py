"""Exception types shared across the engine.

Errors are split roughly by layer: rule-language errors (parsing,
validation, completion), solver errors (evaluation guards), problem-spec
errors (feature/instance validation), and fixture/IO errors.
"""


class CfgsError(Exception):
    """Base class for all engine errors."""


# --- rule language ---------------------------------------------------------

class RuleSyntaxError(CfgsError):
    def __init__(self, message, line=None, col=None):
        self.line = line
        self.col = col
        self.message = message
        where = f" at {line}:{col}" if line is not None else ""
        super().__init__(f"syntax error{where}: {message}")


class RangeRestrictionError(CfgsError):
    def __init__(self, rule, variable, message=None):
        self.rule = rule
        self.variable = variable
        detail = message or "not bound by the head or a preceding positive literal"
        super().__init__(f"variable {variable} in rule `{rule}` {detail}")


class StratificationError(CfgsError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__(
            "negation cycle through predicates: " + " -> ".join(self.cycle)
        )


class UnboundedVariableError(CfgsError):
    """A variable has no recoverable finite or interval range."""


class DualConflictError(CfgsError):
    """A predicate `not_p` is defined alongside `p` outside the recognized
    complementary-pair shape, so completion cannot name p's dual."""


# --- solver ----------------------------------------------------------------

class UnknownPredicateError(CfgsError):
    def __init__(self, pred):
        self.pred = pred
        super().__init__(f"query uses undefined predicate: {pred}")


class DepthLimitExceeded(CfgsError):
    """Resolution-step budget exhausted; the program is likely outside the
    supported terminating fragment."""


class TypeMismatch(CfgsError):
    """Ordered comparison applied to symbolic terms."""


class ConstraintResidueError(CfgsError):
    """An answer would need a residual constraint between two unbound
    variables (e.g. X #< Y with both interval-valued), which the answer
    representation cannot carry."""


class TraceUnavailable(CfgsError):
    """The answer was produced with tracing disabled."""


# --- problem specs ---------------------------------------------------------

class SpecValidationError(CfgsError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class DomainError(CfgsError):
    """Instance value outside the declared feature domain."""


class UnrealisticInstance(CfgsError):
    """Instance violates a causal rule."""


class NotUndesired(CfgsError):
    """explain() was asked about an instance that already receives the
    desired outcome."""


class IllegalCode(CfgsError):
    """Restriction code not legal for the feature kind (e.g. -1 on a
    categorical feature)."""


class UnresolvedCode(CfgsError):
    """cost() requires every restriction code to be resolved."""


class InfeasibleRestrictions(CfgsError):
    """No counterfactual can exist under the requested restrictions."""


# --- oracle / fixtures -----------------------------------------------------

class GridTooLarge(CfgsError):
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(f"ground grid has {size} cells, exact mode allows {limit}")


class FixtureCorrupt(CfgsError):
    def __init__(self, path, message="checksum mismatch"):
        self.path = str(path)
        super().__init__(f"{path}: {message}")
