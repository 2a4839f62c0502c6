"""Exception types shared across the package."""


class InvalidSpecError(ValueError):
    """A system description violates its invariants (ordering, index ranges, units)."""


class ShapeMismatchError(ValueError):
    """Operator dimensions are incompatible."""


class ContractError(ValueError):
    """A caller handed an operator that violates a documented precondition."""


class NumericError(RuntimeError):
    """A computation cannot produce a trustworthy number."""
