"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: input problems exit 1, capacity
overruns exit 2, validation and invariant failures exit 3.
"""


class GraphDecError(Exception):
    """Base class for all library errors."""


class InputError(GraphDecError):
    """Malformed or out-of-domain input (unknown vertex, bad arity, ...)."""


class PreconditionError(InputError):
    """A documented precondition does not hold for the given input."""


class CapacityError(GraphDecError):
    """A brute-force operation was asked to exceed its configured cap."""

    def __init__(self, what, size, cap):
        super().__init__(f"{what}: size {size} exceeds cap {cap}")
        self.what = what
        self.size = size
        self.cap = cap


class ValidationError(GraphDecError):
    """A structured value violates one of its stated invariants."""


class ClassificationError(ValidationError):
    """Node typing contradicts the partitivity trichotomy."""


class ReconstructionError(ValidationError):
    """A leaf structure is not realizable as the leaves of a proper tree."""
