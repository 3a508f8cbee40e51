"""Exception hierarchy for the neumaier package.

Errors carry witnesses (the offending element, pair or count) as attributes
so callers can report exactly what failed.
"""
from __future__ import annotations


class NeumaierError(Exception):
    """Base class for all package errors."""


# --- group construction ---

class GroupSpecError(NeumaierError):
    """Malformed group structure string."""


class GroupOrderError(NeumaierError):
    """Requested group exceeds the configured maximum order."""


class AutBudgetExceeded(NeumaierError):
    """Automorphism search ran out of budget.

    ``found`` holds the (verified, but possibly incomplete) list of
    automorphism permutations discovered before the budget tripped.
    """

    def __init__(self, message: str, found=None):
        super().__init__(message)
        self.found = list(found) if found is not None else []


class OrbitCapExceeded(NeumaierError):
    """Too many m-subsets for orbit-representative computation."""


# --- graphs ---

class GraphError(NeumaierError):
    pass


class IdentityInConnectionSet(GraphError):
    pass


class NotInverseClosed(GraphError):
    def __init__(self, message: str, witness: int | None = None):
        super().__init__(message)
        self.witness = witness


class NotRegularError(GraphError):
    pass


class NotEdgeRegularError(GraphError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotSrgError(GraphError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotACliqueError(GraphError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class NotRegularCliqueError(GraphError):
    def __init__(self, message: str, witness=None, count=None):
        super().__init__(message)
        self.witness = witness
        self.count = count


class HNotCliqueError(GraphError):
    pass


class NotConnectedError(GraphError):
    pass


class NotDistanceRegularError(GraphError):
    def __init__(self, message: str, witness=None):
        super().__init__(message)
        self.witness = witness


class CanonBudgetExceeded(GraphError):
    """Canonical-labelling search exceeded its node budget."""


class IsoUndecided(GraphError):
    """Pairwise isomorphism search exceeded its node cap."""


# --- relative difference sets ---

class RdsError(NeumaierError):
    pass


class NotNormalError(RdsError):
    pass


class NotRdsError(RdsError):
    def __init__(self, message: str, element: int | None = None,
                 coefficient: int | None = None):
        super().__init__(message)
        self.element = element
        self.coefficient = coefficient


class NotBentError(NeumaierError):
    pass


class SearchSpaceTooLarge(NeumaierError):
    pass


# --- criterion checking / constructions ---

class PreconditionViolated(NeumaierError):
    def __init__(self, which: str, witness=None):
        super().__init__(f"precondition violated: {which}")
        self.which = which
        self.witness = witness


class ConditionFailed(NeumaierError):
    def __init__(self, condition: int, witness=None, message: str = ""):
        super().__init__(message or f"condition ({condition}) failed")
        self.condition = condition
        self.witness = witness


class BadRdsParams(NeumaierError):
    pass


class WrongUOrder(NeumaierError):
    pass


class InvalidInput(NeumaierError):
    def __init__(self, which: str, message: str = ""):
        super().__init__(message or f"invalid input: {which}")
        self.which = which


# --- enumeration ---

class InfeasibleParameters(NeumaierError):
    pass


class BudgetExceeded(NeumaierError):
    """Enumeration node budget exceeded; partial results are flagged."""
