"""Exception and warning types raised across the package."""


class MuDomainsError(ValueError):
    """Base class for all package errors."""


class DenominatorVanishes(MuDomainsError):
    pass


class NormInfinite(MuDomainsError):
    pass


class PoleOnBoundary(MuDomainsError):
    pass


class OutsideDisc(MuDomainsError):
    pass


class PickInfeasible(MuDomainsError):
    pass


class OnTorusX3(MuDomainsError):
    """The canonical beta formula is singular because |x3| is (numerically) 1."""


class OutsideDomain(MuDomainsError):
    pass


class InfeasibleProblem(MuDomainsError):
    pass


class ConstructionIncomplete(MuDomainsError):
    """No interpolant strategy produced a verified disc.

    The problem is feasible, so this signals a gap in the constructions,
    never infeasibility. ``diagnostics`` carries per-strategy details.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class WitnessNotConstructed(MuDomainsError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class MalformedInput(MuDomainsError):
    pass


class HypothesisViolated(UserWarning):
    """A query falls outside the hypotheses under which the conditions are equivalent."""
