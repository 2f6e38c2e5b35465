"""Exception types shared across the package."""


class SingheatError(Exception):
    """Base class for all package errors."""


class NonFinite(SingheatError):
    """ODE solution overflowed; carries the escape radius."""

    def __init__(self, msg, escape_radius=None):
        super().__init__(msg)
        self.escape_radius = escape_radius


class ToleranceNotMet(SingheatError):
    pass


class TailNotSettled(SingheatError):
    """The far-field coefficient has not converged; increase r_max."""


class NoBracket(SingheatError):
    pass


class GateViolation(SingheatError):
    """Sobolev-subcritical gate (N-2)*alpha < 4 violated."""


class NotIntegrable(SingheatError):
    """Singular exponent gamma >= N: the field is not locally integrable."""


class GammaDomain(SingheatError):
    pass


class SupercriticalExponentRequired(SingheatError):
    """alpha <= 2/N: the pure-power threshold is undefined."""


class QuadratureFailure(SingheatError):
    pass


class SeriesNotConverged(SingheatError):
    pass


class ForcingUnbounded(SingheatError):
    pass


class Unbounded(SingheatError):
    pass


class Inconclusive(SingheatError):
    """A verdict fell inside the numerical margin band."""

    def __init__(self, msg, functional_value=None, witness_t=None, margin=None):
        super().__init__(msg)
        self.functional_value = functional_value
        self.witness_t = witness_t
        self.margin = margin


class LevelOutOfRange(SingheatError):
    pass


class NoAdmissibleT(SingheatError):
    """No representable T satisfies the smallness conditions."""

    def __init__(self, msg, binding_constraint=None):
        super().__init__(msg)
        self.binding_constraint = binding_constraint


class EnvelopeViolated(SingheatError):
    def __init__(self, msg, where=None, margin=None):
        super().__init__(msg)
        self.where = where
        self.margin = margin


class NotContracting(SingheatError):
    def __init__(self, msg, factors=None, worst_node=None):
        super().__init__(msg)
        self.factors = factors
        self.worst_node = worst_node


class GridTooCoarse(SingheatError):
    pass


class ConfigError(SingheatError):
    pass


class SeparationNotResolved(SingheatError):
    pass
