"""Exception types shared across the workbench."""


class NullgaugeError(Exception):
    """Base class for all workbench errors."""


class ParseError(NullgaugeError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownIdentifierError(ParseError):
    pass


class UnboundSymbolError(NullgaugeError):
    pass


class SingularPointError(NullgaugeError):
    """Evaluation hit a division by zero or log of zero.

    Carries the offending subexpression so callers can report it.
    """

    def __init__(self, subexpression, detail):
        super().__init__(f"singular point in {subexpression}: {detail}")
        self.subexpression = subexpression
        self.detail = detail


class IndeterminateSamplingError(NullgaugeError):
    """The sampling box was exhausted: every draw hit a denominator guard."""


class DegenerateLagrangianError(NullgaugeError):
    """The Lagrangian carries no second-order dynamics (coefficient of the
    acceleration vanishes identically)."""


class ImmediateSingularityError(NullgaugeError):
    """Integration could not start: a guard is already violated at t0."""

    def __init__(self, event):
        super().__init__(
            f"singularity at start: {event.denominator} = {event.value!r} "
            f"at t = {event.time!r}"
        )
        self.event = event
