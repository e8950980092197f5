"""Exception types shared across the package."""


class PadicBallError(Exception):
    """Base class for all library errors."""


class DenominatorTooDeep(PadicBallError):
    """An additive-character argument has valuation below -K.

    The character value would need a root of unity of order beyond the
    session's cyclotomic ring.
    """


class PrecisionExhausted(PadicBallError):
    """An operation would need p-adic digits beyond the working precision."""


class NotInvertibleAtPrecision(PadicBallError):
    """A matrix is not invertible modulo p at the working precision."""


class LevelMismatch(PadicBallError):
    """A ball or measure was used at an incompatible quotient level."""


class QuotientMismatch(PadicBallError):
    """Two measures live on different finite quotients."""


class HypothesisViolated(PadicBallError):
    """The preconditions of a conditional identity do not hold.

    The identity is only asserted under its hypotheses; violating inputs
    are rejected rather than silently tested.
    """


class SessionError(PadicBallError):
    """Invalid session parameters."""
