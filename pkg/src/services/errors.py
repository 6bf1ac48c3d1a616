class ExforgeError(Exception):
    """Base class for every error raised by the library"""
    pass


class RangeError(ExforgeError):
    """Raised when a bit index or slice falls outside a string"""
    pass


class LengthMismatch(ExforgeError):
    """Raised when operands or inputs have the wrong length"""
    pass


class CtxMismatch(ExforgeError):
    """Raised when field elements from different fields are combined"""
    pass


class DivisionByZero(ExforgeError):
    """Raised when inverting the zero field element"""
    pass


class Inconsistent(ExforgeError):
    """Raised when a linear system has no solution"""
    pass


class DuplicatePoint(ExforgeError):
    """Raised when evaluation points repeat"""
    pass


class SpaceMismatch(ExforgeError):
    """Raised when two distributions live on different outcome spaces"""
    pass


class ExplosionGuard(ExforgeError):
    """Raised when an exhaustive enumeration exceeds the configured budget"""
    pass


class FixedPointFound(ExforgeError):
    """Raised when a tamperer certified fixed-point-free has a fixed point"""
    pass


class Infeasible(ExforgeError):
    """Raised when a parameter plan cannot satisfy a required inequality"""

    def __init__(self, inequality: str, detail: str = ""):
        self.inequality = inequality
        message = f"infeasible: {inequality}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)


class PlanViolation(ExforgeError):
    """Raised when a configuration breaks an invariant of its plan"""
    pass


class PlanInfeasible(PlanViolation):
    """Raised when the encoder's constraint system would be overdetermined"""
    pass


class RowLengthMismatch(ExforgeError):
    """Raised when merger rows differ in length"""
    pass


class CountExceedsUniverse(ExforgeError):
    """Raised when more distinct positions are requested than exist"""
    pass


class InsufficientSeed(ExforgeError):
    """Raised when sampling runs out of seed bits"""
    pass


class CodewordFormatError(ExforgeError):
    """Raised when a codeword file is not a well-formed NMC1 file"""
    pass


class PlanHashMismatch(ExforgeError):
    """Raised when a codeword file was written under a different plan"""
    pass


class UsageError(ExforgeError):
    """Raised when command-line input cannot be interpreted"""
    pass
