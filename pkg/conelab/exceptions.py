class ConelabError(Exception):
    """Base class for every error raised by conelab"""


class InvalidInputError(ConelabError):
    """Input vectors or brackets violate an operation's precondition"""


class DimensionMismatchError(InvalidInputError):
    def __init__(self, left: int, right: int):
        self.left = left
        self.right = right
        super().__init__(f"dimension mismatch: {left} != {right}")


class InvalidParameterError(ConelabError):
    """A parameter (delta, functional, family name, schedule) is not admissible"""


class SolverFailureError(ConelabError):
    def __init__(self, message: str, best_iterate=None, iterations: int = 0):
        self.best_iterate = best_iterate
        self.iterations = iterations
        super().__init__(message)


class TruncationSaturatedError(ConelabError):
    """Every index of the truncation lies in the saturated set N_x"""


class SeparationError(ConelabError):
    def __init__(self, message: str, functional=None, sup_value: float = float("nan"), alpha: float = float("nan")):
        self.functional = functional
        self.sup_value = sup_value
        self.alpha = alpha
        super().__init__(message)
