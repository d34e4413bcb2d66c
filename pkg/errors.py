"""Exception hierarchy shared by every arborize module."""


class ArborizeError(Exception):
    """Base class for all arborize failures."""


class InputError(ArborizeError, ValueError):
    """Malformed graph, degree function, certificate or JSON document."""

    def __init__(self, message: str, field_path: str = ""):
        super().__init__(message)
        self.field_path = field_path


class PreconditionError(ArborizeError):
    """An operation was called on an input outside its stated precondition."""

    def __init__(self, message: str, parameter: str = "", value=None):
        super().__init__(message)
        self.parameter = parameter
        self.value = value


class BudgetExceededError(ArborizeError):
    """Refusal to run an enumeration or search beyond its configured budget."""

    def __init__(self, message: str, size=None):
        super().__init__(message)
        self.size = size


class CertificateError(ArborizeError):
    """A decomposition certificate failed verification."""

    def __init__(self, message: str, verdict=None):
        super().__init__(message)
        self.verdict = verdict


class LPCertificateError(ArborizeError):
    """Primal and dual LP certificates disagree; indicates a solver bug."""


class ScalingError(ArborizeError):
    """a_f*(mG) != m * a_f*(G) was observed."""


class TransversalError(ArborizeError):
    """No independent transversal was found."""

    def __init__(self, message: str, class_index: int = -1, class_size: int = 0):
        super().__init__(message)
        self.class_index = class_index
        self.class_size = class_size
