"""Exception hierarchy.

``InputError`` marks bad parameters (CLI exit 2); ``ComputationError`` marks
numerical failure on valid input (CLI exit 3).
"""


class ModelError(Exception):
    pass


class InputError(ModelError, ValueError):
    pass


class ComputationError(ModelError, RuntimeError):
    pass


class BracketError(ComputationError):
    """No sign change of the function over the supplied bracket."""


class ConvergenceError(ComputationError):
    pass


class EvaluationError(ComputationError):
    """Function returned a non-finite value."""


class InfeasibleEndowmentError(InputError):
    pass


class UnpriceableError(InputError):
    """Expected loss is total (pi * lambda >= 1)."""


class ConfigError(InputError):
    pass
