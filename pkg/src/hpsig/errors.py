"""Exception hierarchy.

Every domain failure raised by the library derives from :class:`HpsigError`;
the CLI maps these to exit code 1 and reports ``type(exc).__name__``.
"""


class HpsigError(Exception):
    """Base class for all domain errors."""


class EmptyInput(HpsigError):
    pass


class DuplicateMaximalSimplex(HpsigError):
    pass


class MalformedInput(HpsigError):
    pass


class DegreeOutOfRange(HpsigError):
    pass


class NoBoundary(HpsigError):
    pass


class NonManifoldBoundary(HpsigError):
    pass


class CocycleNotFlat(HpsigError):
    pass


class MissingEdge(HpsigError):
    pass


class UnknownIrrep(HpsigError):
    pass


class NotAPath(HpsigError):
    pass


class NotClosedOriented(HpsigError):
    pass


class DegenerateForm(HpsigError):
    pass


class ShapeMismatch(HpsigError):
    pass


class NotASubset(HpsigError):
    pass


class NoGroupAction(HpsigError):
    pass


class UnknownCommand(HpsigError):
    pass
