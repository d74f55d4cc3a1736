"""Exception hierarchy shared by every module of the package."""


class NambuError(Exception):
    """Base class for all errors raised by this package."""


class ContextMismatchError(NambuError, ValueError):
    """Operands live over different coordinate contexts."""


class ResourceLimitError(NambuError):
    """An intermediate result exceeded the configured term ceiling."""


class DegreeError(NambuError, ValueError):
    """A multivector or form has a degree the operation cannot accept."""


class NotNambuError(NambuError, ValueError):
    """A multivector field failed the Nambu (decomposable + integrable) test."""


class FactorizationError(NambuError, ValueError):
    """A caller-supplied factorization is inconsistent."""


class RegimeError(NambuError, ValueError):
    """A commutativity test was called outside its dimensional regime."""


class DegenerateRegimeError(RegimeError):
    """The wedge of the two structures vanishes identically."""


class InvalidMapError(NambuError, ValueError):
    """A coordinate map is not a two-sided polynomial inverse pair."""


class ReductionError(NambuError, ValueError):
    """The preconditions of a reduction Lambda = Pi ^ Theta fail."""


class WitnessError(NambuError, ValueError):
    """A supplied witness does not have the required shape or property."""


class LieActionError(NambuError, ValueError):
    """Structure constants or images do not define a Lie algebra morphism."""


class PreconditionError(NambuError, ValueError):
    """An input violates a documented precondition of the operation."""
