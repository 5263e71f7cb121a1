"""Exception hierarchy shared by all sgmc modules."""


class SgmcError(Exception):
    """Base class for all errors raised by this package."""


class CapExceeded(SgmcError):
    """A configured size cap (elements, vertices, enumerated paths) was hit."""


class DivisionByZero(SgmcError):
    """Division of rational functions by the zero function."""


class ZeroDenominator(SgmcError):
    """A denominator vanished (at a point, or identically after substitution)."""


class NonUnitDenominator(SgmcError):
    """Series expansion requested for a denominator with zero constant term."""


class PoleAtLimit(SgmcError):
    """The box-variable limit diverges (numerator order below denominator order)."""


class NotLeftZero(SgmcError):
    """An operation requiring a left-zero minimal ideal got something else."""


class NotUsp(SgmcError):
    """A graph expected to have the unique-simple-path property does not."""


class PathNotInGraph(SgmcError):
    """A path argument does not describe a path from the root of the graph."""


class StarOfUnit(SgmcError):
    """Kleene star applied to a language containing the empty word."""


class AmbiguousExpression(SgmcError):
    """A pipeline Kleene expression produced some word twice (internal bug)."""


class ResidualMassNonzero(SgmcError):
    """Limit mass on vertices outside the minimal ideal did not vanish."""


class NotStochastic(SgmcError):
    """A numeric transition matrix whose columns do not sum to one."""


class NotIrreducible(SgmcError):
    """The eigenvector solve found a nullspace of dimension != 1."""


class VerificationFailed(SgmcError):
    """Cross-check between the symbolic pipeline and an exact oracle failed."""


class UnknownVertexWord(SgmcError):
    """A vertex word requested on the command line does not exist."""


class ChainFileError(SgmcError):
    """Malformed chain input file; message names the offending field."""
