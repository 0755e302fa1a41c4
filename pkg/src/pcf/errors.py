"""Exception hierarchy shared across the pcf package.

Every domain failure raises a subclass of :class:`PcfError`, so callers
(including the CLI) can distinguish domain failures (exit code 2) from
usage errors (1) and I/O errors (3).
"""


class PcfError(Exception):
    """Base class for all pcf domain errors."""


# --- space ------------------------------------------------------------

class MissingDimension(PcfError):
    """A SPARK dimension is absent from a space definition."""


class DuplicateTrait(PcfError):
    """A trait label appears more than once within one dimension."""


class EmptyDimension(PcfError):
    """A dimension was declared with no traits."""


class ZeroAgents(PcfError):
    """multi_agent_count called with n = 0."""


class UnknownTrait(PcfError):
    """A referenced trait label does not exist in the bound space."""


# --- constraints ------------------------------------------------------

class SchemaError(PcfError):
    """A JSON document does not conform to its expected schema."""


class UnknownAtom(PcfError):
    """A constraint references a (dimension, trait) atom not in the space."""


class SelfExclusion(PcfError):
    """An exclusion pairs an atom with itself."""


class UnknownContext(PcfError):
    """A context label is not defined in the constraint set."""


# --- coherence --------------------------------------------------------

class ContextMismatch(PcfError):
    """Objects from different contexts were combined."""


class CoverInvalid(PcfError):
    """glue was called with a family that does not cover its target."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = list(diagnostics or [])


class GluingConflict(PcfError):
    """Local sections disagree on an overlap; carries the conflict list."""

    def __init__(self, message, conflicts):
        super().__init__(message)
        self.conflicts = list(conflicts)


class UnmappedTrait(PcfError):
    """A trait map does not cover the trait carried by a section."""


# --- simulation -------------------------------------------------------

class InvariantViolation(PcfError):
    """A scenario document violates a field invariant; names the field path."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnknownTier(PcfError):
    """A star level not present in the scenario was requested."""


# --- stats ------------------------------------------------------------

class EmptyInput(PcfError):
    """An operation requiring data received none."""


class RankDeficient(PcfError):
    """The design matrix does not have full column rank."""


class DimensionMismatch(PcfError):
    """Mismatched shapes between design matrix and response."""


class DegenerateResponse(PcfError):
    """The response vector is constant; R-squared is undefined."""


class InsufficientData(PcfError):
    """Too few observations for the requested diagnostic."""


class DegenerateX(PcfError):
    """All predictor values are equal; no spline basis exists."""


# --- io ---------------------------------------------------------------

class DigestMismatch(PcfError):
    """A manifest digest does not match the recomputed value."""
