"""Exception types shared across the package."""


class FramewiseError(Exception):
    """Base class for all package-specific errors."""


class UnknownRelation(FramewiseError):
    """A structure interprets a relation symbol outside the class signature."""


class NotASubset(FramewiseError):
    """A vertex set is not contained in the universe it is restricted from."""


class FrameMismatch(FramewiseError):
    """Two structures disagree on a frame level where agreement is required."""


class NotInClass(FramewiseError):
    """A structure fails the axioms of the local class it was offered to."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class SizeLimit(FramewiseError):
    """An enumeration would exceed the configured size cap."""


class WitnessNotFound(FramewiseError):
    """Witness search gave up after the candidate cap.

    Carries the per-candidate success probability ``p`` (exact rational) and
    the probability bound ``(1-p)**cap`` that an honest sample exhausts the
    cap, so callers can tell astronomically-bad luck from an inconsistent
    request.
    """

    def __init__(self, cap, p, bound):
        self.cap = cap
        self.p = p
        self.bound = bound
        super().__init__(
            f"no witness within {cap} candidates; per-candidate success "
            f"probability {p} gives failure bound {bound:.3e}"
        )


class NotFree(FramewiseError):
    """A group action has a nontrivial stabilizer where freeness is required."""


class InvalidAction(FramewiseError):
    """A mapping claimed to be a group action fails the action axioms."""


class VertexClash(FramewiseError):
    """A vertex supposed to be fresh already belongs to the complex."""


class PreconditionFailed(FramewiseError):
    """A geometric construction was fed a chart violating its precondition."""


class DegenerateCell(FramewiseError):
    """A maximal cell of a chart has numerically vanishing volume."""


class ConfigError(FramewiseError):
    """Command-line arguments do not describe a runnable experiment."""
