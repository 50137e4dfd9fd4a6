"""Exception hierarchy shared by every module."""


class MacsError(ValueError):
    """Base class for all domain errors raised by grassmacs."""


class IndexOutOfRange(MacsError):
    pass


class DuplicateIndex(MacsError):
    pass


class GroundMismatch(MacsError):
    pass


class SizeOutOfRange(MacsError):
    pass


class GroundTooLargeForEnumeration(MacsError):
    pass


class GroundTooLarge(MacsError):
    pass


class GroundTooLargeForExhaustion(MacsError):
    pass


class EmptyFamily(MacsError):
    pass


class EvenMemberPresent(MacsError):
    pass


class FamilyTooLarge(MacsError):
    pass


class WrongCardinality(MacsError):
    pass


class WindowOverflow(MacsError):
    pass


class InvalidParams(MacsError):
    pass


class ConstructionMismatch(AssertionError):
    """A closed-form family disagrees with its directly computed closure."""
