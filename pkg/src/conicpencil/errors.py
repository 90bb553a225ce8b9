"""Exception hierarchy.

Every precondition failure in the kernel raises a subclass of
:class:`GeometryError`, so callers that only care about "this input is
unusable" can catch one type while tests can match the precise reason.
"""


class GeometryError(ValueError):
    """Base class for all kernel errors."""


# numeric kernel
class IndeterminateEquation(GeometryError):
    pass


class NotSingular(GeometryError):
    pass


class ZeroVector(GeometryError):
    pass


# points, lines, maps
class DegenerateJoin(GeometryError):
    pass


class DegenerateMeet(GeometryError):
    pass


class NotCollinear(GeometryError):
    pass


class NotConcurrent(GeometryError):
    pass


class IndeterminateCrossRatio(GeometryError):
    pass


class DegenerateHarmonic(GeometryError):
    pass


class DegenerateFrame(GeometryError):
    pass


class SingularMap(GeometryError):
    pass


# conics
class PoleSingular(GeometryError):
    pass


class DegenerateConic(GeometryError):
    pass


class LineOnConic(GeometryError):
    pass


class NotDegenerate(GeometryError):
    pass


class UnderdeterminedConic(GeometryError):
    pass


class NotOnConic(GeometryError):
    pass


class NotTangent(GeometryError):
    pass


class IdenticalConics(GeometryError):
    pass


# pencils
class DegeneratePencil(GeometryError):
    pass


class BasePointIndeterminate(GeometryError):
    pass


class LineThroughBasePoint(GeometryError):
    pass


class DoublePointExcluded(GeometryError):
    pass


class ConditioningFailure(GeometryError):
    pass


# cross-ratio characterizations
class DegenerateTangent(GeometryError):
    pass


class DegenerateMember(GeometryError):
    pass


class CentersDegenerate(GeometryError):
    pass


class BadSecant(GeometryError):
    pass


class BadAuxConic(GeometryError):
    pass


# harness
class NotRenderable(GeometryError):
    pass


class SceneError(GeometryError):
    """Malformed scene document; the message carries the JSON path."""
