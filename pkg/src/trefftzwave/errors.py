"""Exception types shared across the package."""


class TrefftzWaveError(Exception):
    """Base class for all package errors."""


class DegenerateFace(TrefftzWaveError):
    """Face endpoints coincide (zero length)."""


class UnclassifiableFace(TrefftzWaveError):
    """Interior face is characteristic or super-characteristic, or a
    boundary face does not sit on the part of the boundary it claims."""


class UnclassifiedFace(TrefftzWaveError):
    """Assembly met a face without a valid classification."""


class InvalidPartition(TrefftzWaveError):
    """Mesh builder received a non-increasing partition or an
    inconsistent boundary/wave-speed specification."""


class NonTerminating(TrefftzWaveError):
    """Tent pitching stopped making progress (iteration cap hit)."""


class HasTimeLikeFaces(TrefftzWaveError):
    """Causal ordering requested on a mesh with interior time-like faces."""


class CyclicDependency(TrefftzWaveError):
    """Causal element graph contains a cycle (mesh bug)."""


class UnsupportedOrder(TrefftzWaveError):
    """Quadrature order outside the supported range."""


class NotStarShaped(TrefftzWaveError):
    """Element polygon is not star-shaped with respect to its centroid."""


class MissingParam(TrefftzWaveError):
    """A flux parameter required on this face kind is absent."""


class WrongFaceKind(TrefftzWaveError):
    """Operation applied to a face of an unsupported kind."""


class SingularSystem(TrefftzWaveError):
    """Global linear system could not be solved to the residual contract."""


class SingularLocalSystem(TrefftzWaveError):
    """A local element system in the causal sweep is singular."""


class MeshMismatch(TrefftzWaveError):
    """Two discrete solutions do not live on the same mesh/degree."""


class MissingTrace(TrefftzWaveError):
    """A two-sided trace was requested where no adjacent element exists."""


class NotSpaceLike(TrefftzWaveError):
    """Energy evaluation requested on a non space-like interface."""


class AssumptionViolated(TrefftzWaveError):
    """Stability-constant assumptions (Robin-only boundary, no time-like
    faces) do not hold for this mesh."""
