"""Exception types shared across the package."""


class ShadowlabError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(ShadowlabError):
    """Operands have incompatible or invalid dimensions."""


class DegenerateBasisError(ShadowlabError):
    """A vector family that must be independent is not."""


class ParameterError(ShadowlabError):
    """An argument violates a documented precondition."""


class PolytopeError(ShadowlabError):
    """Vertex data does not describe a valid full-dimensional polytope."""


class InadmissiblePlaneError(ShadowlabError):
    """A plane required to be admissible makes some 2-face class degenerate."""


class DegenerateShadowError(ShadowlabError):
    """All vertex images are collinear, so there is no shadow polygon."""


class SamplingError(ShadowlabError):
    """A randomized search exhausted its budget."""


class WalkError(ShadowlabError):
    """A walk construction could not certify its invariants."""


class GeometryError(ShadowlabError):
    """A geometric configuration required by a construction is absent."""
