"""Exception hierarchy.  Everything derives from ``AiryBeamError`` (a ValueError)."""


class AiryBeamError(ValueError):
    pass


class GeometryError(AiryBeamError):
    pass


class ObstacleError(AiryBeamError):
    pass


class GridError(AiryBeamError):
    pass


class DomainError(AiryBeamError):
    pass


class DegenerateScaleError(AiryBeamError):
    pass


class QuadratureError(AiryBeamError):
    pass


class RangeError(AiryBeamError):
    pass


class UserInsideObstacleError(AiryBeamError):
    pass


class ParamError(AiryBeamError):
    pass


class ZeroChannelError(AiryBeamError):
    pass


class SpecError(AiryBeamError):
    pass


class ZeroVectorError(AiryBeamError):
    pass


class RankError(AiryBeamError):
    """Raised only when even the regularized least-squares refit fails."""


class EmptyCodebookError(AiryBeamError):
    pass


class PowerError(AiryBeamError):
    pass
