"""Exception hierarchy.

Input problems (bad matrices, bad radii, bad files) derive from
:class:`InputError`; the CLI maps them to exit code 2.
"""


class PSVError(Exception):
    pass


class InputError(PSVError):
    pass


class SingularMatrixError(InputError):
    pass


class OrientationError(InputError):
    def __init__(self, index, det):
        super().__init__(f"generator {index} has det {det} <= 0")
        self.index = index
        self.det = det


class ContractingElementError(InputError):
    def __init__(self, index, matrix):
        super().__init__(f"generator {index} is contracting: {matrix}")
        self.index = index
        self.matrix = matrix


class IdentityGeneratorError(InputError):
    pass


class BallTruncationError(PSVError):
    """Vertex budget exceeded; ``partial`` holds the ball built so far."""

    def __init__(self, message, partial):
        super().__init__(message)
        self.partial = partial


class InvalidCutError(InputError):
    pass


class MalformedBallError(PSVError):
    pass


class InadmissibleMarkError(InputError):
    pass


class FrontierUngluedError(PSVError):
    """A mark whose partner copy lies outside the materialized ball.

    ``missing`` is the word of the copy that would hold the partner.
    ``path`` is the partial geodesic when raised from a trace.
    """

    def __init__(self, mark, missing, path=None):
        super().__init__(f"{mark} is unglued: partner copy {list(missing)} not materialized")
        self.mark = mark
        self.missing = missing
        self.path = path


class TangentialCrossingError(PSVError):
    pass


class InvalidStartError(InputError):
    pass


class ProbeRadiusError(PSVError):
    pass


class PlacementError(PSVError):
    pass


class RegionError(InputError):
    pass
