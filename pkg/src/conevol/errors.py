"""Exception types shared across the package.

Every error carries enough payload (offending index, pair, flat, residual)
for the CLI to print an actionable, module-qualified message.
"""


class ConevolError(Exception):
    """Base class; `code` is the stable machine-readable identifier."""

    code = "error"


class ZeroColumn(ConevolError):
    code = "geometry.zero_column"

    def __init__(self, index):
        self.index = index
        super().__init__(f"normal column {index} has zero length")


class DuplicateDirection(ConevolError):
    code = "geometry.duplicate_direction"

    def __init__(self, i, j):
        self.pair = (i, j)
        super().__init__(f"normal columns {i} and {j} point in the same direction")


class NotPositivelySpanning(ConevolError):
    code = "geometry.not_positively_spanning"

    def __init__(self, index=None):
        self.index = index
        detail = "" if index is None else f" (direction -u_{index} unreachable)"
        super().__init__("columns do not positively span the ambient space" + detail)


class ZeroVolume(ConevolError):
    code = "geometry.zero_volume"


class OriginLeavesBody(ConevolError):
    code = "geometry.origin_leaves_body"

    def __init__(self, index):
        self.index = index
        super().__init__(f"translation makes support level {index} negative")


class NotNormalized(ConevolError):
    code = "measure.not_normalized"


class NotPositive(ConevolError):
    code = "measure.not_positive"

    def __init__(self, index):
        self.index = index
        super().__init__(f"weight {index} is negative")


class NotReducible(ConevolError):
    code = "matroid.not_reducible"


class Irreducible(ConevolError):
    code = "matroid.irreducible"


class NotPlanar(ConevolError):
    code = "planar.not_planar"


class OutsideTypeCone(ConevolError):
    code = "planar.outside_type_cone"

    def __init__(self, indices):
        self.indices = tuple(indices)
        super().__init__(f"edge lengths negative at positions {self.indices}")


class NonSimpleType(ConevolError):
    code = "typecones.non_simple"


class InterpolationIllConditioned(ConevolError):
    code = "typecones.interpolation_ill_conditioned"


class OnTypeConeBoundary(ConevolError):
    code = "inverse.on_type_cone_boundary"


class NoConvergence(ConevolError):
    code = "inverse.no_convergence"

    def __init__(self, best_residual, best_b):
        self.best_residual = float(best_residual)
        self.best_b = best_b
        super().__init__(
            f"no start converged; best residual {self.best_residual:.3e}"
        )
