"""Exception types shared across the package."""


class EmptySetError(ValueError):
    """An operation that requires a nonempty set received an empty one."""


class EmptyRegionError(EmptySetError):
    """A region turned out to be empty, possibly only at the probed resolution.

    ``resolution`` is the grid spacing at which emptiness was established,
    or ``None`` when the verdict is exact.
    """

    def __init__(self, message: str, resolution: float | None = None):
        super().__init__(message)
        self.resolution = resolution


class UnsupportedNormError(ValueError):
    """The operation is only defined for specific norms (usually Euclidean 2D)."""
