class ProjectionMatchingError(Exception):
    """Base class for every error raised by the reconstruction pipeline"""


class DepthError(ProjectionMatchingError):
    """A point sits at or behind a camera's image plane"""

    def __init__(self, message, view=None, index=None, step=None):
        self.view = view
        self.index = index
        self.step = step
        super().__init__(message)

    def at_step(self, step):
        """Copy of this error tagged with the optimization step that hit it"""
        return DepthError(f"Step {step}: {self}", view=self.view, index=self.index, step=step)


class InvalidCamera(ProjectionMatchingError):
    """Camera matrix is non-finite or its 3x3 block is singular"""


class EmptySilhouette(ProjectionMatchingError):
    """Silhouette has nothing a sampler could draw points from"""


class NonTermination(ProjectionMatchingError):
    """Rejection sampling exhausted its attempt budget"""


class EmptySet(ProjectionMatchingError):
    """An operation that needs points received none"""


class KTooLarge(ProjectionMatchingError):
    """More neighbours requested than points indexed"""


class InvalidSetting(ProjectionMatchingError):
    """Sweep axis or setting that cannot be run"""


class ShapeMismatch(ProjectionMatchingError):
    """Voxel grids with different resolution or bounds were compared"""


class FileFormatError(ProjectionMatchingError):
    """Malformed input file"""

    def __init__(self, path, message, line=None):
        self.path = str(path)
        self.line = line
        where = f"{self.path}:{line}" if line is not None else self.path
        super().__init__(f"{where}: {message}")
