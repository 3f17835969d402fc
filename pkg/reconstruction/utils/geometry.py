"""
Point types, the fused pinhole camera and perspective projection.

Image frame: continuous pixel coordinates, origin at the top-left corner,
x to the right, y downward, one unit per pixel. Pixel (a, b) covers
[a, a+1) x [b, b+1), so its center sits at (a + 0.5, b + 0.5).
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from ..exceptions import DepthError, FileFormatError, InvalidCamera

logger = logging.getLogger(__name__)

DEPTH_EPS = 1e-8


def _frozen(array, columns, name):
    arr = np.array(array, dtype=np.float64)
    if arr.size == 0:
        arr = arr.reshape(0, columns)
    if arr.ndim != 2 or arr.shape[1] != columns:
        raise ValueError(f"{name} must have shape (n, {columns}), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or Infinity values")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointCloud3D:
    """J points in object-centered world units; row j is the same logical point across iterations."""

    points: np.ndarray

    def __post_init__(self):
        arr = _frozen(self.points, 3, "PointCloud3D")
        if len(arr) < 1:
            raise ValueError("PointCloud3D needs at least one point")
        object.__setattr__(self, "points", arr)

    def __len__(self):
        return len(self.points)

    def __getitem__(self, j):
        return self.points[j]

    def bounding_radius(self):
        return float(np.sqrt((self.points ** 2).sum(axis=1)).max())


@dataclass(frozen=True, eq=False)
class PointSet2D:
    """Irregular 2D points in pixel coordinates; never clipped to the image."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points, 2, "PointSet2D"))

    def __len__(self):
        return len(self.points)

    def __getitem__(self, j):
        return self.points[j]


@dataclass(frozen=True, eq=False)
class Camera:
    """
    Fused 3x4 projection matrix C = K [R | t].

    Attributes:
        matrix: 3x4 intrinsics times extrinsics.
        view_id: Index i of the view this camera belongs to.
        width, height: Image size in pixels, when known.
    """

    matrix: np.ndarray
    view_id: int = 0
    width: Optional[int] = None
    height: Optional[int] = None
    _left_inv: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.float64)
        if mat.shape == (12,):
            mat = mat.reshape(3, 4)
        if mat.shape != (3, 4):
            raise InvalidCamera(f"Camera matrix must be 3x4, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise InvalidCamera("Camera matrix contains NaN or Infinity values")
        det = np.linalg.det(mat[:, :3])
        if not np.isfinite(det) or abs(det) < 1e-12 * max(1.0, np.abs(mat[:, :3]).max() ** 3):
            raise InvalidCamera(f"Camera {self.view_id} is degenerate (det={det:.3g})")
        mat.setflags(write=False)
        object.__setattr__(self, "matrix", mat)
        object.__setattr__(self, "_left_inv", np.linalg.inv(mat[:, :3]))

    @classmethod
    def from_parameters(cls, focal, principal_point, rotation, translation,
                        view_id=0, width=None, height=None):
        """Build C from focal length (pixels), principal point, world-to-camera rotation and translation."""
        cx, cy = principal_point
        intrinsics = np.array([[focal, 0.0, cx], [0.0, focal, cy], [0.0, 0.0, 1.0]])
        extrinsics = np.hstack([np.asarray(rotation, dtype=np.float64),
                                np.asarray(translation, dtype=np.float64).reshape(3, 1)])
        return cls(intrinsics @ extrinsics, view_id=view_id, width=width, height=height)

    @classmethod
    def look_at(cls, center, target, up, focal, width, height, view_id=0):
        """Pinhole camera at `center` looking at `target` with `up` pointing to the image top."""
        center = np.asarray(center, dtype=np.float64)
        forward = np.asarray(target, dtype=np.float64) - center
        forward /= np.linalg.norm(forward)
        right = np.cross(forward, np.asarray(up, dtype=np.float64))
        norm = np.linalg.norm(right)
        if norm < 1e-12:
            raise InvalidCamera("look_at up vector is parallel to the viewing direction")
        right /= norm
        down = np.cross(forward, right)
        rotation = np.vstack([right, down, forward])
        return cls.from_parameters(focal, (width / 2.0, height / 2.0), rotation, -rotation @ center,
                                   view_id=view_id, width=width, height=height)

    @property
    def center(self):
        """Camera center in world coordinates (null space of C)."""
        return -self._left_inv @ self.matrix[:, 3]

    def rescaled(self, factor, width=None, height=None):
        """Same pose with pixel coordinates multiplied by `factor` (resolution change)."""
        scale = np.diag([factor, factor, 1.0])
        return Camera(scale @ self.matrix, view_id=self.view_id,
                      width=width if width is not None else _scaled(self.width, factor),
                      height=height if height is not None else _scaled(self.height, factor))

    def to_dict(self):
        return {
            'view_id': int(self.view_id),
            'width': self.width,
            'height': self.height,
            'matrix': [float(v) for v in self.matrix.ravel()],
        }

    @classmethod
    def from_dict(cls, data):
        return cls(np.asarray(data['matrix'], dtype=np.float64), view_id=int(data['view_id']),
                   width=data.get('width'), height=data.get('height'))


def _scaled(size, factor):
    return None if size is None else int(round(size * factor))


def homogeneous(points, matrix):
    """Rows of [C [p 1]^T] for an (n, 3) array; columns are (a, b, w)."""
    return points @ matrix[:, :3].T + matrix[:, 3]


def _check_depth(h, eps, view_id):
    bad = np.flatnonzero(h[:, 2] <= eps)
    if len(bad):
        j = int(bad[0])
        raise DepthError(
            f"Point {j} has depth {h[j, 2]:.3g} <= {eps:g} in view {view_id}",
            view=view_id, index=j,
        )


def project_points(points, cam, eps=DEPTH_EPS):
    """Perspective projection of an (n, 3) array; returns an (n, 2) array."""
    h = homogeneous(np.asarray(points, dtype=np.float64), cam.matrix)
    _check_depth(h, eps, cam.view_id)
    return h[:, :2] / h[:, 2:3]


def project(cloud: PointCloud3D, cam: Camera, eps=DEPTH_EPS) -> PointSet2D:
    """q = (row1 [p 1] / w, row2 [p 1] / w) for every point, in input order."""
    return PointSet2D(project_points(cloud.points, cam, eps))


def project_jacobians(points, cam, eps=DEPTH_EPS):
    """Stack of dq/dp for an (n, 3) array, shape (n, 2, 3)."""
    h = homogeneous(np.asarray(points, dtype=np.float64), cam.matrix)
    _check_depth(h, eps, cam.view_id)
    r = cam.matrix[:, :3]
    w = h[:, 2:3]
    inv_w2 = 1.0 / (w * w)
    jac = np.empty((len(h), 2, 3))
    jac[:, 0, :] = (w * r[0] - h[:, 0:1] * r[2]) * inv_w2
    jac[:, 1, :] = (w * r[1] - h[:, 1:2] * r[2]) * inv_w2
    return jac


def project_jacobian(p, cam: Camera, eps=DEPTH_EPS) -> np.ndarray:
    """2x3 Jacobian of the perspective map at a single point."""
    return project_jacobians(np.asarray(p, dtype=np.float64).reshape(1, 3), cam, eps)[0]


def read_cloud(path) -> PointCloud3D:
    """Load an ASCII "x y z" file; '#' lines are comments."""
    path = Path(path)
    try:
        data = np.loadtxt(path, comments='#', ndmin=2, dtype=np.float64)
    except OSError as exc:
        raise FileFormatError(path, f"cannot read point cloud: {exc}") from exc
    except ValueError as exc:
        raise FileFormatError(path, f"malformed point cloud: {exc}") from exc
    if data.size == 0:
        raise FileFormatError(path, "point cloud has no points")
    if data.shape[1] != 3:
        raise FileFormatError(path, f"expected 3 columns, found {data.shape[1]}")
    try:
        return PointCloud3D(data)
    except ValueError as exc:
        raise FileFormatError(path, str(exc)) from exc


def write_cloud(cloud: PointCloud3D, path, comment=None):
    header = comment if comment is not None else f"{len(cloud)} points"
    np.savetxt(path, cloud.points, fmt='%.10g', delimiter=' ', header=header, comments='# ')


def write_points_2d(points: PointSet2D, path, comment=None):
    header = comment if comment is not None else f"{len(points)} points"
    np.savetxt(path, points.points, fmt='%.10g', delimiter=' ', header=header, comments='# ')


def load_cameras(path) -> List[Camera]:
    path = Path(path)
    try:
        with open(path) as f:
            data = json.load(f)
        cameras = [Camera.from_dict(view) for view in data['views']]
    except OSError as exc:
        raise FileFormatError(path, f"cannot read cameras: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise FileFormatError(path, f"malformed camera file: {exc}") from exc
    logger.debug("Loaded %d cameras from %s", len(cameras), path)
    return cameras


def save_cameras(cameras: Sequence[Camera], path):
    with open(path, 'w') as f:
        json.dump({'views': [cam.to_dict() for cam in cameras]}, f, indent=2)
        f.write('\n')
