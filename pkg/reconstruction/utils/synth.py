"""
Self-consistent test scenes.

A scene is a ground-truth cloud, a ring of look-at cameras and the
silhouettes obtained by splatting the cloud into every view. Cameras use
focal = image size so an object of radius ~0.5 at distance 2 fills about
half the frame.
"""
import enum
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import List, Optional

import numpy as np

from ..exceptions import FileFormatError
from .geometry import (Camera, PointCloud3D, load_cameras, project_points, read_cloud,
                       save_cameras, write_cloud)
from .nn_index import Index2D
from .silhouette import Silhouette, load_silhouette, write_pgm

logger = logging.getLogger(__name__)

REFERENCE_RESOLUTION = 64
DEFAULT_SPLAT_RADIUS = 1.5
DEFAULT_CAMERA_RADIUS = 2.0

CAMERAS_FILE = 'cameras.json'
GT_FILE = 'gt.xyz'
VIEW_PATTERN = 'view_{:03d}.pgm'


class Shape(str, enum.Enum):
    SQUARE = 'square'
    TWO_BARS = 'two-bars'
    HELIX = 'helix'
    FROM_FILE = 'file'


BAR_SECTION = 0.05
HELIX_THICKNESS = 0.03


def ring_cameras(n_views, radius=DEFAULT_CAMERA_RADIUS, focal=None, image_size=REFERENCE_RESOLUTION,
                 elevation=0.0, azimuth=0.0) -> List[Camera]:
    """
    `n_views` cameras evenly spaced on a circle around the y axis, all
    looking at the origin with y up. `elevation` (degrees) lifts the ring;
    `azimuth` (degrees) turns the first camera away from +z.
    """
    if n_views < 1:
        raise ValueError(f"n_views must be >= 1, got {n_views}")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    focal = float(image_size if focal is None else focal)
    lift = math.radians(elevation)
    cameras = []
    for i in range(n_views):
        theta = math.radians(azimuth) + 2.0 * math.pi * i / n_views
        center = radius * np.array([
            math.cos(lift) * math.sin(theta),
            math.sin(lift),
            math.cos(lift) * math.cos(theta),
        ])
        cameras.append(Camera.look_at(center, np.zeros(3), (0.0, 1.0, 0.0), focal,
                                      image_size, image_size, view_id=i))
    return cameras


def pixel_centers(width, height):
    xs, ys = np.meshgrid(np.arange(width) + 0.5, np.arange(height) + 0.5)
    return np.stack([xs.ravel(), ys.ravel()], axis=1)


def splat_silhouette(cloud: PointCloud3D, cam: Camera, width, height,
                     splat_radius=DEFAULT_SPLAT_RADIUS) -> Silhouette:
    """Binary silhouette: a pixel is 1 iff its center lies within splat_radius of a projection."""
    projections = project_points(cloud.points, cam)
    _, d2 = Index2D(projections).query(pixel_centers(width, height), 1)
    mask = d2[:, 0] <= splat_radius * splat_radius
    return Silhouette(mask.reshape(height, width).astype(np.float64))


def _ball_offsets(rng, n, radius):
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * (radius * np.cbrt(rng.uniform(size=(n, 1))))


def square_cloud(n, rng, half=0.4):
    xy = rng.uniform(-half, half, size=(n, 2))
    return np.hstack([xy, np.zeros((n, 1))])


def two_bars_cloud(n, rng, half_length=0.4, section=BAR_SECTION):
    """Two perpendicular thin boxes: one along x, one along y, crossing at the origin."""
    first = n // 2
    second = n - first
    bar_x = np.column_stack([
        rng.uniform(-half_length, half_length, first),
        rng.uniform(-section / 2, section / 2, (first, 2)),
    ])
    cross = rng.uniform(-section / 2, section / 2, (second, 2))
    bar_y = np.column_stack([cross[:, 0], rng.uniform(-half_length, half_length, second), cross[:, 1]])
    return np.vstack([bar_x, bar_y])


def helix_cloud(n, rng, coil=0.3, height=0.8, turns=3.0, thickness=HELIX_THICKNESS):
    t = rng.uniform(0.0, 1.0, n)
    angle = 2.0 * math.pi * turns * t
    curve = np.column_stack([coil * np.cos(angle), height * (t - 0.5), coil * np.sin(angle)])
    return curve + _ball_offsets(rng, n, thickness)


def normalize_to_unit_ball(points):
    """Center on the bounding-box middle and shrink (never grow) into the unit ball."""
    points = np.asarray(points, dtype=np.float64)
    points = points - (points.min(axis=0) + points.max(axis=0)) / 2.0
    radius = float(np.sqrt((points ** 2).sum(axis=1)).max())
    if radius > 1.0:
        points = points / radius
    return points


@dataclass(frozen=True, eq=False)
class SceneSpec:
    gt_cloud: PointCloud3D
    cameras: List[Camera]
    splat_radius: float = DEFAULT_SPLAT_RADIUS

    def __post_init__(self):
        # raises DepthError if any camera cannot see every GT point
        for cam in self.cameras:
            project_points(self.gt_cloud.points, cam)

    def silhouettes(self) -> List[Silhouette]:
        return [splat_silhouette(self.gt_cloud, cam, cam.width, cam.height, self.splat_radius)
                for cam in self.cameras]

    def at_resolution(self, resolution):
        """Same scene with cameras rescaled to `resolution` pixels and the splat radius scaled with them."""
        factor = resolution / self.cameras[0].width
        cameras = [cam.rescaled(factor, resolution, resolution) for cam in self.cameras]
        return SceneSpec(self.gt_cloud, cameras, self.splat_radius * factor)


def make_scene(shape, points=2048, seed=0, path=None, n_views=5, image_size=REFERENCE_RESOLUTION,
               camera_radius=DEFAULT_CAMERA_RADIUS, focal=None, splat_radius=None,
               elevation=0.0, azimuth=0.0) -> SceneSpec:
    """Canonical GT cloud for `shape` plus its camera ring."""
    shape = Shape(shape)
    rng = np.random.default_rng(seed)
    builders = {
        Shape.SQUARE: square_cloud,
        Shape.TWO_BARS: two_bars_cloud,
        Shape.HELIX: helix_cloud,
    }
    if shape == Shape.FROM_FILE:
        if path is None:
            raise FileFormatError('<none>', "shape 'file' needs a point cloud path")
        gt = normalize_to_unit_ball(read_cloud(path).points)
    else:
        gt = builders[shape](points, rng)
        if PointCloud3D(gt).bounding_radius() > 1.0:
            gt = normalize_to_unit_ball(gt)

    if splat_radius is None:
        splat_radius = DEFAULT_SPLAT_RADIUS * image_size / REFERENCE_RESOLUTION
    cameras = ring_cameras(n_views, camera_radius, focal, image_size, elevation, azimuth)
    logger.info("Built %s scene: %d GT points, %d views at %dx%d", shape.value, len(gt), n_views,
                image_size, image_size)
    return SceneSpec(PointCloud3D(gt), cameras, splat_radius)


def save_scene(scene: SceneSpec, directory, silhouettes: Optional[List[Silhouette]] = None):
    """Write cameras.json, one graymap per view and gt.xyz under `directory`."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if silhouettes is None:
        silhouettes = scene.silhouettes()
    save_cameras(scene.cameras, directory / CAMERAS_FILE)
    for cam, s in zip(scene.cameras, silhouettes):
        write_pgm(s, directory / VIEW_PATTERN.format(cam.view_id))
    write_cloud(scene.gt_cloud, directory / GT_FILE, comment=f"ground truth, {len(scene.gt_cloud)} points")
    return directory


def load_scene(directory):
    """(cameras, silhouettes, gt cloud or None) from a scene directory."""
    directory = Path(directory)
    if not directory.is_dir():
        raise FileFormatError(directory, "scene directory does not exist")
    cameras = load_cameras(directory / CAMERAS_FILE)
    silhouettes = []
    for cam in cameras:
        s = load_silhouette(directory / VIEW_PATTERN.format(cam.view_id))
        if cam.width is not None and (s.width, s.height) != (cam.width, cam.height):
            raise FileFormatError(directory / VIEW_PATTERN.format(cam.view_id),
                                  f"image is {s.width}x{s.height}, camera expects {cam.width}x{cam.height}")
        silhouettes.append(s)
    gt_path = directory / GT_FILE
    gt = read_cloud(gt_path) if gt_path.exists() else None
    return cameras, silhouettes, gt
