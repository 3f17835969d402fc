import numpy as np

from reconstruction.utils.geometry import Camera
from reconstruction.utils.silhouette import Silhouette

CANONICAL = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0]])


def random_camera(rng, view_id=0, image_size=64):
    """Look-at camera 3-5 units from the origin with a random focal length."""
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    center = direction * rng.uniform(3.0, 5.0)
    up = np.array([0.0, 1.0, 0.0]) if abs(direction[1]) < 0.9 else np.array([1.0, 0.0, 0.0])
    return Camera.look_at(center, np.zeros(3), up, rng.uniform(40.0, 120.0), image_size, image_size,
                          view_id=view_id)


def random_ball(rng, n, radius=1.0):
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    return direction * radius * np.cbrt(rng.uniform(size=(n, 1)))


def blob_silhouette(rng, size=64):
    """Binary union of one to three discs of radius 10-16 pixels."""
    ys, xs = np.mgrid[0:size, 0:size] + 0.5
    mask = np.zeros((size, size), dtype=bool)
    for _ in range(rng.integers(1, 4)):
        radius = rng.uniform(10.0, 16.0)
        cx, cy = rng.uniform(radius, size - radius, 2)
        mask |= (xs - cx) ** 2 + (ys - cy) ** 2 <= radius ** 2
    return Silhouette(mask.astype(float))


def rectangle_silhouette(width, height, x0, x1, y0, y1):
    grid = np.zeros((height, width))
    grid[y0:y1, x0:x1] = 1.0
    return Silhouette(grid)
