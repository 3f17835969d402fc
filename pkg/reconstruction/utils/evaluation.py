"""3D scores reported for reconstructions: Chamfer distance and voxel IoU, both x100."""
import logging
from dataclasses import dataclass

import numpy as np

from ..exceptions import EmptySet, ShapeMismatch

logger = logging.getLogger(__name__)

REPORT_SCALE = 100.0
DEFAULT_RESOLUTION = 32
BOUNDS_PADDING = 0.02


def _points(cloud):
    return np.asarray(getattr(cloud, 'points', cloud), dtype=np.float64).reshape(-1, 3)


def _nearest_squared(src, dst, chunk=256):
    """Squared distance from each row of src to its nearest row of dst."""
    out = np.empty(len(src))
    for start in range(0, len(src), chunk):
        diff = src[start:start + chunk, None, :] - dst[None, :, :]
        out[start:start + chunk] = (diff * diff).sum(axis=2).min(axis=1)
    return out


def chamfer_3d(a, b) -> float:
    """Symmetric mean-of-min squared distance, times 100."""
    pa, pb = _points(a), _points(b)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptySet("Chamfer distance needs two non-empty clouds")
    value = _nearest_squared(pa, pb).mean() + _nearest_squared(pb, pa).mean()
    return float(REPORT_SCALE * value)


def normalize_diagonal(cloud, reference):
    """Scale `cloud` by the factor that gives `reference` a unit bounding-box diagonal."""
    ref = _points(reference)
    diagonal = float(np.linalg.norm(ref.max(axis=0) - ref.min(axis=0)))
    if diagonal == 0.0:
        return _points(cloud)
    return _points(cloud) / diagonal


@dataclass(frozen=True, eq=False)
class VoxelGrid:
    resolution: int
    occupancy: np.ndarray
    bounds: tuple

    def __post_init__(self):
        occ = np.asarray(self.occupancy, dtype=bool)
        if occ.size != self.resolution ** 3:
            raise ValueError(f"Occupancy must hold {self.resolution ** 3} voxels, got {occ.size}")
        occ = occ.reshape((self.resolution,) * 3)
        occ.setflags(write=False)
        object.__setattr__(self, 'occupancy', occ)
        lo, hi = (np.asarray(v, dtype=np.float64) for v in self.bounds)
        object.__setattr__(self, 'bounds', (tuple(lo.tolist()), tuple(hi.tolist())))

    def count(self):
        return int(self.occupancy.sum())


def default_bounds(*clouds, padding=BOUNDS_PADDING):
    """Union bounding box of the clouds, padded by 2% of its extent on every side."""
    stacked = np.concatenate([_points(c) for c in clouds])
    if len(stacked) == 0:
        raise EmptySet("Cannot derive voxel bounds from empty clouds")
    lo, hi = stacked.min(axis=0), stacked.max(axis=0)
    pad = padding * (hi - lo)
    pad = np.where(pad > 0.0, pad, max(padding * float((hi - lo).max()), 1e-6))
    return lo - pad, hi + pad


def voxelize(cloud, bounds, resolution=DEFAULT_RESOLUTION) -> VoxelGrid:
    """Occupied iff a point falls inside the cell; the upper boundary belongs to the last cell."""
    pts = _points(cloud)
    lo, hi = (np.asarray(v, dtype=np.float64) for v in bounds)
    if np.any(hi <= lo):
        raise ValueError(f"Voxel bounds must have positive extent on every axis, got {lo} to {hi}")
    occupancy = np.zeros((resolution,) * 3, dtype=bool)
    if len(pts):
        inside = np.all((pts >= lo) & (pts <= hi), axis=1)
        if not inside.all():
            logger.debug("Ignoring %d points outside the voxel bounds", int((~inside).sum()))
        cells = np.floor((pts[inside] - lo) / (hi - lo) * resolution).astype(np.intp)
        cells = np.clip(cells, 0, resolution - 1)
        occupancy[cells[:, 0], cells[:, 1], cells[:, 2]] = True
    return VoxelGrid(resolution, occupancy, (lo, hi))


def iou(g1: VoxelGrid, g2: VoxelGrid) -> float:
    """|intersection| / |union| times 100; two empty grids score 100."""
    if g1.resolution != g2.resolution or not np.allclose(g1.bounds, g2.bounds):
        raise ShapeMismatch(
            f"Cannot compare grids at {g1.resolution}^3 {g1.bounds} and {g2.resolution}^3 {g2.bounds}"
        )
    union = np.count_nonzero(g1.occupancy | g2.occupancy)
    if union == 0:
        return REPORT_SCALE
    return float(REPORT_SCALE * np.count_nonzero(g1.occupancy & g2.occupancy) / union)


def evaluate(recon, reference, resolution=DEFAULT_RESOLUTION, normalize=False):
    """Chamfer and IoU of a reconstruction against a reference cloud."""
    if normalize:
        recon, reference = normalize_diagonal(recon, recon), normalize_diagonal(reference, recon)
    bounds = default_bounds(recon, reference)
    return {
        'cd': chamfer_3d(recon, reference),
        'iou': iou(voxelize(recon, bounds, resolution), voxelize(reference, bounds, resolution)),
    }
