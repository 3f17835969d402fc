"""
Irregular point supervision sampled from silhouettes.

Structure adaptive sampling (SAS) scans a lattice whose stride makes
every emitted point cover an equal share of the silhouette area. The
other samplers reproduce the alternatives SAS is compared against.
"""
import enum
import logging
import math
from dataclasses import dataclass, replace

import numpy as np

from ..exceptions import EmptySilhouette, NonTermination
from .geometry import PointSet2D
from .silhouette import Silhouette, area, interp

logger = logging.getLogger(__name__)

# Rejection sampling gives up after this many draws per requested point
REJECTION_BUDGET = 10000
POISSON_ATTEMPTS = 30


class SamplingMethod(str, enum.Enum):
    SAS = 'sas'
    RANDOM = 'random'
    PIXEL = 'pixel'
    PIXEL_PLUS_RANDOM = 'pixel+random'
    POISSON_DISK = 'poisson'
    DYNAMIC = 'dynamic'


@dataclass(frozen=True)
class SamplerConfig:
    method: SamplingMethod = SamplingMethod.SAS
    k_target: int = 5000
    threshold: float = 0.5
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, 'method', SamplingMethod(self.method))
        if self.k_target < 1:
            raise ValueError(f"k_target must be >= 1, got {self.k_target}")
        if not 0.0 < self.threshold < 1.0:
            raise ValueError(f"threshold must lie in (0, 1), got {self.threshold}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


def _require_area(s: Silhouette):
    a = area(s)
    if a <= 0:
        raise EmptySilhouette(f"Silhouette {s.width}x{s.height} has no occupied pixel")
    return a


def sas_stride(s: Silhouette, k_target: int) -> float:
    """Lattice step sqrt(A / K)."""
    return math.sqrt(_require_area(s) / k_target)


def sample_sas(s: Silhouette, cfg: SamplerConfig) -> PointSet2D:
    """Lattice from (0, 0) with stride sqrt(A/K); keeps nodes whose lookup exceeds the threshold."""
    stride = sas_stride(s, cfg.k_target)
    xs = np.arange(int(math.ceil(s.width / stride)) + 1) * stride
    ys = np.arange(int(math.ceil(s.height / stride)) + 1) * stride
    xs = xs[xs < s.width]
    ys = ys[ys < s.height]
    grid_x, grid_y = np.meshgrid(xs, ys)
    grid_x = grid_x.ravel()
    grid_y = grid_y.ravel()
    keep = interp(s, grid_x, grid_y) > cfg.threshold
    points = np.stack([grid_x[keep], grid_y[keep]], axis=1)

    if not 0.7 * cfg.k_target <= len(points) <= 1.3 * cfg.k_target:
        logger.warning("SAS produced %d points for K=%d (stride %.4f)", len(points), cfg.k_target, stride)
    return PointSet2D(points)


def _rejection(s: Silhouette, count, threshold, rng):
    """Uniform draws over [0, W] x [0, H] kept where the lookup exceeds the threshold."""
    kept = []
    collected = 0
    draws = 0
    budget = REJECTION_BUDGET * max(count, 1)
    while collected < count:
        if draws >= budget:
            raise NonTermination(
                f"Rejection sampling kept {collected}/{count} points after {draws} draws"
            )
        batch = min(max(2 * (count - collected), 256), budget - draws)
        x = rng.uniform(0.0, s.width, batch)
        y = rng.uniform(0.0, s.height, batch)
        draws += batch
        inside = interp(s, x, y) > threshold
        chunk = np.stack([x[inside], y[inside]], axis=1)
        kept.append(chunk)
        collected += len(chunk)
    return np.concatenate(kept)[:count]


def sample_random(s: Silhouette, cfg: SamplerConfig) -> PointSet2D:
    """Exactly K rejection-sampled points, deterministic in cfg.seed."""
    _require_area(s)
    rng = np.random.default_rng(cfg.seed)
    return PointSet2D(_rejection(s, cfg.k_target, cfg.threshold, rng))


def _pixel_centers(s: Silhouette, threshold):
    rows, cols = np.nonzero(s.values > threshold)
    if len(rows) == 0:
        raise EmptySilhouette(f"Silhouette {s.width}x{s.height} has no pixel above {threshold}")
    return np.stack([cols + 0.5, rows + 0.5], axis=1)


def sample_pixel(s: Silhouette, cfg: SamplerConfig) -> PointSet2D:
    """
    Every pixel center above the threshold, row-major. A shortfall below K
    is made up by cycling through the centers again; a surplus is kept.
    """
    centers = _pixel_centers(s, cfg.threshold)
    if len(centers) < cfg.k_target:
        centers = centers[np.arange(cfg.k_target) % len(centers)]
    return PointSet2D(centers)


def sample_pixel_plus_random(s: Silhouette, cfg: SamplerConfig) -> PointSet2D:
    """Pixel centers, with any shortfall below K filled by rejection samples."""
    centers = _pixel_centers(s, cfg.threshold)
    deficit = cfg.k_target - len(centers)
    if deficit > 0:
        rng = np.random.default_rng(cfg.seed)
        centers = np.concatenate([centers, _rejection(s, deficit, cfg.threshold, rng)])
    return PointSet2D(centers)


def poisson_radius(s: Silhouette, k_target: int) -> float:
    return math.sqrt(_require_area(s) / k_target) / math.sqrt(2.0)


class _PoissonGrid:
    """Background grid for dart throwing; at most one sample per cell."""

    def __init__(self, width, height, radius):
        self.radius2 = radius * radius
        self.cell = radius / math.sqrt(2.0)
        self.nx = int(math.ceil(width / self.cell)) + 1
        self.ny = int(math.ceil(height / self.cell)) + 1
        self.slots = -np.ones((self.ny, self.nx), dtype=np.intp)
        self.points = []

    def _cell(self, p):
        return int(p[0] // self.cell), int(p[1] // self.cell)

    def fits(self, p):
        cx, cy = self._cell(p)
        block = self.slots[max(cy - 2, 0):cy + 3, max(cx - 2, 0):cx + 3]
        for j in block[block >= 0]:
            q = self.points[j]
            dx, dy = p[0] - q[0], p[1] - q[1]
            if dx * dx + dy * dy < self.radius2:
                return False
        return True

    def add(self, p):
        cx, cy = self._cell(p)
        self.slots[cy, cx] = len(self.points)
        self.points.append((float(p[0]), float(p[1])))
        return len(self.points) - 1


def sample_poisson(s: Silhouette, cfg: SamplerConfig) -> PointSet2D:
    """
    Bridson dart throwing restricted to the silhouette, disk radius
    sqrt(A/K)/sqrt(2). The count is whatever the process yields.
    Disconnected parts are reached by re-seeding until random draws stop
    finding free space.
    """
    radius = poisson_radius(s, cfg.k_target)
    rng = np.random.default_rng(cfg.seed)
    grid = _PoissonGrid(s.width, s.height, radius)

    misses = 0
    while misses < POISSON_ATTEMPTS:
        seed = _rejection(s, 1, cfg.threshold, rng)[0]
        if not grid.fits(seed):
            misses += 1
            continue
        misses = 0
        active = [grid.add(seed)]
        while active:
            slot = int(rng.integers(len(active)))
            origin = grid.points[active[slot]]
            angle = rng.uniform(0.0, 2.0 * math.pi, POISSON_ATTEMPTS)
            dist = radius * np.sqrt(rng.uniform(1.0, 4.0, POISSON_ATTEMPTS))
            cand_x = origin[0] + dist * np.cos(angle)
            cand_y = origin[1] + dist * np.sin(angle)
            ok = (cand_x >= 0.0) & (cand_x < s.width) & (cand_y >= 0.0) & (cand_y < s.height)
            ok &= interp(s, cand_x, cand_y) > cfg.threshold
            for x, y in zip(cand_x[ok], cand_y[ok]):
                if grid.fits((x, y)):
                    active.append(grid.add((x, y)))
                    break
            else:
                active[slot] = active[-1]
                active.pop()

    points = np.array(grid.points, dtype=np.float64).reshape(-1, 2)
    logger.debug("Poisson-disk sampling kept %d points (radius %.4f, K=%d)", len(points), radius, cfg.k_target)
    return PointSet2D(points)


def epoch_seed(seed: int, epoch: int) -> int:
    """Stable mix of (seed, epoch) through numpy's SeedSequence."""
    return int(np.random.SeedSequence([seed, epoch]).generate_state(1)[0])


def resample_dynamic(s: Silhouette, cfg: SamplerConfig, epoch: int) -> PointSet2D:
    return sample_random(s, replace(cfg, seed=epoch_seed(cfg.seed, epoch)))


class SupervisionSampler:
    """Route a silhouette to the configured sampler"""

    def __init__(self, config: SamplerConfig):
        self.config = config
        self.sampler_methods = {
            SamplingMethod.SAS: sample_sas,
            SamplingMethod.RANDOM: sample_random,
            SamplingMethod.PIXEL: sample_pixel,
            SamplingMethod.PIXEL_PLUS_RANDOM: sample_pixel_plus_random,
            SamplingMethod.POISSON_DISK: sample_poisson,
        }

    @property
    def is_dynamic(self):
        return self.config.method == SamplingMethod.DYNAMIC

    def sample(self, s: Silhouette, epoch=0) -> PointSet2D:
        if self.is_dynamic:
            return resample_dynamic(s, self.config, epoch)
        return self.sampler_methods[self.config.method](s, self.config)

    def sample_views(self, silhouettes, epoch=0):
        """Supervision for every view; view i draws with seed offset i so views stay independent."""
        supervision = []
        for i, s in enumerate(silhouettes):
            view_sampler = SupervisionSampler(replace(self.config, seed=self.config.seed + i))
            supervision.append(view_sampler.sample(s, epoch))
        return supervision
