"""
Direct recovery of a point cloud from multi-view silhouettes.

The cloud coordinates themselves are the parameters; Adam descends the
multi-view projection matching loss. Losses are in pixel^2 while points
live in world units, so the default learning rate assumes scenes where
the object fills about half of a 64x64 frame.
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..exceptions import DepthError
from .evaluation import chamfer_3d
from .geometry import Camera, PointCloud3D
from .matching_loss import LossConfig, multi_view_loss
from .sampling import SamplerConfig, SamplingMethod, SupervisionSampler
from .silhouette import Silhouette

logger = logging.getLogger(__name__)


class InitMode(str, enum.Enum):
    UNIT_SPHERE = 'sphere'
    UNIT_CUBE = 'cube'
    PROVIDED = 'provided'


@dataclass(frozen=True)
class OptimConfig:
    steps: int = 20000
    learning_rate: float = 1e-4
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    init: InitMode = InitMode.UNIT_SPHERE
    seed: int = 0
    resample_every: int = 0
    log_every: int = 100
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, 'init', InitMode(self.init))
        if self.steps < 1:
            raise ValueError(f"steps must be >= 1, got {self.steps}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")
        for name in ('adam_beta1', 'adam_beta2'):
            if not 0.0 < getattr(self, name) < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {getattr(self, name)}")
        if self.resample_every < 0:
            raise ValueError("resample_every must be non-negative")
        if self.log_every < 1:
            raise ValueError("log_every must be >= 1")


class Adam:
    """Adam on a single parameter array, updated in place."""

    def __init__(self, lr=1e-4, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon
        self.m = None
        self.v = None
        self.t = 0

    def step(self, params: np.ndarray, grads: np.ndarray) -> None:
        self.t += 1
        if self.m is None:
            self.m = np.zeros_like(params)
            self.v = np.zeros_like(params)

        bc1 = 1.0 - self.beta1 ** self.t
        bc2 = 1.0 - self.beta2 ** self.t

        self.m *= self.beta1
        self.m += (1.0 - self.beta1) * grads
        self.v *= self.beta2
        self.v += (1.0 - self.beta2) * (grads * grads)

        denom = np.sqrt(self.v / bc2) + self.epsilon
        params -= (self.lr / bc1) * self.m / denom


@dataclass
class OptimTrace:
    """Logged (step, total, per-view, grad norm, optional CD) records."""

    records: List[dict] = field(default_factory=list)

    def add(self, step, report, cd=None):
        if self.records and step <= self.records[-1]['step']:
            raise ValueError(f"Trace steps must increase, got {step} after {self.records[-1]['step']}")
        row = {'step': int(step), 'total': report.total}
        row.update({f'view_{i}': value for i, value in enumerate(report.per_view)})
        row['grad_norm'] = report.grad_norm()
        if cd is not None:
            row['cd'] = cd
        self.records.append(row)

    def __len__(self):
        return len(self.records)

    @property
    def steps(self):
        return [r['step'] for r in self.records]

    @property
    def totals(self):
        return [r['total'] for r in self.records]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame.from_records(self.records)

    def to_csv(self, path):
        self.to_frame().to_csv(path, index=False, float_format='%.12g')

    def smoothed(self, window=100):
        """Exponentially smoothed totals with span `window` steps."""
        frame = self.to_frame()
        if frame.empty:
            return frame
        spacing = max(int(frame['step'].diff().median()) if len(frame) > 1 else 1, 1)
        span = max(window / spacing, 1.0)
        return frame.set_index('step')['total'].ewm(span=span, adjust=True).mean()


def init_cloud(n_points, cfg: OptimConfig) -> PointCloud3D:
    """Uniform points in the unit ball or the [-0.5, 0.5]^3 cube, deterministic in cfg.seed."""
    if n_points < 1:
        raise ValueError(f"Need at least one point, got {n_points}")
    rng = np.random.default_rng(cfg.seed)
    if cfg.init == InitMode.UNIT_CUBE:
        return PointCloud3D(rng.uniform(-0.5, 0.5, size=(n_points, 3)))
    if cfg.init == InitMode.PROVIDED:
        raise ValueError("init=provided needs an initial cloud")
    direction = rng.normal(size=(n_points, 3))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = np.cbrt(rng.uniform(size=(n_points, 1)))
    return PointCloud3D(direction * radius)


def optimize(initial: PointCloud3D, cameras: Sequence[Camera], supervision, loss_cfg: LossConfig,
             optim_cfg: OptimConfig, reference: Optional[PointCloud3D] = None,
             resample=None) -> Tuple[PointCloud3D, OptimTrace]:
    """
    Adam on the raw coordinates of `initial` against fixed per-view supervision.

    `resample(epoch)`, when given, is called every `resample_every` steps to
    replace the supervision.
    """
    params = np.array(initial.points, dtype=np.float64)
    adam = Adam(optim_cfg.learning_rate, optim_cfg.adam_beta1, optim_cfg.adam_beta2, optim_cfg.adam_eps)
    trace = OptimTrace()
    views = list(zip(cameras, supervision))

    def record(step, report):
        cd = chamfer_3d(params, reference) if reference is not None else None
        trace.add(step, report, cd)
        logger.info("step %d loss %.6g%s", step, report.total, f" cd {cd:.6g}" if cd is not None else "")

    for step in range(optim_cfg.steps + 1):
        if resample is not None and optim_cfg.resample_every and step and step % optim_cfg.resample_every == 0:
            views = list(zip(cameras, resample(step // optim_cfg.resample_every)))
        try:
            report = multi_view_loss(params, views, loss_cfg, workers=optim_cfg.workers)
        except DepthError as exc:
            raise exc.at_step(step) from exc
        if step % optim_cfg.log_every == 0 or step == optim_cfg.steps:
            record(step, report)
        if step == optim_cfg.steps:
            break
        adam.step(params, report.grad)
        logger.debug("step %d grad norm %.4g", step, report.grad_norm())

    return PointCloud3D(params), trace


def run(scene: Sequence[Tuple[Camera, Silhouette]], n_points, sampler_cfg: SamplerConfig,
        loss_cfg: LossConfig, optim_cfg: OptimConfig, initial: Optional[PointCloud3D] = None,
        reference: Optional[PointCloud3D] = None) -> Tuple[PointCloud3D, OptimTrace]:
    """Sample supervision for every view, initialise a cloud and optimise it."""
    cameras = [cam for cam, _ in scene]
    silhouettes = [s for _, s in scene]
    sampler = SupervisionSampler(sampler_cfg)
    supervision = sampler.sample_views(silhouettes)
    logger.info("Supervision sizes per view: %s", [len(sup) for sup in supervision])

    if optim_cfg.init == InitMode.PROVIDED:
        if initial is None:
            raise ValueError("init=provided needs an initial cloud")
    else:
        initial = init_cloud(n_points, optim_cfg)

    resample = None
    if sampler_cfg.method == SamplingMethod.DYNAMIC and optim_cfg.resample_every:
        def resample(epoch):
            return sampler.sample_views(silhouettes, epoch)

    return optimize(initial, cameras, supervision, loss_cfg, optim_cfg, reference=reference,
                    resample=resample)
