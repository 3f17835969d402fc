"""
2D projection matching loss.

Per view, a two-sided Chamfer distance between the projections q_j of
the cloud and the supervision points g_k:

    d = 1/J sum_j mean_{a nearest g} |q_j - g|^2
      + 1/K sum_k mean_{b nearest q} |g_k - q|^2

summed over views, with gradients carried back to the 3D points through
the projection Jacobian. Values are in pixel^2.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from ..exceptions import EmptySet, KTooLarge
from .geometry import Camera, PointCloud3D, PointSet2D, project_jacobians, project_points
from .nn_index import Index2D

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LossConfig:
    nn_first: int = 1
    nn_second: int = 1
    use_first: bool = True
    use_second: bool = True

    def __post_init__(self):
        if not (self.use_first or self.use_second):
            raise ValueError("At least one Chamfer term must be enabled")
        if self.nn_first < 1 or self.nn_second < 1:
            raise ValueError("Neighbour counts must be positive")

    @property
    def label(self):
        if not self.use_second:
            return 'first-only'
        if not self.use_first:
            return 'second-only'
        return f"NN({self.nn_first},{self.nn_second})"


# Named settings of the loss ablation
LOSS_VARIANTS = {
    'first-only': LossConfig(use_second=False),
    'second-only': LossConfig(use_first=False),
    'both': LossConfig(),
}

NEIGHBOR_VARIANTS = {
    'NN(5,1)': LossConfig(nn_first=5, nn_second=1),
    'NN(1,5)': LossConfig(nn_first=1, nn_second=5),
    'NN(5,5)': LossConfig(nn_first=5, nn_second=5),
    'NN(1,1)': LossConfig(nn_first=1, nn_second=1),
}


@dataclass(frozen=True, eq=False)
class LossReport:
    """Multi-view loss, its per-view terms and dL/dp for every 3D point."""

    total: float
    per_view: List[float]
    grad: np.ndarray

    def grad_norm(self):
        """Mean Euclidean length of the per-point gradients."""
        return float(np.sqrt((self.grad ** 2).sum(axis=1)).mean())


def _as_array(points):
    return np.asarray(getattr(points, 'points', points), dtype=np.float64).reshape(-1, 2)


def chamfer_2d(proj, sup, cfg: LossConfig = LossConfig()) -> Tuple[float, np.ndarray]:
    """
    Chamfer value between projections and supervision, plus d value / d proj.

    Returns (value, gradient) with gradient shaped (J, 2). K and J are the
    actual set sizes.
    """
    q = _as_array(proj)
    g = _as_array(sup)
    n_proj, n_sup = len(q), len(g)
    if n_proj == 0 or n_sup == 0:
        raise EmptySet(f"Chamfer needs non-empty sets, got {n_proj} projections and {n_sup} supervision points")
    if cfg.use_first and cfg.nn_first > n_sup:
        raise KTooLarge(f"NN first term wants {cfg.nn_first} neighbours from {n_sup} supervision points")
    if cfg.use_second and cfg.nn_second > n_proj:
        raise KTooLarge(f"NN second term wants {cfg.nn_second} neighbours from {n_proj} projections")

    value = 0.0
    grad = np.zeros_like(q)

    if cfg.use_first:
        a = cfg.nn_first
        idx, d2 = Index2D(g).query(q, a)
        value += d2.mean(axis=1).sum() / n_proj
        diff = q[:, None, :] - g[idx]
        grad += (2.0 / (n_proj * a)) * diff.sum(axis=1)

    if cfg.use_second:
        b = cfg.nn_second
        idx, d2 = Index2D(q).query(g, b)
        value += d2.mean(axis=1).sum() / n_sup
        diff = q[idx] - g[:, None, :]
        contrib = (2.0 / (n_sup * b)) * diff
        np.add.at(grad, idx.ravel(), contrib.reshape(-1, 2))

    return float(value), grad


def _view_term(points, cam, sup, cfg):
    q = project_points(points, cam)
    value, dq = chamfer_2d(q, sup, cfg)
    jac = project_jacobians(points, cam)
    return value, np.einsum('jab,ja->jb', jac, dq)


def multi_view_loss(cloud: PointCloud3D, views: Sequence[Tuple[Camera, PointSet2D]],
                    cfg: LossConfig = LossConfig(), workers=1) -> LossReport:
    """
    Sum of per-view Chamfer terms with gradients w.r.t. the 3D points.

    With workers > 1 the views are evaluated in a thread pool; the
    reduction is always in view order.
    """
    points = cloud.points if isinstance(cloud, PointCloud3D) else np.asarray(cloud, dtype=np.float64)
    for cam, sup in views:
        if len(sup) == 0:
            raise EmptySet(f"View {cam.view_id} has no supervision points")

    if workers > 1 and len(views) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            terms = list(pool.map(lambda view: _view_term(points, view[0], view[1], cfg), views))
    else:
        terms = [_view_term(points, cam, sup, cfg) for cam, sup in views]

    per_view = [value for value, _ in terms]
    grad = np.zeros((len(points), 3))
    total = 0.0
    for value, view_grad in terms:
        total += value
        grad += view_grad
    return LossReport(total=total, per_view=per_view, grad=grad)
