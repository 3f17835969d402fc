from .geometry import Camera, PointCloud3D, PointSet2D, project, project_jacobian
from .silhouette import Silhouette, area, interp
from .sampling import SamplerConfig, SamplingMethod, SupervisionSampler
from .nn_index import Index2D
from .matching_loss import LossConfig, LossReport, chamfer_2d, multi_view_loss
from .optimize import OptimConfig, OptimTrace, init_cloud, run
from .synth import SceneSpec, make_scene, ring_cameras, splat_silhouette
from .evaluation import VoxelGrid, chamfer_3d, iou, voxelize

__all__ = [
    'Camera', 'PointCloud3D', 'PointSet2D', 'project', 'project_jacobian',
    'Silhouette', 'area', 'interp',
    'SamplerConfig', 'SamplingMethod', 'SupervisionSampler',
    'Index2D',
    'LossConfig', 'LossReport', 'chamfer_2d', 'multi_view_loss',
    'OptimConfig', 'OptimTrace', 'init_cloud', 'run',
    'SceneSpec', 'make_scene', 'ring_cameras', 'splat_silhouette',
    'VoxelGrid', 'chamfer_3d', 'iou', 'voxelize',
]
