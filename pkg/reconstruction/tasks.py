import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path

import numpy as np
import pandas as pd

from .exceptions import InvalidSetting
from .utils.evaluation import DEFAULT_RESOLUTION, chamfer_3d, evaluate
from .utils.geometry import read_cloud, write_cloud, write_points_2d
from .utils.manifest import RunManifest
from .utils.matching_loss import LOSS_VARIANTS, NEIGHBOR_VARIANTS, LossConfig
from .utils.optimize import OptimConfig, run
from .utils.sampling import SamplerConfig, SamplingMethod, SupervisionSampler
from .utils.silhouette import load_silhouette
from .utils.synth import (DEFAULT_SPLAT_RADIUS, REFERENCE_RESOLUTION, SceneSpec, load_scene,
                          make_scene, save_scene)

logger = logging.getLogger(__name__)

RECON_FILE = 'recon.xyz'
TRACE_FILE = 'trace.csv'
MANIFEST_FILE = 'manifest.json'

SWEEP_AXES = ('loss-variant', 'neighbors', 'k', 'sampler', 'resolution')
DEFAULT_K_VALUES = (1000, 3000, 5000, 7000, 9000)
DEFAULT_RESOLUTIONS = (32, 64, 128)


def synthesize_scene(shape, out, n_views, image_size, n_points, seed=0, splat_radius=None,
                     camera_radius=2.0, elevation=0.0, azimuth=0.0, path=None):
    """Build a scene and write it under `out`"""
    scene = make_scene(shape, points=n_points, seed=seed, path=path, n_views=n_views,
                       image_size=image_size, camera_radius=camera_radius,
                       splat_radius=splat_radius, elevation=elevation, azimuth=azimuth)
    directory = save_scene(scene, out)
    logger.info("Wrote scene with %d views to %s", len(scene.cameras), directory)
    return directory


def sample_supervision(image, sampler_cfg: SamplerConfig, out, epoch=0):
    """Sample one silhouette image and write the points as "x y" lines"""
    silhouette = load_silhouette(image)
    points = SupervisionSampler(sampler_cfg).sample(silhouette, epoch)
    write_points_2d(points, out, comment=f"{sampler_cfg.method.value} K={sampler_cfg.k_target}")
    return points


def reconstruct_scene(manifest: RunManifest, out):
    """Run one reconstruction described by `manifest`; writes recon.xyz, trace.csv and manifest.json"""
    cameras, silhouettes, gt = load_scene(manifest.scene)
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)

    cloud, trace = run(list(zip(cameras, silhouettes)), manifest.n_points, manifest.sampler,
                       manifest.loss, manifest.optim, reference=gt)

    outputs = {
        'recon': str(out / RECON_FILE),
        'trace': str(out / TRACE_FILE),
        'manifest': str(out / MANIFEST_FILE),
    }
    write_cloud(cloud, outputs['recon'], comment=f"reconstruction, {len(cloud)} points")
    trace.to_csv(outputs['trace'])
    record = RunManifest(manifest.scene, manifest.n_points, manifest.sampler, manifest.loss,
                         manifest.optim, outputs)
    record.save(outputs['manifest'])

    result = {
        'initial_loss': trace.totals[0],
        'final_loss': trace.totals[-1],
        'cd': chamfer_3d(cloud, gt) if gt is not None else None,
        **outputs,
    }
    return result


def evaluate_clouds(recon_path, reference_path, resolution=DEFAULT_RESOLUTION, normalize=False):
    return evaluate(read_cloud(recon_path), read_cloud(reference_path), resolution=resolution,
                    normalize=normalize)


def sweep_settings(axis, values=None, base_sampler: SamplerConfig = None, base_loss: LossConfig = None,
                   base_optim: OptimConfig = None):
    """(label, sampler, loss, optim, resolution) tuples for one ablation axis"""
    if axis not in SWEEP_AXES:
        raise InvalidSetting(f"Unknown sweep axis '{axis}', expected one of {', '.join(SWEEP_AXES)}")
    try:
        return _axis_settings(axis, values, base_sampler or SamplerConfig(), base_loss or LossConfig(),
                              base_optim or OptimConfig())
    except ValueError as exc:
        raise InvalidSetting(f"Cannot sweep {axis} over {values}: {exc}") from exc


def _axis_settings(axis, values, base_sampler, base_loss, base_optim):
    if axis in ('loss-variant', 'neighbors'):
        variants = LOSS_VARIANTS if axis == 'loss-variant' else NEIGHBOR_VARIANTS
        names = values or list(variants)
        unknown = [name for name in names if name not in variants]
        if unknown:
            raise InvalidSetting(f"Unknown {axis} setting(s) {unknown}, expected {list(variants)}")
        return [(name, base_sampler, variants[name], base_optim, None) for name in names]
    if axis == 'k':
        ks = [int(v) for v in (values or DEFAULT_K_VALUES)]
        return [(f"K={k}", replace(base_sampler, k_target=k), base_loss, base_optim, None) for k in ks]
    if axis == 'sampler':
        methods = [SamplingMethod(v) for v in (values or [m.value for m in SamplingMethod])]
        settings = []
        for method in methods:
            optim = base_optim
            if method == SamplingMethod.DYNAMIC and not optim.resample_every:
                optim = replace(optim, resample_every=optim.log_every)
            settings.append((method.value, replace(base_sampler, method=method), base_loss, optim, None))
        return settings
    resolutions = [int(v) for v in (values or DEFAULT_RESOLUTIONS)]
    if min(resolutions) < 1:
        raise InvalidSetting(f"Resolutions must be positive, got {resolutions}")
    return [(f"{r}x{r}", base_sampler, base_loss, base_optim, r) for r in resolutions]


def run_setting(scene_dir, n_points, label, sampler_cfg, loss_cfg, optim_cfg, resolution=None):
    """Reconstruct once for a sweep row; returns (label, final loss, CD to GT)"""
    cameras, silhouettes, gt = load_scene(scene_dir)
    if resolution is not None:
        if gt is None:
            raise InvalidSetting("The resolution sweep needs the scene's gt.xyz")
        base = SceneSpec(gt, cameras, DEFAULT_SPLAT_RADIUS * cameras[0].width / REFERENCE_RESOLUTION)
        scene = base.at_resolution(resolution)
        cameras, silhouettes = scene.cameras, scene.silhouettes()

    cloud, trace = run(list(zip(cameras, silhouettes)), n_points, sampler_cfg, loss_cfg, optim_cfg)
    cd = chamfer_3d(cloud, gt) if gt is not None else np.nan
    logger.info("Sweep setting %s: final loss %.6g, cd %.6g", label, trace.totals[-1], cd)
    return {'setting': label, 'final_loss': trace.totals[-1], 'cd_vs_gt': cd}


def _run_setting_args(args):
    return run_setting(*args)


def run_sweep(scene_dir, axis, n_points, values=None, base_sampler=None, base_loss=None,
              base_optim=None, parallel=1):
    """One row per setting of the ablation axis; settings share nothing"""
    settings = sweep_settings(axis, values, base_sampler, base_loss, base_optim)
    jobs = [(str(scene_dir), n_points, label, sampler, loss, optim, resolution)
            for label, sampler, loss, optim, resolution in settings]

    if parallel > 1:
        with ProcessPoolExecutor(max_workers=parallel) as pool:
            rows = list(pool.map(_run_setting_args, jobs))
    else:
        rows = [run_setting(*job) for job in jobs]

    frame = pd.DataFrame(rows, columns=['setting', 'final_loss', 'cd_vs_gt'])
    if axis == 'resolution':
        finest = frame['cd_vs_gt'].iloc[int(np.argmax([job[-1] for job in jobs]))]
        frame['degeneration'] = frame['cd_vs_gt'] - finest
    return frame
