import numpy as np
from django.test import SimpleTestCase

from reconstruction.exceptions import DepthError
from reconstruction.utils.geometry import PointCloud3D, project
from reconstruction.utils.matching_loss import LossConfig, LossReport
from reconstruction.utils.optimize import Adam, OptimConfig, OptimTrace, init_cloud, optimize, run
from reconstruction.utils.sampling import SamplerConfig
from reconstruction.utils.synth import make_scene, ring_cameras

from .factories import random_ball


def small_scene():
    scene = make_scene('square', points=512, n_views=3, image_size=32)
    return list(zip(scene.cameras, scene.silhouettes())), scene.gt_cloud


class AdamTests(SimpleTestCase):

    def test_first_step_moves_by_learning_rate(self):
        params = np.array([1.0, -2.0])
        Adam(lr=0.1).step(params, np.array([4.0, -0.5]))
        np.testing.assert_allclose(params, [0.9, -1.9], atol=1e-6)

    def test_minimizes_quadratic(self):
        params = np.array([3.0, -1.0])
        adam = Adam(lr=0.05)
        for _ in range(2000):
            adam.step(params, 2.0 * params)
        self.assertLess(np.abs(params).max(), 0.05)

    def test_zero_gradient_leaves_params(self):
        params = np.array([0.3, 0.4])
        Adam(lr=1.0).step(params, np.zeros(2))
        np.testing.assert_array_equal(params, [0.3, 0.4])


class InitCloudTests(SimpleTestCase):

    def test_sphere(self):
        cloud = init_cloud(500, OptimConfig())
        self.assertEqual(len(cloud), 500)
        self.assertLessEqual(np.sqrt((cloud.points ** 2).sum(axis=1)).max(), 1.0 + 1e-12)

    def test_sphere_is_centered(self):
        cloud = init_cloud(10000, OptimConfig())
        self.assertLess(np.linalg.norm(cloud.points.mean(axis=0)), 0.02)

    def test_cube(self):
        cloud = init_cloud(500, OptimConfig(init='cube'))
        self.assertLessEqual(np.abs(cloud.points).max(), 0.5)

    def test_seeded(self):
        np.testing.assert_array_equal(init_cloud(50, OptimConfig(seed=4)).points,
                                      init_cloud(50, OptimConfig(seed=4)).points)
        self.assertFalse(np.array_equal(init_cloud(50, OptimConfig(seed=4)).points,
                                        init_cloud(50, OptimConfig(seed=5)).points))

    def test_provided_needs_cloud(self):
        with self.assertRaises(ValueError):
            init_cloud(10, OptimConfig(init='provided'))


class OptimConfigTests(SimpleTestCase):

    def test_invalid_values(self):
        for kwargs in ({'steps': 0}, {'learning_rate': 0.0}, {'adam_beta1': 1.0}, {'log_every': 0},
                       {'init': 'torus'}):
            with self.assertRaises(ValueError):
                OptimConfig(**kwargs)


class OptimTraceTests(SimpleTestCase):

    def report(self, total):
        return LossReport(total=total, per_view=[total / 2, total / 2], grad=np.ones((3, 3)))

    def test_rows(self):
        trace = OptimTrace()
        trace.add(0, self.report(4.0), cd=1.5)
        trace.add(10, self.report(2.0), cd=1.0)
        frame = trace.to_frame()
        self.assertEqual(list(frame.columns), ['step', 'total', 'view_0', 'view_1', 'grad_norm', 'cd'])
        self.assertEqual(trace.steps, [0, 10])
        self.assertAlmostEqual(frame['grad_norm'].iloc[0], np.sqrt(3.0))

    def test_steps_must_increase(self):
        trace = OptimTrace()
        trace.add(5, self.report(1.0))
        with self.assertRaises(ValueError):
            trace.add(5, self.report(1.0))

    def test_smoothed_keeps_every_step(self):
        trace = OptimTrace()
        for step in range(0, 500, 10):
            trace.add(step, self.report(100.0 - step / 10))
        smoothed = trace.smoothed(100)
        self.assertEqual(len(smoothed), 50)
        self.assertEqual(smoothed.iloc[0], 100.0)


class OptimizeTests(SimpleTestCase):

    def test_own_projections_are_a_fixed_point(self):
        rng = np.random.default_rng(0)
        cloud = PointCloud3D(random_ball(rng, 50, radius=0.5))
        cameras = ring_cameras(3)
        supervision = [project(cloud, cam) for cam in cameras]
        result, trace = optimize(cloud, cameras, supervision, LossConfig(),
                                 OptimConfig(steps=100, learning_rate=1e-2, log_every=10))
        self.assertLess(trace.totals[0], 1e-9)
        self.assertLess(np.abs(result.points - cloud.points).max(), 1e-6)

    def test_trace_steps(self):
        scene, _ = small_scene()
        _, trace = run(scene, 32, SamplerConfig(k_target=100), LossConfig(),
                       OptimConfig(steps=25, log_every=10))
        self.assertEqual(trace.steps, [0, 10, 20, 25])

    def test_loss_decreases(self):
        scene, gt = small_scene()
        _, trace = run(scene, 128, SamplerConfig(k_target=300), LossConfig(),
                       OptimConfig(steps=200, learning_rate=1e-2, log_every=50), reference=gt)
        self.assertLess(trace.totals[-1], trace.totals[0])
        self.assertIn('cd', trace.to_frame().columns)

    def test_smoothed_loss_descends(self):
        scene, _ = small_scene()
        _, trace = run(scene, 128, SamplerConfig(k_target=300), LossConfig(),
                       OptimConfig(steps=400, learning_rate=1e-2, log_every=10))
        smoothed = trace.smoothed(100)
        self.assertLess(smoothed.loc[400], smoothed.loc[100])

    def test_reproducible(self):
        scene, _ = small_scene()
        args = (scene, 64, SamplerConfig(method='random', k_target=200, seed=3), LossConfig(),
                OptimConfig(steps=30, learning_rate=1e-3, log_every=10, seed=3))
        first, first_trace = run(*args)
        second, second_trace = run(*args)
        np.testing.assert_array_equal(first.points, second.points)
        self.assertEqual(first_trace.records, second_trace.records)

    def test_dynamic_resampling_runs(self):
        scene, _ = small_scene()
        cloud, trace = run(scene, 64, SamplerConfig(method='dynamic', k_target=150), LossConfig(),
                           OptimConfig(steps=20, learning_rate=1e-3, resample_every=5, log_every=5))
        self.assertEqual(len(cloud), 64)
        self.assertEqual(trace.steps, [0, 5, 10, 15, 20])

    def test_depth_error_carries_step(self):
        cameras = ring_cameras(4, radius=0.3)
        supervision = [project(PointCloud3D([[0.0, 0.0, 0.0]]), cam) for cam in cameras]
        initial = init_cloud(200, OptimConfig(init='cube'))
        with self.assertRaises(DepthError) as ctx:
            optimize(initial, cameras, supervision, LossConfig(), OptimConfig(steps=10))
        self.assertEqual(ctx.exception.step, 0)
        self.assertTrue(str(ctx.exception).startswith('Step 0'))

    def test_provided_initial_cloud(self):
        scene, gt = small_scene()
        cloud, _ = run(scene, 0, SamplerConfig(k_target=100), LossConfig(),
                       OptimConfig(steps=1, init='provided'), initial=gt)
        self.assertEqual(len(cloud), len(gt))
