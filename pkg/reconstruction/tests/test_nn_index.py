import time

import numpy as np
from django.test import SimpleTestCase

from reconstruction.exceptions import EmptySet, KTooLarge
from reconstruction.utils.nn_index import Index2D, brute_force_knn, build, knn, occupied_distance


class KnnExampleTests(SimpleTestCase):

    def test_nearest_of_three(self):
        index = build([[0, 0], [1, 0], [5, 5]])
        result = knn(index, [0.9, 0.1], 1)
        self.assertEqual(result[0][0], 1)
        self.assertAlmostEqual(result[0][1], 0.02)

    def test_two_nearest_sorted(self):
        index = build([[0, 0], [1, 0], [5, 5]])
        result = knn(index, [0, 0], 2)
        self.assertEqual([i for i, _ in result], [0, 1])
        self.assertEqual([d for _, d in result], [0.0, 1.0])

    def test_single_point(self):
        index = build([[3.0, 4.0]])
        self.assertEqual(knn(index, [0.0, 0.0], 1), [(0, 25.0)])

    def test_identical_points_tie_on_index(self):
        index = build([[1.0, 1.0]] * 4)
        self.assertEqual([i for i, _ in knn(index, [1.0, 1.0], 3)], [0, 1, 2])

    def test_equidistant_points_tie_on_index(self):
        index = build([[1, 0], [-1, 0], [0, 1], [0, -1]])
        self.assertEqual([i for i, _ in knn(index, [0, 0], 4)], [0, 1, 2, 3])

    def test_query_far_outside_bounds(self):
        index = build([[0, 0], [1, 1], [2, 2]])
        result = knn(index, [1000.0, 1000.0], 1)
        self.assertEqual(result[0][0], 2)

    def test_k_too_large(self):
        with self.assertRaises(KTooLarge):
            knn(build([[0, 0], [1, 1]]), [0, 0], 3)

    def test_empty_index(self):
        with self.assertRaises(EmptySet):
            build(np.zeros((0, 2)))


class KnnAgreementTests(SimpleTestCase):

    def test_matches_brute_force(self):
        rng = np.random.default_rng(0)
        points = rng.uniform(0.0, 64.0, (1000, 2))
        queries = rng.uniform(-8.0, 72.0, (1000, 2))
        index = Index2D(points)
        for k in (1, 5):
            idx, d2 = index.query(queries, k)
            ref_idx, ref_d2 = brute_force_knn(points, queries, k)
            np.testing.assert_array_equal(idx, ref_idx)
            np.testing.assert_array_equal(d2, ref_d2)

    def test_clustered_points(self):
        rng = np.random.default_rng(1)
        points = np.concatenate([rng.normal(0.0, 0.01, (300, 2)), rng.normal(50.0, 5.0, (20, 2))])
        queries = rng.uniform(-10.0, 60.0, (200, 2))
        idx, d2 = Index2D(points).query(queries, 3)
        ref_idx, ref_d2 = brute_force_knn(points, queries, 3)
        np.testing.assert_array_equal(idx, ref_idx)
        np.testing.assert_array_equal(d2, ref_d2)

    def test_collinear_points(self):
        points = np.stack([np.arange(50.0), np.zeros(50)], axis=1)
        queries = np.array([[10.2, 3.0], [-5.0, 0.0], [60.0, -1.0]])
        idx, _ = Index2D(points).query(queries, 2)
        ref_idx, _ = brute_force_knn(points, queries, 2)
        np.testing.assert_array_equal(idx, ref_idx)

    def test_distances_are_non_decreasing(self):
        rng = np.random.default_rng(2)
        index = Index2D(rng.uniform(size=(500, 2)))
        _, d2 = index.query(rng.uniform(size=(100, 2)), 8)
        self.assertTrue(np.all(np.diff(d2, axis=1) >= 0.0))

    def test_empty_query_batch(self):
        idx, d2 = Index2D([[0.0, 0.0]]).query(np.zeros((0, 2)), 1)
        self.assertEqual(idx.shape, (0, 1))
        self.assertEqual(d2.shape, (0, 1))


class OccupiedDistanceTests(SimpleTestCase):

    def test_distance_to_nearest_occupied_cell(self):
        occupied = np.zeros((3, 5), dtype=bool)
        occupied[1, 1] = True
        expected = np.array([[1, 1, 1, 2, 3],
                             [1, 0, 1, 2, 3],
                             [1, 1, 1, 2, 3]])
        np.testing.assert_array_equal(occupied_distance(occupied), expected)

    def test_fully_occupied(self):
        self.assertEqual(occupied_distance(np.ones((2, 2), dtype=bool)).max(), 0)


class KnnQueryCostTests(SimpleTestCase):
    """Queries spread over a 64x64 frame while the points sit in a small region."""

    TIME_LIMIT = 1.0

    def setUp(self):
        rng = np.random.default_rng(3)
        self.queries = rng.uniform(0.0, 64.0, (2048, 2))
        self.rng = rng

    def timed_query(self, points, k):
        index = Index2D(points)
        start = time.perf_counter()
        result = index.query(self.queries, k)
        return result, time.perf_counter() - start

    def assert_fast_and_exact(self, points, k=1):
        (idx, d2), elapsed = self.timed_query(points, k)
        ref_idx, ref_d2 = brute_force_knn(points, self.queries, k)
        np.testing.assert_array_equal(idx, ref_idx)
        np.testing.assert_array_equal(d2, ref_d2)
        self.assertLess(elapsed, self.TIME_LIMIT)

    def test_collinear_points(self):
        points = np.stack([np.linspace(16.0, 48.0, 3000), np.full(3000, 32.0)], axis=1)
        self.assert_fast_and_exact(points)

    def test_compact_block(self):
        self.assert_fast_and_exact(self.rng.uniform(26.0, 38.0, (3000, 2)))

    def test_compact_block_five_neighbours(self):
        self.assert_fast_and_exact(self.rng.uniform(26.0, 38.0, (3000, 2)), k=5)

    def test_hollow_ring(self):
        angle = self.rng.uniform(0.0, 2.0 * np.pi, 3000)
        points = 32.0 + 20.0 * np.stack([np.cos(angle), np.sin(angle)], axis=1)
        self.assert_fast_and_exact(points)
