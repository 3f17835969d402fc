import tempfile
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase

from reconstruction.exceptions import FileFormatError
from reconstruction.utils.silhouette import (Silhouette, area, interp, load_silhouette, read_pgm,
                                             register_loader, write_pgm)


class InterpTests(SimpleTestCase):

    def setUp(self):
        self.ones = Silhouette(np.ones((4, 4)))
        self.half_plane = Silhouette(np.tile((np.arange(4) < 2).astype(float), (4, 1)))

    def test_inside_full_silhouette(self):
        self.assertEqual(interp(self.ones, 2.0, 2.0), 1.0)

    def test_outside_reads_background(self):
        self.assertEqual(interp(self.ones, -1.0, 2.0), 0.0)
        self.assertEqual(interp(self.ones, 2.0, 4.5), 0.0)

    def test_halfway_between_columns(self):
        self.assertAlmostEqual(interp(self.half_plane, 2.0, 1.5), 0.5)

    def test_pixel_centers_are_exact(self):
        rng = np.random.default_rng(1)
        s = Silhouette(rng.uniform(size=(6, 9)))
        for y in range(6):
            for x in range(9):
                self.assertEqual(interp(s, x + 0.5, y + 0.5), s.values[y, x])

    def test_image_border_clamps_to_outer_centers(self):
        s = Silhouette(np.array([[0.2, 0.8]]))
        self.assertAlmostEqual(interp(s, 0.0, 0.5), 0.2)
        self.assertAlmostEqual(interp(s, 2.0, 1.0), 0.8)

    def test_values_stay_in_unit_interval(self):
        rng = np.random.default_rng(2)
        s = Silhouette(rng.uniform(size=(16, 16)))
        values = interp(s, rng.uniform(-2.0, 18.0, 5000), rng.uniform(-2.0, 18.0, 5000))
        self.assertGreaterEqual(values.min(), 0.0)
        self.assertLessEqual(values.max(), 1.0)

    def test_continuous_inside_the_image(self):
        rng = np.random.default_rng(3)
        s = Silhouette(rng.uniform(size=(16, 16)))
        x = rng.uniform(0.1, 15.9, 1000)
        y = rng.uniform(0.1, 15.9, 1000)
        jump = np.abs(interp(s, x + 1e-7, y) - interp(s, x, y))
        self.assertLess(jump.max(), 1e-6)

    def test_array_input_keeps_shape(self):
        values = interp(self.ones, np.full((3, 2), 1.0), np.full((3, 2), 1.0))
        self.assertEqual(values.shape, (3, 2))


class AreaTests(SimpleTestCase):

    def test_full_and_empty(self):
        self.assertEqual(area(Silhouette(np.ones((32, 32)))), 1024)
        self.assertEqual(area(Silhouette(np.zeros((32, 32)))), 0)

    def test_counts_occupied_pixels(self):
        grid = np.zeros((16, 16))
        rng = np.random.default_rng(4)
        flat = rng.choice(256, size=13, replace=False)
        grid.ravel()[flat] = 1.0
        self.assertEqual(Silhouette(grid).area(), 13)

    def test_partial_pixels_are_not_counted(self):
        self.assertEqual(area(Silhouette(np.array([[0.5, 0.998, 0.999, 1.0]]))), 2)


class SilhouetteTypeTests(SimpleTestCase):

    def test_values_outside_unit_interval_rejected(self):
        with self.assertRaises(ValueError):
            Silhouette(np.array([[1.5]]))

    def test_from_flat_is_row_major(self):
        s = Silhouette.from_flat(3, 2, [0, 0, 1, 0, 0, 0])
        self.assertEqual((s.width, s.height), (3, 2))
        self.assertEqual(s.values[0, 2], 1.0)

    def test_from_flat_size_mismatch(self):
        with self.assertRaises(ValueError):
            Silhouette.from_flat(3, 3, [0.0] * 8)


class PGMTests(SimpleTestCase):

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()
        self.dir = Path(self.tmp.name)

    def tearDown(self):
        self.tmp.cleanup()

    def test_binary_round_trip(self):
        grid = np.zeros((5, 7))
        grid[1:4, 2:6] = 1.0
        path = self.dir / 'mask.pgm'
        write_pgm(Silhouette(grid), path)
        np.testing.assert_array_equal(read_pgm(path).values, grid)

    def test_ascii_with_comments(self):
        path = self.dir / 'mask.pgm'
        path.write_bytes(b"P2\n# made by hand\n3 2\n# maxval next\n255\n0 255 51\n255 0 0\n")
        s = read_pgm(path)
        np.testing.assert_allclose(s.values, [[0.0, 1.0, 0.2], [1.0, 0.0, 0.0]])

    def test_ascii_writer(self):
        path = self.dir / 'mask.pgm'
        write_pgm(Silhouette(np.eye(3)), path, binary=False)
        self.assertTrue(path.read_text().startswith('P2\n3 3\n255\n'))
        np.testing.assert_array_equal(read_pgm(path).values, np.eye(3))

    def test_unknown_magic(self):
        path = self.dir / 'mask.pgm'
        path.write_bytes(b"P6\n2 2\n255\n" + bytes(12))
        with self.assertRaises(FileFormatError):
            read_pgm(path)

    def test_truncated_raster(self):
        path = self.dir / 'mask.pgm'
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
        with self.assertRaises(FileFormatError):
            read_pgm(path)

    def test_unregistered_suffix(self):
        with self.assertRaises(FileFormatError):
            load_silhouette(self.dir / 'mask.bmp')

    def test_registered_loader_is_used(self):
        register_loader('.npy', lambda path: Silhouette(np.load(path)))
        path = self.dir / 'mask.npy'
        np.save(path, np.ones((2, 3)))
        self.assertEqual(load_silhouette(path).area(), 6)
