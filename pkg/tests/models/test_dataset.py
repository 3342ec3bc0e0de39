import os
import tempfile
import unittest

import numpy as np

from advbs.errors import BadMagic, CountMismatch, DatasetError, InvalidInput, TruncatedFile
from advbs.models import Dataset, load_idx, make_two_moons
from tests.fixtures import write_idx


class IdxLoading(unittest.TestCase):
    def setUp(self):
        self.tmp_dir = tempfile.TemporaryDirectory()
        self.images = os.path.join(self.tmp_dir.name, "images-idx3-ubyte")
        self.labels = os.path.join(self.tmp_dir.name, "labels-idx1-ubyte")
        rng = np.random.default_rng(0)
        self.pixels = rng.integers(0, 256, size=(5, 3, 4))
        self.classes = np.array([0, 1, 2, 1, 0])

    def tearDown(self):
        self.tmp_dir.cleanup()

    def test_load(self):
        write_idx(self.images, self.labels, self.pixels, self.classes)
        dataset = load_idx(self.images, self.labels)
        self.assertEqual(len(dataset), 5)
        self.assertEqual(dataset.input_dim, 12)
        np.testing.assert_allclose(dataset.images[2], self.pixels[2].reshape(-1) / 255.0)
        np.testing.assert_array_equal(dataset.labels, self.classes)

    def test_limit(self):
        write_idx(self.images, self.labels, self.pixels, self.classes)
        self.assertEqual(len(load_idx(self.images, self.labels, limit=2)), 2)
        self.assertEqual(len(load_idx(self.images, self.labels, limit=50)), 5)

    def test_bad_magic(self):
        write_idx(self.images, self.labels, self.pixels, self.classes, image_magic=0x802)
        with self.assertRaises(BadMagic):
            load_idx(self.images, self.labels)

    def test_count_mismatch(self):
        write_idx(self.images, self.labels, self.pixels, self.classes, label_count=4)
        with self.assertRaises(CountMismatch):
            load_idx(self.images, self.labels)

    def test_truncated(self):
        write_idx(self.images, self.labels, self.pixels, self.classes)
        with open(self.images, "rb") as in_f:
            data = in_f.read()
        with open(self.images, "wb") as out_f:
            out_f.write(data[:-3])
        with self.assertRaises(TruncatedFile):
            load_idx(self.images, self.labels)

    def test_missing(self):
        with self.assertRaises(DatasetError):
            load_idx(self.images, self.labels)


class TwoMoons(unittest.TestCase):
    def test_generation(self):
        dataset = make_two_moons(101, 0.05, 3)
        self.assertEqual(len(dataset), 101)
        self.assertEqual(dataset.input_dim, 2)
        self.assertGreaterEqual(np.min(dataset.images), 0.0)
        self.assertLessEqual(np.max(dataset.images), 1.0)
        self.assertEqual(int(np.sum(dataset.labels == 1)), 50)

    def test_deterministic(self):
        first = make_two_moons(50, 0.1, 9)
        second = make_two_moons(50, 0.1, 9)
        np.testing.assert_array_equal(first.images, second.images)
        np.testing.assert_array_equal(first.labels, second.labels)

    def test_too_small(self):
        with self.assertRaises(InvalidInput):
            make_two_moons(1, 0.05, 0)

    def test_split(self):
        dataset = make_two_moons(100, 0.05, 0)
        train, test = dataset.split(0.2, seed=1)
        self.assertEqual(len(train), 20)
        self.assertEqual(len(test), 80)
        self.assertEqual(len(train.concatenate(test)), 100)
        with self.assertRaises(InvalidInput):
            dataset.split(1.0, seed=1)

    def test_validation(self):
        with self.assertRaises(InvalidInput):
            Dataset(np.array([[1.5]]), np.array([0]))
        with self.assertRaises(CountMismatch):
            Dataset(np.zeros((2, 2)), np.array([0]))
