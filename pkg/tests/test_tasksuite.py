#!/usr/bin/env python3
"""
Unit tests for synthetic task suites: generation, planted structure,
batching and the suite file format.
"""

import os
import tempfile
import unittest

import numpy as np
from pydantic import ValidationError

from dmtg.errors import DomainError, SubspaceCapacityError
from dmtg.tasksuite import (
    PlantedSpec, SampleCounts, TaskKind, full_split, generate, load_suite, save_suite, signal_scale, split_loaders,
)


def _small_spec(**overrides) -> PlantedSpec:
    data = dict(n_tasks=4, true_partition=[0, 0, 1, 1], input_dim=8, latent_dim_per_group=2,
                samples=SampleCounts(train=200, val=50, test=50), seed=11)
    data.update(overrides)
    return PlantedSpec(**data)


def _abs_corr(a: np.ndarray, b: np.ndarray) -> float:
    return abs(float(np.corrcoef(a, b)[0, 1]))


class TestPlantedSpec(unittest.TestCase):
    """Validation of the planted-suite description."""

    def test_partition_length_must_match(self):
        with self.assertRaises(ValidationError):
            PlantedSpec(n_tasks=3, true_partition=[0, 1])

    def test_unknown_keys_rejected(self):
        with self.assertRaises(ValidationError):
            PlantedSpec(n_task=3)

    def test_labels_canonicalized(self):
        spec = PlantedSpec(n_tasks=4, true_partition=[5, 5, 2, 7])
        self.assertEqual(list(spec.partition.assignment), [0, 0, 1, 2])
        self.assertEqual(spec.n_groups, 3)

    def test_binary_columns(self):
        spec = _small_spec(kinds=[TaskKind.REGRESSION, TaskKind.BINARY_CLASSIFICATION,
                                  TaskKind.REGRESSION, TaskKind.BINARY_CLASSIFICATION])
        self.assertEqual(spec.binary_columns, [False, True, False, True])


class TestGenerate(unittest.TestCase):
    """Planted structure of generated suites."""

    def setUp(self):
        self.spec = _small_spec()
        self.suite = generate(self.spec)

    def test_regeneration_is_byte_identical(self):
        again = generate(self.spec)
        for split in ("train", "val", "test"):
            with self.subTest(split=split):
                self.assertEqual(self.suite.x[split].tobytes(), again.x[split].tobytes())
                self.assertEqual(self.suite.y[split].tobytes(), again.y[split].tobytes())

    def test_different_seeds_differ(self):
        other = generate(self.spec.with_seed(12))
        self.assertFalse(np.array_equal(self.suite.x["train"], other.x["train"]))

    def test_split_shapes(self):
        for split, n in (("train", 200), ("val", 50), ("test", 50)):
            with self.subTest(split=split):
                self.assertEqual(self.suite.x[split].shape, (n, 8))
                self.assertEqual(self.suite.y[split].shape, (n, 4))

    def test_bases_orthonormal_and_mutually_orthogonal(self):
        bases = self.suite.bases
        for g, bg in enumerate(bases):
            np.testing.assert_allclose(bg.T @ bg, np.eye(bg.shape[1]), atol=1e-10)
            for h, bh in enumerate(bases):
                if g != h:
                    with self.subTest(g=g, h=h):
                        self.assertLess(np.abs(bg.T @ bh).max(), 1e-10)

    def test_capacity_exceeded(self):
        with self.assertRaises(SubspaceCapacityError):
            generate(_small_spec(input_dim=3))

    def test_noiseless_targets_equal_signals(self):
        suite = generate(_small_spec(noise_std=0.0))
        np.testing.assert_array_equal(suite.y["train"], suite.signal["train"])
        self.assertEqual(_abs_corr(suite.y["train"][:, 0], suite.y["train"][:, 0]), 1.0)

    def test_same_group_tasks_correlate(self):
        suite = generate(PlantedSpec(n_tasks=2, true_partition=[0, 0], input_dim=8, latent_dim_per_group=2,
                                     noise_std=0.0, task_jitter=0.0,
                                     samples=SampleCounts(train=1000, val=10, test=10), seed=3))
        signal = suite.signal["train"]
        self.assertGreater(float(np.corrcoef(signal[:, 0], signal[:, 1])[0, 1]), 0.0)

    def test_cross_group_signals_uncorrelated(self):
        suite = generate(PlantedSpec(n_tasks=2, true_partition=[0, 1], input_dim=8, latent_dim_per_group=2,
                                     noise_std=0.0, samples=SampleCounts(train=5000, val=10, test=10), seed=4))
        signal = suite.signal["train"]
        self.assertLess(_abs_corr(signal[:, 0], signal[:, 1]), 0.1)

    def test_planted_signal_separation(self):
        suite = generate(PlantedSpec(seed=0))
        signal = suite.signal["train"]
        groups = suite.spec.true_partition
        within, across = [], []
        for i in range(suite.n_tasks):
            for j in range(i + 1, suite.n_tasks):
                (within if groups[i] == groups[j] else across).append(_abs_corr(signal[:, i], signal[:, j]))
        self.assertGreaterEqual(np.mean(within) - np.mean(across), 0.2)

    def test_noiseless_signals_have_unit_variance(self):
        for gain in (1.0, 3.0):
            with self.subTest(gain=gain):
                suite = generate(PlantedSpec(signal_gain=gain, samples=SampleCounts(train=20000, val=10, test=10)))
                np.testing.assert_allclose(suite.signal["train"].var(axis=0), np.ones(6), atol=0.1)

    def test_signal_scale_at_unit_gain(self):
        # E[tanh(z)^2] = 0.3943 for a standard normal z
        self.assertAlmostEqual(signal_scale(1.0), 1.0 / np.sqrt(0.3943), delta=1e-3)
        self.assertLess(signal_scale(3.0), signal_scale(1.0))

    def test_gain_sharpens_features(self):
        soft = generate(_small_spec(noise_std=0.0, signal_gain=0.5))
        sharp = generate(_small_spec(noise_std=0.0, signal_gain=3.0))
        np.testing.assert_array_equal(soft.x["train"], sharp.x["train"])
        latent = soft.x["train"] @ soft.bases[0]
        expected = np.tanh(3.0 * latent) @ sharp.weights[0]
        np.testing.assert_allclose(sharp.signal["train"][:, 0], expected, rtol=1e-12, atol=1e-12)

    def test_classification_targets_balanced(self):
        suite = generate(_small_spec(kinds=[TaskKind.BINARY_CLASSIFICATION] * 4))
        y = suite.y["train"]
        self.assertTrue(np.all((y == 0.0) | (y == 1.0)))
        np.testing.assert_allclose(y.mean(axis=0), np.full(4, 0.5), atol=0.01)

    def test_subset_keeps_columns(self):
        sub = self.suite.subset([3, 1])
        self.assertEqual(sub.n_tasks, 2)
        np.testing.assert_array_equal(sub.y["val"], self.suite.y["val"][:, [3, 1]])
        self.assertEqual(sub.spec.true_partition, [1, 0])


class TestLoaders(unittest.TestCase):
    """Shuffled mini-batching."""

    def setUp(self):
        self.suite = generate(_small_spec(samples=SampleCounts(train=10, val=5, test=5)))

    def test_last_partial_batch_kept(self):
        sizes = [b.size for b in split_loaders(self.suite, 4, seed=0, epoch=0)]
        self.assertEqual(sizes, [4, 4, 2])

    def test_same_seed_and_epoch_same_order(self):
        first = [b.indices.tolist() for b in split_loaders(self.suite, 4, seed=5, epoch=2)]
        second = [b.indices.tolist() for b in split_loaders(self.suite, 4, seed=5, epoch=2)]
        self.assertEqual(first, second)

    def test_epochs_reshuffle(self):
        first = np.concatenate([b.indices for b in split_loaders(self.suite, 10, seed=5, epoch=0)])
        later = [np.concatenate([b.indices for b in split_loaders(self.suite, 10, seed=5, epoch=e)])
                 for e in range(1, 6)]
        self.assertTrue(any(not np.array_equal(first, order) for order in later))

    def test_batches_partition_the_indices(self):
        indices = np.concatenate([b.indices for b in split_loaders(self.suite, 3, seed=1, epoch=0)])
        self.assertEqual(sorted(indices.tolist()), list(range(10)))

    def test_batch_rows_match_split(self):
        for batch in split_loaders(self.suite, 4, seed=0, epoch=0):
            np.testing.assert_array_equal(batch.x, self.suite.x["train"][batch.indices])
            np.testing.assert_array_equal(batch.y, self.suite.y["train"][batch.indices])

    def test_invalid_batch_size(self):
        with self.assertRaises(DomainError):
            list(split_loaders(self.suite, 0, seed=0, epoch=0))

    def test_full_split(self):
        batch = full_split(self.suite, "val")
        self.assertEqual(batch.size, 5)
        np.testing.assert_array_equal(batch.indices, np.arange(5))


class TestSuiteFile(unittest.TestCase):
    """Suite export and import."""

    def test_saved_suite_reloads_identically(self):
        suite = generate(_small_spec(kinds=[TaskKind.REGRESSION, TaskKind.BINARY_CLASSIFICATION] * 2))
        with tempfile.TemporaryDirectory() as tmp:
            path = save_suite(suite, os.path.join(tmp, "nested", "suite.npz"))
            loaded = load_suite(path)
        self.assertEqual(loaded.spec, suite.spec)
        np.testing.assert_array_equal(loaded.weights, suite.weights)
        for split in ("train", "val", "test"):
            with self.subTest(split=split):
                np.testing.assert_array_equal(loaded.x[split], suite.x[split])
                np.testing.assert_array_equal(loaded.y[split], suite.y[split])
        for original, reloaded in zip(suite.bases, loaded.bases):
            np.testing.assert_array_equal(original, reloaded)


if __name__ == '__main__':
    unittest.main()
