#!/usr/bin/env python3
"""
Unit tests for the Gumbel-softmax relaxation and the temperature schedules.
"""

import math
import unittest

import numpy as np
from pydantic import ValidationError

from dmtg.autodiff import Tensor
from dmtg.errors import DomainError, ShapeError
from dmtg.grouping import (
    TEMPERATURE_PRESETS, TemperatureSchedule, gumbel_from_uniform, gumbel_softmax, sample_gumbel,
)
from dmtg.runner.checks import check_relaxation

EULER_GAMMA = 0.5772156649


class TestGumbelNoise(unittest.TestCase):
    """Standard Gumbel sampling."""

    def test_closed_form_values(self):
        self.assertAlmostEqual(float(gumbel_from_uniform(math.exp(-1.0))), 0.0, places=12)
        self.assertAlmostEqual(float(gumbel_from_uniform(math.exp(-math.e))), -1.0, places=12)

    def test_uniform_outside_open_interval(self):
        for u in (0.0, 1.0, -0.5):
            with self.subTest(u=u):
                with self.assertRaises(DomainError):
                    gumbel_from_uniform(np.array([u]))

    def test_deterministic_for_seed(self):
        a = sample_gumbel((4, 3), np.random.default_rng(9))
        b = sample_gumbel((4, 3), np.random.default_rng(9))
        np.testing.assert_array_equal(a, b)
        self.assertEqual(a.shape, (4, 3))

    def test_empirical_mean_is_euler_gamma(self):
        draws = sample_gumbel((1000, 1000), np.random.default_rng(0))
        self.assertLess(abs(draws.mean() - EULER_GAMMA), 0.01)


class TestGumbelSoftmax(unittest.TestCase):
    """Relaxed assignment rows."""

    def test_equal_scores_give_uniform_rows(self):
        for k in (1, 2, 5):
            for tau in (0.1, 1.0, 4.0):
                with self.subTest(k=k, tau=tau):
                    z = gumbel_softmax(Tensor(np.full((3, k), 1.0 / k)), np.zeros((3, k)), tau).values
                    np.testing.assert_allclose(z, np.full((3, k), 1.0 / k), atol=1e-15)

    def test_two_groups_hand_value(self):
        z = gumbel_softmax(Tensor([[1.0, 0.0]]), np.zeros((1, 2)), 1.0).values
        np.testing.assert_allclose(z, [[math.e / (math.e + 1), 1 / (math.e + 1)]], rtol=1e-12)
        self.assertAlmostEqual(z[0, 0], 0.7311, places=4)

    def test_one_hot_limit(self):
        z = gumbel_softmax(Tensor([[1.0, 0.0]]), np.zeros((1, 2)), 0.01).values
        self.assertGreater(z[0, 0], 1.0 - 1e-12)

    def test_peak_grows_as_temperature_falls(self):
        rng = np.random.default_rng(2)
        s = Tensor(rng.normal(size=(6, 4)))
        g = sample_gumbel((6, 4), rng)
        peaks = [gumbel_softmax(s, g, tau).values.max(axis=1) for tau in (4.0, 1.0, 0.1, 0.01)]
        for earlier, later in zip(peaks, peaks[1:]):
            self.assertTrue(np.all(later >= earlier))

    def test_rows_on_simplex(self):
        rng = np.random.default_rng(5)
        s = Tensor(rng.normal(scale=5.0, size=(50, 3)))
        z = gumbel_softmax(s, sample_gumbel((50, 3), rng), 0.5).values
        np.testing.assert_allclose(z.sum(axis=1), np.ones(50), atol=1e-9)
        self.assertTrue(np.all(z >= 0.0))

    def test_row_shift_invariance(self):
        rng = np.random.default_rng(6)
        s = rng.normal(size=(4, 3))
        g = sample_gumbel((4, 3), rng)
        shifts = rng.normal(scale=10.0, size=(4, 1))
        z = gumbel_softmax(Tensor(s), g, 2.0).values
        shifted = gumbel_softmax(Tensor(s + shifts), g, 2.0).values
        np.testing.assert_allclose(z, shifted, atol=1e-12)

    def test_invalid_temperature(self):
        for tau in (0.0, -1.0):
            with self.subTest(tau=tau):
                with self.assertRaises(DomainError):
                    gumbel_softmax(Tensor([[0.0, 0.0]]), np.zeros((1, 2)), tau)

    def test_noise_shape_must_match(self):
        with self.assertRaises(ShapeError):
            gumbel_softmax(Tensor([[0.0, 0.0]]), np.zeros((2, 2)), 1.0)

    def test_randomized_invariants(self):
        result = check_relaxation()
        self.assertTrue(result.passed, result.detail)


class TestTemperatureSchedule(unittest.TestCase):
    """Fixed and annealed temperatures."""

    def test_fixed(self):
        schedule = TemperatureSchedule.fixed(2.5)
        self.assertEqual([schedule.value(e) for e in range(3)], [2.5, 2.5, 2.5])

    def test_anneal_halves_and_clamps(self):
        schedule = TemperatureSchedule.anneal(100.0, 4.0, 0.5)
        self.assertEqual([schedule.value(e) for e in range(7)], [100.0, 50.0, 25.0, 12.5, 6.25, 4.0, 4.0])

    def test_anneal_every_few_epochs(self):
        schedule = TemperatureSchedule.anneal(10.0, 1.0, 0.5, epochs_per_decay=2)
        self.assertEqual([schedule.value(e) for e in range(5)], [10.0, 10.0, 5.0, 5.0, 2.5])

    def test_presets_monotone_and_positive(self):
        for name, schedule in TEMPERATURE_PRESETS.items():
            with self.subTest(preset=name):
                values = [schedule.value(e) for e in range(40)]
                self.assertTrue(all(v > 0 for v in values))
                self.assertTrue(all(b <= a for a, b in zip(values, values[1:])))

    def test_invalid_schedules(self):
        with self.assertRaises(ValidationError):
            TemperatureSchedule.fixed(0.0)
        with self.assertRaises(ValidationError):
            TemperatureSchedule.anneal(4.0, 100.0, 0.5)
        with self.assertRaises(ValidationError):
            TemperatureSchedule(kind="cosine")

    def test_describe(self):
        self.assertEqual(TemperatureSchedule.fixed(4.0).describe(), "fixed tau=4")
        self.assertIn("100 -> 4", TemperatureSchedule.anneal(100.0, 4.0, 0.5).describe())


if __name__ == '__main__':
    unittest.main()
