#!/usr/bin/env python3
"""
Unit tests for experiment configuration: validation, field-named errors,
overrides, hashing and the shipped YAML files.
"""

import os
import tempfile
import unittest

from config.experiment_config import ExperimentConfig, load_config, validate_config
from dmtg.errors import ConfigError

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "configs")


class TestValidation(unittest.TestCase):
    """Field checks with the offending field named."""

    def assertConfigError(self, data, field):
        with self.assertRaises(ConfigError) as ctx:
            validate_config(data)
        self.assertEqual(ctx.exception.field, field)
        self.assertTrue(str(ctx.exception).startswith(f"{field}: "))

    def test_defaults(self):
        config = validate_config({})
        self.assertEqual(config.k_groups, 3)
        self.assertEqual(config.epochs.total, 70)
        self.assertEqual(config.temperature.describe(), "fixed tau=4")
        self.assertEqual(config.recipe().lr, 3e-3)
        self.assertEqual(config.recipe().plateau_patience, 5)

    def test_default_branch_fits_one_planted_group(self):
        config = validate_config({})
        rank = config.suite.latent_dim_per_group
        self.assertGreaterEqual(config.recipe().width, rank)
        self.assertLess(config.recipe().width, 2 * rank)

    def test_unknown_keys(self):
        self.assertConfigError({"k_group": 3}, "k_group")
        self.assertConfigError({"optimizer": {"lrr": 0.1}}, "optimizer.lrr")

    def test_out_of_range_values(self):
        self.assertConfigError({"k_groups": 0}, "k_groups")
        self.assertConfigError({"batch_size": 0}, "batch_size")
        self.assertConfigError({"optimizer": {"lr": 0.0}}, "optimizer.lr")

    def test_shared_layers_below_depth(self):
        self.assertConfigError({"architecture": {"depth": 2, "shared_layers": 2}}, "architecture.shared_layers")

    def test_methods(self):
        self.assertConfigError({"methods": ["dmtg", "tag"]}, "methods")
        self.assertConfigError({"methods": ["dmtg", "dmtg"]}, "methods")
        self.assertConfigError({"methods": []}, "methods")

    def test_seeds(self):
        self.assertConfigError({"seeds": [1, 1]}, "seeds")
        self.assertConfigError({"seeds": []}, "seeds")
        self.assertConfigError({"seeds": [-1]}, "seeds")

    def test_suite_seed_defaults_to_run_seed(self):
        config = validate_config({})
        self.assertEqual(config.planted_spec(7).seed, 7)
        pinned = validate_config({"suite": {"seed": 3}})
        self.assertEqual(pinned.planted_spec(7).seed, 3)


class TestHashAndOverrides(unittest.TestCase):
    """Config identity and command-line overrides."""

    def test_hash_stable_and_short(self):
        a = validate_config({"k_groups": 2}).config_hash()
        b = validate_config({"k_groups": 2}).config_hash()
        self.assertEqual(a, b)
        self.assertEqual(len(a), 16)
        int(a, 16)

    def test_hash_tracks_settings_not_output_dir(self):
        base = validate_config({})
        self.assertEqual(base.config_hash(), validate_config({"output_dir": "elsewhere"}).config_hash())
        self.assertNotEqual(base.config_hash(), validate_config({"k_groups": 2}).config_hash())

    def test_overrides(self):
        config = validate_config({}).with_overrides(output_dir="out", seeds=[9], methods=["dmtg"])
        self.assertEqual((config.output_dir, config.seeds, config.methods), ("out", [9], ["dmtg"]))
        unchanged = validate_config({"seeds": [1, 2]}).with_overrides()
        self.assertEqual(unchanged.seeds, [1, 2])

    def test_invalid_override(self):
        with self.assertRaises(ConfigError):
            validate_config({}).with_overrides(methods=["unknown"])


class TestLoadConfig(unittest.TestCase):
    """YAML loading."""

    def setUp(self):
        self.tmp = tempfile.TemporaryDirectory()

    def tearDown(self):
        self.tmp.cleanup()

    def _write(self, text):
        path = os.path.join(self.tmp.name, "config.yaml")
        with open(path, "w", encoding="utf-8") as f:
            f.write(text)
        return path

    def test_missing_file(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config(os.path.join(self.tmp.name, "absent.yaml"))
        self.assertEqual(ctx.exception.field, "<file>")

    def test_bad_yaml(self):
        with self.assertRaises(ConfigError):
            load_config(self._write("methods: [dmtg, stl\n"))

    def test_root_must_be_mapping(self):
        with self.assertRaises(ConfigError) as ctx:
            load_config(self._write("- 1\n- 2\n"))
        self.assertEqual(ctx.exception.field, "<root>")

    def test_empty_file_gives_defaults(self):
        self.assertEqual(load_config(self._write("")), ExperimentConfig())

    def test_shipped_configs_load(self):
        for name in ("default.yaml", "oracle.yaml", "scalability.yaml"):
            with self.subTest(config=name):
                config = load_config(os.path.join(CONFIG_DIR, name))
                self.assertEqual(len(config.suite.true_partition), config.suite.n_tasks)

    def test_shipped_suites_share_the_default_planting(self):
        for name in ("default.yaml", "oracle.yaml"):
            with self.subTest(config=name):
                config = load_config(os.path.join(CONFIG_DIR, name))
                self.assertEqual(config.suite.signal_gain, 3.0)
                self.assertEqual(config.recipe().width, config.suite.latent_dim_per_group)

    def test_scalability_anneals(self):
        config = load_config(os.path.join(CONFIG_DIR, "scalability.yaml"))
        self.assertEqual(config.suite.n_tasks, 40)
        self.assertEqual(config.temperature.value(0), 100.0)
        self.assertEqual(config.temperature.value(100), 4.0)


if __name__ == '__main__':
    unittest.main()
