"""Tests for package configuration loading."""

import os
from unittest.mock import patch

from django.test import SimpleTestCase, override_settings

from ..conf import get_config, reload_config
from ..constants import AggregationLevel, DefaultValues, OccurrenceCounting
from ..exceptions import ConfigurationError


class PackageConfigTest(SimpleTestCase):
    """Test cases for PackageConfig."""

    def setUp(self):
        self.addCleanup(reload_config)

    def test_defaults_and_test_settings(self):
        config = reload_config()

        self.assertEqual(config.WINDOW_START, 2003)
        self.assertEqual(config.WINDOW_END, 2015)
        self.assertEqual(config.AGGREGATION_LEVEL, AggregationLevel.COUNTRY)
        self.assertEqual(config.OCCURRENCE_COUNTING, OccurrenceCounting.PUBLICATIONS)
        self.assertEqual(config.TOP_K, DefaultValues.TOP_K)
        self.assertEqual(config.CENTRALITY_WORKERS, 1)

    def test_singleton(self):
        self.assertIs(get_config(), get_config())
        self.assertIsNot(get_config(), reload_config())

    @override_settings(MOBILITY_AGGREGATION_LEVEL="org", MOBILITY_TOP_K=5)
    def test_overrides(self):
        config = reload_config()

        self.assertEqual(config.AGGREGATION_LEVEL, AggregationLevel.ORGANIZATION)
        self.assertEqual(config.TOP_K, 5)

    @override_settings(MOBILITY_AGGREGATION_LEVEL="continent")
    def test_unknown_level(self):
        with self.assertRaises(ConfigurationError) as cm:
            reload_config()
        self.assertEqual(cm.exception.details.get("setting"), "MOBILITY_AGGREGATION_LEVEL")

    @override_settings(MOBILITY_WINDOW_START=2016, MOBILITY_WINDOW_END=2003)
    def test_inverted_window(self):
        with self.assertRaises(ConfigurationError):
            reload_config()

    @override_settings(MOBILITY_TOP_K=0)
    def test_non_positive_top_k(self):
        with self.assertRaises(ConfigurationError):
            reload_config()

    @override_settings(MOBILITY_CENTRALITY_WORKERS=4, TESTING=False)
    def test_workers_outside_tests(self):
        self.assertEqual(reload_config().CENTRALITY_WORKERS, 4)

    @override_settings(DEBUG=True)
    def test_debug_forces_debug_logging(self):
        self.assertEqual(reload_config().LOG_LEVEL, "DEBUG")

    def test_output_dir_from_environment(self):
        with patch.dict(os.environ, {"MOBILITY_OUTPUT_DIR": "/srv/mobility"}):
            self.assertEqual(reload_config().OUTPUT_DIR, "/srv/mobility")
        self.assertEqual(reload_config().OUTPUT_DIR, "/tmp/django-mobility-indicators-tests")

    def test_regions(self):
        config = reload_config()

        self.assertEqual(config.get_region("Iberia"), ["SPAIN", "PORTUGAL"])
        self.assertIn("POLAND", config.get_region("europe"))
        self.assertIsNone(config.get_region("atlantis"))

    def test_to_dict(self):
        data = reload_config().to_dict()

        self.assertIn("WINDOW_START", data)
        self.assertNotIn("_cache", data)
