"""Tests for structured pipeline logging."""

import json
import logging

from django.test import SimpleTestCase
from freezegun import freeze_time

from .. import __version__
from ..observability.logging import PipelineLogFormatter, PipelineLogger, StructuredJsonFormatter


def make_record(message="Stage completed: flows", **custom):
    record = logging.LogRecord("django_mobility_indicators.test", logging.INFO, __file__, 1, message, None, None)
    record._custom_fields = custom
    return record


class StructuredJsonFormatterTest(SimpleTestCase):
    """Tests for the JSON formatter."""

    @freeze_time("2026-03-01 12:30:00")
    def test_fields(self):
        formatter = StructuredJsonFormatter("%(levelname)s %(name)s %(message)s")

        data = json.loads(formatter.format(make_record(stage="flows", duration_ms=12.5)))

        self.assertEqual(data["timestamp"], "2026-03-01T12:30:00Z")
        self.assertEqual(data["service"], "django-mobility-indicators")
        self.assertEqual(data["version"], __version__)
        self.assertEqual(data["stage"], "flows")
        self.assertEqual(data["duration_ms"], 12.5)
        self.assertEqual(data["message"], "Stage completed: flows")


class PipelineLogFormatterTest(SimpleTestCase):
    """Tests for the human-readable formatter."""

    def test_context_and_duration(self):
        line = PipelineLogFormatter().format(make_record(stage="flows", level="city", duration_ms=3.0))

        self.assertIn("[stage:flows level:city]", line)
        self.assertTrue(line.endswith("Stage completed: flows (3.00ms)"))

    def test_plain_message(self):
        line = PipelineLogFormatter().format(make_record("Wrote events.csv (3 rows)"))
        self.assertTrue(line.endswith("django_mobility_indicators.test: Wrote events.csv (3 rows)"))


class PipelineLoggerTest(SimpleTestCase):
    """Tests for the context-carrying logger."""

    def test_bound_context(self):
        logger = PipelineLogger("django_mobility_indicators.test", stage="ingest").bind(line_number=4)

        with self.assertLogs("django_mobility_indicators.test", level="WARNING") as logs:
            logger.log_data_warning("bad year")

        record = logs.records[0]
        self.assertEqual(record._custom_fields, {"stage": "ingest", "line_number": 4, "data_warning": True})

    def test_failed_stage_is_an_error(self):
        with self.assertLogs("django_mobility_indicators.test", level="ERROR") as logs:
            PipelineLogger("django_mobility_indicators.test").log_stage("network", "failed", level="country")

        self.assertEqual(logs.records[0].getMessage(), "Stage failed: network")
        self.assertEqual(logs.records[0]._custom_fields["level"], "country")
