"""Tests for the package logger."""

import io
import sys

from traffic_dg.utils import logger, setup_logging


class TestSetupLogging:
	def test_repeated_setup_after_stream_closed(self, monkeypatch):
		first = io.StringIO()
		monkeypatch.setattr(sys, "stderr", first)
		setup_logging("INFO")
		first.close()

		second = io.StringIO()
		monkeypatch.setattr(sys, "stderr", second)
		setup_logging("INFO")
		logger("utils").info("handler follows the current stderr")
		assert "handler follows the current stderr" in second.getvalue()

	def test_single_handler(self):
		root = setup_logging("WARNING")
		setup_logging("WARNING")
		assert len(root.handlers) == 1
		assert root.level == 30
