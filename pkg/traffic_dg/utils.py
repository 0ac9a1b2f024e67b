"""
Shared helpers: the package logger.
"""

import logging
import sys

_LOGGER_NAME = "traffic_dg"
_handler = None


def setup_logging(level="INFO"):
	"""
	Attach a single stream handler to the package logger.
	Safe to call repeatedly; later calls only update the level and rebind the
	handler to the current sys.stderr.
	"""
	global _handler
	root = logging.getLogger(_LOGGER_NAME)
	if _handler is None:
		_handler = logging.StreamHandler()
		_handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s: %(message)s"))
		root.addHandler(_handler)
		root.propagate = False
	else:
		_handler.stream = sys.stderr
	root.setLevel(str(level).upper())
	return root


def logger(module=None):
	"""
	Get the package logger, or a child logger for `module`.

	Usage mirrors the app-wide logger accessor:
		logger().info(f"Loaded scenario {name}")
	"""
	if module:
		return logging.getLogger(f"{_LOGGER_NAME}.{module}")
	return logging.getLogger(_LOGGER_NAME)
