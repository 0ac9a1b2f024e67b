"""
Run-wide configuration.
Defaults merged with an optional JSON config file (passed with --config).
"""

import json
import os

from traffic_dg.exceptions import ScenarioSemanticError

DEFAULT_CONF = {
	"log_level": "INFO",
	# per-step series are written every n-th step
	"record_every": 100,
	"points_per_element": 5,
	# mass-violation clamp events tolerated before a run aborts
	"max_clamp_events": 0,
	"roundoff_tol": 1e-13,
	"plot": False,
}


def get_conf(path=None):
	"""
	Get the effective configuration.

	Args:
		path: optional path to a JSON file overriding DEFAULT_CONF keys
	Returns:
		dict with every DEFAULT_CONF key
	"""
	conf = dict(DEFAULT_CONF)
	if not path:
		return conf

	if not os.path.exists(path):
		raise ScenarioSemanticError(f"config file not found: {path}")

	with open(path, encoding="utf-8") as f:
		try:
			overrides = json.load(f)
		except json.JSONDecodeError as e:
			raise ScenarioSemanticError(f"config file {path} is not valid JSON: {e}")

	unknown = sorted(set(overrides) - set(DEFAULT_CONF))
	if unknown:
		raise ScenarioSemanticError(f"unknown config keys in {path}: {', '.join(unknown)}")

	conf.update(overrides)
	return conf
