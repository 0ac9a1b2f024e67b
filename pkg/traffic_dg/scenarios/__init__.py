"""
Scenario files and the built-in experiments.
"""

import os
from importlib import resources

from traffic_dg.exceptions import ScenarioSemanticError
from traffic_dg.scenarios.parser import (
	InitialCondition,
	Scenario,
	check_scenario,
	emit_scenario,
	parse_scenario,
	with_overrides,
)

# Registry of built-in scenarios: name -> (file, summary)
BUILTIN_SCENARIOS = {
	"bottleneck": ("bottleneck.scn", "single highway with a one-lane bottleneck and periodic influx"),
	"simple_network": ("simple_network.scn", "closed three-road network, 1x2 split and 2x1 merge"),
	"comparison": ("comparison.scn", "simple network with a jammed outgoing road; compare junction fluxes"),
	"traffic_lights": ("traffic_lights.scn", "4x4 junction with three light phases and all-red gaps"),
}


def get_builtin_text(name):
	"""
	Get the text of a built-in scenario.

	Args:
		name: registry key
	Returns:
		Scenario file contents or None if not found
	"""
	entry = BUILTIN_SCENARIOS.get(name)
	if entry is None:
		return None
	return resources.files("traffic_dg.scenarios").joinpath("builtin", entry[0]).read_text(encoding="utf-8")


def get_available_scenarios():
	"""Get list of built-in scenario names."""
	return list(BUILTIN_SCENARIOS.keys())


def load_scenario(ref):
	"""
	Parse a built-in scenario by name or a scenario file by path.

	A path that exists on disk wins over a built-in of the same name.
	"""
	if os.path.isfile(ref):
		try:
			with open(ref, encoding="utf-8") as f:
				text = f.read()
		except OSError as e:
			raise ScenarioSemanticError(f"cannot read scenario file {ref}: {e}")
		return parse_scenario(text)

	text = get_builtin_text(ref)
	if text is None:
		raise ScenarioSemanticError(
			f"no scenario file or built-in scenario named '{ref}'; "
			f"built-ins: {', '.join(get_available_scenarios())}"
		)
	return parse_scenario(text)


__all__ = [
	"BUILTIN_SCENARIOS",
	"InitialCondition",
	"Scenario",
	"check_scenario",
	"emit_scenario",
	"get_available_scenarios",
	"get_builtin_text",
	"load_scenario",
	"parse_scenario",
	"with_overrides",
]
