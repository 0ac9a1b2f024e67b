"""Tests for scenario parsing, emission, overrides and the built-in scenarios."""

import numpy as np
import pytest

from traffic_dg.exceptions import NetworkValidationError, ScenarioSemanticError, ScenarioSyntaxError
from traffic_dg.scenarios import (
	emit_scenario,
	get_available_scenarios,
	get_builtin_text,
	load_scenario,
	parse_scenario,
	with_overrides,
)
from traffic_dg.scenarios.parser import InitialCondition, element_count, element_params
from traffic_dg.solver.fundamental import DiagramParams, get_diagram
from traffic_dg.solver.network import FluxStrategy, InflowEnd, JunctionEnd, OutflowEnd, validate

HEADER = "format = 1\nname = test\n"

NUMERICS = """
[numerics]
tau = 1e-3
t_end = 1
elements_per_unit = 10
"""

ROAD = """
[road 1]
a = 0
b = 1
diagram = greenshields
v_max = 1
rho_max = 1
left = inflow 1
right = outflow
ic = 0.2
"""

INFLOW = """
[inflow 1]
value = 0.3
"""


def minimal(road=ROAD, extra=""):
	return HEADER + NUMERICS + INFLOW + road + extra


class TestBuiltins:
	@pytest.mark.parametrize("name", ["bottleneck", "simple_network", "comparison", "traffic_lights"])
	def test_parses_and_validates(self, name):
		scenario = load_scenario(name)
		assert scenario.name == name
		assert validate(scenario.network) == {"status": "success"}

	def test_registry(self):
		assert get_available_scenarios() == ["bottleneck", "simple_network", "comparison", "traffic_lights"]
		assert get_builtin_text("nope") is None

	def test_bottleneck(self):
		scenario = load_scenario("bottleneck")
		roads = scenario.network.roads
		assert [(r.diagram.v_max, r.diagram.rho_max, r.length) for r in roads] == [
			(1.3, 2.0, 2.0),
			(1.0, 2.0, 0.5),
			(0.8, 1.0, 2.0),
			(1.3, 2.0, 1.0),
		]
		assert [r.n_elements for r in roads] == [300, 75, 300, 150]
		assert roads[0].left == InflowEnd(1)
		assert roads[-1].right == OutflowEnd()
		datum = scenario.inflows[1]
		assert datum.value(0.0) == pytest.approx(0.13)
		assert datum.period == 7.0
		assert all(j.matrix.rows == ((1.0,),) for j in scenario.network.junctions)
		assert scenario.snapshots == (3.0, 5.0, 7.0, 9.0, 11.0, 13.0, 15.0, 17.0, 19.0)

	def test_simple_network(self):
		scenario = load_scenario("simple_network")
		net = scenario.network
		assert net.is_closed
		assert net.junction(1).matrix.rows == ((0.75,), (0.25,))
		assert net.junction(2).matrix.rows == ((1.0, 1.0),)
		assert net.junction(2).strategy == FluxStrategy("weighted")
		assert scenario.initial[1](np.array([0.3, 0.5, 0.6])) == pytest.approx([0.0, 1.0, 0.5])
		assert scenario.initial[2](np.array([0.1, 0.9])) == pytest.approx([0.4, 0.4])
		assert scenario.numerics.tau == 1e-4
		assert scenario.numerics.t_end == 3.0

	def test_traffic_lights(self):
		scenario = load_scenario("traffic_lights")
		junction = scenario.network.junction(1)
		assert junction.shape == (4, 4)
		assert junction.lights.period == pytest.approx(2.15)
		assert junction.lights.all_red == 0.05
		road = scenario.network.road(3)
		_, rho_max = road.element_params()
		assert rho_max[0] == pytest.approx(1.5)
		assert rho_max[-1] == pytest.approx(1.5)
		assert rho_max[1] == 1.0
		assert all(r.left == JunctionEnd(1) and r.right == JunctionEnd(1) for r in scenario.network.roads)


class TestSyntaxErrors:
	def test_empty_file(self):
		with pytest.raises(ScenarioSyntaxError) as excinfo:
			parse_scenario("")
		assert excinfo.value.line == 1

	def test_comments_only(self):
		with pytest.raises(ScenarioSyntaxError) as excinfo:
			parse_scenario("# nothing here\n\n")
		assert excinfo.value.line == 1

	def test_unsupported_format(self):
		with pytest.raises(ScenarioSyntaxError) as excinfo:
			parse_scenario(minimal().replace("format = 1", "format = 2"))
		assert excinfo.value.line == 1

	@pytest.mark.parametrize(
		"extra, message",
		[
			("[bridge 1]\n", "unknown section"),
			("[road]\n", "needs an integer id"),
			("[output 1]\n", "takes no id"),
			("[inflow 1]\nvalue = 0.1\n", "duplicate section"),
			("[output]\ncolour = red\n", "unknown key"),
			("[output]\nrecord_every = 1\nrecord_every = 2\n", "duplicate key"),
			("[output]\njust words\n", "expected 'key = value'"),
			("[output]\nrecord_every = lots\n", "not a decimal number"),
			("[output]\nrecord_every = 2.5\n", "not an integer"),
			("[output]\nsnapshots = 1 nan\n", "not a finite number"),
		],
	)
	def test_reports_line(self, extra, message):
		text = minimal(extra=extra)
		with pytest.raises(ScenarioSyntaxError) as excinfo:
			parse_scenario(text)
		assert message in str(excinfo.value)
		assert excinfo.value.line > text.count("\n") - extra.count("\n")

	def test_bad_end(self):
		with pytest.raises(ScenarioSyntaxError):
			parse_scenario(minimal(ROAD.replace("right = outflow", "right = inflow 1")))

	def test_bad_breakpoints(self):
		with pytest.raises(ScenarioSyntaxError):
			parse_scenario(minimal(ROAD.replace("ic = 0.2", "ic = (0,0.1) (1 0.2)")))

	def test_bad_green_direction(self):
		text = get_builtin_text("traffic_lights").replace("green = 1>2 1>3", "green = 1-2 1>3")
		with pytest.raises(ScenarioSyntaxError):
			parse_scenario(text)


class TestSemanticErrors:
	def test_missing_numerics(self):
		with pytest.raises(ScenarioSemanticError):
			parse_scenario(HEADER + INFLOW + ROAD)

	def test_missing_key(self):
		with pytest.raises(ScenarioSemanticError, match="missing key 'rho_max'"):
			parse_scenario(minimal(ROAD.replace("rho_max = 1\n", "")))

	def test_unknown_diagram(self):
		with pytest.raises(ScenarioSemanticError, match="unknown diagram"):
			parse_scenario(minimal(ROAD.replace("greenshields", "daganzo")))

	def test_unknown_inflow(self):
		with pytest.raises(ScenarioSemanticError, match="unknown inflow"):
			parse_scenario(minimal(ROAD.replace("inflow 1", "inflow 4")))

	def test_inadmissible_initial_density(self):
		with pytest.raises(ScenarioSemanticError, match="not admissible"):
			parse_scenario(minimal(ROAD.replace("ic = 0.2", "ic = 1.2")))

	def test_breakpoints_must_cover_road(self):
		with pytest.raises(ScenarioSemanticError, match="breakpoints cover"):
			parse_scenario(minimal(ROAD.replace("ic = 0.2", "ic = (0,0.1) (0.5,0.2)")))

	def test_unsorted_breakpoints(self):
		with pytest.raises(ScenarioSemanticError, match="sorted"):
			parse_scenario(minimal(ROAD.replace("ic = 0.2", "ic = (0,0.1) (1,0.2) (0.5,0.3)")))

	def test_value_and_sinusoid(self):
		with pytest.raises(ScenarioSemanticError, match="both 'value'"):
			parse_scenario(minimal().replace("value = 0.3", "value = 0.3\namplitude = 0.1"))

	def test_no_element_count(self):
		with pytest.raises(ScenarioSemanticError, match="elements_per_unit"):
			parse_scenario(minimal().replace("elements_per_unit = 10\n", ""))

	def test_phase_for_unknown_junction(self):
		text = get_builtin_text("traffic_lights").replace("junction = 1", "junction = 9", 1)
		with pytest.raises(ScenarioSemanticError, match="unknown junction 9"):
			parse_scenario(text)

	def test_green_for_unknown_road(self):
		text = get_builtin_text("traffic_lights").replace("green = 1>2 1>3", "green = 1>7 1>3")
		with pytest.raises(ScenarioSemanticError):
			parse_scenario(text)

	def test_unknown_strategy(self):
		text = get_builtin_text("simple_network").replace("strategy = weighted", "strategy = godunov", 1)
		with pytest.raises(ScenarioSemanticError, match="unknown strategy"):
			parse_scenario(text)

	def test_column_sum_is_network_error(self):
		text = get_builtin_text("simple_network").replace("matrix = 0.75; 0.25", "matrix = 0.75; 0.2")
		with pytest.raises(NetworkValidationError) as excinfo:
			parse_scenario(text)
		assert excinfo.value.report["violations"][0]["code"] == "MATRIX_COLUMN_SUM"

	def test_unused_inflow_is_accepted(self):
		scenario = parse_scenario(minimal(extra="\n[inflow 2]\nvalue = 0.1\n"))
		assert set(scenario.inflows) == {1, 2}


class TestRoadParameters:
	def test_element_count(self):
		assert element_count(2.0, 150) == 300
		assert element_count(0.01, 10) == 1

	def test_homogeneous(self):
		assert element_params(get_diagram("greenshields", 1.0, 1.0), 5) is None

	def test_end_values_and_overrides(self):
		params = element_params(get_diagram("greenshields", 0.5, 1.0), 4, end_rho_max=2.0, overrides=((1, 0.4, 0.9),))
		assert params == (
			DiagramParams(0.5, 1.5),
			DiagramParams(0.4, 0.9),
			DiagramParams(0.5, 1.0),
			DiagramParams(0.5, 1.5),
		)

	def test_override_outside_road(self):
		with pytest.raises(ScenarioSemanticError):
			parse_scenario(minimal(ROAD + "override = 10:1:1\n"))

	def test_parsed_override(self):
		scenario = parse_scenario(minimal(ROAD + "override = 0:0.5:1 9:0.5:1\n"))
		v, r = scenario.network.road(1).element_params()
		assert v[0] == 0.5
		assert v[9] == 0.5
		assert v[1] == 1.0
		assert scenario.overrides[1] == ((0, 0.5, 1.0), (9, 0.5, 1.0))


class TestInitialCondition:
	def test_constant(self):
		np.testing.assert_array_equal(InitialCondition(constant=0.4)(np.zeros(3)), [0.4, 0.4, 0.4])

	def test_breakpoints(self):
		ic = InitialCondition(breakpoints=((0.0, 1.0), (0.5, 1.0), (0.5, 0.0), (1.0, 0.0)))
		assert ic(np.array([0.25, 0.75])) == pytest.approx([1.0, 0.0])
		assert ic.value_range() == (0.0, 1.0)


class TestEmit:
	@pytest.mark.parametrize("name", ["bottleneck", "simple_network", "comparison", "traffic_lights"])
	def test_builtins_reparse_identically(self, name):
		scenario = load_scenario(name)
		text = emit_scenario(scenario)
		assert parse_scenario(text) == scenario
		assert emit_scenario(parse_scenario(text)) == text

	def test_constant_inflow_uses_value(self):
		text = emit_scenario(parse_scenario(minimal()))
		assert "value = 0.3" in text
		assert "amplitude" not in text
		assert "[output]" not in text

	def test_overrides_round_trip(self):
		scenario = parse_scenario(minimal(ROAD + "end_rho_max = 2\noverride = 3:0.5:1\n"))
		assert parse_scenario(emit_scenario(scenario)) == scenario


class TestOverrides:
	def test_remesh(self):
		scenario = with_overrides(load_scenario("simple_network"), elements_per_unit=20, tau=5e-4)
		assert [r.n_elements for r in scenario.network.roads] == [20, 20, 20]
		assert scenario.numerics.tau == 5e-4
		assert scenario.numerics.elements_per_unit == 20

	def test_remesh_keeps_end_values(self):
		scenario = with_overrides(load_scenario("traffic_lights"), elements_per_unit=50)
		road = scenario.network.road(4)
		assert road.n_elements == 20
		_, rho_max = road.element_params()
		assert rho_max[0] == pytest.approx(1.5)

	def test_maxflux_merge_without_right_of_way(self):
		with pytest.raises(NetworkValidationError) as excinfo:
			with_overrides(load_scenario("simple_network"), flux="maxflux")
		assert [v["code"] for v in excinfo.value.report["violations"]] == ["MAXFLUX_RIGHT_OF_WAY"]

	def test_maxflux_with_right_of_way(self):
		scenario = with_overrides(load_scenario("simple_network"), flux="maxflux", right_of_way=0.5)
		assert scenario.network.junction(2).strategy == FluxStrategy("maxflux", 0.5)

	def test_comparison_has_right_of_way(self):
		scenario = with_overrides(load_scenario("comparison"), flux="maxflux")
		assert scenario.network.junction(2).strategy == FluxStrategy("maxflux", 0.5)

	def test_maxflux_lights_junction(self):
		with pytest.raises(NetworkValidationError):
			with_overrides(load_scenario("traffic_lights"), flux="maxflux")

	def test_snapshots_and_output(self):
		scenario = with_overrides(load_scenario("bottleneck"), snapshots=[1.0, 2.0], output_dir="somewhere")
		assert scenario.snapshots == (1.0, 2.0)
		assert scenario.output_dir == "somewhere"

	def test_invalid_tau(self):
		with pytest.raises(ScenarioSemanticError):
			with_overrides(load_scenario("bottleneck"), tau=-1.0)

	def test_overridden_road_cannot_remesh(self):
		scenario = parse_scenario(minimal(ROAD + "override = 0:0.5:1\n"))
		with pytest.raises(ScenarioSemanticError, match="cannot re-mesh"):
			with_overrides(scenario, elements_per_unit=20)
		assert with_overrides(scenario, elements_per_unit=10).network.road(1).n_elements == 10


class TestLoadScenario:
	def test_file_path(self, tmp_path):
		path = tmp_path / "road.scn"
		path.write_text(minimal(), encoding="utf-8")
		assert load_scenario(str(path)).name == "test"

	def test_unknown_reference(self):
		with pytest.raises(ScenarioSemanticError, match="built-ins"):
			load_scenario("no_such_scenario")
