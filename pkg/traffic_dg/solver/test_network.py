"""Tests for network topology, validation and traffic-light masking."""

import numpy as np
import pytest

from traffic_dg.solver.fundamental import DiagramParams, get_diagram
from traffic_dg.solver.network import (
	MAXFLUX,
	DistributionMatrix,
	FluxStrategy,
	InflowEnd,
	Junction,
	JunctionEnd,
	LightSchedule,
	Network,
	OutflowEnd,
	Phase,
	Road,
	effective_matrix,
	green_mask,
	validate,
)

GS = get_diagram("greenshields", 1.0, 1.0)

LIGHTS_MATRIX = [
	[0.0, 0.75, 0.4, 0.45],
	[0.8, 0.0, 0.5, 0.4],
	[0.1, 0.15, 0.0, 0.15],
	[0.1, 0.1, 0.1, 0.0],
]


def simple_network(strategy=None, a2=None):
	"""Three unit roads: junction 1 splits road 1 into 2 and 3, junction 2 merges them back."""
	strategy = strategy or FluxStrategy()
	roads = (
		Road(1, 0.0, 1.0, 10, GS, JunctionEnd(2), JunctionEnd(1)),
		Road(2, 0.0, 1.0, 10, GS, JunctionEnd(1), JunctionEnd(2)),
		Road(3, 0.0, 1.0, 10, GS, JunctionEnd(1), JunctionEnd(2)),
	)
	junctions = (
		Junction(1, (1,), (2, 3), DistributionMatrix.from_array([[0.75], [0.25]]), strategy=strategy),
		Junction(2, (2, 3), (1,), DistributionMatrix.from_array(a2 or [[1.0, 1.0]]), strategy=strategy),
	)
	return Network(roads, junctions)


def lights_junction():
	ids = (1, 2, 3, 4)
	phases = (
		Phase(green_mask((4, 4), ids, ids, [(1, 2), (1, 3), (2, 1), (2, 4)]), 1.0),
		Phase(green_mask((4, 4), ids, ids, [(1, 4), (2, 3), (3, 2), (4, 1)]), 0.5),
		Phase(green_mask((4, 4), ids, ids, [(3, 1), (3, 2), (3, 4), (4, 1), (4, 2), (4, 3)]), 0.5),
	)
	return Junction(1, ids, ids, DistributionMatrix.from_array(LIGHTS_MATRIX), LightSchedule(phases, 0.05))


def codes(report):
	return [v["code"] for v in report.get("violations", [])]


class TestValidate:
	def test_simple_network_is_valid(self):
		assert validate(simple_network()) == {"status": "success"}

	def test_single_open_road_is_valid(self):
		net = Network((Road(1, 0.0, 1.0, 5, GS, InflowEnd(1), OutflowEnd()),))
		assert validate(net)["status"] == "success"
		assert not net.is_closed

	def test_lights_loop_network_is_valid(self):
		roads = tuple(Road(i, 0.0, 0.5, 5, GS, JunctionEnd(1), JunctionEnd(1)) for i in (1, 2, 3, 4))
		net = Network(roads, (lights_junction(),))
		assert validate(net)["status"] == "success"
		assert net.is_closed

	def test_column_sum_violation(self):
		report = validate(simple_network(a2=[[1.0, 0.9]]))
		assert report["status"] == "error"
		assert codes(report) == ["MATRIX_COLUMN_SUM"]
		assert report["violations"][0]["location"] == "junction 2"

	def test_road_interval_and_elements(self):
		net = Network((Road(1, 1.0, 1.0, 0, GS, InflowEnd(1), OutflowEnd()),))
		assert codes(validate(net)) == ["ROAD_INTERVAL", "ROAD_ELEMENTS"]

	def test_per_element_params_length(self):
		road = Road(1, 0.0, 1.0, 3, GS, InflowEnd(1), OutflowEnd(), per_element_params=(DiagramParams(1, 1),))
		assert codes(validate(Network((road,)))) == ["ROAD_ELEMENT_PARAMS"]

	def test_road_incoming_for_two_junctions(self):
		net = simple_network()
		extra = Junction(3, (1,), (2,), DistributionMatrix.from_array([[1.0]]))
		report = validate(Network(net.roads, (*net.junctions, extra)))
		assert "ROAD_MULTI_INCOMING" in codes(report)
		assert "ROAD_MULTI_OUTGOING" in codes(report)

	def test_unknown_road_and_end_mismatch(self):
		roads = (Road(1, 0.0, 1.0, 4, GS, InflowEnd(1), OutflowEnd()),)
		junction = Junction(1, (1,), (7,), DistributionMatrix.from_array([[1.0]]))
		found = codes(validate(Network(roads, (junction,))))
		assert "UNKNOWN_ROAD" in found
		assert "ROAD_END_MISMATCH" in found

	def test_empty_junction_sides(self):
		roads = (Road(1, 0.0, 1.0, 4, GS, InflowEnd(1), OutflowEnd()),)
		junction = Junction(1, (), (), DistributionMatrix(((),)))
		found = codes(validate(Network(roads, (junction,))))
		assert found == ["JUNCTION_NO_INCOMING", "JUNCTION_NO_OUTGOING"]

	def test_matrix_shape(self):
		net = simple_network(a2=[[1.0], [0.0]])
		assert codes(validate(net)) == ["MATRIX_SHAPE"]

	def test_maxflux_merge_needs_right_of_way(self):
		report = validate(simple_network(strategy=FluxStrategy(MAXFLUX)))
		assert codes(report) == ["MAXFLUX_RIGHT_OF_WAY"]
		assert "condition (C)" in report["violations"][0]["message"]

	def test_maxflux_with_right_of_way_is_valid(self):
		assert validate(simple_network(strategy=FluxStrategy(MAXFLUX, 0.5)))["status"] == "success"

	def test_maxflux_rejects_large_junction(self):
		junction = lights_junction()
		roads = tuple(Road(i, 0.0, 0.5, 5, GS, JunctionEnd(1), JunctionEnd(1)) for i in (1, 2, 3, 4))
		junction = Junction(1, junction.incoming, junction.outgoing, junction.matrix, strategy=FluxStrategy(MAXFLUX))
		assert codes(validate(Network(roads, (junction,)))) == ["MAXFLUX_SHAPE"]

	def test_maxflux_rejects_partial_green(self):
		net = simple_network(strategy=FluxStrategy(MAXFLUX, 0.5))
		split = net.junction(1)
		lights = LightSchedule((Phase(((1,), (0,)), 1.0), Phase(((0,), (0,)), 1.0)))
		lit = Junction(1, split.incoming, split.outgoing, split.matrix, lights, split.strategy)
		report = validate(Network(net.roads, (lit, net.junction(2))))
		assert codes(report) == ["MAXFLUX_PARTIAL_GREEN"]
		assert report["violations"][0]["location"] == "junction 1 phase 1"

	def test_light_phase_checks(self):
		junction = lights_junction()
		bad = LightSchedule((Phase(((1, 0), (0, 1)), 0.0),), all_red=-1.0)
		roads = tuple(Road(i, 0.0, 0.5, 5, GS, JunctionEnd(1), JunctionEnd(1)) for i in (1, 2, 3, 4))
		net = Network(roads, (Junction(1, junction.incoming, junction.outgoing, junction.matrix, bad),))
		assert codes(validate(net)) == ["LIGHTS_ALL_RED", "PHASE_DURATION", "PHASE_SHAPE"]


class TestEffectiveMatrix:
	def test_no_lights_returns_matrix(self):
		junction = simple_network().junction(1)
		for t in (0.0, 0.37, 12.5):
			np.testing.assert_array_equal(effective_matrix(junction, t), [[0.75], [0.25]])

	def test_all_red_gap_is_zero(self):
		assert not np.any(effective_matrix(lights_junction(), 1.02))

	def test_first_phase(self):
		expected = np.array(LIGHTS_MATRIX)
		expected[:, 2:] = 0.0
		expected[3, 0] = 0.0
		expected[2, 1] = 0.0
		np.testing.assert_array_equal(effective_matrix(lights_junction(), 0.5), expected)

	def test_phase_sequence(self):
		lights = lights_junction().lights
		assert lights.period == pytest.approx(2.15)
		assert lights.phase_index_at(0.2) == 0
		assert lights.phase_index_at(1.03) is None
		assert lights.phase_index_at(1.3) == 1
		assert lights.phase_index_at(1.58) is None
		assert lights.phase_index_at(1.8) == 2
		assert lights.phase_index_at(2.12) is None
		assert lights.phase_index_at(2.15 + 0.2) == 0

	def test_periodic(self):
		junction = lights_junction()
		period = junction.lights.period
		for t in np.linspace(0.013, 2.09, 31):
			np.testing.assert_array_equal(effective_matrix(junction, t), effective_matrix(junction, t + period))

	def test_periodic_at_phase_edges(self):
		lights = LightSchedule(lights_junction().lights.phases, 0.125)
		assert lights.period == 2.375
		# dyadic times and durations: t + period is exact, so phase edges repeat exactly
		for k in range(2 * 152 + 1):
			t = k / 64
			assert lights.phase_index_at(t) == lights.phase_index_at(t + lights.period)
			np.testing.assert_array_equal(lights.mask_at(t, (4, 4)), lights.mask_at(t + lights.period, (4, 4)))
		assert lights.phase_index_at(1.0) is None
		assert lights.phase_index_at(1.0 + lights.period) is None
		assert lights.phase_index_at(1.125) == 1
		assert lights.phase_index_at(1.125 + lights.period) == 1

	def test_masking_never_increases_entries(self):
		junction = lights_junction()
		alpha = junction.matrix.as_array()
		for t in np.linspace(0.0, 4.3, 200):
			eff = effective_matrix(junction, t)
			assert np.all(eff >= 0.0)
			assert np.all(eff <= alpha)

	def test_columns_not_renormalized(self):
		eff = effective_matrix(lights_junction(), 0.5)
		assert eff[:, 0].sum() == pytest.approx(0.9)


class TestGreenMask:
	def test_mask_layout(self):
		mask = green_mask((2, 1), (1,), (2, 3), [(1, 3)])
		assert mask == ((0,), (1,))

	def test_unknown_direction(self):
		with pytest.raises(KeyError):
			green_mask((2, 1), (1,), (2, 3), [(2, 3)])
