"""
Road network topology.

Roads are directed intervals [a, b]. Each road end is attached to a junction
or to an artificial boundary (inflow on the left, outflow on the right).
Junctions carry a traffic distribution matrix A (rows: outgoing roads,
columns: incoming roads), an optional traffic light schedule and the flux
strategy used to couple the roads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from traffic_dg.solver.fundamental import DiagramParams, FundamentalDiagram

COLUMN_SUM_TOL = 1e-12
MAXFLUX_MAX_SIDE = 2

WEIGHTED = "weighted"
MAXFLUX = "maxflux"


@dataclass(frozen=True)
class JunctionEnd:
	junction_id: int


@dataclass(frozen=True)
class InflowEnd:
	datum_id: int


@dataclass(frozen=True)
class OutflowEnd:
	pass


@dataclass(frozen=True)
class Road:
	id: int
	a: float
	b: float
	n_elements: int
	diagram: FundamentalDiagram
	left: JunctionEnd | InflowEnd
	right: JunctionEnd | OutflowEnd
	per_element_params: tuple[DiagramParams, ...] | None = None

	@property
	def length(self):
		return self.b - self.a

	def element_params(self):
		"""
		Per-element (v_max, rho_max) arrays of length n_elements.
		Falls back to the road's default diagram where no override is given.
		"""
		if self.per_element_params is None:
			v = np.full(self.n_elements, self.diagram.v_max)
			r = np.full(self.n_elements, self.diagram.rho_max)
			return v, r
		v = np.array([p.v_max for p in self.per_element_params], dtype=float)
		r = np.array([p.rho_max for p in self.per_element_params], dtype=float)
		return v, r

	def element_diagram(self, k):
		"""Diagram of element k (negative indices count from the right end)."""
		if self.per_element_params is None:
			return self.diagram
		return self.diagram.with_params(self.per_element_params[k])


@dataclass(frozen=True)
class DistributionMatrix:
	"""alpha[j][i]: share of traffic from incoming road i heading to outgoing road j."""

	rows: tuple[tuple[float, ...], ...]

	@classmethod
	def from_array(cls, entries):
		arr = np.atleast_2d(np.asarray(entries, dtype=float))
		return cls(tuple(tuple(float(x) for x in row) for row in arr))

	def as_array(self):
		return np.array(self.rows, dtype=float)

	@property
	def shape(self):
		return (len(self.rows), len(self.rows[0]) if self.rows else 0)


@dataclass(frozen=True)
class Phase:
	"""Permission mask (same shape as A, entries 0/1) held green for `duration`."""

	mask: tuple[tuple[int, ...], ...]
	duration: float

	def as_array(self):
		return np.array(self.mask, dtype=float)


@dataclass(frozen=True)
class LightSchedule:
	phases: tuple[Phase, ...]
	all_red: float = 0.0

	@property
	def period(self):
		return sum(p.duration for p in self.phases) + len(self.phases) * self.all_red

	def mask_at(self, t, shape):
		"""
		Mask active at time t; all zeros inside an all-red gap.

		Args:
			t: time >= 0
			shape: (m, n) of the junction matrix
		Returns:
			numpy array of 0/1 entries
		"""
		k = self.phase_index_at(t)
		return np.zeros(shape) if k is None else self.phases[k].as_array()

	def phase_index_at(self, t):
		"""
		Index of the green phase active at t, or None inside an all-red gap.

		The position in the cycle is fmod(t, period), which is exact; t and
		t + period give the same phase whenever t + period is itself exact in
		floating point (e.g. dyadic durations). Otherwise a time within round-off
		of a phase edge may fall on either side of it.
		"""
		s = math.fmod(t, self.period)
		for k, phase in enumerate(self.phases):
			if s < phase.duration:
				return k
			s -= phase.duration
			if s < self.all_red:
				return None
			s -= self.all_red
		# only reachable through round-off at the very end of the period
		return None


@dataclass(frozen=True)
class FluxStrategy:
	kind: str = WEIGHTED
	right_of_way: float | None = None

	def __str__(self):
		if self.kind == MAXFLUX and self.right_of_way is not None:
			return f"{self.kind}(q={self.right_of_way:g})"
		return self.kind


@dataclass(frozen=True)
class Junction:
	id: int
	incoming: tuple[int, ...]
	outgoing: tuple[int, ...]
	matrix: DistributionMatrix
	lights: LightSchedule | None = None
	strategy: FluxStrategy = field(default_factory=FluxStrategy)

	@property
	def shape(self):
		return (len(self.outgoing), len(self.incoming))


@dataclass(frozen=True)
class Network:
	roads: tuple[Road, ...]
	junctions: tuple[Junction, ...] = ()

	def road(self, road_id):
		for road in self.roads:
			if road.id == road_id:
				return road
		raise KeyError(f"no road with id {road_id}")

	def junction(self, junction_id):
		for junction in self.junctions:
			if junction.id == junction_id:
				return junction
		raise KeyError(f"no junction with id {junction_id}")

	@property
	def is_closed(self):
		"""True when no road has an artificial boundary."""
		return all(isinstance(r.left, JunctionEnd) and isinstance(r.right, JunctionEnd) for r in self.roads)


def _violation(code, location, message):
	return {"code": code, "location": location, "message": message}


def _validate_road(road):
	violations = []
	loc = f"road {road.id}"
	if not road.a < road.b:
		violations.append(_violation("ROAD_INTERVAL", loc, f"a={road.a} must be < b={road.b}"))
	if road.n_elements < 1:
		violations.append(_violation("ROAD_ELEMENTS", loc, f"n_elements={road.n_elements} must be >= 1"))
	if road.per_element_params is not None and len(road.per_element_params) != road.n_elements:
		violations.append(
			_violation(
				"ROAD_ELEMENT_PARAMS",
				loc,
				f"{len(road.per_element_params)} per-element parameter sets for {road.n_elements} elements",
			)
		)
	if not isinstance(road.left, JunctionEnd | InflowEnd):
		violations.append(_violation("ROAD_LEFT_ROLE", loc, "left end must be a junction or an inflow boundary"))
	if not isinstance(road.right, JunctionEnd | OutflowEnd):
		violations.append(
			_violation("ROAD_RIGHT_ROLE", loc, "right end must be a junction or an outflow boundary")
		)
	return violations


def _validate_matrix(junction):
	violations = []
	loc = f"junction {junction.id}"
	alpha = junction.matrix.as_array()
	m, n = junction.shape
	if alpha.shape != (m, n):
		violations.append(
			_violation(
				"MATRIX_SHAPE",
				loc,
				f"matrix is {alpha.shape[0]}x{alpha.shape[1]}, expected {m}x{n} (outgoing x incoming)",
			)
		)
		return violations
	if np.any(alpha < 0.0) or np.any(alpha > 1.0):
		violations.append(_violation("MATRIX_RANGE", loc, "entries must lie in [0, 1]"))
	sums = alpha.sum(axis=0)
	for i, s in enumerate(sums):
		if abs(s - 1.0) > COLUMN_SUM_TOL:
			violations.append(
				_violation(
					"MATRIX_COLUMN_SUM",
					loc,
					f"column of incoming road {junction.incoming[i]} sums to {s!r}, must be 1",
				)
			)
	return violations


def _validate_lights(junction):
	violations = []
	lights = junction.lights
	if lights is None:
		return violations
	loc = f"junction {junction.id}"
	if not lights.phases:
		violations.append(_violation("LIGHTS_EMPTY", loc, "light schedule needs at least one phase"))
	if lights.all_red < 0:
		violations.append(_violation("LIGHTS_ALL_RED", loc, f"all-red gap {lights.all_red} must be >= 0"))
	for k, phase in enumerate(lights.phases, start=1):
		mask = phase.as_array()
		if phase.duration <= 0:
			violations.append(_violation("PHASE_DURATION", f"{loc} phase {k}", "duration must be > 0"))
		if mask.shape != junction.shape:
			violations.append(
				_violation("PHASE_SHAPE", f"{loc} phase {k}", f"mask shape {mask.shape} != {junction.shape}")
			)
		elif not np.all((mask == 0) | (mask == 1)):
			violations.append(_violation("PHASE_MASK", f"{loc} phase {k}", "mask entries must be 0 or 1"))
	return violations


def _validate_maxflux(junction):
	violations = []
	strategy = junction.strategy
	if strategy.kind != MAXFLUX:
		return violations
	loc = f"junction {junction.id}"
	m, n = junction.shape
	if n > MAXFLUX_MAX_SIDE or m > MAXFLUX_MAX_SIDE:
		violations.append(
			_violation(
				"MAXFLUX_SHAPE",
				loc,
				f"maxflux supports junctions up to 2x2, got {n} incoming x {m} outgoing",
			)
		)
		return violations
	q = strategy.right_of_way
	if n == 2 and (q is None or not 0.0 < q < 1.0):
		violations.append(
			_violation(
				"MAXFLUX_RIGHT_OF_WAY",
				loc,
				"two incoming roads under maxflux need a right of way 0 < q < 1; "
				f"matrix {junction.matrix.rows} does not satisfy condition (C) on its own",
			)
		)
	alpha = junction.matrix.as_array()
	if n == 1 and alpha.shape == (m, n) and np.any(alpha[:, 0] <= 0.0):
		violations.append(
			_violation(
				"MAXFLUX_ZERO_ALPHA",
				loc,
				"maxflux with one incoming road needs strictly positive distribution coefficients",
			)
		)
	if junction.lights is not None:
		for k, phase in enumerate(junction.lights.phases, start=1):
			mask = phase.as_array()
			if mask.shape != junction.shape:
				continue
			for i in range(n):
				column = mask[:, i]
				if not (np.all(column == 1) or np.all(column == 0)):
					violations.append(
						_violation(
							"MAXFLUX_PARTIAL_GREEN",
							f"{loc} phase {k}",
							f"incoming road {junction.incoming[i]} has a partial green; "
							"maxflux admits only full green or full red per incoming road",
						)
					)
	return violations


def validate(net: Network):
	"""
	Check the structural conditions on a network.

	Args:
		net: network description
	Returns:
		{"status": "success"} or {"status": "error", "violations": [...]}
	"""
	violations = []

	road_ids = [r.id for r in net.roads]
	junction_ids = [j.id for j in net.junctions]
	for rid in sorted({r for r in road_ids if road_ids.count(r) > 1}):
		violations.append(_violation("DUPLICATE_ROAD", f"road {rid}", "road id used more than once"))
	for jid in sorted({j for j in junction_ids if junction_ids.count(j) > 1}):
		violations.append(_violation("DUPLICATE_JUNCTION", f"junction {jid}", "junction id used more than once"))
	if not net.roads:
		violations.append(_violation("EMPTY_NETWORK", "network", "network has no roads"))

	for road in net.roads:
		violations.extend(_validate_road(road))

	known_roads = set(road_ids)
	incoming_of = {}
	outgoing_of = {}
	for junction in net.junctions:
		loc = f"junction {junction.id}"
		if not junction.incoming:
			violations.append(_violation("JUNCTION_NO_INCOMING", loc, "junction needs at least one incoming road"))
		if not junction.outgoing:
			violations.append(_violation("JUNCTION_NO_OUTGOING", loc, "junction needs at least one outgoing road"))
		for rid in junction.incoming:
			if rid not in known_roads:
				violations.append(_violation("UNKNOWN_ROAD", loc, f"incoming road {rid} does not exist"))
				continue
			incoming_of.setdefault(rid, []).append(junction.id)
		for rid in junction.outgoing:
			if rid not in known_roads:
				violations.append(_violation("UNKNOWN_ROAD", loc, f"outgoing road {rid} does not exist"))
				continue
			outgoing_of.setdefault(rid, []).append(junction.id)
		if junction.incoming and junction.outgoing:
			violations.extend(_validate_matrix(junction))
			violations.extend(_validate_lights(junction))
			violations.extend(_validate_maxflux(junction))

	for rid, owners in incoming_of.items():
		if len(owners) > 1:
			violations.append(
				_violation("ROAD_MULTI_INCOMING", f"road {rid}", f"incoming for junctions {owners}")
			)
	for rid, owners in outgoing_of.items():
		if len(owners) > 1:
			violations.append(
				_violation("ROAD_MULTI_OUTGOING", f"road {rid}", f"outgoing for junctions {owners}")
			)

	# road end roles must agree with the junction lists
	for road in net.roads:
		loc = f"road {road.id}"
		right_owner = incoming_of.get(road.id, [])
		left_owner = outgoing_of.get(road.id, [])
		if isinstance(road.right, JunctionEnd):
			if road.right.junction_id not in right_owner:
				violations.append(
					_violation(
						"ROAD_END_MISMATCH",
						loc,
						f"right end names junction {road.right.junction_id} which does not list it as incoming",
					)
				)
		elif right_owner:
			violations.append(
				_violation("ROAD_END_MISMATCH", loc, f"incoming for junction {right_owner[0]} but right end is outflow")
			)
		if isinstance(road.left, JunctionEnd):
			if road.left.junction_id not in left_owner:
				violations.append(
					_violation(
						"ROAD_END_MISMATCH",
						loc,
						f"left end names junction {road.left.junction_id} which does not list it as outgoing",
					)
				)
		elif left_owner:
			violations.append(
				_violation("ROAD_END_MISMATCH", loc, f"outgoing for junction {left_owner[0]} but left end is inflow")
			)

	if violations:
		return {"status": "error", "violations": violations}
	return {"status": "success"}


def effective_matrix(j: Junction, t):
	"""
	Distribution matrix in force at time t.
	Red directions are zeroed; surviving columns are not renormalized.
	"""
	alpha = j.matrix.as_array()
	if j.lights is None:
		return alpha
	return j.lights.mask_at(t, alpha.shape) * alpha


def green_mask(shape, incoming, outgoing, directions):
	"""
	Build a 0/1 permission mask from (incoming road, outgoing road) pairs.

	Args:
		shape: (m, n)
		incoming: incoming road ids (column order)
		outgoing: outgoing road ids (row order)
		directions: iterable of (from_road, to_road)
	"""
	mask = np.zeros(shape, dtype=int)
	for src, dst in directions:
		if src not in incoming or dst not in outgoing:
			raise KeyError(f"direction {src}>{dst} does not pass through this junction")
		mask[outgoing.index(dst), incoming.index(src)] = 1
	return tuple(tuple(int(x) for x in row) for row in mask)
