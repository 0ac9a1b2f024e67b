"""
Time stepping of the coupled network.

Explicit Euler on the DG semi-discretization of every road. Each step
exchanges fluxes at junctions and artificial boundaries, then limits and
clamps the new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from traffic_dg.exceptions import ClampAbort, JunctionFluxError
from traffic_dg.solver import dg_core
from traffic_dg.solver.fundamental import max_wave_speed, q_e
from traffic_dg.solver.junctions import JunctionState, get_handler
from traffic_dg.solver.network import InflowEnd, JunctionEnd, Network, effective_matrix
from traffic_dg.utils import logger

# snapshot requests within this many steps of a step time count as reached
STEP_EPS = 1e-9


@dataclass(frozen=True)
class BoundaryDatum:
	"""Inflow density amplitude * sin(2 pi t / period + phase) + offset."""

	id: int
	offset: float
	amplitude: float = 0.0
	period: float = 1.0
	phase: float = 0.0

	def value(self, t):
		if self.amplitude == 0.0:
			return self.offset
		return self.amplitude * math.sin(2.0 * math.pi * t / self.period + self.phase) + self.offset

	@property
	def is_constant(self):
		return self.amplitude == 0.0


@dataclass(frozen=True)
class NumericsConfig:
	tau: float
	t_end: float
	degree: int = 1
	tvb_m: float = 0.0
	elements_per_unit: float | None = None
	# overrides every junction's own strategy when set
	flux: str | None = None
	right_of_way: float | None = None
	max_clamp_events: int | None = None  # falls back to the run configuration

	def __post_init__(self):
		if not self.tau > 0:
			raise ValueError(f"tau must be positive, got {self.tau}")
		if not self.t_end > 0:
			raise ValueError(f"t_end must be positive, got {self.t_end}")
		if self.degree < 0:
			raise ValueError(f"degree must be >= 0, got {self.degree}")


@dataclass
class SimState:
	t: float
	fields: dict
	inflow: float = 0.0  # cumulative boundary inflow
	outflow: float = 0.0  # cumulative boundary outflow
	events: list = field(default_factory=list)
	step_index: int = 0
	# junction id -> record of the last completed step
	junctions: dict = field(default_factory=dict)


@dataclass(frozen=True)
class JunctionRecord:
	time: float
	alpha: np.ndarray
	state: JunctionState
	incoming: np.ndarray
	outgoing: np.ndarray
	directional: np.ndarray


def cfl_advisory(net: Network, cfg: NumericsConfig):
	"""
	Advisory stable time step h_min / ((2p + 1) max |q_e'|).

	Greenberg roads have no finite max |q_e'| and are left out; the advisory is
	inf when no road bounds it. Logs a warning when cfg.tau exceeds it.
	"""
	advisory = math.inf
	unbounded = []
	for road in net.roads:
		h = road.length / road.n_elements
		speed = max(max_wave_speed(road.element_diagram(k)) for k in range(road.n_elements))
		if math.isinf(speed):
			unbounded.append(road.id)
			continue
		advisory = min(advisory, h / ((2 * cfg.degree + 1) * speed))
	if unbounded:
		logger("simulation").info(f"No CFL bound for greenberg roads {unbounded}; advisory covers the others")
	if cfg.tau > advisory:
		logger("simulation").warning(
			f"tau={cfg.tau:g} exceeds the advisory CFL bound {advisory:.4g}; the run may be unstable"
		)
	return advisory


def effective_strategy(junction, cfg: NumericsConfig):
	"""Junction strategy after applying the run-wide flux and right-of-way overrides."""
	strategy = junction.strategy
	if cfg.flux is not None:
		strategy = replace(strategy, kind=cfg.flux)
	if cfg.right_of_way is not None:
		strategy = replace(strategy, right_of_way=cfg.right_of_way)
	return strategy


class Simulator:
	"""
	Owns all per-run precomputation: meshes, handlers, boundary roles.
	"""

	def __init__(self, net: Network, cfg: NumericsConfig, inflows=None, roundoff_tol=1e-13):
		self.net = net
		self.cfg = cfg
		self.inflows = dict(inflows or {})
		self.roundoff_tol = roundoff_tol
		self.meshes = {road.id: dg_core.Mesh.from_road(road) for road in net.roads}
		self.first_diagram = {road.id: road.element_diagram(0) for road in net.roads}
		self.last_diagram = {road.id: road.element_diagram(-1) for road in net.roads}
		self.handlers = {}
		for junction in net.junctions:
			strategy = effective_strategy(junction, cfg)
			handler = get_handler(strategy)
			if handler is None:
				raise JunctionFluxError(f"unknown flux strategy '{strategy.kind}' at junction {junction.id}")
			self.handlers[junction.id] = handler

		for road in net.roads:
			if isinstance(road.left, InflowEnd) and road.left.datum_id not in self.inflows:
				raise KeyError(f"road {road.id} needs inflow datum {road.left.datum_id}")

	def initial_state(self, initial):
		"""
		Project initial densities.

		Args:
			initial: dict road id -> callable of position
		"""
		fields = {}
		for road in self.net.roads:
			mesh = self.meshes[road.id]
			projected = dg_core.project_initial(mesh, self.cfg.degree, initial[road.id])
			limited = dg_core.minmod_limit(projected, mesh, self.cfg.tvb_m, **self._ghosts(road, 0.0))
			fields[road.id], events = dg_core.clamp_admissible(
				limited, mesh, time=0.0, roundoff_tol=self.roundoff_tol
			)
			if any(e["kind"] == dg_core.MASS_VIOLATION for e in events):
				raise ValueError(f"initial condition of road {road.id} leaves [0, rho_max]")
		return SimState(t=0.0, fields=fields)

	def _ghosts(self, road, t):
		if isinstance(road.left, InflowEnd):
			return {"left_ghost": self.inflows[road.left.datum_id].value(t)}
		return {}

	def junction_state(self, junction, traces):
		return JunctionState(
			incoming=np.array([traces[rid][1] for rid in junction.incoming]),
			outgoing=np.array([traces[rid][0] for rid in junction.outgoing]),
			incoming_diagrams=tuple(self.last_diagram[rid] for rid in junction.incoming),
			outgoing_diagrams=tuple(self.first_diagram[rid] for rid in junction.outgoing),
		)

	def boundary_fluxes(self, state: SimState):
		"""
		Numerical fluxes at both ends of every road at time state.t.

		Returns:
			(left fluxes, right fluxes, junction records, inflow total, outflow total)
		"""
		t = state.t
		traces = {rid: dg_core.road_end_traces(f) for rid, f in state.fields.items()}
		left_flux = {}
		right_flux = {}
		records = {}

		for junction in self.net.junctions:
			alpha = effective_matrix(junction, t)
			jstate = self.junction_state(junction, traces)
			fluxes = self.handlers[junction.id].compute(jstate, alpha)
			for i, rid in enumerate(junction.incoming):
				right_flux[rid] = float(fluxes.incoming[i])
			for j, rid in enumerate(junction.outgoing):
				left_flux[rid] = float(fluxes.outgoing[j])
			records[junction.id] = JunctionRecord(
				t, alpha, jstate, fluxes.incoming, fluxes.outgoing, fluxes.directional
			)

		inflow = 0.0
		outflow = 0.0
		for road in self.net.roads:
			left_trace, right_trace = traces[road.id]
			if isinstance(road.left, InflowEnd):
				diagram = self.first_diagram[road.id]
				rho_d = self.inflows[road.left.datum_id].value(t)
				left_flux[road.id] = dg_core.coupling_flux(diagram, diagram, rho_d, left_trace)
				inflow += left_flux[road.id]
			if not isinstance(road.right, JunctionEnd):
				right_flux[road.id] = q_e(self.last_diagram[road.id], right_trace)
				outflow += right_flux[road.id]
		return left_flux, right_flux, records, inflow, outflow

	def step(self, state: SimState):
		"""
		Advance one explicit Euler step of size tau.

		Returns:
			new SimState; clamp events of this step are appended to its event list
		"""
		tau = self.cfg.tau
		left_flux, right_flux, records, inflow, outflow = self.boundary_fluxes(state)
		t_next = (state.step_index + 1) * tau

		fields = {}
		events = list(state.events)
		for road in self.net.roads:
			mesh = self.meshes[road.id]
			current = state.fields[road.id]
			rhs = dg_core.road_rhs(current, mesh, left_flux[road.id], right_flux[road.id])
			updated = dg_core.DGField(current.degree, current.coefficients + tau * rhs)
			limited = dg_core.minmod_limit(updated, mesh, self.cfg.tvb_m, **self._ghosts(road, state.t))
			fields[road.id], new_events = dg_core.clamp_admissible(
				limited, mesh, time=t_next, roundoff_tol=self.roundoff_tol
			)
			events.extend(new_events)

		return SimState(
			t=t_next,
			fields=fields,
			inflow=state.inflow + tau * inflow,
			outflow=state.outflow + tau * outflow,
			events=events,
			step_index=state.step_index + 1,
			junctions=records,
		)

	def total_mass(self, state: SimState):
		return sum(dg_core.total_mass(state.fields[r.id], self.meshes[r.id]) for r in self.net.roads)

	def junction_errors(self, state: SimState):
		"""
		Distribution error E_j of every junction at state.t.

		For maxflux junctions the error is H_j - sum_i alpha_ji H_i, zero up to round-off.
		"""
		traces = {rid: dg_core.road_end_traces(f) for rid, f in state.fields.items()}
		errors = {}
		for junction in self.net.junctions:
			alpha = effective_matrix(junction, state.t)
			jstate = self.junction_state(junction, traces)
			errors[junction.id] = self.handlers[junction.id].distribution_error(jstate, alpha)
		return errors


def step(state: SimState, net: Network, cfg: NumericsConfig, inflows=None):
	"""One explicit Euler step of the network scheme (see Simulator.step)."""
	return Simulator(net, cfg, inflows).step(state)


@dataclass(frozen=True)
class SnapshotRecord:
	time: float
	road: int
	x: np.ndarray
	rho: np.ndarray
	means: np.ndarray


@dataclass
class JunctionSeries:
	"""Per-step junction fluxes and traces of one junction."""

	junction: int
	incoming_roads: tuple
	outgoing_roads: tuple
	times: np.ndarray
	incoming: np.ndarray  # (steps, n)
	outgoing: np.ndarray  # (steps, m)
	directional: np.ndarray  # (steps, m, n)
	incoming_traces: np.ndarray
	outgoing_traces: np.ndarray

	@classmethod
	def allocate(cls, junction, steps):
		m, n = junction.shape
		return cls(
			junction.id,
			tuple(junction.incoming),
			tuple(junction.outgoing),
			np.zeros(steps),
			np.zeros((steps, n)),
			np.zeros((steps, m)),
			np.zeros((steps, m, n)),
			np.zeros((steps, n)),
			np.zeros((steps, m)),
		)

	def store(self, k, record: JunctionRecord):
		self.times[k] = record.time
		self.incoming[k] = record.incoming
		self.outgoing[k] = record.outgoing
		self.directional[k] = record.directional
		self.incoming_traces[k] = record.state.incoming
		self.outgoing_traces[k] = record.state.outgoing

	def total_flux(self):
		return self.incoming.sum(axis=1)


@dataclass
class RunResult:
	name: str
	snapshots: list
	# per-step mass ledger, entry 0 is the initial state
	times: np.ndarray
	total_mass: np.ndarray
	boundary_in: np.ndarray
	boundary_out: np.ndarray
	junctions: dict
	# (time, junction, outgoing road, E_j) at snapshot times
	distribution_errors: list
	diagnostics: dict
	final_state: SimState


def _snapshot(sim: Simulator, state: SimState, points_per_element):
	records = []
	for road in sim.net.roads:
		mesh = sim.meshes[road.id]
		f = state.fields[road.id]
		x, rho = dg_core.sample(f, mesh, points_per_element)
		records.append(SnapshotRecord(state.t, road.id, x, rho, f.means.copy()))
	return records


def _step_count(cfg: NumericsConfig):
	return max(1, math.ceil(cfg.t_end / cfg.tau - STEP_EPS))


def run(scenario, conf=None):
	"""
	Run a scenario to its end time.

	Args:
		scenario: validated Scenario
		conf: run configuration (see traffic_dg.config), optional
	Returns:
		RunResult
	"""
	from traffic_dg.config import get_conf

	conf = conf or get_conf()
	cfg = scenario.numerics
	net = scenario.network
	sim = Simulator(net, cfg, scenario.inflows, roundoff_tol=conf["roundoff_tol"])
	advisory = cfl_advisory(net, cfg)
	max_events = cfg.max_clamp_events if cfg.max_clamp_events is not None else conf["max_clamp_events"]

	steps = _step_count(cfg)
	logger("simulation").info(
		f"Running {scenario.name}: {len(net.roads)} roads, {len(net.junctions)} junctions, "
		f"{steps} steps of tau={cfg.tau:g}, p={cfg.degree}"
	)

	state = sim.initial_state(scenario.initial)
	times = np.zeros(steps + 1)
	mass = np.zeros(steps + 1)
	b_in = np.zeros(steps + 1)
	b_out = np.zeros(steps + 1)
	mass[0] = sim.total_mass(state)
	series = {j.id: JunctionSeries.allocate(j, steps) for j in net.junctions}

	pending = sorted(set(scenario.snapshots))
	snapshots = []
	errors = []

	def take_snapshots(current):
		while pending and pending[0] <= current.t + STEP_EPS * cfg.tau:
			pending.pop(0)
			snapshots.extend(_snapshot(sim, current, conf["points_per_element"]))
			for jid, e in sim.junction_errors(current).items():
				outgoing = net.junction(jid).outgoing
				errors.extend((current.t, jid, outgoing[j], float(e[j])) for j in range(len(outgoing)))

	take_snapshots(state)
	violations = 0
	for k in range(steps):
		seen = len(state.events)
		state = sim.step(state)
		for jid, record in state.junctions.items():
			series[jid].store(k, record)
		times[k + 1] = state.t
		mass[k + 1] = sim.total_mass(state)
		b_in[k + 1] = state.inflow
		b_out[k + 1] = state.outflow
		new_violations = sum(1 for e in state.events[seen:] if e["kind"] == dg_core.MASS_VIOLATION)
		if new_violations:
			violations += new_violations
			if violations > max_events:
				logger("simulation").error(
					f"Aborting {scenario.name} at t={state.t:g}: {violations} clamp mass violations"
				)
				raise ClampAbort([e for e in state.events if e["kind"] == dg_core.MASS_VIOLATION])
		take_snapshots(state)

	for t_req in pending:
		logger("simulation").warning(f"Snapshot time {t_req:g} lies beyond t_end={cfg.t_end:g}; skipped")

	event_mass = sum(e["mass_change"] for e in state.events)
	residual = (mass[-1] - mass[0]) - (b_in[-1] - b_out[-1])
	diagnostics = {
		"steps": steps,
		"cfl_advisory": advisory,
		"conservation_residual": residual,
		"clamp_mass_change": event_mass,
		"clamp_events": violations,
		"roundoff_snaps": sum(1 for e in state.events if e["kind"] == dg_core.ROUNDOFF),
	}
	logger("simulation").info(
		f"Finished {scenario.name} at t={state.t:g}: mass {mass[0]:.12g} -> {mass[-1]:.12g}, "
		f"conservation residual {residual:.3e}"
	)
	return RunResult(
		name=scenario.name,
		snapshots=snapshots,
		times=times,
		total_mass=mass,
		boundary_in=b_in,
		boundary_out=b_out,
		junctions=series,
		distribution_errors=errors,
		diagnostics=diagnostics,
		final_state=state,
	)
