"""
Scenario files: parsing, canonical emission and run-time overrides.

A scenario file is line oriented. `#` starts a comment. Top-level keys
`format = 1` and `name = ...` come first, followed by sections

	[numerics]  [road N]  [inflow D]  [junction J]  [phase K]  [output]

each holding `key = value` lines. Numbers are decimal literals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from decimal import Decimal, InvalidOperation

import numpy as np

from traffic_dg.exceptions import DomainError, NetworkValidationError, ScenarioSemanticError, ScenarioSyntaxError
from traffic_dg.solver.fundamental import DiagramParams, get_available_diagrams, get_diagram
from traffic_dg.solver.junctions import get_available_strategies
from traffic_dg.solver.network import (
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
	green_mask,
	validate,
)
from traffic_dg.solver.simulation import BoundaryDatum, NumericsConfig, effective_strategy
from traffic_dg.utils import logger

FORMAT_VERSION = 1

_SECTION_RE = re.compile(r"^\[\s*([a-z_]+)(?:\s+(\S+))?\s*\]$")
_KEY_RE = re.compile(r"^([a-z_]+)\s*=\s*(.*)$")
_POINT_RE = re.compile(r"\(\s*([^,()\s]+)\s*,\s*([^,()\s]+)\s*\)")
_POINTS_RE = re.compile(r"^(\s*\(\s*[^,()\s]+\s*,\s*[^,()\s]+\s*\)\s*)+$")
_DIRECTION_RE = re.compile(r"^(\d+)>(\d+)$")

# section kind -> (numbered, allowed keys)
SECTIONS = {
	"numerics": (
		False,
		{
			"tau",
			"t_end",
			"degree",
			"elements_per_unit",
			"tvb_m",
			"flux",
			"right_of_way",
			"max_clamp_events",
		},
	),
	"road": (
		True,
		{"a", "b", "diagram", "v_max", "rho_max", "left", "right", "ic", "elements", "end_rho_max", "override"},
	),
	"inflow": (True, {"value", "amplitude", "period", "phase", "offset"}),
	"junction": (True, {"incoming", "outgoing", "matrix", "strategy", "right_of_way", "all_red"}),
	"phase": (True, {"junction", "duration", "green"}),
	"output": (False, {"snapshots", "directory", "record_every"}),
}
TOP_LEVEL_KEYS = {"format", "name"}


@dataclass(frozen=True)
class InitialCondition:
	"""Constant density or a piecewise-linear profile through (x, rho) breakpoints."""

	constant: float | None = None
	breakpoints: tuple[tuple[float, float], ...] | None = None

	def __call__(self, x):
		x = np.asarray(x, dtype=float)
		if self.breakpoints is None:
			return np.full_like(x, self.constant)
		xp, fp = zip(*self.breakpoints, strict=True)
		return np.interp(x, xp, fp)

	def value_range(self):
		if self.breakpoints is None:
			return self.constant, self.constant
		values = [v for _, v in self.breakpoints]
		return min(values), max(values)


@dataclass(frozen=True)
class Scenario:
	name: str
	network: Network
	initial: dict
	inflows: dict
	numerics: NumericsConfig
	snapshots: tuple[float, ...] = ()
	output_dir: str | None = None
	record_every: int | None = None
	# road id -> maximal density at the road's junction ends
	end_rho_max: dict = field(default_factory=dict)
	# road id -> ((element, v_max, rho_max), ...)
	overrides: dict = field(default_factory=dict)


@dataclass
class _Section:
	kind: str
	id: int | None
	line: int
	entries: dict = field(default_factory=dict)  # key -> (value, line)

	@property
	def label(self):
		return self.kind if self.id is None else f"{self.kind} {self.id}"

	def has(self, key):
		return key in self.entries

	def raw(self, key):
		if key not in self.entries:
			raise ScenarioSemanticError(f"line {self.line}: [{self.label}] is missing key '{key}'")
		return self.entries[key]


def _number(text, line):
	try:
		value = Decimal(text)
	except InvalidOperation:
		raise ScenarioSyntaxError(line, f"'{text}' is not a decimal number")
	if not value.is_finite():
		raise ScenarioSyntaxError(line, f"'{text}' is not a finite number")
	return float(value)


def _integer(text, line):
	value = _number(text, line)
	if value != int(value):
		raise ScenarioSyntaxError(line, f"'{text}' is not an integer")
	return int(value)


def _numbers(text, line):
	return [_number(tok, line) for tok in text.split()]


def _integers(text, line):
	return [_integer(tok, line) for tok in text.split()]


def _tokenize(text):
	"""
	Split scenario text into top-level entries and sections.

	Returns:
		(top-level entries dict, list of _Section)
	"""
	top = {}
	sections = []
	current = None
	seen = set()
	for lineno, raw in enumerate(text.splitlines(), start=1):
		line = raw.split("#", 1)[0].strip()
		if not line:
			continue

		header = _SECTION_RE.match(line)
		if header:
			kind, ident = header.group(1), header.group(2)
			if kind not in SECTIONS:
				raise ScenarioSyntaxError(lineno, f"unknown section [{kind}]")
			numbered = SECTIONS[kind][0]
			if numbered and ident is None:
				raise ScenarioSyntaxError(lineno, f"section [{kind}] needs an integer id")
			if not numbered and ident is not None:
				raise ScenarioSyntaxError(lineno, f"section [{kind}] takes no id")
			ident = _integer(ident, lineno) if numbered else None
			if (kind, ident) in seen:
				raise ScenarioSyntaxError(lineno, f"duplicate section [{line[1:-1].strip()}]")
			seen.add((kind, ident))
			current = _Section(kind, ident, lineno)
			sections.append(current)
			continue

		entry = _KEY_RE.match(line)
		if not entry:
			raise ScenarioSyntaxError(lineno, f"expected 'key = value' or a [section] header, got '{line}'")
		key, value = entry.group(1), entry.group(2).strip()
		if current is None:
			target, allowed, label = top, TOP_LEVEL_KEYS, "top level"
		else:
			target, allowed, label = current.entries, SECTIONS[current.kind][1], f"[{current.label}]"
		if key not in allowed:
			raise ScenarioSyntaxError(lineno, f"unknown key '{key}' in {label}")
		if key in target:
			raise ScenarioSyntaxError(lineno, f"duplicate key '{key}' in {label}")
		target[key] = (value, lineno)
	return top, sections


class ScenarioParser:
	"""Builds a validated Scenario from tokenized sections."""

	def __init__(self, text):
		self.text = text

	def parse(self):
		if not self.text.strip():
			raise ScenarioSyntaxError(1, "empty scenario file")
		top, sections = _tokenize(self.text)
		if "format" not in top:
			raise ScenarioSyntaxError(1, "missing 'format = 1' declaration")
		version, line = top["format"]
		if _integer(version, line) != FORMAT_VERSION:
			raise ScenarioSyntaxError(line, f"unsupported format {version}, expected {FORMAT_VERSION}")
		name = top["name"][0] if "name" in top else "unnamed"

		by_kind = {kind: [s for s in sections if s.kind == kind] for kind in SECTIONS}
		numerics = self._parse_numerics(by_kind["numerics"])
		inflows = {s.id: self._parse_inflow(s) for s in by_kind["inflow"]}

		roads = []
		initial = {}
		end_rho_max = {}
		overrides = {}
		for section in by_kind["road"]:
			road, ic, end_value, road_overrides = self._parse_road(section, numerics, inflows)
			roads.append(road)
			initial[road.id] = ic
			if end_value is not None:
				end_rho_max[road.id] = end_value
			if road_overrides:
				overrides[road.id] = road_overrides

		phases = {}
		for section in sorted(by_kind["phase"], key=lambda s: s.id):
			value, line = section.raw("junction")
			phases.setdefault(_integer(value, line), []).append(section)
		junction_ids = {s.id for s in by_kind["junction"]}
		for jid, owned in phases.items():
			if jid not in junction_ids:
				raise ScenarioSemanticError(f"line {owned[0].line}: [phase {owned[0].id}] names unknown junction {jid}")
		junctions = [self._parse_junction(s, phases.get(s.id, []), numerics) for s in by_kind["junction"]]

		snapshots, output_dir, record_every = self._parse_output(by_kind["output"])
		network = Network(tuple(roads), tuple(junctions))
		scenario = Scenario(
			name=name,
			network=network,
			initial=initial,
			inflows=inflows,
			numerics=numerics,
			snapshots=snapshots,
			output_dir=output_dir,
			record_every=record_every,
			end_rho_max=end_rho_max,
			overrides=overrides,
		)
		return check_scenario(scenario)

	def _parse_numerics(self, sections):
		if not sections:
			raise ScenarioSemanticError("scenario has no [numerics] section")
		s = sections[0]
		kwargs = {}
		for key in ("tau", "t_end", "tvb_m", "elements_per_unit", "right_of_way"):
			if s.has(key):
				kwargs[key] = _number(*s.entries[key])
		for key in ("degree", "max_clamp_events"):
			if s.has(key):
				kwargs[key] = _integer(*s.entries[key])
		if s.has("flux"):
			kwargs["flux"] = s.entries["flux"][0]
		for key in ("tau", "t_end"):
			s.raw(key)
		try:
			return NumericsConfig(**kwargs)
		except ValueError as e:
			raise ScenarioSemanticError(f"line {s.line}: [numerics] {e}")

	def _parse_inflow(self, s):
		if s.has("value"):
			sinusoid = sorted(k for k in s.entries if k != "value")
			if sinusoid:
				raise ScenarioSemanticError(
					f"line {s.line}: [{s.label}] gives both 'value' and {', '.join(sinusoid)}"
				)
			return BoundaryDatum(s.id, offset=_number(*s.entries["value"]))
		values = {key: _number(*s.entries[key]) for key in ("amplitude", "period", "phase", "offset") if s.has(key)}
		if not values:
			raise ScenarioSemanticError(f"line {s.line}: [{s.label}] needs 'value' or a sinusoid")
		if values.get("period", 1.0) <= 0:
			raise ScenarioSemanticError(f"line {s.line}: [{s.label}] period must be > 0")
		values.setdefault("offset", 0.0)
		return BoundaryDatum(s.id, **values)

	def _parse_end(self, s, key, inflows):
		value, line = s.raw(key)
		tokens = value.split()
		if key == "left" and len(tokens) == 2 and tokens[0] == "inflow":
			datum = _integer(tokens[1], line)
			if datum not in inflows:
				raise ScenarioSemanticError(f"line {line}: [{s.label}] names unknown inflow {datum}")
			return InflowEnd(datum)
		if key == "right" and tokens == ["outflow"]:
			return OutflowEnd()
		if len(tokens) == 2 and tokens[0] == "junction":
			return JunctionEnd(_integer(tokens[1], line))
		allowed = "'junction J' or 'inflow D'" if key == "left" else "'junction J' or 'outflow'"
		raise ScenarioSyntaxError(line, f"{key} end must be {allowed}, got '{value}'")

	def _parse_ic(self, s):
		value, line = s.raw("ic")
		if value.startswith("("):
			if not _POINTS_RE.match(value):
				raise ScenarioSyntaxError(line, f"malformed breakpoint list '{value}'")
			points = tuple((_number(x, line), _number(v, line)) for x, v in _POINT_RE.findall(value))
			xs = [x for x, _ in points]
			if any(x1 > x2 for x1, x2 in zip(xs, xs[1:], strict=False)):
				raise ScenarioSemanticError(f"line {line}: [{s.label}] breakpoints must be sorted by position")
			return InitialCondition(breakpoints=points)
		return InitialCondition(constant=_number(value, line))

	def _parse_road(self, s, numerics, inflows):
		a = _number(*s.raw("a"))
		b = _number(*s.raw("b"))
		name, line = s.raw("diagram")
		try:
			diagram = get_diagram(name, _number(*s.raw("v_max")), _number(*s.raw("rho_max")))
		except KeyError:
			raise ScenarioSemanticError(
				f"line {line}: unknown diagram '{name}', available: {', '.join(get_available_diagrams())}"
			)
		except DomainError as e:
			raise ScenarioSemanticError(f"line {s.line}: [{s.label}] {e}")

		if s.has("elements"):
			n = _integer(*s.entries["elements"])
		elif numerics.elements_per_unit is not None:
			n = element_count(b - a, numerics.elements_per_unit)
		else:
			raise ScenarioSemanticError(
				f"line {s.line}: [{s.label}] needs 'elements' or [numerics] elements_per_unit"
			)

		end_value = _number(*s.entries["end_rho_max"]) if s.has("end_rho_max") else None
		road_overrides = ()
		if s.has("override"):
			value, line = s.entries["override"]
			parsed = []
			for token in value.split():
				parts = token.split(":")
				if len(parts) != 3:
					raise ScenarioSyntaxError(line, f"override '{token}' must be element:v_max:rho_max")
				parsed.append((_integer(parts[0], line), _number(parts[1], line), _number(parts[2], line)))
			road_overrides = tuple(parsed)

		try:
			params = element_params(diagram, n, end_value, road_overrides)
		except (IndexError, DomainError) as e:
			raise ScenarioSemanticError(f"line {s.line}: [{s.label}] {e}")
		road = Road(
			id=s.id,
			a=a,
			b=b,
			n_elements=n,
			diagram=diagram,
			left=self._parse_end(s, "left", inflows),
			right=self._parse_end(s, "right", inflows),
			per_element_params=params,
		)
		return road, self._parse_ic(s), end_value, road_overrides

	def _parse_junction(self, s, phase_sections, numerics):
		incoming = tuple(_integers(*s.raw("incoming")))
		outgoing = tuple(_integers(*s.raw("outgoing")))
		value, line = s.raw("matrix")
		rows = [_numbers(row, line) for row in value.split(";")]
		if any(len(row) != len(rows[0]) for row in rows) or not rows[0]:
			raise ScenarioSyntaxError(line, "matrix rows must be non-empty and of equal length")
		matrix = DistributionMatrix.from_array(rows)

		kind = s.entries["strategy"][0] if s.has("strategy") else FluxStrategy().kind
		q = _number(*s.entries["right_of_way"]) if s.has("right_of_way") else None
		junction = Junction(s.id, incoming, outgoing, matrix, strategy=FluxStrategy(kind, q))
		junction = replace(junction, strategy=effective_strategy(junction, numerics))

		if not phase_sections:
			if s.has("all_red"):
				raise ScenarioSemanticError(f"line {s.line}: [{s.label}] gives all_red but has no phases")
			return junction

		phases = []
		for p in phase_sections:
			value, line = p.raw("green")
			directions = []
			for token in value.split():
				match = _DIRECTION_RE.match(token)
				if not match:
					raise ScenarioSyntaxError(line, f"green direction '{token}' must read FROM>TO")
				directions.append((int(match.group(1)), int(match.group(2))))
			try:
				mask = green_mask(matrix.shape, incoming, outgoing, directions)
			except KeyError as e:
				raise ScenarioSemanticError(f"line {line}: [{p.label}] {e.args[0]}")
			phases.append(Phase(mask, _number(*p.raw("duration"))))
		all_red = _number(*s.entries["all_red"]) if s.has("all_red") else 0.0
		return replace(junction, lights=LightSchedule(tuple(phases), all_red))

	def _parse_output(self, sections):
		if not sections:
			return (), None, None
		s = sections[0]
		snapshots = tuple(_numbers(*s.entries["snapshots"])) if s.has("snapshots") else ()
		if any(t < 0 for t in snapshots):
			raise ScenarioSemanticError(f"line {s.line}: [output] snapshot times must be >= 0")
		directory = s.entries["directory"][0] if s.has("directory") else None
		record_every = _integer(*s.entries["record_every"]) if s.has("record_every") else None
		if record_every is not None and record_every < 1:
			raise ScenarioSemanticError(f"line {s.line}: [output] record_every must be >= 1")
		return snapshots, directory, record_every


def element_count(length, elements_per_unit):
	return max(1, round(length * elements_per_unit))


def element_params(diagram, n, end_rho_max=None, overrides=()):
	"""
	Per-element diagram parameters of a road, or None for a homogeneous road.

	end_rho_max: the first and last elements carry the mean of the linear
	interpolation between this value at the road end and the road's rho_max.
	overrides: (element, v_max, rho_max) triples applied last.
	"""
	if end_rho_max is None and not overrides:
		return None
	params = [diagram.params] * n
	if end_rho_max is not None:
		end = DiagramParams(diagram.v_max, 0.5 * (end_rho_max + diagram.rho_max))
		params[0] = end
		params[-1] = end
	for k, v_max, rho_max in overrides:
		if not 0 <= k < n:
			raise IndexError(f"override element {k} outside 0..{n - 1}")
		params[k] = DiagramParams(v_max, rho_max)
	return tuple(params)


def check_scenario(scenario: Scenario):
	"""
	Validate the network and the data attached to it.

	Raises:
		NetworkValidationError: structural network violations
		ScenarioSemanticError: inadmissible initial data or dangling references
	"""
	strategies = get_available_strategies()
	for junction in scenario.network.junctions:
		if junction.strategy.kind not in strategies:
			raise ScenarioSemanticError(
				f"junction {junction.id}: unknown strategy '{junction.strategy.kind}', "
				f"available: {', '.join(strategies)}"
			)
	report = validate(scenario.network)
	if report["status"] != "success":
		raise NetworkValidationError(report)

	for road in scenario.network.roads:
		ic = scenario.initial.get(road.id)
		if ic is None:
			raise ScenarioSemanticError(f"road {road.id} has no initial condition")
		_, rho_max = road.element_params()
		low, high = ic.value_range()
		if low < 0 or high > float(rho_max.min()):
			raise ScenarioSemanticError(
				f"road {road.id}: initial density range [{low}, {high}] is not admissible in [0, {rho_max.min()}]"
			)
		if ic.breakpoints is not None:
			first, last = ic.breakpoints[0][0], ic.breakpoints[-1][0]
			if first > road.a or last < road.b:
				raise ScenarioSemanticError(
					f"road {road.id}: breakpoints cover [{first}, {last}], road is [{road.a}, {road.b}]"
				)

	used = {r.left.datum_id for r in scenario.network.roads if isinstance(r.left, InflowEnd)}
	for datum in sorted(set(scenario.inflows) - used):
		logger("scenarios").warning(f"{scenario.name}: inflow {datum} is not attached to any road")
	return scenario


def parse_scenario(text):
	"""
	Parse and validate a scenario.

	Args:
		text: scenario file contents
	Returns:
		Scenario
	Raises:
		ScenarioSyntaxError, ScenarioSemanticError, NetworkValidationError
	"""
	scenario = ScenarioParser(text).parse()
	logger("scenarios").info(
		f"Parsed scenario {scenario.name}: {len(scenario.network.roads)} roads, "
		f"{len(scenario.network.junctions)} junctions"
	)
	return scenario


def with_overrides(
	scenario: Scenario,
	tau=None,
	elements_per_unit=None,
	t_end=None,
	flux=None,
	right_of_way=None,
	tvb_m=None,
	output_dir=None,
	snapshots=None,
):
	"""
	Copy of a scenario with command-line overrides applied and re-validated.

	elements_per_unit re-meshes every road; roads with explicit element
	overrides must keep their element count.
	"""
	changes = {
		key: value
		for key, value in {
			"tau": tau,
			"t_end": t_end,
			"tvb_m": tvb_m,
			"elements_per_unit": elements_per_unit,
			"flux": flux,
			"right_of_way": right_of_way,
		}.items()
		if value is not None
	}
	try:
		numerics = replace(scenario.numerics, **changes)
	except ValueError as e:
		raise ScenarioSemanticError(str(e))

	roads = []
	for road in scenario.network.roads:
		if elements_per_unit is not None:
			n = element_count(road.length, elements_per_unit)
			if road.id in scenario.overrides and n != road.n_elements:
				raise ScenarioSemanticError(
					f"road {road.id} has per-element overrides for {road.n_elements} elements; "
					f"cannot re-mesh to {n}"
				)
			params = element_params(
				road.diagram, n, scenario.end_rho_max.get(road.id), scenario.overrides.get(road.id, ())
			)
			road = replace(road, n_elements=n, per_element_params=params)
		roads.append(road)
	junctions = [replace(j, strategy=effective_strategy(j, numerics)) for j in scenario.network.junctions]

	updated = replace(
		scenario,
		network=Network(tuple(roads), tuple(junctions)),
		numerics=numerics,
		output_dir=output_dir if output_dir is not None else scenario.output_dir,
		snapshots=tuple(snapshots) if snapshots is not None else scenario.snapshots,
	)
	return check_scenario(updated)


def _fmt(value):
	if isinstance(value, int):
		return str(value)
	return repr(float(value))


def _emit_ic(ic: InitialCondition):
	if ic.breakpoints is None:
		return _fmt(ic.constant)
	return " ".join(f"({_fmt(x)},{_fmt(v)})" for x, v in ic.breakpoints)


def emit_scenario(scenario: Scenario):
	"""
	Canonical text form of a scenario.

	parse_scenario(emit_scenario(s)) == s for every parsed scenario s.
	"""
	out = [f"format = {FORMAT_VERSION}", f"name = {scenario.name}", "", "[numerics]"]
	num = scenario.numerics
	out.append(f"tau = {_fmt(num.tau)}")
	out.append(f"t_end = {_fmt(num.t_end)}")
	out.append(f"degree = {num.degree}")
	out.append(f"tvb_m = {_fmt(num.tvb_m)}")
	if num.elements_per_unit is not None:
		out.append(f"elements_per_unit = {_fmt(num.elements_per_unit)}")
	if num.flux is not None:
		out.append(f"flux = {num.flux}")
	if num.right_of_way is not None:
		out.append(f"right_of_way = {_fmt(num.right_of_way)}")
	if num.max_clamp_events is not None:
		out.append(f"max_clamp_events = {num.max_clamp_events}")

	for datum_id in sorted(scenario.inflows):
		datum = scenario.inflows[datum_id]
		out += ["", f"[inflow {datum_id}]"]
		if datum.is_constant and datum.period == 1.0 and datum.phase == 0.0:
			out.append(f"value = {_fmt(datum.offset)}")
		else:
			out.append(f"amplitude = {_fmt(datum.amplitude)}")
			out.append(f"period = {_fmt(datum.period)}")
			out.append(f"phase = {_fmt(datum.phase)}")
			out.append(f"offset = {_fmt(datum.offset)}")

	for road in scenario.network.roads:
		out += ["", f"[road {road.id}]"]
		out.append(f"a = {_fmt(road.a)}")
		out.append(f"b = {_fmt(road.b)}")
		out.append(f"diagram = {road.diagram.kind.value}")
		out.append(f"v_max = {_fmt(road.diagram.v_max)}")
		out.append(f"rho_max = {_fmt(road.diagram.rho_max)}")
		out.append(f"elements = {road.n_elements}")
		if isinstance(road.left, InflowEnd):
			out.append(f"left = inflow {road.left.datum_id}")
		else:
			out.append(f"left = junction {road.left.junction_id}")
		if isinstance(road.right, OutflowEnd):
			out.append("right = outflow")
		else:
			out.append(f"right = junction {road.right.junction_id}")
		out.append(f"ic = {_emit_ic(scenario.initial[road.id])}")
		if road.id in scenario.end_rho_max:
			out.append(f"end_rho_max = {_fmt(scenario.end_rho_max[road.id])}")
		if road.id in scenario.overrides:
			items = " ".join(f"{k}:{_fmt(v)}:{_fmt(r)}" for k, v, r in scenario.overrides[road.id])
			out.append(f"override = {items}")

	phase_id = 0
	phase_lines = []
	for junction in scenario.network.junctions:
		out += ["", f"[junction {junction.id}]"]
		out.append(f"incoming = {' '.join(str(r) for r in junction.incoming)}")
		out.append(f"outgoing = {' '.join(str(r) for r in junction.outgoing)}")
		out.append("matrix = " + "; ".join(" ".join(_fmt(x) for x in row) for row in junction.matrix.rows))
		out.append(f"strategy = {junction.strategy.kind}")
		if junction.strategy.right_of_way is not None:
			out.append(f"right_of_way = {_fmt(junction.strategy.right_of_way)}")
		if junction.lights is None:
			continue
		out.append(f"all_red = {_fmt(junction.lights.all_red)}")
		for phase in junction.lights.phases:
			phase_id += 1
			directions = [
				f"{junction.incoming[i]}>{junction.outgoing[j]}"
				for i in range(len(junction.incoming))
				for j in range(len(junction.outgoing))
				if phase.mask[j][i]
			]
			phase_lines += [
				"",
				f"[phase {phase_id}]",
				f"junction = {junction.id}",
				f"duration = {_fmt(phase.duration)}",
				f"green = {' '.join(directions)}",
			]
	out += phase_lines

	output = []
	if scenario.snapshots:
		output.append(f"snapshots = {' '.join(_fmt(t) for t in scenario.snapshots)}")
	if scenario.output_dir is not None:
		output.append(f"directory = {scenario.output_dir}")
	if scenario.record_every is not None:
		output.append(f"record_every = {scenario.record_every}")
	if output:
		out += ["", "[output]", *output]
	return "\n".join(out) + "\n"
