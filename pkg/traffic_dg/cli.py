"""
Command-line entry point: traffic-dg run | list-scenarios | validate | describe.

Exit codes: 0 success, 1 invalid scenario, 2 run aborted, 64 usage error.
"""

import argparse
import os
import sys

from traffic_dg import __version__
from traffic_dg.config import get_conf
from traffic_dg.exceptions import (
	ClampAbort,
	DomainError,
	JunctionFluxError,
	NetworkValidationError,
	OutputError,
	ScenarioSemanticError,
	ScenarioSyntaxError,
)
from traffic_dg.scenarios import BUILTIN_SCENARIOS, load_scenario, with_overrides
from traffic_dg.scenarios.writer import OutputPlan, write_outputs
from traffic_dg.solver import simulation
from traffic_dg.solver.junctions import get_available_strategies
from traffic_dg.solver.network import InflowEnd, OutflowEnd
from traffic_dg.utils import logger, setup_logging

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_ABORT = 2
EXIT_USAGE = 64

SCENARIO_ERRORS = (ScenarioSyntaxError, ScenarioSemanticError, NetworkValidationError)


class CLIParser(argparse.ArgumentParser):
	"""Usage errors print the help text and exit with EXIT_USAGE."""

	def error(self, message):
		self.print_help(sys.stderr)
		self.exit(EXIT_USAGE, f"\n{self.prog}: error: {message}\n")


def _time_list(text):
	try:
		times = [float(t) for t in text.split(",") if t.strip()]
	except ValueError:
		raise argparse.ArgumentTypeError(f"'{text}' is not a comma-separated list of times")
	if any(t < 0 for t in times):
		raise argparse.ArgumentTypeError("snapshot times must be >= 0")
	return times


def _positive(text):
	try:
		value = float(text)
	except ValueError:
		raise argparse.ArgumentTypeError(f"'{text}' is not a number")
	if not value > 0:
		raise argparse.ArgumentTypeError(f"{text} must be positive")
	return value


def build_parser():
	parser = CLIParser(prog="traffic-dg", description="DG traffic flow simulation on road networks")
	parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
	parser.add_argument("--config", help="JSON file overriding run configuration defaults")
	sub = parser.add_subparsers(dest="command", required=True)

	run = sub.add_parser("run", help="run a scenario and write its outputs")
	run.add_argument("scenario", help="scenario file or built-in scenario name")
	run.add_argument("--tau", type=_positive, help="time step")
	run.add_argument("--elements-per-unit", type=_positive, help="elements per unit road length")
	run.add_argument("--t-end", type=_positive, help="final time")
	run.add_argument("--flux", choices=get_available_strategies(), help="junction coupling for every junction")
	run.add_argument("--right-of-way", type=float, help="right of way q of the first incoming road (maxflux)")
	run.add_argument("--tvb-m", type=float, help="TVB limiter constant M")
	run.add_argument("--out", help="output directory")
	run.add_argument("--snapshots", type=_time_list, help="comma-separated snapshot times")
	run.add_argument("--plot", action="store_true", help="also write PNG density plots")

	sub.add_parser("list-scenarios", help="list built-in scenarios")

	validate = sub.add_parser("validate", help="parse and validate a scenario without running it")
	validate.add_argument("scenario")

	describe = sub.add_parser("describe", help="summarize a validated scenario")
	describe.add_argument("scenario")
	return parser


def _report_invalid(error):
	print(f"invalid scenario: {error}", file=sys.stderr)
	return EXIT_INVALID


def cmd_list_scenarios(args, conf):
	for name, (_, summary) in BUILTIN_SCENARIOS.items():
		print(f"{name:16s} {summary}")
	return EXIT_OK


def cmd_validate(args, conf):
	try:
		scenario = load_scenario(args.scenario)
	except SCENARIO_ERRORS as e:
		return _report_invalid(e)
	print(f"{scenario.name}: ok ({len(scenario.network.roads)} roads, {len(scenario.network.junctions)} junctions)")
	return EXIT_OK


def describe_lines(scenario):
	"""Human-readable summary of a scenario."""
	net = scenario.network
	num = scenario.numerics
	lines = [
		f"scenario {scenario.name}",
		f"  numerics: tau={num.tau:g} t_end={num.t_end:g} p={num.degree} tvb_m={num.tvb_m:g}",
	]
	for road in net.roads:
		left = f"inflow {road.left.datum_id}" if isinstance(road.left, InflowEnd) else f"J{road.left.junction_id}"
		right = "outflow" if isinstance(road.right, OutflowEnd) else f"J{road.right.junction_id}"
		extra = " (per-element parameters)" if road.per_element_params is not None else ""
		lines.append(
			f"  road {road.id}: [{road.a:g}, {road.b:g}] N={road.n_elements} {road.diagram} {left} -> {right}{extra}"
		)
	for junction in net.junctions:
		m, n = junction.shape
		lights = f", lights period {junction.lights.period:g}" if junction.lights is not None else ""
		lines.append(
			f"  junction {junction.id}: {n} in x {m} out, incoming {list(junction.incoming)}, "
			f"outgoing {list(junction.outgoing)}, {junction.strategy}{lights}"
		)
	lines.append(f"  closed network: {net.is_closed}")
	lines.append(f"  CFL advisory: tau <= {simulation.cfl_advisory(net, num):.4g}")
	return lines


def cmd_describe(args, conf):
	try:
		scenario = load_scenario(args.scenario)
	except SCENARIO_ERRORS as e:
		return _report_invalid(e)
	print("\n".join(describe_lines(scenario)))
	return EXIT_OK


def cmd_run(args, conf):
	try:
		scenario = with_overrides(
			load_scenario(args.scenario),
			tau=args.tau,
			elements_per_unit=args.elements_per_unit,
			t_end=args.t_end,
			flux=args.flux,
			right_of_way=args.right_of_way,
			tvb_m=args.tvb_m,
			output_dir=args.out,
			snapshots=args.snapshots,
		)
	except SCENARIO_ERRORS as e:
		return _report_invalid(e)

	try:
		result = simulation.run(scenario, conf)
	except ClampAbort as e:
		logger().error(f"Run aborted: {e}")
		print(f"run aborted: {e}", file=sys.stderr)
		return EXIT_ABORT
	except (DomainError, JunctionFluxError) as e:
		logger().exception("Run failed")
		print(f"run failed: {e}", file=sys.stderr)
		return EXIT_ABORT

	plan = OutputPlan(
		directory=scenario.output_dir or os.path.join("output", scenario.name),
		record_every=scenario.record_every or conf["record_every"],
		plot=args.plot or bool(conf["plot"]),
	)
	try:
		written = write_outputs(result, plan)
	except OutputError as e:
		print(str(e), file=sys.stderr)
		return EXIT_ABORT

	diag = result.diagnostics
	print(
		f"{scenario.name}: {diag['steps']} steps to t={result.final_state.t:g}, "
		f"conservation residual {diag['conservation_residual']:.3e}, "
		f"{len(written['files'])} files in {written['directory']}"
	)
	return EXIT_OK


COMMANDS = {
	"run": cmd_run,
	"list-scenarios": cmd_list_scenarios,
	"validate": cmd_validate,
	"describe": cmd_describe,
}


def main(argv=None):
	args = build_parser().parse_args(argv)
	try:
		conf = get_conf(args.config)
	except ScenarioSemanticError as e:
		print(str(e), file=sys.stderr)
		return EXIT_INVALID
	setup_logging(conf["log_level"])
	return COMMANDS[args.command](args, conf)


if __name__ == "__main__":
	sys.exit(main())
