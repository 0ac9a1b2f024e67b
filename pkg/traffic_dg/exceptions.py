"""
Exception hierarchy for traffic_dg.
The CLI maps these onto exit codes.
"""


class TrafficDGError(Exception):
	"""Base class for all errors raised by traffic_dg."""


class DomainError(TrafficDGError, ValueError):
	"""A density lies outside the admissible interval of a fundamental diagram."""


class NetworkValidationError(TrafficDGError):
	"""
	Raised when a network fails validation.

	Args:
		report: the dict returned by network.validate()
	"""

	def __init__(self, report):
		self.report = report
		lines = [f"{v['code']} at {v['location']}: {v['message']}" for v in report.get("violations", [])]
		super().__init__("Network validation failed:\n" + "\n".join(lines))


class JunctionFluxError(TrafficDGError):
	"""Unsupported junction shape, missing right of way or malformed matrix."""


class ScenarioSyntaxError(TrafficDGError):
	def __init__(self, line, message):
		self.line = line
		super().__init__(f"line {line}: {message}")


class ScenarioSemanticError(TrafficDGError):
	"""A scenario parses but violates an invariant (unknown id, inadmissible data)."""


class ClampAbort(TrafficDGError):
	"""
	An element mean left the admissible interval more often than allowed.
	The time step is too large or the mesh too coarse.
	"""

	def __init__(self, events, message=None):
		self.events = events
		last = events[-1] if events else {}
		super().__init__(
			message
			or f"element mean left admissible interval on road {last.get('road')}, "
			f"element {last.get('element')} at t={last.get('time')}: decrease tau or refine the mesh"
		)


class OutputError(TrafficDGError):
	def __init__(self, path, reason):
		self.path = path
		super().__init__(f"cannot write {path}: {reason}")
