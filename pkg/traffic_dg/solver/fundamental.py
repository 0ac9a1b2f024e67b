"""
Fundamental diagrams of the LWR model.

Equilibrium velocity V_e(rho) and flow Q_e(rho) = rho * V_e(rho) for the
Greenshields (linear velocity) and Greenberg (logarithmic velocity) laws.

Every function accepts scalars or numpy arrays. The array forms take
per-element parameter arrays so a heterogeneous road is evaluated in one call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from traffic_dg.exceptions import DomainError

# relative slack on the admissible interval for round-off in point values
DOMAIN_TOL = 1e-12


class DiagramKind(Enum):
	GREENSHIELDS = "greenshields"
	GREENBERG = "greenberg"


@dataclass(frozen=True)
class DiagramParams:
	v_max: float
	rho_max: float

	def __post_init__(self):
		if not (self.v_max > 0 and math.isfinite(self.v_max)):
			raise DomainError(f"v_max must be positive, got {self.v_max}")
		if not (self.rho_max > 0 and math.isfinite(self.rho_max)):
			raise DomainError(f"rho_max must be positive, got {self.rho_max}")


@dataclass(frozen=True)
class FundamentalDiagram:
	kind: DiagramKind
	params: DiagramParams

	@property
	def v_max(self):
		return self.params.v_max

	@property
	def rho_max(self):
		return self.params.rho_max

	def with_params(self, params):
		return replace(self, params=params)

	def __str__(self):
		return f"{self.kind.value}(v_max={self.v_max:g}, rho_max={self.rho_max:g})"


# Registry of available diagram families
DIAGRAMS = {
	"greenshields": DiagramKind.GREENSHIELDS,
	"greenberg": DiagramKind.GREENBERG,
}


def get_diagram(name, v_max, rho_max):
	"""
	Build a diagram by registry name.

	Args:
		name: key of DIAGRAMS
		v_max: maximal velocity
		rho_max: maximal (jam) density
	Returns:
		FundamentalDiagram
	"""
	kind = DIAGRAMS.get(str(name).strip().lower())
	if kind is None:
		raise KeyError(f"unknown fundamental diagram '{name}', available: {', '.join(DIAGRAMS)}")
	return FundamentalDiagram(kind, DiagramParams(float(v_max), float(rho_max)))


def get_available_diagrams():
	return list(DIAGRAMS.keys())


def _as_output(value, scalar):
	return float(value) if scalar else value


def _check_domain(kind, rho, rho_max, allow_zero=True):
	tol = DOMAIN_TOL * rho_max
	bad = (rho < -tol) | (rho > rho_max + tol) | ~np.isfinite(rho)
	if not allow_zero:
		bad = bad | (rho <= 0)
	if np.any(bad):
		offending = np.asarray(rho)[bad] if np.ndim(rho) else rho
		limit = np.asarray(rho_max)[bad] if np.ndim(rho_max) else rho_max
		raise DomainError(
			f"density outside the admissible range of {kind.value}: "
			f"rho={np.ravel(offending)[0]!r}, rho_max={np.ravel(limit)[0]!r}"
			+ ("" if allow_zero else " (rho must be > 0)")
		)


def velocity_values(kind, rho, v_max, rho_max):
	"""Vectorized V_e with explicit parameter arrays."""
	rho = np.asarray(rho, dtype=float)
	_check_domain(kind, rho, rho_max, allow_zero=kind is not DiagramKind.GREENBERG)
	if kind is DiagramKind.GREENSHIELDS:
		return v_max * (1.0 - rho / rho_max)
	return v_max * np.log(rho_max / rho)


def flux_values(kind, rho, v_max, rho_max):
	"""
	Vectorized Q_e with explicit parameter arrays.
	Greenberg Q_e is extended by 0 at rho = 0.
	"""
	rho = np.asarray(rho, dtype=float)
	_check_domain(kind, rho, rho_max)
	if kind is DiagramKind.GREENSHIELDS:
		return v_max * rho * (1.0 - rho / rho_max)
	with np.errstate(divide="ignore", invalid="ignore"):
		q = v_max * rho * np.log(rho_max / rho)
	return np.where(rho > 0.0, q, 0.0)


def flux_derivative(kind, rho, v_max, rho_max, check=True):
	"""
	Vectorized dQ_e/drho with explicit parameter arrays.

	Args:
		check: validate rho against [0, rho_max]; off when the derivative of one
			road's law is sampled at a neighbouring road's density
	"""
	rho = np.asarray(rho, dtype=float)
	if check:
		_check_domain(kind, rho, rho_max, allow_zero=kind is not DiagramKind.GREENBERG)
	if kind is DiagramKind.GREENSHIELDS:
		return v_max * (1.0 - 2.0 * rho / rho_max)
	with np.errstate(divide="ignore", invalid="ignore"):
		return v_max * (np.log(rho_max / rho) - 1.0)


def v_e(d: FundamentalDiagram, rho):
	"""
	Equilibrium mean velocity.

	Args:
		d: fundamental diagram
		rho: density in [0, rho_max] (> 0 for Greenberg)
	Returns:
		velocity, float for scalar input
	"""
	out = velocity_values(d.kind, rho, d.v_max, d.rho_max)
	return _as_output(out, np.ndim(rho) == 0)


def q_e(d: FundamentalDiagram, rho):
	"""Equilibrium flow Q_e(rho) = rho * V_e(rho)."""
	out = flux_values(d.kind, rho, d.v_max, d.rho_max)
	return _as_output(out, np.ndim(rho) == 0)


def q_e_prime(d: FundamentalDiagram, rho):
	"""Analytic derivative of q_e; the characteristic speed."""
	out = flux_derivative(d.kind, rho, d.v_max, d.rho_max)
	return _as_output(out, np.ndim(rho) == 0)


def critical_density(d: FundamentalDiagram):
	"""Density at which q_e attains its maximum."""
	if d.kind is DiagramKind.GREENSHIELDS:
		return d.rho_max / 2.0
	return d.rho_max / math.e


def q_max(d: FundamentalDiagram):
	"""Maximal equilibrium flow (road capacity)."""
	return q_e(d, critical_density(d))


def max_wave_speed(d: FundamentalDiagram):
	"""
	Supremum of |q_e'| over the admissible interval.
	Infinite for Greenberg, whose characteristic speed blows up at rho -> 0.
	"""
	if d.kind is DiagramKind.GREENSHIELDS:
		return d.v_max
	return math.inf


def critical_values(kind, rho_max):
	"""Vectorized critical density: rho_max / 2 (Greenshields), rho_max / e (Greenberg)."""
	rho_max = np.asarray(rho_max, dtype=float)
	if kind is DiagramKind.GREENSHIELDS:
		return rho_max / 2.0
	return rho_max / math.e


def demand_values(kind, rho, v_max, rho_max):
	"""
	Vectorized sending function: Q_e(rho) up to the critical density, capacity above it.
	"""
	rho = np.asarray(rho, dtype=float)
	sigma = critical_values(kind, rho_max)
	q = flux_values(kind, rho, v_max, rho_max)
	cap = flux_values(kind, sigma, v_max, rho_max)
	return np.where(rho <= sigma, q, cap)


def supply_values(kind, rho, v_max, rho_max):
	"""
	Vectorized receiving function: capacity up to the critical density, Q_e(rho) above it.
	"""
	rho = np.asarray(rho, dtype=float)
	sigma = critical_values(kind, rho_max)
	q = flux_values(kind, rho, v_max, rho_max)
	cap = flux_values(kind, sigma, v_max, rho_max)
	return np.where(rho <= sigma, cap, q)
