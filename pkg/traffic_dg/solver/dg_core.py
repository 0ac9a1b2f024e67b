"""
Discontinuous Galerkin discretization of one road.

Basis: unnormalized Legendre polynomials P_l on the reference element [-1, 1],
x = x_K + xi * h_K / 2. With this basis the local mass matrix is
diag(h_K / (2l + 1)) and coefficient 0 is the element mean.

Quadrature: Gauss-Legendre with p + 1 points.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from traffic_dg.exceptions import DomainError
from traffic_dg.solver.fundamental import DiagramKind, demand_values, flux_derivative, flux_values, supply_values
from traffic_dg.utils import logger

MASS_VIOLATION = "mass_violation"
ROUNDOFF = "roundoff"


@dataclass(frozen=True)
class ReferenceBasis:
	degree: int
	points: np.ndarray  # Gauss points on [-1, 1]
	weights: np.ndarray
	vandermonde: np.ndarray  # P_l(points), (nq, p+1)
	dvandermonde: np.ndarray  # P_l'(points), (nq, p+1)
	left_signs: np.ndarray  # P_l(-1) = (-1)^l
	scale: np.ndarray  # 2l + 1, inverse of the reference mass matrix up to h/2


@lru_cache(maxsize=8)
def reference_basis(degree):
	points, weights = legendre.leggauss(degree + 1)
	vander = legendre.legvander(points, degree)
	dvander = np.zeros_like(vander)
	for l in range(1, degree + 1):
		dvander[:, l] = legendre.Legendre.basis(l).deriv()(points)
	left_signs = np.array([(-1.0) ** l for l in range(degree + 1)])
	scale = 2.0 * np.arange(degree + 1) + 1.0
	return ReferenceBasis(degree, points, weights, vander, dvander, left_signs, scale)


@dataclass(frozen=True)
class Mesh:
	"""Uniform partition of one road, with the flux law of every element."""

	road_id: int
	nodes: np.ndarray
	widths: np.ndarray
	kind: DiagramKind
	v_max: np.ndarray
	rho_max: np.ndarray

	@classmethod
	def from_road(cls, road):
		n = road.n_elements
		nodes = np.linspace(road.a, road.b, n + 1)
		widths = np.full(n, (road.b - road.a) / n)
		v_max, rho_max = road.element_params()
		return cls(road.id, nodes, widths, road.diagram.kind, v_max, rho_max)

	@classmethod
	def uniform(cls, a, b, n, diagram, road_id=0):
		nodes = np.linspace(a, b, n + 1)
		widths = np.full(n, (b - a) / n)
		return cls(
			road_id,
			nodes,
			widths,
			diagram.kind,
			np.full(n, diagram.v_max),
			np.full(n, diagram.rho_max),
		)

	@property
	def n_elements(self):
		return len(self.widths)

	@property
	def centers(self):
		return 0.5 * (self.nodes[:-1] + self.nodes[1:])

	@property
	def h_min(self):
		return float(self.widths.min())


@dataclass(frozen=True)
class DGField:
	degree: int
	coefficients: np.ndarray  # (N, p+1)

	@property
	def means(self):
		return self.coefficients[:, 0]

	def copy(self):
		return DGField(self.degree, self.coefficients.copy())


@dataclass(frozen=True)
class TraceValues:
	"""One-sided limits at the interior interfaces x_1 .. x_{N-1}."""

	left: np.ndarray  # u^(L): right end of the element on the left
	right: np.ndarray  # u^(R): left end of the element on the right


def project_initial(mesh: Mesh, p, rho0):
	"""
	L2 projection of an initial density onto the DG space.

	Args:
		mesh: road mesh
		p: polynomial degree
		rho0: callable of position; vectorized callables are used as is
	Returns:
		DGField
	"""
	basis = reference_basis(p)
	x_q = mesh.centers[:, None] + 0.5 * mesh.widths[:, None] * basis.points[None, :]
	try:
		values = np.asarray(rho0(x_q), dtype=float)
		if values.shape != x_q.shape:
			values = np.broadcast_to(values, x_q.shape).astype(float)
	except (TypeError, ValueError):
		values = np.vectorize(rho0, otypes=[float])(x_q)
	coefficients = 0.5 * (values * basis.weights) @ basis.vandermonde * basis.scale
	return DGField(p, coefficients)


def evaluate(field: DGField, k, xi):
	"""Density of element k at local coordinate xi in [-1, 1]."""
	n = field.coefficients.shape[0]
	if not 0 <= k < n:
		raise IndexError(f"element index {k} out of range for {n} elements")
	return float(legendre.legval(xi, field.coefficients[k]))


def end_values(field: DGField):
	"""Per-element values at xi = -1 and xi = +1."""
	basis = reference_basis(field.degree)
	c = field.coefficients
	return c @ basis.left_signs, c.sum(axis=1)


def interface_traces(field: DGField):
	at_left, at_right = end_values(field)
	return TraceValues(left=at_right[:-1], right=at_left[1:])


def road_end_traces(field: DGField):
	"""Trace at the road's left end a and right end b."""
	at_left, at_right = end_values(field)
	return float(at_left[0]), float(at_right[-1])


def _lf_values(kind_l, kind_r, u_l, u_r, v_l, r_l, v_r, r_r):
	"""Lax-Friedrichs flux and its dissipation alpha; alpha is inf at rho = 0 under greenberg."""
	u_l = np.asarray(u_l, dtype=float)
	u_r = np.asarray(u_r, dtype=float)
	f_l = flux_values(kind_l, u_l, v_l, r_l)
	f_r = flux_values(kind_r, u_r, v_r, r_r)
	# each law is sampled on its own admissible interval only
	mid_l = np.clip(0.5 * (u_l + u_r), 0.0, r_l)
	mid_r = np.clip(0.5 * (u_l + u_r), 0.0, r_r)
	with np.errstate(divide="ignore", invalid="ignore"):
		speeds = [
			flux_derivative(kind_l, u_l, v_l, r_l, check=False),
			flux_derivative(kind_r, u_r, v_r, r_r, check=False),
			flux_derivative(kind_l, mid_l, v_l, r_l, check=False),
			flux_derivative(kind_l, np.clip(u_r, 0.0, r_l), v_l, r_l, check=False),
			flux_derivative(kind_r, mid_r, v_r, r_r, check=False),
			flux_derivative(kind_r, np.clip(u_l, 0.0, r_r), v_r, r_r, check=False),
		]
		alpha = np.max(np.abs(np.broadcast_arrays(*speeds)), axis=0)
		flux = 0.5 * (f_l + f_r - alpha * (u_r - u_l))
	return flux, alpha


def lf_flux_values(kind_l, kind_r, u_l, u_r, v_l, r_l, v_r, r_r):
	"""
	Vectorized Lax-Friedrichs flux between two (possibly different) flux laws.

	alpha is the largest |f'| of either law sampled at u_l, u_r and their midpoint.
	"""
	flux, alpha = _lf_values(kind_l, kind_r, u_l, u_r, v_l, r_l, v_r, r_r)
	if not np.all(np.isfinite(alpha)):
		raise DomainError("unbounded characteristic speed in Lax-Friedrichs flux (rho = 0 under greenberg)")
	return flux


def lf_flux(f_l, f_r, u_l, u_r):
	"""
	Lax-Friedrichs numerical flux H(u_l, u_r).

	Args:
		f_l: FundamentalDiagram on the left of the interface
		f_r: FundamentalDiagram on the right of the interface
		u_l: left trace
		u_r: right trace
	Returns:
		flow, float for scalar traces
	"""
	out = lf_flux_values(
		f_l.kind, f_r.kind, u_l, u_r, f_l.v_max, f_l.rho_max, f_r.v_max, f_r.rho_max
	)
	if np.ndim(u_l) == 0 and np.ndim(u_r) == 0:
		return float(out)
	return out


def demand_supply_flux_values(kind_l, kind_r, u_l, u_r, v_l, r_l, v_r, r_r):
	"""Vectorized demand/supply flux min(D_l(u_l), S_r(u_r))."""
	return np.minimum(demand_values(kind_l, u_l, v_l, r_l), supply_values(kind_r, u_r, v_r, r_r))


def coupling_flux_values(kind_l, kind_r, u_l, u_r, v_l, r_l, v_r, r_r):
	"""
	Numerical flux across an interface where the flux law may jump.

	Lax-Friedrichs where both sides carry the same greenshields law. Where the
	laws differ, and for greenberg, whose |f'| is unbounded as rho -> 0, the
	demand/supply flux min(D_l(u_l), S_r(u_r)) is used; it stays within
	[0, S_r(u_r)] and equals Q_e(u) for u_l = u_r = u under one law.
	"""
	ds = demand_supply_flux_values(kind_l, kind_r, u_l, u_r, v_l, r_l, v_r, r_r)
	if kind_l is not kind_r or kind_l is DiagramKind.GREENBERG:
		return ds
	lf, _ = _lf_values(kind_l, kind_r, u_l, u_r, v_l, r_l, v_r, r_r)
	same = np.logical_and(np.equal(v_l, v_r), np.equal(r_l, r_r))
	return np.where(same, lf, ds)


def coupling_flux(f_l, f_r, u_l, u_r):
	"""
	Scalar form of coupling_flux_values for two diagrams.

	Args:
		f_l: FundamentalDiagram upstream of the interface
		f_r: FundamentalDiagram downstream of the interface
		u_l: left trace
		u_r: right trace
	"""
	out = coupling_flux_values(
		f_l.kind, f_r.kind, u_l, u_r, f_l.v_max, f_l.rho_max, f_r.v_max, f_r.rho_max
	)
	if np.ndim(u_l) == 0 and np.ndim(u_r) == 0:
		return float(out)
	return out


def interface_fluxes(field: DGField, mesh: Mesh, left_flux, right_flux):
	"""Numerical fluxes at all N + 1 element boundaries of the road."""
	traces = interface_traces(field)
	fluxes = np.empty(mesh.n_elements + 1)
	fluxes[0] = left_flux
	fluxes[-1] = right_flux
	if mesh.n_elements > 1:
		fluxes[1:-1] = coupling_flux_values(
			mesh.kind,
			mesh.kind,
			traces.left,
			traces.right,
			mesh.v_max[:-1],
			mesh.rho_max[:-1],
			mesh.v_max[1:],
			mesh.rho_max[1:],
		)
	return fluxes


def road_rhs(field: DGField, mesh: Mesh, left_flux, right_flux):
	"""
	Time derivative of the modal coefficients from the DG weak form.

	Args:
		field: current density
		mesh: road mesh
		left_flux: numerical flux entering at x = a
		right_flux: numerical flux leaving at x = b
	Returns:
		array shaped like field.coefficients
	"""
	basis = reference_basis(field.degree)
	c = field.coefficients
	u_q = c @ basis.vandermonde.T
	f_q = flux_values(mesh.kind, u_q, mesh.v_max[:, None], mesh.rho_max[:, None])
	volume = (f_q * basis.weights) @ basis.dvandermonde
	fluxes = interface_fluxes(field, mesh, left_flux, right_flux)
	boundary = fluxes[:-1, None] * basis.left_signs[None, :] - fluxes[1:, None]
	return (volume + boundary) * basis.scale[None, :] / mesh.widths[:, None]


def minmod(a, b, c):
	"""Elementwise minmod of three arrays."""
	a, b, c = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float), np.asarray(c, float))
	s = np.sign(a)
	same = (s == np.sign(b)) & (s == np.sign(c))
	return np.where(same, s * np.minimum(np.abs(a), np.minimum(np.abs(b), np.abs(c))), 0.0)


def _tvb_minmod(a, b, c, bound):
	return np.where(np.abs(a) <= bound, a, minmod(a, b, c))


def minmod_limit(field: DGField, mesh: Mesh, tvb_m=0.0, left_ghost=None, right_ghost=None):
	"""
	Modified (TVB) minmod limiter; element means are untouched.

	Args:
		field: density to limit
		mesh: road mesh
		tvb_m: TVB constant M; deviations with |dev| <= M h^2 are left alone
		left_ghost: mean of a ghost element left of x = a (inflow datum), or None
		right_ghost: mean of a ghost element right of x = b, or None
	Returns:
		limited DGField
	"""
	if field.degree == 0:
		return field
	c = field.coefficients
	means = c[:, 0]
	forward = np.empty_like(means)
	backward = np.empty_like(means)
	forward[:-1] = means[1:] - means[:-1]
	backward[1:] = forward[:-1]
	# missing neighbours contribute a zero difference
	forward[-1] = 0.0 if right_ghost is None else right_ghost - means[-1]
	backward[0] = 0.0 if left_ghost is None else means[0] - left_ghost

	bound = tvb_m * mesh.widths**2
	higher = c[:, 1:]
	dev_right = higher.sum(axis=1)
	dev_left = -(higher * (-1.0) ** np.arange(1, field.degree + 1)).sum(axis=1)
	keep = (_tvb_minmod(dev_right, forward, backward, bound) == dev_right) & (
		_tvb_minmod(dev_left, forward, backward, bound) == dev_left
	)
	if np.all(keep):
		return field

	limited = c.copy()
	change = ~keep
	limited[change, 1] = _tvb_minmod(c[change, 1], forward[change], backward[change], bound[change])
	limited[change, 2:] = 0.0
	return DGField(field.degree, limited)


def _sample_points(degree):
	basis = reference_basis(degree)
	return np.concatenate(([-1.0], basis.points, [1.0]))


def clamp_admissible(field: DGField, mesh: Mesh, rho_max=None, road_id=None, time=None, roundoff_tol=1e-13):
	"""
	Enforce 0 <= rho <= rho_max at element endpoints and quadrature points.

	Elements with an admissible mean have their non-constant part scaled down,
	which keeps the element integral. Elements whose mean itself left the
	interval are set to the violated bound and reported.

	Args:
		field: density after the Euler update and limiting
		mesh: road mesh
		rho_max: per-element upper bounds, defaults to the mesh's rho_max
		road_id: recorded in events, defaults to mesh.road_id
		time: recorded in events
		roundoff_tol: relative size below which a bad mean counts as round-off
	Returns:
		(DGField, list of event dicts)
	"""
	upper = mesh.rho_max if rho_max is None else np.broadcast_to(np.asarray(rho_max, float), mesh.widths.shape)
	road_id = mesh.road_id if road_id is None else road_id
	c = field.coefficients
	means = c[:, 0]
	events = []

	below = means < 0.0
	above = means > upper
	bad = below | above
	if field.degree == 0 and not np.any(bad):
		return field, events

	out = c.copy()
	if field.degree > 0:
		values = c @ legendre.legvander(_sample_points(field.degree), field.degree).T
		lowest = values.min(axis=1)
		highest = values.max(axis=1)
		theta = np.ones_like(means)
		with np.errstate(divide="ignore", invalid="ignore"):
			low_fix = (lowest < 0.0) & ~bad
			theta[low_fix] = np.minimum(theta[low_fix], means[low_fix] / (means[low_fix] - lowest[low_fix]))
			high_fix = (highest > upper) & ~bad
			theta[high_fix] = np.minimum(
				theta[high_fix], (upper[high_fix] - means[high_fix]) / (highest[high_fix] - means[high_fix])
			)
		scaled = theta < 1.0
		if np.any(scaled):
			out[scaled, 1:] *= theta[scaled, None]

	for k in np.flatnonzero(bad):
		mean = float(means[k])
		bound = 0.0 if below[k] else float(upper[k])
		excess = abs(mean - bound)
		kind = ROUNDOFF if excess <= roundoff_tol * float(upper[k]) else MASS_VIOLATION
		event = {
			"road": road_id,
			"element": int(k),
			"time": time,
			"mean": mean,
			"bound": bound,
			"kind": kind,
			"mass_change": (bound - mean) * float(mesh.widths[k]),
		}
		events.append(event)
		if kind == MASS_VIOLATION:
			logger("dg_core").warning(
				f"Element mean {mean!r} outside [0, {float(upper[k])!r}] on road {road_id}, "
				f"element {k}, t={time}: time step too large or mesh too coarse"
			)
		else:
			logger("dg_core").debug(f"Round-off snap of element {k} on road {road_id}: {mean!r} -> {bound!r}")
		out[k, 0] = bound
		out[k, 1:] = 0.0

	return DGField(field.degree, out), events


def total_mass(field: DGField, mesh: Mesh):
	"""Integral of the density over the road."""
	return float(np.dot(field.coefficients[:, 0], mesh.widths))


def sample(field: DGField, mesh: Mesh, points_per_element=5):
	"""
	Plot samples: both element endpoints plus equally spaced interior points.

	Returns:
		(positions, densities), each of length N * (points_per_element + 2)
	"""
	xi = np.concatenate(([-1.0], np.linspace(-1.0, 1.0, points_per_element + 2)[1:-1], [1.0]))
	values = field.coefficients @ legendre.legvander(xi, field.degree).T
	positions = mesh.centers[:, None] + 0.5 * mesh.widths[:, None] * xi[None, :]
	return positions.ravel(), values.ravel()
