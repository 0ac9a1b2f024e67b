"""
Maximum-flux junction fluxes.

Total throughput is maximized subject to demand, supply and exact
distribution H_j = sum_i alpha_ji H_i. Closed forms cover junctions with at
most two incoming and two outgoing roads; two incoming roads compete for
capacity according to a right-of-way fraction q.
"""

from itertools import combinations

import numpy as np

from traffic_dg.exceptions import JunctionFluxError
from traffic_dg.solver.junctions.base_handler import (
	BaseJunctionHandler,
	JunctionFluxes,
	JunctionState,
	check_matrix,
	demand_supply,
)
from traffic_dg.solver.network import MAXFLUX, MAXFLUX_MAX_SIDE

FEASIBILITY_TOL = 1e-12


def _fluxes_from_incoming(alpha, incoming):
	directional = alpha * incoming[None, :]
	return JunctionFluxes(incoming=incoming, outgoing=alpha @ incoming, directional=directional)


def _single_incoming(alpha, demand, supply):
	column = alpha[:, 0]
	if demand[0] <= 0.0:
		return np.zeros(1)
	if np.any(column <= 0.0):
		raise JunctionFluxError(
			f"maxflux with one incoming road divides by every distribution coefficient, got {column.tolist()}"
		)
	gamma = min(demand[0], float(np.min(supply / column)))
	return np.array([gamma])


def _polygon_vertices(constraints):
	"""Vertices of {x in R^2 : a . x <= b for every (a1, a2, b)}."""
	scale = 1.0 + max(abs(b) for _, _, b in constraints)
	vertices = []
	for (a1, a2, b), (c1, c2, d) in combinations(constraints, 2):
		det = a1 * c2 - a2 * c1
		if abs(det) < 1e-14:
			continue
		x1 = (b * c2 - a2 * d) / det
		x2 = (a1 * d - b * c1) / det
		if all(e1 * x1 + e2 * x2 <= f + FEASIBILITY_TOL * scale for e1, e2, f in constraints):
			vertices.append((x1, x2))
	return vertices


def _two_incoming(alpha, demand, supply, q):
	"""
	Maximal total flux for two incoming roads, split by right of way.

	The optimal set is a face of the feasible polygon on H_1 + H_2 = S*;
	the chosen point is the one closest to the priority ray (q, 1 - q) S*.
	"""
	constraints = [
		(-1.0, 0.0, 0.0),
		(0.0, -1.0, 0.0),
		(1.0, 0.0, float(demand[0])),
		(0.0, 1.0, float(demand[1])),
	]
	for j in range(alpha.shape[0]):
		constraints.append((float(alpha[j, 0]), float(alpha[j, 1]), float(supply[j])))

	vertices = _polygon_vertices(constraints)
	if not vertices:
		return np.zeros(2)
	totals = [x1 + x2 for x1, x2 in vertices]
	best = max(totals)
	tol = FEASIBILITY_TOL * (1.0 + best)
	optimal = [x1 for (x1, _), total in zip(vertices, totals, strict=True) if total >= best - tol]
	h1 = min(max(q * best, min(optimal)), max(optimal))
	h1 = min(max(h1, 0.0), float(demand[0]))
	h2 = min(max(best - h1, 0.0), float(demand[1]))
	return np.array([h1, h2])


def maxflux_fluxes(state: JunctionState, alpha, q=None):
	"""
	Junction fluxes maximizing total throughput with exact distribution.

	Args:
		state: junction traces
		alpha: (m, n) effective distribution matrix; a zero column is a red light
		q: right of way of the first incoming road, required when n == 2
	Returns:
		JunctionFluxes with outgoing == alpha @ incoming exactly
	"""
	alpha = check_matrix(state, alpha)
	m, n = alpha.shape
	if n > MAXFLUX_MAX_SIDE or m > MAXFLUX_MAX_SIDE:
		raise JunctionFluxError(
			f"maxflux closed forms cover junctions up to 2x2, got {n} incoming x {m} outgoing; "
			"the general linear program is not supported"
		)

	ds = demand_supply(state)
	demand = ds.demand.copy()
	# red column: this incoming road sends nothing
	demand[alpha.sum(axis=0) == 0.0] = 0.0

	if n == 1:
		incoming = _single_incoming(alpha, demand, ds.supply)
	else:
		if q is None or not 0.0 < q < 1.0:
			raise JunctionFluxError(f"maxflux with two incoming roads needs a right of way 0 < q < 1, got {q}")
		incoming = _two_incoming(alpha, demand, ds.supply, q)
	return _fluxes_from_incoming(alpha, incoming)


class MaxFluxHandler(BaseJunctionHandler):
	def __init__(self, right_of_way=None):
		super().__init__()
		self.strategy = MAXFLUX
		self.label = "maximum flux"
		self.right_of_way = right_of_way

	def compute(self, state, alpha):
		return maxflux_fluxes(state, alpha, self.right_of_way)

	def distribution_error(self, state, alpha):
		"""H_j - sum_i alpha_ji H_i, zero up to round-off."""
		fluxes = self.compute(state, alpha)
		return fluxes.outgoing - np.asarray(alpha, dtype=float) @ fluxes.incoming
