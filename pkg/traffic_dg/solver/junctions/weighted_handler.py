"""
Distribution-weighted junction fluxes.

Every incoming/outgoing trace pair exchanges the coupling flux (Lax-Friedrichs
under one law, demand/supply across a change of law); the distribution
coefficients weight the pairs. Works for any junction shape.
"""

from traffic_dg.solver.junctions.base_handler import (
	BaseJunctionHandler,
	JunctionFluxes,
	JunctionState,
	check_matrix,
	pairwise_fluxes,
)
from traffic_dg.solver.network import WEIGHTED


def weighted_fluxes(state: JunctionState, alpha, pairs=None):
	"""
	H_j = sum_i alpha_ji H(rho_i, rho_j) and H_i = sum_j alpha_ji H(rho_i, rho_j).

	Args:
		state: junction traces
		alpha: (m, n) effective distribution matrix
		pairs: precomputed pairwise fluxes, optional
	Returns:
		JunctionFluxes
	"""
	alpha = check_matrix(state, alpha)
	if pairs is None:
		pairs = pairwise_fluxes(state)
	directional = alpha * pairs
	return JunctionFluxes(
		incoming=directional.sum(axis=0),
		outgoing=directional.sum(axis=1),
		directional=directional,
	)


class WeightedFluxHandler(BaseJunctionHandler):
	def __init__(self):
		super().__init__()
		self.strategy = WEIGHTED
		self.label = "distribution-weighted"

	def compute(self, state, alpha):
		return weighted_fluxes(state, alpha)
