"""
Junction flux strategies for the network scheme.
Each strategy has its own handler computing the junction boundary fluxes.
"""

from traffic_dg.solver.junctions.base_handler import (
	BaseJunctionHandler,
	DemandSupply,
	JunctionFluxes,
	JunctionState,
	demand_supply,
	distribution_error,
	pairwise_fluxes,
	relative_distribution_error,
)
from traffic_dg.solver.junctions.maxflux_handler import MaxFluxHandler, maxflux_fluxes
from traffic_dg.solver.junctions.weighted_handler import WeightedFluxHandler, weighted_fluxes

# Registry of available junction strategies
JUNCTION_HANDLERS = {
	"weighted": WeightedFluxHandler,
	"maxflux": MaxFluxHandler,
}


def get_handler(strategy):
	"""
	Get the handler for a junction's flux strategy.

	Args:
		strategy: FluxStrategy of the junction
	Returns:
		Handler instance or None if not found
	"""
	handler_class = JUNCTION_HANDLERS.get(strategy.kind)
	if handler_class is None:
		return None
	if handler_class is MaxFluxHandler:
		return handler_class(right_of_way=strategy.right_of_way)
	return handler_class()


def get_available_strategies():
	"""Get list of available junction strategies."""
	return list(JUNCTION_HANDLERS.keys())
