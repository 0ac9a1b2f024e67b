"""
Base handler class for all junction flux strategies.
All strategy handlers should inherit from this class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from traffic_dg.exceptions import JunctionFluxError
from traffic_dg.solver.dg_core import coupling_flux, coupling_flux_values
from traffic_dg.solver.fundamental import demand_values, supply_values


@dataclass(frozen=True)
class JunctionState:
	"""
	Traces meeting at a junction.

	incoming[i] is the left limit at the end b_i of incoming road i,
	outgoing[j] the right limit at the start a_j of outgoing road j.
	Each trace comes with the diagram of the element it was taken from.
	"""

	incoming: np.ndarray
	outgoing: np.ndarray
	incoming_diagrams: tuple
	outgoing_diagrams: tuple

	@classmethod
	def homogeneous(cls, diagram, incoming, outgoing):
		incoming = np.atleast_1d(np.asarray(incoming, dtype=float))
		outgoing = np.atleast_1d(np.asarray(outgoing, dtype=float))
		return cls(incoming, outgoing, (diagram,) * len(incoming), (diagram,) * len(outgoing))

	@property
	def shape(self):
		return (len(self.outgoing), len(self.incoming))


@dataclass(frozen=True)
class JunctionFluxes:
	incoming: np.ndarray  # H_i, outflow from incoming road i
	outgoing: np.ndarray  # H_j, inflow to outgoing road j
	directional: np.ndarray  # (m, n): flux carried from road i towards road j


@dataclass(frozen=True)
class DemandSupply:
	demand: np.ndarray  # gamma_i^max per incoming road
	supply: np.ndarray  # gamma_j^max per outgoing road


def check_matrix(state: JunctionState, alpha):
	alpha = np.asarray(alpha, dtype=float)
	if alpha.shape != state.shape:
		raise JunctionFluxError(
			f"distribution matrix is {alpha.shape}, junction has "
			f"{state.shape[0]} outgoing x {state.shape[1]} incoming roads"
		)
	return alpha


def pairwise_fluxes(state: JunctionState):
	"""
	Interface flux for every (incoming i, outgoing j) pair: Lax-Friedrichs between
	identical laws, demand/supply where the laws differ.

	Returns:
		(m, n) array P with P[j, i] = H(rho_i, rho_j)
	"""
	m, n = state.shape
	diagrams = state.incoming_diagrams + state.outgoing_diagrams
	kinds = {d.kind for d in diagrams}
	if len(kinds) == 1:
		kind = kinds.pop()
		v_in = np.array([d.v_max for d in state.incoming_diagrams])
		r_in = np.array([d.rho_max for d in state.incoming_diagrams])
		v_out = np.array([d.v_max for d in state.outgoing_diagrams])
		r_out = np.array([d.rho_max for d in state.outgoing_diagrams])
		return coupling_flux_values(
			kind,
			kind,
			state.incoming[None, :],
			state.outgoing[:, None],
			v_in[None, :],
			r_in[None, :],
			v_out[:, None],
			r_out[:, None],
		) * np.ones((m, n))

	pairs = np.empty((m, n))
	for j in range(m):
		for i in range(n):
			pairs[j, i] = coupling_flux(
				state.incoming_diagrams[i], state.outgoing_diagrams[j], state.incoming[i], state.outgoing[j]
			)
	return pairs


def demand_supply(state: JunctionState):
	"""
	Maximal flux each incoming road can send and each outgoing road can take.

	Demand is Q_e on the free branch and capacity on the congested branch;
	supply is capacity on the free branch and Q_e on the congested branch.
	"""
	demand = np.array(
		[
			float(demand_values(d.kind, rho, d.v_max, d.rho_max))
			for d, rho in zip(state.incoming_diagrams, state.incoming, strict=True)
		]
	)
	supply = np.array(
		[
			float(supply_values(d.kind, rho, d.v_max, d.rho_max))
			for d, rho in zip(state.outgoing_diagrams, state.outgoing, strict=True)
		]
	)
	return DemandSupply(demand=demand, supply=supply)


def distribution_error(state: JunctionState, alpha, pairs=None):
	"""
	Deviation of the weighted fluxes from the prescribed distribution.

	E_j = sum_i sum_{l != j} alpha_ji alpha_li (H_ij - H_il)

	Args:
		state: junction traces
		alpha: (m, n) distribution matrix
		pairs: precomputed pairwise fluxes, optional
	Returns:
		array of E_j per outgoing road
	"""
	alpha = check_matrix(state, alpha)
	if pairs is None:
		pairs = pairwise_fluxes(state)
	# diff[j, l, i] = H(rho_i, rho_j) - H(rho_i, rho_l); vanishes for l == j
	diff = pairs[:, None, :] - pairs[None, :, :]
	return np.einsum("ji,li,jli->j", alpha, alpha, diff)


def relative_distribution_error(state: JunctionState, alpha, fluxes: JunctionFluxes = None):
	"""|E_j| / H_j, NaN where H_j vanishes."""
	from traffic_dg.solver.junctions.weighted_handler import weighted_fluxes

	if fluxes is None:
		fluxes = weighted_fluxes(state, alpha)
	error = distribution_error(state, alpha)
	with np.errstate(divide="ignore", invalid="ignore"):
		return np.where(fluxes.outgoing != 0.0, np.abs(error) / np.abs(fluxes.outgoing), np.nan)


class BaseJunctionHandler:
	"""
	Base class for junction flux strategies.
	Provides the shared junction quantities and defines the interface.
	"""

	def __init__(self):
		self.strategy = None  # Should be set by subclasses
		self.label = None  # Human-readable name

	def compute(self, state: JunctionState, alpha) -> JunctionFluxes:
		"""
		Junction boundary fluxes for the given traces and effective matrix.
		Override in subclasses.
		"""
		raise NotImplementedError(f"{type(self).__name__} does not implement compute()")

	def demand_supply(self, state):
		return demand_supply(state)

	def distribution_error(self, state, alpha):
		return distribution_error(state, alpha)

	def __repr__(self):
		return f"<{type(self).__name__} {self.strategy}>"
