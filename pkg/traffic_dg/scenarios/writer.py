"""
Run output: CSV tables, plot-ready data files and optional PNG plots.
"""

import os
from dataclasses import dataclass

import numpy as np
import pandas as pd

from traffic_dg.exceptions import OutputError
from traffic_dg.utils import logger

SNAPSHOT_COLUMNS = ["time", "road", "x", "rho"]
MASS_COLUMNS = ["time", "total_mass", "boundary_in", "boundary_out"]
JUNCTION_COLUMNS = ["time", "junction", "series", "value"]


@dataclass(frozen=True)
class OutputPlan:
	directory: str
	# per-step series keep every n-th step plus the last one
	record_every: int = 100
	plot: bool = False


def recorded_steps(count, every):
	"""Indices 0, every, 2*every, ... of a series of `count` entries, always including the last."""
	idx = np.arange(0, count, max(1, every))
	if count and idx[-1] != count - 1:
		idx = np.append(idx, count - 1)
	return idx


def snapshot_frame(result):
	frames = [
		pd.DataFrame({"time": rec.time, "road": rec.road, "x": rec.x, "rho": rec.rho}) for rec in result.snapshots
	]
	if not frames:
		return pd.DataFrame(columns=SNAPSHOT_COLUMNS)
	return pd.concat(frames, ignore_index=True)[SNAPSHOT_COLUMNS]


def mass_frame(result, every=1):
	idx = recorded_steps(len(result.times), every)
	return pd.DataFrame(
		{
			"time": result.times[idx],
			"total_mass": result.total_mass[idx],
			"boundary_in": result.boundary_in[idx],
			"boundary_out": result.boundary_out[idx],
		}
	)


def junction_frame(result, every=1):
	"""
	Long-format junction diagnostics.

	series is H_i:<road> for the flux leaving incoming road i, H_j:<road> for
	the flux entering outgoing road j and E_j:<road> for the distribution error
	(snapshot times only).
	"""
	frames = []
	for jid, series in result.junctions.items():
		idx = recorded_steps(len(series.times), every)
		times = series.times[idx]
		for i, rid in enumerate(series.incoming_roads):
			frames.append(
				pd.DataFrame({"time": times, "junction": jid, "series": f"H_i:{rid}", "value": series.incoming[idx, i]})
			)
		for j, rid in enumerate(series.outgoing_roads):
			frames.append(
				pd.DataFrame({"time": times, "junction": jid, "series": f"H_j:{rid}", "value": series.outgoing[idx, j]})
			)
	if result.distribution_errors:
		errors = pd.DataFrame(result.distribution_errors, columns=["time", "junction", "road", "value"])
		errors["series"] = "E_j:" + errors["road"].astype(str)
		frames.append(errors[JUNCTION_COLUMNS])
	if not frames:
		return pd.DataFrame(columns=JUNCTION_COLUMNS)
	return pd.concat(frames, ignore_index=True)[JUNCTION_COLUMNS]


def snapshot_data_name(time, road):
	return f"rho_t{time:.4f}_road{road}.dat"


def _write_csv(frame, path, **kwargs):
	try:
		frame.to_csv(path, index=False, **kwargs)
	except OSError as e:
		raise OutputError(path, e.strerror or str(e))
	logger("writer").info(f"Wrote {path}")
	return path


def plot_snapshots(result, directory):
	"""
	One PNG per snapshot time with a density panel per road.

	Returns:
		list of written paths
	"""
	import matplotlib

	matplotlib.use("Agg")
	import matplotlib.pyplot as plt

	paths = []
	times = sorted({rec.time for rec in result.snapshots})
	for k, t in enumerate(times):
		records = [rec for rec in result.snapshots if rec.time == t]
		fig, axes = plt.subplots(len(records), 1, figsize=(8, 1.8 * len(records)), sharey=False, squeeze=False)
		for ax, rec in zip(axes[:, 0], records, strict=True):
			ax.plot(rec.x, rec.rho, "b-", linewidth=1)
			ax.set_ylabel(f"road {rec.road}")
			ax.grid(True)
		axes[0, 0].set_title(f"{result.name}, t = {t:g}")
		axes[-1, 0].set_xlabel("x")
		fig.tight_layout()
		path = os.path.join(directory, f"density_{k:03d}.png")
		try:
			fig.savefig(path)
		except OSError as e:
			raise OutputError(path, e.strerror or str(e))
		finally:
			plt.close(fig)
		logger("writer").info(f"Wrote {path}")
		paths.append(path)
	return paths


def write_outputs(result, plan: OutputPlan):
	"""
	Write the output files of a completed run.

	Args:
		result: RunResult from simulation.run
		plan: target directory and subsampling
	Returns:
		dict with status and the list of written files
	"""
	try:
		os.makedirs(plan.directory, exist_ok=True)
	except OSError as e:
		raise OutputError(plan.directory, e.strerror or str(e))

	files = []
	if result.snapshots:
		files.append(_write_csv(snapshot_frame(result), os.path.join(plan.directory, "snapshots.csv")))
		for rec in result.snapshots:
			path = os.path.join(plan.directory, snapshot_data_name(rec.time, rec.road))
			frame = pd.DataFrame({"x": rec.x, "rho": rec.rho})
			files.append(_write_csv(frame, path, sep=" ", header=False, float_format="%.10g"))

	files.append(_write_csv(mass_frame(result, plan.record_every), os.path.join(plan.directory, "mass.csv")))
	files.append(
		_write_csv(junction_frame(result, plan.record_every), os.path.join(plan.directory, "junction_diag.csv"))
	)

	if plan.plot and result.snapshots:
		files.extend(plot_snapshots(result, plan.directory))

	return {"status": "success", "directory": plan.directory, "files": files}
