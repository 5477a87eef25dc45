"""Operating regions in the detuning-amplitude plane.

One evolution operator per grid point yields the transferred population
for both initial states at once.  Where both maps reach 1 within 1e-3 the
pulse pair acts as an initial-state-independent full rotation; where both
sit at 0.5 it acts as a half rotation.  The full-rotation region is an
area; the half-rotation condition traces out a thin curve.

The bundled default is the 81x81 grid (about half a minute); pass
``--coarse`` for a quick 41x41 look.
"""

import pathlib
import sys

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from stiraplab import sweeps

OUT = pathlib.Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

points = 41 if "--coarse" in sys.argv else 81
grid = sweeps.SweepGrid(
    axes=(
        sweeps.AxisSpec("detuning_mhz", 0.0, 40.0, points),
        sweeps.AxisSpec("amplitude_mhz", 0.0, 40.0, points),
    )
)
map0, map1 = sweeps.transfer_maps(sweeps.map_preset(), grid, jobs=2)
half = sweeps.common_region(map0, map1, 0.5, 1e-3)
full = sweeps.common_region(map0, map1, 1.0, 1e-3)
print(f"{points}x{points} grid: complete-transfer region {full.sum()} points, "
      f"equal-superposition region {half.sum()} points")

det = grid.axes[0].values()
amp = grid.axes[1].values()
extent = (amp[0], amp[-1], det[0], det[-1])

fig, axes = plt.subplots(1, 3, figsize=(14, 4), sharey=True)
for ax, result, title in (
    (axes[0], map0, "P1 after the pulses, initial |0>"),
    (axes[1], map1, "P0 after the pulses, initial |1>"),
):
    im = ax.imshow(result.values, origin="lower", extent=extent, aspect="auto",
                   vmin=0, vmax=1, cmap="viridis")
    cs = ax.contour(amp, det, result.values, levels=[0.5], colors="k", linewidths=0.8)
    ax.contour(amp, det, result.values, levels=[0.999], colors="yellow", linewidths=0.8)
    ax.set_xlabel("amplitude (MHz)")
    ax.set_title(title, fontsize=10)
fig.colorbar(im, ax=axes[:2], shrink=0.85)

ax = axes[2]
ii, jj = np.nonzero(full)
ax.scatter(amp[jj], det[ii], s=8, c="tab:blue", label="full rotation (1e-3)")
ii, jj = np.nonzero(half)
ax.scatter(amp[jj], det[ii], s=14, c="tab:red", label="half rotation (1e-3)")
ax.set_xlim(amp[0], amp[-1])
ax.set_ylim(det[0], det[-1])
ax.set_xlabel("amplitude (MHz)")
ax.set_title("initial-state-independent regions", fontsize=10)
ax.legend(fontsize=8)
axes[0].set_ylabel("single-photon detuning (MHz)")

fig.savefig(OUT / "parameter_maps.png", dpi=150, bbox_inches="tight")
print(f"figure saved to {OUT / 'parameter_maps.png'}")
