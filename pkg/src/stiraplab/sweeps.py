"""Robustness maps and deviation sweeps for the STIRAP rotations.

Grid points are independent work items: the 2-D amplitude-detuning map is
evaluated with a batched propagation kernel (one evolution operator per
grid point serves both initial states), optionally sharded row-by-row over
a process pool with deterministic output ordering.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from . import gates, tomography
from .gates import StirapProtocol, as_vsystem, with_amplitude
from .propagator import (
    DEFAULT_STEPS,
    expm_hermitian_stack,
    ket,
    propagate_lindblad,
    pure_density,
    time_ordered_product,
)
from .vsystem import DecoherenceTimes, DriveConfig, TWO_PI, hamiltonian_stack


@dataclass(frozen=True)
class AxisSpec:
    """One sweep axis: evenly spaced points over [minimum, maximum]."""

    name: str
    minimum: float
    maximum: float
    points: int

    def __post_init__(self) -> None:
        if self.points < 2:
            raise ValueError(f"axis {self.name!r} needs at least 2 points")
        if not self.minimum < self.maximum:
            raise ValueError(f"axis {self.name!r} needs minimum < maximum")

    def values(self) -> np.ndarray:
        return np.linspace(self.minimum, self.maximum, self.points)


@dataclass(frozen=True)
class SweepGrid:
    """1-D or 2-D sweep grid (tuple of axis specs)."""

    axes: tuple[AxisSpec, ...]

    def __post_init__(self) -> None:
        if len(self.axes) not in (1, 2):
            raise ValueError("sweep grids are 1-D or 2-D")

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(axis.points for axis in self.axes)


@dataclass(frozen=True)
class SweepResult:
    """Metric values on a sweep grid plus descriptive metadata."""

    grid: SweepGrid
    values: np.ndarray
    metadata: dict

    def __post_init__(self) -> None:
        if tuple(np.shape(self.values)) != self.grid.shape:
            raise ValueError(
                f"values shape {np.shape(self.values)} != grid shape {self.grid.shape}"
            )


def parallel_map(fn: Callable, items: Sequence, jobs: int = 1) -> list:
    """Order-preserving parallel map over independent work items."""
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# 2-D amplitude-detuning transfer maps


def map_preset() -> StirapProtocol:
    """Pulse shape used for the parameter maps: the detuned-rotation timing
    with the wider 40 ns standard deviation."""
    return gates.detuned_preset("pi", sigma_ns=40.0)


DEFAULT_MAP_GRID = SweepGrid(
    axes=(
        AxisSpec("detuning_mhz", 0.0, 40.0, 81),
        AxisSpec("amplitude_mhz", 0.0, 40.0, 81),
    )
)


def _row_unitaries(
    proto: StirapProtocol, detuning_mhz: float, amplitudes: np.ndarray, steps: int
) -> np.ndarray:
    """Evolution operators for one map row (fixed detuning, all amplitudes).

    The Hamiltonian is linear in the common amplitude, so the stacked
    generator for the whole row is assembled from one unit-amplitude
    evaluation.
    """
    unit = with_amplitude(proto, 1.0)
    unit = dataclasses.replace(unit, drive=DriveConfig())
    lo, hi = proto.window
    grid_t = unit.time_grid(steps)
    mids = 0.5 * (grid_t[:-1] + grid_t[1:])
    dts_us = np.diff(grid_t) * 1e-3
    coupling = hamiltonian_stack(as_vsystem(unit), mids)  # (segments, 3, 3)
    diag = np.zeros((3, 3), dtype=complex)
    diag[1, 1] = TWO_PI * detuning_mhz
    diag[2, 2] = TWO_PI * proto.drive.two_photon
    h = amplitudes[:, None, None, None] * coupling[None] + diag
    return time_ordered_product(expm_hermitian_stack(h, dts_us))


def _transfer_row(args) -> tuple[np.ndarray, np.ndarray]:
    proto, detuning, amplitudes, steps = args
    u = _row_unitaries(proto, detuning, amplitudes, steps)
    return np.abs(u[:, 2, 0]) ** 2, np.abs(u[:, 0, 2]) ** 2


def transfer_maps(
    proto_template: StirapProtocol,
    grid: SweepGrid = DEFAULT_MAP_GRID,
    steps: int = DEFAULT_STEPS,
    jobs: int = 1,
) -> tuple[SweepResult, SweepResult]:
    """Final transferred population over a (detuning, amplitude) grid.

    Returns (map from |0>: population of |1>, map from |1>: population of
    |0>); one evolution operator per grid point serves both.  Rows (fixed
    detuning) are independent work items.
    """
    if len(grid.axes) != 2:
        raise ValueError("transfer maps need a 2-D grid")
    detunings = grid.axes[0].values()
    amplitudes = grid.axes[1].values()
    rows = parallel_map(
        _transfer_row,
        [(proto_template, float(d), amplitudes, steps) for d in detunings],
        jobs=jobs,
    )
    p1_from_0 = np.vstack([r[0] for r in rows])
    p0_from_1 = np.vstack([r[1] for r in rows])
    meta = {
        "protocol": "detuned transfer map",
        "steps": steps,
        "sigma_ns": proto_template.pump.sigma,
    }
    return (
        SweepResult(grid=grid, values=p1_from_0, metadata={**meta, "initial": "0", "measured": "P1"}),
        SweepResult(grid=grid, values=p0_from_1, metadata={**meta, "initial": "1", "measured": "P0"}),
    )


def amplitude_detuning_map(
    proto_template: StirapProtocol,
    grid: SweepGrid = DEFAULT_MAP_GRID,
    initial: str = "0",
    steps: int = DEFAULT_STEPS,
    jobs: int = 1,
) -> SweepResult:
    """Transferred population after the pulse pair for one initial state."""
    map0, map1 = transfer_maps(proto_template, grid, steps, jobs)
    return map0 if initial == "0" else map1


def level_crossing_mask(values: np.ndarray, level: float) -> np.ndarray:
    """Grid cells through which the given level contour passes.

    True wherever a point's 4-neighborhood brackets the level; a cheap
    contour extraction suited to columnar export.
    """
    above = values >= level
    mask = np.zeros_like(above)
    mask[:-1, :] |= above[:-1, :] != above[1:, :]
    mask[1:, :] |= above[:-1, :] != above[1:, :]
    mask[:, :-1] |= above[:, :-1] != above[:, 1:]
    mask[:, 1:] |= above[:, :-1] != above[:, 1:]
    return mask


def common_region(
    map0: SweepResult, map1: SweepResult, level: float, tol: float
) -> np.ndarray:
    """Mask of grid points where both maps sit within tol of the level.

    For level = 1.0 the criterion is one-sided (1 - value <= tol, i.e. the
    complete-transfer region); otherwise |value - level| <= tol.  Both maps
    must share the grid.
    """
    if map0.grid != map1.grid:
        raise ValueError("common_region requires maps on the same grid")
    if level >= 1.0:
        near0 = (1.0 - map0.values) <= tol
        near1 = (1.0 - map1.values) <= tol
    else:
        near0 = np.abs(map0.values - level) <= tol
        near1 = np.abs(map1.values - level) <= tol
    return near0 & near1


# ---------------------------------------------------------------------------
# 1-D deviation sweeps

ROBUSTNESS_AXES = ("amplitude_deviation", "frequency_deviation", "two_photon_deviation")


def _deviated_protocol(proto: StirapProtocol, axis: str, x: float) -> StirapProtocol:
    if axis == "amplitude_deviation":
        return with_amplitude(proto, proto.pump.peak_rabi * (1.0 + x))
    if axis == "frequency_deviation":
        return gates.with_detuning(
            proto, proto.drive.single_photon * (1.0 + x), proto.drive.two_photon
        )
    if axis == "two_photon_deviation":
        return gates.with_detuning(
            proto, proto.drive.single_photon, x * proto.drive.single_photon
        )
    raise ValueError(f"axis must be one of {ROBUSTNESS_AXES}, got {axis!r}")


def _robustness_point(args) -> float:
    proto, axis, x, initial, target, steps, decoherence = args
    psi0 = ket(initial)
    devproto = _deviated_protocol(proto, axis, x)
    if decoherence is None:
        u = gates.protocol_unitary(devproto, steps)
        fid = abs(np.vdot(target, u @ psi0)) ** 2
    else:
        sysv = as_vsystem(devproto, decoherence)
        lo, hi = devproto.window
        _, rho = propagate_lindblad(sysv, pure_density(psi0), np.linspace(lo, hi, steps + 1))
        fid = tomography.state_fidelity(rho, pure_density(target))
    return 1.0 - min(1.0, fid)


def robustness_curve(
    proto: StirapProtocol,
    axis: str,
    grid: np.ndarray,
    initial: str = "0",
    target: Optional[np.ndarray] = None,
    steps: int = DEFAULT_STEPS,
    decoherence: Optional[DecoherenceTimes] = None,
    jobs: int = 1,
) -> SweepResult:
    """State infidelity 1 - F(final, target) vs fractional deviation.

    The deviation axis rescales the calibrated amplitude, the single-photon
    detuning, or (diagnostic) introduces a two-photon detuning as a
    fraction of the single-photon one.  With decoherence the final state
    comes from the master equation, otherwise from unitary propagation.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise ValueError("deviation grids need at least 2 points")
    if target is None:
        raise ValueError("robustness_curve needs the ideal target state")
    target = np.asarray(target, dtype=complex)
    items = [(proto, axis, float(x), initial, target, steps, decoherence) for x in grid]
    values = np.array(parallel_map(_robustness_point, items, jobs=jobs))
    sweep_grid = SweepGrid(
        axes=(AxisSpec(axis, float(grid.min()), float(grid.max()), grid.size),)
    )
    return SweepResult(
        grid=sweep_grid,
        values=values,
        metadata={
            "protocol": "detuned stirap",
            "axis": axis,
            "initial": initial,
            "open_system": decoherence is not None,
            "deviations": grid,
        },
    )


# ---------------------------------------------------------------------------
# resonant dynamical-gate baseline

#: window/sigma ratio shared with the gate presets (206 ns / 33 ns)
_BASELINE_SIGMA_RATIO = 206.0 / 33.0


def baseline_amplitude_for_angle(duration_ns: float, angle: float) -> float:
    """Peak Rabi amplitude (MHz) whose truncated-Gaussian pulse area equals
    the requested rotation angle."""
    sigma = duration_ns / _BASELINE_SIGMA_RATIO
    grid = np.linspace(0.0, duration_ns, 4001)
    area_unit = np.trapezoid(
        np.exp(-((grid - 0.5 * duration_ns) ** 2) / (2.0 * sigma**2)), grid
    )  # ns
    return angle / (TWO_PI * area_unit * 1e-3)


def _baseline_unitary(
    rabi_mhz: float, duration_ns: float, detuning_mhz: float, steps: int
) -> np.ndarray:
    """Evolution under a resonant drive coupling |0> <-> |1> directly."""
    grid = np.linspace(0.0, duration_ns, steps + 1)
    mids = 0.5 * (grid[:-1] + grid[1:])
    sigma = duration_ns / _BASELINE_SIGMA_RATIO
    gauss = np.exp(-((mids - 0.5 * duration_ns) ** 2) / (2.0 * sigma**2))
    omega = TWO_PI * rabi_mhz * gauss  # rad/us
    h = np.zeros((steps, 3, 3), dtype=complex)
    h[:, 0, 2] = 0.5 * omega
    h[:, 2, 0] = 0.5 * omega
    h[:, 2, 2] = TWO_PI * detuning_mhz
    return time_ordered_product(expm_hermitian_stack(h, (grid[1] - grid[0]) * 1e-3))


def dynamical_baseline(
    rabi_freq: float,
    duration: float,
    axis: str,
    grid: np.ndarray,
    target: np.ndarray,
    initial: str = "0",
    frequency_scale_mhz: float = 15.0,
    steps: int = DEFAULT_STEPS,
) -> SweepResult:
    """Deviation sweep of a resonant rotation driving |0> <-> |1> directly.

    rabi_freq (MHz) and duration (ns) fix the pulse; use
    :func:`baseline_amplitude_for_angle` to calibrate the area to the gate
    being compared.  Amplitude deviations rescale the peak; frequency
    deviations detune the drive by x * frequency_scale_mhz so the x-axis
    carries the same physical shift as the STIRAP sweep it is compared
    against.
    """
    grid = np.asarray(grid, dtype=float)
    if grid.size < 2:
        raise ValueError("deviation grids need at least 2 points")
    if axis not in ("amplitude_deviation", "frequency_deviation"):
        raise ValueError(f"axis must be amplitude_deviation or frequency_deviation, got {axis!r}")
    target = np.asarray(target, dtype=complex)
    psi0 = ket(initial)
    values = np.empty(grid.size)
    for i, x in enumerate(grid):
        if axis == "amplitude_deviation":
            u = _baseline_unitary(rabi_freq * (1.0 + x), duration, 0.0, steps)
        else:
            u = _baseline_unitary(rabi_freq, duration, x * frequency_scale_mhz, steps)
        values[i] = 1.0 - min(1.0, abs(np.vdot(target, u @ psi0)) ** 2)
    sweep_grid = SweepGrid(
        axes=(AxisSpec(axis, float(grid.min()), float(grid.max()), grid.size),)
    )
    return SweepResult(
        grid=sweep_grid,
        values=values,
        metadata={
            "protocol": "resonant dynamical baseline",
            "axis": axis,
            "initial": initial,
            "rabi_mhz": rabi_freq,
            "duration_ns": duration,
            "deviations": grid,
        },
    )
