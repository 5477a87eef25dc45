"""Command-line front end: declarative experiment configs and deterministic
artifact emission.

Subcommands
-----------
simulate / calibrate / tomography / sweep / device-report
    run one campaign from ``--config FILE`` (TOML) or ``--preset ID``
presets
    list the bundled figure presets (``--write DIR`` exports their configs)

Common flags: ``--out DIR``, ``--seed N``, ``--jobs N``,
``--emit-plot-script``.  Environment overrides are limited to
``STIRAPLAB_OUT`` and ``STIRAPLAB_JOBS``.

Config schema (TOML; unknown keys are rejected)
-----------------------------------------------
Top level: ``campaign`` (required), ``seed`` (int), ``out_dir`` (str).

``[protocol]``: ``preset`` ("resonant" | "detuned_pi" | "detuned_half_pi")
and/or the explicit fields ``pulse_window_ns``, ``sigma_ns``, ``offset_ns``,
``amplitude_mhz``, ``single_photon_mhz``, ``two_photon_mhz``,
``pump_phase_rad``, ``stokes_phase_rad``.  Times are ns, frequencies linear
MHz (amplitudes in the coupling convention, see vsystem).

``[decoherence]``: ``preset = "device"`` or explicit ``t1_0_us``,
``t2_0_us``, ``t1_1_us``, ``t2_1_us``.

``[simulate]``: ``initial_states`` (subset of "0","g","1"),
``observables`` ("populations", "eigen_overlaps"), ``steps``, ``label``.

``[calibrate]``: ``kind`` ("pi" | "half_pi" | "phase"),
``amplitude_min_mhz``, ``amplitude_max_mhz``, ``points``, ``steps``,
``phase_points``, ``amplitude_mhz`` (fixed amplitude for the phase sweep;
defaults to the half-rotation crossing).

``[tomography]``: ``gates`` (list of "pi"/"half_pi"), ``initial_states``,
``alpha_g``, ``alpha_0``, ``alpha_1``, ``shot_noise_sigma``, ``steps``.

``[sweep]``: ``kind`` ("map" | "common_region" | "robustness" |
"baseline"); maps: ``detuning_min_mhz``/``max``/``points``,
``amplitude_min_mhz``/``max``/``points``, ``sigma_ns``, ``steps``;
common_region adds ``tolerance``; robustness: ``axes``, ``rotations``,
``initial_states``, ``deviation_min``, ``deviation_max``, ``points``,
``include_baseline``, ``steps``.

``[device]``: ``pad_capacitance_ff``, ``coupling_capacitance_ff``,
``josephson_energy_ghz`` (all optional; defaults to the least-squares fit),
``coupling_mhz``, ``cavity_freq_ghz``, ``levels``, ``cavity_levels``.
"""

from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, device, gates, propagator, spectral, sweeps, tomography
from .propagator import KET_0, KET_1, pure_density
from .vsystem import DEVICE_COHERENCE, DecoherenceTimes, edge_discontinuity


class ConfigError(ValueError):
    """Configuration rejected before any computation."""


# ---------------------------------------------------------------------------
# schema validation

_PROTOCOL_KEYS = {
    "preset": str,
    "pulse_window_ns": float,
    "sigma_ns": float,
    "offset_ns": float,
    "amplitude_mhz": float,
    "single_photon_mhz": float,
    "two_photon_mhz": float,
    "pump_phase_rad": float,
    "stokes_phase_rad": float,
}

_SCHEMA: dict[str, dict[str, type]] = {
    "protocol": _PROTOCOL_KEYS,
    "decoherence": {
        "preset": str,
        "t1_0_us": float,
        "t2_0_us": float,
        "t1_1_us": float,
        "t2_1_us": float,
    },
    "simulate": {
        "initial_states": list,
        "observables": list,
        "steps": int,
        "label": str,
    },
    "calibrate": {
        "kind": str,
        "amplitude_min_mhz": float,
        "amplitude_max_mhz": float,
        "points": int,
        "steps": int,
        "phase_points": int,
        "amplitude_mhz": float,
    },
    "tomography": {
        "gates": list,
        "initial_states": list,
        "alpha_g": float,
        "alpha_0": float,
        "alpha_1": float,
        "shot_noise_sigma": float,
        "steps": int,
    },
    "sweep": {
        "kind": str,
        "detuning_min_mhz": float,
        "detuning_max_mhz": float,
        "detuning_points": int,
        "amplitude_min_mhz": float,
        "amplitude_max_mhz": float,
        "amplitude_points": int,
        "sigma_ns": float,
        "steps": int,
        "tolerance": float,
        "axes": list,
        "rotations": list,
        "initial_states": list,
        "deviation_min": float,
        "deviation_max": float,
        "points": int,
        "include_baseline": bool,
    },
    "device": {
        "pad_capacitance_ff": float,
        "coupling_capacitance_ff": float,
        "josephson_energy_ghz": float,
        "coupling_mhz": float,
        "cavity_freq_ghz": float,
        "levels": int,
        "cavity_levels": int,
    },
}

_TOP_LEVEL = {"campaign": str, "seed": int, "out_dir": str}

CAMPAIGNS = ("simulate", "calibrate", "tomography", "sweep", "device-report")


def validate_config(config: dict) -> None:
    """Schema-check a parsed config; raises ConfigError naming the first
    offending key."""
    if not isinstance(config, dict):
        raise ConfigError("config must be a table")
    campaign = config.get("campaign")
    if campaign is None:
        raise ConfigError("missing required key 'campaign'")
    if campaign not in CAMPAIGNS:
        raise ConfigError(f"unknown campaign {campaign!r}; expected one of {CAMPAIGNS}")
    for key, value in config.items():
        if key in _TOP_LEVEL:
            _check_type(key, value, _TOP_LEVEL[key])
        elif key in _SCHEMA:
            table = value
            if not isinstance(table, dict):
                raise ConfigError(f"key {key!r} must be a table")
            for sub, subval in table.items():
                if sub not in _SCHEMA[key]:
                    raise ConfigError(f"unknown key {key + '.' + sub!r}")
                _check_type(f"{key}.{sub}", subval, _SCHEMA[key][sub])
        else:
            raise ConfigError(f"unknown key {key!r}")


def _check_type(path: str, value, expected: type) -> None:
    if expected is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"key {path!r} must be a number")
    elif expected is int:
        if not isinstance(value, int) or isinstance(value, bool):
            raise ConfigError(f"key {path!r} must be an integer")
    elif not isinstance(value, expected):
        raise ConfigError(f"key {path!r} must be {expected.__name__}")


def load_config(path: str | Path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as err:
        raise ConfigError(f"config does not parse: {err}") from err


# ---------------------------------------------------------------------------
# protocol and decoherence construction

_PROTOCOL_PRESETS = {
    "resonant": dict(
        pulse_window_ns=825.0, sigma_ns=133.0, offset_ns=206.0,
        amplitude_mhz=gates.RESONANT_AMPLITUDE_MHZ, single_photon_mhz=0.0,
    ),
    "detuned_pi": dict(
        pulse_window_ns=206.0, sigma_ns=33.0, offset_ns=54.0,
        amplitude_mhz=gates.PI_SEED_AMPLITUDE_MHZ, single_photon_mhz=15.0,
    ),
    "detuned_half_pi": dict(
        pulse_window_ns=206.0, sigma_ns=33.0, offset_ns=54.0,
        amplitude_mhz=gates.HALF_PI_SEED_AMPLITUDE_MHZ, single_photon_mhz=15.0,
    ),
}

_GEOMETRY_KEYS = ("pulse_window_ns", "sigma_ns", "offset_ns", "amplitude_mhz")


def protocol_from_config(pcfg: dict) -> gates.StirapProtocol:
    params = dict(two_photon_mhz=0.0, pump_phase=0.0, stokes_phase=0.0)
    preset = pcfg.get("preset")
    if preset is not None:
        if preset not in _PROTOCOL_PRESETS:
            raise ConfigError(
                f"unknown protocol.preset {preset!r}; expected one of {sorted(_PROTOCOL_PRESETS)}"
            )
        params.update(_PROTOCOL_PRESETS[preset])
    for key in _PROTOCOL_KEYS:
        if key in ("preset", "pump_phase_rad", "stokes_phase_rad"):
            continue
        if key in pcfg:
            params[key] = float(pcfg[key])
    params["pump_phase"] = float(pcfg.get("pump_phase_rad", 0.0))
    params["stokes_phase"] = float(pcfg.get("stokes_phase_rad", 0.0))
    missing = [k for k in _GEOMETRY_KEYS if k not in params]
    if missing:
        raise ConfigError(f"protocol is missing key {missing[0]!r} (no preset given)")
    return gates.make_protocol(**params)


def decoherence_from_config(dcfg: Optional[dict]) -> Optional[DecoherenceTimes]:
    if not dcfg:
        return None
    if dcfg.get("preset") == "device":
        return DEVICE_COHERENCE
    if "preset" in dcfg:
        raise ConfigError(f"unknown decoherence.preset {dcfg['preset']!r}")
    needed = ("t1_0_us", "t2_0_us", "t1_1_us", "t2_1_us")
    missing = [k for k in needed if k not in dcfg]
    if missing:
        raise ConfigError(f"decoherence is missing key {missing[0]!r}")
    return DecoherenceTimes(
        t1_0=float(dcfg["t1_0_us"]),
        t2_0=float(dcfg["t2_0_us"]),
        t1_1=float(dcfg["t1_1_us"]),
        t2_1=float(dcfg["t2_1_us"]),
    )


# ---------------------------------------------------------------------------
# output helpers


@dataclass
class OutputFile:
    path: Path
    x_column: str
    y_columns: list[str]
    title: str


@dataclass
class RunManifest:
    config_sha256: str
    tool_version: str
    wall_clock_s: float
    outputs: dict[str, str]  # filename -> sha256
    metadata: dict = field(default_factory=dict)

    def write(self, out_dir: Path) -> Path:
        path = out_dir / "manifest.json"
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2, sort_keys=True)
            fh.write("\n")
        return path


def _format_value(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (str, np.str_)):
        return str(x)
    return f"{x:.12g}"


def write_columns(path: Path, columns: dict[str, np.ndarray], meta: dict) -> None:
    """UTF-8 columnar text: '#'-prefixed metadata lines (provenance, units),
    a header row, then one row per grid point."""
    names = list(columns)
    rows = len(next(iter(columns.values())))
    with open(path, "w", encoding="utf-8") as fh:
        for key in sorted(meta):
            fh.write(f"# {key}: {meta[key]}\n")
        fh.write(",".join(names) + "\n")
        for i in range(rows):
            fh.write(",".join(_format_value(columns[name][i]) for name in names) + "\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    digest.update(path.read_bytes())
    return digest.hexdigest()


# ---------------------------------------------------------------------------
# campaign executors (each returns a list of OutputFile)

_UNITS_META = {"time_unit": "ns", "frequency_unit": "MHz (linear)"}


def _trace_columns(trace: propagator.EvolutionTrace) -> dict[str, np.ndarray]:
    return trace.as_columns()


def _run_simulate(config: dict, out_dir: Path, seed: int, jobs: int) -> list[OutputFile]:
    pcfg = config.get("protocol", {})
    scfg = config.get("simulate", {})
    proto = protocol_from_config(pcfg)
    dec = decoherence_from_config(config.get("decoherence"))
    steps = int(scfg.get("steps", propagator.DEFAULT_STEPS))
    label = scfg.get("label", "trace")
    initial_states = scfg.get("initial_states", ["0"])
    observables = scfg.get("observables", ["populations"])
    for obs in observables:
        if obs not in ("populations", "eigen_overlaps", "adiabaticity_margins"):
            raise ConfigError(f"unknown observable {obs!r}")
    outputs: list[OutputFile] = []
    grid = proto.time_grid(steps)
    meta = {
        **_UNITS_META,
        "campaign": "simulate",
        "open_system": dec is not None,
        "truncation_edge_fraction": f"{edge_discontinuity(proto.pump):.3e}",
    }
    if "adiabaticity_margins" in observables:
        report = spectral.adiabaticity_margins(
            gates.as_vsystem(proto), grid[:: max(1, grid.size // 500)], exclude_edges_ns=2.0
        )
        cols = report.as_columns()
        path = out_dir / f"{label}_margins.csv"
        write_columns(path, cols, {**meta, "worst_ratio": f"{report.worst_ratio:.4f}"})
        outputs.append(
            OutputFile(path, "time_ns", ["ratio_1", "ratio_2", "ratio_3"],
                       "adiabaticity-condition margins")
        )
    if dec is not None and "eigen_overlaps" in observables:
        raise ConfigError("eigen_overlaps are defined for closed-system trajectories; "
                          "drop the decoherence table or the observable")
    for init in initial_states:
        psi0 = propagator.ket(init)
        sysv = gates.as_vsystem(proto, dec)
        if dec is not None:
            trace, _ = propagator.propagate_lindblad(sysv, pure_density(psi0), grid)
        elif "eigen_overlaps" in observables:
            trace = propagator.eigenbasis_overlap_trace(sysv, psi0, grid)
        else:
            trace = propagator.population_trace(sysv, psi0, grid)
        cols = _trace_columns(trace)
        path = out_dir / f"{label}_init{init}.csv"
        write_columns(path, cols, {**meta, "initial_state": init})
        outputs.append(
            OutputFile(path, "time_ns", [c for c in cols if c != "time_ns"],
                       f"populations from |{init}>")
        )
    return outputs


def _run_calibrate(config: dict, out_dir: Path, seed: int, jobs: int) -> list[OutputFile]:
    pcfg = config.get("protocol", {"preset": "detuned_pi"})
    ccfg = config.get("calibrate", {})
    proto = protocol_from_config(pcfg)
    kind = ccfg.get("kind", "pi")
    steps = int(ccfg.get("steps", propagator.DEFAULT_STEPS))
    amp_grid = np.linspace(
        float(ccfg.get("amplitude_min_mhz", 5.0)),
        float(ccfg.get("amplitude_max_mhz", 25.0)),
        int(ccfg.get("points", 61)),
    )
    meta = {**_UNITS_META, "campaign": "calibrate", "kind": kind}
    outputs: list[OutputFile] = []
    if kind in ("pi", "half_pi"):
        result = gates.calibrate_amplitude(proto, amp_grid, kind=kind, steps=steps)
        cols = {"amplitude_mhz": result.grid, **result.curves}
        path = out_dir / f"calibration_{kind}.csv"
        write_columns(
            path, cols,
            {**meta, "optimal_amplitude_mhz": f"{result.optimal_amplitude:.6f}",
             "metric_value": f"{result.metric_value:.6f}"},
        )
        outputs.append(OutputFile(path, "amplitude_mhz", list(result.curves), f"{kind} amplitude sweep"))
    elif kind == "phase":
        if "amplitude_mhz" in ccfg:
            amplitude = float(ccfg["amplitude_mhz"])
        else:
            amplitude = gates.calibrate_amplitude(
                proto, amp_grid, kind="half_pi", steps=steps
            ).optimal_amplitude
        betas = np.linspace(0.0, 2.0 * np.pi, int(ccfg.get("phase_points", 121)))
        result = gates.calibrate_phase(proto, amplitude, betas, steps=steps)
        cols = {"phase_rad": result.grid, **result.curves}
        path = out_dir / "calibration_phase.csv"
        write_columns(
            path, cols,
            {**meta, "amplitude_mhz": f"{amplitude:.6f}",
             "optimal_phase_rad": f"{result.optimal_phase:.6f}",
             "metric_value": f"{result.metric_value:.6f}"},
        )
        outputs.append(OutputFile(path, "phase_rad", list(result.curves), "common-phase sweep"))
    else:
        raise ConfigError(f"unknown calibrate.kind {kind!r}")
    return outputs


def _calibrated_rotation(proto_seed, kind: str, steps: int):
    """Amplitude- (and for the half rotation, phase-) calibrated protocol
    plus the ideal target states for initial |0> and |1>."""
    grid = np.linspace(5.0, 25.0, 61)
    if kind == "pi":
        amp = gates.calibrate_amplitude(proto_seed, grid, kind="pi", steps=steps).optimal_amplitude
        proto = gates.with_amplitude(proto_seed, amp)
        targets = {"0": KET_1.copy(), "1": KET_0.copy()}
        return proto, targets
    amp = gates.calibrate_amplitude(proto_seed, grid, kind="half_pi", steps=steps).optimal_amplitude
    betas = np.linspace(0.0, 2.0 * np.pi, 121)
    phase = gates.calibrate_phase(proto_seed, amp, betas, steps=steps).optimal_phase
    proto = gates.apply_axis_phase(gates.with_amplitude(proto_seed, amp), phase)
    plus = (KET_0 + KET_1) / np.sqrt(2.0)
    minus = (KET_0 - KET_1) / np.sqrt(2.0)
    return proto, {"0": plus, "1": minus}


def _run_tomography(config: dict, out_dir: Path, seed: int, jobs: int) -> list[OutputFile]:
    tcfg = config.get("tomography", {})
    pcfg = config.get("protocol", {"preset": "detuned_pi"})
    dec = decoherence_from_config(config.get("decoherence"))
    steps = int(tcfg.get("steps", propagator.DEFAULT_STEPS))
    model = tomography.MeasurementModel(
        alpha_g=float(tcfg.get("alpha_g", 0.0)),
        alpha_0=float(tcfg.get("alpha_0", 1.0)),
        alpha_1=float(tcfg.get("alpha_1", 2.0)),
        shot_noise_sigma=float(tcfg.get("shot_noise_sigma", 0.0)),
    )
    rotations = tcfg.get("gates", ["pi", "half_pi"])
    initial_states = tcfg.get("initial_states", ["0", "1"])
    proto_seed = protocol_from_config(pcfg)
    rows = {"gate": [], "initial": [], "fidelity": [], "residual": [], "min_eigenvalue": []}
    matrices: dict[str, np.ndarray] = {}
    for k, kind in enumerate(rotations):
        if kind not in ("pi", "half_pi"):
            raise ConfigError(f"unknown tomography gate {kind!r}")
        proto, targets = _calibrated_rotation(proto_seed, kind, steps)
        for init in initial_states:
            psi0 = propagator.ket(init)
            sysv = gates.as_vsystem(proto, dec)
            if dec is None:
                u = gates.protocol_unitary(proto, steps)
                rho = pure_density(u @ psi0)
            else:
                _, rho = propagator.propagate_lindblad(
                    sysv, pure_density(psi0), proto.time_grid(steps)
                )
            record = tomography.simulate_measurements(rho, model, seed=seed + k)
            est = tomography.mle_project(record, model)
            fid = tomography.state_fidelity(est.rho, pure_density(targets[init]))
            rows["gate"].append(kind)
            rows["initial"].append(init)
            rows["fidelity"].append(fid)
            rows["residual"].append(est.residual)
            rows["min_eigenvalue"].append(est.min_eigenvalue)
            matrices[f"{kind}_init{init}"] = est.rho
    path = out_dir / "tomography_fidelities.csv"
    write_columns(
        path,
        {k: np.asarray(v) for k, v in rows.items()},
        {**_UNITS_META, "campaign": "tomography",
         "measurement_amplitudes": f"({model.alpha_g}, {model.alpha_0}, {model.alpha_1})",
         "shot_noise_sigma": model.shot_noise_sigma, "open_system": dec is not None},
    )
    outputs = [OutputFile(path, "gate", ["fidelity"], "reconstructed-state fidelities")]
    mat_path = out_dir / "tomography_states.json"
    payload = {
        name: {"real": rho.real.tolist(), "imag": rho.imag.tolist()}
        for name, rho in sorted(matrices.items())
    }
    with open(mat_path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
    outputs.append(OutputFile(mat_path, "", [], "reconstructed density matrices"))
    return outputs


def _run_sweep(config: dict, out_dir: Path, seed: int, jobs: int) -> list[OutputFile]:
    scfg = config.get("sweep", {})
    kind = scfg.get("kind", "map")
    steps = int(scfg.get("steps", propagator.DEFAULT_STEPS))
    outputs: list[OutputFile] = []
    if kind in ("map", "common_region"):
        grid = sweeps.SweepGrid(
            axes=(
                sweeps.AxisSpec(
                    "detuning_mhz",
                    float(scfg.get("detuning_min_mhz", 0.0)),
                    float(scfg.get("detuning_max_mhz", 40.0)),
                    int(scfg.get("detuning_points", 81)),
                ),
                sweeps.AxisSpec(
                    "amplitude_mhz",
                    float(scfg.get("amplitude_min_mhz", 0.0)),
                    float(scfg.get("amplitude_max_mhz", 40.0)),
                    int(scfg.get("amplitude_points", 81)),
                ),
            )
        )
        template = gates.detuned_preset("pi", sigma_ns=float(scfg.get("sigma_ns", 40.0)))
        map0, map1 = sweeps.transfer_maps(template, grid, steps=steps, jobs=jobs)
        det = grid.axes[0].values()
        amp = grid.axes[1].values()
        mesh_d, mesh_a = np.meshgrid(det, amp, indexing="ij")
        base_cols = {
            "detuning_mhz": mesh_d.ravel(),
            "amplitude_mhz": mesh_a.ravel(),
        }
        meta = {**_UNITS_META, "campaign": "sweep", "kind": kind, "sigma_ns": template.pump.sigma}
        if kind == "map":
            for name, result in (("from0", map0), ("from1", map1)):
                cols = {**base_cols, "transfer": result.values.ravel()}
                for level in (0.5, 0.999):
                    mask = sweeps.level_crossing_mask(result.values, level)
                    cols[f"contour_{level}"] = mask.ravel()
                path = out_dir / f"transfer_map_{name}.csv"
                write_columns(path, cols, {**meta, "initial": result.metadata["initial"]})
                outputs.append(OutputFile(path, "amplitude_mhz", ["transfer"], f"transfer map {name}"))
        else:
            tol = float(scfg.get("tolerance", 1e-3))
            half = sweeps.common_region(map0, map1, 0.5, tol)
            full = sweeps.common_region(map0, map1, 1.0, tol)
            cols = {
                **base_cols,
                "equal_superposition_region": half.ravel(),
                "complete_transfer_region": full.ravel(),
            }
            path = out_dir / "common_regions.csv"
            write_columns(path, cols, {**meta, "tolerance": tol})
            outputs.append(
                OutputFile(path, "amplitude_mhz",
                           ["equal_superposition_region", "complete_transfer_region"],
                           "initial-state-independent operating regions")
            )
    elif kind == "robustness":
        pcfg = config.get("protocol", {"preset": "detuned_pi"})
        proto_seed = protocol_from_config(pcfg)
        dec = decoherence_from_config(config.get("decoherence"))
        axes = scfg.get("axes", ["amplitude_deviation"])
        rotations = scfg.get("rotations", ["pi"])
        initial_states = scfg.get("initial_states", ["0"])
        dev_grid = np.linspace(
            float(scfg.get("deviation_min", -0.10)),
            float(scfg.get("deviation_max", 0.10)),
            int(scfg.get("points", 41)),
        )
        include_baseline = bool(scfg.get("include_baseline", False))
        for axis in axes:
            cols: dict[str, np.ndarray] = {"deviation": dev_grid}
            for kind_rot in rotations:
                proto, targets = _calibrated_rotation(proto_seed, kind_rot, steps)
                for init in initial_states:
                    curve = sweeps.robustness_curve(
                        proto, axis, dev_grid, init, targets[init],
                        steps=steps, decoherence=dec, jobs=jobs,
                    )
                    cols[f"infidelity_{kind_rot}_from{init}"] = curve.values
                if include_baseline:
                    angle = np.pi if kind_rot == "pi" else np.pi / 2.0
                    rabi = sweeps.baseline_amplitude_for_angle(proto.total_window, angle)
                    ideal = _ideal_baseline_target(kind_rot)
                    base = sweeps.dynamical_baseline(
                        rabi, proto.total_window, axis, dev_grid, ideal,
                        frequency_scale_mhz=proto.drive.single_photon, steps=steps,
                    )
                    cols[f"infidelity_baseline_{kind_rot}"] = base.values
            path = out_dir / f"robustness_{axis}.csv"
            write_columns(
                path, cols,
                {**_UNITS_META, "campaign": "sweep", "kind": "robustness",
                 "axis": axis, "open_system": dec is not None},
            )
            outputs.append(
                OutputFile(path, "deviation", [c for c in cols if c != "deviation"],
                           f"state infidelity vs {axis}")
            )
    else:
        raise ConfigError(f"unknown sweep.kind {kind!r}")
    return outputs


def _ideal_baseline_target(kind: str) -> np.ndarray:
    if kind == "pi":
        return KET_1.copy()
    # resonant half rotation about x prepares (|0> - i|1>)/sqrt(2)
    return (KET_0 - 1j * KET_1) / np.sqrt(2.0)


def _run_device_report(config: dict, out_dir: Path, seed: int, jobs: int) -> list[OutputFile]:
    dcfg = config.get("device", {})
    explicit = all(
        k in dcfg for k in ("pad_capacitance_ff", "coupling_capacitance_ff", "josephson_energy_ghz")
    )
    if explicit:
        params = device.CircuitParams(
            pad_capacitance_ff=float(dcfg["pad_capacitance_ff"]),
            coupling_capacitance_ff=float(dcfg["coupling_capacitance_ff"]),
            josephson_energy_ghz=float(dcfg["josephson_energy_ghz"]),
        )
        fit_residual = None
    else:
        params, fit_residual = device.fit_circuit_params()
    rows = device.device_report(params)
    modes = device.reduce_circuit(params)
    oracle = device.exact_diagonalization_oracle(
        modes,
        float(dcfg.get("coupling_mhz", device.MEASURED_DEVICE["coupling_mhz"])),
        float(dcfg.get("cavity_freq_ghz", device.MEASURED_DEVICE["cavity_freq_ghz"])),
        levels=int(dcfg.get("levels", 6)),
        cavity_levels=int(dcfg.get("cavity_levels", 5)),
    )
    rows.append({"quantity": "chi_bright_mhz[numeric_oracle]",
                 "model": oracle["chi_bright_mhz"],
                 "measured": device.MEASURED_DEVICE["chi_bright_mhz"]})
    rows.append({"quantity": "chi_dark_mhz[numeric_oracle]",
                 "model": oracle["chi_dark_mhz"],
                 "measured": device.MEASURED_DEVICE["chi_dark_mhz"]})
    cols = {
        "quantity": np.array([r["quantity"] for r in rows]),
        "model_value": np.array([r["model"] for r in rows]),
        "measured_value": np.array([r["measured"] for r in rows]),
    }
    meta = {
        "campaign": "device-report",
        "pad_capacitance_ff": f"{params.pad_capacitance_ff:.4f}",
        "coupling_capacitance_ff": f"{params.coupling_capacitance_ff:.4f}",
        "josephson_energy_ghz": f"{params.josephson_energy_ghz:.4f}",
        "note": "dispersive-shift comparison is reported, not asserted",
    }
    if fit_residual is not None:
        meta["fit_residual"] = f"{fit_residual:.6f}"
    path = out_dir / "device_report.csv"
    write_columns(path, cols, meta)
    return [OutputFile(path, "quantity", ["model_value", "measured_value"], "device parameter comparison")]


_EXECUTORS: dict[str, Callable] = {
    "simulate": _run_simulate,
    "calibrate": _run_calibrate,
    "tomography": _run_tomography,
    "sweep": _run_sweep,
    "device-report": _run_device_report,
}


# ---------------------------------------------------------------------------
# figure presets

#: bundled gate calibration values (61-point sweep over [5, 25] MHz and a
#: 121-point common-phase sweep at the crossing amplitude)
PI_AMPLITUDE_MHZ = 19.6
HALF_PI_AMPLITUDE_MHZ = 9.214


def _preset_catalog() -> dict[str, dict]:
    sim = lambda **kw: {"campaign": "simulate", **kw}  # noqa: E731
    catalog: dict[str, dict] = {
        "fig1c": {
            "description": "panel 1c: resonant transfer populations, initial |0>",
            "config": sim(
                protocol={"preset": "resonant"},
                simulate={"initial_states": ["0"], "observables": ["populations"], "label": "resonant"},
            ),
        },
        "fig1d": {
            "description": "panel 1d: resonant drive populations, initial |1> (no transfer)",
            "config": sim(
                protocol={"preset": "resonant"},
                simulate={"initial_states": ["1"], "observables": ["populations"], "label": "resonant"},
            ),
        },
        "fig2a": {
            "description": "panel 2a: detuned full-rotation populations, both initial states",
            "config": sim(
                protocol={"preset": "detuned_pi", "amplitude_mhz": PI_AMPLITUDE_MHZ},
                simulate={"initial_states": ["0", "1"], "observables": ["populations"], "label": "detuned_pi"},
            ),
        },
        "fig2b": {
            "description": "panel 2b: adiabatic-frame overlaps of the full rotation",
            "config": sim(
                protocol={"preset": "detuned_pi", "amplitude_mhz": PI_AMPLITUDE_MHZ},
                simulate={
                    "initial_states": ["0", "1"],
                    "observables": ["populations", "eigen_overlaps"],
                    "label": "detuned_pi_frame",
                },
            ),
        },
        "fig2c": {
            "description": "panel 2c: detuned half-rotation populations, both initial states",
            "config": sim(
                protocol={"preset": "detuned_half_pi", "amplitude_mhz": HALF_PI_AMPLITUDE_MHZ},
                simulate={"initial_states": ["0", "1"], "observables": ["populations"], "label": "detuned_half"},
            ),
        },
        "fig2d": {
            "description": "panel 2d: adiabatic-frame overlaps of the half rotation",
            "config": sim(
                protocol={"preset": "detuned_half_pi", "amplitude_mhz": HALF_PI_AMPLITUDE_MHZ},
                simulate={
                    "initial_states": ["0", "1"],
                    "observables": ["populations", "eigen_overlaps"],
                    "label": "detuned_half_frame",
                },
            ),
        },
        "fig3d": {
            "description": "panel 3d: resonant transfer with measured coherences",
            "config": sim(
                protocol={"preset": "resonant"},
                decoherence={"preset": "device"},
                simulate={"initial_states": ["0"], "observables": ["populations"], "label": "resonant_open"},
            ),
        },
        "fig4a": {
            "description": "panel 4a: transfer vs common amplitude for both initial states",
            "config": {
                "campaign": "calibrate",
                "protocol": {"preset": "detuned_pi"},
                "calibrate": {"kind": "pi", "amplitude_min_mhz": 5.0, "amplitude_max_mhz": 25.0, "points": 61},
            },
        },
        "fig4b": {
            "description": "panel 4b: overlap with the equal superposition vs common phase",
            "config": {
                "campaign": "calibrate",
                "protocol": {"preset": "detuned_half_pi"},
                "calibrate": {"kind": "phase", "phase_points": 121},
            },
        },
        "fig5": {
            "description": "panel 5: tomography fidelities of the four prepared states",
            "config": {
                "campaign": "tomography",
                "protocol": {"preset": "detuned_pi"},
                "decoherence": {"preset": "device"},
                "tomography": {"gates": ["pi", "half_pi"], "initial_states": ["0", "1"]},
            },
        },
        "fig6a": {
            "description": "panel 6a: rotation infidelity vs amplitude deviation",
            "config": {
                "campaign": "sweep",
                "protocol": {"preset": "detuned_pi"},
                "sweep": {
                    "kind": "robustness", "axes": ["amplitude_deviation"],
                    "rotations": ["pi", "half_pi"], "initial_states": ["0"], "points": 41,
                },
            },
        },
        "fig6b": {
            "description": "panel 6b: rotation infidelity vs detuning deviation",
            "config": {
                "campaign": "sweep",
                "protocol": {"preset": "detuned_pi"},
                "sweep": {
                    "kind": "robustness", "axes": ["frequency_deviation"],
                    "rotations": ["pi", "half_pi"], "initial_states": ["0"], "points": 41,
                },
            },
        },
        "fig9a": {
            "description": "panels 9a: transferred population over the detuning-amplitude plane",
            "config": {"campaign": "sweep", "sweep": {"kind": "map"}},
        },
        "fig9b": {
            "description": "panel 9b: initial-state-independent operating regions (tolerance 1e-3)",
            "config": {"campaign": "sweep", "sweep": {"kind": "common_region", "tolerance": 1e-3}},
        },
        "fig9c": {
            "description": "panel 9c: full-rotation infidelity vs deviations, with resonant baseline",
            "config": {
                "campaign": "sweep",
                "protocol": {"preset": "detuned_pi"},
                "sweep": {
                    "kind": "robustness",
                    "axes": ["amplitude_deviation", "frequency_deviation"],
                    "rotations": ["pi"], "initial_states": ["0", "1"],
                    "include_baseline": True, "points": 41,
                },
            },
        },
        "fig9d": {
            "description": "panel 9d: half-rotation infidelity vs deviations, with resonant baseline",
            "config": {
                "campaign": "sweep",
                "protocol": {"preset": "detuned_half_pi"},
                "sweep": {
                    "kind": "robustness",
                    "axes": ["amplitude_deviation", "frequency_deviation"],
                    "rotations": ["half_pi"], "initial_states": ["0", "1"],
                    "include_baseline": True, "points": 41,
                },
            },
        },
    }
    return catalog


def list_presets() -> dict[str, dict]:
    """Catalog of bundled presets: id -> {description, config}."""
    return _preset_catalog()


# ---------------------------------------------------------------------------
# TOML emission (for presets --write; configs are plain scalar/list tables)


def _toml_scalar(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, list):
        return "[" + ", ".join(_toml_scalar(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value)} to TOML")


def dump_toml(config: dict) -> str:
    lines = []
    for key, value in config.items():
        if not isinstance(value, dict):
            lines.append(f"{key} = {_toml_scalar(value)}")
    for key, value in config.items():
        if isinstance(value, dict):
            lines.append("")
            lines.append(f"[{key}]")
            for sub, subval in value.items():
                lines.append(f"{sub} = {_toml_scalar(subval)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# runner


def run(
    config: dict,
    out_dir: str | Path,
    seed: int = 0,
    jobs: int = 1,
    emit_plot_script: bool = False,
) -> RunManifest:
    """Validate and execute one campaign; writes data files plus a manifest
    with per-output checksums (identical config and seed reproduce identical
    checksums)."""
    validate_config(config)
    out_path = Path(out_dir)
    out_path.mkdir(parents=True, exist_ok=True)
    started = time.monotonic()
    campaign = config["campaign"]
    outputs = _EXECUTORS[campaign](config, out_path, seed, jobs)
    config_bytes = json.dumps(config, sort_keys=True).encode()
    checksums = {out.path.name: _sha256(out.path) for out in outputs}
    manifest = RunManifest(
        config_sha256=hashlib.sha256(config_bytes).hexdigest(),
        tool_version=__version__,
        wall_clock_s=round(time.monotonic() - started, 3),
        outputs=checksums,
        metadata={"campaign": campaign, "seed": seed, "jobs": jobs},
    )
    manifest.write(out_path)
    if emit_plot_script:
        recipe = [
            {
                "file": out.path.name,
                "x": out.x_column,
                "y": out.y_columns,
                "title": out.title,
            }
            for out in outputs
            if out.x_column
        ]
        with open(out_path / "plot_recipe.json", "w", encoding="utf-8") as fh:
            json.dump(recipe, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return manifest


def _error_record(kind: str, message: str) -> str:
    return json.dumps({"error": {"kind": kind, "message": message}})


def main(argv: Optional[list[str]] = None) -> int:
    parser = argparse.ArgumentParser(
        prog="stiraplab",
        description="detuned-STIRAP gate laboratory: simulate, calibrate, "
        "reconstruct, and stress-test three-level rotations",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in CAMPAIGNS:
        p = sub.add_parser(name, help=f"run a {name} campaign")
        src = p.add_mutually_exclusive_group(required=(name != "device-report"))
        src.add_argument("--config", type=str, help="TOML config file")
        src.add_argument("--preset", type=str, help="bundled preset id (see 'presets')")
        p.add_argument("--out", type=str, default=None, help="output directory")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--jobs", type=int, default=None, help="worker count (default: all cores)")
        p.add_argument("--emit-plot-script", action="store_true")
    p_presets = sub.add_parser("presets", help="list bundled figure presets")
    p_presets.add_argument("--write", type=str, default=None, metavar="DIR",
                           help="export every preset config as TOML into DIR")
    args = parser.parse_args(argv)

    if args.command == "presets":
        catalog = list_presets()
        for preset_id in sorted(catalog):
            print(f"{preset_id:8s} {catalog[preset_id]['description']}")
        if args.write:
            target = Path(args.write)
            target.mkdir(parents=True, exist_ok=True)
            for preset_id, entry in sorted(catalog.items()):
                (target / f"{preset_id}.toml").write_text(dump_toml(entry["config"]))
            print(f"wrote {len(catalog)} preset configs to {target}")
        return 0

    try:
        if args.preset is not None:
            catalog = list_presets()
            if args.preset not in catalog:
                raise ConfigError(
                    f"unknown preset {args.preset!r}; run 'stiraplab presets' for the catalog"
                )
            config = catalog[args.preset]["config"]
            if config["campaign"] != args.command:
                raise ConfigError(
                    f"preset {args.preset!r} belongs to campaign {config['campaign']!r}"
                )
        elif args.config is not None:
            config = load_config(args.config)
        else:  # device-report without --config/--preset
            config = {"campaign": "device-report"}
        if config.get("campaign") != args.command:
            raise ConfigError(
                f"config campaign {config.get('campaign')!r} does not match subcommand {args.command!r}"
            )
    except ConfigError as err:
        print(_error_record("config", str(err)), file=sys.stderr)
        return 2

    out_dir = args.out or os.environ.get("STIRAPLAB_OUT") or "stiraplab-out"
    jobs = args.jobs
    if jobs is None:
        env_jobs = os.environ.get("STIRAPLAB_JOBS")
        jobs = int(env_jobs) if env_jobs else (os.cpu_count() or 1)

    try:
        manifest = run(
            config, out_dir, seed=args.seed, jobs=jobs, emit_plot_script=args.emit_plot_script
        )
    except ConfigError as err:
        print(_error_record("config", str(err)), file=sys.stderr)
        return 2
    except gates.CalibrationError as err:
        print(_error_record("calibration", str(err)), file=sys.stderr)
        return 1
    print(f"wrote {len(manifest.outputs)} data file(s) + manifest.json to {out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
