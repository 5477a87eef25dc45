"""Acceptance suite: every release criterion at its stated tolerance.

Each test prints one PASS/FAIL line (run with ``pytest -s`` to stream
them).  Shared expensive computations (the 81x81 parameter maps, the
calibrations) are session fixtures so the whole suite stays within its
runtime budgets.
"""

import time

import numpy as np
import pytest

from stiraplab import cli, device, gates, propagator, spectral, sweeps, tomography
from stiraplab.propagator import KET_0, KET_1, pure_density
from stiraplab.vsystem import DEVICE_COHERENCE


def report(number: int, passed: bool, detail: str) -> None:
    status = "PASS" if passed else "FAIL"
    print(f"\nACCEPTANCE {number} {status}: {detail}")
    assert passed, f"criterion {number}: {detail}"


@pytest.fixture(scope="module")
def pi_calibration():
    start = time.monotonic()
    result = gates.calibrate_amplitude(
        gates.detuned_preset("pi"), np.linspace(5.0, 25.0, 61), kind="pi", steps=2000
    )
    return result, time.monotonic() - start


@pytest.fixture(scope="module")
def half_pi_calibration():
    return gates.calibrate_amplitude(
        gates.detuned_preset("half_pi"), np.linspace(5.0, 25.0, 61), kind="half_pi", steps=2000
    )


@pytest.fixture(scope="module")
def parameter_maps():
    start = time.monotonic()
    maps = sweeps.transfer_maps(
        sweeps.map_preset(), sweeps.DEFAULT_MAP_GRID, steps=2000, jobs=2
    )
    return maps, time.monotonic() - start


def test_criterion_1_resonant_transfer_with_decoherence():
    start = time.monotonic()
    proto = gates.resonant_stirap_preset()
    sysv = gates.as_vsystem(proto, DEVICE_COHERENCE)
    trace, _ = propagator.propagate_lindblad(
        sysv, pure_density(KET_0), proto.time_grid(2000)
    )
    elapsed = time.monotonic() - start
    p1, pg = trace.p1[-1], trace.pg[-1]
    ok = 0.97 <= p1 <= 0.99 and 0.01 <= pg <= 0.03 and elapsed < 10.0
    report(
        1, ok,
        f"resonant open-system transfer P1={p1:.4f} (target [0.97, 0.99]), "
        f"Pg={pg:.4f} (target 0.02 +- 0.01), runtime {elapsed:.1f}s (< 10s)",
    )


def test_criterion_2_full_rotation_calibration(pi_calibration):
    result, elapsed = pi_calibration
    idx = int(np.argmax(result.curves["min_transfer"]))
    agreement = abs(result.curves["p1_from_0"][idx] - result.curves["p0_from_1"][idx])
    leakage = max(result.curves["pg_from_0"][idx], result.curves["pg_from_1"][idx])
    ok = (
        15.0 <= result.optimal_amplitude <= 25.0
        and agreement < 1e-2
        and leakage < 1e-2
        and elapsed < 30.0
    )
    report(
        2, ok,
        f"calibrated amplitude {result.optimal_amplitude:.2f} MHz (target [15, 25]), "
        f"initial-state transfer gap {agreement:.1e} (< 1e-2), leakage {leakage:.1e} "
        f"(< 1e-2), 61-point sweep in {elapsed:.1f}s (< 30s)",
    )


def test_criterion_3_half_rotation_crossing(half_pi_calibration):
    result = half_pi_calibration
    amp = result.optimal_amplitude
    p1, p0, *_ = gates.transfer_curves(
        gates.detuned_preset("half_pi"), np.array([amp]), steps=2000
    )
    ok = abs(p1[0] - 0.5) <= 0.01 and abs(p0[0] - 0.5) <= 0.01
    report(
        3, ok,
        f"transfer curves intersect at amplitude {amp:.3f} MHz with populations "
        f"{p1[0]:.4f} / {p0[0]:.4f} (target 0.500 +- 0.01)",
    )


def test_criterion_4_phase_calibration(half_pi_calibration):
    # the source analysis requires a single-photon detuning greater than
    # 15 MHz for >0.999 preparation fidelity; sweep at 18 and 20 MHz and
    # report the 15 MHz value alongside
    betas = np.linspace(0.0, 2.0 * np.pi, 241)
    maxima = {}
    sinusoidal = True
    periodic = True
    for det in (15.0, 18.0, 20.0):
        proto = gates.with_detuning(gates.detuned_preset("half_pi"), det)
        amp = gates.calibrate_amplitude(
            proto, np.linspace(5.0, 25.0, 61), kind="half_pi", steps=1200
        ).optimal_amplitude
        cal = gates.calibrate_phase(proto, amp, betas, steps=1200)
        f = cal.curves["overlap_from_0"]
        # single-harmonic fit in 2*beta: f ~ a + b*cos(2b) + c*sin(2b)
        design = np.column_stack([np.ones_like(betas), np.cos(2 * betas), np.sin(2 * betas)])
        coef, *_ = np.linalg.lstsq(design, f, rcond=None)
        residual = np.sqrt(np.mean((design @ coef - f) ** 2))
        sinusoidal &= residual < 1e-3
        periodic &= abs(f[0] - f[-1]) < 1e-9  # beta = 0 and beta = 2*pi rows
        maxima[det] = cal.metric_value
    ok = sinusoidal and periodic and maxima[18.0] > 0.999 and maxima[20.0] > 0.999
    report(
        4, ok,
        "phase sweep sinusoidal (single-harmonic fit) and 2*pi-periodic; max overlap "
        + ", ".join(f"{v:.4f} @ {k:g} MHz" for k, v in maxima.items())
        + " (> 0.999 required above 15 MHz)",
    )


def test_criterion_5_adiabatic_carrier_overlap(pi_calibration):
    result, _ = pi_calibration
    proto = gates.with_amplitude(gates.detuned_preset("pi"), result.optimal_amplitude)
    sysv = gates.as_vsystem(proto)
    grid = proto.time_grid(2000)
    tr0 = propagator.eigenbasis_overlap_trace(sysv, KET_0, grid)
    tr1 = propagator.eigenbasis_overlap_trace(sysv, KET_1, grid)

    def prominent_dips(series):
        # count dips at least half as deep as the main excursion: shallow
        # coherent wiggles and the small diabatic blip where the first
        # pulse truncates are secondary structure, not the mid-pulse dip
        from scipy.signal import find_peaks

        depth = 1.0 - series.min()
        peaks, _ = find_peaks(-series, prominence=0.5 * depth)
        return len(peaks)

    ok = (
        tr0.ov_dark.min() >= 0.9
        and tr1.ov_minus.min() >= 0.9
        and prominent_dips(tr0.ov_dark) == 1
        and prominent_dips(tr1.ov_minus) == 1
    )
    report(
        5, ok,
        f"carrier-state overlap minima {tr0.ov_dark.min():.3f} (dark, from |0>) and "
        f"{tr1.ov_minus.min():.3f} (lower branch, from |1>) >= 0.9 with a single "
        f"mid-pulse dip each",
    )


def test_criterion_6_common_regions(parameter_maps):
    (map0, map1), elapsed = parameter_maps
    full = sweeps.common_region(map0, map1, 1.0, 1e-3)
    half = sweeps.common_region(map0, map1, 0.5, 1e-3)
    contours = (
        (map0.values >= 0.999).any()
        and sweeps.level_crossing_mask(map0.values, 0.5).any()
        and sweeps.level_crossing_mask(map1.values, 0.5).any()
    )
    ok = (
        full.sum() > 0
        and half.sum() > 0
        and not (full & half).any()
        and contours
        and elapsed < 600.0
    )
    report(
        6, ok,
        f"81x81 maps: complete-transfer region {int(full.sum())} points, "
        f"equal-superposition region {int(half.sum())} points, disjoint; 0.999 "
        f"and 0.5 contours present; computed in {elapsed:.0f}s (< 600s)",
    )


def test_criterion_7_robustness_crossover(pi_calibration):
    result, _ = pi_calibration
    proto = gates.with_amplitude(gates.detuned_preset("pi"), result.optimal_amplitude)
    grid = np.array([-0.05, -0.03, 0.0, 0.03, 0.05])
    center = 2
    rabi = sweeps.baseline_amplitude_for_angle(proto.total_window, np.pi)
    stirap, baseline = {}, {}
    for axis in ("amplitude_deviation", "frequency_deviation"):
        stirap[axis] = sweeps.robustness_curve(
            proto, axis, grid, "0", KET_1, steps=2000
        ).values
        baseline[axis] = sweeps.dynamical_baseline(
            rabi, proto.total_window, axis, grid, KET_1,
            frequency_scale_mhz=proto.drive.single_photon, steps=2000,
        ).values
    baseline_better_at_zero = all(
        baseline[a][center] < stirap[a][center] for a in stirap
    )
    off_center = [0, 1, 3, 4]  # |deviation| >= 3%
    crossover = any(
        (stirap[a][j] < baseline[a][j]) for a in stirap for j in off_center
    )
    ok = baseline_better_at_zero and crossover
    report(
        7, ok,
        f"at the optimum the resonant baseline wins "
        f"({baseline['amplitude_deviation'][center]:.1e} vs "
        f"{stirap['amplitude_deviation'][center]:.1e}); at >= 3% deviation the "
        f"detuned rotation wins (freq axis at +3%: "
        f"{stirap['frequency_deviation'][3]:.4f} vs {baseline['frequency_deviation'][3]:.4f})",
    )


def test_criterion_8_tomography_round_trip_and_pipeline(half_pi_calibration):
    rng = np.random.default_rng(2024)
    model = tomography.MeasurementModel()
    worst = 1.0
    all_physical = True
    for _ in range(50):
        g = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        rho = g @ g.conj().T
        rho /= np.trace(rho).real
        est = tomography.mle_project(tomography.simulate_measurements(rho, model), model)
        worst = min(worst, tomography.state_fidelity(est.rho, rho))
        all_physical &= est.min_eigenvalue >= -1e-10 and abs(np.trace(est.rho).real - 1) < 1e-9

    # gate + tomography pipeline with the measured coherences
    pi_proto = gates.with_amplitude(gates.detuned_preset("pi"), cli.PI_AMPLITUDE_MHZ)
    half_seed = gates.detuned_preset("half_pi")
    amp = half_pi_calibration.optimal_amplitude
    beta = gates.calibrate_phase(
        half_seed, amp, np.linspace(0, 2 * np.pi, 121), steps=1200
    ).optimal_phase
    half_proto = gates.apply_axis_phase(gates.with_amplitude(half_seed, amp), beta)
    plus = (KET_0 + KET_1) / np.sqrt(2)
    minus = (KET_0 - KET_1) / np.sqrt(2)
    fidelities = {}
    for name, proto, init, target in (
        ("pi|0>", pi_proto, KET_0, KET_1),
        ("pi|1>", pi_proto, KET_1, KET_0),
        ("half|0>", half_proto, KET_0, plus),
        ("half|1>", half_proto, KET_1, minus),
    ):
        sysv = gates.as_vsystem(proto, DEVICE_COHERENCE)
        _, rho = propagator.propagate_lindblad(
            sysv, pure_density(init), proto.time_grid(2000)
        )
        est = tomography.mle_project(tomography.simulate_measurements(rho, model), model)
        fidelities[name] = tomography.state_fidelity(est.rho, pure_density(target))
    ok = worst > 0.9999 and all_physical and min(fidelities.values()) >= 0.98
    report(
        8, ok,
        f"50-state noiseless round trip worst fidelity {worst:.6f} (> 0.9999), "
        f"reconstructions physical; decohered pipeline fidelities "
        + ", ".join(f"{k}={v:.4f}" for k, v in fidelities.items())
        + " (>= 0.98)",
    )


def test_criterion_9_numerical_hygiene(pi_calibration):
    result, _ = pi_calibration
    checks = {}

    # unitarity across the protocol suite
    protocols = [
        gates.resonant_stirap_preset(),
        gates.with_amplitude(gates.detuned_preset("pi"), result.optimal_amplitude),
        gates.with_amplitude(gates.detuned_preset("half_pi"), 9.214),
        gates.with_amplitude(gates.detuned_preset("pi", sigma_ns=40.0), 17.8),
    ]
    unitarity = max(
        np.abs(u.conj().T @ u - np.eye(3)).max()
        for u in (gates.protocol_unitary(p, 2000) for p in protocols)
    )
    checks["unitarity"] = unitarity < 1e-9

    # master-equation trace drift
    proto = protocols[0]
    sysv = gates.as_vsystem(proto, DEVICE_COHERENCE)
    trace, rho = propagator.propagate_lindblad(
        sysv, pure_density(KET_0), proto.time_grid(2000)
    )
    drift = abs(np.trace(rho).real - 1.0)
    checks["trace drift"] = drift < 1e-8

    # analytic vs numeric eigensystem
    rng = np.random.default_rng(17)
    eig_err = 0.0
    for _ in range(30):
        w0, w1 = rng.uniform(0, 200, 2)
        delta = rng.uniform(-100, 150)
        h = 0.5 * np.array(
            [[0, w0, 0], [w0, 2 * delta, w1], [0, w1, 0]], dtype=complex
        )
        frame = spectral.eigenframe(h, spectral.mixing_angles(w0, w1, delta))
        numeric = np.sort(np.linalg.eigvalsh(h))[::-1]
        scale = max(1.0, np.abs(numeric).max())
        eig_err = max(eig_err, np.abs(np.sort(frame.energies)[::-1] - numeric).max() / scale)
    checks["eigensystem agreement"] = eig_err < 1e-10

    # frame-derivative Richardson check: halving dt shrinks the error 4x
    sys_pi = gates.as_vsystem(protocols[1])
    ref = spectral.adiabatic_hamiltonian(sys_pi, 120.0, dt=0.01)
    err1 = np.abs(spectral.adiabatic_hamiltonian(sys_pi, 120.0, dt=0.8) - ref).max()
    err2 = np.abs(spectral.adiabatic_hamiltonian(sys_pi, 120.0, dt=0.4) - ref).max()
    checks["frame-derivative order"] = abs(err1 / err2 - 4.0) < 0.5

    # closed-form full-rotation operator vs propagation (adiabatic shape)
    adiabatic = protocols[3]
    ua = gates.analytic_pi_unitary(adiabatic)
    un = gates.protocol_unitary(adiabatic, steps=4000)
    mismatch = np.abs(np.abs(ua) ** 2 - np.abs(un) ** 2).max()
    checks["closed-form vs propagation"] = mismatch < 1e-2

    ok = all(checks.values())
    report(
        9, ok,
        f"unitarity {unitarity:.1e} (<1e-9), trace drift {drift:.1e} (<1e-8), "
        f"eigensystem {eig_err:.1e} (<1e-10), frame-derivative ratio "
        f"{err1 / err2:.2f} (~4), analytic-unitary mismatch {mismatch:.1e} (<1e-2)"
        + ("" if ok else f"; failing: {[k for k, v in checks.items() if not v]}"),
    )


def test_criterion_10_device_identities(tmp_path):
    params = device.CircuitParams(70.0, 9.0, 12.0)
    modes = device.reduce_circuit(params)
    id_kerr = modes.cross_kerr_mhz**2 == pytest.approx(
        modes.bright_anharm_mhz * modes.dark_anharm_mhz, rel=1e-14
    )
    ratio = 1.0 + 2.0 * params.coupling_capacitance_ff / params.pad_capacitance_ff
    id_ratio = modes.dark_anharm_mhz / modes.bright_anharm_mhz == pytest.approx(
        ratio, rel=1e-14
    )

    mp = device.ModeParams(4.361, 4.792, 100.0, 130.0, 180.0, 100.0, 130.0)
    delta_b = (4.361 - 7.205) * 1e3
    within = True
    for g in (20.0, 50.0, 150.0):
        oracle = device.exact_diagonalization_oracle(mp, g, 7.205, levels=6, cavity_levels=5)
        formula = device.dispersive_shifts(g, delta_b, 100.0, 180.0)
        within &= abs(oracle["chi_bright_mhz"] / formula.chi_bright_mhz - 1.0) < 0.10

    manifest = cli.run({"campaign": "device-report"}, tmp_path)
    emitted = "device_report.csv" in manifest.outputs

    ok = id_kerr and id_ratio and within and emitted
    report(
        10, ok,
        "cross-Kerr^2 = anharmonicity product (exact), anharmonicity ratio = "
        "1 + 2*Cc/C (exact), perturbative shift within 10% of the "
        "diagonalization oracle, comparison report emitted (agreement with the "
        "measured shifts documented as a discrepancy, not asserted)",
    )
