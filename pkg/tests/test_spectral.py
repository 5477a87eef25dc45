import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stiraplab import gates, spectral
from stiraplab.spectral import (
    AngleUndefinedError,
    adiabatic_hamiltonian,
    adiabaticity_margins,
    eigenenergies,
    eigenframe,
    mixing_angles,
    rotation_matrix,
)
from stiraplab.vsystem import DriveConfig, PulseEnvelope, VSystem, hamiltonian_at

TWO_PI = 2.0 * np.pi


class TestMixingAngles:
    def test_counter_intuitive_start(self):
        ang = mixing_angles(0.0, TWO_PI * 20.0, TWO_PI * 15.0)
        assert ang.theta == 0.0

    def test_equal_amplitudes_symmetry(self):
        ang = mixing_angles(5.0, 5.0, 1.0)
        assert ang.theta == pytest.approx(np.pi / 4)

    def test_resonant_limit(self):
        ang = mixing_angles(TWO_PI * 20.0 / np.sqrt(2), TWO_PI * 20.0 / np.sqrt(2), 0.0)
        assert 2 * ang.phi == pytest.approx(np.pi / 2)
        assert ang.omega_rms == pytest.approx(TWO_PI * 20.0)

    def test_rms_identity(self):
        ang = mixing_angles(3.0 + 4.0j, 12.0, 7.0)
        assert ang.omega_rms**2 == pytest.approx(25.0 + 144.0, rel=1e-12)

    def test_both_zero_raises(self):
        with pytest.raises(AngleUndefinedError):
            mixing_angles(0.0, 0.0, 5.0)


class TestRotationMatrix:
    def test_structure_at_zero_angles(self):
        r = rotation_matrix(mixing_angles(0.0, 1.0, 1e9))  # theta=0, phi~0
        expected = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
        assert np.abs(r - expected).max() < 1e-6

    @given(
        st.floats(min_value=0.0, max_value=200.0),
        st.floats(min_value=0.0, max_value=200.0),
        st.floats(min_value=-150.0, max_value=150.0),
    )
    @settings(max_examples=80, deadline=None)
    def test_orthogonality(self, w0, w1, delta):
        if w0 == 0.0 and w1 == 0.0:
            return
        r = rotation_matrix(mixing_angles(w0, w1, delta))
        assert np.abs(r @ r.T - np.eye(3)).max() < 1e-12

    def test_midpoint_values_match_direct_formula(self):
        # independent evaluation of the matrix entries at a generic point
        theta, phi = 0.63, 0.31
        ang = spectral.MixingAngles(theta=theta, phi=phi, omega_rms=1.0)
        r = rotation_matrix(ang)
        st_, ct = np.sin(theta), np.cos(theta)
        sp, cp = np.sin(phi), np.cos(phi)
        direct = np.array(
            [[st_ * sp, cp, ct * sp], [ct, 0, -st_], [st_ * cp, -sp, ct * cp]]
        )
        assert np.abs(r - direct).max() == 0.0


def random_hamiltonian(rng):
    w0 = rng.uniform(0.0, 200.0)
    w1 = rng.uniform(0.0, 200.0)
    delta = rng.uniform(-100.0, 150.0)
    h = 0.5 * np.array(
        [[0.0, w0, 0.0], [w0, 2.0 * delta, w1], [0.0, w1, 0.0]], dtype=complex
    )
    return h, w0, w1, delta


class TestEigenframe:
    def test_dark_state_endpoints(self):
        ang = mixing_angles(0.0, 50.0, 30.0)  # theta = 0
        h = 0.5 * np.array([[0, 0, 0], [0, 60.0, 50.0], [0, 50.0, 0]], dtype=complex)
        frame = eigenframe(h, ang)
        assert np.abs(frame.states[1] - np.array([1, 0, 0])).max() < 1e-12
        ang2 = mixing_angles(50.0, 0.0, 30.0)  # theta = pi/2
        h2 = 0.5 * np.array([[0, 50.0, 0], [50.0, 60.0, 0], [0, 0, 0]], dtype=complex)
        frame2 = eigenframe(h2, ang2)
        assert np.abs(frame2.states[1] - np.array([0, 0, -1])).max() < 1e-12

    def test_analytic_matches_dense_eigensolver(self):
        # oracle: numpy's Hermitian eigensolver on the same matrix
        rng = np.random.default_rng(7)
        for _ in range(50):
            h, w0, w1, delta = random_hamiltonian(rng)
            if w0 == 0 and w1 == 0:
                continue
            frame = eigenframe(h, mixing_angles(w0, w1, delta))
            scale = max(np.abs(np.linalg.eigvalsh(h)))
            numeric = np.sort(np.linalg.eigvalsh(h))[::-1]
            analytic = np.sort(frame.energies)[::-1]
            assert np.abs(numeric - analytic).max() < 1e-10 * max(scale, 1.0)

    def test_orthonormal_states(self):
        frame = eigenframe(
            0.5 * np.array([[0, 80.0, 0], [80.0, 100.0, 60.0], [0, 60.0, 0]], dtype=complex),
            mixing_angles(80.0, 60.0, 50.0),
        )
        gram = frame.states.conj() @ frame.states.T
        assert np.abs(gram - np.eye(3)).max() < 1e-10

    def test_dark_state_zero_energy(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            h, w0, w1, delta = random_hamiltonian(rng)
            frame = eigenframe(h, mixing_angles(w0, w1, delta))
            d = frame.states[1]
            assert abs(d.conj() @ h @ d) < 1e-10 * max(1.0, np.linalg.norm(h))

    def test_two_photon_detuning_falls_back_to_numeric(self):
        h = 0.5 * np.array(
            [[0, 50.0, 0], [50.0, 100.0, 50.0], [0, 50.0, 12.0]], dtype=complex
        )
        frame = eigenframe(h, mixing_angles(50.0, 50.0, 50.0))
        assert frame.method == "numeric"
        assert frame.energies[0] >= frame.energies[1] >= frame.energies[2]

    def test_inconsistent_angles_rejected(self):
        h = 0.5 * np.array([[0, 50.0, 0], [50.0, 100.0, 50.0], [0, 50.0, 0]], dtype=complex)
        with pytest.raises(ValueError, match="inconsistent"):
            eigenframe(h, mixing_angles(10.0, 90.0, 50.0))

    def test_phased_drive_frame(self):
        proto = gates.with_phases(gates.detuned_preset("pi"), 0.4, -1.1)
        sysv = gates.as_vsystem(proto)
        h = hamiltonian_at(sysv, 130.0)
        theta, phi, om = spectral.angles_on_grid(sysv, np.array([130.0]))
        ang = spectral.MixingAngles(float(theta[0]), float(phi[0]), float(om[0]))
        frame = eigenframe(h, ang)
        for vec, energy in zip(frame.states, frame.energies):
            assert np.linalg.norm(h @ vec - energy * vec) < 1e-9 * np.linalg.norm(h)


class TestFrameChange:
    def test_frozen_drive_diagonalizes(self):
        # R H R^T at a frozen instant must be diag(e+, 0, e-)
        w0, w1, delta = 90.0, 40.0, 70.0
        h = 0.5 * np.array([[0, w0, 0], [w0, 2 * delta, w1], [0, w1, 0]], dtype=complex)
        ang = mixing_angles(w0, w1, delta)
        r = rotation_matrix(ang)
        had = r @ h.real @ r.T
        e_plus, _, e_minus = eigenenergies(ang.omega_rms, delta)
        assert np.abs(had - np.diag([e_plus, 0.0, e_minus])).max() < 1e-10

    def test_constant_envelope_adiabatic_hamiltonian_is_diagonal(self):
        flat = PulseEnvelope(
            peak_rabi=8.0, center=500.0, sigma=1e6, window_start=0.0, window_end=1000.0
        )
        sys = VSystem(pump=flat, stokes=flat, drive=DriveConfig.from_detunings(15.0))
        had = adiabatic_hamiltonian(sys, 500.0, dt=1.0)
        off = had - np.diag(np.diag(had))
        assert np.abs(off).max() < 1e-6
        e_plus, _, e_minus = eigenenergies(
            np.hypot(2 * TWO_PI * 8.0, 2 * TWO_PI * 8.0), TWO_PI * 15.0
        )
        assert had[0, 0].real == pytest.approx(e_plus, rel=1e-9)
        assert had[2, 2].real == pytest.approx(e_minus, rel=1e-9)

    def test_structure_matches_analytic_rates(self):
        # |H_ad[0,1]| = |theta_dot sin(phi)| with theta_dot from the closed
        # form for a Gaussian pair; finite differences must agree to O(dt^2)
        proto = gates.with_amplitude(gates.detuned_preset("pi"), 19.6)
        sysv = gates.as_vsystem(proto)
        t = 130.0
        from stiraplab.vsystem import rabi_symbols

        w0, w1 = rabi_symbols(sysv, np.array([t]))
        w0, w1 = abs(w0[0]), abs(w1[0])
        sigma_sq = 33.0**2
        w0_dot = w0 * (-(t - 157.0) / sigma_sq) * 1e3  # rad/us^2
        w1_dot = w1 * (-(t - 103.0) / sigma_sq) * 1e3
        theta_dot = (w0_dot * w1 - w0 * w1_dot) / (w0**2 + w1**2)
        theta, phi, _ = spectral.angles_on_grid(sysv, np.array([t]))
        expected = abs(theta_dot * np.sin(phi[0]))
        had = adiabatic_hamiltonian(sysv, t, dt=0.05)
        assert abs(had[0, 1]) == pytest.approx(expected, rel=1e-4)
        # Hermitian up to the finite-difference error
        assert np.abs(had - had.conj().T).max() < 1e-5

    def test_richardson_second_order(self):
        proto = gates.with_amplitude(gates.detuned_preset("pi"), 19.6)
        sysv = gates.as_vsystem(proto)
        ref = adiabatic_hamiltonian(sysv, 120.0, dt=0.01)
        err1 = np.abs(adiabatic_hamiltonian(sysv, 120.0, dt=0.8) - ref).max()
        err2 = np.abs(adiabatic_hamiltonian(sysv, 120.0, dt=0.4) - ref).max()
        assert err1 / err2 == pytest.approx(4.0, abs=0.5)


class TestAdiabaticityMargins:
    def test_gentle_full_rotation_protocol_is_adiabatic(self):
        # slow pulses at moderate detuning: every condition well satisfied
        proto = gates.make_protocol(824.0, 132.0, 216.0, 19.6, 15.0)
        grid = np.linspace(10.0, 1030.0, 301)
        report = adiabaticity_margins(gates.as_vsystem(proto), grid, exclude_edges_ns=2.0)
        assert report.ratios.max() < 0.25

    def test_half_rotation_violates_last_condition_only(self):
        proto = gates.with_amplitude(gates.detuned_preset("pi"), 9.214)
        grid = np.linspace(5.0, 255.0, 251)
        report = adiabaticity_margins(gates.as_vsystem(proto), grid, exclude_edges_ns=2.0)
        per_condition = report.ratios.max(axis=1)
        assert per_condition[0] < 0.2 and per_condition[1] < 0.3
        assert per_condition[2] > 0.5  # order one: only partially adiabatic

    def test_zero_drive_numerators_vanish(self):
        # grid points before the pulses: angles are frozen at their limits
        proto = gates.detuned_preset("pi")
        sysv = gates.as_vsystem(proto)
        report = adiabaticity_margins(sysv, np.linspace(-50.0, -10.0, 11))
        assert np.abs(report.lhs).max() == 0.0
        assert np.abs(report.ratios).max() == 0.0

    def test_column_export(self):
        proto = gates.detuned_preset("pi")
        report = adiabaticity_margins(gates.as_vsystem(proto), np.linspace(10, 250, 25))
        cols = report.as_columns()
        assert set(cols) >= {
            "time_ns", "theta_rad", "phi_rad", "e_plus", "e_minus",
            "ratio_1", "ratio_2", "ratio_3",
        }
        assert all(len(v) == 25 for v in cols.values())
