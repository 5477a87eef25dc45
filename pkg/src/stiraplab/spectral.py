"""Instantaneous eigensystem of the driven V-type qutrit.

For zero two-photon detuning the Hamiltonian has a closed-form eigenframe
parameterized by two mixing angles: theta tracks the pump/Stokes amplitude
ratio and phi tracks the drive strength against the single-photon detuning.
The frame states are ordered (|+>, |d>, |->) with energies (e+, 0, e-).

All angular frequencies here are rad/us (callers convert from MHz once, in
the Hamiltonian builder).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .vsystem import VSystem, envelope_value, hamiltonian_stack, rabi_symbols, TWO_PI

#: adiabatic-frame state ordering
IDX_PLUS, IDX_DARK, IDX_MINUS = 0, 1, 2

#: Omega_rms below this fraction of its pulse-sequence peak is treated as
#: "drive off" and the limiting interior angles are used instead.
ANGLE_SUPPORT_FRACTION = 1e-6


class AngleUndefinedError(ValueError):
    """Raised when both drive amplitudes vanish and theta has no value."""


@dataclass(frozen=True)
class MixingAngles:
    theta: float
    phi: float
    omega_rms: float  # rad/us


def mixing_angles(omega0: complex, omega1: complex, delta: float) -> MixingAngles:
    """Mixing angles for drive amplitudes omega0/omega1 and single-photon
    detuning delta (all rad/us).

    theta = atan2(|omega0|, |omega1|); 2*phi = atan2(omega_rms, delta), so
    phi -> pi/4 in the resonant limit and phi -> 0 for weak drive at
    positive detuning.
    """
    a0 = abs(omega0)
    a1 = abs(omega1)
    if a0 == 0.0 and a1 == 0.0:
        raise AngleUndefinedError("both drive amplitudes are zero; theta is undefined")
    omega_rms = float(np.hypot(a0, a1))
    theta = float(np.arctan2(a0, a1))
    phi = 0.5 * float(np.arctan2(omega_rms, delta))
    return MixingAngles(theta=theta, phi=phi, omega_rms=omega_rms)


def eigenenergies(omega_rms: float, delta: float) -> tuple[float, float, float]:
    """(e+, e_dark, e-) in rad/us: e± = (delta ± sqrt(delta^2 + omega_rms^2))/2."""
    root = np.hypot(delta, omega_rms)
    return 0.5 * (delta + root), 0.0, 0.5 * (delta - root)


def rotation_matrix(angles: MixingAngles) -> np.ndarray:
    """Bare-to-adiabatic rotation; rows are <+|, <d|, <-| in basis (|0>,|g>,|1>).

        [[sin(th) sin(ph),  cos(ph),  cos(th) sin(ph)],
         [cos(th),          0,       -sin(th)        ],
         [sin(th) cos(ph), -sin(ph),  cos(th) cos(ph)]]
    """
    st, ct = np.sin(angles.theta), np.cos(angles.theta)
    sp, cp = np.sin(angles.phi), np.cos(angles.phi)
    return np.array(
        [
            [st * sp, cp, ct * sp],
            [ct, 0.0, -st],
            [st * cp, -sp, ct * cp],
        ]
    )


@dataclass(frozen=True)
class EigenFrame:
    """Instantaneous eigenframe: states[i] is the i-th eigenvector (rows
    ordered +, d, -), energies = (e+, 0, e-) rad/us."""

    states: np.ndarray  # (3, 3) complex, states[i] = eigenvector i
    energies: np.ndarray  # (3,)
    angles: MixingAngles
    method: str = "analytic"  # "analytic" | "numeric"


def _gauge_phases(pump_phase: float, stokes_phase: float) -> np.ndarray:
    """Per-level phases mapping the real-amplitude eigenkets to the ones of a
    Hamiltonian with complex drive phases: diag(e^{i b_p}, 1, e^{-i b_s})."""
    return np.array([np.exp(1j * pump_phase), 1.0, np.exp(-1j * stokes_phase)])


def eigenframe(h: np.ndarray, angles: MixingAngles) -> EigenFrame:
    """Eigenframe of a V-system Hamiltonian; states[i] holds ket coefficients.

    With zero two-photon detuning (h[2,2] == 0) the closed-form frame built
    from the mixing angles is returned (drive phases are read off the
    off-diagonals and re-applied as a diagonal gauge), after verifying the
    eigenpair residuals against the matrix itself.  A nonzero two-photon
    detuning has no closed form; the frame falls back to a dense Hermitian
    eigensolver (energies sorted descending so the ordering still reads
    +, mid, -) and is marked "numeric".
    """
    h = np.asarray(h, dtype=complex)
    scale = np.linalg.norm(h)
    if abs(h[2, 2].real) > 1e-12 * max(scale, 1.0):
        return _numeric_frame(h, angles)
    pump_phase = float(np.angle(h[0, 1])) if abs(h[0, 1]) > 0 else 0.0
    stokes_phase = float(np.angle(h[1, 2])) if abs(h[1, 2]) > 0 else 0.0
    states = rotation_matrix(angles) * _gauge_phases(pump_phase, stokes_phase)
    energies = np.array(eigenenergies(angles.omega_rms, h[1, 1].real))
    residual = max(
        np.linalg.norm(h @ states[i] - energies[i] * states[i]) for i in range(3)
    )
    if residual > 1e-9 * max(scale, 1.0):
        raise ValueError(
            f"analytic frame inconsistent with Hamiltonian (residual {residual:.2e}); "
            "angles were probably computed for different drive values"
        )
    return EigenFrame(states=states, energies=energies, angles=angles, method="analytic")


def _numeric_frame(h: np.ndarray, angles: MixingAngles) -> EigenFrame:
    vals, vecs = np.linalg.eigh(h)
    order = np.argsort(vals)[::-1]  # descending: +, mid, -
    vals = vals[order]
    vecs = vecs[:, order]
    states = vecs.T
    # fix gauge: largest-magnitude component real positive
    for i in range(3):
        k = int(np.argmax(np.abs(states[i])))
        ph = states[i][k] / abs(states[i][k])
        states[i] = states[i] / ph
    return EigenFrame(states=states, energies=vals, angles=angles, method="numeric")


# ---------------------------------------------------------------------------
# angle evaluation along a pulse sequence


def angle_support(sys: VSystem, samples: int = 4001) -> tuple[float, float]:
    """Time interval (ns) on which Omega_rms exceeds ANGLE_SUPPORT_FRACTION of
    its maximum over the composite pulse window.

    Outside this interval the mixing angles are frozen at their limiting
    interior values (theta -> 0 before a counter-intuitive sequence and
    theta -> pi/2 after it), which keeps the adiabatic frame continuous.
    """
    t_lo = min(sys.pump.window_start, sys.stokes.window_start)
    t_hi = max(sys.pump.window_end, sys.stokes.window_end)
    grid = np.linspace(t_lo, t_hi, samples)
    rms = np.hypot(
        np.abs(envelope_value(sys.pump, grid)), np.abs(envelope_value(sys.stokes, grid))
    )
    peak = rms.max()
    if peak == 0.0:
        raise AngleUndefinedError("drive envelopes vanish on the whole window")
    on = rms >= ANGLE_SUPPORT_FRACTION * peak
    return float(grid[on][0]), float(grid[on][-1])


def angles_on_grid(sys: VSystem, times: np.ndarray, support: tuple[float, float] | None = None):
    """theta(t), phi(t), omega_rms(t) arrays (rad and rad/us) on a time grid.

    omega_rms combines the Rabi symbols (twice the stored coupling
    amplitudes).  Times outside the angle support are clamped to its
    endpoints so the limiting angle convention applies automatically.
    """
    if support is None:
        support = angle_support(sys)
    t = np.clip(np.asarray(times, dtype=float), support[0], support[1])
    w0, w1 = rabi_symbols(sys, t)
    w0, w1 = np.abs(w0), np.abs(w1)
    omega_rms = np.hypot(w0, w1)
    theta = np.arctan2(w0, w1)
    delta = TWO_PI * sys.drive.single_photon
    phi = 0.5 * np.arctan2(omega_rms, delta)
    return theta, phi, omega_rms


def frame_trace(sys: VSystem, times: np.ndarray) -> list[EigenFrame]:
    """Continuity-tracked eigenframes at each grid time.

    Uses the analytic frame when the two-photon detuning is zero, otherwise
    numeric frames whose state ordering and phases are aligned with the
    previous grid point (maximum-overlap matching) so overlap traces stay
    smooth.
    """
    times = np.asarray(times, dtype=float)
    analytic = abs(sys.drive.two_photon) < 1e-12
    support = angle_support(sys)
    frames: list[EigenFrame] = []
    if analytic:
        theta, phi, omega_rms = angles_on_grid(sys, times, support)
        delta = TWO_PI * sys.drive.single_photon
        gauge = _gauge_phases(sys.pump.phase, sys.stokes.phase)
        for th, ph, om in zip(theta, phi, omega_rms):
            ang = MixingAngles(theta=float(th), phi=float(ph), omega_rms=float(om))
            states = rotation_matrix(ang) * gauge
            energies = np.array(eigenenergies(om, delta))
            frames.append(EigenFrame(states, energies, ang, "analytic"))
        return frames
    h_stack = hamiltonian_stack(sys, times)
    theta, phi, omega_rms = angles_on_grid(sys, times, support)
    prev: np.ndarray | None = None
    for k in range(times.size):
        ang = MixingAngles(float(theta[k]), float(phi[k]), float(omega_rms[k]))
        frame = _numeric_frame(h_stack[k], ang)
        states, energies = frame.states, frame.energies
        if prev is not None:
            overlap = np.abs(prev.conj() @ states.T)  # overlap[i, j] = |<prev_i|new_j>|
            perm = _greedy_match(overlap)
            states = states[perm]
            energies = energies[perm]
            # rotate phases so <prev_i|new_i> is real positive
            for i in range(3):
                inner = np.vdot(prev[i], states[i])
                if abs(inner) > 0:
                    states[i] = states[i] * (inner.conjugate() / abs(inner))
        prev = states
        frames.append(EigenFrame(states, energies, ang, "numeric"))
    return frames


def _greedy_match(overlap: np.ndarray) -> np.ndarray:
    """Permutation assigning each previous state its best-overlap successor."""
    perm = -np.ones(3, dtype=int)
    taken = set()
    for i in np.argsort(-overlap.max(axis=1)):
        for j in np.argsort(-overlap[i]):
            if j not in taken:
                perm[i] = j
                taken.add(j)
                break
    return perm


# ---------------------------------------------------------------------------
# adiabatic-frame Hamiltonian and adiabaticity margins


def _angles_at(sys: VSystem, t: float, support: tuple[float, float]) -> MixingAngles:
    theta, phi, omega_rms = angles_on_grid(sys, np.array([t]), support)
    return MixingAngles(float(theta[0]), float(phi[0]), float(omega_rms[0]))


def adiabatic_hamiltonian(sys: VSystem, t: float, dt: float) -> np.ndarray:
    """Effective Hamiltonian in the rotating adiabatic frame, rad/us.

    Computes R H R^T - i R (d/dt R^T) with the frame derivative taken by
    central finite differences of the rotation matrix over +-dt (ns).  For a
    frozen drive this is diag(e+, 0, e-); the off-diagonal couplings are the
    frame rotation rates theta_dot*sin(phi) (+<->d), theta_dot*cos(phi)
    (d<->-) and phi_dot (+<->-).

    Evaluated in the real-amplitude gauge: constant drive phases enter the
    bare Hamiltonian only through a time-independent diagonal gauge and drop
    out of the frame couplings, so |envelope| magnitudes are used here.
    """
    support = angle_support(sys)
    ang = _angles_at(sys, t, support)
    r_now = rotation_matrix(ang)
    r_fwd = rotation_matrix(_angles_at(sys, t + dt, support))
    r_bwd = rotation_matrix(_angles_at(sys, t - dt, support))
    # dt is ns but energies are rad/us: convert the derivative once here
    dr_dag = (r_fwd.T - r_bwd.T) / (2.0 * dt * 1e-3)
    w0, w1 = rabi_symbols(sys, np.array([t]))
    w0, w1 = abs(complex(w0[0])), abs(complex(w1[0]))
    h = 0.5 * np.array(
        [
            [0.0, w0, 0.0],
            [w0, 2.0 * TWO_PI * sys.drive.single_photon, w1],
            [0.0, w1, 2.0 * TWO_PI * sys.drive.two_photon],
        ]
    )
    return (r_now @ h @ r_now.T).astype(complex) - 1j * (r_now @ dr_dag).astype(complex)


@dataclass(frozen=True)
class AdiabaticityReport:
    """Per-time-point frame angles, energies, and the left/right sides of
    the three adiabaticity conditions.

    Condition rows (lhs must stay well below rhs):
      0: |phi_dot|            vs |e+ - e-|
      1: |theta_dot sin(phi)| vs |e+|
      2: |theta_dot cos(phi)| vs |e-|
    """

    times: np.ndarray  # (n,) ns
    theta: np.ndarray  # (n,) rad
    phi: np.ndarray  # (n,) rad
    e_plus: np.ndarray  # (n,) rad/us
    e_minus: np.ndarray  # (n,) rad/us
    lhs: np.ndarray  # (3, n) rad/us
    rhs: np.ndarray  # (3, n) rad/us
    ratios: np.ndarray  # (3, n)

    @property
    def worst_ratio(self) -> float:
        return float(self.ratios.max())

    @property
    def worst_time(self) -> float:
        flat = int(np.argmax(self.ratios))
        return float(self.times[flat % self.times.size])

    def as_columns(self) -> dict[str, np.ndarray]:
        return {
            "time_ns": self.times,
            "theta_rad": self.theta,
            "phi_rad": self.phi,
            "e_plus": self.e_plus,
            "e_minus": self.e_minus,
            "phi_dot": self.lhs[0],
            "gap_plus_minus": self.rhs[0],
            "theta_dot_sin_phi": self.lhs[1],
            "gap_plus": self.rhs[1],
            "theta_dot_cos_phi": self.lhs[2],
            "gap_minus": self.rhs[2],
            "ratio_1": self.ratios[0],
            "ratio_2": self.ratios[1],
            "ratio_3": self.ratios[2],
        }


def adiabaticity_margins(
    sys: VSystem,
    grid: np.ndarray,
    dt: float | None = None,
    exclude_edges_ns: float = 0.0,
) -> AdiabaticityReport:
    """Evaluate the three adiabaticity conditions on a time grid (ns).

    theta_dot and phi_dot come from central finite differences with step
    dt = grid spacing / 10 unless overridden.  The hard envelope truncation
    makes the mixing angles jump at the window edges, which shows up as
    finite-difference spikes there; pass exclude_edges_ns > 0 to drop grid
    points within that distance of an edge and report the smooth-drive
    margins only.
    """
    grid = np.asarray(grid, dtype=float)
    if exclude_edges_ns > 0.0:
        edges = np.array(
            [
                sys.pump.window_start,
                sys.pump.window_end,
                sys.stokes.window_start,
                sys.stokes.window_end,
            ]
        )
        keep = np.all(np.abs(grid[:, None] - edges[None, :]) > exclude_edges_ns, axis=1)
        grid = grid[keep]
        if grid.size < 2:
            raise ValueError("edge exclusion removed the whole grid")
    if dt is None:
        dt = float(np.min(np.diff(grid))) / 10.0
    support = angle_support(sys)
    theta_f, phi_f, _ = angles_on_grid(sys, grid + dt, support)
    theta_b, phi_b, _ = angles_on_grid(sys, grid - dt, support)
    theta, phi, omega_rms = angles_on_grid(sys, grid, support)
    # ns -> us so the rates are comparable to the rad/us gaps
    theta_dot = (theta_f - theta_b) / (2.0 * dt * 1e-3)
    phi_dot = (phi_f - phi_b) / (2.0 * dt * 1e-3)
    delta = TWO_PI * sys.drive.single_photon
    e_plus = 0.5 * (delta + np.hypot(delta, omega_rms))
    e_minus = 0.5 * (delta - np.hypot(delta, omega_rms))
    lhs = np.vstack(
        [
            np.abs(phi_dot),
            np.abs(theta_dot * np.sin(phi)),
            np.abs(theta_dot * np.cos(phi)),
        ]
    )
    rhs = np.vstack([np.abs(e_plus - e_minus), np.abs(e_plus), np.abs(e_minus)])
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(lhs == 0.0, 0.0, lhs / np.where(rhs == 0.0, np.nan, rhs))
    ratios = np.nan_to_num(ratios, nan=np.inf, posinf=np.inf)
    return AdiabaticityReport(
        times=grid,
        theta=theta,
        phi=phi,
        e_plus=e_plus,
        e_minus=e_minus,
        lhs=lhs,
        rhs=rhs,
        ratios=ratios,
    )
