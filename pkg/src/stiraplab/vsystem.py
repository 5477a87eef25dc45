"""Drive pulses and the rotating-frame Hamiltonian of a driven V-type qutrit.

Basis convention used by every module in this package: the three levels are
ordered as (|0>, |g>, |1>), i.e. index 0 and index 2 are the two excited
("qubit") states and index 1 is the shared ground state that both drives
couple to.  The pump tone drives |g> <-> |0>, the Stokes tone drives
|g> <-> |1>.

Units: user-facing frequencies are linear MHz and times are ns; Hamiltonians
are returned in rad/us.  The 2*pi conversion happens in exactly one place,
:func:`hamiltonian_at` (and its stacked variant), so that it can never be
double counted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

TWO_PI = 2.0 * np.pi

#: index of each level in the fixed basis order (|0>, |g>, |1>)
IDX_0, IDX_G, IDX_1 = 0, 1, 2


@dataclass(frozen=True)
class PulseEnvelope:
    """A truncated-Gaussian drive envelope.

    peak_rabi is the linear-frequency amplitude in MHz (>= 0, the sign of
    the drive is carried by ``phase``), quoted in the calibration
    convention of the experiments: it is the transition coupling matrix
    element g, i.e. half the conventional Rabi rate of the driven
    transition.  center, sigma and the window bounds are in ns.  The
    envelope is exactly zero outside the closed interval
    [window_start, window_end].
    """

    peak_rabi: float
    center: float
    sigma: float
    window_start: float
    window_end: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if not self.window_start < self.center < self.window_end:
            raise ValueError(
                "window must satisfy window_start < center < window_end, got "
                f"[{self.window_start}, {self.window_end}] around {self.center}"
            )
        if self.peak_rabi < 0:
            raise ValueError(f"peak_rabi must be >= 0, got {self.peak_rabi}")


def envelope_value(pulse: PulseEnvelope, t):
    """Complex envelope amplitude (MHz) at time t (ns; scalar or array).

    Inside the window this is peak * exp(-(t-center)^2 / (2 sigma^2)) with
    the constant phase factor exp(i*phase); outside it is exactly 0.
    """
    t = np.asarray(t, dtype=float)
    gauss = np.exp(-((t - pulse.center) ** 2) / (2.0 * pulse.sigma**2))
    inside = (t >= pulse.window_start) & (t <= pulse.window_end)
    value = pulse.peak_rabi * np.exp(1j * pulse.phase) * np.where(inside, gauss, 0.0)
    if value.ndim == 0:
        return complex(value)
    return value


def edge_discontinuity(pulse: PulseEnvelope) -> float:
    """Relative envelope magnitude at the truncation edges (jump size / peak).

    The hard window truncation leaves a step of this relative size at the
    window edges; it is recorded in run metadata so the approximation is
    auditable.
    """
    edges = np.array([pulse.window_start, pulse.window_end])
    gauss = np.exp(-((edges - pulse.center) ** 2) / (2.0 * pulse.sigma**2))
    return float(gauss.max())


@dataclass(frozen=True)
class DriveConfig:
    """Pump and Stokes detunings in MHz (linear frequency).

    The single-photon detuning is (delta_p + delta_s)/2 and the two-photon
    detuning is delta_p - delta_s; both are derived properties so they can
    never drift out of sync with the stored per-tone values.
    """

    delta_p: float = 0.0
    delta_s: float = 0.0

    @property
    def single_photon(self) -> float:
        return 0.5 * (self.delta_p + self.delta_s)

    @property
    def two_photon(self) -> float:
        return self.delta_p - self.delta_s

    @classmethod
    def from_detunings(cls, single_photon: float, two_photon: float = 0.0) -> "DriveConfig":
        return cls(
            delta_p=single_photon + 0.5 * two_photon,
            delta_s=single_photon - 0.5 * two_photon,
        )


@dataclass(frozen=True)
class DecoherenceTimes:
    """Relaxation (T1) and Ramsey (T2) times of the two excited levels, in us.

    Physicality requires T2 <= 2*T1 per level; violating inputs are rejected
    at construction.
    """

    t1_0: float
    t2_0: float
    t1_1: float
    t2_1: float

    def __post_init__(self) -> None:
        for name in ("t1_0", "t2_0", "t1_1", "t2_1"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.t2_0 > 2.0 * self.t1_0 + 1e-12:
            raise ValueError(f"unphysical coherence: t2_0={self.t2_0} > 2*t1_0={2 * self.t1_0}")
        if self.t2_1 > 2.0 * self.t1_1 + 1e-12:
            raise ValueError(f"unphysical coherence: t2_1={self.t2_1} > 2*t1_1={2 * self.t1_1}")


#: measured coherence times of the bright (|0>) and dark (|1>) modes, us
DEVICE_COHERENCE = DecoherenceTimes(t1_0=64.0, t2_0=106.0, t1_1=88.0, t2_1=98.0)


@dataclass(frozen=True)
class VSystem:
    """A V-type three-level system under two-tone drive.

    pump drives |g> <-> |0>, stokes drives |g> <-> |1>.  decoherence is
    optional; when absent the system is closed.
    """

    pump: PulseEnvelope
    stokes: PulseEnvelope
    drive: DriveConfig
    decoherence: Optional[DecoherenceTimes] = None


def rabi_symbols(sys: VSystem, times) -> tuple[np.ndarray, np.ndarray]:
    """Complex Rabi rates W0(t), W1(t) in rad/us.

    The stored envelope amplitudes are coupling matrix elements g (MHz);
    the conventional Rabi symbols of the three-level model are W = 2g, so
    W = 2 * 2pi * envelope.
    """
    times = np.asarray(times, dtype=float)
    w0 = 2.0 * TWO_PI * np.atleast_1d(envelope_value(sys.pump, times))
    w1 = 2.0 * TWO_PI * np.atleast_1d(envelope_value(sys.stokes, times))
    return w0, w1


def hamiltonian_at(sys: VSystem, t: float) -> np.ndarray:
    """Rotating-frame Hamiltonian at time t (ns), in rad/us.

    In the basis (|0>, |g>, |1>) and in terms of the Rabi symbols
    W = 2 * (stored coupling amplitude), the matrix is

        (1/2) [[0,     W0,      0  ],
               [W0*,   2*Delta, W1 ],
               [0,     W1*,     2*delta]]

    i.e. the off-diagonal couplings equal 2pi times the stored MHz
    amplitudes directly.  This is the single place where linear MHz turn
    into angular rad/us.
    """
    return hamiltonian_stack(sys, np.asarray([t], dtype=float))[0]


def hamiltonian_stack(sys: VSystem, times: np.ndarray) -> np.ndarray:
    """Vectorized :func:`hamiltonian_at`: shape (len(times), 3, 3)."""
    times = np.asarray(times, dtype=float)
    w0, w1 = rabi_symbols(sys, times)
    n = times.size
    h = np.zeros((n, 3, 3), dtype=complex)
    h[:, IDX_0, IDX_G] = 0.5 * w0
    h[:, IDX_G, IDX_0] = 0.5 * np.conj(w0)
    h[:, IDX_G, IDX_1] = 0.5 * w1
    h[:, IDX_1, IDX_G] = 0.5 * np.conj(w1)
    h[:, IDX_G, IDX_G] = TWO_PI * sys.drive.single_photon
    h[:, IDX_1, IDX_1] = TWO_PI * sys.drive.two_photon
    return h


def collapse_operators(sys: VSystem) -> list[np.ndarray]:
    """Lindblad collapse operators (rates folded in, units sqrt(1/us)).

    Amplitude damping sqrt(1/T1) |g><i| for each excited level, plus pure
    dephasing sqrt(2*gamma_phi) |i><i| with gamma_phi = 1/T2 - 1/(2 T1),
    clipped at zero.  The sqrt(2) normalization makes the |i><g| coherence
    decay at exactly 1/T2 once the damping contribution is added.  Returns
    an empty list for a closed system.
    """
    if sys.decoherence is None:
        return []
    dec = sys.decoherence
    ops: list[np.ndarray] = []
    for idx, t1, t2 in ((IDX_0, dec.t1_0, dec.t2_0), (IDX_1, dec.t1_1, dec.t2_1)):
        damp = np.zeros((3, 3), dtype=complex)
        damp[IDX_G, idx] = np.sqrt(1.0 / t1)
        ops.append(damp)
        gamma_phi = max(0.0, 1.0 / t2 - 0.5 / t1)
        if gamma_phi > 0.0:
            deph = np.zeros((3, 3), dtype=complex)
            deph[idx, idx] = np.sqrt(2.0 * gamma_phi)
            ops.append(deph)
    return ops
