"""Three-level quantum state tomography.

A single dispersive readout distinguishes the three levels only through
their scalar measurement amplitudes, so the full density matrix is
reconstructed from nine measurements taken after nine different analysis
rotations on the g-0 and g-1 transitions.  Linear inversion provides the
raw estimate; a Cholesky-parameterized maximum-likelihood fit projects it
back onto the physical (unit-trace, positive semidefinite) set.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
import scipy.optimize

from .propagator import expm_hermitian_stack, time_ordered_product
from .vsystem import IDX_0, IDX_1, IDX_G


class DegenerateModelError(ValueError):
    """The measurement model cannot distinguish all states."""


@dataclass(frozen=True)
class MeasurementModel:
    """Scalar readout amplitudes of the three levels (arbitrary units).

    The three amplitudes must be pairwise distinct or the levels become
    indistinguishable; shot_noise_sigma adds Gaussian noise of that standard
    deviation to each simulated coefficient.
    """

    alpha_g: float = 0.0
    alpha_0: float = 1.0
    alpha_1: float = 2.0
    shot_noise_sigma: float = 0.0

    def __post_init__(self) -> None:
        a = (self.alpha_g, self.alpha_0, self.alpha_1)
        if a[0] == a[1] or a[0] == a[2] or a[1] == a[2]:
            raise ValueError(f"measurement amplitudes must be pairwise distinct, got {a}")
        if self.shot_noise_sigma < 0:
            raise ValueError("shot_noise_sigma must be >= 0")

    def operator(self) -> np.ndarray:
        m = np.zeros((3, 3))
        m[IDX_G, IDX_G] = self.alpha_g
        m[IDX_0, IDX_0] = self.alpha_0
        m[IDX_1, IDX_1] = self.alpha_1
        return m


ROTATION_LABELS = (
    "I",
    "x90_g0",
    "y90_g0",
    "x180_g0",
    "x90_g1",
    "y90_g1",
    "x180_g0*x90_g1",
    "x180_g0*y90_g1",
    "x180_g0*x180_g1",
)


def _subspace_rotation(angle: float, axis: str, level: int) -> np.ndarray:
    """exp(-i angle/2 * sigma_axis) on the (|g>, |level>) two-level subspace,
    identity on the remaining level."""
    u = np.eye(3, dtype=complex)
    half = 0.5 * angle
    c, s = np.cos(half), np.sin(half)
    if axis == "x":
        u[IDX_G, IDX_G] = c
        u[level, level] = c
        u[IDX_G, level] = -1j * s
        u[level, IDX_G] = -1j * s
    elif axis == "y":
        u[IDX_G, IDX_G] = c
        u[level, level] = c
        u[IDX_G, level] = -s
        u[level, IDX_G] = s
    else:
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    return u


def rotation_set() -> list[np.ndarray]:
    """The nine ideal analysis rotations, ordered as ROTATION_LABELS.

    Composite entries are matrix products of their factors in the listed
    order (the right factor acts first).
    """
    x90_g0 = _subspace_rotation(np.pi / 2, "x", IDX_0)
    y90_g0 = _subspace_rotation(np.pi / 2, "y", IDX_0)
    x180_g0 = _subspace_rotation(np.pi, "x", IDX_0)
    x90_g1 = _subspace_rotation(np.pi / 2, "x", IDX_1)
    y90_g1 = _subspace_rotation(np.pi / 2, "y", IDX_1)
    x180_g1 = _subspace_rotation(np.pi, "x", IDX_1)
    return [
        np.eye(3, dtype=complex),
        x90_g0,
        y90_g0,
        x180_g0,
        x90_g1,
        y90_g1,
        x180_g0 @ x90_g1,
        x180_g0 @ y90_g1,
        x180_g0 @ x180_g1,
    ]


def pulse_rotation_set(
    area_error: float = 0.0, steps: int = 200
) -> list[np.ndarray]:
    """Analysis rotations realized as resonant Gaussian pulses.

    Substituting these for the ideal unitaries propagates a common
    fractional pulse-area miscalibration (area_error) into the
    reconstruction, for studying how tomography-pulse errors bias state
    fidelities.  Pulse timing mirrors the gate presets (40 ns window,
    sigma = window/6).
    """
    window, sigma = 40.0, 40.0 / 6.0
    grid = np.linspace(0.0, window, steps + 1)
    mids = 0.5 * (grid[:-1] + grid[1:])
    gauss = np.exp(-((mids - 0.5 * window) ** 2) / (2.0 * sigma**2))
    area_unit = np.trapezoid(
        np.exp(-((grid - 0.5 * window) ** 2) / (2.0 * sigma**2)), grid
    )

    def pulse(angle: float, axis: str, level: int) -> np.ndarray:
        peak = angle * (1.0 + area_error) / area_unit  # rad/ns
        generator = np.zeros((3, 3), dtype=complex)
        coupling = 1.0 if axis == "x" else -1j
        generator[IDX_G, level] = coupling
        generator[level, IDX_G] = np.conj(coupling)
        h_stack = 0.5 * peak * gauss[:, None, None] * generator  # rad/ns
        return time_ordered_product(expm_hermitian_stack(h_stack, np.diff(grid)))

    x90_g0 = pulse(np.pi / 2, "x", IDX_0)
    y90_g0 = pulse(np.pi / 2, "y", IDX_0)
    x180_g0 = pulse(np.pi, "x", IDX_0)
    x90_g1 = pulse(np.pi / 2, "x", IDX_1)
    y90_g1 = pulse(np.pi / 2, "y", IDX_1)
    x180_g1 = pulse(np.pi, "x", IDX_1)
    return [
        np.eye(3, dtype=complex),
        x90_g0,
        y90_g0,
        x180_g0,
        x90_g1,
        y90_g1,
        x180_g0 @ x90_g1,
        x180_g0 @ y90_g1,
        x180_g0 @ x180_g1,
    ]


@dataclass(frozen=True)
class TomographyRecord:
    """The nine measured coefficients with their rotation labels."""

    values: np.ndarray  # (9,)
    labels: tuple[str, ...] = ROTATION_LABELS

    def __post_init__(self) -> None:
        if np.asarray(self.values).shape != (9,):
            raise ValueError("a tomography record holds exactly nine coefficients")
        if tuple(self.labels) != ROTATION_LABELS:
            raise ValueError(f"unexpected rotation labels {self.labels}")


@dataclass(frozen=True)
class ReconstructedState:
    rho: np.ndarray
    method: str  # "linear" | "mle"
    residual: float
    min_eigenvalue: float
    converged: bool = True

    @property
    def physical(self) -> bool:
        return self.min_eigenvalue >= -1e-10


def _design_operators(
    model: MeasurementModel, rotations: Optional[Sequence[np.ndarray]] = None
) -> np.ndarray:
    """Hermitian observables A_k = R_k M R_k^dag, stacked (9, 3, 3)."""
    if rotations is None:
        rotations = rotation_set()
    m = model.operator()
    return np.stack([r @ m @ r.conj().T for r in rotations])


def simulate_measurements(
    rho: np.ndarray,
    model: MeasurementModel,
    seed: Optional[int] = None,
    rotations: Optional[Sequence[np.ndarray]] = None,
) -> TomographyRecord:
    """Simulated coefficients <I_k> = Tr(rho R_k M R_k^dag).

    Gaussian noise of std shot_noise_sigma is added when nonzero; the seed
    makes noisy records reproducible.
    """
    ops = _design_operators(model, rotations)
    values = np.real(np.einsum("kij,ji->k", ops, np.asarray(rho, dtype=complex)))
    if model.shot_noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, model.shot_noise_sigma, size=9)
    return TomographyRecord(values=values)


# Gell-Mann matrices: trace-orthogonal Hermitian basis of the traceless part
_GELL_MANN = np.stack(
    [
        np.array([[0, 1, 0], [1, 0, 0], [0, 0, 0]], dtype=complex),
        np.array([[0, -1j, 0], [1j, 0, 0], [0, 0, 0]], dtype=complex),
        np.array([[1, 0, 0], [0, -1, 0], [0, 0, 0]], dtype=complex),
        np.array([[0, 0, 1], [0, 0, 0], [1, 0, 0]], dtype=complex),
        np.array([[0, 0, -1j], [0, 0, 0], [1j, 0, 0]], dtype=complex),
        np.array([[0, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex),
        np.array([[0, 0, 0], [0, 0, -1j], [0, 1j, 0]], dtype=complex),
        np.array([[1, 0, 0], [0, 1, 0], [0, 0, -2]], dtype=complex) / np.sqrt(3),
    ]
)


def linear_inversion(
    record: TomographyRecord,
    model: MeasurementModel,
    rotations: Optional[Sequence[np.ndarray]] = None,
) -> ReconstructedState:
    """Least-squares solve for the Hermitian unit-trace state matching the
    measured coefficients.

    The unit trace is built into the parameterization (identity part fixed,
    eight Gell-Mann components solved for), so the estimate is Hermitian
    with trace one by construction but may have a small negative eigenvalue
    under noise (exposed via min_eigenvalue).  A design matrix of rank < 8
    means the measurement amplitudes cannot separate the state space and
    raises DegenerateModelError.
    """
    ops = _design_operators(model, rotations)
    design = np.real(np.einsum("kij,mji->km", ops, _GELL_MANN))
    offsets = np.real(np.trace(ops, axis1=1, axis2=2)) / 3.0
    rank = np.linalg.matrix_rank(design, tol=1e-8 * max(1.0, np.abs(design).max()))
    if rank < 8:
        raise DegenerateModelError(
            f"design matrix rank {rank} < 8: amplitudes (alpha_g={model.alpha_g}, "
            f"alpha_0={model.alpha_0}, alpha_1={model.alpha_1}) do not separate the levels"
        )
    x, *_ = np.linalg.lstsq(design, np.asarray(record.values) - offsets, rcond=None)
    rho = np.eye(3, dtype=complex) / 3.0 + np.tensordot(x, _GELL_MANN, axes=1)
    residual = float(np.linalg.norm(design @ x + offsets - record.values))
    return ReconstructedState(
        rho=rho,
        method="linear",
        residual=residual,
        min_eigenvalue=float(np.linalg.eigvalsh(rho).min()),
    )


def project_to_physical(rho: np.ndarray) -> np.ndarray:
    """Closest (Frobenius) unit-trace PSD matrix to a Hermitian rho.

    Water-filling over the eigenvalue simplex: clip the most negative
    eigenvalues to zero while spreading their deficit over the rest.
    """
    rho = np.asarray(rho, dtype=complex)
    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() >= 0:
        return rho
    vals_desc = vals[::-1].copy()
    accumulator = 0.0
    i = vals_desc.size
    while i > 0 and vals_desc[i - 1] + accumulator / i < 0:
        accumulator += vals_desc[i - 1]
        vals_desc[i - 1] = 0.0
        i -= 1
    vals_desc[:i] += accumulator / i
    new_vals = vals_desc[::-1]
    return (vecs * new_vals) @ vecs.conj().T


def _cholesky_params(rho: np.ndarray) -> np.ndarray:
    """Real parameter vector of the lower-triangular factor of rho."""
    jitter = 1e-7
    t = np.linalg.cholesky(rho + jitter * np.eye(3))
    return np.array(
        [
            t[0, 0].real,
            t[1, 1].real,
            t[2, 2].real,
            t[1, 0].real,
            t[1, 0].imag,
            t[2, 0].real,
            t[2, 0].imag,
            t[2, 1].real,
            t[2, 1].imag,
        ]
    )


def _params_to_t(x: np.ndarray) -> np.ndarray:
    t = np.zeros((3, 3), dtype=complex)
    t[0, 0] = x[0]
    t[1, 1] = x[1]
    t[2, 2] = x[2]
    t[1, 0] = x[3] + 1j * x[4]
    t[2, 0] = x[5] + 1j * x[6]
    t[2, 1] = x[7] + 1j * x[8]
    return t


_PARAM_BASIS = []
for _m in range(9):
    _e = np.zeros(9)
    _e[_m] = 1.0
    _PARAM_BASIS.append(_params_to_t(_e))
del _e, _m

MLE_MAX_ITERATIONS = 10_000
MLE_GRADIENT_TOL = 1e-10


def mle_project(
    estimate: Union[ReconstructedState, np.ndarray, TomographyRecord],
    model: Optional[MeasurementModel] = None,
    rotations: Optional[Sequence[np.ndarray]] = None,
) -> ReconstructedState:
    """Maximum-likelihood projection onto the physical state set.

    The state is parameterized as rho = T^dag T / tr(T^dag T) with T lower
    triangular, which is physical by construction, and the squared residual
    to the measured coefficients (for a TomographyRecord plus model) or to
    the estimate matrix itself (for a raw/linear estimate) is minimized
    with a quasi-Newton iteration started from the physicality projection
    of the input.  Non-convergence within the iteration cap returns the
    best iterate flagged converged=False.
    """
    if isinstance(estimate, TomographyRecord):
        if model is None:
            raise ValueError("fitting a record requires the measurement model")
        ops = _design_operators(model, rotations)
        targets = np.asarray(estimate.values, dtype=float)
        seed_state = linear_inversion(estimate, model, rotations).rho
    else:
        rho_in = estimate.rho if isinstance(estimate, ReconstructedState) else estimate
        rho_in = np.asarray(rho_in, dtype=complex)
        ops = _GELL_MANN  # fit the eight traceless components of rho_in
        targets = np.real(np.einsum("kij,ji->k", ops, rho_in))
        seed_state = rho_in

    x0 = _cholesky_params(project_to_physical(seed_state))

    def loss_and_grad(x: np.ndarray):
        t = _params_to_t(x)
        g = t.conj().T @ t
        s = np.trace(g).real
        rho = g / s
        values = np.real(np.einsum("kij,ji->k", ops, rho))
        r = values - targets
        w = 2.0 * np.tensordot(r, ops, axes=1)  # Hermitian weight matrix
        v = (w - np.trace(rho @ w).real * np.eye(3)) / s
        grad = np.empty(9)
        for m, e in enumerate(_PARAM_BASIS):
            dg = e.conj().T @ t + t.conj().T @ e
            grad[m] = np.trace(dg @ v).real
        return float(r @ r), grad

    res = scipy.optimize.minimize(
        loss_and_grad,
        x0,
        jac=True,
        method="L-BFGS-B",
        options={"maxiter": MLE_MAX_ITERATIONS, "ftol": 1e-16, "gtol": MLE_GRADIENT_TOL},
    )
    t = _params_to_t(res.x)
    g = t.conj().T @ t
    rho = g / np.trace(g).real
    converged = bool(res.success) or np.linalg.norm(res.jac) < 1e-6
    return ReconstructedState(
        rho=rho,
        method="mle",
        residual=float(np.sqrt(res.fun)),
        min_eigenvalue=float(np.linalg.eigvalsh(rho).min()),
        converged=converged,
    )


def state_fidelity(rho: np.ndarray, target: np.ndarray) -> float:
    """Uhlmann fidelity (squared convention): F(rho, sigma) =
    (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, which reduces to <psi|rho|psi>
    for a pure target."""
    rho = np.asarray(rho, dtype=complex)
    target = np.asarray(target, dtype=complex)
    sqrt_rho = _psd_sqrt(rho)
    sqrt_target = _psd_sqrt(target)
    singular = np.linalg.svd(sqrt_rho @ sqrt_target, compute_uv=False)
    return float(min(1.0, singular.sum() ** 2))


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(0.5 * (m + m.conj().T))
    # the square root amplifies eigenvalue rounding noise (sqrt(1e-16) =
    # 1e-8), so zero out anything at the numerical floor
    vals = np.where(vals > 1e-14 * max(1.0, vals.max()), vals, 0.0)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T
