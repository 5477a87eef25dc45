"""stiraplab: a numerical laboratory for detuned-STIRAP qubit gates on a
driven V-type three-level system.

The package simulates population-transfer dynamics, calibrates full and
half rotations implemented with detuned STIRAP pulse pairs, reconstructs
qutrit states by tomography, and maps gate robustness over pulse-parameter
deviations, with a small circuit-quantization model of the underlying
coupled-transmon device.
"""

__version__ = "0.1.0"

from .vsystem import (
    DEVICE_COHERENCE,
    DecoherenceTimes,
    DriveConfig,
    PulseEnvelope,
    VSystem,
    collapse_operators,
    envelope_value,
    hamiltonian_at,
)
from .spectral import (
    AdiabaticityReport,
    AngleUndefinedError,
    EigenFrame,
    MixingAngles,
    adiabatic_hamiltonian,
    adiabaticity_margins,
    eigenframe,
    mixing_angles,
    rotation_matrix,
)
from .propagator import (
    EvolutionTrace,
    eigenbasis_overlap_trace,
    ket,
    population_trace,
    propagate_lindblad,
    propagate_unitary,
    pure_density,
)
from .gates import (
    AdiabaticityWarning,
    CalibrationError,
    CalibrationResult,
    StirapProtocol,
    analytic_pi_unitary,
    apply_axis_phase,
    as_vsystem,
    calibrate_amplitude,
    calibrate_phase,
    detuned_preset,
    make_protocol,
    protocol_unitary,
    resonant_stirap_preset,
    transfer_curves,
    with_amplitude,
    with_detuning,
    with_phases,
)
from .tomography import (
    MeasurementModel,
    ReconstructedState,
    TomographyRecord,
    linear_inversion,
    mle_project,
    rotation_set,
    simulate_measurements,
    state_fidelity,
)
from .sweeps import (
    AxisSpec,
    SweepGrid,
    SweepResult,
    amplitude_detuning_map,
    baseline_amplitude_for_angle,
    common_region,
    dynamical_baseline,
    map_preset,
    robustness_curve,
    transfer_maps,
)
from .device import (
    CircuitParams,
    DispersiveParams,
    ModeParams,
    dispersive_shifts,
    exact_diagonalization_oracle,
    reduce_circuit,
)

__all__ = [name for name in dir() if not name.startswith("_")]
