"""Simulator for a periodically modulated cavity/mirror/exciton system.

The heavy lifting lives in the compiled extension; this package re-exports
its public surface.
"""

from ._core import (  # noqa: F401
    ConfigError,
    CovarianceState,
    FluctuationEnergies,
    FourierExpansion,
    InstabilityError,
    MeanFieldState,
    MeanFieldTrajectory,
    Mode,
    RecursionVariant,
    SystemParams,
    TwoModeCovariance,
    UnphysicalBlockError,
    ValidationError,
    Var,
    __version__,
    build_expansion,
    detect_limit_cycle,
    diffusion_matrix,
    drift_matrix,
    drive_amplitude,
    extract_two_mode,
    fluctuation_energies,
    fourier_detuning_coeffs,
    fourier_drive_coeffs,
    initial_covariance,
    integrate_covariance,
    integrate_meanfield,
    log_negativity,
    meanfield_rhs,
    nu_minus,
    phonon_number,
    qd_detuning,
    reconstruct,
    run_scenario_file,
    steady_displacement_qs,
    symplectic_oracle,
    validate,
    validation_errors,
)
