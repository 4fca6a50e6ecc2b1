#pragma once

#include <Eigen/Dense>

#include <functional>
#include <vector>

#include "omqd/meanfield.hpp"
#include "omqd/params.hpp"

namespace omqd {

using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// 6x6 correlation matrix over the quadrature basis
/// (dq, dp, dx, dy, dv, dw) at one instant.
struct CovarianceState {
    Matrix6d V = Matrix6d::Zero();
    double t = 0.0;
};

/// Coefficient matrix of the linearized quadrature dynamics at one instant.
struct DriftMatrix {
    Matrix6d D = Matrix6d::Zero();
    double t = 0.0;
};

/// Assembles the time-dependent drift matrix from the instantaneous mean
/// field, with F1 = delta_c - G*<q> and M = qd_detuning(t).
DriftMatrix drift_matrix(const MeanFieldState& mean, double t, const SystemParams& params);

/// diag(0, gamma_m (2 n_b + 1), kappa_a, kappa_a, kappa_d, kappa_d).
Matrix6d diffusion_matrix(const SystemParams& params);

/// Thermal mirror + vacuum cavity/exciton initial covariance,
/// diag(n_b+1/2, n_b+1/2, 1/2, 1/2, 1/2, 1/2).
Matrix6d initial_covariance(const SystemParams& params);

/// Evolves V' = D V + V D^T + Ntilde with fixed-step RK4 on the trajectory's
/// grid.  Each step re-anchors the mean field at the stored sample and
/// advances the joint (mean, V) system one step, so the stage-time drift
/// matrices are consistent with the integrator that produced the trajectory.
/// V is symmetrized after every step.  Throws InstabilityError if any entry
/// exceeds `bound`, std::invalid_argument ("grid mismatch") if the trajectory
/// does not cover [0, t_end] on a uniform grid.
std::vector<CovarianceState> integrate_covariance(const SystemParams& params,
                                                  const CovarianceState& V0,
                                                  const MeanFieldTrajectory& mean_traj,
                                                  double t_end, double bound = 1e9);

/// Generic fixed-step RK4 Lyapunov integrator for a caller-supplied drift;
/// used by the physical path's tests and for toy oracle problems.
template <int Dim>
Eigen::Matrix<double, Dim, Dim> integrate_lyapunov(
    const std::function<Eigen::Matrix<double, Dim, Dim>(double)>& drift,
    const Eigen::Matrix<double, Dim, Dim>& noise, Eigen::Matrix<double, Dim, Dim> V, double t0,
    double t_end, double dt) {
    using Mat = Eigen::Matrix<double, Dim, Dim>;
    const auto n = static_cast<std::size_t>(std::llround((t_end - t0) / dt));
    for (std::size_t i = 0; i < n; ++i) {
        const double t = t0 + static_cast<double>(i) * dt;
        const Mat D1 = drift(t);
        const Mat D2 = drift(t + 0.5 * dt);
        const Mat D4 = drift(t + dt);
        const Mat k1 = D1 * V + V * D1.transpose() + noise;
        const Mat V2 = V + 0.5 * dt * k1;
        const Mat k2 = D2 * V2 + V2 * D2.transpose() + noise;
        const Mat V3 = V + 0.5 * dt * k2;
        const Mat k3 = D2 * V3 + V3 * D2.transpose() + noise;
        const Mat V4 = V + dt * k3;
        const Mat k4 = D4 * V4 + V4 * D4.transpose() + noise;
        V += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        V = (0.5 * (V + V.transpose())).eval();
    }
    return V;
}

struct FluctuationEnergies {
    double mirror = 0.0;
    double cavity = 0.0;
    double exciton = 0.0;
};

/// mirror = V11, cavity = (V33+V44)/2, exciton = (V55+V66)/2, as defined;
/// subtract_vacuum removes the 1/2 zero-point term from each reading.
FluctuationEnergies fluctuation_energies(const CovarianceState& state,
                                         bool subtract_vacuum = false);

/// (V11 + V22)/2 - 1/2.
double phonon_number(const CovarianceState& state);

}  // namespace omqd
