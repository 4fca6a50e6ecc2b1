#include "omqd/covariance.hpp"

#include <cmath>
#include <sstream>

namespace omqd {

DriftMatrix drift_matrix(const MeanFieldState& mean, double t, const SystemParams& p) {
    const double Ar = mean.a.real();
    const double Ai = mean.a.imag();
    const double Q = mean.q;
    const double M = qd_detuning(t, p);
    const double F1 = p.delta_c - p.G * Q;
    const double s2 = std::sqrt(2.0);

    DriftMatrix out;
    out.t = t;
    Matrix6d& D = out.D;
    D.setZero();
    D(0, 1) = p.omega_m;
    D(1, 0) = -p.omega_m;
    D(1, 1) = -p.gamma_m;
    D(1, 2) = s2 * p.G * Ar;
    D(1, 3) = s2 * p.G * Ai;
    D(2, 0) = -s2 * p.G * Ai;
    D(2, 2) = -p.kappa_a;
    D(2, 3) = F1;
    D(2, 5) = p.g0;
    D(3, 0) = s2 * p.G * Ar;
    D(3, 2) = -F1;
    D(3, 3) = -p.kappa_a;
    D(3, 4) = -p.g0;
    D(4, 3) = -p.g0 * p.N;
    D(4, 4) = -p.kappa_d;
    D(4, 5) = -M * p.N;
    D(5, 2) = p.g0 * p.N;
    D(5, 4) = M * p.N;
    D(5, 5) = -p.kappa_d;
    return out;
}

Matrix6d diffusion_matrix(const SystemParams& p) {
    Matrix6d N = Matrix6d::Zero();
    N(1, 1) = p.gamma_m * (2.0 * p.n_b + 1.0);
    N(2, 2) = p.kappa_a;
    N(3, 3) = p.kappa_a;
    N(4, 4) = p.kappa_d;
    N(5, 5) = p.kappa_d;
    return N;
}

Matrix6d initial_covariance(const SystemParams& p) {
    Matrix6d V = Matrix6d::Zero();
    V(0, 0) = p.n_b + 0.5;
    V(1, 1) = p.n_b + 0.5;
    for (int i = 2; i < 6; ++i) V(i, i) = 0.5;
    return V;
}

namespace {

Matrix6d lyapunov_rhs(const Matrix6d& D, const Matrix6d& V, const Matrix6d& noise) {
    return D * V + V * D.transpose() + noise;
}

}  // namespace

std::vector<CovarianceState> integrate_covariance(const SystemParams& params,
                                                  const CovarianceState& V0,
                                                  const MeanFieldTrajectory& mean_traj,
                                                  double t_end, double bound) {
    const double dt = mean_traj.dt;
    if (!(dt > 0.0) || mean_traj.states.size() < 2)
        throw std::invalid_argument("grid mismatch: mean trajectory has no usable grid");
    const auto steps = static_cast<std::size_t>(std::llround(t_end / dt));
    if (std::abs(static_cast<double>(steps) * dt - t_end) > 1e-9 * std::max(t_end, 1.0) ||
        steps + 1 > mean_traj.states.size() || mean_traj.times.front() != 0.0)
        throw std::invalid_argument("grid mismatch: mean trajectory does not cover [0, t_end]");
    if ((V0.V - V0.V.transpose()).cwiseAbs().maxCoeff() > 1e-9)
        throw std::invalid_argument("integrate_covariance: V0 is not symmetric");

    const Matrix6d noise = diffusion_matrix(params);
    std::vector<CovarianceState> out;
    out.reserve(steps + 1);
    Matrix6d V = 0.5 * (V0.V + V0.V.transpose());
    out.push_back({V, 0.0});

    for (std::size_t i = 0; i < steps; ++i) {
        const double t = static_cast<double>(i) * dt;
        // joint RK4 step; the mean field re-anchors at the stored sample
        const MeanFieldState& m1 = mean_traj.states[i];
        const MeanFieldState km1 = meanfield_rhs(m1, t, params);
        const MeanFieldState m2 = m1 + (0.5 * dt) * km1;
        const MeanFieldState km2 = meanfield_rhs(m2, t + 0.5 * dt, params);
        const MeanFieldState m3 = m1 + (0.5 * dt) * km2;
        const MeanFieldState km3 = meanfield_rhs(m3, t + 0.5 * dt, params);
        const MeanFieldState m4 = m1 + dt * km3;

        const Matrix6d D1 = drift_matrix(m1, t, params).D;
        const Matrix6d D2 = drift_matrix(m2, t + 0.5 * dt, params).D;
        const Matrix6d D3 = drift_matrix(m3, t + 0.5 * dt, params).D;
        const Matrix6d D4 = drift_matrix(m4, t + dt, params).D;

        const Matrix6d k1 = lyapunov_rhs(D1, V, noise);
        const Matrix6d k2 = lyapunov_rhs(D2, V + 0.5 * dt * k1, noise);
        const Matrix6d k3 = lyapunov_rhs(D3, V + 0.5 * dt * k2, noise);
        const Matrix6d k4 = lyapunov_rhs(D4, V + dt * k3, noise);
        V += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        V = (0.5 * (V + V.transpose())).eval();

        const double tn = static_cast<double>(i + 1) * dt;
        if (!V.allFinite() || V.cwiseAbs().maxCoeff() > bound) {
            std::ostringstream os;
            os << "instability detected: covariance entry exceeded " << bound << " at t = " << tn;
            throw InstabilityError(os.str(), tn);
        }
        out.push_back({V, tn});
    }
    return out;
}

FluctuationEnergies fluctuation_energies(const CovarianceState& s, bool subtract_vacuum) {
    FluctuationEnergies e;
    e.mirror = s.V(0, 0);
    e.cavity = (s.V(2, 2) + s.V(3, 3)) / 2.0;
    e.exciton = (s.V(4, 4) + s.V(5, 5)) / 2.0;
    if (subtract_vacuum) {
        e.mirror -= 0.5;
        e.cavity -= 0.5;
        e.exciton -= 0.5;
    }
    return e;
}

double phonon_number(const CovarianceState& s) { return (s.V(0, 0) + s.V(1, 1)) / 2.0 - 0.5; }

}  // namespace omqd
