#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "omqd/params.hpp"

namespace omqd {

using complexd = std::complex<double>;

/// Classical mean values (<q>, <p>, <a>, <sigma_->) at one instant.
struct MeanFieldState {
    double q = 0.0;
    double p = 0.0;
    complexd a{0.0, 0.0};
    complexd sigma{0.0, 0.0};

    bool finite() const;
    double max_abs() const;

    friend MeanFieldState operator+(const MeanFieldState& l, const MeanFieldState& r) {
        return {l.q + r.q, l.p + r.p, l.a + r.a, l.sigma + r.sigma};
    }
    friend MeanFieldState operator*(double s, const MeanFieldState& x) {
        return {s * x.q, s * x.p, s * x.a, s * x.sigma};
    }
};

/// Uniformly sampled trajectory; times[i] = i*dt.
struct MeanFieldTrajectory {
    std::vector<double> times;
    std::vector<MeanFieldState> states;
    double dt = 0.0;
};

/// Time derivative of the mean fields: the coupled nonlinear equations
///   q' = omega_m p
///   p' = -omega_m q + G|a|^2 - gamma_m p
///   a' = (-i delta_c - kappa_a) a + i G a q + E(t) - i g0 sigma
///   sigma' = -(kappa_d - i Delta_d(t) N) sigma + i g0 a N
MeanFieldState meanfield_rhs(const MeanFieldState& state, double t, const SystemParams& params);

/// Thrown when a trajectory or covariance component exceeds its magnitude
/// bound; carries the blow-up time.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& what, double t);
    double time() const { return time_; }

private:
    double time_;
};

/// Fixed-step classical fourth-order Runge-Kutta over [t0, t0 + t_end] with
/// t0 = start_step*dt (an integer offset keeps continued runs bitwise equal
/// to direct ones).  Throws InstabilityError if any component magnitude
/// exceeds `bound`.
MeanFieldTrajectory integrate_meanfield(const SystemParams& params, const MeanFieldState& initial,
                                        double t_end, double dt, double bound = 1e6,
                                        std::size_t start_step = 0);

/// Earliest sampled time t* after which every state stays within `tol`
/// (per component) of its value one period tau later; nullopt if the
/// trajectory never locks onto the cycle.
/// Requires tau to be an integer multiple of the sampling step.
std::optional<double> detect_limit_cycle(const MeanFieldTrajectory& traj, double tau, double tol);

/// Analytic steady displacement,
///   q_s = (chi |sigma|^2 / (g0^2 N^2)) [delta_0^2 N^2 / 4 + kappa_d^2] + chi C,
/// chi = G/omega_m, C = eps^2/(2 Omega^2); |sigma|^2 is supplied by the
/// caller (long-time average from a mean-field run).
double steady_displacement_qs(const SystemParams& params, double sigma_ss_mag2);

}  // namespace omqd
