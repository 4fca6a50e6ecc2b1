#include "omqd/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omqd {

namespace {
constexpr complexd kI{0.0, 1.0};
}

bool MeanFieldState::finite() const {
    return std::isfinite(q) && std::isfinite(p) && std::isfinite(a.real()) &&
           std::isfinite(a.imag()) && std::isfinite(sigma.real()) && std::isfinite(sigma.imag());
}

double MeanFieldState::max_abs() const {
    return std::max({std::abs(q), std::abs(p), std::abs(a), std::abs(sigma)});
}

MeanFieldState meanfield_rhs(const MeanFieldState& s, double t, const SystemParams& p) {
    const double E = drive_amplitude(t, p);
    const double Dd = qd_detuning(t, p);
    MeanFieldState d;
    d.q = p.omega_m * s.p;
    d.p = -p.omega_m * s.q + p.G * std::norm(s.a) - p.gamma_m * s.p;
    d.a = (-kI * p.delta_c - p.kappa_a) * s.a + kI * p.G * s.a * s.q + E - kI * p.g0 * s.sigma;
    d.sigma = -(p.kappa_d - kI * Dd * p.N) * s.sigma + kI * p.g0 * s.a * p.N;
    return d;
}

InstabilityError::InstabilityError(const std::string& what, double t)
    : std::runtime_error(what), time_(t) {}

namespace {

MeanFieldState rk4_step(const MeanFieldState& y, double t, double dt, const SystemParams& p) {
    const MeanFieldState k1 = meanfield_rhs(y, t, p);
    const MeanFieldState k2 = meanfield_rhs(y + (0.5 * dt) * k1, t + 0.5 * dt, p);
    const MeanFieldState k3 = meanfield_rhs(y + (0.5 * dt) * k2, t + 0.5 * dt, p);
    const MeanFieldState k4 = meanfield_rhs(y + dt * k3, t + dt, p);
    return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

MeanFieldTrajectory integrate_meanfield(const SystemParams& params, const MeanFieldState& initial,
                                        double t_end, double dt, double bound,
                                        std::size_t start_step) {
    if (!(dt > 0.0)) throw std::invalid_argument("integrate_meanfield: dt must be positive");
    if (!(t_end >= dt)) throw std::invalid_argument("integrate_meanfield: t_end must be >= dt");
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));

    MeanFieldTrajectory traj;
    traj.dt = dt;
    traj.times.reserve(n + 1);
    traj.states.reserve(n + 1);
    traj.times.push_back(static_cast<double>(start_step) * dt);
    traj.states.push_back(initial);

    MeanFieldState y = initial;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(start_step + i) * dt;
        y = rk4_step(y, t, dt, params);
        if (!y.finite() || y.max_abs() > bound) {
            std::ostringstream os;
            os << "instability detected: mean-field component exceeded " << bound << " at t = "
               << t + dt;
            throw InstabilityError(os.str(), t + dt);
        }
        traj.times.push_back(static_cast<double>(start_step + i + 1) * dt);
        traj.states.push_back(y);
    }
    return traj;
}

std::optional<double> detect_limit_cycle(const MeanFieldTrajectory& traj, double tau, double tol) {
    if (traj.states.size() < 2 || traj.dt <= 0.0)
        throw std::invalid_argument("detect_limit_cycle: trajectory too short");
    const double ratio = tau / traj.dt;
    const auto period_steps = static_cast<std::size_t>(std::llround(ratio));
    if (period_steps == 0 || std::abs(ratio - static_cast<double>(period_steps)) > 1e-9 * ratio)
        throw std::invalid_argument("incommensurate step: tau/dt is not an integer");
    const std::size_t n = traj.states.size();
    if (n < 2 * period_steps + 1)
        throw std::invalid_argument("detect_limit_cycle: trajectory spans less than 2*tau");

    // Earliest index from which the per-component distance to the state one
    // period later never reaches tol again.
    std::ptrdiff_t last_bad = -1;
    for (std::size_t i = 0; i + period_steps < n; ++i) {
        const MeanFieldState& x = traj.states[i];
        const MeanFieldState& y = traj.states[i + period_steps];
        const double dist = std::max({std::abs(x.q - y.q), std::abs(x.p - y.p),
                                      std::abs(x.a - y.a), std::abs(x.sigma - y.sigma)});
        if (dist >= tol) last_bad = static_cast<std::ptrdiff_t>(i);
    }
    const std::size_t first_good = static_cast<std::size_t>(last_bad + 1);
    if (first_good + period_steps >= n) return std::nullopt;
    return traj.times[first_good];
}

double steady_displacement_qs(const SystemParams& p, double sigma_ss_mag2) {
    if (p.g0 == 0.0 || p.N == 0.0)
        throw std::domain_error("steady_displacement_qs: division by zero (g0 or N is zero)");
    if (!(p.Omega > 0.0))
        throw std::domain_error("steady_displacement_qs: Omega must be positive");
    const double chi = p.G / p.omega_m;
    const double C = p.eps * p.eps / (2.0 * p.Omega * p.Omega);
    const double bracket = p.delta_0 * p.delta_0 * p.N * p.N / 4.0 + p.kappa_d * p.kappa_d;
    return chi * sigma_ss_mag2 / (p.g0 * p.g0 * p.N * p.N) * bracket + chi * C;
}

}  // namespace omqd
