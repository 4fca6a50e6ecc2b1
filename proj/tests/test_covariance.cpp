#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <numbers>
#include <random>

#include "omqd/covariance.hpp"
#include "test_util.hpp"

using namespace omqd;
using omqd::test::fig2_params;
using omqd::test::random_params;

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;
constexpr complexd kI{0.0, 1.0};

// Fluctuation equations in their complex form, mapped to quadratures through
// da = (dx + i dy)/sqrt(2); the independent route the drift matrix must match.
Eigen::Matrix<double, 6, 1> fluctuation_rhs(const Eigen::Matrix<double, 6, 1>& u,
                                            const MeanFieldState& mean, double t,
                                            const SystemParams& p) {
    const double s2 = std::sqrt(2.0);
    const complexd da{u(2) / s2, u(3) / s2};
    const complexd ds{u(4) / s2, u(5) / s2};
    const double dq = u(0), dp = u(1);
    const double Dd = qd_detuning(t, p);

    const double dq_dot = p.omega_m * dp;
    const double dp_dot = -p.omega_m * dq +
                          p.G * (mean.a * std::conj(da) + std::conj(mean.a) * da).real() -
                          p.gamma_m * dp;
    const complexd da_dot = (-kI * p.delta_c - p.kappa_a) * da +
                            kI * p.G * (mean.a * dq + mean.q * da) - kI * p.g0 * ds;
    const complexd ds_dot = -(p.kappa_d - kI * Dd * p.N) * ds + kI * p.g0 * da * p.N;

    Eigen::Matrix<double, 6, 1> out;
    out << dq_dot, dp_dot, s2 * da_dot.real(), s2 * da_dot.imag(), s2 * ds_dot.real(),
        s2 * ds_dot.imag();
    return out;
}

MeanFieldTrajectory zero_trajectory(double t_end, double dt) {
    MeanFieldTrajectory traj;
    traj.dt = dt;
    const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
    for (std::size_t i = 0; i <= n; ++i) {
        traj.times.push_back(static_cast<double>(i) * dt);
        traj.states.push_back({});
    }
    return traj;
}
}  // namespace

TEST_CASE("drift matrix: quiescent mean field leaves only the static blocks") {
    const SystemParams p = fig2_params();
    const Matrix6d D = drift_matrix(MeanFieldState{}, 0.0, p).D;
    CHECK(D(0, 1) == p.omega_m);
    CHECK(D(1, 0) == -p.omega_m);
    CHECK(D(1, 2) == 0.0);
    CHECK(D(1, 3) == 0.0);
    CHECK(D(2, 0) == 0.0);
    CHECK(D(3, 0) == 0.0);
    CHECK(D(2, 2) == -p.kappa_a);
    CHECK(D(3, 3) == -p.kappa_a);
    CHECK(D(4, 4) == -p.kappa_d);
    CHECK(D(5, 5) == -p.kappa_d);
    CHECK(D(2, 3) == p.delta_c);
    CHECK(D(3, 2) == -p.delta_c);
    CHECK(D(2, 5) == p.g0);
    CHECK(D(3, 4) == -p.g0);
    // detuning modulation vanishes at t = 0
    CHECK(D(4, 5) == 0.0);
    CHECK(D(5, 4) == 0.0);
}

TEST_CASE("drift matrix: optomechanical entries at a unit cavity amplitude") {
    const SystemParams p = fig2_params();
    const MeanFieldState mean{0.0, 0.0, {1.0, 0.0}, {0.0, 0.0}};
    const Matrix6d D = drift_matrix(mean, 0.0, p).D;
    const double s2G = std::sqrt(2.0) * p.G;
    CHECK(D(1, 2) == doctest::Approx(s2G).epsilon(1e-14));
    CHECK(D(3, 0) == doctest::Approx(s2G).epsilon(1e-14));
    CHECK(D(2, 0) == 0.0);
}

TEST_CASE("drift matrix equals the finite-difference Jacobian of the complex equations") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int draw = 0; draw < 20; ++draw) {
        const SystemParams p = random_params(rng);
        const MeanFieldState mean{2.0 * u(rng), 2.0 * u(rng),
                                  complexd{3.0 * u(rng), 3.0 * u(rng)},
                                  complexd{u(rng), u(rng)}};
        const double t = 5.0 * std::abs(u(rng));
        const Matrix6d D = drift_matrix(mean, t, p).D;
        const double h = 1e-4;
        for (int col = 0; col < 6; ++col) {
            Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Zero();
            e(col) = h;
            const auto plus = fluctuation_rhs(e, mean, t, p);
            const auto minus = fluctuation_rhs(-e, mean, t, p);
            const Eigen::Matrix<double, 6, 1> fd = (plus - minus) / (2.0 * h);
            for (int row = 0; row < 6; ++row)
                CHECK(std::abs(D(row, col) - fd(row)) < 1e-6);
        }
    }
}

TEST_CASE("diffusion matrix entries") {
    SystemParams p = fig2_params();
    Matrix6d N = diffusion_matrix(p);
    CHECK(N(1, 1) == doctest::Approx(0.01));
    CHECK(N(2, 2) == doctest::Approx(0.1));
    CHECK(N(3, 3) == doctest::Approx(0.1));
    CHECK(N(4, 4) == doctest::Approx(0.2));
    CHECK(N(5, 5) == doctest::Approx(0.2));
    CHECK(N(0, 0) == 0.0);
    p.n_b = 2.0;
    N = diffusion_matrix(p);
    CHECK(N(1, 1) == doctest::Approx(0.05));
    for (int r = 0; r < 6; ++r)
        for (int c = 0; c < 6; ++c)
            if (r != c) CHECK(N(r, c) == 0.0);
}

TEST_CASE("Ornstein-Uhlenbeck fixed point of the generic Lyapunov integrator") {
    using Mat2 = Eigen::Matrix2d;
    const double kappa = 0.5, noise = 0.3;
    const auto drift = [&](double) { return (-kappa * Mat2::Identity()).eval(); };
    const Mat2 V = integrate_lyapunov<2>(drift, noise * Mat2::Identity(), Mat2::Zero(), 0.0, 80.0,
                                         0.01);
    const Mat2 expected = noise / (2.0 * kappa) * Mat2::Identity();
    CHECK((V - expected).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("zero drift and zero noise freeze the covariance") {
    using Mat2 = Eigen::Matrix2d;
    Mat2 V0;
    V0 << 1.5, 0.2, 0.2, 0.7;
    const auto drift = [](double) { return Mat2::Zero().eval(); };
    const Mat2 V = integrate_lyapunov<2>(drift, Mat2::Zero(), V0, 0.0, 10.0, 0.1);
    CHECK((V - V0).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("toy Lyapunov run matches the closed-form solution") {
    using Mat3 = Eigen::Matrix3d;
    Mat3 D;
    D << -0.3, 0.2, 0.0, -0.2, -0.3, 0.1, 0.0, -0.1, -0.4;
    Mat3 N = Mat3::Zero();
    N.diagonal() << 0.2, 0.3, 0.1;
    Mat3 V0 = Mat3::Zero();
    V0.diagonal() << 1.0, 0.5, 0.25;

    // stationary solution from the Kronecker-form linear system
    Eigen::Matrix<double, 9, 9> K = Eigen::Matrix<double, 9, 9>::Zero();
    Eigen::Matrix<double, 9, 1> rhs;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            const int row = 3 * i + j;
            rhs(row) = -N(i, j);
            for (int k = 0; k < 3; ++k) {
                K(row, 3 * k + j) += D(i, k);
                K(row, 3 * i + k) += D(j, k);
            }
        }
    const Eigen::Matrix<double, 9, 1> vinf_vec = K.partialPivLu().solve(rhs);
    Mat3 Vinf;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) Vinf(i, j) = vinf_vec(3 * i + j);

    const double t_end = 100.0;
    const Mat3 expDt = (D * t_end).exp();
    const Mat3 closed = expDt * (V0 - Vinf) * expDt.transpose() + Vinf;
    const auto drift = [&](double) { return D; };
    const Mat3 V = integrate_lyapunov<3>(drift, N, V0, 0.0, t_end, 0.01);
    CHECK((V - closed).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("uncoupled thermal mirror relaxes to detailed balance") {
    SystemParams p = fig2_params();
    p.G = 0.0;
    p.g0 = 0.0;
    p.E0 = 0.0;
    p.eps = 0.0;
    p.delta_0 = 0.0;
    p.gamma_m = 0.05;
    p.n_b = 2.0;
    // the transient decays at gamma_m from a 2.0-deep start, so 20 damping
    // times are needed to reach the 1e-6 window
    const double t_end = 20.0 / p.gamma_m;
    const double dt = 0.02;
    const auto traj = zero_trajectory(t_end, dt);
    const auto cov = integrate_covariance(p, CovarianceState{Matrix6d::Identity() * 0.5, 0.0},
                                          traj, t_end);
    const Matrix6d& V = cov.back().V;
    CHECK(std::abs(V(0, 0) - 2.5) < 1e-6);
    CHECK(std::abs(V(1, 1) - 2.5) < 1e-6);
    CHECK(std::abs(V(0, 1)) < 1e-6);
    CHECK(std::abs(V(2, 2) - 0.5) < 1e-6);
    CHECK(std::abs(V(4, 4) - 0.5) < 1e-6);
}

TEST_CASE("covariance stays symmetric along the run") {
    SystemParams p = fig2_params();
    p.G = 0.005;
    const double dt = kTau / 2000.0;
    const auto traj = integrate_meanfield(p, MeanFieldState{}, 5.0 * kTau, dt);
    const auto cov =
        integrate_covariance(p, CovarianceState{initial_covariance(p), 0.0}, traj, 5.0 * kTau);
    for (const auto& s : cov)
        CHECK((s.V - s.V.transpose()).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fluctuation energies acquire the modulation period once the cycle is reached") {
    SystemParams p = fig2_params();
    p.G = 0.005;
    const double dt = kTau / 500.0;
    const double t_end = 56.0 * kTau;
    const auto traj = integrate_meanfield(p, MeanFieldState{}, t_end, dt);
    const auto cov =
        integrate_covariance(p, CovarianceState{initial_covariance(p), 0.0}, traj, t_end);
    const std::size_t ps = 500;
    const std::size_t i_late = cov.size() - 1 - ps;
    const std::size_t i_early = 20 * ps;
    const double late = (cov[i_late].V - cov[i_late + ps].V).cwiseAbs().maxCoeff();
    const double early = (cov[i_early].V - cov[i_early + ps].V).cwiseAbs().maxCoeff();
    CHECK(late < early);
    CHECK(late < 5e-3);
}

TEST_CASE("covariance instability and grid errors") {
    SystemParams p = fig2_params();
    const double dt = kTau / 200.0;
    const auto traj = integrate_meanfield(p, MeanFieldState{}, 2.0 * kTau, dt);
    SUBCASE("entry bound") {
        CHECK_THROWS_AS((void)integrate_covariance(
                            p, CovarianceState{initial_covariance(p), 0.0}, traj, 2.0 * kTau, 0.4),
                        InstabilityError);
    }
    SUBCASE("trajectory too short") {
        CHECK_THROWS_WITH_AS((void)integrate_covariance(
                                 p, CovarianceState{initial_covariance(p), 0.0}, traj, 4.0 * kTau),
                             doctest::Contains("grid mismatch"), std::invalid_argument);
    }
    SUBCASE("asymmetric initial covariance") {
        Matrix6d V0 = initial_covariance(p);
        V0(0, 3) = 0.1;  // no transpose partner
        CHECK_THROWS_AS((void)integrate_covariance(p, CovarianceState{V0, 0.0}, traj, 2.0 * kTau),
                        std::invalid_argument);
    }
}

TEST_CASE("fluctuation energies and phonon number read the right entries") {
    CovarianceState s;
    s.V = Matrix6d::Identity() * 0.5;
    auto e = fluctuation_energies(s);
    CHECK(e.mirror == 0.5);
    CHECK(e.cavity == 0.5);
    CHECK(e.exciton == 0.5);
    CHECK(phonon_number(s) == 0.0);

    s.V.diagonal() << 2.5, 2.5, 0.5, 0.5, 0.5, 0.5;
    e = fluctuation_energies(s);
    CHECK(e.mirror == 2.5);
    CHECK(phonon_number(s) == doctest::Approx(2.0));

    e = fluctuation_energies(s, true);
    CHECK(e.mirror == doctest::Approx(2.0));
    CHECK(e.cavity == doctest::Approx(0.0));
}
