#include <doctest.h>

#include <cmath>
#include <numbers>

#include "omqd/meanfield.hpp"
#include "test_util.hpp"

using namespace omqd;
using omqd::test::fig2_params;

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;

double state_distance(const MeanFieldState& x, const MeanFieldState& y) {
    return std::max({std::abs(x.q - y.q), std::abs(x.p - y.p), std::abs(x.a - y.a),
                     std::abs(x.sigma - y.sigma)});
}
}  // namespace

TEST_CASE("rhs: only the drive survives at the zero state") {
    SystemParams p = fig2_params();
    p.eps = 0.0;
    const MeanFieldState d = meanfield_rhs(MeanFieldState{}, 0.0, p);
    CHECK(d.q == 0.0);
    CHECK(d.p == 0.0);
    CHECK(d.a == complexd{1.0, 0.0});
    CHECK(d.sigma == complexd{0.0, 0.0});
}

TEST_CASE("rhs: mirror decouples when both couplings vanish") {
    SystemParams p = fig2_params();
    p.G = 0.0;
    p.g0 = 0.0;
    for (auto a : {complexd{0.0, 0.0}, complexd{3.0, -2.0}, complexd{-7.5, 0.1}}) {
        const MeanFieldState s{0.4, -1.2, a, {0.3, 0.3}};
        const MeanFieldState d = meanfield_rhs(s, 0.9, p);
        CHECK(d.q == doctest::Approx(p.omega_m * s.p));
        CHECK(d.p == doctest::Approx(-p.omega_m * s.q - p.gamma_m * s.p));
    }
}

TEST_CASE("rhs: baseline parameters at a unit cavity amplitude") {
    const SystemParams p = fig2_params();
    const MeanFieldState s{0.0, 0.0, {1.0, 0.0}, {0.0, 0.0}};
    const MeanFieldState d = meanfield_rhs(s, 0.0, p);
    CHECK(d.p == doctest::Approx(0.01).epsilon(1e-14));
    // (-i*delta_c - kappa_a)*1 + E(0) = -0.1 - i + 1.6
    CHECK(d.a.real() == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(d.a.imag() == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("decoupled undriven-modulation cavity relaxes to its fixed point") {
    SystemParams p = fig2_params();
    p.G = 0.0;
    p.g0 = 0.0;
    p.eps = 0.0;
    const auto traj = integrate_meanfield(p, MeanFieldState{}, 150.0, 0.01);
    const complexd expected = p.E0 / (p.kappa_a + complexd{0.0, 1.0} * p.delta_c);
    CHECK(std::abs(traj.states.back().a - expected) < 1e-6);
}

TEST_CASE("Richardson: the step error scales at fourth order") {
    const SystemParams p = fig2_params();
    const double t_end = 2.0 * kTau;
    const double dt = kTau / 200.0;
    const auto y1 = integrate_meanfield(p, MeanFieldState{}, t_end, dt).states.back();
    const auto y2 = integrate_meanfield(p, MeanFieldState{}, t_end, dt / 2.0).states.back();
    const auto y3 = integrate_meanfield(p, MeanFieldState{}, t_end, dt / 4.0).states.back();
    const double e1 = state_distance(y1, y2);
    const double e2 = state_distance(y2, y3);
    REQUIRE(e2 > 0.0);
    const double ratio = e1 / e2;
    CHECK(ratio > 10.0);  // ~16 for a clean fourth-order scheme
    CHECK(ratio < 24.0);
    CHECK(e1 < 10.0 * 16.0 * e2);
}

TEST_CASE("free damped system decays to the zero state") {
    SystemParams p = fig2_params();
    p.G = 0.0;
    p.g0 = 0.0;
    p.E0 = 0.0;
    p.eps = 0.0;
    p.delta_0 = 0.0;
    p.gamma_m = 0.5;
    p.kappa_a = 0.5;
    p.kappa_d = 0.5;
    const MeanFieldState init{1.0, 1.0, {1.0, 1.0}, {0.0, 0.5}};
    const auto traj = integrate_meanfield(p, init, 80.0, 0.01);
    CHECK(traj.states.back().max_abs() < 1e-6);
}

TEST_CASE("undamped free mirror conserves its energy") {
    SystemParams p = fig2_params();
    p.G = 0.0;
    p.g0 = 0.0;
    p.E0 = 0.0;
    p.eps = 0.0;
    p.gamma_m = 0.0;
    const MeanFieldState init{0.8, -0.6, {0.0, 0.0}, {0.0, 0.0}};
    const auto traj = integrate_meanfield(p, init, 100.0, 0.01);
    const double e0 = init.q * init.q + init.p * init.p;
    for (std::size_t i = 0; i < traj.states.size(); i += 500) {
        const auto& s = traj.states[i];
        CHECK(std::abs(s.q * s.q + s.p * s.p - e0) < 1e-6);
    }
}

TEST_CASE("continuing a run matches the direct run bitwise") {
    const SystemParams p = fig2_params();
    const double dt = kTau / 500.0;
    const std::size_t n1 = 700, n2 = 1100;
    const auto direct = integrate_meanfield(p, MeanFieldState{}, static_cast<double>(n2) * dt, dt);
    const auto first = integrate_meanfield(p, MeanFieldState{}, static_cast<double>(n1) * dt, dt);
    const auto cont = integrate_meanfield(p, first.states.back(),
                                          static_cast<double>(n2 - n1) * dt, dt, 1e6, n1);
    const auto& a = direct.states.back();
    const auto& b = cont.states.back();
    CHECK(a.q == b.q);
    CHECK(a.p == b.p);
    CHECK(a.a == b.a);
    CHECK(a.sigma == b.sigma);
}

TEST_CASE("instability is reported with its time") {
    const SystemParams p = fig2_params();
    CHECK_THROWS_AS((void)integrate_meanfield(p, MeanFieldState{}, 10.0 * kTau, kTau / 2000.0, 1.0),
                    InstabilityError);
    try {
        (void)integrate_meanfield(p, MeanFieldState{}, 10.0 * kTau, kTau / 2000.0, 1.0);
    } catch (const InstabilityError& e) {
        CHECK(e.time() > 0.0);
        CHECK(std::string(e.what()).find("instability detected") != std::string::npos);
    }
}

TEST_CASE("limit cycle: constant trajectory converges at t* = 0") {
    MeanFieldTrajectory traj;
    traj.dt = 0.5;
    for (int i = 0; i <= 40; ++i) {
        traj.times.push_back(0.5 * i);
        traj.states.push_back({1.0, 2.0, {3.0, 4.0}, {5.0, 6.0}});
    }
    const auto t = detect_limit_cycle(traj, 5.0, 1e-6);
    REQUIRE(t.has_value());
    CHECK(*t == 0.0);
}

TEST_CASE("limit cycle: monotone growth never converges") {
    MeanFieldTrajectory traj;
    traj.dt = 0.5;
    for (int i = 0; i <= 40; ++i) {
        traj.times.push_back(0.5 * i);
        traj.states.push_back({0.1 * i, 0.0, {0.0, 0.0}, {0.0, 0.0}});
    }
    CHECK_FALSE(detect_limit_cycle(traj, 5.0, 1e-3).has_value());
}

TEST_CASE("limit cycle: incommensurate period is rejected") {
    MeanFieldTrajectory traj;
    traj.dt = 0.5;
    for (int i = 0; i <= 40; ++i) {
        traj.times.push_back(0.5 * i);
        traj.states.push_back({});
    }
    CHECK_THROWS_WITH_AS((void)detect_limit_cycle(traj, 5.25, 1e-3),
                         doctest::Contains("incommensurate step"), std::invalid_argument);
}

TEST_CASE("baseline run locks onto the modulation-period cycle") {
    const SystemParams p = fig2_params();
    const double dt = kTau / 2000.0;
    const std::size_t ps = 2000;
    const auto traj = integrate_meanfield(p, MeanFieldState{}, 100.0 * kTau, dt);

    // cavity amplitude settles below 1e-3 of its swing inside 30-50 periods;
    // the mirror needs a few times longer at the same relative threshold
    double re_lo = 1e300, re_hi = -1e300, im_lo = 1e300, im_hi = -1e300;
    double q_lo = 1e300, q_hi = -1e300;
    for (std::size_t i = traj.states.size() - ps - 1; i < traj.states.size(); ++i) {
        re_lo = std::min(re_lo, traj.states[i].a.real());
        re_hi = std::max(re_hi, traj.states[i].a.real());
        im_lo = std::min(im_lo, traj.states[i].a.imag());
        im_hi = std::max(im_hi, traj.states[i].a.imag());
        q_lo = std::min(q_lo, traj.states[i].q);
        q_hi = std::max(q_hi, traj.states[i].q);
    }
    const double a_scale = std::max(re_hi - re_lo, im_hi - im_lo);
    std::ptrdiff_t last_bad = -1;
    for (std::size_t i = 0; i + ps < traj.states.size(); ++i)
        if (std::abs(traj.states[i].a - traj.states[i + ps].a) >= 1e-3 * a_scale)
            last_bad = static_cast<std::ptrdiff_t>(i);
    const double a_lock = traj.times[static_cast<std::size_t>(last_bad + 1)];
    CHECK(a_lock > 25.0 * kTau);
    CHECK(a_lock <= 50.0 * kTau);

    // the full-state detector (every component below tol) therefore locks later
    const auto tstar = detect_limit_cycle(traj, kTau, 1e-3 * (q_hi - q_lo));
    REQUIRE(tstar.has_value());
    CHECK(*tstar > a_lock);
    CHECK(*tstar <= 95.0 * kTau);
}

TEST_CASE("converged cycle does not depend on the start within its basin") {
    const SystemParams p = fig2_params();
    const double dt = kTau / 1000.0;
    const auto t1 = integrate_meanfield(p, MeanFieldState{}, 160.0 * kTau, dt);
    const auto t2 = integrate_meanfield(p, MeanFieldState{0.5, -0.5, {1.0, 1.0}, {0.1, 0.0}},
                                        160.0 * kTau, dt);
    double worst = 0.0;
    for (std::size_t i = t1.states.size() - 1001; i < t1.states.size(); ++i)
        worst = std::max(worst, state_distance(t1.states[i], t2.states[i]));
    CHECK(worst < 2e-2);
}

TEST_CASE("steady displacement") {
    SystemParams p = fig2_params();
    SUBCASE("vanishing optomechanical coupling gives zero") {
        p.G = 0.0;
        CHECK(steady_displacement_qs(p, 123.4) == 0.0);
    }
    SUBCASE("no modulation and no coherence gives zero") {
        p.eps = 0.0;
        CHECK(steady_displacement_qs(p, 0.0) == 0.0);
    }
    SUBCASE("closed form") {
        p.G = 0.005;
        const double sigma2 = 0.5;
        const double expected =
            0.005 * sigma2 / (0.3 * 0.3) * (0.25 + 0.04) + 0.005 * (0.36 / 2.0);
        CHECK(steady_displacement_qs(p, sigma2) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("division by zero is reported") {
        p.g0 = 0.0;
        CHECK_THROWS_AS((void)steady_displacement_qs(p, 0.5), std::domain_error);
        p.g0 = 0.3;
        p.N = 0.0;
        CHECK_THROWS_AS((void)steady_displacement_qs(p, 0.5), std::domain_error);
    }
}
