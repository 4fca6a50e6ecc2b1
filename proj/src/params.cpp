#include "omqd/params.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace omqd {

double SystemParams::modulation_period() const {
    return 2.0 * std::numbers::pi / Omega;
}

double drive_amplitude(double t, const SystemParams& params) {
    return params.E0 + params.eps * std::cos(params.Omega * t);
}

double qd_detuning(double t, const SystemParams& params) {
    return params.delta_0 * (1.0 - std::cos(params.omega_e * t)) / 2.0;
}

std::vector<std::string> validation_errors(const SystemParams& p) {
    std::vector<std::string> errs;
    auto bad = [&](bool cond, const std::string& msg) {
        if (cond) errs.push_back(msg);
    };
    auto num = [](double v) {
        std::ostringstream os;
        os << v;
        return os.str();
    };
    bad(!(p.kappa_a > 0.0), "non-positive cavity decay: kappa_a = " + num(p.kappa_a));
    bad(!(p.kappa_d > 0.0), "non-positive exciton decay: kappa_d = " + num(p.kappa_d));
    bad(!(p.gamma_m >= 0.0), "negative mechanical damping: gamma_m = " + num(p.gamma_m));
    bad(!(p.omega_m > 0.0), "non-positive mechanical frequency: omega_m = " + num(p.omega_m));
    bad(p.eps != 0.0 && !(p.Omega > 0.0),
        "non-positive drive modulation frequency with eps != 0: Omega = " + num(p.Omega));
    bad(p.delta_0 != 0.0 && !(p.omega_e > 0.0),
        "non-positive exciton modulation frequency with delta_0 != 0: omega_e = " + num(p.omega_e));
    bad(!(p.N >= -1.0 && p.N <= 1.0), "inversion out of range: N = " + num(p.N));
    bad(!(p.n_b >= 0.0), "negative n_b: n_b = " + num(p.n_b));
    for (double v : {p.omega_m, p.delta_c, p.delta_0, p.omega_e, p.Omega, p.E0, p.eps, p.G, p.g0,
                     p.kappa_a, p.kappa_d, p.gamma_m, p.N, p.n_b}) {
        if (!std::isfinite(v)) {
            errs.push_back("non-finite parameter value");
            break;
        }
    }
    return errs;
}

namespace {
std::string join(const std::vector<std::string>& errs) {
    std::string out = "invalid parameters:";
    for (const auto& e : errs) out += "\n  - " + e;
    return out;
}
}  // namespace

ValidationError::ValidationError(std::vector<std::string> errors)
    : std::runtime_error(join(errors)), errors_(std::move(errors)) {}

SystemParams validate(const SystemParams& params) {
    auto errs = validation_errors(params);
    if (!errs.empty()) throw ValidationError(std::move(errs));
    return params;
}

}  // namespace omqd
