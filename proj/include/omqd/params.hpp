#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace omqd {

/// Physical parameters of the modulated cavity/mirror/exciton system.
/// All rates and frequencies are dimensionless in units of the mechanical
/// frequency omega_m (kept as a field, defaulting to 1).
struct SystemParams {
    double omega_m = 1.0;  // mechanical frequency (the unit)
    double delta_c = 0.0;  // cavity-laser detuning
    double delta_0 = 0.0;  // maximum exciton detuning
    double omega_e = 0.0;  // exciton modulation frequency
    double Omega = 0.0;    // drive modulation frequency
    double E0 = 0.0;       // constant drive amplitude
    double eps = 0.0;      // drive modulation amplitude
    double G = 0.0;        // optomechanical coupling
    double g0 = 0.0;       // exciton-cavity coupling
    double kappa_a = 0.0;  // cavity decay
    double kappa_d = 0.0;  // exciton decay
    double gamma_m = 0.0;  // mechanical damping
    double N = 1.0;        // population inversion <sigma_z>, held fixed
    double n_b = 0.0;      // thermal phonon occupation of the mechanical bath

    /// Modulation period 2*pi/Omega.
    double modulation_period() const;
};

/// Drive amplitude E(t) = E0 + eps*cos(Omega*t).
double drive_amplitude(double t, const SystemParams& params);

/// Exciton detuning Delta_d(t) = delta_0*(1 - cos(omega_e*t))/2, in [0, delta_0].
double qd_detuning(double t, const SystemParams& params);

/// One message per violated invariant; empty means valid.
std::vector<std::string> validation_errors(const SystemParams& params);

class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

/// Returns params unchanged iff every invariant holds, otherwise throws
/// ValidationError carrying all violations.
SystemParams validate(const SystemParams& params);

}  // namespace omqd
