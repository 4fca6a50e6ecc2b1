#pragma once

#include <Eigen/Dense>

#include <array>
#include <span>
#include <vector>

#include "omqd/covariance.hpp"

namespace omqd {

using Matrix2d = Eigen::Matrix2d;
using Matrix4d = Eigen::Matrix4d;

enum class Mode { mirror = 0, cavity = 1, qd = 2 };

/// Two-mode reduction of the full correlation matrix:
/// [[X, Z], [Z^T, Y]] with X, Y the single-mode blocks and Z the cross block.
struct TwoModeCovariance {
    Matrix2d X = Matrix2d::Zero();
    Matrix2d Y = Matrix2d::Zero();
    Matrix2d Z = Matrix2d::Zero();

    Matrix4d assembled() const;
};

/// Extracts the (modeA, modeB) blocks; mirror -> rows/cols (1,2),
/// cavity -> (3,4), qd -> (5,6) in 1-based terms.
TwoModeCovariance extract_two_mode(const CovarianceState& state, Mode mode_a, Mode mode_b);

class UnphysicalBlockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Smallest symplectic eigenvalue of the partial transpose via the closed
/// form nu = sqrt((Sigma - sqrt(Sigma^2 - 4 det V'))/2),
/// Sigma = det X + det Y - 2 det Z.  det V' uses pivoted elimination.
double nu_minus(const TwoModeCovariance& tm);

/// Logarithmic negativity max(0, -ln(2 nu_minus)).  Discriminants in
/// (-1e-9, 0) are clamped to zero; below that the block is reported as
/// unphysical.
double log_negativity(const TwoModeCovariance& tm);

/// Independent route to the partial-transpose symplectic spectrum: the
/// absolute eigenvalue pairs of i*Omega_s*Vtilde, sorted ascending.
std::array<double, 2> symplectic_oracle(const TwoModeCovariance& tm);

struct EntanglementReport {
    double t = 0.0;
    double E_md = 0.0;  // qd-mirror
    double E_cd = 0.0;  // qd-cavity
    double E_cm = 0.0;  // cavity-mirror
    FluctuationEnergies energies;
    double phonons = 0.0;
};

/// Per-sample pairwise log-negativities plus fluctuation energies and
/// phonon number.  Propagates UnphysicalBlockError with the timestamp.
std::vector<EntanglementReport> entanglement_timeseries(std::span<const CovarianceState> cov_seq);

}  // namespace omqd
