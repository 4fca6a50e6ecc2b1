#include "omqd/entanglement.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace omqd {

namespace {
constexpr double kClamp = 1e-9;
}

Matrix4d TwoModeCovariance::assembled() const {
    Matrix4d V;
    V.topLeftCorner<2, 2>() = X;
    V.topRightCorner<2, 2>() = Z;
    V.bottomLeftCorner<2, 2>() = Z.transpose();
    V.bottomRightCorner<2, 2>() = Y;
    return V;
}

TwoModeCovariance extract_two_mode(const CovarianceState& state, Mode mode_a, Mode mode_b) {
    if (mode_a == mode_b) throw std::invalid_argument("identical modes");
    const int ia = 2 * static_cast<int>(mode_a);
    const int ib = 2 * static_cast<int>(mode_b);
    TwoModeCovariance tm;
    tm.X = state.V.block<2, 2>(ia, ia);
    tm.Y = state.V.block<2, 2>(ib, ib);
    tm.Z = state.V.block<2, 2>(ia, ib);
    return tm;
}

double nu_minus(const TwoModeCovariance& tm) {
    const double det_x = tm.X.determinant();
    const double det_y = tm.Y.determinant();
    if (det_x < -kClamp || det_y < -kClamp) {
        std::ostringstream os;
        os << "unphysical block: negative single-mode determinant (det X = " << det_x
           << ", det Y = " << det_y << ")";
        throw UnphysicalBlockError(os.str());
    }
    const double sigma = det_x + det_y - 2.0 * tm.Z.determinant();
    const double det_v = tm.assembled().partialPivLu().determinant();
    double disc = sigma * sigma - 4.0 * det_v;
    if (disc < -kClamp) {
        std::ostringstream os;
        os << "unphysical block: complex symplectic eigenvalue (discriminant " << disc << ")";
        throw UnphysicalBlockError(os.str());
    }
    disc = std::max(disc, 0.0);
    double inner = (sigma - std::sqrt(disc)) / 2.0;
    if (inner < -kClamp) {
        std::ostringstream os;
        os << "unphysical block: negative squared symplectic eigenvalue (" << inner << ")";
        throw UnphysicalBlockError(os.str());
    }
    return std::sqrt(std::max(inner, 0.0));
}

double log_negativity(const TwoModeCovariance& tm) {
    const double nu = nu_minus(tm);
    if (nu == 0.0) throw UnphysicalBlockError("unphysical block: zero symplectic eigenvalue");
    return std::max(0.0, -std::log(2.0 * nu));
}

std::array<double, 2> symplectic_oracle(const TwoModeCovariance& tm) {
    // partial transpose of mode B = momentum sign flip
    Matrix4d P = Matrix4d::Identity();
    P(3, 3) = -1.0;
    const Matrix4d Vt = P * tm.assembled() * P;

    Matrix4d omega = Matrix4d::Zero();
    omega(0, 1) = 1.0;
    omega(1, 0) = -1.0;
    omega(2, 3) = 1.0;
    omega(3, 2) = -1.0;

    const Eigen::Matrix4cd M = std::complex<double>(0.0, 1.0) * (omega * Vt).cast<complexd>();
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> solver(M, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("non-convergent eigensolve in symplectic_oracle");

    std::array<double, 4> mags{};
    for (int i = 0; i < 4; ++i) mags[static_cast<std::size_t>(i)] = std::abs(solver.eigenvalues()(i));
    std::sort(mags.begin(), mags.end());
    // eigenvalues come in +-nu pairs; take one representative of each
    return {(mags[0] + mags[1]) / 2.0, (mags[2] + mags[3]) / 2.0};
}

std::vector<EntanglementReport> entanglement_timeseries(std::span<const CovarianceState> cov_seq) {
    if (cov_seq.empty()) throw std::invalid_argument("entanglement_timeseries: empty sequence");
    std::vector<EntanglementReport> out;
    out.reserve(cov_seq.size());
    for (const CovarianceState& s : cov_seq) {
        EntanglementReport r;
        r.t = s.t;
        try {
            r.E_md = log_negativity(extract_two_mode(s, Mode::mirror, Mode::qd));
            r.E_cd = log_negativity(extract_two_mode(s, Mode::cavity, Mode::qd));
            r.E_cm = log_negativity(extract_two_mode(s, Mode::cavity, Mode::mirror));
        } catch (const UnphysicalBlockError& e) {
            std::ostringstream os;
            os << e.what() << " at t = " << s.t;
            throw UnphysicalBlockError(os.str());
        }
        r.energies = fluctuation_energies(s);
        r.phonons = phonon_number(s);
        out.push_back(r);
    }
    return out;
}

}  // namespace omqd
