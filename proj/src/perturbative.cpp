#include "omqd/perturbative.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace omqd {

namespace {
constexpr complexd kI{0.0, 1.0};
constexpr double kResonanceFloor = 1e-12;
}  // namespace

FourierExpansion::FourierExpansion(int n_max, int j_max, double Omega, RecursionVariant variant)
    : n_max_(n_max), j_max_(j_max), Omega_(Omega), variant_(variant),
      table_(4 * (2 * n_max + 1) * (j_max + 1), complexd{0.0, 0.0}) {
    if (n_max < 1 || j_max < 0) throw std::invalid_argument("FourierExpansion: bad truncation");
}

std::size_t FourierExpansion::index(Var v, int n, int j) const {
    if (n < -n_max_ || n > n_max_ || j < 0 || j > j_max_)
        throw std::out_of_range("FourierExpansion: index outside truncation");
    const auto vi = static_cast<std::size_t>(v);
    const auto ni = static_cast<std::size_t>(n + n_max_);
    const auto ji = static_cast<std::size_t>(j);
    return (vi * (2 * static_cast<std::size_t>(n_max_) + 1) + ni) *
               (static_cast<std::size_t>(j_max_) + 1) +
           ji;
}

complexd FourierExpansion::coeff(Var v, int n, int j) const { return table_[index(v, n, j)]; }

void FourierExpansion::set_coeff(Var v, int n, int j, complexd value) {
    table_[index(v, n, j)] = value;
}

std::vector<FourierExpansion::Entry> FourierExpansion::entries() const {
    std::vector<Entry> out;
    out.reserve(table_.size());
    for (Var v : {Var::q, Var::p, Var::a, Var::sigma})
        for (int n = -n_max_; n <= n_max_; ++n)
            for (int j = 0; j <= j_max_; ++j) out.push_back({v, n, j, coeff(v, n, j)});
    return out;
}

std::map<int, double> fourier_drive_coeffs(const SystemParams& p) {
    std::map<int, double> out;
    out[0] = p.E0;
    if (p.eps != 0.0) {
        out[1] = p.eps / 2.0;
        out[-1] = p.eps / 2.0;
    }
    return out;
}

std::map<int, double> fourier_detuning_coeffs(const SystemParams& p) {
    std::map<int, double> out;
    if (p.delta_0 != 0.0) {
        out[0] = p.delta_0 / 2.0;
        out[1] = -p.delta_0 / 4.0;
        out[-1] = -p.delta_0 / 4.0;
    }
    return out;
}

ResonantDenominatorError::ResonantDenominatorError(const std::string& what, int n)
    : std::runtime_error(what), harmonic_(n) {}

namespace {

[[noreturn]] void throw_resonant(const char* which, int n) {
    std::ostringstream os;
    os << "resonant denominator in " << which << " at harmonic n = " << n;
    throw ResonantDenominatorError(os.str(), n);
}

double drive_coeff(const SystemParams& p, int n) {
    if (n == 0) return p.E0;
    if (n == 1 || n == -1) return p.eps / 2.0;
    return 0.0;
}

// Exciton response bracket for the closed-form variants.
complexd chi_qd(const SystemParams& p, int n, int j, RecursionVariant variant) {
    const complexd inw = kI * static_cast<double>(n) * p.Omega;
    switch (variant) {
        case RecursionVariant::literal:
            return j == 0 ? inw + p.kappa_d
                          : kI * (static_cast<double>(n) * p.Omega - p.delta_0) + p.kappa_d;
        case RecursionVariant::consistent:
            return inw + p.kappa_d - kI * (p.delta_0 / 2.0) * p.N;
        case RecursionVariant::harmonic:
            break;
    }
    throw std::logic_error("chi_qd: harmonic variant has no closed-form bracket");
}

// Solves the cavity/exciton harmonics of one coupling order as a single
// linear system, with the detuning entering through its own Fourier
// coefficients (convolution over n).  source[n+n_max] is the cavity-equation
// right-hand side for harmonic n.
void solve_order_harmonic(FourierExpansion& ex, const SystemParams& p, int j,
                          const std::vector<complexd>& source) {
    const int M = ex.n_max();
    const int NH = 2 * M + 1;
    Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2 * NH, 2 * NH);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(2 * NH);
    const double d0 = p.delta_0 / 2.0;   // detuning n=0 coefficient
    const double d1 = -p.delta_0 / 4.0;  // detuning n=+-1 coefficient
    for (int n = -M; n <= M; ++n) {
        const int r = n + M;
        A(r, r) = p.kappa_a + kI * (p.delta_c + n * p.Omega);
        A(r, NH + r) = kI * p.g0;
        b(r) = source[static_cast<std::size_t>(r)];
        const int rs = NH + r;
        A(rs, r) = -kI * p.g0 * p.N;
        A(rs, NH + r) = kI * static_cast<double>(n) * p.Omega + p.kappa_d - kI * p.N * d0;
        if (n - 1 >= -M) A(rs, NH + (n - 1 + M)) -= kI * p.N * d1;
        if (n + 1 <= M) A(rs, NH + (n + 1 + M)) -= kI * p.N * d1;
    }
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(A);
    const Eigen::VectorXcd x = lu.solve(b);
    if (!x.allFinite() || (A * x - b).norm() > 1e-8 * (b.norm() + 1.0))
        throw_resonant("harmonic-order system (order index reported)", j);
    for (int n = -M; n <= M; ++n) {
        ex.set_coeff(Var::a, n, j, x(n + M));
        ex.set_coeff(Var::sigma, n, j, x(NH + n + M));
    }
}

void fill_order_closed_form(FourierExpansion& ex, const SystemParams& p, int j,
                            const std::vector<complexd>& source) {
    const int M = ex.n_max();
    for (int n = -M; n <= M; ++n) {
        const complexd cav = p.kappa_a + kI * (p.delta_c + n * p.Omega);
        const complexd chi = chi_qd(p, n, j, ex.variant());
        const complexd den = cav * chi - p.g0 * p.g0 * p.N;
        if (std::abs(den) < kResonanceFloor) throw_resonant("cavity/exciton response", n);
        const complexd src = source[static_cast<std::size_t>(n + M)];
        if (j == 0) {
            ex.set_coeff(Var::a, n, 0, src * chi / den);
            ex.set_coeff(Var::sigma, n, 0, src * (kI * p.g0 * p.N) / den);
        } else if (ex.variant() == RecursionVariant::literal) {
            // numerator brackets as printed: the cavity factor appears in
            // both, and the a-numerator carries kappa_a in the chi slot
            const complexd chi_num =
                kI * (static_cast<double>(n) * p.Omega - p.delta_0) + p.kappa_a;
            ex.set_coeff(Var::a, n, j, kI * src * cav * chi_num / den);
            ex.set_coeff(Var::sigma, n, j, -p.g0 * p.N * src * cav / den);
        } else {
            ex.set_coeff(Var::a, n, j, kI * src * chi / den);
            ex.set_coeff(Var::sigma, n, j, -p.g0 * p.N * src / den);
        }
    }
}

}  // namespace

FourierExpansion zeroth_order_coeffs(const SystemParams& params, int n_max, int j_max,
                                     RecursionVariant variant) {
    FourierExpansion ex(n_max, j_max, params.Omega, variant);
    std::vector<complexd> source(static_cast<std::size_t>(2 * n_max + 1));
    for (int n = -n_max; n <= n_max; ++n)
        source[static_cast<std::size_t>(n + n_max)] = drive_coeff(params, -n);
    if (variant == RecursionVariant::harmonic)
        solve_order_harmonic(ex, params, 0, source);
    else
        fill_order_closed_form(ex, params, 0, source);
    return ex;
}

void higher_order_coeffs(FourierExpansion& ex, const SystemParams& p) {
    const int M = ex.n_max();
    for (int j = 1; j <= ex.j_max(); ++j) {
        // mechanical harmonics from the |a|^2 convolution of lower orders
        for (int n = -M; n <= M; ++n) {
            complexd Sq{0.0, 0.0};
            for (int k = 0; k < j; ++k)
                for (int m = -M; m <= M; ++m)
                    if (std::abs(n + m) <= M)
                        Sq += std::conj(ex.coeff(Var::a, m, k)) * ex.coeff(Var::a, n + m, j - 1 - k);
            const complexd dmech = p.omega_m * p.omega_m -
                                   static_cast<double>(n) * p.Omega * static_cast<double>(n) *
                                       p.Omega +
                                   kI * p.gamma_m * static_cast<double>(n) * p.Omega;
            if (std::abs(dmech) < kResonanceFloor) throw_resonant("mechanical response", n);
            const complexd qnj = p.omega_m * Sq / dmech;
            ex.set_coeff(Var::q, n, j, qnj);
            ex.set_coeff(Var::p, n, j, kI * static_cast<double>(n) * p.Omega * qnj / p.omega_m);
        }
        // cavity/exciton source from the a*q convolution
        std::vector<complexd> source(static_cast<std::size_t>(2 * M + 1));
        for (int n = -M; n <= M; ++n) {
            complexd Sa{0.0, 0.0};
            for (int k = 0; k < j; ++k)
                for (int m = -M; m <= M; ++m)
                    if (std::abs(n - m) <= M)
                        Sa += ex.coeff(Var::a, m, k) * ex.coeff(Var::q, n - m, j - 1 - k);
            source[static_cast<std::size_t>(n + M)] = Sa;
        }
        if (ex.variant() == RecursionVariant::harmonic) {
            for (auto& s : source) s *= kI;
            solve_order_harmonic(ex, p, j, source);
        } else {
            fill_order_closed_form(ex, p, j, source);
        }
    }
}

FourierExpansion build_expansion(const SystemParams& params, int n_max, int j_max,
                                 RecursionVariant variant) {
    FourierExpansion ex = zeroth_order_coeffs(params, n_max, j_max, variant);
    higher_order_coeffs(ex, params);
    return ex;
}

MeanFieldState reconstruct(const FourierExpansion& ex, double G, double t) {
    complexd q{0.0, 0.0}, p{0.0, 0.0}, a{0.0, 0.0}, sigma{0.0, 0.0};
    double Gj = 1.0;
    for (int j = 0; j <= ex.j_max(); ++j) {
        for (int n = -ex.n_max(); n <= ex.n_max(); ++n) {
            const complexd phase = std::exp(kI * static_cast<double>(n) * ex.Omega() * t) * Gj;
            q += ex.coeff(Var::q, n, j) * phase;
            p += ex.coeff(Var::p, n, j) * phase;
            a += ex.coeff(Var::a, n, j) * phase;
            sigma += ex.coeff(Var::sigma, n, j) * phase;
        }
        Gj *= G;
    }
    if (std::abs(q.imag()) > 1e-8 || std::abs(p.imag()) > 1e-8)
        throw std::runtime_error("non-real mechanical reconstruction");
    return {q.real(), p.real(), a, sigma};
}

}  // namespace omqd
