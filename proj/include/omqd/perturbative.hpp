#pragma once

#include <complex>
#include <map>
#include <vector>

#include "omqd/meanfield.hpp"
#include "omqd/params.hpp"

namespace omqd {

/// How the exciton detuning enters the recursive coefficient relations.
///  - harmonic:   each coupling order solves the cavity/exciton harmonics as
///                one linear system with the detuning's own Fourier
///                coefficients (delta_0/2 at n=0, -delta_0/4 at n=+-1);
///                default, best agreement with the integrator.
///  - consistent: static effective detuning delta_0/2 in every order.
///  - literal:    zeroth order without detuning, higher orders with the
///                static full delta_0 and the kappa_a-flavored numerator.
enum class RecursionVariant { harmonic, consistent, literal };

enum class Var { q = 0, p = 1, a = 2, sigma = 3 };

/// Coefficient table O_{n,j} of the double expansion
///   <O(t)> = sum_{j<=j_max} sum_{|n|<=n_max} O_{n,j} e^{i n Omega t} G^j.
/// Coefficients do not depend on G; only the reconstruction weights do.
class FourierExpansion {
public:
    FourierExpansion(int n_max, int j_max, double Omega, RecursionVariant variant);

    int n_max() const { return n_max_; }
    int j_max() const { return j_max_; }
    double Omega() const { return Omega_; }
    RecursionVariant variant() const { return variant_; }

    complexd coeff(Var v, int n, int j) const;
    void set_coeff(Var v, int n, int j, complexd value);

    /// Rows (variable, n, j, value) in deterministic order, for CSV export.
    struct Entry {
        Var var;
        int n;
        int j;
        complexd value;
    };
    std::vector<Entry> entries() const;

private:
    int n_max_, j_max_;
    double Omega_;
    RecursionVariant variant_;
    std::vector<complexd> table_;  // [var][n+n_max][j]
    std::size_t index(Var v, int n, int j) const;
};

/// Fourier coefficients of E(t) = E0 + eps*cos(Omega t):
/// E0 at n=0, eps/2 at n=+-1, zero otherwise.
std::map<int, double> fourier_drive_coeffs(const SystemParams& params);

/// Fourier coefficients of Delta_d(t) = delta_0 (1 - cos(omega_e t))/2:
/// delta_0/2 at n=0, -delta_0/4 at n=+-1, zero otherwise.
std::map<int, double> fourier_detuning_coeffs(const SystemParams& params);

class ResonantDenominatorError : public std::runtime_error {
public:
    ResonantDenominatorError(const std::string& what, int n);
    int harmonic() const { return harmonic_; }

private:
    int harmonic_;
};

/// Fills the j = 0 coefficients (q and p vanish at this order).
FourierExpansion zeroth_order_coeffs(const SystemParams& params, int n_max = 3, int j_max = 4,
                                     RecursionVariant variant = RecursionVariant::harmonic);

/// Fills orders 1..j_max in place; requires j = 0 already present.
/// Convolution sums are truncated symmetrically to |m|, |n-m|, |n+m| <= n_max.
void higher_order_coeffs(FourierExpansion& expansion, const SystemParams& params);

/// zeroth_order_coeffs + higher_order_coeffs.
FourierExpansion build_expansion(const SystemParams& params, int n_max = 3, int j_max = 4,
                                 RecursionVariant variant = RecursionVariant::harmonic);

/// Evaluates the truncated double sum at time t with coupling G.
/// q and p are returned as reals; throws if their imaginary residue
/// exceeds 1e-8.
MeanFieldState reconstruct(const FourierExpansion& expansion, double G, double t);

}  // namespace omqd
