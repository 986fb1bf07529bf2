#pragma once

#include "bch/waves.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <vector>

namespace bch {

/// Period map of the linearized eigenvalue problem
///   -kappa w'''' + (b w)'' = lambda w,  b = F''(phi(x; a)),
/// written as a first-order system for (w, l w', l^2 w'', l^3 w''') with
/// l = sqrt(kappa). The diagonal rescaling is a similarity transform, so
/// determinant and Floquet multipliers are those of the unscaled system.
///
/// The period map is accumulated as a product of RK4 step propagators P_s.
/// Alongside M = P_N ... P_1 we keep M^{-1}, the second compound of M and
/// det M = prod det P_s. Each is a product of well-conditioned factors, so
/// the coefficients of det(M - z I) keep full relative accuracy even when M
/// has multipliers of very different size; expanding det(M - z I) from the
/// entries of M would not.
struct Monodromy {
    Eigen::Matrix4d matrix;
    Eigen::Matrix4d inverse;
    Eigen::Matrix<double, 6, 6> compound2;
    double determinant;
    double period;
    double lambda;

    /// Coefficients of det(M - z I) = z^4 - c1 z^3 + c2 z^2 - c3 z + c4.
    std::array<double, 4> characteristic() const;
};

/// Default RK4 step count per period.
inline constexpr int kDefaultRkSteps = 1024;

Monodromy monodromy(double lambda, const WaveProfile& wave, int rk_steps = kDefaultRkSteps);
Monodromy monodromy(double lambda, double amplitude, const Params& params,
                    int rk_steps = kDefaultRkSteps);

/// D(lambda, xi) = det(M(lambda) - exp(i xi p) I), evaluated through the
/// characteristic polynomial.
std::complex<double> evans(const Monodromy& m, double xi);
std::complex<double> evans(double lambda, double xi, double amplitude, const Params& params);

/// R(theta) = Re(exp(-2 i theta) D) with theta = xi p. For real lambda the
/// multipliers pair as z, 1/z, which makes exp(-2 i theta) D real; lambda
/// belongs to the spectrum iff R changes sign on [0, pi].
double tracking_function(const Monodromy& m, double theta);

struct SpectrumTest {
    bool in_spectrum;
    double theta_min; // minimizer of R over the theta grid (refined)
    double r_min;
    double r_max;
};

/// Sign test of R on a 128-point theta grid with Brent refinement around the
/// extrema.
SpectrumTest spectrum_test(const Monodromy& m);

struct LeadingEigenvalue {
    double lambda;
    double xi;      // Bloch wavenumber where the top of the band is attained
    int iterations; // spectrum tests spent
};

/// Largest real lambda >= 0 in the spectrum of the linearization about the
/// wave of amplitude a. `hint` is an estimate from above or nearby (previous
/// amplitude in a continuation, or beta^2/(4 kappa) near a = 0). Throws
/// NumericalError if no bracket is found.
LeadingEigenvalue leading_eigenvalue(double amplitude, const Params& params, double hint,
                                     int rk_steps = kDefaultRkSteps);

/// Leading eigenvalues on an amplitude grid, with the kappa they were
/// computed at.
struct EigTable {
    Params params; // params.kappa is the reference kappa
    std::vector<double> amplitudes;
    std::vector<double> periods;
    std::vector<double> lambda_max;
    std::vector<double> xi_max;

    double kappa_ref() const noexcept { return params.kappa; }
};

/// Continuation over a = step, 2 step, ... below the binodal value. A coarse
/// sequential pass seeds brackets for a parallel fine pass.
EigTable build_eig_table(const Params& params, double step = 0.01,
                         int rk_steps = kDefaultRkSteps);

/// lambda'(a) = (kappa_ref / kappa_new) lambda(a); periods recomputed at
/// kappa_new.
EigTable rescale_table(const EigTable& table, double kappa_new);

} // namespace bch
