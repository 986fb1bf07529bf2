#pragma once

#include "bch/grid.hpp"

namespace bch {

/// Physical constants of the Burgers-Cahn-Hilliard system with the quartic
/// double well F(phi) = alpha/4 (phi^2 - beta/alpha)^2.
struct Params {
    double alpha = 1.0;
    double beta = 1.0;
    double kappa = 0.001;
    double nu = 0.006;
    double coupling = 1.0;   // K
    double half_length = 1.0; // L
    double mobility = 1.0;   // only M == 1 is supported

    /// Throws std::invalid_argument when a constant is out of range or the
    /// mobility is not identically one.
    void validate() const;

    double binodal() const noexcept;

    double F(double phi) const noexcept;
    double dF(double phi) const noexcept;
    double d2F(double phi) const noexcept;
    double d3F(double phi) const noexcept;

    /// Energy of the homogeneous state phi = 0 on [-L, L]: 2 L F(0).
    double max_energy() const noexcept;
};

/// Values of a stationary wave and its first three x-derivatives at one point.
struct WaveJet {
    double value;
    double d1;
    double d2;
    double d3;
};

/// Stationary periodic solution phi(x; a) = a sn(h x, k) of
/// -kappa phi'' + F'(phi) = 0, shifted so phi(0) = 0 (odd about the origin).
class WaveProfile {
public:
    WaveProfile(double amplitude, const Params& params);

    /// Wave with the given period p > p_min. Solved for the moduli rather than
    /// the amplitude, so periods far beyond 2L stay representable when the
    /// amplitude is within rounding of the binodal value.
    static WaveProfile from_period(double period, const Params& params);

    double amplitude() const noexcept { return amplitude_; }
    double period() const noexcept { return period_; }
    double modulus() const noexcept { return modulus_; }
    double complementary_modulus() const noexcept { return complementary_; }
    double scale() const noexcept { return scale_; }
    const Params& params() const noexcept { return params_; }

    double value(double x) const;
    double slope(double x) const;
    WaveJet jet(double x) const;
    Field sample(const Grid& grid) const;

private:
    WaveProfile(const Params& params, double k, double kp);

    Params params_;
    double amplitude_;
    double modulus_;
    double complementary_;
    double scale_;
    double period_;
};

/// k^2 for amplitude a; equals a^2/(2 - a^2) when alpha = beta = 1.
double wave_modulus_squared(double amplitude, const Params& params);
/// h(a) = (1/a) sqrt(-2 (F(a) - F(0)) / kappa).
double wave_scale(double amplitude, const Params& params);

/// Closed-form period 4 K(k) / h(a).
double period_of_amplitude(double amplitude, const Params& params);

/// Period from adaptive quadrature of 4 int_0^a dy / sqrt(2/kappa (F(y) - F(a)))
/// after y = a sin(theta). Independent of the elliptic-integral route.
double period_by_quadrature(double amplitude, const Params& params);

/// Inverse of period_of_amplitude by bisection; requires p > p_min.
double amplitude_of_period(double period, const Params& params);

/// dp/da from the integral representation (adaptive quadrature).
double period_derivative(double amplitude, const Params& params);

/// Closed-form lower bound on dp/da used in the plateau estimate.
double period_derivative_lower_bound(double amplitude, const Params& params);

struct SpinodalData {
    double p_min;      // 2 pi sqrt(kappa / beta)
    double p_s;        // 2 pi sqrt(2 kappa / beta)
    double a_s;        // p(a_s) = p_s; independent of kappa
    double lambda_top; // beta^2 / (4 kappa)
};

SpinodalData spinodal(const Params& params);

double minimum_period(const Params& params);

struct KinkData {
    double energy;          // E_min on [-L, L]
    double energy_infinite; // limit L -> infinity
    double width;           // sqrt(2 kappa / beta)
};

KinkData kink(const Params& params);
/// K(x) = sqrt(beta/alpha) tanh(sqrt(beta/(2 kappa)) x).
double kink_profile(double x, const Params& params);
double kink_slope(double x, const Params& params);

} // namespace bch
