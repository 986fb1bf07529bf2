#pragma once

#include "bch/grid.hpp"
#include "bch/waves.hpp"

#include <vector>

namespace bch {

/// E(phi) = dx * sum [F(phi_i) + kappa/2 (phi_x)_i^2] with a spectral phi_x.
/// Throws NumericalError on non-finite samples.
double free_energy(const Field& phi, const Params& params);

struct EnergyScale {
    double e_max;       // homogeneous state, 2 L F(0)
    double e_min;       // single kink on [-L, L]
    double e_spinodal;  // wave at the spinodal amplitude
};

EnergyScale energy_scale(const Params& params);

/// Energy on [-L, L] of the stationary wave of amplitude a (phi(0) = 0),
/// by composite Gauss-Legendre quadrature. a = 0 gives e_max.
double wave_energy(double amplitude, const Params& params);
double wave_energy(const WaveProfile& wave);

/// Energy of the stationary wave with period p >= p_min.
double energy_of_period(double period, const Params& params);

struct PeriodLookup {
    double period;
    bool clamped; // energy was outside (e_min, e_max]
};

/// Tabulated period -> energy map together with its pseudoinverse
/// p(e) = inf { p >= p_min : E(p) <= e }.
///
/// The period grid runs from p_min to a cap where the energy is within
/// 1e-4 (e_max - e_min) of e_min, and is refined until consecutive energies
/// differ by less than (e_max - e_min) / 200.
class EnergyPeriodTable {
public:
    static EnergyPeriodTable build(const Params& params, std::size_t initial_points = 400);

    const Params& params() const noexcept { return params_; }
    const EnergyScale& scale() const noexcept { return scale_; }
    const std::vector<double>& periods() const noexcept { return periods_; }
    const std::vector<double>& amplitudes() const noexcept { return amplitudes_; }
    const std::vector<double>& energies() const noexcept { return energies_; }
    /// Running minimum of the energies (non-increasing in p).
    const std::vector<double>& envelope() const noexcept { return envelope_; }
    double p_min() const noexcept { return periods_.front(); }
    double p_cap() const noexcept { return periods_.back(); }
    /// Number of tabulated energies above e_max (expected 0).
    std::size_t above_max_count() const noexcept { return above_max_; }
    /// Rounding level of a tabulated energy; differences below it carry no sign.
    double rounding_floor() const noexcept;

    /// Pseudoinverse: first table crossing below e, refined by bisection on
    /// the exact energy map.
    PeriodLookup period_from_energy(double energy) const;

    /// Fast pseudoinverse for time series: linear interpolation of the
    /// monotone envelope, no re-evaluation of the energy map.
    PeriodLookup interpolate_period(double energy) const;

private:
    Params params_;
    EnergyScale scale_{};
    std::vector<double> periods_;
    std::vector<double> amplitudes_;
    std::vector<double> energies_;
    std::vector<double> envelope_;
    std::size_t above_max_ = 0;
};

/// Right-hand side of the plateau estimate: an upper bound on E'(p) wherever
/// E is increasing. Uses delta = sqrt(2 beta / (alpha a^2) - 1) = 1/k, with
/// delta - 1 formed from k' to avoid cancellation near the binodal.
double plateau_slope_bound(const WaveProfile& wave);

/// Kohn-Otto length sup_{|zeta'| <= 1} (1/2L) int phi zeta, evaluated as
/// min_c (1/2L) int |Phi - c| with Phi a periodic antiderivative of phi.
/// Throws std::invalid_argument if phi is not mean-zero.
double kohn_otto_length(const Field& phi);

} // namespace bch
