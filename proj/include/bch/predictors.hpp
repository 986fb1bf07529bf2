#pragma once

#include "bch/energy.hpp"
#include "bch/evans.hpp"

// Boost 1.74's pchip calls unqualified isnan; <math.h> puts it in the global
// namespace before the template is parsed.
#include <math.h>

#include <boost/math/interpolators/pchip.hpp>

#include <optional>
#include <vector>

namespace bch {

enum class PredictorVariant { langer, eig_full, eig_half };

/// Initial condition and method of a coarsening predictor. The eigenvalue
/// variants need a leading-eigenvalue table computed at (or rescaled to) the
/// kappa of the run.
struct PredictorConfig {
    double p0 = 0.0;
    double t0 = 0.0;
    PredictorVariant variant = PredictorVariant::langer;
    const EigTable* eig_table = nullptr;
    /// RK4 steps per table cell in the eigenvalue ODE; doubling it is the
    /// convergence check.
    int steps_per_cell = 32;
};

/// Predicted period (and, once mapped, energy) on a time grid.
struct TimeSeries {
    std::vector<double> t;
    std::vector<double> period;
    std::vector<double> energy; // empty until mapped through the energy table
    bool clamped = false;       // the period left the eigenvalue table
};

/// Langer's law p(t) = p0 + w ln(1 + 16 beta^2 (t - t0) / kappa exp(-p0 / w)),
/// w = sqrt(2 kappa / beta). Throws std::domain_error for t < t0.
double langer_period(double t, const PredictorConfig& cfg, const Params& params);

/// Leading eigenvalue as a function of period: monotone cubic (PCHIP)
/// interpolation of the table through its period column, with the exact
/// a -> 0 limit (p_min, beta^2 / (4 kappa)) prepended. Periods beyond the last
/// row return the last eigenvalue.
class EigenvalueOfPeriod {
public:
    explicit EigenvalueOfPeriod(const EigTable& table);

    double operator()(double period) const;
    double p_first() const noexcept { return periods_.front(); }
    double p_last() const noexcept { return periods_.back(); }
    /// Start and width of the table cell containing the period (the last
    /// cell beyond the table).
    double cell_start(double period) const;
    double cell_width(double period) const;

private:
    std::size_t cell(double period) const;

    std::vector<double> periods_;
    double last_lambda_ = 0.0;
    std::optional<boost::math::interpolators::pchip<std::vector<double>>> curve_;
};

/// dp/dt = f lambda_max(p) p with f = 1 (eig_full) or 1/2 (eig_half), by RK4
/// with steps limited so that each moves p by at most a fraction
/// 1/steps_per_cell of the local table cell (of p itself beyond the table,
/// where the last eigenvalue is held and the result flagged as clamped).
/// Steps end on the table periods, where the interpolant changes pieces. Langer's variant is evaluated
/// in closed form. t_grid must be increasing and start at or after t0.
TimeSeries predict_period(const std::vector<double>& t_grid, const PredictorConfig& cfg,
                          const Params& params);

/// Same as predict_period for the eigenvalue variants; throws
/// std::invalid_argument for the Langer variant.
TimeSeries eigenvalue_ode_period(const std::vector<double>& t_grid, const PredictorConfig& cfg,
                                 const Params& params);

/// Energy on the monotone envelope of the energy-period map,
/// min over p' <= p of E(p').
double envelope_energy(double period, const EnergyPeriodTable& table);

/// Period predictor composed with the energy envelope. Energies are
/// non-increasing along the grid.
TimeSeries predicted_energy_curve(const std::vector<double>& t_grid, const PredictorConfig& cfg,
                                  const EnergyPeriodTable& table);

/// P_fit[c1, c2](t) = p0 + c1 w ln(1 + t / c2 * 16 beta^2 / kappa exp(-p0 / w)).
double pfit_period(double t, double c1, double c2, double p0, const Params& params);

struct FitResult {
    double c1;
    double c2;
    double objective;
    double t_window;
    double p0;
};

/// Minimizes the trapezoid sum of |P_fit - P|^2 / ln(1 + t) over the samples
/// with 0 < t <= t_max by Nelder-Mead in (ln c1, ln c2), started from (1, 1)
/// and from (5, 5); the better result is returned. p0 defaults to the first
/// period sample. Throws std::invalid_argument when the window holds fewer
/// than three samples or the period is constant on it.
FitResult fit_pfit(const std::vector<double>& t, const std::vector<double>& period,
                   const Params& params, double t_max = 20.0,
                   std::optional<double> p0 = std::nullopt);

/// Start of a predictor from a simulated energy trace: the first time the
/// energy reaches the spinodal energy, with the spinodal period.
struct Handshake {
    double t0;
    double p0;
    bool reached; // false: energy never fell to the spinodal value
};

Handshake spinodal_handshake(const std::vector<double>& t, const std::vector<double>& energy,
                             const Params& params);

} // namespace bch
