#include "bch/predictors.hpp"

#include "bch/errors.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

namespace bch {

namespace {

constexpr int kMaxSimplexIterations = 20000;
constexpr double kSimplexSize = 1e-12;

double interface_width(const Params& params)
{
    return std::sqrt(2.0 * params.kappa / params.beta);
}

void check_grid(const std::vector<double>& t_grid, double t0)
{
    if (t_grid.empty())
        throw std::invalid_argument("empty time grid");
    if (t_grid.front() < t0)
        throw std::domain_error("time grid starts before t0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("time grid must be strictly increasing");
}

double rate_factor(PredictorVariant v)
{
    return v == PredictorVariant::eig_half ? 0.5 : 1.0;
}

struct FitData {
    const std::vector<double>* t;
    const std::vector<double>* period;
    std::size_t first;
    std::size_t last; // inclusive
    double p0;
    const Params* params;
};

double fit_objective(double c1, double c2, const FitData& d)
{
    auto integrand = [&](std::size_t i) {
        const double ti = (*d.t)[i];
        const double r = pfit_period(ti, c1, c2, d.p0, *d.params) - (*d.period)[i];
        return r * r / std::log1p(ti);
    };
    double total = 0.0;
    double prev = integrand(d.first);
    for (std::size_t i = d.first + 1; i <= d.last; ++i) {
        const double cur = integrand(i);
        total += 0.5 * ((*d.t)[i] - (*d.t)[i - 1]) * (prev + cur);
        prev = cur;
    }
    return total;
}

double simplex_objective(const gsl_vector* x, void* data)
{
    const auto* d = static_cast<const FitData*>(data);
    const double v = fit_objective(std::exp(gsl_vector_get(x, 0)), std::exp(gsl_vector_get(x, 1)), *d);
    return std::isfinite(v) ? v : std::numeric_limits<double>::max();
}

struct SimplexResult {
    double log_c1;
    double log_c2;
    double value;
};

SimplexResult run_simplex(FitData& data, double c1, double c2)
{
    gsl_multimin_function fn{&simplex_objective, 2, &data};
    const std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(2),
                                                                      &gsl_vector_free);
    const std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(2),
                                                                         &gsl_vector_free);
    gsl_vector_set(x.get(), 0, std::log(c1));
    gsl_vector_set(x.get(), 1, std::log(c2));
    gsl_vector_set_all(step.get(), 0.5);
    const std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> s(
        gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 2),
        &gsl_multimin_fminimizer_free);
    gsl_multimin_fminimizer_set(s.get(), &fn, x.get(), step.get());
    for (int it = 0; it < kMaxSimplexIterations; ++it) {
        if (gsl_multimin_fminimizer_iterate(s.get()) != GSL_SUCCESS)
            break;
        if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s.get()), kSimplexSize) ==
            GSL_SUCCESS)
            break;
    }
    return {gsl_vector_get(s->x, 0), gsl_vector_get(s->x, 1), s->fval};
}

} // namespace

double langer_period(double t, const PredictorConfig& cfg, const Params& params)
{
    if (t < cfg.t0)
        throw std::domain_error("Langer period requested before t0");
    const double w = interface_width(params);
    const double rate = 16.0 * params.beta * params.beta / params.kappa * std::exp(-cfg.p0 / w);
    return cfg.p0 + w * std::log1p(rate * (t - cfg.t0));
}

EigenvalueOfPeriod::EigenvalueOfPeriod(const EigTable& table)
{
    if (table.amplitudes.size() < 3)
        throw std::invalid_argument("eigenvalue table needs at least three rows");
    std::vector<double> ps{minimum_period(table.params)};
    std::vector<double> ls{table.params.beta * table.params.beta / (4.0 * table.params.kappa)};
    for (std::size_t i = 0; i < table.amplitudes.size(); ++i) {
        if (!(table.periods[i] > ps.back()))
            throw std::invalid_argument("eigenvalue table periods must increase");
        ps.push_back(table.periods[i]);
        ls.push_back(std::max(table.lambda_max[i], 0.0));
    }
    periods_ = ps;
    last_lambda_ = ls.back();
    curve_.emplace(std::move(ps), std::move(ls));
}

double EigenvalueOfPeriod::operator()(double period) const
{
    if (period >= periods_.back())
        return last_lambda_;
    return std::max((*curve_)(std::max(period, periods_.front())), 0.0);
}

std::size_t EigenvalueOfPeriod::cell(double period) const
{
    const auto it = std::upper_bound(periods_.begin(), periods_.end(), period);
    if (it == periods_.begin())
        return 0;
    return std::min(static_cast<std::size_t>(it - periods_.begin()) - 1, periods_.size() - 2);
}

double EigenvalueOfPeriod::cell_start(double period) const
{
    return periods_[cell(period)];
}

double EigenvalueOfPeriod::cell_width(double period) const
{
    const std::size_t i = cell(period);
    return periods_[i + 1] - periods_[i];
}

TimeSeries eigenvalue_ode_period(const std::vector<double>& t_grid, const PredictorConfig& cfg,
                                 const Params& params)
{
    if (cfg.variant == PredictorVariant::langer)
        throw std::invalid_argument("eigenvalue ODE requested for the Langer variant");
    if (cfg.eig_table == nullptr)
        throw std::invalid_argument("eigenvalue predictor needs an eigenvalue table");
    if (std::abs(cfg.eig_table->kappa_ref() - params.kappa) > 1e-12 * params.kappa)
        throw std::invalid_argument("eigenvalue table was computed at a different kappa");
    if (cfg.steps_per_cell < 1)
        throw std::invalid_argument("steps_per_cell must be positive");
    if (!(cfg.p0 >= minimum_period(params) * (1.0 - 1e-12)))
        throw std::domain_error("initial period below the minimum period");
    check_grid(t_grid, cfg.t0);

    const EigenvalueOfPeriod lambda(*cfg.eig_table);
    const double f = rate_factor(cfg.variant);
    auto rhs = [&](double p) { return f * lambda(p) * p; };
    const auto steps = static_cast<double>(cfg.steps_per_cell);

    // March in p with nodes that land on every table period, so that each
    // step sees a single cubic piece of lambda(p); the elapsed time
    // dt/dp = 1 / rhs(p) is integrated by RK4 (Simpson's rule for a
    // quadrature). Output times between nodes take one RK4 step in t from the
    // last node, which stays inside the node interval.
    auto next_period = [&](double p) {
        if (p >= lambda.p_last())
            return p * (1.0 + 1.0 / steps);
        const double width = lambda.cell_width(p);
        const double lo = lambda.cell_start(p);
        const double h = width / steps;
        double next = lo + (std::floor((p - lo) / h) + 1.0) * h;
        if (next - p < 1e-6 * h)
            next += h;
        return std::min(next, lo + width);
    };
    auto elapsed = [&](double p, double q) {
        const double r0 = rhs(p);
        const double r1 = rhs(0.5 * (p + q));
        const double r2 = rhs(q);
        if (!(r0 > 0.0 && r1 > 0.0 && r2 > 0.0))
            return std::numeric_limits<double>::infinity();
        return (q - p) / 6.0 * (1.0 / r0 + 4.0 / r1 + 1.0 / r2);
    };

    TimeSeries out;
    out.t = t_grid;
    out.period.reserve(t_grid.size());
    double t = cfg.t0;
    double p = cfg.p0;
    double q = next_period(p);
    double dt = elapsed(p, q);
    for (double target : t_grid) {
        while (t + dt <= target) {
            t += dt;
            p = q;
            q = next_period(p);
            dt = elapsed(p, q);
            if (!std::isfinite(p) || !std::isfinite(q))
                throw NumericalError("eigenvalue ODE produced a non-finite period");
        }
        const double h = target - t;
        const double k1 = rhs(p);
        const double k2 = rhs(p + 0.5 * h * k1);
        const double k3 = rhs(p + 0.5 * h * k2);
        const double k4 = rhs(p + h * k3);
        const double value = std::min(p + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4), q);
        if (value > lambda.p_last())
            out.clamped = true;
        out.period.push_back(value);
    }
    return out;
}

TimeSeries predict_period(const std::vector<double>& t_grid, const PredictorConfig& cfg,
                          const Params& params)
{
    if (cfg.variant != PredictorVariant::langer)
        return eigenvalue_ode_period(t_grid, cfg, params);
    check_grid(t_grid, cfg.t0);
    TimeSeries out;
    out.t = t_grid;
    for (double t : t_grid)
        out.period.push_back(langer_period(t, cfg, params));
    return out;
}

double envelope_energy(double period, const EnergyPeriodTable& table)
{
    const auto& ps = table.periods();
    if (period <= ps.front())
        return table.energies().front();
    const auto it = std::upper_bound(ps.begin(), ps.end(), period);
    const auto j = static_cast<std::size_t>(it - ps.begin()) - 1;
    double e = table.envelope()[j];
    try {
        e = std::min(e, energy_of_period(period, table.params()));
    } catch (const std::domain_error&) {
        // Period too long to construct: the energy has settled at e_min.
    }
    return e;
}

TimeSeries predicted_energy_curve(const std::vector<double>& t_grid, const PredictorConfig& cfg,
                                  const EnergyPeriodTable& table)
{
    TimeSeries out = predict_period(t_grid, cfg, table.params());
    out.energy.reserve(out.period.size());
    double running = std::numeric_limits<double>::infinity();
    for (double p : out.period) {
        // Periods are non-decreasing along the predictor, so the running
        // minimum only removes sub-cell rises of E on its plateaus.
        running = std::min(running, envelope_energy(p, table));
        out.energy.push_back(running);
    }
    return out;
}

double pfit_period(double t, double c1, double c2, double p0, const Params& params)
{
    const double w = interface_width(params);
    return p0 + c1 * w *
                    std::log1p(t / c2 * 16.0 * params.beta * params.beta / params.kappa *
                               std::exp(-p0 / w));
}

FitResult fit_pfit(const std::vector<double>& t, const std::vector<double>& period,
                   const Params& params, double t_max, std::optional<double> p0)
{
    if (t.size() != period.size() || t.empty())
        throw std::invalid_argument("time and period columns differ in length");
    FitData data{&t, &period, 0, 0, p0.value_or(period.front()), &params};
    std::size_t count = 0;
    bool first_set = false;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || t[i] > t_max)
            continue;
        if (!first_set) {
            data.first = i;
            first_set = true;
        }
        data.last = i;
        ++count;
        lo = std::min(lo, period[i]);
        hi = std::max(hi, period[i]);
    }
    if (count < 3)
        throw std::invalid_argument("fit window holds fewer than three samples");
    if (!(hi > lo))
        throw std::invalid_argument("period is constant on the fit window; nothing to fit");

    gsl_error_handler_t* previous = gsl_set_error_handler_off();
    const SimplexResult a = run_simplex(data, 1.0, 1.0);
    const SimplexResult b = run_simplex(data, 5.0, 5.0);
    gsl_set_error_handler(previous);
    const SimplexResult& best = a.value <= b.value ? a : b;
    return {std::exp(best.log_c1), std::exp(best.log_c2), best.value, t_max, data.p0};
}

Handshake spinodal_handshake(const std::vector<double>& t, const std::vector<double>& energy,
                             const Params& params)
{
    if (t.size() != energy.size())
        throw std::invalid_argument("time and energy columns differ in length");
    const double e_s = energy_scale(params).e_spinodal;
    const double p_s = spinodal(params).p_s;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (energy[i] <= e_s)
            return {t[i], p_s, true};
    return {t.empty() ? 0.0 : t.back(), p_s, false};
}

} // namespace bch
