#include "bch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace bch {

std::size_t EnsembleReport::trials_completed() const
{
    return static_cast<std::size_t>(
        std::count_if(trials.begin(), trials.end(), [](const TrialRecord& r) { return r.ok; }));
}

EnsembleReport run_ensemble(const RunConfig& config, int trials, int workers,
                            const EnergyPeriodTable* table)
{
    if (trials < 1)
        throw std::invalid_argument("an ensemble needs at least one trial");
    config.validate();
    std::optional<EnergyPeriodTable> own;
    if (table == nullptr) {
        own = EnergyPeriodTable::build(config.params);
        table = &*own;
    }
    const auto count = static_cast<std::size_t>(trials);
    std::size_t width = workers > 0 ? static_cast<std::size_t>(workers)
                                    : std::max(1u, std::thread::hardware_concurrency());
    width = std::min(width, count);

    EnsembleReport report;
    report.base_seed = config.seed;
    report.trials_requested = count;
    report.trials.resize(count);
    std::vector<std::vector<SeriesRow>> series(count);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < count; i = next++) {
            RunConfig trial = config;
            trial.seed = config.seed + i;
            if (!config.out_dir.empty())
                trial.out_dir = (std::filesystem::path(config.out_dir) /
                                 ("trial_" + std::to_string(i)))
                                    .string();
            TrialRecord& rec = report.trials[i];
            rec.seed = trial.seed;
            try {
                series[i] = run(trial, table).series;
                rec.ok = true;
                if (!trial.out_dir.empty())
                    rec.series_file =
                        (std::filesystem::path(trial.out_dir) / "series.csv").string();
            } catch (const std::exception& e) {
                rec.ok = false;
                rec.error = e.what();
            }
        }
    };
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < width; ++w)
        pool.emplace_back(worker);
    worker();
    pool.clear(); // join

    std::size_t used = 0;
    for (std::size_t i = 0; i < count; ++i) {
        if (!report.trials[i].ok)
            continue;
        const auto& rows = series[i];
        if (used == 0) {
            for (const SeriesRow& r : rows)
                report.t.push_back(r.t);
            report.mean_energy.assign(rows.size(), 0.0);
            report.mean_period.assign(rows.size(), 0.0);
        }
        for (std::size_t k = 0; k < rows.size(); ++k) {
            report.mean_energy[k] += rows[k].free_energy;
            report.mean_period[k] += rows[k].period;
        }
        ++used;
    }
    for (std::size_t k = 0; k < report.t.size(); ++k) {
        report.mean_energy[k] /= static_cast<double>(used);
        report.mean_period[k] /= static_cast<double>(used);
    }
    return report;
}

PredictionOverlay overlay_predictions(const std::vector<double>& t,
                                      const std::vector<double>& energy, const Params& params,
                                      const EnergyPeriodTable& table, const EigTable& eig_table,
                                      PredictorVariant variant)
{
    if (variant == PredictorVariant::langer)
        throw std::invalid_argument("the overlay variant must be an eigenvalue predictor");
    PredictionOverlay out{spinodal_handshake(t, energy, params), {}, {}, {}, variant};
    if (!out.handshake.reached)
        return out;
    for (double s : t)
        if (s >= out.handshake.t0)
            out.t.push_back(s);
    PredictorConfig cfg;
    cfg.p0 = out.handshake.p0;
    cfg.t0 = out.handshake.t0;
    cfg.variant = PredictorVariant::langer;
    out.langer = predicted_energy_curve(out.t, cfg, table);
    cfg.variant = variant;
    cfg.eig_table = &eig_table;
    out.eigenvalue = predicted_energy_curve(out.t, cfg, table);
    return out;
}

std::vector<Crossing> first_crossings(const std::vector<SeriesRow>& series,
                                      const std::vector<double>& thresholds)
{
    if (series.empty())
        throw std::invalid_argument("cannot find crossings in an empty series");
    std::vector<Crossing> out;
    for (double level : thresholds) {
        Crossing c{level, series.back().t, true};
        for (const SeriesRow& r : series)
            if (r.period >= level) {
                c = {level, r.t, false};
                break;
            }
        out.push_back(c);
    }
    return out;
}

namespace {

void require_matching(const RunConfig& a, const RunConfig& b)
{
    if (a.grid_size() != b.grid_size() || a.params.half_length != b.params.half_length ||
        a.seed != b.seed || a.params.alpha != b.params.alpha || a.params.beta != b.params.beta ||
        a.params.kappa != b.params.kappa)
        throw std::invalid_argument(
            "compared runs must share n, L, alpha, beta, kappa and seed");
}

template <class Fn>
void try_fit(Fn&& fn, std::optional<FitResult>& fit, std::string& error)
{
    try {
        fit = fn();
    } catch (const std::exception& e) {
        error = e.what();
    }
}

std::vector<double> column(const std::vector<SeriesRow>& rows, double SeriesRow::*member)
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (const SeriesRow& r : rows)
        out.push_back(r.*member);
    return out;
}

} // namespace

CompareReport compare_coupled(const RunConfig& first, const RunConfig& second,
                              const std::vector<double>& thresholds,
                              const EnergyPeriodTable* table)
{
    require_matching(first, second);
    std::optional<EnergyPeriodTable> own;
    if (table == nullptr) {
        own = EnergyPeriodTable::build(first.params);
        table = &*own;
    }
    const State start = initial_state(first);
    // Same phase field for both; each keeps its own velocity and coupling.
    Field v(start.phi.grid);
    if (second.coupling != Coupling::uncoupled)
        v = initial_state(second).v;
    State matched(start.phi, std::move(v), second.params, second.coupling, second.stabilizer());

    RunResult a = run(first, start, table);
    RunResult b = run(second, matched, table);
    CompareReport report{{}, std::nullopt, std::nullopt, {}, {}, std::move(a), std::move(b)};

    const auto ca = first_crossings(report.coupled.series, thresholds);
    const auto cb = first_crossings(report.uncoupled.series, thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        double speedup = std::numeric_limits<double>::quiet_NaN();
        if (!ca[i].censored && ca[i].time > 0.0)
            speedup = cb[i].time / ca[i].time;
        else if (!ca[i].censored && !cb[i].censored)
            speedup = 1.0; // both reached at t = 0
        report.rows.push_back({thresholds[i], ca[i], cb[i], speedup});
    }

    auto fit = [&](const RunConfig& cfg, const RunResult& r) {
        return [&cfg, &r] {
            const auto t = column(r.series, &SeriesRow::t);
            const auto p = column(r.series, &SeriesRow::period);
            return fit_pfit(t, p, cfg.params, std::min(20.0, cfg.t_final));
        };
    };
    try_fit(fit(first, report.coupled), report.coupled_fit, report.coupled_fit_error);
    try_fit(fit(second, report.uncoupled), report.uncoupled_fit, report.uncoupled_fit_error);
    return report;
}

std::vector<double> energy_drops(const std::vector<double>& energy, double min_drop)
{
    // An interval is part of a drop when it loses more than 5% of min_drop.
    const double active = 0.05 * min_drop;
    std::vector<double> drops;
    double current = 0.0;
    for (std::size_t i = 1; i < energy.size(); ++i) {
        const double d = energy[i - 1] - energy[i];
        if (d > active) {
            current += d;
            continue;
        }
        if (current >= min_drop)
            drops.push_back(current);
        current = 0.0;
    }
    if (current >= min_drop)
        drops.push_back(current);
    return drops;
}

} // namespace bch
