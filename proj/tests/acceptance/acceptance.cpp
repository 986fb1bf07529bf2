// Acceptance checks 1-11. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. Arguments select a subset: `acceptance 4 7`.

#include "bch/energy.hpp"
#include "bch/evans.hpp"
#include "bch/harness.hpp"
#include "bch/init.hpp"
#include "bch/predictors.hpp"
#include "bch/solver.hpp"
#include "bch/waves.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace bch;
using std::numbers::pi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

Params baseline(double kappa = 0.001)
{
    Params p;
    p.kappa = kappa;
    return p;
}

double seconds_since(std::chrono::steady_clock::time_point start)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> column(const std::vector<SeriesRow>& rows, double SeriesRow::*member)
{
    std::vector<double> out;
    for (const SeriesRow& r : rows)
        out.push_back(r.*member);
    return out;
}

// Expensive runs shared by several criteria, computed on first use.
class Runs {
public:
    Runs() : dir_(std::filesystem::temp_directory_path() / "bch_acceptance") {}
    ~Runs() { std::filesystem::remove_all(dir_); }

    // Five uncoupled trials, N = 2048, kappa = 0.001, T = 100, seeds 0..4.
    const std::vector<std::vector<SeriesRow>>& ensemble_trials()
    {
        if (!trials_)
            build_ensemble();
        return *trials_;
    }
    const EnsembleReport& ensemble()
    {
        if (!ensemble_)
            build_ensemble();
        return *ensemble_;
    }

    // Coupled advective run with the bump velocity at N = 8192, T = 20.
    const RunResult& coupled()
    {
        if (!coupled_) {
            const RunConfig cfg = coupled_config();
            const State start = initial_state(cfg);
            coupled_phi_ = start.phi;
            coupled_ = run(cfg, start, table());
        }
        return *coupled_;
    }

    // Initial phase field of the coupled run.
    const Field& coupled_phi()
    {
        coupled();
        return *coupled_phi_;
    }

    static RunConfig coupled_config()
    {
        RunConfig cfg;
        cfg.coupling = Coupling::advective;
        cfg.init_v = "bump";
        cfg.t_final = 20.0;
        cfg.record_every = 16;
        cfg.seed = 0;
        return cfg;
    }

    const EnergyPeriodTable* table()
    {
        if (!table_)
            table_ = EnergyPeriodTable::build(baseline());
        return &*table_;
    }

private:
    void build_ensemble()
    {
        RunConfig cfg;
        cfg.t_final = 100.0;
        cfg.record_every = 10;
        cfg.seed = 0;
        cfg.out_dir = (dir_ / "ensemble").string();
        ensemble_ = run_ensemble(cfg, 5, 0, table());
        trials_.emplace();
        for (const TrialRecord& t : ensemble_->trials)
            if (t.ok)
                trials_->push_back(read_series(t.series_file));
    }

    std::filesystem::path dir_;
    std::optional<EnergyPeriodTable> table_;
    std::optional<EnsembleReport> ensemble_;
    std::optional<std::vector<std::vector<SeriesRow>>> trials_;
    std::optional<RunResult> coupled_;
    std::optional<Field> coupled_phi_;
};

Outcome criterion1(Runs&)
{
    const auto start = std::chrono::steady_clock::now();
    const Params p = baseline();
    double worst = 0.0;
    for (int i = 1; i <= 50; ++i) {
        const double a = p.binodal() * (0.02 + 0.96 * i / 51.0);
        const double closed = period_of_amplitude(a, p);
        const double quad = period_by_quadrature(a, p);
        worst = std::max(worst, std::abs(closed - quad) / quad);
    }
    const double secs = seconds_since(start);
    return {worst <= 1e-8 && secs < 5.0,
            fmt("max relative gap %.2e over 50 amplitudes (limit 1e-8), %.2f s (limit 5 s)", worst,
                secs)};
}

Outcome criterion2(Runs&)
{
    const auto start = std::chrono::steady_clock::now();
    const Params p = baseline();
    const double lambda = leading_eigenvalue(0.01, p, p.beta * p.beta / (4.0 * p.kappa)).lambda;
    const double secs = seconds_since(start);
    const double rel = std::abs(lambda - 250.0) / 250.0;
    return {rel <= 0.01 && secs < 60.0,
            fmt("lambda_max(a = 0.01) = %.6f, relative gap to 250 is %.2e (limit 1e-2), %.2f s "
                "(limit 60 s)",
                lambda, rel, secs)};
}

Outcome criterion3(Runs&)
{
    const EigTable reference = build_eig_table(baseline(1e-3), 0.05);
    const EigTable scaled = rescale_table(reference, 1e-4);
    const Params q = baseline(1e-4);
    double worst = 0.0;
    int compared = 0;
    for (std::size_t i = 0; i < scaled.amplitudes.size() && compared < 10; i += 2, ++compared) {
        const double direct =
            leading_eigenvalue(scaled.amplitudes[i], q, scaled.lambda_max[i]).lambda;
        worst = std::max(worst, std::abs(direct - scaled.lambda_max[i]) / direct);
    }
    return {compared == 10 && worst <= 1e-3,
            fmt("%d amplitudes, max relative gap %.2e between direct kappa = 1e-4 and rescaled "
                "kappa = 1e-3 (limit 1e-3)",
                compared, worst)};
}

Outcome criterion4(Runs&)
{
    const Params p = baseline();
    double det_gap = 0.0;
    double entry_det_gap = 0.0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            const double a = 0.05 + 0.1 * i;
            const double lambda = 250.0 * j / 9.0;
            const Monodromy m = monodromy(lambda, a, p);
            det_gap = std::max(det_gap, std::abs(m.determinant - 1.0));
            entry_det_gap = std::max(entry_det_gap, std::abs(m.matrix.determinant() - 1.0));
        }
    double translation = 0.0;
    for (int i = 0; i < 10; ++i) {
        const Monodromy m = monodromy(0.0, 0.05 + 0.1 * i, p);
        const auto c = m.characteristic();
        const double scale =
            1.0 + std::abs(c[0]) + std::abs(c[1]) + std::abs(c[2]) + std::abs(c[3]);
        translation = std::max(translation, std::abs(evans(m, 0.0)) / scale);
    }
    return {det_gap <= 1e-8 && translation <= 1e-6,
            fmt("max |det M - 1| = %.2e on a 10x10 (a, lambda) grid (limit 1e-8; from the "
                "entries: %.2e), max |D(0,0)| / scale = %.2e (limit 1e-6)",
                det_gap, entry_det_gap, translation)};
}

// Energy drops that begin after the spinodal time of the trace.
std::vector<double> drops_after_spinodal(const std::vector<SeriesRow>& rows, const Params& p)
{
    const auto t = column(rows, &SeriesRow::t);
    const auto e = column(rows, &SeriesRow::free_energy);
    const Handshake h = spinodal_handshake(t, e, p);
    if (!h.reached)
        return {};
    // Skip the initial collapse: start once the energy stops falling fast.
    const double active = 0.05 * energy_scale(p).e_min;
    std::size_t i = 0;
    while (i < t.size() && t[i] < h.t0)
        ++i;
    while (i + 1 < t.size() && e[i] - e[i + 1] > active)
        ++i;
    return energy_drops(std::vector<double>(e.begin() + static_cast<long>(i), e.end()),
                        energy_scale(p).e_min);
}

Outcome criterion5(Runs& runs)
{
    const Params p = baseline();
    const double expected = 0.0596;
    const auto& trials = runs.ensemble_trials();
    std::vector<double> drops;
    for (std::size_t k = 0; k < 3 && k < trials.size(); ++k)
        for (double d : drops_after_spinodal(trials[k], p))
            drops.push_back(d);
    bool all_close = !drops.empty();
    std::ostringstream list;
    for (double d : drops) {
        all_close = all_close && std::abs(d - expected) <= 0.15 * expected;
        list << (list.tellp() > 0 ? " " : "") << fmt("%.4f", d);
    }
    return {trials.size() >= 3 && all_close,
            fmt("drops after the spinodal stage in 3 trials: [%s]; 2 E_min = %.4f; target %.4f "
                "+- 15%%",
                list.str().c_str(), 2.0 * energy_scale(p).e_min, expected)};
}

Outcome criterion6(Runs&)
{
    RunConfig cfg;
    cfg.coupling = Coupling::advective;
    cfg.init_v = "bump";
    cfg.t_final = 0.05;
    cfg.seed = 0;
    const double dt = 1.0 / 10240.0;
    auto measure = [&](double step, int every) {
        cfg.dt = step;
        cfg.record_every = every;
        const RunResult r = run(cfg);
        double worst = 0.0;
        for (std::size_t i = 1; i < r.series.size(); ++i)
            worst = std::max(worst, std::abs(r.series[i].balance_residual));
        return std::make_pair(worst, r.max_lyapunov_increase);
    };
    const auto [coarse, lyap_coarse] = measure(dt, 64);
    const auto [fine, lyap_fine] = measure(0.5 * dt, 128);
    const double ratio = fine / coarse;
    const double lyap = std::max(lyap_coarse, lyap_fine);
    return {std::abs(ratio - 0.5) <= 0.25 * 0.5 && lyap <= 1e-10,
            fmt("max |residual| %.3e at dt, %.3e at dt/2, ratio %.3f (target 0.5 +- 25%%); "
                "largest per-step Lyapunov increase %.2e (limit 1e-10)",
                coarse, fine, ratio, lyap)};
}

Outcome criterion7(Runs&)
{
    Params p = baseline();
    const double xi = std::sqrt(p.beta / (2.0 * p.kappa));
    const int mode = 7;
    p.half_length = mode * pi / xi; // puts xi_s on the grid
    const Grid g(256, p.half_length);
    State s(sample(g, [&](double x) { return 1e-8 * std::cos(xi * x); }), p, 2.0 * p.beta);
    Stepper stepper(g);
    const double dt = 1e-5;
    std::vector<double> t, y;
    for (int i = 0; i <= 200; ++i) {
        if (i > 0)
            stepper.advance(s, dt);
        t.push_back(s.t);
        y.push_back(std::log(std::abs(to_spectral(s.phi)[mode])));
    }
    const double n = static_cast<double>(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    const double rate = (n * sty - st * sy) / (n * stt - st * st);
    const double expected = p.beta * p.beta / (4.0 * p.kappa);
    const double rel = std::abs(rate - expected) / expected;
    return {rel <= 0.05, fmt("growth rate %.3f over t in [0, 0.002] with dt = 1e-5, expected %.1f, "
                             "relative gap %.2e (limit 5e-2)",
                             rate, expected, rel)};
}

Outcome criterion8(Runs& runs)
{
    const auto start = std::chrono::steady_clock::now();
    const double level = 1.12;
    const RunResult& coupled = runs.coupled();
    const Crossing c = first_crossings(coupled.series, {level}).front();

    // Uncoupled from the same phase field, long enough to test a 10x speedup.
    RunConfig cfg = Runs::coupled_config();
    cfg.coupling = Coupling::uncoupled;
    cfg.init_v = "none";
    cfg.n = 8192;
    cfg.dt = 1e-3;
    cfg.record_every = 10;
    cfg.t_final = std::max(5.0, c.censored ? 5.0 : 10.0 * c.time);
    const State start_state(runs.coupled_phi(), cfg.params, cfg.stabilizer());
    const RunResult uncoupled = run(cfg, start_state, runs.table());
    const Crossing u = first_crossings(uncoupled.series, {level}).front();
    const bool uncoupled_reached_by_5 = !u.censored && u.time <= 5.0;
    const double speedup = c.censored ? 0.0 : u.time / c.time;
    const double secs = seconds_since(start);
    const bool pass = !c.censored && c.time < 0.5 && !uncoupled_reached_by_5 && secs <= 1800.0;
    return {pass,
            fmt("coupled reaches p = 1.12 at t = %.4f (required < 0.5); uncoupled %s t = %.2f "
                "(required: not by 5); speedup %s%.2f; %.0f s",
                c.censored ? -1.0 : c.time, u.censored ? "not reached by" : "reaches it at",
                u.time, u.censored ? ">= " : "", speedup, secs)};
}

Outcome criterion9(Runs& runs)
{
    const Params p = baseline();
    const double p0 = spinodal(p).p_s;
    std::vector<double> t, period;
    for (int i = 0; i <= 2000; ++i) {
        t.push_back(20.0 * i / 2000.0);
        period.push_back(pfit_period(t.back(), 3.0, 7.0, p0, p));
    }
    const FitResult synthetic = fit_pfit(t, period, p);
    const bool synthetic_ok =
        std::abs(synthetic.c1 - 3.0) <= 3e-4 && std::abs(synthetic.c2 - 7.0) <= 7e-4;

    const RunResult& coupled = runs.coupled();
    const FitResult real = fit_pfit(column(coupled.series, &SeriesRow::t),
                                    column(coupled.series, &SeriesRow::period), p);
    // Paper range 5.7 to 6.1, widened by 50%.
    const bool real_ok = real.c1 >= 0.5 * 5.7 && real.c1 <= 1.5 * 6.1;
    return {synthetic_ok && real_ok,
            fmt("synthetic fit (c1, c2) = (%.6f, %.6f) for (3, 7); coupled bump run on [0, 20]: "
                "c1 = %.3f, c2 = %.3f (c1 required in [%.2f, %.2f])",
                synthetic.c1, synthetic.c2, real.c1, real.c2, 0.5 * 5.7, 1.5 * 6.1)};
}

Outcome criterion10(Runs& runs)
{
    const EnergyPeriodTable& table = *runs.table();
    const EnergyScale s = table.scale();
    bool monotone = true;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 200; ++i) {
        const double e = s.e_max - (s.e_max - s.e_min) * (i + 0.5) / 200.0;
        const double period = table.period_from_energy(e).period;
        monotone = monotone && period >= prev;
        prev = period;
    }
    const auto& ps = table.periods();
    const double top = table.period_from_energy(s.e_max).period;
    const bool top_ok = std::abs(top - table.p_min()) <= ps[1] - ps[0];

    const auto& e = table.energies();
    std::size_t rising = 0, violations = 0;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
        if (e[i + 1] - e[i] <= table.rounding_floor())
            continue;
        ++rising;
        const double slope = (e[i + 1] - e[i]) / (ps[i + 1] - ps[i]);
        const double bound =
            std::max(plateau_slope_bound(WaveProfile::from_period(ps[i], table.params())),
                     plateau_slope_bound(WaveProfile::from_period(ps[i + 1], table.params())));
        if (slope > bound)
            ++violations;
    }
    return {monotone && top_ok && violations == 0,
            fmt("period_from_energy non-increasing in the energy over 200 energies: %s; p(E_max) - "
                "p_min = %.2e (cell %.2e); plateau bound violated at %zu of %zu rising intervals",
                monotone ? "yes" : "no", top - table.p_min(), ps[1] - ps[0], violations, rising)};
}

Outcome criterion11(Runs& runs)
{
    const Params p = baseline();
    const EnsembleReport& e = runs.ensemble();
    if (e.trials_completed() == 0)
        return {false, "no ensemble trial completed"};
    const EigTable eig = build_eig_table(p, 0.01);
    const PredictionOverlay o = overlay_predictions(e.t, e.mean_energy, p, *runs.table(), eig);
    if (!o.handshake.reached)
        return {false, "the mean energy never reached the spinodal energy"};
    const std::size_t offset = e.t.size() - o.t.size();
    const double e_min = energy_scale(p).e_min;
    const double slack = 1e-12;
    std::size_t below_langer = 0, in_band = 0, below_band = 0;
    for (std::size_t i = 0; i < o.t.size(); ++i) {
        const double m = e.mean_energy[offset + i];
        const double l = o.langer.energy[i];
        const double g = o.eigenvalue.energy[i];
        if (m >= e_min - slack && m <= l + slack)
            ++below_langer;
        if (m >= std::min(l, g) - slack && m <= std::max(l, g) + slack)
            ++in_band;
        else if (m < std::min(l, g))
            ++below_band;
    }
    const std::size_t total = o.t.size();
    return {below_langer == total && in_band == total,
            fmt("5 trials to T = 100, spinodal time %.2f; mean energy in [E_min, Langer] at "
                "%zu/%zu samples; inside the Langer/half-eigenvalue band at %zu/%zu (below it at "
                "%zu)",
                o.handshake.t0, below_langer, total, in_band, total, below_band)};
}

} // namespace

int main(int argc, char** argv)
{
    const std::map<int, std::function<Outcome(Runs&)>> criteria{
        {1, criterion1}, {2, criterion2},  {3, criterion3},  {4, criterion4},
        {5, criterion5}, {6, criterion6},  {7, criterion7},  {8, criterion8},
        {9, criterion9}, {10, criterion10}, {11, criterion11}};
    std::set<int> selected;
    for (int i = 1; i < argc; ++i)
        selected.insert(std::atoi(argv[i]));
    if (selected.empty())
        for (const auto& [n, _] : criteria)
            selected.insert(n);

    Runs runs;
    int failures = 0;
    for (int n : selected) {
        const auto it = criteria.find(n);
        if (it == criteria.end()) {
            std::printf("criterion %d: FAIL: no such criterion\n", n);
            ++failures;
            continue;
        }
        const auto start = std::chrono::steady_clock::now();
        Outcome o{false, ""};
        try {
            o = it->second(runs);
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("criterion %d: %s: %s [%.1f s]\n", n, o.pass ? "PASS" : "FAIL",
                    o.detail.c_str(), seconds_since(start));
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
