#include "bch/energy.hpp"
#include "bch/errors.hpp"
#include "bch/evans.hpp"
#include "bch/harness.hpp"
#include "bch/kernels.hpp"
#include "bch/predictors.hpp"
#include "bch/solver.hpp"
#include "bch/waves.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;
using namespace bch;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitPartial = 3;

struct Global {
    std::string config;
    std::string out = "out";
    int threads = 0;
};

std::string num(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// JSON has no NaN or infinity; such values are written as null.
json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

RunConfig load_run_config(const Global& g)
{
    return g.config.empty() ? parse_config("") : load_config(g.config);
}

Params load_params(const Global& g, std::optional<double> kappa)
{
    Params p = load_run_config(g).params;
    if (kappa)
        p.kappa = *kappa;
    p.validate();
    return p;
}

fs::path output_dir(const Global& g, const std::string& command, const std::string& name)
{
    const fs::path dir = fs::path(g.out) / command / name;
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path);
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

void write_json(const fs::path& path, const json& j)
{
    write_text(path, j.dump(2) + "\n");
}

/// Writes a CSV with the given header and columns of equal length.
void write_columns(const fs::path& path, const std::string& header,
                   const std::vector<const std::vector<double>*>& columns)
{
    std::ofstream out(path);
    out << header << '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front()->size();
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t c = 0; c < columns.size(); ++c)
            out << (c ? "," : "") << num((*columns[c])[i]);
        out << '\n';
    }
    out.flush();
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

json run_summary(const RunResult& r)
{
    const SeriesRow& last = r.series.back();
    return {{"steps", r.steps},
            {"final_time", last.t},
            {"initial_energy", r.initial_energy},
            {"final_energy", last.free_energy},
            {"final_period", number_or_null(last.period)},
            {"max_lyapunov_increase", r.max_lyapunov_increase},
            {"max_resolution_tail", r.max_resolution_tail},
            {"resolved_after_burn_in", r.max_resolution_tail < 2.2204e-16},
            {"snapshots", r.snapshot_files}};
}

std::vector<double> column(const std::vector<SeriesRow>& rows, double SeriesRow::*member)
{
    std::vector<double> out;
    for (const SeriesRow& r : rows)
        out.push_back(r.*member);
    return out;
}

json crossings_json(const std::vector<Crossing>& cs)
{
    json a = json::array();
    for (const Crossing& c : cs)
        a.push_back({{"threshold", c.threshold}, {"time", c.time}, {"censored", c.censored}});
    return a;
}

json fit_json(const std::optional<FitResult>& fit, const std::string& error)
{
    if (!fit)
        return {{"error", error}};
    return {{"c1", fit->c1},
            {"c2", fit->c2},
            {"objective", fit->objective},
            {"t_window", fit->t_window},
            {"p0", fit->p0}};
}

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * i / (n - 1.0);
    return v;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const Global& g, const std::string& name, std::optional<std::uint64_t> seed,
                 std::optional<double> t_final)
{
    RunConfig cfg = load_run_config(g);
    if (seed)
        cfg.seed = *seed;
    if (t_final)
        cfg.t_final = *t_final;
    const fs::path dir = output_dir(g, "simulate", name);
    cfg.out_dir = dir.string();
    write_text(dir / "config.echo", echo_config(cfg));
    const RunResult r = run(cfg);
    json report = run_summary(r);
    report["seed"] = cfg.seed;
    report["coupling"] = to_string(cfg.coupling);
    write_json(dir / "report.json", report);
    std::cout << (dir / "series.csv").string() << '\n';
    return kExitOk;
}

int cmd_ensemble(const Global& g, const std::string& name, int trials, int workers,
                 double eig_step)
{
    RunConfig cfg = load_run_config(g);
    const fs::path dir = output_dir(g, "ensemble", name);
    cfg.out_dir = dir.string();
    write_text(dir / "config.echo", echo_config(cfg));

    const EnergyPeriodTable table = EnergyPeriodTable::build(cfg.params);
    const EnsembleReport e = run_ensemble(cfg, trials, workers, &table);

    json report = {{"base_seed", e.base_seed},
                   {"trials_requested", e.trials_requested},
                   {"trials_completed", e.trials_completed()},
                   {"partial", e.partial()}};
    json trial_list = json::array();
    for (const TrialRecord& t : e.trials)
        trial_list.push_back(
            {{"seed", t.seed}, {"ok", t.ok}, {"error", t.error}, {"series", t.series_file}});
    report["trials"] = trial_list;

    if (e.trials_completed() > 0) {
        const EigTable eig = build_eig_table(cfg.params, eig_step);
        const PredictionOverlay o =
            overlay_predictions(e.t, e.mean_energy, cfg.params, table, eig);
        const double nan = std::numeric_limits<double>::quiet_NaN();
        std::vector<double> langer(e.t.size(), nan), eigen(e.t.size(), nan);
        const std::size_t offset = e.t.size() - o.t.size();
        for (std::size_t i = 0; i < o.t.size(); ++i) {
            langer[offset + i] = o.langer.energy[i];
            eigen[offset + i] = o.eigenvalue.energy[i];
        }
        write_columns(dir / "series.csv", "t,mean_free_energy,mean_period,langer_energy,eig_energy",
                      {&e.t, &e.mean_energy, &e.mean_period, &langer, &eigen});
        report["handshake"] = {{"reached", o.handshake.reached},
                               {"t0", o.handshake.t0},
                               {"p0", o.handshake.p0}};
        report["eigenvalue_variant"] = "half";
        report["eigenvalue_clamped"] = o.eigenvalue.clamped;
    }
    write_json(dir / "report.json", report);
    std::cout << dir.string() << '\n';
    return e.partial() ? kExitPartial : kExitOk;
}

int cmd_predict(const Global& g, const std::string& name, const std::string& method, bool half,
                std::optional<double> p0, double t0, double t_max, int points,
                std::optional<double> kappa, double eig_step)
{
    const Params p = load_params(g, kappa);
    if (points < 2)
        throw std::invalid_argument("--points must be at least 2");
    PredictorConfig cfg;
    cfg.p0 = p0.value_or(minimum_period(p));
    cfg.t0 = t0;
    std::optional<EigTable> eig;
    if (method == "eig") {
        eig = build_eig_table(p, eig_step);
        cfg.eig_table = &*eig;
        cfg.variant = half ? PredictorVariant::eig_half : PredictorVariant::eig_full;
    } else if (method != "langer") {
        throw std::invalid_argument("--method must be langer or eig");
    }
    const EnergyPeriodTable table = EnergyPeriodTable::build(p);
    const TimeSeries s = predicted_energy_curve(linspace(t0, t_max, points), cfg, table);
    const fs::path dir = output_dir(g, "predict", name);
    write_columns(dir / "series.csv", "t,period,energy", {&s.t, &s.period, &s.energy});
    write_json(dir / "report.json", {{"method", method},
                                     {"half", half},
                                     {"p0", cfg.p0},
                                     {"t0", t0},
                                     {"kappa", p.kappa},
                                     {"clamped", s.clamped}});
    std::cout << (dir / "series.csv").string() << '\n';
    return kExitOk;
}

int cmd_fit(const Global& g, const std::string& name, const std::string& series, double t_max,
            std::optional<double> p0)
{
    const Params p = load_params(g, std::nullopt);
    const auto rows = read_series(series);
    const FitResult r = fit_pfit(column(rows, &SeriesRow::t), column(rows, &SeriesRow::period), p,
                                 t_max, p0);
    const json j = {{"c1", r.c1}, {"c2", r.c2}, {"objective", r.objective}};
    json full = j;
    full["t_window"] = r.t_window;
    full["p0"] = r.p0;
    full["series"] = series;
    write_json(output_dir(g, "fit", name) / "report.json", full);
    std::cout << j.dump() << '\n';
    return kExitOk;
}

int cmd_waves_table(const Global& g, const std::string& name, int points,
                    std::optional<double> kappa)
{
    const Params p = load_params(g, kappa);
    if (points < 1)
        throw std::invalid_argument("--points must be positive");
    const double top = p.binodal();
    std::vector<double> a, period, energy;
    for (int i = 1; i <= points; ++i) {
        a.push_back(top * i / (points + 1.0));
        period.push_back(period_of_amplitude(a.back(), p));
        energy.push_back(wave_energy(a.back(), p));
    }
    const fs::path dir = output_dir(g, "waves", name);
    write_columns(dir / "table.csv", "amplitude,period,energy", {&a, &period, &energy});
    const EnergyScale s = energy_scale(p);
    write_json(dir / "report.json", {{"kappa", p.kappa},
                                     {"p_min", minimum_period(p)},
                                     {"e_max", s.e_max},
                                     {"e_min", s.e_min},
                                     {"e_spinodal", s.e_spinodal}});
    std::cout << (dir / "table.csv").string() << '\n';
    return kExitOk;
}

int cmd_evans_table(const Global& g, const std::string& name, double step,
                    std::optional<double> kappa, std::optional<double> reference_kappa)
{
    const Params p = load_params(g, kappa);
    EigTable t;
    if (reference_kappa) {
        Params ref = p;
        ref.kappa = *reference_kappa;
        t = rescale_table(build_eig_table(ref, step), p.kappa);
    } else {
        t = build_eig_table(p, step);
    }
    const std::vector<double> k(t.amplitudes.size(), p.kappa);
    const fs::path dir = output_dir(g, "evans", name);
    write_columns(dir / "table.csv", "amplitude,period,lambda_max,kappa",
                  {&t.amplitudes, &t.periods, &t.lambda_max, &k});
    write_json(dir / "report.json", {{"kappa", p.kappa},
                                     {"step", step},
                                     {"rows", t.amplitudes.size()},
                                     {"rescaled_from", reference_kappa
                                                           ? json(*reference_kappa)
                                                           : json(nullptr)}});
    std::cout << (dir / "table.csv").string() << '\n';
    return kExitOk;
}

int cmd_measure(const Global& g, const std::string& name, const std::string& series,
                const std::vector<double>& thresholds)
{
    const Params p = load_params(g, std::nullopt);
    const auto rows = read_series(series);
    if (rows.empty())
        throw std::invalid_argument(series + ": no rows");
    const EnergyScale s = energy_scale(p);
    const auto energy = column(rows, &SeriesRow::free_energy);
    const auto drops = energy_drops(energy, s.e_min);
    const Handshake h = spinodal_handshake(column(rows, &SeriesRow::t), energy, p);
    json report = {{"series", series},
                   {"two_e_min", 2.0 * s.e_min},
                   {"energy_drops", drops},
                   {"crossings", crossings_json(first_crossings(rows, thresholds))},
                   {"handshake", {{"reached", h.reached}, {"t0", h.t0}, {"p0", h.p0}}},
                   {"final_time", rows.back().t},
                   {"final_energy", rows.back().free_energy},
                   {"final_period", number_or_null(rows.back().period)}};
    write_json(output_dir(g, "measure", name) / "report.json", report);
    std::cout << report.dump(2) << '\n';
    return kExitOk;
}

int cmd_compare(const Global& g, const std::string& name, const std::string& other_config,
                const std::vector<double>& thresholds)
{
    const RunConfig first = load_run_config(g);
    RunConfig second = first;
    if (!other_config.empty()) {
        second = load_config(other_config);
    } else {
        second.coupling = Coupling::uncoupled;
        second.init_v = "none";
        second.n = first.grid_size();
        second.dt.reset();
    }
    const fs::path dir = output_dir(g, "compare", name);
    RunConfig a = first, b = second;
    a.out_dir = (dir / "first").string();
    b.out_dir = (dir / "second").string();
    write_text(dir / "config.echo", echo_config(a) + "\n" + echo_config(b));
    const CompareReport r = compare_coupled(a, b, thresholds);

    json rows = json::array();
    for (const ComparisonRow& row : r.rows)
        rows.push_back({{"threshold", row.threshold},
                        {"first_time", row.coupled.time},
                        {"first_censored", row.coupled.censored},
                        {"second_time", row.uncoupled.time},
                        {"second_censored", row.uncoupled.censored},
                        {"speedup", number_or_null(row.speedup)},
                        {"speedup_is_lower_bound", row.uncoupled.censored}});
    const json report = {{"first", {{"coupling", to_string(a.coupling)},
                                    {"run", run_summary(r.coupled)},
                                    {"fit", fit_json(r.coupled_fit, r.coupled_fit_error)}}},
                         {"second", {{"coupling", to_string(b.coupling)},
                                     {"run", run_summary(r.uncoupled)},
                                     {"fit", fit_json(r.uncoupled_fit, r.uncoupled_fit_error)}}},
                         {"crossings", rows}};
    write_json(dir / "report.json", report);
    std::cout << report["crossings"].dump(2) << '\n';
    return kExitOk;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Coarsening simulations and predictors for the Cahn-Hilliard and "
                 "Burgers-Cahn-Hilliard equations"};
    Global g;
    app.add_option("--config", g.config, "Run configuration file (key = value)");
    app.add_option("--out", g.out, "Root of the output tree")->capture_default_str();
    app.add_option("--threads", g.threads, "OpenMP threads for the kernels (0: runtime default)")
        ->check(CLI::NonNegativeNumber);
    app.require_subcommand(1);

    std::string name = "run";
    auto add_name = [&](CLI::App* sub) {
        sub->add_option("--name", name, "Output subdirectory")->capture_default_str();
    };

    auto* simulate = app.add_subcommand("simulate", "Single run from the config");
    add_name(simulate);
    std::optional<std::uint64_t> seed;
    std::optional<double> t_final;
    simulate->add_option("--seed", seed, "Override the config seed");
    simulate->add_option("--t-final", t_final, "Override the config final time");

    auto* ensemble = app.add_subcommand("ensemble", "Trials with seeds seed, seed+1, ...");
    add_name(ensemble);
    int trials = 0;
    int workers = 0;
    double eig_step = 0.01;
    ensemble->add_option("--trials", trials, "Number of trials")->required()->check(
        CLI::PositiveNumber);
    ensemble->add_option("--workers", workers, "Concurrent trials (0: hardware threads)")
        ->check(CLI::NonNegativeNumber);
    ensemble->add_option("--eig-step", eig_step, "Amplitude step of the eigenvalue table")
        ->capture_default_str();

    auto* predict = app.add_subcommand("predict", "Period and energy predictions");
    add_name(predict);
    std::string method = "langer";
    bool half = false;
    std::optional<double> p0;
    double t0 = 0.0;
    double t_max = 100.0;
    int points = 200;
    std::optional<double> kappa;
    predict->add_option("--method", method, "langer or eig")
        ->check(CLI::IsMember({"langer", "eig"}))
        ->capture_default_str();
    predict->add_flag("--half", half, "Half-rate eigenvalue ODE");
    predict->add_option("--p0", p0, "Initial period (default: minimum period)");
    predict->add_option("--t0", t0, "Start time")->capture_default_str();
    predict->add_option("--t-max", t_max, "End time")->capture_default_str();
    predict->add_option("--points", points, "Samples on [t0, t-max]")->capture_default_str();
    predict->add_option("--kappa", kappa, "Override kappa");
    predict->add_option("--eig-step", eig_step, "Amplitude step of the eigenvalue table")
        ->capture_default_str();

    auto* fit = app.add_subcommand("fit", "Fit P_fit[c1, c2] to a series.csv");
    add_name(fit);
    std::string series;
    double fit_window = 20.0;
    fit->add_option("--series", series, "series.csv to fit")->required()->check(
        CLI::ExistingFile);
    fit->add_option("--t-max", fit_window, "Fit window [0, t-max]")->capture_default_str();
    fit->add_option("--p0", p0, "Initial period (default: first sample)");

    auto* waves = app.add_subcommand("waves", "Stationary wave tables");
    waves->require_subcommand(1);
    auto* waves_table = waves->add_subcommand("table", "amplitude, period, energy");
    add_name(waves_table);
    int wave_points = 100;
    waves_table->add_option("--points", wave_points, "Amplitudes")->capture_default_str();
    waves_table->add_option("--kappa", kappa, "Override kappa");

    auto* evans = app.add_subcommand("evans", "Leading eigenvalue tables");
    evans->require_subcommand(1);
    auto* evans_table = evans->add_subcommand("table", "amplitude, period, lambda_max, kappa");
    add_name(evans_table);
    double evans_step = 0.01;
    std::optional<double> reference_kappa;
    evans_table->add_option("--step", evans_step, "Amplitude step")->capture_default_str();
    evans_table->add_option("--kappa", kappa, "Override kappa");
    evans_table->add_option("--reference-kappa", reference_kappa,
                            "Compute at this kappa and rescale");

    std::vector<double> thresholds{1.12, 1.495};
    auto* measure = app.add_subcommand("measure", "Energy drops and period crossings of a series");
    add_name(measure);
    measure->add_option("--series", series, "series.csv to measure")->required()->check(
        CLI::ExistingFile);
    measure->add_option("--thresholds", thresholds, "Period thresholds")->capture_default_str();

    auto* compare = app.add_subcommand("compare", "Coupled versus uncoupled from the same phase");
    add_name(compare);
    std::string other_config;
    compare->add_option("--against", other_config,
                        "Second config (default: the first one, uncoupled)");
    compare->add_option("--thresholds", thresholds, "Period thresholds")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (g.threads > 0)
            kernels::set_threads(g.threads);
        if (simulate->parsed())
            return cmd_simulate(g, name, seed, t_final);
        if (ensemble->parsed())
            return cmd_ensemble(g, name, trials, workers, eig_step);
        if (predict->parsed())
            return cmd_predict(g, name, method, half, p0, t0, t_max, points, kappa, eig_step);
        if (fit->parsed())
            return cmd_fit(g, name, series, fit_window, p0);
        if (waves_table->parsed())
            return cmd_waves_table(g, name, wave_points, kappa);
        if (evans_table->parsed())
            return cmd_evans_table(g, name, evans_step, kappa, reference_kappa);
        if (measure->parsed())
            return cmd_measure(g, name, series, thresholds);
        if (compare->parsed())
            return cmd_compare(g, name, other_config, thresholds);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kExitNumerical;
    }
    return kExitUsage;
}
