#include <doctest.h>

#include "bch/harness.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace bch;

namespace {

RunConfig tiny_config()
{
    RunConfig cfg;
    cfg.n = 256;
    cfg.t_final = 0.5;
    cfg.seed = 40;
    return cfg;
}

const EnergyPeriodTable& shared_table()
{
    static const EnergyPeriodTable table = EnergyPeriodTable::build(Params{});
    return table;
}

} // namespace

TEST_CASE("a single-trial ensemble is its trial")
{
    const RunConfig cfg = tiny_config();
    const EnsembleReport e = run_ensemble(cfg, 1, 1, &shared_table());
    const RunResult r = run(cfg, &shared_table());
    REQUIRE(e.t.size() == r.series.size());
    CHECK(e.trials_completed() == 1);
    CHECK_FALSE(e.partial());
    CHECK(e.trials[0].seed == 40);
    for (std::size_t i = 0; i < e.t.size(); ++i) {
        CHECK(e.t[i] == r.series[i].t);
        CHECK(e.mean_energy[i] == r.series[i].free_energy);
        CHECK(e.mean_period[i] == r.series[i].period);
    }
    CHECK_THROWS_AS(run_ensemble(cfg, 0), std::invalid_argument);
}

TEST_CASE("ensemble means do not depend on the worker count")
{
    const RunConfig cfg = tiny_config();
    const EnsembleReport serial = run_ensemble(cfg, 3, 1, &shared_table());
    const EnsembleReport pooled = run_ensemble(cfg, 3, 3, &shared_table());
    CHECK(serial.mean_energy == pooled.mean_energy);
    CHECK(serial.mean_period == pooled.mean_period);
    CHECK(pooled.trials[2].seed == 42);

    // The mean of three trials sits between their extremes.
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i < 3; ++i) {
        RunConfig one = cfg;
        one.seed = cfg.seed + static_cast<std::uint64_t>(i);
        const double e = run(one, &shared_table()).series.back().free_energy;
        lo = std::min(lo, e);
        hi = std::max(hi, e);
    }
    CHECK(serial.mean_energy.back() >= lo);
    CHECK(serial.mean_energy.back() <= hi);
}

TEST_CASE("failed trials are reported and the ensemble continues")
{
    const auto dir = std::filesystem::temp_directory_path() / "bch_test_partial";
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    // trial_1 already exists as a regular file, so that trial cannot write.
    std::ofstream(dir / "trial_1") << "blocked";
    RunConfig cfg = tiny_config();
    cfg.out_dir = dir.string();
    const EnsembleReport e = run_ensemble(cfg, 3, 2, &shared_table());
    CHECK(e.partial());
    CHECK(e.trials_completed() == 2);
    CHECK_FALSE(e.trials[1].ok);
    CHECK_FALSE(e.trials[1].error.empty());
    CHECK(std::filesystem::exists(e.trials[0].series_file));
    CHECK(e.mean_energy.size() == e.t.size());
    std::filesystem::remove_all(dir);
}

TEST_CASE("crossings and comparison")
{
    std::vector<SeriesRow> rows;
    for (int i = 0; i <= 10; ++i)
        rows.push_back({0.1 * i, 0.0, 0.0, 0.0, 0.0, 0.5 + 0.1 * i, 0.0});
    const auto c = first_crossings(rows, {0.75, 1.0, 3.0});
    CHECK(c[0].time == doctest::Approx(0.3));
    CHECK_FALSE(c[0].censored);
    CHECK(c[1].time == doctest::Approx(0.5));
    CHECK(c[2].censored);
    CHECK(c[2].time == doctest::Approx(1.0));

    // Identical configs run identically.
    RunConfig cfg = tiny_config();
    cfg.t_final = 2.0;
    const CompareReport r = compare_coupled(cfg, cfg, {0.3, 0.4}, &shared_table());
    for (const ComparisonRow& row : r.rows) {
        CHECK(row.coupled.time == row.uncoupled.time);
        CHECK(row.coupled.censored == row.uncoupled.censored);
        if (!row.coupled.censored)
            CHECK(row.speedup == 1.0);
    }

    RunConfig other = cfg;
    other.seed = cfg.seed + 1;
    CHECK_THROWS_AS(compare_coupled(cfg, other), std::invalid_argument);
}

TEST_CASE("energy drops")
{
    const std::vector<double> e{1.0, 1.0, 0.99, 0.9, 0.85, 0.85, 0.849, 0.8, 0.8, 0.7};
    const auto d = energy_drops(e, 0.04);
    REQUIRE(d.size() == 3);
    CHECK(d[0] == doctest::Approx(0.15));
    CHECK(d[1] == doctest::Approx(0.049));
    CHECK(d[2] == doctest::Approx(0.1));
    CHECK(energy_drops(e, 0.2).empty());
}
