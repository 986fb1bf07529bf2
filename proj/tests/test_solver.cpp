#include <doctest.h>

#include "bch/init.hpp"
#include "bch/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace bch;
using std::numbers::pi;

namespace {

Params baseline(double kappa = 0.001)
{
    Params p;
    p.kappa = kappa;
    return p;
}

RunConfig small_config(Coupling c)
{
    RunConfig cfg;
    cfg.coupling = c;
    cfg.n = 512;
    cfg.seed = 7;
    cfg.init_v = c == Coupling::uncoupled ? "none" : "bump";
    return cfg;
}

double max_abs_residual(const RunResult& r)
{
    double worst = 0.0;
    for (std::size_t i = 1; i < r.series.size(); ++i)
        worst = std::max(worst, std::abs(r.series[i].balance_residual));
    return worst;
}

std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("bch_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("trivial fixed points of the step")
{
    const Grid g(256, 1.0);
    const Params p = baseline();

    // phi = 0 with a constant velocity: nothing moves.
    State s(Field(g), sample(g, [](double) { return 0.3; }), p, Coupling::advective, 2.0);
    const State s1 = step(s, 1e-3);
    CHECK(s1.t == 1e-3);
    CHECK(max_abs(s1.phi) == 0.0);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(s1.v[i] == doctest::Approx(0.3).epsilon(1e-15));

    // The binodal state is a fixed point.
    const double b = p.binodal();
    const State u(sample(g, [&](double) { return b; }), p, 2.0);
    const State u1 = step(u, 1e-3);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(u1.phi[i] - b) < 1e-14);

    CHECK_THROWS_AS(step(u, 0.0), std::domain_error);
    // dt above dx / max(|v|, 1) is rejected in coupled modes.
    State fast(Field(g), sample(g, [](double) { return 2.0; }), p, Coupling::advective, 2.0);
    CHECK_THROWS_AS(step(fast, 0.6 * g.dx()), std::domain_error);
    CHECK_NOTHROW(step(fast, 0.4 * g.dx()));
}

TEST_CASE("linear growth of the spinodal mode")
{
    // Choose L so that the fastest growing wavenumber xi_s = sqrt(beta / 2 kappa)
    // is a grid mode.
    Params p = baseline();
    const double xi = std::sqrt(p.beta / (2.0 * p.kappa));
    const int mode = 7;
    p.half_length = mode * pi / xi;
    const Grid g(256, p.half_length);
    const double eps = 1e-8;
    State s(sample(g, [&](double x) { return eps * std::cos(xi * x); }), p, 2.0 * p.beta);

    const double dt = 1e-5;
    Stepper stepper(g);
    std::vector<double> t, log_amp;
    for (int i = 0; i <= 200; ++i) {
        if (i > 0)
            stepper.advance(s, dt);
        const Spectrum spec = to_spectral(s.phi);
        t.push_back(s.t);
        log_amp.push_back(std::log(std::abs(spec[mode])));
    }
    // Least-squares slope of the log amplitude.
    const double n = static_cast<double>(t.size());
    double st = 0, sl = 0, stt = 0, stl = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sl += log_amp[i];
        stt += t[i] * t[i];
        stl += t[i] * log_amp[i];
    }
    const double rate = (n * stl - st * sl) / (n * stt - st * st);
    const double expected = p.beta * p.beta / (4.0 * p.kappa);
    CAPTURE(rate);
    CHECK(std::abs(rate - expected) < 0.05 * expected);
}

TEST_CASE("mass conservation")
{
    for (Coupling c : {Coupling::uncoupled, Coupling::div1, Coupling::div2}) {
        RunConfig cfg = small_config(c);
        cfg.t_final = 0.05;
        cfg.pre_evolve = false;
        const State s0 = initial_state(cfg);
        Stepper stepper(s0.phi.grid);
        const double m0 = stepper.diagnose(s0).mass;
        const RunResult r = run(cfg, s0);
        const double m1 = stepper.diagnose(r.final_state).mass;
        CAPTURE(to_string(c));
        CHECK(std::abs(m1 - m0) < 1e-10 * cfg.t_final);
    }
    // The advective form transports phi without conserving its integral.
    RunConfig cfg = small_config(Coupling::advective);
    cfg.t_final = 0.05;
    cfg.pre_evolve = false;
    const State s0 = initial_state(cfg);
    Stepper stepper(s0.phi.grid);
    const RunResult r = run(cfg, s0);
    CHECK(std::abs(stepper.diagnose(r.final_state).mass - stepper.diagnose(s0).mass) > 1e-8);
}

TEST_CASE("Lyapunov functional does not increase")
{
    for (Coupling c : {Coupling::uncoupled, Coupling::advective}) {
        RunConfig cfg = small_config(c);
        cfg.t_final = c == Coupling::uncoupled ? 2.0 : 0.2;
        cfg.dt = c == Coupling::uncoupled ? 1e-3 : 1e-4;
        cfg.record_every = 1;
        const RunResult r = run(cfg);
        CAPTURE(to_string(c));
        CHECK(r.max_lyapunov_increase <= 1e-10);
        for (std::size_t i = 1; i < r.series.size(); ++i)
            if (c == Coupling::uncoupled)
                CHECK(r.series[i].free_energy <= r.series[i - 1].free_energy + 1e-10);
    }
}

TEST_CASE("uncoupled energy balance is small and first order")
{
    RunConfig cfg = small_config(Coupling::uncoupled);
    cfg.t_final = 0.1;
    cfg.dt = 1e-4;
    cfg.record_every = 100;
    const double coarse = max_abs_residual(run(cfg));
    cfg.dt = 5e-5;
    cfg.record_every = 200;
    const double fine = max_abs_residual(run(cfg));
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("advective energy balance halves with the step")
{
    RunConfig cfg = small_config(Coupling::advective);
    cfg.t_final = 0.02;
    cfg.dt = 1e-4;
    cfg.record_every = 20;
    const double coarse = max_abs_residual(run(cfg));
    cfg.dt = 5e-5;
    cfg.record_every = 40;
    const double fine = max_abs_residual(run(cfg));
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.25));
}

TEST_CASE("div1 balance residual tracks the extra source term")
{
    // r - (-K <mu phi, v_x>) is a first-order time discretization error: it
    // halves with the step, and once the fast initial transient has passed it
    // is small next to the source itself.
    RunConfig cfg = small_config(Coupling::div1);
    cfg.t_final = 0.12;
    auto gaps = [&](double dt) {
        cfg.dt = dt;
        cfg.record_every = static_cast<int>(std::lround(0.02 / dt));
        const RunResult r = run(cfg);
        std::vector<std::pair<double, double>> out; // (gap, |source|)
        for (std::size_t i = 1; i < r.series.size(); ++i)
            out.emplace_back(std::abs(r.series[i].balance_residual - r.div1_source[i]),
                             std::abs(r.div1_source[i]));
        return out;
    };
    const auto coarse = gaps(2.5e-5);
    const auto fine = gaps(1.25e-5);
    REQUIRE(coarse.size() == 6);
    REQUIRE(fine.size() == 6);
    CHECK(fine[0].first / coarse[0].first == doctest::Approx(0.5).epsilon(0.25));
    for (std::size_t i = 3; i < fine.size(); ++i) {
        CAPTURE(i);
        CHECK(fine[i].second > 0.01);
        CHECK(fine[i].first < 0.1 * fine[i].second);
    }
}

TEST_CASE("resolution check")
{
    const Grid g(512, 1.0);
    const Field smooth = sample(g, [](double x) { return std::sin(pi * x) + 0.3 * std::cos(5 * pi * x); });
    CHECK(resolution_check(smooth).resolved);
    CHECK(resolution_check(Field(g)).resolved);

    InitRecipe recipe;
    recipe.seed = 3;
    NormalStream normal(3);
    Field noise(g);
    for (double& v : noise.values)
        v = normal.next();
    const ResolutionReport r = resolution_check(noise);
    CHECK_FALSE(r.resolved);
    CHECK(r.max_tail > 1e-3);
}

TEST_CASE("runs are deterministic and write their artifacts")
{
    const auto dir = scratch_dir("run");
    RunConfig cfg = small_config(Coupling::advective);
    cfg.t_final = 0.01;
    cfg.dt = 1e-4;
    cfg.snapshot_times = {0.0, 0.005};
    cfg.out_dir = (dir / "a").string();
    const RunResult a = run(cfg);
    cfg.out_dir = (dir / "b").string();
    const RunResult b = run(cfg);

    REQUIRE(a.series.size() == b.series.size());
    CHECK(a.series.size() == 11);
    CHECK(std::memcmp(a.series.data(), b.series.data(), a.series.size() * sizeof(SeriesRow)) == 0);
    CHECK(std::isnan(a.series.front().balance_residual));
    CHECK(a.series.back().t == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(slurp(dir / "a" / "series.csv") == slurp(dir / "b" / "series.csv"));
    REQUIRE(a.snapshot_files.size() == 2);
    CHECK(std::filesystem::exists(dir / "a" / "snap_0.csv"));
    CHECK(std::filesystem::exists(dir / "a" / "snap_0.005.csv"));

    // CSV round trip is byte-identical.
    const auto rows = read_series(dir / "a" / "series.csv");
    write_series(dir / "copy.csv", rows);
    CHECK(slurp(dir / "copy.csv") == slurp(dir / "a" / "series.csv"));

    // A snapshot seeds a new run.
    const auto phi = read_snapshot_column(dir / "a" / "snap_0.005.csv", "phi");
    CHECK(phi.size() == 512);
    RunConfig from_file = cfg;
    from_file.init_phi = "file";
    from_file.init_phi_file = (dir / "a" / "snap_0.005.csv").string();
    from_file.init_v = "file";
    from_file.init_v_file = from_file.init_phi_file;
    const State s = initial_state(from_file);
    CHECK(s.phi.values == phi);
    from_file.n = 256;
    CHECK_THROWS_AS(initial_state(from_file), std::invalid_argument);
    std::filesystem::remove_all(dir);
}

TEST_CASE("config parsing")
{
    const RunConfig c = parse_config("# comment\n"
                                     "n = 1024\n"
                                     "kappa = 1e-4  # trailing\n"
                                     "K = 0.5\n"
                                     "coupling = div2\n"
                                     "snapshot_times = 0.1, 0.2\n"
                                     "init_v = fourier\n"
                                     "seed = 12\n");
    CHECK(c.grid_size() == 1024);
    CHECK(c.params.kappa == 1e-4);
    CHECK(c.params.coupling == 0.5);
    CHECK(c.coupling == Coupling::div2);
    CHECK(c.snapshot_times == std::vector<double>{0.1, 0.2});
    CHECK(c.seed == 12);
    CHECK(c.time_step() == 1.0 / 10240.0);
    CHECK(c.stabilizer() == 2.0);
    CHECK(echo_config(parse_config(echo_config(c))) == echo_config(c));

    const RunConfig d = parse_config("");
    CHECK(d.grid_size() == 2048);
    CHECK(d.time_step() == 1e-3);

    CHECK_THROWS_AS(parse_config("bogus = 1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("kappa = abc\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("coupling = sideways\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("n = 1000\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("kappa = -1\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("init_phi = file\n"), std::invalid_argument);
    CHECK_THROWS_AS(parse_config("just words\n"), std::invalid_argument);
}
