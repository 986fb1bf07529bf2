#include "bch/solver.hpp"

#include "bch/errors.hpp"
#include "bch/init.hpp"
#include "bch/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace bch {

namespace {

constexpr double kResolutionThreshold = 2.2204e-16;
constexpr double kBurnIn = 1e-3;

bool all_finite(const std::vector<double>& v)
{
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

void times_ik(const Grid& grid, Spectrum& s)
{
    derivative_spectrum(grid, s, 1);
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size())
        throw std::invalid_argument("config key '" + key + "': not a number: '" + value + "'");
    return d;
}

long long parse_integer(const std::string& key, const std::string& value)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != value.size())
        throw std::invalid_argument("config key '" + key + "': not an integer: '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes")
        return true;
    if (value == "false" || value == "0" || value == "no")
        return false;
    throw std::invalid_argument("config key '" + key + "': not a boolean: '" + value + "'");
}

std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void check_stream(const std::ostream& out, const std::filesystem::path& path)
{
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

std::vector<std::string> split_csv_line(const std::string& line)
{
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        cells.push_back(trim(cell));
    return cells;
}

std::string snapshot_name(double t)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "snap_%g.csv", t);
    return buf;
}

} // namespace

Coupling parse_coupling(const std::string& name)
{
    if (name == "uncoupled")
        return Coupling::uncoupled;
    if (name == "advective")
        return Coupling::advective;
    if (name == "div1")
        return Coupling::div1;
    if (name == "div2")
        return Coupling::div2;
    throw std::invalid_argument("unknown coupling '" + name +
                                "' (expected uncoupled, advective, div1 or div2)");
}

std::string to_string(Coupling c)
{
    switch (c) {
    case Coupling::uncoupled:
        return "uncoupled";
    case Coupling::advective:
        return "advective";
    case Coupling::div1:
        return "div1";
    case Coupling::div2:
        return "div2";
    }
    return "uncoupled";
}

State::State(Field phi_, Field v_, const Params& p, Coupling c, double a)
    : phi(std::move(phi_)), v(std::move(v_)), params(p), coupling(c), stabilizer(a)
{
    params.validate();
    if (!(phi.grid == v.grid))
        throw std::invalid_argument("phi and v live on different grids");
    if (!(a >= 0.0))
        throw std::invalid_argument("stabilizer must be non-negative");
}

State::State(Field phi_, const Params& p, double a)
    : State(phi_, Field(phi_.grid), p, Coupling::uncoupled, a)
{
}

Stepper::Stepper(const Grid& grid) : grid_(grid)
{
    const std::size_t m = grid.modes();
    const std::size_t n = grid.size();
    for (Spectrum* s : {&phi_hat_, &v_hat_, &mu_hat_, &work_hat_, &chem_hat_, &adv_hat_, &rhs_hat_})
        s->assign(m, Complex(0.0, 0.0));
    for (std::vector<double>* v : {&phi_x_, &v_x_, &mu_, &mu_x_, &work_, &work2_})
        v->assign(n, 0.0);
}

void Stepper::prepare(const State& state)
{
    if (!(state.phi.grid == grid_))
        throw std::invalid_argument("state grid differs from the stepper grid");
    const Params& p = state.params;
    const auto k = grid_.wavenumbers();
    const bool coupled = state.coupling != Coupling::uncoupled;

    grid_.forward(state.phi.values, phi_hat_);

    work_hat_ = phi_hat_;
    times_ik(grid_, work_hat_);
    grid_.inverse_inplace(work_hat_, phi_x_);

    // chem = F'(phi) - A phi by collocation, dealiased.
    kernels::explicit_chemical(state.phi.values, work_, p.alpha, p.beta, state.stabilizer);
    grid_.forward(work_, chem_hat_);
    dealias(grid_, chem_hat_);

    // mu = -kappa phi_xx + F'(phi) with the same dealiased cubic.
    for (std::size_t j = 0; j < mu_hat_.size(); ++j)
        mu_hat_[j] = (p.kappa * k[j] * k[j] + state.stabilizer) * phi_hat_[j] + chem_hat_[j];
    work_hat_ = mu_hat_;
    times_ik(grid_, work_hat_);
    grid_.inverse_inplace(work_hat_, mu_x_);

    if (coupled) {
        work_hat_ = mu_hat_;
        grid_.inverse_inplace(work_hat_, mu_);
        grid_.forward(state.v.values, v_hat_);
        work_hat_ = v_hat_;
        times_ik(grid_, work_hat_);
        grid_.inverse_inplace(work_hat_, v_x_);
    }
}

Diagnostics Stepper::collect(const State& state) const
{
    const Params& p = state.params;
    const double dx = grid_.dx();
    const bool coupled = state.coupling != Coupling::uncoupled;
    Diagnostics d{};
    d.t = state.t;
    d.free_energy = kernels::energy_sum(state.phi.values, phi_x_, p.alpha, p.beta, p.kappa, dx);
    d.h1_phi = std::sqrt(kernels::squared_sum(phi_x_, dx));
    const double mu_x2 = kernels::squared_sum(mu_x_, dx);
    double mass = 0.0;
    for (double v : state.phi.values)
        mass += v;
    d.mass = mass * dx;
    if (coupled) {
        d.kinetic_energy = 0.5 * kernels::squared_sum(state.v.values, dx);
        const double v_x2 = kernels::squared_sum(v_x_, dx);
        d.h1_v = std::sqrt(v_x2);
        d.dissipation = p.nu * v_x2 + p.coupling * mu_x2;
        d.lyapunov = d.kinetic_energy + p.coupling * d.free_energy;
        double s = 0.0;
        for (std::size_t i = 0; i < mu_.size(); ++i)
            s += mu_[i] * state.phi.values[i] * v_x_[i];
        d.div1_source = -p.coupling * s * dx;
    } else {
        d.dissipation = mu_x2;
        d.lyapunov = d.free_energy;
    }
    return d;
}

Diagnostics Stepper::diagnose(const State& state)
{
    prepare(state);
    return collect(state);
}

Diagnostics Stepper::advance(State& state, double dt)
{
    if (!(dt > 0.0))
        throw std::domain_error("time step must be positive");
    const Params& p = state.params;
    const bool coupled = state.coupling != Coupling::uncoupled;
    if (coupled) {
        const double vmax = std::max(max_abs(state.v), 1.0);
        if (dt > grid_.dx() / vmax)
            throw std::domain_error("CFL violation: dt = " + format_double(dt) +
                                    " exceeds dx / max(|v|, 1) = " +
                                    format_double(grid_.dx() / vmax));
    }
    prepare(state);
    const Diagnostics before = collect(state);
    if (!std::isfinite(before.lyapunov) || !std::isfinite(before.dissipation))
        throw NumericalError("non-finite state at t = " + format_double(state.t));

    const auto k = grid_.wavenumbers();
    const std::span<Complex> adv(adv_hat_);
    if (!coupled) {
        std::fill(adv_hat_.begin(), adv_hat_.end(), Complex(0.0, 0.0));
    } else if (state.coupling == Coupling::advective) {
        kernels::multiply(state.v.values, phi_x_, work_);
        grid_.forward(work_, adv_hat_);
    } else {
        kernels::multiply(state.v.values, state.phi.values, work_);
        grid_.forward(work_, adv_hat_);
        times_ik(grid_, adv_hat_);
    }
    kernels::phase_update(phi_hat_, chem_hat_, adv_hat_, k, dt, p.kappa, state.stabilizer);

    if (coupled) {
        // rhs = -v v_x + coupling source.
        kernels::multiply(state.v.values, v_x_, work_);
        if (state.coupling == Coupling::div2)
            kernels::multiply(mu_x_, state.phi.values, work2_);
        else
            kernels::multiply(mu_, phi_x_, work2_);
        const double sign = state.coupling == Coupling::div2 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < work_.size(); ++i)
            work_[i] = -work_[i] + sign * p.coupling * work2_[i];
        grid_.forward(work_, rhs_hat_);
        kernels::velocity_update(v_hat_, rhs_hat_, k, dt, p.nu);
        grid_.inverse_inplace(v_hat_, state.v.values);
    }
    grid_.inverse_inplace(phi_hat_, state.phi.values);
    state.t += dt;

    if (!all_finite(state.phi.values) || (coupled && !all_finite(state.v.values)))
        throw NumericalError("non-finite field after the step ending at t = " +
                             format_double(state.t) + " (dt = " + format_double(dt) + ")");
    return before;
}

State step(const State& state, double dt)
{
    State next = state;
    Stepper(state.phi.grid).advance(next, dt);
    return next;
}

ResolutionReport resolution_check(const Field& field)
{
    const Grid& g = field.grid;
    const double scale = max_abs(field);
    if (scale == 0.0)
        return {true, 0.0};
    const Spectrum s = to_spectral(field);
    double tail = 0.0;
    for (std::size_t j = g.dealias_cutoff(); j < s.size(); ++j)
        tail = std::max(tail, std::abs(s[j]));
    tail /= static_cast<double>(g.size()) * scale;
    return {tail < kResolutionThreshold, tail};
}

ResolutionReport resolution_check(const State& state)
{
    ResolutionReport r = resolution_check(state.phi);
    if (state.coupling != Coupling::uncoupled) {
        const ResolutionReport rv = resolution_check(state.v);
        r.resolved = r.resolved && rv.resolved;
        r.max_tail = std::max(r.max_tail, rv.max_tail);
    }
    return r;
}

double energy_balance_residual(const Diagnostics& from, const Diagnostics& to,
                               double integrated_dissipation)
{
    const double span = to.t - from.t;
    if (!(span > 0.0))
        throw std::invalid_argument("energy balance needs an interval of positive length");
    return (to.lyapunov - from.lyapunov + integrated_dissipation) / span;
}

std::size_t RunConfig::grid_size() const
{
    return n.value_or(coupling == Coupling::uncoupled ? 2048 : 8192);
}

double RunConfig::time_step() const
{
    return dt.value_or(coupling == Coupling::uncoupled ? 1e-3 : 1.0 / 10240.0);
}

double RunConfig::stabilizer() const
{
    return stabilizer_A.value_or(2.0 * params.beta);
}

void RunConfig::validate() const
{
    params.validate();
    const std::size_t size = grid_size();
    if (size < 8 || (size & (size - 1)) != 0)
        throw std::invalid_argument("n must be a power of two, at least 8");
    if (!(time_step() > 0.0))
        throw std::invalid_argument("dt must be positive");
    if (!(t_final >= 0.0))
        throw std::invalid_argument("t_final must be non-negative");
    if (record_every < 1)
        throw std::invalid_argument("record_every must be at least 1");
    if (init_phi != "random" && init_phi != "file")
        throw std::invalid_argument("init_phi must be random or file");
    if (init_phi == "file" && init_phi_file.empty())
        throw std::invalid_argument("init_phi = file needs init_phi_file");
    if (init_v != "none" && init_v != "fourier" && init_v != "bump" && init_v != "file")
        throw std::invalid_argument("init_v must be none, fourier, bump or file");
    if (init_v == "file" && init_v_file.empty())
        throw std::invalid_argument("init_v = file needs init_v_file");
    if (!(stabilizer() >= 0.0))
        throw std::invalid_argument("stabilizer_A must be non-negative");
    for (double s : snapshot_times)
        if (!(s >= 0.0))
            throw std::invalid_argument("snapshot times must be non-negative");
}

RunConfig parse_config(const std::string& text)
{
    RunConfig c;
    std::stringstream in(text);
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line.erase(hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(number) +
                                        ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "n") {
            const long long v = parse_integer(key, value);
            if (v <= 0)
                throw std::invalid_argument("n must be positive");
            c.n = static_cast<std::size_t>(v);
        } else if (key == "L") {
            c.params.half_length = parse_double(key, value);
        } else if (key == "alpha") {
            c.params.alpha = parse_double(key, value);
        } else if (key == "beta") {
            c.params.beta = parse_double(key, value);
        } else if (key == "kappa") {
            c.params.kappa = parse_double(key, value);
        } else if (key == "nu") {
            c.params.nu = parse_double(key, value);
        } else if (key == "K") {
            c.params.coupling = parse_double(key, value);
        } else if (key == "coupling") {
            c.coupling = parse_coupling(value);
        } else if (key == "dt") {
            c.dt = parse_double(key, value);
        } else if (key == "t_final") {
            c.t_final = parse_double(key, value);
        } else if (key == "record_every") {
            c.record_every = static_cast<int>(parse_integer(key, value));
        } else if (key == "snapshot_times") {
            c.snapshot_times.clear();
            for (const std::string& item : split_csv_line(value))
                if (!item.empty())
                    c.snapshot_times.push_back(parse_double(key, item));
        } else if (key == "seed") {
            const long long v = parse_integer(key, value);
            if (v < 0)
                throw std::invalid_argument("seed must be non-negative");
            c.seed = static_cast<std::uint64_t>(v);
        } else if (key == "init_phi") {
            c.init_phi = value;
        } else if (key == "init_phi_file") {
            c.init_phi_file = value;
        } else if (key == "init_v") {
            c.init_v = value;
        } else if (key == "init_v_file") {
            c.init_v_file = value;
        } else if (key == "fourier_cutoff") {
            c.fourier_cutoff = static_cast<int>(parse_integer(key, value));
        } else if (key == "stabilizer_A") {
            c.stabilizer_A = parse_double(key, value);
        } else if (key == "sigma") {
            c.sigma = parse_double(key, value);
        } else if (key == "energy_target_frac") {
            c.energy_target_frac = parse_double(key, value);
        } else if (key == "energy_tol") {
            c.energy_tol = parse_double(key, value);
        } else if (key == "pre_evolve") {
            c.pre_evolve = parse_bool(key, value);
        } else if (key == "out_dir") {
            c.out_dir = value;
        } else {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string echo_config(const RunConfig& c)
{
    std::ostringstream o;
    o << "n = " << c.grid_size() << '\n'
      << "L = " << format_double(c.params.half_length) << '\n'
      << "alpha = " << format_double(c.params.alpha) << '\n'
      << "beta = " << format_double(c.params.beta) << '\n'
      << "kappa = " << format_double(c.params.kappa) << '\n'
      << "nu = " << format_double(c.params.nu) << '\n'
      << "K = " << format_double(c.params.coupling) << '\n'
      << "coupling = " << to_string(c.coupling) << '\n'
      << "dt = " << format_double(c.time_step()) << '\n'
      << "t_final = " << format_double(c.t_final) << '\n'
      << "record_every = " << c.record_every << '\n'
      << "snapshot_times = ";
    for (std::size_t i = 0; i < c.snapshot_times.size(); ++i)
        o << (i ? "," : "") << format_double(c.snapshot_times[i]);
    o << '\n'
      << "seed = " << c.seed << '\n'
      << "init_phi = " << c.init_phi << '\n';
    if (!c.init_phi_file.empty())
        o << "init_phi_file = " << c.init_phi_file << '\n';
    o << "init_v = " << c.init_v << '\n';
    if (!c.init_v_file.empty())
        o << "init_v_file = " << c.init_v_file << '\n';
    o << "fourier_cutoff = " << c.fourier_cutoff << '\n'
      << "stabilizer_A = " << format_double(c.stabilizer()) << '\n'
      << "sigma = " << format_double(c.sigma) << '\n'
      << "energy_target_frac = " << format_double(c.energy_target_frac) << '\n'
      << "energy_tol = " << format_double(c.energy_tol) << '\n'
      << "pre_evolve = " << (c.pre_evolve ? "true" : "false") << '\n';
    if (!c.out_dir.empty())
        o << "out_dir = " << c.out_dir << '\n';
    return o.str();
}

State initial_state(const RunConfig& config)
{
    config.validate();
    const Grid grid(config.grid_size(), config.params.half_length);
    InitRecipe recipe;
    recipe.seed = config.seed;
    recipe.sigma = config.sigma;
    recipe.energy_target_frac = config.energy_target_frac;
    recipe.energy_tol = config.energy_tol;
    recipe.fourier_cutoff = config.fourier_cutoff;
    recipe.stabilizer = config.stabilizer();

    auto from_file = [&](const std::string& path, const std::string& column) {
        std::vector<double> values = read_snapshot_column(path, column);
        if (values.size() != grid.size())
            throw std::invalid_argument(path + ": " + std::to_string(values.size()) +
                                        " rows, expected n = " + std::to_string(grid.size()));
        return Field(grid, std::move(values));
    };

    Field phi(grid);
    if (config.init_phi == "file") {
        phi = from_file(config.init_phi_file, "phi");
    } else {
        phi = random_phase_init(recipe, grid);
        const double target = config.energy_target_frac * config.params.max_energy();
        if (config.pre_evolve && free_energy(phi, config.params) > target + config.energy_tol)
            phi = pre_evolve_to_energy(phi, recipe, config.params).phi;
    }

    Field v(grid);
    if (config.coupling != Coupling::uncoupled) {
        if (config.init_v == "fourier") {
            // A separate stream so velocity and phase noise are independent.
            InitRecipe velocity = recipe;
            velocity.seed = recipe.seed ^ 0x9E3779B97F4A7C15ULL;
            v = random_fourier_velocity(velocity, grid);
        }
        else if (config.init_v == "bump")
            v = bump_velocity(grid);
        else if (config.init_v == "file")
            v = from_file(config.init_v_file, "v");
    }
    return State(std::move(phi), std::move(v), config.params, config.coupling,
                 config.stabilizer());
}

RunResult run(const RunConfig& config, State state, const EnergyPeriodTable* table)
{
    config.validate();
    std::optional<EnergyPeriodTable> own;
    if (table == nullptr) {
        own = EnergyPeriodTable::build(config.params);
        table = &*own;
    }
    const double dt = config.time_step();
    const auto total_steps =
        static_cast<std::size_t>(std::max(0.0, std::ceil(config.t_final / dt - 1e-9)));
    const std::filesystem::path out_dir = config.out_dir;
    if (!out_dir.empty())
        std::filesystem::create_directories(out_dir);

    Stepper stepper(state.phi.grid);
    RunResult result{{}, state, 0, 0.0, 0.0, {}, 0.0, {}};

    std::vector<double> pending_snaps = config.snapshot_times;
    std::sort(pending_snaps.begin(), pending_snaps.end());
    auto write_due_snapshots = [&](double t) {
        while (!pending_snaps.empty() && pending_snaps.front() <= t + 0.5 * dt) {
            if (!out_dir.empty()) {
                const auto path = out_dir / snapshot_name(pending_snaps.front());
                write_snapshot(path, state);
                result.snapshot_files.push_back(path.string());
            }
            pending_snaps.erase(pending_snaps.begin());
        }
    };

    auto make_row = [&](const Diagnostics& d, double residual) {
        return SeriesRow{d.t,      d.free_energy, d.kinetic_energy,
                         d.h1_phi, d.h1_v,        table->interpolate_period(d.free_energy).period,
                         residual};
    };

    Diagnostics last_record = stepper.diagnose(state);
    result.initial_energy = last_record.free_energy;
    result.series.push_back(make_row(last_record, std::numeric_limits<double>::quiet_NaN()));
    result.div1_source.push_back(std::numeric_limits<double>::quiet_NaN());
    write_due_snapshots(state.t);

    Diagnostics prev = last_record; // diagnostics of the current state
    double dissipation = 0.0;
    double div1 = 0.0;
    auto add_piece = [&](const Diagnostics& a, const Diagnostics& b) {
        const double h = b.t - a.t;
        dissipation += 0.5 * h * (a.dissipation + b.dissipation);
        div1 += 0.5 * h * (a.div1_source + b.div1_source);
        result.max_lyapunov_increase =
            std::max(result.max_lyapunov_increase, b.lyapunov - a.lyapunov);
    };

    const double t_start = state.t;
    const double t_end = t_start + config.t_final;
    bool prev_is_fresh = true; // prev was computed for the current state
    for (std::size_t n = 0; n < total_steps; ++n) {
        // Times are t_start + n dt; the last step is shortened to land on t_end.
        const double target = std::min(t_start + static_cast<double>(n + 1) * dt, t_end);
        const double h = n + 1 == total_steps ? t_end - state.t : dt;
        const Diagnostics before = stepper.advance(state, h);
        state.t = n + 1 == total_steps ? t_end : target;
        if (!prev_is_fresh)
            add_piece(prev, before);
        prev = before;
        prev_is_fresh = false;
        ++result.steps;

        const bool last = n + 1 == total_steps;
        if ((n + 1) % static_cast<std::size_t>(config.record_every) == 0 || last) {
            const Diagnostics now = stepper.diagnose(state);
            add_piece(prev, now);
            prev = now;
            prev_is_fresh = true;
            const double residual = energy_balance_residual(last_record, now, dissipation);
            result.series.push_back(make_row(now, residual));
            result.div1_source.push_back(div1 / (now.t - last_record.t));
            dissipation = 0.0;
            div1 = 0.0;
            last_record = now;
            if (state.t >= kBurnIn)
                result.max_resolution_tail =
                    std::max(result.max_resolution_tail, resolution_check(state).max_tail);
        } else {
            // The next advance() reports the diagnostics of this state.
            prev_is_fresh = false;
        }
        write_due_snapshots(state.t);
    }
    if (!out_dir.empty())
        write_series(out_dir / "series.csv", result.series);
    result.final_state = std::move(state);
    return result;
}

RunResult run(const RunConfig& config, const EnergyPeriodTable* table)
{
    return run(config, initial_state(config), table);
}

void write_series(const std::filesystem::path& path, const std::vector<SeriesRow>& rows)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "t,free_energy,kinetic_energy,h1_phi,h1_v,period,balance_residual\n";
    for (const SeriesRow& r : rows)
        out << format_double(r.t) << ',' << format_double(r.free_energy) << ','
            << format_double(r.kinetic_energy) << ',' << format_double(r.h1_phi) << ','
            << format_double(r.h1_v) << ',' << format_double(r.period) << ','
            << format_double(r.balance_residual) << '\n';
    out.flush();
    check_stream(out, path);
}

std::vector<SeriesRow> read_series(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open series file " + path.string());
    std::string line;
    std::getline(in, line);
    if (trim(line) != "t,free_energy,kinetic_energy,h1_phi,h1_v,period,balance_residual")
        throw std::invalid_argument(path.string() + ": unexpected series header");
    std::vector<SeriesRow> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 7)
            throw std::invalid_argument(path.string() + ": malformed series row");
        std::array<double, 7> v{};
        for (std::size_t i = 0; i < 7; ++i)
            v[i] = std::strtod(cells[i].c_str(), nullptr);
        rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6]});
    }
    return rows;
}

void write_snapshot(const std::filesystem::path& path, const State& state)
{
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << "x,phi,v\n";
    const Grid& g = state.phi.grid;
    for (std::size_t i = 0; i < g.size(); ++i)
        out << format_double(g.x(i)) << ',' << format_double(state.phi[i]) << ','
            << format_double(state.v[i]) << '\n';
    out.flush();
    check_stream(out, path);
}

std::vector<double> read_snapshot_column(const std::filesystem::path& path,
                                         const std::string& column)
{
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open snapshot " + path.string());
    std::string line;
    std::getline(in, line);
    const auto header = split_csv_line(line);
    const auto it = std::find(header.begin(), header.end(), column);
    if (it == header.end())
        throw std::invalid_argument(path.string() + ": no column '" + column + "'");
    const auto col = static_cast<std::size_t>(it - header.begin());
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (trim(line).empty())
            continue;
        const auto cells = split_csv_line(line);
        if (cells.size() <= col)
            throw std::invalid_argument(path.string() + ": short snapshot row");
        values.push_back(std::strtod(cells[col].c_str(), nullptr));
    }
    return values;
}

} // namespace bch
