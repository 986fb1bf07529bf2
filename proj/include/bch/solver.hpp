#pragma once

#include "bch/energy.hpp"
#include "bch/grid.hpp"
#include "bch/waves.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace bch {

/// Phase equation transport and momentum coupling:
///   uncoupled   phi_t = mu_xx                     (no velocity)
///   advective   phi_t + v phi_x   = mu_xx,  v_t + v v_x = nu v_xx + K mu phi_x
///   div1        phi_t + (v phi)_x = mu_xx,  v_t + v v_x = nu v_xx + K mu phi_x
///   div2        phi_t + (v phi)_x = mu_xx,  v_t + v v_x = nu v_xx - K mu_x phi
enum class Coupling { uncoupled, advective, div1, div2 };

Coupling parse_coupling(const std::string& name);
std::string to_string(Coupling c);

struct State {
    double t = 0.0;
    Field phi;
    Field v; // identically zero and unused when uncoupled
    Params params;
    Coupling coupling = Coupling::uncoupled;
    double stabilizer = 2.0; // A in the linearly stabilized splitting

    State(Field phi_, Field v_, const Params& p, Coupling c, double a);
    State(Field phi_, const Params& p, double a); // uncoupled
};

/// Quantities of one state that enter the energy balance.
struct Diagnostics {
    double t;
    double free_energy;
    double kinetic_energy; // 1/2 |v|^2
    double h1_phi;         // |phi_x|
    double h1_v;           // |v_x|
    /// nu |v_x|^2 + K |mu_x|^2 when coupled, |mu_x|^2 when uncoupled.
    double dissipation;
    /// 1/2 |v|^2 + K E when coupled, E when uncoupled.
    double lyapunov;
    /// -K <mu phi, v_x>: the source of the div1 energy balance.
    double div1_source;
    double mass; // int phi dx
};

/// One semi-implicit Euler step with reusable workspaces. The cubic is
/// evaluated by collocation and dealiased; the transport, convection and
/// coupling products are collocated without dealiasing. The phase update
/// solves (1 + dt kappa k^4 + dt A k^2) phi^{n+1} = phi^n - dt k^2 chem^n -
/// dt adv^n with chem = F'(phi) - A phi, and the velocity update divides by
/// (1 + dt nu k^2).
class Stepper {
public:
    explicit Stepper(const Grid& grid);

    /// Advances the state by dt and returns the diagnostics of the state it
    /// started from. Throws std::domain_error if dt is not positive or, when
    /// coupled, dt > dx / max(|v|, 1); throws NumericalError on non-finite
    /// results.
    Diagnostics advance(State& state, double dt);

    Diagnostics diagnose(const State& state);

private:
    void prepare(const State& state);
    Diagnostics collect(const State& state) const;

    Grid grid_;
    Spectrum phi_hat_, v_hat_, mu_hat_, work_hat_, chem_hat_, adv_hat_, rhs_hat_;
    std::vector<double> phi_x_, v_x_, mu_, mu_x_, work_, work2_;
};

/// Convenience form of Stepper::advance for single steps.
State step(const State& state, double dt);

struct ResolutionReport {
    bool resolved;
    double max_tail; // largest |coefficient| / n over modes j >= n/4, relative to max |field|
};

/// True iff every mode j >= n/4 of phi and (when coupled) v has normalized
/// amplitude below 2.2204e-16 relative to the field's largest value.
ResolutionReport resolution_check(const State& state);
ResolutionReport resolution_check(const Field& field);

/// Energy balance over a recorded interval:
/// r = (Lambda_1 - Lambda_0) / (t_1 - t_0) + (integrated dissipation) / (t_1 - t_0).
double energy_balance_residual(const Diagnostics& from, const Diagnostics& to,
                               double integrated_dissipation);

/// Plain-text configuration, `key = value` per line, `#` starts a comment.
struct RunConfig {
    Params params;
    std::optional<std::size_t> n;   // default 2048 uncoupled, 8192 coupled
    Coupling coupling = Coupling::uncoupled;
    std::optional<double> dt;       // default 1e-3 uncoupled, 1/10240 coupled
    double t_final = 1.0;
    int record_every = 10;
    std::vector<double> snapshot_times;
    std::uint64_t seed = 0;
    std::string init_phi = "random"; // random | file
    std::string init_phi_file;
    std::string init_v = "none";     // none | fourier | bump | file
    std::string init_v_file;
    int fourier_cutoff = 32;
    std::optional<double> stabilizer_A; // default 2 beta
    double sigma = 0.1;
    double energy_target_frac = 0.99;
    double energy_tol = 1e-4;
    bool pre_evolve = true;
    std::string out_dir;

    std::size_t grid_size() const;
    double time_step() const;
    double stabilizer() const;
    /// Throws std::invalid_argument on inconsistent values.
    void validate() const;
};

/// Throws std::invalid_argument on unknown keys or malformed values.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::filesystem::path& path);
/// Canonical `key = value` listing of every setting (resolved defaults).
std::string echo_config(const RunConfig& config);

struct SeriesRow {
    double t;
    double free_energy;
    double kinetic_energy;
    double h1_phi;
    double h1_v;
    double period;
    double balance_residual; // NaN on the first row
};

struct RunResult {
    std::vector<SeriesRow> series;
    State final_state;
    std::size_t steps = 0;
    /// Largest increase of the Lyapunov functional over a single step.
    double max_lyapunov_increase = 0.0;
    /// Largest relative tail amplitude over recorded states with t >= 1e-3.
    double max_resolution_tail = 0.0;
    /// Integral of the div1 source over each recorded interval divided by its
    /// length (zero unless coupling == div1), aligned with series rows.
    std::vector<double> div1_source;
    double initial_energy = 0.0; // after initialization (and pre-evolution)
    std::vector<std::string> snapshot_files;
};

/// Builds the initial state from the config (including pre-evolution for
/// random phase data).
State initial_state(const RunConfig& config);

/// Integrates to t_final from the given state, recording every
/// `record_every` steps (and the final step) and writing snapshots at the
/// configured times when out_dir is set. `table` supplies the period
/// diagnostic; it is built when absent.
RunResult run(const RunConfig& config, State state, const EnergyPeriodTable* table = nullptr);
RunResult run(const RunConfig& config, const EnergyPeriodTable* table = nullptr);

/// series.csv with header t,free_energy,kinetic_energy,h1_phi,h1_v,period,balance_residual.
void write_series(const std::filesystem::path& path, const std::vector<SeriesRow>& rows);
std::vector<SeriesRow> read_series(const std::filesystem::path& path);
/// snap_<t>.csv with header x,phi,v.
void write_snapshot(const std::filesystem::path& path, const State& state);
/// Reads one column ("phi" or "v") of a snapshot; the row count fixes n.
std::vector<double> read_snapshot_column(const std::filesystem::path& path,
                                         const std::string& column);

} // namespace bch
