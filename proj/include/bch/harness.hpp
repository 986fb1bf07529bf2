#pragma once

#include "bch/evans.hpp"
#include "bch/predictors.hpp"
#include "bch/solver.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bch {

struct TrialRecord {
    std::uint64_t seed;
    bool ok;
    std::string error;       // empty when ok
    std::string series_file; // empty without an output directory
};

/// Ensemble of runs differing only in the seed (trial i uses seed0 + i).
/// Means are taken pointwise over the successful trials on the shared
/// recording grid.
struct EnsembleReport {
    std::uint64_t base_seed = 0;
    std::size_t trials_requested = 0;
    std::vector<TrialRecord> trials;
    std::vector<double> t;
    std::vector<double> mean_energy;
    std::vector<double> mean_period;

    std::size_t trials_completed() const;
    bool partial() const { return trials_completed() < trials_requested; }
};

/// Runs `trials` simulations on a pool of at most `workers` threads
/// (0: one per hardware thread). Trial i writes to <out_dir>/trial_<i> when
/// the config has an output directory. A failed trial is recorded and the
/// ensemble continues. Throws std::invalid_argument for trials < 1.
EnsembleReport run_ensemble(const RunConfig& config, int trials, int workers = 0,
                            const EnergyPeriodTable* table = nullptr);

/// Langer and eigenvalue predictions overlaid on a mean energy curve, both
/// started at the spinodal handshake of that curve.
struct PredictionOverlay {
    Handshake handshake;
    std::vector<double> t; // the samples with t >= t0
    TimeSeries langer;
    TimeSeries eigenvalue;
    PredictorVariant eigenvalue_variant;
};

/// Empty series when the handshake is not reached.
PredictionOverlay overlay_predictions(const std::vector<double>& t,
                                      const std::vector<double>& energy, const Params& params,
                                      const EnergyPeriodTable& table, const EigTable& eig_table,
                                      PredictorVariant variant = PredictorVariant::eig_half);

/// First recorded time at which the period reaches `threshold`; censored at
/// the last recorded time when it never does.
struct Crossing {
    double threshold;
    double time;
    bool censored;
};

std::vector<Crossing> first_crossings(const std::vector<SeriesRow>& series,
                                      const std::vector<double>& thresholds);

struct ComparisonRow {
    double threshold;
    Crossing coupled;
    Crossing uncoupled;
    /// uncoupled time / coupled time; a lower bound when the uncoupled run is
    /// censored, NaN when the coupled run is.
    double speedup;
};

struct CompareReport {
    std::vector<ComparisonRow> rows;
    std::optional<FitResult> coupled_fit;
    std::optional<FitResult> uncoupled_fit;
    std::string coupled_fit_error;
    std::string uncoupled_fit_error;
    RunResult coupled;
    RunResult uncoupled;
};

/// Runs both configs from the same initial phase field (built from the first
/// config) and compares the first-crossing times of each period threshold.
/// The configs must agree on grid size, domain and seed. P_fit is fitted on
/// [0, min(20, t_final)].
CompareReport compare_coupled(const RunConfig& first, const RunConfig& second,
                              const std::vector<double>& thresholds = {1.12, 1.495},
                              const EnergyPeriodTable* table = nullptr);

/// Sizes of the downward jumps of a recorded energy trace: consecutive drops
/// are merged into one event and events below `min_drop` are ignored.
std::vector<double> energy_drops(const std::vector<double>& energy, double min_drop);

} // namespace bch
