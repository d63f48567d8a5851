#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fairtree/metalearner.hpp"
#include "fairtree/objectives.hpp"

namespace fairtree {

struct ExperimentConfig {
    std::string dataset;
    std::filesystem::path schema_path;
    EAParams params;
    std::vector<std::uint64_t> seeds;
    std::filesystem::path output_dir;
    int jobs = 1;
    bool compas = false;
    CompasRule compas_rule;
    /// Also write every front tree as JSON.
    bool export_trees = true;
    /// When set, each seed saves its state here after every generation and
    /// resumes from it on the next invocation.
    std::filesystem::path checkpoint_dir;

    void validate() const;
    [[nodiscard]] std::string to_json() const;
};

/// One Pareto-optimal solution as persisted.
struct FrontPoint {
    std::uint64_t seed = 0;
    Hyperparameters hp;
    int depth = 0;
    int leaves = 0;
    ObjectiveVector validation;
    ObjectiveVector test;

    friend bool operator==(const FrontPoint&, const FrontPoint&) = default;
};

using Front = std::vector<FrontPoint>;

/// Front of a run in persisted form: sorted by validation error (then
/// unfairness descending), one point per distinct validation objective vector
/// (the first after sorting, i.e. the fewest leaves).
Front make_front(std::uint64_t seed, const RunOutput& run);

struct CompasScores {
    std::uint64_t seed = 0;
    ObjectiveVector learn;
    ObjectiveVector validation;
    ObjectiveVector test;
};

struct SeedResult {
    std::uint64_t seed = 0;
    Front front;
    std::vector<GenerationTrace> traces;
    std::optional<CompasScores> compas;
};

struct RunResult {
    ExperimentConfig config;
    std::vector<SeedResult> seeds;
};

/// Averaged distribution row (min, Q1, Q2, Q3, max, or the COMPAS baseline).
struct SummaryRow {
    std::string label;
    double error_validation = 0.0;
    double unfairness_validation = 0.0;
    double error_test = 0.0;
    double unfairness_test = 0.0;
    double depth = 0.0;
    double leaves = 0.0;
};

inline constexpr std::array<double, 5> kSummaryQuantiles{0.0, 0.25, 0.5, 0.75, 1.0};
inline constexpr std::array<const char*, 5> kSummaryLabels{"min", "Q1", "Q2", "Q3", "max"};

/// Value at fractional rank `q * (n - 1)` of already-ordered values.
double interpolate_sorted(const std::vector<double>& sorted, double q);

/// Per run: errors ascending and unfairness descending (validation and test
/// independently), depth and leaves co-located with validation error; each
/// read by linear interpolation at the five quantiles, then averaged over runs.
std::vector<SummaryRow> summarize_fronts(const std::vector<Front>& fronts);

/// Mean of the COMPAS baseline over seeds, or nothing if no seed has one.
std::optional<SummaryRow> summarize_compas(const std::vector<SeedResult>& seeds);

struct TradeoffRow {
    std::string from;
    std::string to;
    /// Relative test-error increase, in percent.
    double accuracy_lost = 0.0;
    /// Relative test-unfairness decrease, in percent.
    double fairness_gained = 0.0;
    /// Test unfairness of `to` as a percentage of `from`.
    double unfairness_ratio = 0.0;
};

TradeoffRow tradeoff(const std::vector<SummaryRow>& rows, const std::string& from, const std::string& to);

enum class Partition { validation, test };

struct AveragedPoint {
    double percentile = 0.0;
    double error = 0.0;
    double unfairness = 0.0;
    double error_q1 = 0.0;
    double error_q3 = 0.0;
};

struct AveragedFront {
    Partition partition = Partition::validation;
    std::size_t n = 0;
    std::vector<AveragedPoint> points;
};

/// n = round(mean front size); each run is read at n evenly spaced percentile
/// positions (errors ascending, unfairness descending) and averaged pointwise.
/// The error band holds the across-run Q1 and Q3 at each position.
AveragedFront averaged_pareto(const std::vector<Front>& fronts, Partition partition = Partition::validation);

/// Piecewise-linear unfairness of the averaged front at `error`; clamps
/// outside the front's error range.
double unfairness_at_error(const AveragedFront& front, double error);

struct EffectBin {
    std::string hyperparameter;
    double lo = 0.0;
    double hi = 0.0;
    std::size_t count = 0;
    double error_mean = 0.0;
    double error_std = 0.0;
    double unfairness_mean = 0.0;
    double unfairness_std = 0.0;
};

/// Test error and unfairness per value bin of each hyperparameter over all
/// Pareto points. Values with at most `max_bins` distinct levels get one bin
/// each; otherwise `max_bins` equal-width bins. Bins ascend by value.
std::vector<EffectBin> hyperparameter_effect_stats(const std::vector<Front>& fronts, std::size_t max_bins = 10);

struct ConvergenceRow {
    int generation = 0;
    double front_size = 0.0;
    double error_mean = 0.0;
    double error_q1 = 0.0;
    double error_q3 = 0.0;
    double unfairness_mean = 0.0;
    double unfairness_q1 = 0.0;
    double unfairness_q3 = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    /// First generation after which the averaged statistics never change.
    std::optional<int> converged_at;
};

ConvergenceReport convergence_report(const std::vector<std::vector<GenerationTrace>>& traces);

/// Loads data, then per seed: split, run, persist. Writes all outputs under
/// cfg.output_dir and returns what was written.
RunResult run_experiment(const ExperimentConfig& cfg, std::ostream* log = nullptr);

} // namespace fairtree
