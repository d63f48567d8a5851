#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fairtree/experiment.hpp"

namespace fairtree {

/// Fixed 5-decimal rendering used for every numeric CSV cell.
std::string format_number(double value);

/// Column order of every CSV written below.
extern const std::vector<std::string> kFrontColumns;
extern const std::vector<std::string> kTraceColumns;
extern const std::vector<std::string> kSummaryColumns;
extern const std::vector<std::string> kAveragedColumns;
extern const std::vector<std::string> kEffectColumns;
extern const std::vector<std::string> kConvergenceColumns;
extern const std::vector<std::string> kCompasColumns;

std::string front_csv(const Front& front);
Front parse_front_csv(const std::string& text);

std::string traces_csv(std::uint64_t seed, const std::vector<GenerationTrace>& traces);
std::vector<GenerationTrace> parse_traces_csv(const std::string& text);

std::string summary_csv(const std::string& dataset, const std::vector<SummaryRow>& rows);
std::string tradeoff_csv(const std::vector<TradeoffRow>& rows);
std::string averaged_csv(const std::vector<AveragedFront>& fronts);
std::string effects_csv(const std::vector<EffectBin>& bins);
std::string convergence_csv(const ConvergenceReport& report);
std::string compas_csv(const std::vector<SeedResult>& seeds);

std::string read_file(const std::filesystem::path& path);
/// Creates parent directories; throws IoError on failure.
void write_file(const std::filesystem::path& path, const std::string& contents);

/// Scatter of every run's front with the averaged front and its error band.
/// One <circle class="pareto"> per Pareto point.
std::string front_svg(const std::vector<Front>& fronts, const AveragedFront& averaged, Partition partition,
                      const std::string& title, const std::vector<ObjectiveVector>& baselines = {});

/// Mean error and unfairness per generation with Q1-Q3 bands.
std::string convergence_svg(const ConvergenceReport& report, const std::string& title);

/// File names used inside an experiment output directory.
std::string front_file_name(std::uint64_t seed);
std::string trace_file_name(std::uint64_t seed);
std::string trees_file_name(std::uint64_t seed);

/// Recomputes summary, averaged fronts, effects, convergence and tradeoff
/// files from the per-seed fronts and traces found in `dir`.
void write_reports(const std::filesystem::path& dir, const std::string& dataset, const std::vector<SeedResult>& seeds);

/// Reads back per-seed fronts and traces (and COMPAS scores when present).
std::vector<SeedResult> load_results(const std::filesystem::path& dir);

/// Writes the SVG figures for the results in `dir`.
void write_plots(const std::filesystem::path& dir, const std::string& dataset, const std::vector<SeedResult>& seeds);

} // namespace fairtree
