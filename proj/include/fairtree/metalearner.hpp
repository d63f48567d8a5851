#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairtree/cart.hpp"
#include "fairtree/dataset.hpp"
#include "fairtree/nsga2.hpp"
#include "fairtree/random.hpp"

namespace fairtree {

struct EAParams {
    int generations = 300;
    int population = 50;
    double pc = 1.0;
    double pm = 0.3;
    double mu = 5.0;
    std::uint64_t seed = 0;
    CrossoverMode crossover_mode = CrossoverMode::blend_when_below_pc;
    MutationMode mutation_mode = MutationMode::per_individual;

    /// Throws ConfigError unless G >= 1, N >= 4 and even, pc, pm in [0,1], mu > 0.
    void validate() const;
};

/// Validation-objective summary of the non-dominated set after one generation.
struct GenerationTrace {
    int generation = 0;
    std::size_t front_size = 0;
    double error_mean = 0.0;
    double error_q1 = 0.0;
    double error_q3 = 0.0;
    double unfairness_mean = 0.0;
    double unfairness_q1 = 0.0;
    double unfairness_q3 = 0.0;
    /// Minima over the whole population.
    double error_min = 0.0;
    double unfairness_min = 0.0;
};

/// Linear-interpolation quantile (numpy's default) of an unsorted sample.
double quantile(std::vector<double> values, double q);

/// Trains every individual's decoded tree on `learn` and fills objectives,
/// depth and leaves from `validation`. Runs on up to `jobs` OpenMP threads;
/// results do not depend on `jobs`. Errors are rethrown for the lowest index.
void evaluate_individuals(std::span<Individual> individuals, const TrainingSet& learn,
                          const EncodedDataset& validation, int jobs);

/// Single-threaded loop kept as the reference for evaluate_individuals().
void evaluate_individuals_serial(std::span<Individual> individuals, const TrainingSet& learn,
                                 const EncodedDataset& validation);

struct InitialPopulation {
    std::vector<Individual> individuals;
    GeneBounds bounds;
    /// Depth and leaves of the unconstrained default tree before flooring.
    int default_depth = 0;
    int default_leaves = 0;
};

/// First individual: the default (gini, unbounded, 2, unbounded, 0.5) tree,
/// whose depth D and leaf count L fix the gene bounds. Second: (entropy, D, 2,
/// L, 0.5). The rest are uniform within the bounds. Returned individuals have
/// genomes and decoded hyperparameters but are not yet evaluated.
InitialPopulation initialize_population(const TrainingSet& learn, std::size_t n, Rng& rng);

/// Resumable run state, written after a completed generation.
struct Checkpoint {
    int generation = 0;
    std::uint64_t seed = 0;
    GeneBounds bounds;
    std::vector<Genome> genomes;
    std::vector<int> ranks;
    std::vector<double> crowding;
    std::vector<GenerationTrace> traces;
    std::string rng_state;

    [[nodiscard]] std::string to_json() const;
    static Checkpoint from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static Checkpoint load(const std::filesystem::path& path);
};

struct RunOptions {
    int jobs = 1;
    /// Called after every generation with the state needed to resume.
    std::function<void(const Checkpoint&)> on_checkpoint;
    /// Continue from this state instead of initializing.
    std::optional<Checkpoint> resume;
};

struct RunOutput {
    /// Non-dominated individuals of the final population (validation objectives).
    std::vector<Individual> front;
    /// Objectives of `front` on the test partition, index-aligned.
    std::vector<ObjectiveVector> test_objectives;
    std::vector<GenerationTrace> traces;
    GeneBounds bounds;
};

/// The evolve-train-evaluate loop. Fitness is measured on validation only;
/// test is evaluated once on the returned front.
RunOutput run(const SplitBundle& split, const EAParams& params, const RunOptions& options = {});

} // namespace fairtree
