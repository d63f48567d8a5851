#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "fairtree/cart.hpp"
#include "fairtree/objectives.hpp"
#include "fairtree/random.hpp"

namespace fairtree {

inline constexpr std::size_t kGeneCount = 5;

/// Gene positions in the chromosome.
enum Gene : std::size_t {
    kCriterionGene = 0,
    kDepthGene = 1,
    kSplitGene = 2,
    kLeavesGene = 3,
    kWeightGene = 4,
};

/// Per-gene [lo, hi] intervals, fixed for a whole run.
struct GeneBounds {
    std::array<double, kGeneCount> lo{};
    std::array<double, kGeneCount> hi{};

    /// Bounds implied by the unconstrained first tree: depth in [1, max_depth],
    /// min_samples_split in [2, learn_size], max_leaf_nodes in [1, max_leaves].
    static GeneBounds for_tree_limits(int max_depth, int max_leaves, std::size_t learn_size);

    [[nodiscard]] double clamp(std::size_t gene, double value) const;
    [[nodiscard]] static bool is_integer(std::size_t gene);
};

struct Genome {
    std::array<double, kGeneCount> genes{};

    [[nodiscard]] bool within(const GeneBounds& bounds) const;
    friend bool operator==(const Genome&, const Genome&) = default;
};

/// Rounds half-up every integer-coded gene.
void round_integer_genes(Genome& g);

/// criterion: gini if gene < 0.5; integer genes rounded half-up, then clamped to
/// depth [1, D], split [2, learn_size], leaves [2, L]; class_weight = gene.
Hyperparameters decode(const Genome& genome, const GeneBounds& bounds, std::size_t learn_size);

struct Individual {
    Genome genome;
    Hyperparameters hp;
    ObjectiveVector objectives;
    int tree_depth = 0;
    int tree_leaves = 0;
    int rank = 0;
    double crowding = 0.0;
    std::shared_ptr<const DecisionTree> tree;
};

/// Pareto domination on (error, unfairness). Exactly equal objective vectors
/// fall back to fewer tree leaves, then to the lower max_leaf_nodes setting.
bool dominates(const Individual& a, const Individual& b);

/// Ordered fronts of indices into `pop`; front 0 is non-dominated. Sets rank
/// (1-based) on every individual.
std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<Individual> pop);

/// Crowding distance of each member of `front` (indices into `pop`), stored in
/// Individual::crowding. Boundary members get +infinity.
void crowding_distance(std::span<Individual> pop, std::span<const std::size_t> front);

/// Ranks `pop` and assigns crowding within each front.
std::vector<std::vector<std::size_t>> rank_population(std::span<Individual> pop);

/// Binary tournament: lower rank wins, then larger crowding, then the first drawn.
const Individual& tournament_select(std::span<const Individual> pop, Rng& rng);

/// Mean plus/minus beta times half the absolute difference.
std::pair<double, double> blend(double a, double b, double beta);

enum class CrossoverMode {
    /// u <= pc blends the gene; otherwise parents' values are copied.
    blend_when_below_pc,
    /// The literal ordering: u <= pc copies, otherwise blends.
    copy_when_below_pc,
};

/// Per-gene blend crossover; children are clamped and integer genes rounded.
std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, const GeneBounds& bounds, double pc, Rng& rng,
                                    CrossoverMode mode = CrossoverMode::blend_when_below_pc);

/// -1 + 2 u^(1/(mu+1)) for u <= 0.5, else 1 - 2 (1-u)^(1/(mu+1)).
double mutation_delta(double u, double mu);

/// One gene perturbation given the two uniform draws, before clamping.
double mutate_gene(double value, double lo, double hi, double u_side, double u_delta, double mu);

enum class MutationMode {
    /// With probability pm, one uniformly chosen gene is perturbed.
    per_individual,
    /// Every gene is perturbed independently with probability pm.
    per_gene,
};

Genome mutate(const Genome& g, const GeneBounds& bounds, double pm, double mu, Rng& rng,
              MutationMode mode = MutationMode::per_individual);

/// Keeps `n` of parents + offspring: whole fronts while they fit, the last one
/// truncated by descending crowding. Returned individuals carry the rank and
/// crowding computed on the union.
std::vector<Individual> elitist_replacement(std::vector<Individual> parents, std::vector<Individual> offspring,
                                            std::size_t n);

} // namespace fairtree
