#include "fairtree/nsga2.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace fairtree {

namespace {

double round_half_up(double v)
{
    return std::floor(v + 0.5);
}

} // namespace

GeneBounds GeneBounds::for_tree_limits(int max_depth, int max_leaves, std::size_t learn_size)
{
    GeneBounds b;
    b.lo = {0.0, 1.0, 2.0, 1.0, 0.0};
    b.hi = {1.0, static_cast<double>(std::max(max_depth, 1)), static_cast<double>(std::max<std::size_t>(learn_size, 2)),
            static_cast<double>(std::max(max_leaves, 1)), 1.0};
    return b;
}

double GeneBounds::clamp(std::size_t gene, double value) const
{
    return std::clamp(value, lo[gene], hi[gene]);
}

bool GeneBounds::is_integer(std::size_t gene)
{
    return gene == kDepthGene || gene == kSplitGene || gene == kLeavesGene;
}

bool Genome::within(const GeneBounds& bounds) const
{
    for (std::size_t i = 0; i < kGeneCount; ++i) {
        if (!(genes[i] >= bounds.lo[i] && genes[i] <= bounds.hi[i])) {
            return false;
        }
    }
    return true;
}

void round_integer_genes(Genome& g)
{
    for (std::size_t i = 0; i < kGeneCount; ++i) {
        if (GeneBounds::is_integer(i)) {
            g.genes[i] = round_half_up(g.genes[i]);
        }
    }
}

Hyperparameters decode(const Genome& genome, const GeneBounds& bounds, std::size_t learn_size)
{
    auto const& g = genome.genes;
    auto int_gene = [&](std::size_t i, double lo, double hi) {
        return static_cast<int>(std::clamp(round_half_up(g[i]), lo, std::max(lo, hi)));
    };
    Hyperparameters hp;
    hp.criterion = g[kCriterionGene] < 0.5 ? Criterion::gini : Criterion::entropy;
    hp.max_depth = int_gene(kDepthGene, 1.0, bounds.hi[kDepthGene]);
    hp.min_samples_split = int_gene(kSplitGene, 2.0, static_cast<double>(learn_size));
    hp.max_leaf_nodes = int_gene(kLeavesGene, 2.0, bounds.hi[kLeavesGene]);
    hp.class_weight = std::clamp(g[kWeightGene], 0.0, 1.0);
    return hp;
}

bool dominates(const Individual& a, const Individual& b)
{
    auto const& x = a.objectives;
    auto const& y = b.objectives;
    if (x == y) {
        if (a.tree_leaves != b.tree_leaves) {
            return a.tree_leaves < b.tree_leaves;
        }
        constexpr int unbounded = std::numeric_limits<int>::max();
        return a.hp.max_leaf_nodes.value_or(unbounded) < b.hp.max_leaf_nodes.value_or(unbounded);
    }
    return x.error <= y.error && x.unfairness <= y.unfairness && (x.error < y.error || x.unfairness < y.unfairness);
}

std::vector<std::vector<std::size_t>> fast_nondominated_sort(std::span<Individual> pop)
{
    auto const n = pop.size();
    std::vector<std::vector<std::size_t>> dominated(n);
    std::vector<std::size_t> dominators(n, 0);
    std::vector<std::vector<std::size_t>> fronts;
    std::vector<std::size_t> current;
    for (std::size_t p = 0; p < n; ++p) {
        for (std::size_t q = 0; q < n; ++q) {
            if (p == q) {
                continue;
            }
            if (dominates(pop[p], pop[q])) {
                dominated[p].push_back(q);
            } else if (dominates(pop[q], pop[p])) {
                ++dominators[p];
            }
        }
        if (dominators[p] == 0) {
            current.push_back(p);
        }
    }
    int rank = 1;
    while (!current.empty()) {
        std::vector<std::size_t> next;
        for (auto p : current) {
            pop[p].rank = rank;
            for (auto q : dominated[p]) {
                if (--dominators[q] == 0) {
                    next.push_back(q);
                }
            }
        }
        std::sort(next.begin(), next.end());
        fronts.push_back(std::move(current));
        current = std::move(next);
        ++rank;
    }
    return fronts;
}

void crowding_distance(std::span<Individual> pop, std::span<const std::size_t> front)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (auto i : front) {
        pop[i].crowding = 0.0;
    }
    if (front.size() <= 2) {
        for (auto i : front) {
            pop[i].crowding = inf;
        }
        return;
    }
    std::vector<std::size_t> order(front.begin(), front.end());
    for (int objective = 0; objective < 2; ++objective) {
        auto value = [&](std::size_t i) {
            return objective == 0 ? pop[i].objectives.error : pop[i].objectives.unfairness;
        };
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) < value(b); });
        pop[order.front()].crowding = inf;
        pop[order.back()].crowding = inf;
        double const span = value(order.back()) - value(order.front());
        if (!(span > 0.0)) {
            continue;
        }
        for (std::size_t k = 1; k + 1 < order.size(); ++k) {
            pop[order[k]].crowding += (value(order[k + 1]) - value(order[k - 1])) / span;
        }
    }
}

std::vector<std::vector<std::size_t>> rank_population(std::span<Individual> pop)
{
    auto fronts = fast_nondominated_sort(pop);
    for (auto const& f : fronts) {
        crowding_distance(pop, f);
    }
    return fronts;
}

const Individual& tournament_select(std::span<const Individual> pop, Rng& rng)
{
    auto const& a = pop[rng.index(pop.size())];
    auto const& b = pop[rng.index(pop.size())];
    if (a.rank != b.rank) {
        return a.rank < b.rank ? a : b;
    }
    if (a.crowding != b.crowding) {
        return a.crowding > b.crowding ? a : b;
    }
    return a;
}

std::pair<double, double> blend(double a, double b, double beta)
{
    double const mean = (a + b) / 2.0;
    double const half = beta * std::abs(a - b) / 2.0;
    double const lo = std::min(a, b);
    double const hi = std::max(a, b);
    return {std::clamp(mean + half, lo, hi), std::clamp(mean - half, lo, hi)};
}

std::pair<Genome, Genome> crossover(const Genome& a, const Genome& b, const GeneBounds& bounds, double pc, Rng& rng,
                                    CrossoverMode mode)
{
    Genome c1;
    Genome c2;
    for (std::size_t i = 0; i < kGeneCount; ++i) {
        double const u = rng.uniform();
        bool const mix = mode == CrossoverMode::blend_when_below_pc ? u <= pc : u > pc;
        if (mix) {
            auto const [x, y] = blend(a.genes[i], b.genes[i], rng.uniform());
            c1.genes[i] = x;
            c2.genes[i] = y;
        } else {
            c1.genes[i] = a.genes[i];
            c2.genes[i] = b.genes[i];
        }
    }
    for (auto* c : {&c1, &c2}) {
        for (std::size_t i = 0; i < kGeneCount; ++i) {
            c->genes[i] = bounds.clamp(i, c->genes[i]);
        }
        round_integer_genes(*c);
    }
    return {c1, c2};
}

double mutation_delta(double u, double mu)
{
    double const e = 1.0 / (mu + 1.0);
    if (u <= 0.5) {
        return -1.0 + 2.0 * std::pow(u, e);
    }
    return 1.0 - 2.0 * std::pow(1.0 - u, e);
}

double mutate_gene(double value, double lo, double hi, double u_side, double u_delta, double mu)
{
    double const delta = mutation_delta(u_delta, mu);
    if (u_side < 0.5) {
        return value + delta * (value - lo);
    }
    return value + delta * (hi - value);
}

Genome mutate(const Genome& g, const GeneBounds& bounds, double pm, double mu, Rng& rng, MutationMode mode)
{
    Genome out = g;
    auto perturb = [&](std::size_t gene) {
        double const u_side = rng.uniform();
        double const u_delta = rng.uniform();
        out.genes[gene] =
            bounds.clamp(gene, mutate_gene(out.genes[gene], bounds.lo[gene], bounds.hi[gene], u_side, u_delta, mu));
    };
    if (mode == MutationMode::per_individual) {
        if (rng.uniform() < pm) {
            perturb(static_cast<std::size_t>(rng.index(kGeneCount)));
        }
    } else {
        for (std::size_t i = 0; i < kGeneCount; ++i) {
            if (rng.uniform() < pm) {
                perturb(i);
            }
        }
    }
    round_integer_genes(out);
    return out;
}

std::vector<Individual> elitist_replacement(std::vector<Individual> parents, std::vector<Individual> offspring,
                                            std::size_t n)
{
    std::vector<Individual> pool = std::move(parents);
    pool.insert(pool.end(), std::make_move_iterator(offspring.begin()), std::make_move_iterator(offspring.end()));
    auto const fronts = rank_population(pool);

    std::vector<Individual> next;
    next.reserve(n);
    for (auto const& front : fronts) {
        if (next.size() + front.size() <= n) {
            for (auto i : front) {
                next.push_back(pool[i]);
            }
            if (next.size() == n) {
                break;
            }
            continue;
        }
        std::vector<std::size_t> order(front.begin(), front.end());
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pool[a].crowding > pool[b].crowding; });
        for (std::size_t k = 0; next.size() < n; ++k) {
            next.push_back(pool[order[k]]);
        }
        break;
    }
    return next;
}

} // namespace fairtree
