#include "fairtree/metalearner.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "fairtree/error.hpp"

namespace fairtree {

namespace {

constexpr std::uint64_t kEvolutionStream = 0x65766f6c7665ULL;

std::exception_ptr with_context(const std::string& context)
{
    try {
        throw;
    } catch (const RateError& e) {
        return std::make_exception_ptr(RateError(context + e.what()));
    } catch (const TrainingError& e) {
        return std::make_exception_ptr(TrainingError(context + e.what()));
    } catch (const PredictionError& e) {
        return std::make_exception_ptr(PredictionError(context + e.what()));
    } catch (const std::exception& e) {
        return std::make_exception_ptr(std::runtime_error(context + e.what()));
    }
}

void evaluate_one(Individual& ind, const TrainingSet& learn, const EncodedDataset& validation)
{
    auto tree = std::make_shared<DecisionTree>(train_tree(learn, ind.hp));
    ind.objectives = evaluate(*tree, validation);
    ind.tree_depth = tree->depth();
    ind.tree_leaves = tree->leaf_count();
    ind.tree = std::move(tree);
}

GenerationTrace make_trace(int generation, const std::vector<Individual>& pop)
{
    GenerationTrace t;
    t.generation = generation;
    std::vector<double> errors;
    std::vector<double> unfairness;
    t.error_min = std::numeric_limits<double>::infinity();
    t.unfairness_min = std::numeric_limits<double>::infinity();
    for (auto const& ind : pop) {
        t.error_min = std::min(t.error_min, ind.objectives.error);
        t.unfairness_min = std::min(t.unfairness_min, ind.objectives.unfairness);
        if (ind.rank == 1) {
            errors.push_back(ind.objectives.error);
            unfairness.push_back(ind.objectives.unfairness);
        }
    }
    t.front_size = errors.size();
    auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); };
    t.error_mean = mean(errors);
    t.unfairness_mean = mean(unfairness);
    t.error_q1 = quantile(errors, 0.25);
    t.error_q3 = quantile(errors, 0.75);
    t.unfairness_q1 = quantile(unfairness, 0.25);
    t.unfairness_q3 = quantile(unfairness, 0.75);
    return t;
}

} // namespace

void EAParams::validate() const
{
    if (generations < 1) {
        throw ConfigError("generations must be at least 1");
    }
    if (population < 4 || population % 2 != 0) {
        throw ConfigError("population must be even and at least 4");
    }
    if (!(pc >= 0.0 && pc <= 1.0) || !(pm >= 0.0 && pm <= 1.0)) {
        throw ConfigError("pc and pm must lie in [0, 1]");
    }
    if (!(mu > 0.0)) {
        throw ConfigError("mu must be positive");
    }
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty()) {
        throw DataError("quantile of an empty sample");
    }
    std::sort(values.begin(), values.end());
    double const pos = q * static_cast<double>(values.size() - 1);
    auto const lo = static_cast<std::size_t>(std::floor(pos));
    auto const hi = std::min(lo + 1, values.size() - 1);
    double const frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

void evaluate_individuals(std::span<Individual> individuals, const TrainingSet& learn,
                          const EncodedDataset& validation, int jobs)
{
    auto const n = static_cast<std::ptrdiff_t>(individuals.size());
    std::vector<std::exception_ptr> errors(individuals.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(jobs, 1))
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        try {
            evaluate_one(individuals[static_cast<std::size_t>(i)], learn, validation);
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = with_context("individual " + std::to_string(i) + ": ");
        }
    }
    for (auto const& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

void evaluate_individuals_serial(std::span<Individual> individuals, const TrainingSet& learn,
                                 const EncodedDataset& validation)
{
    for (std::size_t i = 0; i < individuals.size(); ++i) {
        try {
            evaluate_one(individuals[i], learn, validation);
        } catch (...) {
            std::rethrow_exception(with_context("individual " + std::to_string(i) + ": "));
        }
    }
}

InitialPopulation initialize_population(const TrainingSet& learn, std::size_t n, Rng& rng)
{
    auto const learn_size = learn.data().rows();
    Hyperparameters defaults;
    DecisionTree first;
    try {
        first = train_tree(learn, defaults);
    } catch (const std::exception& e) {
        throw TrainingError(std::string("initialization: default tree failed: ") + e.what());
    }

    InitialPopulation out;
    out.default_depth = first.depth();
    out.default_leaves = first.leaf_count();
    // keep a searchable space when the default tree is degenerate
    int const d = std::max(first.depth(), 2);
    int const l = std::max(first.leaf_count(), 3);
    out.bounds = GeneBounds::for_tree_limits(d, l, learn_size);
    auto const& b = out.bounds;

    for (std::size_t j = 0; j < n; ++j) {
        Genome g;
        if (j == 0) {
            g.genes = {0.0, static_cast<double>(d), 2.0, static_cast<double>(l), 0.5};
        } else if (j == 1) {
            g.genes = {1.0, static_cast<double>(d), 2.0, static_cast<double>(l), 0.5};
        } else {
            for (std::size_t i = 0; i < kGeneCount; ++i) {
                g.genes[i] = rng.uniform(b.lo[i], b.hi[i]);
            }
            round_integer_genes(g);
        }
        Individual ind;
        ind.genome = g;
        ind.hp = decode(g, b, learn_size);
        out.individuals.push_back(std::move(ind));
    }
    return out;
}

std::string Checkpoint::to_json() const
{
    nlohmann::ordered_json j;
    j["generation"] = generation;
    j["seed"] = seed;
    j["bounds"] = {{"lo", bounds.lo}, {"hi", bounds.hi}};
    auto& genomes_json = j["genomes"] = nlohmann::ordered_json::array();
    for (auto const& g : genomes) {
        genomes_json.push_back(g.genes);
    }
    j["ranks"] = ranks;
    auto& crowd = j["crowding"] = nlohmann::ordered_json::array();
    for (auto c : crowding) {
        if (std::isinf(c)) {
            crowd.push_back(nullptr);
        } else {
            crowd.push_back(c);
        }
    }
    auto& tr = j["traces"] = nlohmann::ordered_json::array();
    for (auto const& t : traces) {
        tr.push_back({t.generation, t.front_size, t.error_mean, t.error_q1, t.error_q3, t.unfairness_mean,
                      t.unfairness_q1, t.unfairness_q3, t.error_min, t.unfairness_min});
    }
    j["rng"] = rng_state;
    return j.dump(1);
}

Checkpoint Checkpoint::from_json(const std::string& text)
{
    Checkpoint c;
    try {
        auto const j = nlohmann::json::parse(text);
        c.generation = j.at("generation").get<int>();
        c.seed = j.at("seed").get<std::uint64_t>();
        c.bounds.lo = j.at("bounds").at("lo").get<std::array<double, kGeneCount>>();
        c.bounds.hi = j.at("bounds").at("hi").get<std::array<double, kGeneCount>>();
        for (auto const& g : j.at("genomes")) {
            c.genomes.push_back(Genome{g.get<std::array<double, kGeneCount>>()});
        }
        c.ranks = j.at("ranks").get<std::vector<int>>();
        for (auto const& v : j.at("crowding")) {
            c.crowding.push_back(v.is_null() ? std::numeric_limits<double>::infinity() : v.get<double>());
        }
        for (auto const& t : j.at("traces")) {
            GenerationTrace g;
            g.generation = t.at(0).get<int>();
            g.front_size = t.at(1).get<std::size_t>();
            g.error_mean = t.at(2).get<double>();
            g.error_q1 = t.at(3).get<double>();
            g.error_q3 = t.at(4).get<double>();
            g.unfairness_mean = t.at(5).get<double>();
            g.unfairness_q1 = t.at(6).get<double>();
            g.unfairness_q3 = t.at(7).get<double>();
            g.error_min = t.at(8).get<double>();
            g.unfairness_min = t.at(9).get<double>();
            c.traces.push_back(g);
        }
        c.rng_state = j.at("rng").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("malformed checkpoint: ") + e.what());
    }
    if (c.ranks.size() != c.genomes.size() || c.crowding.size() != c.genomes.size()) {
        throw ConfigError("malformed checkpoint: population arrays differ in length");
    }
    return c;
}

void Checkpoint::save(const std::filesystem::path& path) const
{
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!(out << to_json())) {
            throw IoError("cannot write checkpoint " + path.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint Checkpoint::load(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read checkpoint " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

RunOutput run(const SplitBundle& split, const EAParams& params, const RunOptions& options)
{
    params.validate();
    auto const n = static_cast<std::size_t>(params.population);
    TrainingSet const learn(split.learn);
    Rng rng({params.seed, kEvolutionStream});

    auto evaluate_all = [&](std::vector<Individual>& pop, int generation) {
        try {
            evaluate_individuals(pop, learn, split.validation, options.jobs);
        } catch (...) {
            std::rethrow_exception(with_context("generation " + std::to_string(generation) + ", "));
        }
    };

    RunOutput out;
    std::vector<Individual> pop;
    int first_generation = 1;
    if (options.resume) {
        auto const& cp = *options.resume;
        if (cp.seed != params.seed) {
            throw ConfigError("checkpoint was written for seed " + std::to_string(cp.seed));
        }
        if (cp.genomes.size() != n) {
            throw ConfigError("checkpoint population size does not match the parameters");
        }
        out.bounds = cp.bounds;
        for (std::size_t i = 0; i < n; ++i) {
            Individual ind;
            ind.genome = cp.genomes[i];
            ind.hp = decode(ind.genome, out.bounds, split.learn.rows());
            pop.push_back(std::move(ind));
        }
        evaluate_all(pop, cp.generation);
        for (std::size_t i = 0; i < n; ++i) {
            pop[i].rank = cp.ranks[i];
            pop[i].crowding = cp.crowding[i];
        }
        out.traces = cp.traces;
        rng.restore(cp.rng_state);
        first_generation = cp.generation + 1;
    } else {
        auto init = initialize_population(learn, n, rng);
        out.bounds = init.bounds;
        pop = std::move(init.individuals);
        evaluate_all(pop, 0);
        rank_population(pop);
    }

    for (int k = first_generation; k <= params.generations; ++k) {
        std::vector<Individual> offspring;
        offspring.reserve(n);
        while (offspring.size() < n) {
            auto const& pa = tournament_select(pop, rng);
            auto const& pb = tournament_select(pop, rng);
            auto [c1, c2] = crossover(pa.genome, pb.genome, out.bounds, params.pc, rng, params.crossover_mode);
            for (auto const& child : {c1, c2}) {
                Individual ind;
                ind.genome = mutate(child, out.bounds, params.pm, params.mu, rng, params.mutation_mode);
                ind.hp = decode(ind.genome, out.bounds, split.learn.rows());
                offspring.push_back(std::move(ind));
            }
        }
        evaluate_all(offspring, k);
        pop = elitist_replacement(std::move(pop), std::move(offspring), n);
        out.traces.push_back(make_trace(k, pop));

        if (options.on_checkpoint) {
            Checkpoint cp;
            cp.generation = k;
            cp.seed = params.seed;
            cp.bounds = out.bounds;
            for (auto const& ind : pop) {
                cp.genomes.push_back(ind.genome);
                cp.ranks.push_back(ind.rank);
                cp.crowding.push_back(ind.crowding);
            }
            cp.traces = out.traces;
            cp.rng_state = rng.state();
            options.on_checkpoint(cp);
        }
    }

    for (auto& ind : pop) {
        if (ind.rank == 1) {
            out.test_objectives.push_back(evaluate(*ind.tree, split.test));
            out.front.push_back(std::move(ind));
        }
    }
    return out;
}

} // namespace fairtree
