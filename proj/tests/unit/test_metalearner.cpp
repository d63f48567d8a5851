#include <doctest.h>

#include <string>

#include "fairtree/error.hpp"
#include "fairtree/metalearner.hpp"
#include "support.hpp"

using namespace fairtree;

namespace {

SplitBundle synthetic_split(std::uint64_t seed, std::size_t n = 400)
{
    Rng rng(seed);
    return split_for_objectives(testing::random_dataset(rng, n, 4), seed);
}

EAParams small_params(int generations, int population, std::uint64_t seed = 1)
{
    EAParams p;
    p.generations = generations;
    p.population = population;
    p.seed = seed;
    return p;
}

void check_mutually_nondominated(const std::vector<Individual>& front)
{
    for (std::size_t i = 0; i < front.size(); ++i) {
        for (std::size_t j = 0; j < front.size(); ++j) {
            if (i != j) {
                CHECK_FALSE(dominates(front[i], front[j]));
            }
        }
    }
}

bool same_outputs(const RunOutput& a, const RunOutput& b)
{
    if (a.front.size() != b.front.size() || a.traces.size() != b.traces.size()) {
        return false;
    }
    for (std::size_t i = 0; i < a.front.size(); ++i) {
        if (!(a.front[i].genome == b.front[i].genome) || !(a.front[i].objectives == b.front[i].objectives) ||
            !(a.test_objectives[i] == b.test_objectives[i])) {
            return false;
        }
    }
    for (std::size_t g = 0; g < a.traces.size(); ++g) {
        auto const& x = a.traces[g];
        auto const& y = b.traces[g];
        if (x.generation != y.generation || x.front_size != y.front_size || x.error_mean != y.error_mean ||
            x.unfairness_mean != y.unfairness_mean || x.error_min != y.error_min ||
            x.unfairness_min != y.unfairness_min || x.error_q1 != y.error_q1 || x.unfairness_q3 != y.unfairness_q3) {
            return false;
        }
    }
    return true;
}

} // namespace

TEST_SUITE("metalearner")
{
    TEST_CASE("quantile interpolates like numpy")
    {
        CHECK(quantile({4, 1, 3, 2}, 0.25) == doctest::Approx(1.75));
        CHECK(quantile({4, 1, 3, 2}, 0.75) == doctest::Approx(3.25));
        CHECK(quantile({7}, 0.3) == 7.0);
        CHECK_THROWS_AS(quantile({}, 0.5), DataError);
    }

    TEST_CASE("parameter validation")
    {
        CHECK_NOTHROW(EAParams{}.validate());
        CHECK_THROWS_AS(small_params(0, 4).validate(), ConfigError);
        CHECK_THROWS_AS(small_params(1, 5).validate(), ConfigError);
        CHECK_THROWS_AS(small_params(1, 2).validate(), ConfigError);
        auto p = small_params(1, 4);
        p.pm = 1.5;
        CHECK_THROWS_AS(p.validate(), ConfigError);
    }

    TEST_CASE("initial population is anchored on the default tree")
    {
        auto const split = synthetic_split(3);
        TrainingSet const learn(split.learn);
        Rng rng(1);
        auto const init = initialize_population(learn, 20, rng);
        REQUIRE(init.individuals.size() == 20);
        auto const full = train_tree(learn, Hyperparameters{});
        CHECK(init.default_depth == full.depth());
        CHECK(init.default_leaves == full.leaf_count());

        auto const& first = init.individuals[0].hp;
        CHECK(first.criterion == Criterion::gini);
        CHECK(first.max_depth == full.depth());
        CHECK(first.min_samples_split == 2);
        CHECK(first.max_leaf_nodes == full.leaf_count());
        CHECK(first.class_weight == 0.5);
        CHECK(init.individuals[1].hp.criterion == Criterion::entropy);
        CHECK(init.bounds.hi[kDepthGene] == full.depth());
        CHECK(init.bounds.hi[kLeavesGene] == full.leaf_count());
        CHECK(init.bounds.hi[kSplitGene] == static_cast<double>(split.learn.rows()));

        // the capped first tree is the unconstrained one
        CHECK(train_tree(learn, first).same_structure(full));
        for (auto const& ind : init.individuals) {
            CHECK(ind.genome.within(init.bounds));
        }
    }

    TEST_CASE("parallel evaluation equals the serial loop")
    {
        auto const split = synthetic_split(4);
        TrainingSet const learn(split.learn);
        Rng rng(2);
        auto a = initialize_population(learn, 24, rng).individuals;
        auto b = a;
        evaluate_individuals(a, learn, split.validation, 8);
        evaluate_individuals_serial(b, learn, split.validation);
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].objectives == b[i].objectives);
            CHECK(a[i].tree_leaves == b[i].tree_leaves);
            CHECK(a[i].tree_depth == a[i].tree->depth());
            CHECK(a[i].tree_leaves == a[i].tree->leaf_count());
        }
    }

    TEST_CASE("evaluation errors name the individual and keep their type")
    {
        auto const split = synthetic_split(5);
        TrainingSet const learn(split.learn);
        Rng rng(3);
        auto pop = initialize_population(learn, 8, rng).individuals;
        auto bad = split.validation;
        std::fill(bad.z.begin(), bad.z.end(), 0);
        try {
            evaluate_individuals(pop, learn, bad, 4);
            FAIL("expected a RateError");
        } catch (const RateError& e) {
            CHECK(std::string(e.what()).find("individual 0") != std::string::npos);
        }
    }

    TEST_CASE("smoke run returns a non-dominated front with test scores")
    {
        auto const split = synthetic_split(6, 120);
        auto const out = run(split, small_params(1, 4));
        REQUIRE_FALSE(out.front.empty());
        CHECK(out.test_objectives.size() == out.front.size());
        CHECK(out.traces.size() == 1);
        check_mutually_nondominated(out.front);
        for (auto const& ind : out.front) {
            CHECK(ind.rank == 1);
            CHECK(ind.tree_depth == ind.tree->depth());
            CHECK(ind.tree_leaves == ind.tree->leaf_count());
            CHECK(evaluate(*ind.tree, split.validation) == ind.objectives);
        }
    }

    TEST_CASE("population minima never get worse")
    {
        for (std::uint64_t seed : {1, 2, 3}) {
            auto const split = synthetic_split(seed + 10);
            auto const out = run(split, small_params(25, 12, seed));
            REQUIRE(out.traces.size() == 25);
            for (std::size_t g = 1; g < out.traces.size(); ++g) {
                CHECK(out.traces[g].error_min <= out.traces[g - 1].error_min);
                CHECK(out.traces[g].unfairness_min <= out.traces[g - 1].unfairness_min);
                CHECK(out.traces[g].generation == static_cast<int>(g + 1));
            }
            check_mutually_nondominated(out.front);
        }
    }

    TEST_CASE("thread count does not change results")
    {
        auto const split = synthetic_split(7);
        RunOptions one;
        one.jobs = 1;
        RunOptions many;
        many.jobs = 8;
        CHECK(same_outputs(run(split, small_params(8, 16), one), run(split, small_params(8, 16), many)));
    }

    TEST_CASE("resuming from a checkpoint reproduces the uninterrupted run")
    {
        auto const split = synthetic_split(8);
        auto const params = small_params(10, 12, 5);
        std::optional<Checkpoint> saved;
        RunOptions options;
        options.on_checkpoint = [&](const Checkpoint& c) {
            if (c.generation == 4) {
                saved = c;
            }
        };
        auto const full = run(split, params, options);
        REQUIRE(saved);

        auto const dir = testing::scratch_dir("checkpoint");
        saved->save(dir / "state.json");
        auto const loaded = Checkpoint::load(dir / "state.json");
        CHECK(loaded.to_json() == saved->to_json());

        RunOptions resume;
        resume.resume = loaded;
        CHECK(same_outputs(run(split, params, resume), full));

        auto wrong = params;
        wrong.seed = 6;
        CHECK_THROWS_AS(run(split, wrong, resume), ConfigError);
    }
}
