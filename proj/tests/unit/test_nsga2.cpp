#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>
#include <limits>

#include "fairtree/nsga2.hpp"
#include "support.hpp"

using namespace fairtree;
using testing::scored;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::vector<std::size_t>> brute_force_fronts(const std::vector<Individual>& pop)
{
    std::vector<std::size_t> remaining(pop.size());
    std::iota(remaining.begin(), remaining.end(), std::size_t{0});
    std::vector<std::vector<std::size_t>> fronts;
    while (!remaining.empty()) {
        std::vector<std::size_t> front;
        std::vector<std::size_t> rest;
        for (auto i : remaining) {
            bool beaten = false;
            for (auto j : remaining) {
                beaten = beaten || (i != j && dominates(pop[j], pop[i]));
            }
            (beaten ? rest : front).push_back(i);
        }
        fronts.push_back(front);
        remaining = rest;
    }
    return fronts;
}

GeneBounds sample_bounds()
{
    return GeneBounds::for_tree_limits(12, 80, 500);
}

Genome random_genome(Rng& rng, const GeneBounds& b)
{
    Genome g;
    for (std::size_t i = 0; i < kGeneCount; ++i) {
        g.genes[i] = rng.uniform(b.lo[i], b.hi[i]);
    }
    round_integer_genes(g);
    return g;
}

} // namespace

TEST_SUITE("nsga2")
{
    TEST_CASE("decode")
    {
        auto const b = sample_bounds();
        Genome g{{0.0, 12, 2, 80, 0.5}};
        auto hp = decode(g, b, 500);
        CHECK(hp.criterion == Criterion::gini);
        CHECK(hp.max_depth == 12);
        CHECK(hp.min_samples_split == 2);
        CHECK(hp.max_leaf_nodes == 80);
        CHECK(hp.class_weight == 0.5);

        g.genes[kCriterionGene] = 0.7;
        g.genes[kLeavesGene] = 1.2;
        hp = decode(g, b, 500);
        CHECK(hp.criterion == Criterion::entropy);
        CHECK(hp.max_leaf_nodes == 2);

        g.genes[kCriterionGene] = 0.5;
        g.genes[kDepthGene] = 2.5;
        g.genes[kSplitGene] = 900;
        hp = decode(g, b, 500);
        CHECK(hp.criterion == Criterion::entropy);
        CHECK(hp.max_depth == 3);
        CHECK(hp.min_samples_split == 500);
    }

    TEST_CASE("domination with the leaf tie-break")
    {
        CHECK(dominates(scored(0.2, 0.1), scored(0.3, 0.2)));
        CHECK_FALSE(dominates(scored(0.3, 0.2), scored(0.2, 0.1)));
        CHECK_FALSE(dominates(scored(0.2, 0.3), scored(0.3, 0.2)));
        CHECK_FALSE(dominates(scored(0.3, 0.2), scored(0.2, 0.3)));
        CHECK(dominates(scored(0.2, 0.2, 5), scored(0.2, 0.2, 8)));
        CHECK_FALSE(dominates(scored(0.2, 0.2, 8), scored(0.2, 0.2, 5)));
        CHECK(dominates(scored(0.2, 0.2, 5, 6), scored(0.2, 0.2, 5, 9)));
        CHECK_FALSE(dominates(scored(0.2, 0.2, 5, 6), scored(0.2, 0.2, 5, 6)));
    }

    TEST_CASE("non-dominated sort simple shapes")
    {
        std::vector<Individual> flat{scored(0.1, 0.9), scored(0.5, 0.5), scored(0.9, 0.1)};
        auto fronts = fast_nondominated_sort(flat);
        CHECK(fronts.size() == 1);

        std::vector<Individual> chain{scored(0.4, 0.4), scored(0.1, 0.1), scored(0.3, 0.3), scored(0.2, 0.2)};
        fronts = fast_nondominated_sort(chain);
        REQUIRE(fronts.size() == 4);
        CHECK(fronts[0] == std::vector<std::size_t>{1});
        CHECK(fronts[3] == std::vector<std::size_t>{0});
        CHECK(chain[0].rank == 4);
    }

    TEST_CASE("non-dominated sort matches repeated filtering")
    {
        Rng rng(31);
        for (int trial = 0; trial < 200; ++trial) {
            auto const n = 1 + rng.index(30);
            std::vector<Individual> pop;
            for (std::size_t i = 0; i < n; ++i) {
                if (i > 0 && rng.uniform() < 0.1) {
                    auto copy = pop[rng.index(i)];
                    copy.tree_leaves = 2 + static_cast<int>(rng.index(4));
                    pop.push_back(copy);
                } else {
                    pop.push_back(scored(std::round(rng.uniform() * 20) / 20, std::round(rng.uniform() * 20) / 20,
                                         2 + static_cast<int>(rng.index(4)), 2 + static_cast<int>(rng.index(3))));
                }
            }
            auto const expected = brute_force_fronts(pop);
            CHECK(fast_nondominated_sort(pop) == expected);
        }
    }

    TEST_CASE("crowding distance")
    {
        std::vector<Individual> pop{scored(0, 1), scored(0.5, 0.5), scored(1, 0)};
        std::vector<std::size_t> const front{0, 1, 2};
        crowding_distance(pop, front);
        CHECK(pop[0].crowding == kInf);
        CHECK(pop[2].crowding == kInf);
        CHECK(pop[1].crowding == doctest::Approx(2.0));

        std::vector<Individual> pair{scored(0.1, 0.2), scored(0.2, 0.1)};
        crowding_distance(pair, std::vector<std::size_t>{0, 1});
        CHECK(pair[0].crowding == kInf);
        CHECK(pair[1].crowding == kInf);

        std::vector<Individual> same{scored(0.3, 0.1), scored(0.3, 0.2), scored(0.3, 0.3), scored(0.3, 0.4)};
        crowding_distance(same, std::vector<std::size_t>{0, 1, 2, 3});
        CHECK(std::isfinite(same[1].crowding));
        CHECK(same[1].crowding == doctest::Approx(2.0 / 3.0));
    }

    TEST_CASE("tournament")
    {
        std::vector<Individual> pop{scored(0.1, 0.1), scored(0.2, 0.2)};
        pop[0].rank = 1;
        pop[1].rank = 2;
        Rng rng(4);
        Rng mirror(4);
        for (int i = 0; i < 50; ++i) {
            auto const a = mirror.index(2);
            auto const b = mirror.index(2);
            CHECK(&tournament_select(pop, rng) == &pop[a == 0 || b == 0 ? 0 : 1]);
        }

        pop[1].rank = 1;
        pop[0].crowding = kInf;
        pop[1].crowding = 0.4;
        Rng r1(9);
        Rng r2(9);
        for (int i = 0; i < 50; ++i) {
            auto const a = r2.index(2);
            auto const b = r2.index(2);
            auto const& w = tournament_select(pop, r1);
            CHECK(&w == &pop[a == 0 || b == 0 ? 0 : 1]);
        }

        pop[0].crowding = 0.4;
        Rng r3(12);
        Rng r4(12);
        for (int i = 0; i < 50; ++i) {
            auto const first = r4.index(2);
            r4.index(2);
            CHECK(&tournament_select(pop, r3) == &pop[first]);
        }
    }

    TEST_CASE("blend crossover")
    {
        auto [a, b] = blend(2, 6, 0.5);
        CHECK(a == 5.0);
        CHECK(b == 3.0);
        std::tie(a, b) = blend(2, 6, 0.0);
        CHECK(a == 4.0);
        CHECK(b == 4.0);
        std::tie(a, b) = blend(3, 3, 0.8);
        CHECK(a == 3.0);
        CHECK(b == 3.0);

        auto const bounds = sample_bounds();
        Rng rng(6);
        for (int i = 0; i < 1000; ++i) {
            auto const p = random_genome(rng, bounds);
            auto const [c1, c2] = crossover(p, p, bounds, 1.0, rng);
            CHECK(c1 == p);
            CHECK(c2 == p);
        }

        auto const pa = random_genome(rng, bounds);
        auto const pb = random_genome(rng, bounds);
        auto const [k1, k2] = crossover(pa, pb, bounds, 1.0, rng, CrossoverMode::copy_when_below_pc);
        CHECK(k1 == pa);
        CHECK(k2 == pb);
    }

    TEST_CASE("mutation perturbation factor")
    {
        CHECK(mutation_delta(0.0, 5) == -1.0);
        CHECK(mutation_delta(1.0, 5) == 1.0);
        // the two branches do not meet at 0.5
        CHECK(mutation_delta(0.5, 5) == doctest::Approx(-1.0 + 2.0 * std::pow(0.5, 1.0 / 6.0)).epsilon(1e-15));
        CHECK(mutation_delta(std::nextafter(0.5, 1.0), 5) < 0.0);
        CHECK(mutation_delta(0.25, 5) == doctest::Approx(-1.0 + 2.0 * std::pow(0.25, 1.0 / 6.0)).epsilon(1e-15));
        CHECK(mutation_delta(0.25, 5) == doctest::Approx(0.5874010519681994).epsilon(1e-12));
        CHECK(mutate_gene(4, 0, 10, 0.2, 0.0, 5) == 0.0);
        CHECK(mutate_gene(4, 0, 10, 0.7, 1.0, 5) == 10.0);

        auto const bounds = sample_bounds();
        Rng rng(10);
        auto const g = random_genome(rng, bounds);
        CHECK(mutate(g, bounds, 0.0, 5, rng) == g);
        int changed = 0;
        for (int i = 0; i < 200; ++i) {
            auto const m = mutate(g, bounds, 1.0, 5, rng);
            int diffs = 0;
            for (std::size_t k = 0; k < kGeneCount; ++k) {
                diffs += m.genes[k] != g.genes[k] ? 1 : 0;
            }
            CHECK(diffs <= 1);
            changed += diffs;
        }
        CHECK(changed > 100);
    }

    TEST_CASE("operators respect bounds")
    {
        auto const bounds = sample_bounds();
        Rng rng(17);
        for (int i = 0; i < 10000; ++i) {
            auto const a = random_genome(rng, bounds);
            auto const b = random_genome(rng, bounds);
            auto const [c1, c2] = crossover(a, b, bounds, rng.uniform(), rng);
            REQUIRE(c1.within(bounds));
            REQUIRE(c2.within(bounds));
            auto const mode = i % 2 == 0 ? MutationMode::per_individual : MutationMode::per_gene;
            auto const m = mutate(c1, bounds, rng.uniform(), 1 + 19 * rng.uniform(), rng, mode);
            REQUIRE(m.within(bounds));
            for (std::size_t k = 0; k < kGeneCount; ++k) {
                if (GeneBounds::is_integer(k)) {
                    REQUIRE(m.genes[k] == std::floor(m.genes[k]));
                }
            }
        }
    }

    TEST_CASE("elitist replacement")
    {
        std::vector<Individual> good{scored(0.1, 0.4), scored(0.2, 0.3), scored(0.3, 0.2), scored(0.4, 0.1)};
        std::vector<Individual> bad{scored(0.5, 0.8), scored(0.6, 0.7), scored(0.7, 0.6), scored(0.8, 0.5)};

        auto next = elitist_replacement(good, bad, 4);
        REQUIRE(next.size() == 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(next[i].objectives == good[i].objectives);
            CHECK(next[i].rank == 1);
        }
        next = elitist_replacement(bad, good, 4);
        for (std::size_t i = 0; i < 4; ++i) {
            CHECK(next[i].objectives == good[i].objectives);
        }

        // N = 5, union front of N + 3 on error + unfairness = 1; interior crowding
        // is 2 * (gap between neighbours): .1 -> .24, .12 -> .4, .3 -> .76,
        // .5 -> .44, .52 -> .08, .54 -> .96
        auto on_line = [](double e) { return scored(e, 1.0 - e); };
        std::vector<Individual> parents{on_line(0.0), on_line(0.1), on_line(0.12), on_line(0.3), scored(0.9, 0.9)};
        std::vector<Individual> children{on_line(0.5), on_line(0.52), on_line(0.54), on_line(1.0), scored(0.95, 0.95)};
        next = elitist_replacement(parents, children, 5);
        std::vector<double> kept;
        for (auto const& ind : next) {
            kept.push_back(ind.objectives.error);
        }
        std::sort(kept.begin(), kept.end());
        CHECK(kept == std::vector<double>{0.0, 0.3, 0.5, 0.54, 1.0});
    }
}
