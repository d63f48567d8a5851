#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fairtree/cart.hpp"
#include "fairtree/error.hpp"
#include "fairtree/reference.hpp"
#include "support.hpp"

using namespace fairtree;

namespace {

std::vector<std::size_t> all_rows(const EncodedDataset& d)
{
    std::vector<std::size_t> rows(d.rows());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

double training_error(const DecisionTree& tree, const EncodedDataset& d)
{
    auto const pred = predict(tree, d);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < d.rows(); ++i) {
        wrong += pred[i] != d.y[i] ? 1 : 0;
    }
    return static_cast<double>(wrong) / static_cast<double>(d.rows());
}

/// Structural checks every fitted tree must pass.
void check_invariants(const DecisionTree& tree, const Hyperparameters& hp)
{
    int leaves = 0;
    int deepest = 0;
    for (auto const& node : tree.nodes()) {
        deepest = std::max(deepest, node.depth);
        if (node.is_leaf()) {
            ++leaves;
            continue;
        }
        auto const& l = tree.nodes()[static_cast<std::size_t>(node.left)];
        auto const& r = tree.nodes()[static_cast<std::size_t>(node.right)];
        REQUIRE(l.samples + r.samples == node.samples);
        CHECK(l.samples > 0);
        CHECK(r.samples > 0);
        CHECK(l.depth == node.depth + 1);
        CHECK(node.samples >= static_cast<std::size_t>(hp.min_samples_split));
    }
    CHECK(leaves == tree.leaf_count());
    CHECK(deepest == tree.depth());
    if (hp.max_depth) {
        CHECK(tree.depth() <= *hp.max_depth);
    }
    if (hp.max_leaf_nodes) {
        CHECK(tree.leaf_count() <= *hp.max_leaf_nodes);
    }
}

Hyperparameters random_hp(Rng& rng)
{
    Hyperparameters hp;
    hp.criterion = rng.index(2) == 0 ? Criterion::gini : Criterion::entropy;
    if (rng.index(3) != 0) {
        hp.max_depth = 1 + static_cast<int>(rng.index(8));
    }
    hp.min_samples_split = 2 + static_cast<int>(rng.index(10));
    if (rng.index(3) != 0) {
        hp.max_leaf_nodes = 2 + static_cast<int>(rng.index(20));
    }
    hp.class_weight = rng.uniform();
    return hp;
}

} // namespace

TEST_SUITE("cart")
{
    TEST_CASE("impurity hand values")
    {
        CHECK(impurity(2, 2, Criterion::gini) == doctest::Approx(0.5).epsilon(1e-15));
        CHECK(impurity(5, 0, Criterion::entropy) == 0.0);
        CHECK(impurity(1, 3, Criterion::gini) == doctest::Approx(0.375).epsilon(1e-15));
        CHECK(impurity(1, 1, Criterion::entropy) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(impurity(1, 3, Criterion::entropy) ==
              doctest::Approx(-(0.25 * std::log2(0.25) + 0.75 * std::log2(0.75))).epsilon(1e-15));
        CHECK_THROWS_AS(impurity(0, 0, Criterion::gini), TrainingError);
    }

    TEST_CASE("best split of the four-point example")
    {
        auto const d = EncodedDataset::from_rows({{1}, {2}, {3}, {4}}, {0, 0, 1, 1});
        auto const rows = all_rows(d);
        auto const s = best_split(rows, d, Hyperparameters{});
        REQUIRE(s);
        CHECK(s->feature == 0);
        CHECK(s->threshold == 2.5);
        CHECK(s->impurity_decrease == doctest::Approx(0.5));

        Hyperparameters hp;
        hp.max_depth = 1;
        auto const stump = train_tree(d, hp);
        CHECK(stump.leaf_count() == 2);
        CHECK(predict(stump, d) == std::vector<std::uint8_t>{0, 0, 1, 1});
    }

    TEST_CASE("separable split removes all impurity; constant features have none")
    {
        auto const d = EncodedDataset::from_rows({{5, 0}, {5, 1}, {5, 1}, {5, 0}, {5, 1}}, {0, 1, 1, 0, 1});
        auto const rows = all_rows(d);
        Hyperparameters hp;
        auto const s = best_split(rows, d, hp);
        REQUIRE(s);
        CHECK(s->feature == 1);
        CHECK(s->impurity_decrease == doctest::Approx(impurity(2, 3, Criterion::gini)));

        auto const flat = EncodedDataset::from_rows({{1, 2}, {1, 2}, {1, 2}}, {0, 1, 0});
        CHECK_FALSE(best_split(all_rows(flat), flat, hp));
    }

    TEST_CASE("equal splits go to the lowest feature")
    {
        auto const d = EncodedDataset::from_rows({{1, 1}, {2, 2}, {3, 3}, {4, 4}}, {0, 0, 1, 1});
        auto const s = best_split(all_rows(d), d, Hyperparameters{});
        REQUIRE(s);
        CHECK(s->feature == 0);
    }

    TEST_CASE("XOR needs two levels and is fitted exactly")
    {
        auto const d = EncodedDataset::from_rows({{0, 0}, {0, 1}, {1, 0}, {1, 1}}, {0, 1, 1, 0});
        for (auto c : {Criterion::gini, Criterion::entropy}) {
            Hyperparameters hp;
            hp.criterion = c;
            auto const tree = train_tree(d, hp);
            CHECK(tree.depth() == 2);
            CHECK(tree.leaf_count() >= 3);
            CHECK(tree.leaf_count() <= 4);
            CHECK(training_error(tree, d) == 0.0);
        }
    }

    TEST_CASE("unconstrained tree reproduces separable training labels")
    {
        Rng rng(3);
        std::vector<std::vector<double>> x;
        std::vector<std::uint8_t> y;
        for (int i = 0; i < 200; ++i) {
            double const a = rng.uniform();
            double const b = rng.uniform();
            x.push_back({a, b});
            y.push_back(a + b > 1.0 ? 1 : 0);
        }
        auto const d = EncodedDataset::from_rows(x, y);
        auto const tree = train_tree(d, Hyperparameters{});
        CHECK(predict(tree, d) == d.y);
    }

    TEST_CASE("single-class data gives a single leaf")
    {
        auto const d = EncodedDataset::from_rows({{1}, {2}, {3}}, {1, 1, 1});
        auto const tree = train_tree(d, Hyperparameters{});
        CHECK(tree.leaf_count() == 1);
        CHECK(predict(tree, d) == std::vector<std::uint8_t>{1, 1, 1});
    }

    TEST_CASE("leaf votes use class weights, ties to the negative class")
    {
        CHECK(leaf_label(2, 2, 0.5) == 0);
        CHECK(leaf_label(1, 2, 0.5) == 1);
        CHECK(leaf_label(0, 0, 1.0) == 1);
        CHECK(leaf_label(0, 0, 0.0) == 0);

        auto const d = EncodedDataset::from_rows({{1}, {1}, {1}, {1}}, {0, 0, 0, 1});
        Hyperparameters hp;
        hp.class_weight = 0.9;
        CHECK(predict(train_tree(d, hp), d) == std::vector<std::uint8_t>{1, 1, 1, 1});
        hp.class_weight = 0.7;
        CHECK(predict(train_tree(d, hp), d) == std::vector<std::uint8_t>{0, 0, 0, 0});
    }

    TEST_CASE("errors")
    {
        auto const d = EncodedDataset::from_rows({{1}, {2}}, {0, 1});
        CHECK_THROWS_AS(train_tree(d.subset({}), Hyperparameters{}), TrainingError);
        auto const tree = train_tree(d, Hyperparameters{});
        auto const wide = EncodedDataset::from_rows({{1, 2}}, {0});
        CHECK_THROWS_AS(predict(tree, wide), PredictionError);
        Hyperparameters bad;
        bad.min_samples_split = 1;
        CHECK_THROWS_AS(train_tree(d, bad), ConfigError);
        bad = {};
        bad.class_weight = 1.5;
        CHECK_THROWS_AS(train_tree(d, bad), ConfigError);
    }

    TEST_CASE("leaf bound holds for every k")
    {
        Rng rng(99);
        for (int trial = 0; trial < 40; ++trial) {
            auto const d = testing::random_dataset(rng, 60 + rng.index(200), 1 + rng.index(4));
            TrainingSet const ts(d);
            for (int k = 2; k <= 25; ++k) {
                Hyperparameters hp;
                hp.max_leaf_nodes = k;
                hp.class_weight = rng.uniform();
                auto const tree = train_tree(ts, hp);
                CHECK(tree.leaf_count() <= k);
                check_invariants(tree, hp);
            }
        }
    }

    TEST_CASE("presorted trainer matches the reference trainer")
    {
        Rng rng(1234);
        for (int trial = 0; trial < 150; ++trial) {
            auto const d = testing::random_dataset(rng, 20 + rng.index(150), 1 + rng.index(5),
                                                   2 + static_cast<int>(rng.index(10)));
            auto const hp = random_hp(rng);
            auto const fast = train_tree(d, hp);
            auto const slow = reference::train_tree(d, hp);
            CAPTURE(trial);
            CHECK(fast.same_structure(slow));
            CHECK(fast.leaf_count() == slow.leaf_count());
            CHECK(fast.depth() == slow.depth());
            CHECK(predict(fast, d) == predict(slow, d));
            check_invariants(fast, hp);
        }
    }

    TEST_CASE("balanced class weight equals unweighted training")
    {
        Rng rng(77);
        for (int trial = 0; trial < 50; ++trial) {
            auto const d = testing::random_dataset(rng, 30 + rng.index(100), 1 + rng.index(4));
            auto hp = random_hp(rng);
            hp.class_weight = 0.5;
            CHECK(train_tree(d, hp).same_structure(reference::train_tree(d, hp, true)));
        }
    }

    TEST_CASE("training is deterministic and reusable")
    {
        Rng rng(5);
        auto const d = testing::random_dataset(rng, 300, 4);
        TrainingSet const ts(d);
        Hyperparameters hp;
        hp.max_leaf_nodes = 12;
        auto const a = train_tree(ts, hp);
        auto const b = train_tree(ts, hp);
        CHECK(a.to_json() == b.to_json());
        CHECK(a.to_text(&d) == b.to_text(&d));
        CHECK(a.to_text(&d).find("x") != std::string::npos);
    }
}
