#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairtree/cart.hpp"
#include "fairtree/dataset.hpp"

namespace fairtree {

/// Counts per (z, y, prediction) cell.
struct GroupConfusion {
    /// cells[z][y][pred]
    std::array<std::array<std::array<std::uint64_t, 2>, 2>, 2> cells{};

    static GroupConfusion tally(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred,
                                std::span<const std::uint8_t> z);

    [[nodiscard]] std::uint64_t total() const;
    [[nodiscard]] std::uint64_t count(int z, int y, int pred) const { return cells[z][y][pred]; }
};

/// Both objectives are minimized.
struct ObjectiveVector {
    /// 1 - G-mean.
    double error = 0.0;
    /// |FPR(z=0) - FPR(z=1)|.
    double unfairness = 0.0;

    friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

/// 1 - sqrt(TPR * TNR). Throws RateError if y lacks either class.
double gmean_error(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred);

/// |P(pred != y | z=0, y=0) - P(pred != y | z=1, y=0)|.
/// Throws RateError if either group has no negatives.
double fpr_diff(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred,
                std::span<const std::uint8_t> z);

ObjectiveVector objectives(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred,
                           std::span<const std::uint8_t> z);

/// Objectives of the tree's predictions on `data`.
ObjectiveVector evaluate(const DecisionTree& tree, const EncodedDataset& data);

/// Binarization of an external risk score into a prediction.
struct CompasRule {
    /// Text categories predicted positive, e.g. {"Medium", "High"}.
    std::vector<std::string> positive_labels{"Medium", "High"};
    /// When set, the score cells are parsed as numbers and >= this is positive.
    std::optional<double> min_score;

    /// "text:Medium,High" or "decile:5".
    static CompasRule parse(const std::string& spec);
    [[nodiscard]] std::string to_string() const;
    [[nodiscard]] std::uint8_t predict(const std::string& cell) const;
};

/// Objectives of the external predictor whose raw scores ride along in
/// `data.scores`. Throws ConfigError when the dataset carries no scores.
ObjectiveVector compas_baseline(const EncodedDataset& data, const CompasRule& rule = {});

} // namespace fairtree
