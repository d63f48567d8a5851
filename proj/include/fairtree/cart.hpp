#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairtree/dataset.hpp"

namespace fairtree {

enum class Criterion : std::uint8_t { gini, entropy };

std::string to_string(Criterion c);
Criterion criterion_from_string(const std::string& s);

/// The five tuned learner settings. std::nullopt means unbounded.
struct Hyperparameters {
    Criterion criterion = Criterion::gini;
    std::optional<int> max_depth;
    int min_samples_split = 2;
    std::optional<int> max_leaf_nodes;
    /// Weight of each positive instance; negatives weigh 1 - class_weight.
    double class_weight = 0.5;

    /// Throws ConfigError on out-of-range settings.
    void validate() const;

    friend bool operator==(const Hyperparameters&, const Hyperparameters&) = default;
};

/// Gini or entropy (base 2) of a node with weighted class totals w0, w1.
/// Throws TrainingError when w0 + w1 == 0.
double impurity(double w0, double w1, Criterion criterion);

struct TreeNode {
    /// -1 for leaves.
    int feature = -1;
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    /// Weighted class totals of the training rows reaching this node.
    double w0 = 0.0;
    double w1 = 0.0;
    std::size_t samples = 0;
    std::uint8_t label = 0;
    int depth = 0;

    [[nodiscard]] bool is_leaf() const { return feature < 0; }
};

/// Binary classification tree stored as a node arena; node 0 is the root.
class DecisionTree {
public:
    DecisionTree() = default;
    DecisionTree(std::vector<TreeNode> nodes, std::size_t feature_count);

    [[nodiscard]] const std::vector<TreeNode>& nodes() const { return nodes_; }
    [[nodiscard]] const TreeNode& root() const { return nodes_.front(); }
    [[nodiscard]] int depth() const { return depth_; }
    [[nodiscard]] int leaf_count() const { return leaf_count_; }
    [[nodiscard]] std::size_t feature_count() const { return feature_count_; }

    /// Label of one row of `data`; value <= threshold goes left.
    [[nodiscard]] std::uint8_t predict_row(const EncodedDataset& data, std::size_t row) const;

    /// Same shape, splits and leaf labels, independent of arena order.
    [[nodiscard]] bool same_structure(const DecisionTree& other) const;

    /// Indented text rendering; feature names are taken from `data` when given.
    [[nodiscard]] std::string to_text(const EncodedDataset* data = nullptr) const;
    /// JSON array of nodes: id, feature, threshold, children, leaf totals.
    [[nodiscard]] std::string to_json() const;

private:
    std::vector<TreeNode> nodes_;
    std::size_t feature_count_ = 0;
    int depth_ = 0;
    int leaf_count_ = 0;
};

/// Leaf label from weighted totals: argmax, ties to 0. A node without any
/// weighted mass (class_weight of 0 or 1) predicts the class that carries weight.
std::uint8_t leaf_label(double w0, double w1, double class_weight);

struct Split {
    std::size_t feature = 0;
    double threshold = 0.0;
    /// I(parent) - (WL/W) I(left) - (WR/W) I(right).
    double impurity_decrease = 0.0;
};

/// Best threshold split of `rows` over all features, scanning midpoints of
/// consecutive distinct values. Ties go to the lowest feature index, then the
/// lowest threshold. Returns std::nullopt when no feature varies.
///
/// This is the straightforward per-call-sort implementation; train_tree() uses
/// a presorted equivalent.
std::optional<Split> best_split(std::span<const std::size_t> rows, const EncodedDataset& data,
                                const Hyperparameters& hp);

/// Learn set with per-feature presorted row orders, reusable across trainings.
class TrainingSet {
public:
    explicit TrainingSet(const EncodedDataset& data);

    [[nodiscard]] const EncodedDataset& data() const { return *data_; }
    /// Rows of feature `f` sorted by value, ties by row index.
    [[nodiscard]] std::span<const std::uint32_t> order(std::size_t f) const;

private:
    const EncodedDataset* data_;
    std::vector<std::uint32_t> orders_;
};

/// Fits a CART tree. Bounded max_leaf_nodes grows best-first by the largest
/// node-weighted impurity decrease; otherwise depth-first. Deterministic.
DecisionTree train_tree(const TrainingSet& learn, const Hyperparameters& hp);
DecisionTree train_tree(const EncodedDataset& learn, const Hyperparameters& hp);

/// Throws PredictionError when the column count differs from training.
std::vector<std::uint8_t> predict(const DecisionTree& tree, const EncodedDataset& data);

} // namespace fairtree
