#pragma once

// Arithmetic shared by the presorted trainer and the per-node reference
// search. Both routes must produce bit-identical gains for equal inputs, so
// gains are always formed from integer class counts scaled by the class
// weights at the last moment.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include "fairtree/cart.hpp"

namespace fairtree::detail {

struct ClassWeights {
    double negative = 0.5;
    double positive = 0.5;

    static ClassWeights from(const Hyperparameters& hp) { return {1.0 - hp.class_weight, hp.class_weight}; }
    static ClassWeights unit() { return {1.0, 1.0}; }
};

struct Counts {
    std::size_t neg = 0;
    std::size_t pos = 0;

    [[nodiscard]] std::size_t total() const { return neg + pos; }
};

/// Impurity of weighted totals, 0 for a node without weighted mass.
inline double node_impurity(double w0, double w1, Criterion criterion)
{
    if (w0 + w1 <= 0.0) {
        return 0.0;
    }
    return impurity(w0, w1, criterion);
}

/// I(parent) - (WL/W) I(left) - (WR/W) I(right) for a parent with counts
/// `parent` whose left child holds `left`.
inline double split_gain(Counts parent, Counts left, double parent_impurity, ClassWeights cw, Criterion criterion)
{
    double const w0 = static_cast<double>(parent.neg) * cw.negative;
    double const w1 = static_cast<double>(parent.pos) * cw.positive;
    double const l0 = static_cast<double>(left.neg) * cw.negative;
    double const l1 = static_cast<double>(left.pos) * cw.positive;
    double const r0 = static_cast<double>(parent.neg - left.neg) * cw.negative;
    double const r1 = static_cast<double>(parent.pos - left.pos) * cw.positive;
    double const w = w0 + w1;
    double const wl = l0 + l1;
    double const wr = r0 + r1;
    double gain = parent_impurity;
    if (wl > 0.0) {
        gain -= (wl / w) * impurity(l0, l1, criterion);
    }
    if (wr > 0.0) {
        gain -= (wr / w) * impurity(r0, r1, criterion);
    }
    return gain;
}

/// Threshold between consecutive distinct values a < b; never equal to b.
inline double midpoint(double a, double b)
{
    double t = a / 2.0 + b / 2.0;
    if (t >= b) {
        t = a;
    }
    return t;
}

/// best_split() with explicit per-class instance weights.
std::optional<Split> best_split_weighted(std::span<const std::size_t> rows, const EncodedDataset& data,
                                         Criterion criterion, ClassWeights cw);

} // namespace fairtree::detail
