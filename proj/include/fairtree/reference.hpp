#pragma once

#include "fairtree/cart.hpp"

// Serial, unoptimized counterparts of the production kernels. Tests check the
// fast paths against these; the benchmark target times both.

namespace fairtree::reference {

/// CART by recursion over explicit row lists, re-sorting at every node via
/// best_split(). With `unweighted`, class_weight is ignored and raw class
/// counts drive impurity and leaf votes.
DecisionTree train_tree(const EncodedDataset& learn, const Hyperparameters& hp, bool unweighted = false);

} // namespace fairtree::reference
