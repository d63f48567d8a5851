#include "fairtree/reference.hpp"

#include <algorithm>
#include <numeric>

#include "cart_kernels.hpp"
#include "fairtree/error.hpp"

namespace fairtree::reference {

namespace {

struct Pending {
    int id;
    std::vector<std::size_t> rows;
    std::optional<Split> split;
    double priority = 0.0;
    std::size_t seq = 0;
};

} // namespace

DecisionTree train_tree(const EncodedDataset& learn, const Hyperparameters& hp, bool unweighted)
{
    hp.validate();
    if (learn.rows() == 0) {
        throw TrainingError("cannot train on an empty learning set");
    }
    auto const cw = unweighted ? detail::ClassWeights::unit() : detail::ClassWeights::from(hp);
    std::vector<TreeNode> nodes;

    auto make_node = [&](const std::vector<std::size_t>& rows, int depth) {
        TreeNode node;
        std::size_t pos = 0;
        for (auto r : rows) {
            pos += learn.y[r];
        }
        node.w0 = static_cast<double>(rows.size() - pos) * cw.negative;
        node.w1 = static_cast<double>(pos) * cw.positive;
        node.samples = rows.size();
        node.label = leaf_label(node.w0, node.w1, unweighted ? 0.5 : hp.class_weight);
        node.depth = depth;
        nodes.push_back(node);
        return static_cast<int>(nodes.size() - 1);
    };

    auto evaluate = [&](Pending& p) {
        auto const& node = nodes[static_cast<std::size_t>(p.id)];
        if (p.rows.size() < static_cast<std::size_t>(hp.min_samples_split)) {
            return;
        }
        if (hp.max_depth && node.depth >= *hp.max_depth) {
            return;
        }
        if (detail::node_impurity(node.w0, node.w1, hp.criterion) <= 0.0) {
            return;
        }
        p.split = detail::best_split_weighted(p.rows, learn, hp.criterion, cw);
    };

    auto divide = [&](const Pending& p) {
        std::vector<std::size_t> left;
        std::vector<std::size_t> right;
        for (auto r : p.rows) {
            (learn.value(r, p.split->feature) <= p.split->threshold ? left : right).push_back(r);
        }
        int const depth = nodes[static_cast<std::size_t>(p.id)].depth + 1;
        int const l = make_node(left, depth);
        int const r = make_node(right, depth);
        auto& parent = nodes[static_cast<std::size_t>(p.id)];
        parent.feature = static_cast<int>(p.split->feature);
        parent.threshold = p.split->threshold;
        parent.left = l;
        parent.right = r;
        return std::pair{Pending{l, std::move(left), {}}, Pending{r, std::move(right), {}}};
    };

    std::vector<std::size_t> all(learn.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    Pending root{make_node(all, 0), std::move(all), {}};

    if (!hp.max_leaf_nodes) {
        // plain recursion, left subtree first
        auto grow = [&](auto& self, Pending p) -> void {
            evaluate(p);
            if (!p.split) {
                return;
            }
            auto [l, r] = divide(p);
            self(self, std::move(l));
            self(self, std::move(r));
        };
        grow(grow, std::move(root));
        return DecisionTree(std::move(nodes), learn.cols());
    }

    double const root_weight = nodes.front().w0 + nodes.front().w1;
    std::vector<Pending> frontier;
    std::size_t seq = 0;
    auto push = [&](Pending p) {
        evaluate(p);
        if (!p.split) {
            return;
        }
        auto const& node = nodes[static_cast<std::size_t>(p.id)];
        double const share = root_weight > 0.0 ? (node.w0 + node.w1) / root_weight : 0.0;
        p.priority = p.split->impurity_decrease * share;
        p.seq = seq++;
        frontier.push_back(std::move(p));
    };
    push(std::move(root));
    int leaves = 1;
    while (leaves < *hp.max_leaf_nodes && !frontier.empty()) {
        // linear scan: highest priority, earliest insertion on ties
        auto best = frontier.begin();
        for (auto it = frontier.begin(); it != frontier.end(); ++it) {
            if (it->priority > best->priority || (it->priority == best->priority && it->seq < best->seq)) {
                best = it;
            }
        }
        Pending p = std::move(*best);
        frontier.erase(best);
        auto [l, r] = divide(p);
        ++leaves;
        push(std::move(l));
        push(std::move(r));
    }
    return DecisionTree(std::move(nodes), learn.cols());
}

} // namespace fairtree::reference
