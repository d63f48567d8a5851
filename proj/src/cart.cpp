#include "fairtree/cart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>

#include <json.hpp>

#include "cart_kernels.hpp"
#include "fairtree/error.hpp"

namespace fairtree {

using detail::ClassWeights;
using detail::Counts;

std::string to_string(Criterion c)
{
    return c == Criterion::gini ? "gini" : "entropy";
}

Criterion criterion_from_string(const std::string& s)
{
    if (s == "gini") {
        return Criterion::gini;
    }
    if (s == "entropy") {
        return Criterion::entropy;
    }
    throw ConfigError("unknown criterion '" + s + "'");
}

void Hyperparameters::validate() const
{
    if (min_samples_split < 2) {
        throw ConfigError("min_samples_split must be at least 2");
    }
    if (max_depth && *max_depth < 1) {
        throw ConfigError("max_depth must be at least 1");
    }
    if (max_leaf_nodes && *max_leaf_nodes < 2) {
        throw ConfigError("max_leaf_nodes must be at least 2");
    }
    if (!(class_weight >= 0.0 && class_weight <= 1.0)) {
        throw ConfigError("class_weight must lie in [0, 1]");
    }
}

double impurity(double w0, double w1, Criterion criterion)
{
    double const w = w0 + w1;
    if (!(w > 0.0)) {
        throw TrainingError("impurity of a node without weighted samples is undefined");
    }
    double const p0 = w0 / w;
    double const p1 = w1 / w;
    if (criterion == Criterion::gini) {
        return 1.0 - p0 * p0 - p1 * p1;
    }
    double h = 0.0;
    if (p0 > 0.0) {
        h -= p0 * std::log2(p0);
    }
    if (p1 > 0.0) {
        h -= p1 * std::log2(p1);
    }
    return h;
}

std::uint8_t leaf_label(double w0, double w1, double class_weight)
{
    if (w0 + w1 <= 0.0) {
        return class_weight >= 1.0 ? 1 : 0;
    }
    return w1 > w0 ? 1 : 0;
}

DecisionTree::DecisionTree(std::vector<TreeNode> nodes, std::size_t feature_count)
    : nodes_(std::move(nodes))
    , feature_count_(feature_count)
{
    if (nodes_.empty()) {
        throw TrainingError("a tree needs at least one node");
    }
    for (auto const& n : nodes_) {
        if (n.is_leaf()) {
            ++leaf_count_;
            depth_ = std::max(depth_, n.depth);
        }
    }
}

std::uint8_t DecisionTree::predict_row(const EncodedDataset& data, std::size_t row) const
{
    auto const* node = &nodes_.front();
    while (!node->is_leaf()) {
        auto const v = data.value(row, static_cast<std::size_t>(node->feature));
        node = &nodes_[static_cast<std::size_t>(v <= node->threshold ? node->left : node->right)];
    }
    return node->label;
}

bool DecisionTree::same_structure(const DecisionTree& other) const
{
    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [a, b] = stack.back();
        stack.pop_back();
        auto const& x = nodes_[static_cast<std::size_t>(a)];
        auto const& y = other.nodes_[static_cast<std::size_t>(b)];
        if (x.is_leaf() != y.is_leaf()) {
            return false;
        }
        if (x.is_leaf()) {
            if (x.label != y.label || x.samples != y.samples) {
                return false;
            }
            continue;
        }
        if (x.feature != y.feature || x.threshold != y.threshold) {
            return false;
        }
        stack.emplace_back(x.left, y.left);
        stack.emplace_back(x.right, y.right);
    }
    return true;
}

std::string DecisionTree::to_text(const EncodedDataset* data) const
{
    std::ostringstream os;
    os.precision(6);
    auto feature_name = [&](int f) {
        if (data != nullptr && static_cast<std::size_t>(f) < data->cols()) {
            return data->feature_names[static_cast<std::size_t>(f)];
        }
        return "x" + std::to_string(f);
    };
    auto condition = [&](const TreeNode& n) {
        auto const f = static_cast<std::size_t>(n.feature);
        std::ostringstream c;
        c.precision(6);
        if (data != nullptr && f < data->cols() && data->feature_kinds[f] == FeatureKind::categorical) {
            auto const& book = data->code_books[f];
            c << feature_name(n.feature) << " in {";
            bool first = true;
            for (std::size_t code = 0; code < book.size() && static_cast<double>(code) <= n.threshold; ++code) {
                c << (first ? "" : ", ") << book[code];
                first = false;
            }
            c << "}";
        } else {
            c << feature_name(n.feature) << " <= " << n.threshold;
        }
        return c.str();
    };

    std::vector<std::pair<int, int>> stack{{0, 0}};
    while (!stack.empty()) {
        auto [id, indent] = stack.back();
        stack.pop_back();
        auto const& n = nodes_[static_cast<std::size_t>(id)];
        os << std::string(static_cast<std::size_t>(indent) * 2, ' ');
        if (n.is_leaf()) {
            os << "predict " << int{n.label} << " (samples=" << n.samples << ", w0=" << n.w0 << ", w1=" << n.w1
               << ")\n";
            continue;
        }
        os << "if " << condition(n) << " (samples=" << n.samples << ")\n";
        stack.emplace_back(n.right, indent + 1);
        stack.emplace_back(n.left, indent + 1);
    }
    return os.str();
}

std::string DecisionTree::to_json() const
{
    nlohmann::ordered_json j;
    j["depth"] = depth_;
    j["leaves"] = leaf_count_;
    j["features"] = feature_count_;
    auto& arr = j["nodes"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto const& n = nodes_[i];
        nlohmann::ordered_json node;
        node["id"] = i;
        if (n.is_leaf()) {
            node["feature"] = nullptr;
            node["label"] = n.label;
        } else {
            node["feature"] = n.feature;
            node["threshold"] = n.threshold;
            node["left"] = n.left;
            node["right"] = n.right;
        }
        node["samples"] = n.samples;
        node["w0"] = n.w0;
        node["w1"] = n.w1;
        arr.push_back(std::move(node));
    }
    return j.dump();
}

std::optional<Split> detail::best_split_weighted(std::span<const std::size_t> rows, const EncodedDataset& data,
                                                 Criterion criterion, ClassWeights cw)
{
    Counts parent;
    for (auto r : rows) {
        (data.y[r] == 1 ? parent.pos : parent.neg)++;
    }
    double const parent_impurity = detail::node_impurity(static_cast<double>(parent.neg) * cw.negative,
                                                         static_cast<double>(parent.pos) * cw.positive,
                                                         criterion);
    std::optional<Split> best;
    std::vector<std::pair<double, std::size_t>> sorted(rows.size());
    for (std::size_t f = 0; f < data.cols(); ++f) {
        for (std::size_t i = 0; i < rows.size(); ++i) {
            sorted[i] = {data.value(rows[i], f), rows[i]};
        }
        std::sort(sorted.begin(), sorted.end());
        Counts left;
        for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
            (data.y[sorted[i].second] == 1 ? left.pos : left.neg)++;
            if (!(sorted[i].first < sorted[i + 1].first)) {
                continue;
            }
            double const gain = detail::split_gain(parent, left, parent_impurity, cw, criterion);
            if (!best || gain > best->impurity_decrease) {
                best = Split{f, detail::midpoint(sorted[i].first, sorted[i + 1].first), gain};
            }
        }
    }
    return best;
}

std::optional<Split> best_split(std::span<const std::size_t> rows, const EncodedDataset& data,
                                const Hyperparameters& hp)
{
    return detail::best_split_weighted(rows, data, hp.criterion, ClassWeights::from(hp));
}

TrainingSet::TrainingSet(const EncodedDataset& data)
    : data_(&data)
{
    auto const n = data.rows();
    auto const m = data.cols();
    if (n > std::numeric_limits<std::uint32_t>::max()) {
        throw TrainingError("training set too large");
    }
    orders_.resize(n * m);
    for (std::size_t f = 0; f < m; ++f) {
        auto* o = orders_.data() + f * n;
        std::iota(o, o + n, std::uint32_t{0});
        double const* col = data.features.data() + f * n;
        std::stable_sort(o, o + n, [col](std::uint32_t a, std::uint32_t b) { return col[a] < col[b]; });
    }
}

std::span<const std::uint32_t> TrainingSet::order(std::size_t f) const
{
    auto const n = data_->rows();
    return {orders_.data() + f * n, n};
}

namespace {

/// Presorted CART builder. Each open node owns the segment [begin, end) of
/// every per-feature order array; splitting stably partitions all of them.
class Builder {
public:
    Builder(const TrainingSet& set, const Hyperparameters& hp)
        : data_(set.data())
        , hp_(hp)
        , cw_(ClassWeights::from(hp))
        , n_(data_.rows())
        , m_(data_.cols())
        , goes_left_(n_, 0)
        , scratch_(n_)
    {
        orders_.resize(n_ * m_);
        for (std::size_t f = 0; f < m_; ++f) {
            auto o = set.order(f);
            std::copy(o.begin(), o.end(), orders_.begin() + static_cast<std::ptrdiff_t>(f * n_));
        }
    }

    DecisionTree build()
    {
        Counts root;
        for (auto v : data_.y) {
            (v == 1 ? root.pos : root.neg)++;
        }
        add_node(0, root);
        open_.push_back({0, 0, n_, root, {}});
        root_weight_ = weight(root);

        if (hp_.max_leaf_nodes) {
            grow_best_first(static_cast<std::size_t>(*hp_.max_leaf_nodes));
        } else {
            grow_depth_first();
        }
        return DecisionTree(std::move(nodes_), m_);
    }

private:
    struct Open {
        int id;
        std::size_t begin;
        std::size_t end;
        Counts counts;
        std::optional<Split> split;
    };

    [[nodiscard]] double weight(Counts c) const
    {
        return static_cast<double>(c.neg) * cw_.negative + static_cast<double>(c.pos) * cw_.positive;
    }

    void add_node(int depth, Counts c)
    {
        TreeNode node;
        node.w0 = static_cast<double>(c.neg) * cw_.negative;
        node.w1 = static_cast<double>(c.pos) * cw_.positive;
        node.samples = c.total();
        node.label = leaf_label(node.w0, node.w1, hp_.class_weight);
        node.depth = depth;
        nodes_.push_back(node);
    }

    [[nodiscard]] std::uint32_t const* order(std::size_t f) const { return orders_.data() + f * n_; }
    [[nodiscard]] std::uint32_t* order(std::size_t f) { return orders_.data() + f * n_; }

    /// Fills `o.split` when the node may be split and some feature varies.
    void find_split(Open& o) const
    {
        auto const& node = nodes_[static_cast<std::size_t>(o.id)];
        if (o.counts.total() < static_cast<std::size_t>(hp_.min_samples_split)) {
            return;
        }
        if (hp_.max_depth && node.depth >= *hp_.max_depth) {
            return;
        }
        double const parent_impurity = detail::node_impurity(node.w0, node.w1, hp_.criterion);
        if (parent_impurity <= 0.0) {
            return;
        }
        for (std::size_t f = 0; f < m_; ++f) {
            double const* col = data_.features.data() + f * n_;
            auto const* seg = order(f);
            Counts left;
            for (std::size_t i = o.begin; i + 1 < o.end; ++i) {
                auto const row = seg[i];
                (data_.y[row] == 1 ? left.pos : left.neg)++;
                double const a = col[row];
                double const b = col[seg[i + 1]];
                if (!(a < b)) {
                    continue;
                }
                double const gain = detail::split_gain(o.counts, left, parent_impurity, cw_, hp_.criterion);
                if (!o.split || gain > o.split->impurity_decrease) {
                    o.split = Split{f, detail::midpoint(a, b), gain};
                }
            }
        }
    }

    /// Splits an open node, returning its two children (left first).
    std::pair<Open, Open> apply(const Open& o)
    {
        auto const& s = *o.split;
        double const* col = data_.features.data() + s.feature * n_;
        Counts left;
        auto const* split_seg = order(s.feature);
        for (std::size_t i = o.begin; i < o.end; ++i) {
            auto const row = split_seg[i];
            bool const l = col[row] <= s.threshold;
            goes_left_[row] = l ? 1 : 0;
            if (l) {
                (data_.y[row] == 1 ? left.pos : left.neg)++;
            }
        }
        std::size_t const nl = left.total();
        for (std::size_t f = 0; f < m_; ++f) {
            auto* seg = order(f);
            std::size_t li = o.begin;
            std::size_t ri = 0;
            for (std::size_t i = o.begin; i < o.end; ++i) {
                auto const row = seg[i];
                if (goes_left_[row] != 0) {
                    seg[li++] = row;
                } else {
                    scratch_[ri++] = row;
                }
            }
            std::copy(scratch_.begin(), scratch_.begin() + static_cast<std::ptrdiff_t>(ri), seg + li);
        }

        Counts const right{o.counts.neg - left.neg, o.counts.pos - left.pos};
        int const depth = nodes_[static_cast<std::size_t>(o.id)].depth + 1;
        int const left_id = static_cast<int>(nodes_.size());
        add_node(depth, left);
        add_node(depth, right);
        auto& parent = nodes_[static_cast<std::size_t>(o.id)];
        parent.feature = static_cast<int>(s.feature);
        parent.threshold = s.threshold;
        parent.left = left_id;
        parent.right = left_id + 1;
        return {Open{left_id, o.begin, o.begin + nl, left, {}}, Open{left_id + 1, o.begin + nl, o.end, right, {}}};
    }

    void grow_depth_first()
    {
        std::vector<Open> stack{open_.front()};
        while (!stack.empty()) {
            auto o = stack.back();
            stack.pop_back();
            find_split(o);
            if (!o.split) {
                continue;
            }
            auto [l, r] = apply(o);
            stack.push_back(r);
            stack.push_back(l);
        }
    }

    void grow_best_first(std::size_t max_leaves)
    {
        struct Entry {
            double priority;
            std::size_t seq;
            Open open;
        };
        auto cmp = [](const Entry& a, const Entry& b) {
            if (a.priority != b.priority) {
                return a.priority < b.priority;
            }
            return a.seq > b.seq;
        };
        std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> frontier(cmp);
        std::size_t seq = 0;
        auto push = [&](Open o) {
            find_split(o);
            if (!o.split) {
                return;
            }
            double const share = root_weight_ > 0.0 ? weight(o.counts) / root_weight_ : 0.0;
            double const priority = o.split->impurity_decrease * share;
            frontier.push(Entry{priority, seq++, o});
        };
        push(open_.front());
        std::size_t leaves = 1;
        while (leaves < max_leaves && !frontier.empty()) {
            auto e = frontier.top();
            frontier.pop();
            auto [l, r] = apply(e.open);
            ++leaves;
            push(l);
            push(r);
        }
    }

    const EncodedDataset& data_;
    const Hyperparameters& hp_;
    ClassWeights cw_;
    std::size_t n_;
    std::size_t m_;
    std::vector<std::uint32_t> orders_;
    std::vector<std::uint8_t> goes_left_;
    std::vector<std::uint32_t> scratch_;
    std::vector<TreeNode> nodes_;
    std::vector<Open> open_;
    double root_weight_ = 0.0;
};

} // namespace

DecisionTree train_tree(const TrainingSet& learn, const Hyperparameters& hp)
{
    hp.validate();
    if (learn.data().rows() == 0) {
        throw TrainingError("cannot train on an empty learning set");
    }
    return Builder(learn, hp).build();
}

DecisionTree train_tree(const EncodedDataset& learn, const Hyperparameters& hp)
{
    if (learn.rows() == 0) {
        throw TrainingError("cannot train on an empty learning set");
    }
    TrainingSet const set(learn);
    return train_tree(set, hp);
}

std::vector<std::uint8_t> predict(const DecisionTree& tree, const EncodedDataset& data)
{
    if (data.cols() != tree.feature_count()) {
        throw PredictionError("tree expects " + std::to_string(tree.feature_count()) + " features, data has " +
                              std::to_string(data.cols()));
    }
    std::vector<std::uint8_t> out(data.rows());
    for (std::size_t r = 0; r < data.rows(); ++r) {
        out[r] = tree.predict_row(data, r);
    }
    return out;
}

} // namespace fairtree
