#include "fairtree/objectives.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fairtree/error.hpp"

namespace fairtree {

GroupConfusion GroupConfusion::tally(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred,
                                     std::span<const std::uint8_t> z)
{
    if (y.size() != pred.size() || y.size() != z.size()) {
        throw RateError("label, prediction and group vectors differ in length");
    }
    GroupConfusion c;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ++c.cells[z[i] & 1U][y[i] & 1U][pred[i] & 1U];
    }
    return c;
}

std::uint64_t GroupConfusion::total() const
{
    std::uint64_t t = 0;
    for (auto const& a : cells) {
        for (auto const& b : a) {
            t += b[0] + b[1];
        }
    }
    return t;
}

double gmean_error(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred)
{
    if (y.size() != pred.size()) {
        throw RateError("label and prediction vectors differ in length");
    }
    std::uint64_t tp = 0;
    std::uint64_t pos = 0;
    std::uint64_t tn = 0;
    std::uint64_t neg = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] == 1) {
            ++pos;
            tp += pred[i] == 1 ? 1 : 0;
        } else {
            ++neg;
            tn += pred[i] == 0 ? 1 : 0;
        }
    }
    if (pos == 0) {
        throw RateError("true positive rate undefined: no instances with y=1");
    }
    if (neg == 0) {
        throw RateError("true negative rate undefined: no instances with y=0");
    }
    double const tpr = static_cast<double>(tp) / static_cast<double>(pos);
    double const tnr = static_cast<double>(tn) / static_cast<double>(neg);
    return 1.0 - std::sqrt(tpr * tnr);
}

double fpr_diff(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred, std::span<const std::uint8_t> z)
{
    auto const c = GroupConfusion::tally(y, pred, z);
    double fpr[2] = {0.0, 0.0};
    for (int g = 0; g < 2; ++g) {
        auto const negatives = c.count(g, 0, 0) + c.count(g, 0, 1);
        if (negatives == 0) {
            throw RateError("false positive rate undefined: group z=" + std::to_string(g) +
                            " has no instances with y=0");
        }
        fpr[g] = static_cast<double>(c.count(g, 0, 1)) / static_cast<double>(negatives);
    }
    return std::abs(fpr[0] - fpr[1]);
}

ObjectiveVector objectives(std::span<const std::uint8_t> y, std::span<const std::uint8_t> pred,
                           std::span<const std::uint8_t> z)
{
    return {gmean_error(y, pred), fpr_diff(y, pred, z)};
}

ObjectiveVector evaluate(const DecisionTree& tree, const EncodedDataset& data)
{
    auto const pred = predict(tree, data);
    return objectives(data.y, pred, data.z);
}

CompasRule CompasRule::parse(const std::string& spec)
{
    auto const colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("COMPAS rule must be 'text:<labels>' or 'decile:<min>', got '" + spec + "'");
    }
    auto const kind = spec.substr(0, colon);
    auto const arg = spec.substr(colon + 1);
    CompasRule rule;
    if (kind == "text") {
        rule.positive_labels.clear();
        std::istringstream in(arg);
        std::string item;
        while (std::getline(in, item, ',')) {
            if (!item.empty()) {
                rule.positive_labels.push_back(item);
            }
        }
        if (rule.positive_labels.empty()) {
            throw ConfigError("COMPAS text rule needs at least one label");
        }
        return rule;
    }
    if (kind == "decile") {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), v);
        if (ec != std::errc{} || ptr != arg.data() + arg.size()) {
            throw ConfigError("COMPAS decile rule needs a number, got '" + arg + "'");
        }
        rule.positive_labels.clear();
        rule.min_score = v;
        return rule;
    }
    throw ConfigError("unknown COMPAS rule kind '" + kind + "'");
}

std::string CompasRule::to_string() const
{
    if (min_score) {
        std::ostringstream os;
        os << "decile:" << *min_score;
        return os.str();
    }
    std::string s = "text:";
    for (std::size_t i = 0; i < positive_labels.size(); ++i) {
        s += (i == 0 ? "" : ",") + positive_labels[i];
    }
    return s;
}

std::uint8_t CompasRule::predict(const std::string& cell) const
{
    if (min_score) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
        if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
            throw ConfigError("COMPAS score '" + cell + "' is not numeric");
        }
        return v >= *min_score ? 1 : 0;
    }
    return std::find(positive_labels.begin(), positive_labels.end(), cell) != positive_labels.end() ? 1 : 0;
}

ObjectiveVector compas_baseline(const EncodedDataset& data, const CompasRule& rule)
{
    if (data.scores.size() != data.rows()) {
        throw ConfigError("dataset carries no score column for the COMPAS baseline");
    }
    std::vector<std::uint8_t> pred(data.rows());
    for (std::size_t i = 0; i < data.rows(); ++i) {
        pred[i] = rule.predict(data.scores[i]);
    }
    return objectives(data.y, pred, data.z);
}

} // namespace fairtree
