#include "fairtree/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <set>

#include <json.hpp>

#include "fairtree/error.hpp"
#include "fairtree/export.hpp"

namespace fairtree {

void ExperimentConfig::validate() const
{
    params.validate();
    if (seeds.empty()) {
        throw ConfigError("at least one seed is required");
    }
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) {
        throw ConfigError("seeds must be distinct");
    }
    if (schema_path.empty()) {
        throw ConfigError("no schema given");
    }
    if (output_dir.empty()) {
        throw ConfigError("no output directory given");
    }
    if (jobs < 1) {
        throw ConfigError("jobs must be at least 1");
    }
}

std::string ExperimentConfig::to_json() const
{
    nlohmann::ordered_json j;
    j["dataset"] = dataset;
    j["schema"] = schema_path.filename().string();
    j["generations"] = params.generations;
    j["population"] = params.population;
    j["pc"] = params.pc;
    j["pm"] = params.pm;
    j["mu"] = params.mu;
    j["crossover_mode"] =
        params.crossover_mode == CrossoverMode::blend_when_below_pc ? "blend_when_below_pc" : "copy_when_below_pc";
    j["mutation_mode"] = params.mutation_mode == MutationMode::per_individual ? "per_individual" : "per_gene";
    j["seeds"] = seeds;
    j["compas"] = compas;
    j["compas_rule"] = compas_rule.to_string();
    return j.dump(2) + "\n";
}

Front make_front(std::uint64_t seed, const RunOutput& run)
{
    Front all;
    for (std::size_t i = 0; i < run.front.size(); ++i) {
        auto const& ind = run.front[i];
        all.push_back({seed, ind.hp, ind.tree_depth, ind.tree_leaves, ind.objectives, run.test_objectives.at(i)});
    }
    std::stable_sort(all.begin(), all.end(), [](const FrontPoint& a, const FrontPoint& b) {
        if (a.validation.error != b.validation.error) {
            return a.validation.error < b.validation.error;
        }
        if (a.validation.unfairness != b.validation.unfairness) {
            return a.validation.unfairness > b.validation.unfairness;
        }
        if (a.leaves != b.leaves) {
            return a.leaves < b.leaves;
        }
        return a.hp.max_leaf_nodes.value_or(0) < b.hp.max_leaf_nodes.value_or(0);
    });
    Front out;
    for (auto const& p : all) {
        if (out.empty() || !(out.back().validation == p.validation)) {
            out.push_back(p);
        }
    }
    return out;
}

double interpolate_sorted(const std::vector<double>& sorted, double q)
{
    if (sorted.empty()) {
        throw DataError("interpolation over an empty sequence");
    }
    double const pos = q * static_cast<double>(sorted.size() - 1);
    auto const lo = static_cast<std::size_t>(std::floor(pos));
    auto const hi = std::min(lo + 1, sorted.size() - 1);
    double const frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

struct RunColumns {
    std::vector<double> error_validation;
    std::vector<double> unfairness_validation;
    std::vector<double> error_test;
    std::vector<double> unfairness_test;
    std::vector<double> depth;
    std::vector<double> leaves;
};

RunColumns columns_of(const Front& front)
{
    if (front.empty()) {
        throw DataError("summary: a run produced an empty front");
    }
    Front sorted = front;
    std::stable_sort(sorted.begin(), sorted.end(), [](const FrontPoint& a, const FrontPoint& b) {
        return a.validation.error < b.validation.error;
    });
    RunColumns c;
    for (auto const& p : sorted) {
        c.error_validation.push_back(p.validation.error);
        c.unfairness_validation.push_back(p.validation.unfairness);
        c.error_test.push_back(p.test.error);
        c.unfairness_test.push_back(p.test.unfairness);
        c.depth.push_back(p.depth);
        c.leaves.push_back(p.leaves);
    }
    auto descending = [](std::vector<double>& v) { std::sort(v.begin(), v.end(), std::greater<>()); };
    std::sort(c.error_validation.begin(), c.error_validation.end());
    std::sort(c.error_test.begin(), c.error_test.end());
    descending(c.unfairness_validation);
    descending(c.unfairness_test);
    return c;
}

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

} // namespace

std::vector<SummaryRow> summarize_fronts(const std::vector<Front>& fronts)
{
    if (fronts.empty()) {
        throw DataError("summary: no fronts");
    }
    std::vector<RunColumns> runs;
    runs.reserve(fronts.size());
    for (auto const& f : fronts) {
        runs.push_back(columns_of(f));
    }
    auto const count = static_cast<double>(runs.size());
    std::vector<SummaryRow> rows;
    for (std::size_t k = 0; k < kSummaryQuantiles.size(); ++k) {
        double const q = kSummaryQuantiles[k];
        SummaryRow row;
        row.label = kSummaryLabels[k];
        for (auto const& r : runs) {
            row.error_validation += interpolate_sorted(r.error_validation, q);
            row.unfairness_validation += interpolate_sorted(r.unfairness_validation, q);
            row.error_test += interpolate_sorted(r.error_test, q);
            row.unfairness_test += interpolate_sorted(r.unfairness_test, q);
            row.depth += interpolate_sorted(r.depth, q);
            row.leaves += interpolate_sorted(r.leaves, q);
        }
        row.error_validation /= count;
        row.unfairness_validation /= count;
        row.error_test /= count;
        row.unfairness_test /= count;
        row.depth /= count;
        row.leaves /= count;
        rows.push_back(row);
    }
    return rows;
}

std::optional<SummaryRow> summarize_compas(const std::vector<SeedResult>& seeds)
{
    SummaryRow row;
    row.label = "COMPAS";
    std::size_t count = 0;
    for (auto const& s : seeds) {
        if (!s.compas) {
            continue;
        }
        ++count;
        row.error_validation += s.compas->validation.error;
        row.unfairness_validation += s.compas->validation.unfairness;
        row.error_test += s.compas->test.error;
        row.unfairness_test += s.compas->test.unfairness;
    }
    if (count == 0) {
        return std::nullopt;
    }
    auto const c = static_cast<double>(count);
    row.error_validation /= c;
    row.unfairness_validation /= c;
    row.error_test /= c;
    row.unfairness_test /= c;
    row.depth = std::nan("");
    row.leaves = std::nan("");
    return row;
}

TradeoffRow tradeoff(const std::vector<SummaryRow>& rows, const std::string& from, const std::string& to)
{
    auto find = [&](const std::string& label) -> const SummaryRow& {
        auto it = std::find_if(rows.begin(), rows.end(), [&](const SummaryRow& r) { return r.label == label; });
        if (it == rows.end()) {
            throw ConfigError("tradeoff: no summary row '" + label + "'");
        }
        return *it;
    };
    auto const& a = find(from);
    auto const& b = find(to);
    TradeoffRow t;
    t.from = from;
    t.to = to;
    t.accuracy_lost = 100.0 * (b.error_test - a.error_test) / a.error_test;
    t.fairness_gained = 100.0 * (a.unfairness_test - b.unfairness_test) / a.unfairness_test;
    t.unfairness_ratio = 100.0 * b.unfairness_test / a.unfairness_test;
    return t;
}

AveragedFront averaged_pareto(const std::vector<Front>& fronts, Partition partition)
{
    if (fronts.empty()) {
        throw DataError("averaged front: no fronts");
    }
    double total = 0.0;
    std::vector<std::vector<double>> errors;
    std::vector<std::vector<double>> unfairness;
    for (auto const& f : fronts) {
        if (f.empty()) {
            throw DataError("averaged front: a run produced an empty front");
        }
        total += static_cast<double>(f.size());
        std::vector<double> e;
        std::vector<double> u;
        for (auto const& p : f) {
            auto const& o = partition == Partition::validation ? p.validation : p.test;
            e.push_back(o.error);
            u.push_back(o.unfairness);
        }
        std::sort(e.begin(), e.end());
        std::sort(u.begin(), u.end(), std::greater<>());
        errors.push_back(std::move(e));
        unfairness.push_back(std::move(u));
    }
    AveragedFront out;
    out.partition = partition;
    out.n = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(total / static_cast<double>(fronts.size()) + 0.5)));
    for (std::size_t i = 0; i < out.n; ++i) {
        double const q = out.n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(out.n - 1);
        std::vector<double> e_at;
        std::vector<double> u_at;
        for (std::size_t r = 0; r < fronts.size(); ++r) {
            e_at.push_back(interpolate_sorted(errors[r], q));
            u_at.push_back(interpolate_sorted(unfairness[r], q));
        }
        AveragedPoint p;
        p.percentile = 100.0 * q;
        p.error = mean_of(e_at);
        p.unfairness = mean_of(u_at);
        p.error_q1 = quantile(e_at, 0.25);
        p.error_q3 = quantile(e_at, 0.75);
        out.points.push_back(p);
    }
    return out;
}

double unfairness_at_error(const AveragedFront& front, double error)
{
    auto const& pts = front.points;
    if (pts.empty()) {
        throw DataError("interpolation on an empty averaged front");
    }
    if (error <= pts.front().error) {
        return pts.front().unfairness;
    }
    if (error >= pts.back().error) {
        return pts.back().unfairness;
    }
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        auto const& a = pts[i];
        auto const& b = pts[i + 1];
        if (error >= a.error && error <= b.error) {
            if (b.error == a.error) {
                return std::min(a.unfairness, b.unfairness);
            }
            double const t = (error - a.error) / (b.error - a.error);
            return a.unfairness + t * (b.unfairness - a.unfairness);
        }
    }
    return pts.back().unfairness;
}

std::vector<EffectBin> hyperparameter_effect_stats(const std::vector<Front>& fronts, std::size_t max_bins)
{
    struct Sample {
        double value;
        double error;
        double unfairness;
    };
    using Getter = double (*)(const FrontPoint&);
    static const std::vector<std::pair<const char*, Getter>> params{
        {"criterion", [](const FrontPoint& p) { return p.hp.criterion == Criterion::gini ? 0.0 : 1.0; }},
        {"max_depth", [](const FrontPoint& p) { return static_cast<double>(p.hp.max_depth.value_or(-1)); }},
        {"min_samples_split", [](const FrontPoint& p) { return static_cast<double>(p.hp.min_samples_split); }},
        {"max_leaf_nodes", [](const FrontPoint& p) { return static_cast<double>(p.hp.max_leaf_nodes.value_or(-1)); }},
        {"class_weight", [](const FrontPoint& p) { return p.hp.class_weight; }},
        {"tree_depth", [](const FrontPoint& p) { return static_cast<double>(p.depth); }},
        {"tree_leaves", [](const FrontPoint& p) { return static_cast<double>(p.leaves); }},
    };
    max_bins = std::max<std::size_t>(max_bins, 1);

    std::vector<EffectBin> out;
    for (auto const& [name, get] : params) {
        std::vector<Sample> samples;
        for (auto const& f : fronts) {
            for (auto const& p : f) {
                samples.push_back({get(p), p.test.error, p.test.unfairness});
            }
        }
        if (samples.empty()) {
            continue;
        }
        std::set<double> distinct;
        for (auto const& s : samples) {
            distinct.insert(s.value);
        }
        std::vector<std::pair<double, double>> edges;
        if (distinct.size() <= max_bins) {
            for (auto v : distinct) {
                edges.emplace_back(v, v);
            }
        } else {
            double const lo = *distinct.begin();
            double const hi = *distinct.rbegin();
            double const width = (hi - lo) / static_cast<double>(max_bins);
            for (std::size_t b = 0; b < max_bins; ++b) {
                edges.emplace_back(lo + width * static_cast<double>(b),
                                   b + 1 == max_bins ? hi : lo + width * static_cast<double>(b + 1));
            }
        }
        auto bin_of = [&](double v) -> std::size_t {
            if (distinct.size() <= max_bins) {
                return static_cast<std::size_t>(std::distance(distinct.begin(), distinct.find(v)));
            }
            double const lo = edges.front().first;
            double const width = (edges.back().second - lo) / static_cast<double>(max_bins);
            auto const b = static_cast<std::size_t>(std::floor((v - lo) / width));
            return std::min(b, max_bins - 1);
        };
        std::vector<std::vector<Sample>> bins(edges.size());
        for (auto const& s : samples) {
            bins[bin_of(s.value)].push_back(s);
        }
        for (std::size_t b = 0; b < bins.size(); ++b) {
            if (bins[b].empty()) {
                continue;
            }
            EffectBin e;
            e.hyperparameter = name;
            e.lo = edges[b].first;
            e.hi = edges[b].second;
            e.count = bins[b].size();
            double se = 0.0;
            double su = 0.0;
            for (auto const& s : bins[b]) {
                se += s.error;
                su += s.unfairness;
            }
            auto const c = static_cast<double>(e.count);
            e.error_mean = se / c;
            e.unfairness_mean = su / c;
            double ve = 0.0;
            double vu = 0.0;
            for (auto const& s : bins[b]) {
                ve += (s.error - e.error_mean) * (s.error - e.error_mean);
                vu += (s.unfairness - e.unfairness_mean) * (s.unfairness - e.unfairness_mean);
            }
            e.error_std = std::sqrt(ve / c);
            e.unfairness_std = std::sqrt(vu / c);
            out.push_back(e);
        }
    }
    return out;
}

ConvergenceReport convergence_report(const std::vector<std::vector<GenerationTrace>>& traces)
{
    ConvergenceReport report;
    if (traces.empty()) {
        return report;
    }
    std::size_t length = traces.front().size();
    for (auto const& t : traces) {
        length = std::min(length, t.size());
    }
    auto const count = static_cast<double>(traces.size());
    for (std::size_t g = 0; g < length; ++g) {
        ConvergenceRow row;
        row.generation = traces.front()[g].generation;
        for (auto const& t : traces) {
            auto const& x = t[g];
            row.front_size += static_cast<double>(x.front_size);
            row.error_mean += x.error_mean;
            row.error_q1 += x.error_q1;
            row.error_q3 += x.error_q3;
            row.unfairness_mean += x.unfairness_mean;
            row.unfairness_q1 += x.unfairness_q1;
            row.unfairness_q3 += x.unfairness_q3;
        }
        row.front_size /= count;
        row.error_mean /= count;
        row.error_q1 /= count;
        row.error_q3 /= count;
        row.unfairness_mean /= count;
        row.unfairness_q1 /= count;
        row.unfairness_q3 /= count;
        report.rows.push_back(row);
    }
    auto same = [](const ConvergenceRow& a, const ConvergenceRow& b) {
        return a.front_size == b.front_size && a.error_mean == b.error_mean && a.error_q1 == b.error_q1 &&
               a.error_q3 == b.error_q3 && a.unfairness_mean == b.unfairness_mean &&
               a.unfairness_q1 == b.unfairness_q1 && a.unfairness_q3 == b.unfairness_q3;
    };
    auto const& rows = report.rows;
    if (rows.size() >= 2) {
        std::size_t start = rows.size() - 1;
        while (start > 0 && same(rows[start - 1], rows.back())) {
            --start;
        }
        if (start + 1 < rows.size()) {
            report.converged_at = rows[start].generation;
        }
    }
    return report;
}

RunResult run_experiment(const ExperimentConfig& cfg, std::ostream* log)
{
    cfg.validate();
    auto const schema = load_schema(cfg.schema_path);
    auto const raw = load_dataset(schema.file, schema);
    auto const data = preprocess(raw, schema);
    if (cfg.compas && data.scores.empty()) {
        throw ConfigError("COMPAS baseline requested but schema '" + schema.name + "' has no score_column");
    }
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) {
        throw IoError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
    }
    write_file(cfg.output_dir / "config.json", cfg.to_json());

    RunResult result;
    result.config = cfg;
    std::vector<std::string> failures;
    for (auto seed : cfg.seeds) {
        try {
            auto const split = split_for_objectives(data, seed, schema.stratify, log);
            auto params = cfg.params;
            params.seed = seed;
            RunOptions options;
            options.jobs = cfg.jobs;
            if (!cfg.checkpoint_dir.empty()) {
                auto const path = cfg.checkpoint_dir / ("checkpoint_seed" + std::to_string(seed) + ".json");
                if (std::filesystem::exists(path)) {
                    options.resume = Checkpoint::load(path);
                    if (log != nullptr) {
                        *log << "seed " << seed << ": resuming after generation " << options.resume->generation
                             << "\n";
                    }
                }
                options.on_checkpoint = [path](const Checkpoint& c) { c.save(path); };
            }
            auto const out = run(split, params, options);

            SeedResult sr;
            sr.seed = seed;
            sr.front = make_front(seed, out);
            sr.traces = out.traces;
            if (cfg.compas) {
                sr.compas = CompasScores{seed, compas_baseline(split.learn, cfg.compas_rule),
                                         compas_baseline(split.validation, cfg.compas_rule),
                                         compas_baseline(split.test, cfg.compas_rule)};
            }
            // reports are built from the persisted values so that `summarize` on
            // the written files reproduces them byte for byte
            auto const front_text = front_csv(sr.front);
            auto const trace_text = traces_csv(seed, sr.traces);
            write_file(cfg.output_dir / front_file_name(seed), front_text);
            write_file(cfg.output_dir / trace_file_name(seed), trace_text);
            sr.front = parse_front_csv(front_text);
            sr.traces = parse_traces_csv(trace_text);
            if (cfg.export_trees) {
                nlohmann::ordered_json trees = nlohmann::ordered_json::array();
                for (auto const& ind : out.front) {
                    trees.push_back(nlohmann::ordered_json::parse(ind.tree->to_json()));
                }
                write_file(cfg.output_dir / trees_file_name(seed), trees.dump() + "\n");
            }
            if (log != nullptr) {
                *log << "seed " << seed << ": " << sr.front.size() << " Pareto solutions\n";
            }
            result.seeds.push_back(std::move(sr));
        } catch (const std::exception& e) {
            if (log != nullptr) {
                *log << "seed " << seed << " failed: " << e.what() << "\n";
            }
            failures.push_back("seed " + std::to_string(seed) + ": " + e.what());
        }
    }
    if (!failures.empty()) {
        std::string msg = "experiment failed for " + std::to_string(failures.size()) + " seed(s)";
        for (auto const& f : failures) {
            msg += "; " + f;
        }
        throw std::runtime_error(msg);
    }
    write_reports(cfg.output_dir, cfg.dataset, result.seeds);
    write_plots(cfg.output_dir, cfg.dataset, result.seeds);
    return result;
}

} // namespace fairtree
