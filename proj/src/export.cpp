#include "fairtree/export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fairtree/error.hpp"

namespace fairtree {

namespace fs = std::filesystem;

std::string format_number(double value)
{
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.5f", value);
    std::string s(buf);
    if (s == "-0.00000") {
        s = "0.00000";
    }
    return s;
}

const std::vector<std::string> kFrontColumns{
    "seed",   "criterion",        "max_depth",             "min_samples_split", "max_leaf_nodes", "class_weight",
    "depth",  "leaves",           "error_validation",      "unfairness_validation", "error_test", "unfairness_test"};
const std::vector<std::string> kTraceColumns{"seed",          "generation",      "front_size",    "error_mean",
                                             "error_q1",      "error_q3",        "unfairness_mean", "unfairness_q1",
                                             "unfairness_q3", "error_min",       "unfairness_min"};
const std::vector<std::string> kSummaryColumns{"dataset",         "row",   "error_validation", "unfairness_validation",
                                               "error_test",      "unfairness_test", "depth", "leaves"};
const std::vector<std::string> kAveragedColumns{"partition", "index",    "percentile", "error",
                                                "unfairness", "error_q1", "error_q3"};
const std::vector<std::string> kEffectColumns{"hyperparameter",  "lo",       "hi",       "count",   "error_mean",
                                              "error_std",       "unfairness_mean", "unfairness_std", "ratio_lo",
                                              "ratio_hi"};
const std::vector<std::string> kConvergenceColumns{"generation", "front_size",      "error_mean",    "error_q1",
                                                   "error_q3",   "unfairness_mean", "unfairness_q1", "unfairness_q3",
                                                   "converged"};
const std::vector<std::string> kCompasColumns{"seed", "partition", "error", "unfairness"};

namespace {

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& cells)
    {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out_ << ',';
            }
            out_ << cells[i];
        }
        out_ << '\n';
    }

    [[nodiscard]] std::string str() const { return out_.str(); }

private:
    std::ostringstream out_;
};

std::string optional_int(const std::optional<int>& v)
{
    return v ? std::to_string(*v) : std::string("none");
}

RawDataset parse_table(const std::string& text, const std::vector<std::string>& columns, const char* what)
{
    auto table = parse_csv(text);
    if (table.header != columns) {
        throw DataError(std::string(what) + ": unexpected header");
    }
    return table;
}

double to_double(const std::string& s)
{
    if (s == "inf") {
        return std::numeric_limits<double>::infinity();
    }
    if (s == "-inf") {
        return -std::numeric_limits<double>::infinity();
    }
    if (s == "nan") {
        return std::numeric_limits<double>::quiet_NaN();
    }
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw DataError("not a number: '" + s + "'");
    }
    if (used != s.size()) {
        throw DataError("not a number: '" + s + "'");
    }
    return v;
}

long long to_integer(const std::string& s)
{
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(s, &used);
    } catch (const std::exception&) {
        throw DataError("not an integer: '" + s + "'");
    }
    if (used != s.size()) {
        throw DataError("not an integer: '" + s + "'");
    }
    return v;
}

std::optional<int> to_optional_int(const std::string& s)
{
    if (s == "none") {
        return std::nullopt;
    }
    return static_cast<int>(to_integer(s));
}

std::string ratio_cell(double w)
{
    if (w >= 1.0) {
        return "inf";
    }
    return format_number(w / (1.0 - w));
}

std::vector<Front> fronts_of(const std::vector<SeedResult>& seeds)
{
    std::vector<Front> fronts;
    for (auto const& s : seeds) {
        fronts.push_back(s.front);
    }
    return fronts;
}

} // namespace

std::string front_csv(const Front& front)
{
    CsvWriter w(kFrontColumns);
    for (auto const& p : front) {
        w.row({std::to_string(p.seed), to_string(p.hp.criterion), optional_int(p.hp.max_depth),
               std::to_string(p.hp.min_samples_split), optional_int(p.hp.max_leaf_nodes),
               format_number(p.hp.class_weight), std::to_string(p.depth), std::to_string(p.leaves),
               format_number(p.validation.error), format_number(p.validation.unfairness), format_number(p.test.error),
               format_number(p.test.unfairness)});
    }
    return w.str();
}

Front parse_front_csv(const std::string& text)
{
    auto const table = parse_table(text, kFrontColumns, "front CSV");
    Front front;
    for (auto const& r : table.rows) {
        FrontPoint p;
        p.seed = static_cast<std::uint64_t>(to_integer(r[0]));
        p.hp.criterion = criterion_from_string(r[1]);
        p.hp.max_depth = to_optional_int(r[2]);
        p.hp.min_samples_split = static_cast<int>(to_integer(r[3]));
        p.hp.max_leaf_nodes = to_optional_int(r[4]);
        p.hp.class_weight = to_double(r[5]);
        p.depth = static_cast<int>(to_integer(r[6]));
        p.leaves = static_cast<int>(to_integer(r[7]));
        p.validation = {to_double(r[8]), to_double(r[9])};
        p.test = {to_double(r[10]), to_double(r[11])};
        front.push_back(p);
    }
    return front;
}

std::string traces_csv(std::uint64_t seed, const std::vector<GenerationTrace>& traces)
{
    CsvWriter w(kTraceColumns);
    for (auto const& t : traces) {
        w.row({std::to_string(seed), std::to_string(t.generation), std::to_string(t.front_size),
               format_number(t.error_mean), format_number(t.error_q1), format_number(t.error_q3),
               format_number(t.unfairness_mean), format_number(t.unfairness_q1), format_number(t.unfairness_q3),
               format_number(t.error_min), format_number(t.unfairness_min)});
    }
    return w.str();
}

std::vector<GenerationTrace> parse_traces_csv(const std::string& text)
{
    auto const table = parse_table(text, kTraceColumns, "trace CSV");
    std::vector<GenerationTrace> out;
    for (auto const& r : table.rows) {
        GenerationTrace t;
        t.generation = static_cast<int>(to_integer(r[1]));
        t.front_size = static_cast<std::size_t>(to_integer(r[2]));
        t.error_mean = to_double(r[3]);
        t.error_q1 = to_double(r[4]);
        t.error_q3 = to_double(r[5]);
        t.unfairness_mean = to_double(r[6]);
        t.unfairness_q1 = to_double(r[7]);
        t.unfairness_q3 = to_double(r[8]);
        t.error_min = to_double(r[9]);
        t.unfairness_min = to_double(r[10]);
        out.push_back(t);
    }
    return out;
}

std::string summary_csv(const std::string& dataset, const std::vector<SummaryRow>& rows)
{
    CsvWriter w(kSummaryColumns);
    for (auto const& r : rows) {
        w.row({dataset, r.label, format_number(r.error_validation), format_number(r.unfairness_validation),
               format_number(r.error_test), format_number(r.unfairness_test), format_number(r.depth),
               format_number(r.leaves)});
    }
    return w.str();
}

std::string tradeoff_csv(const std::vector<TradeoffRow>& rows)
{
    CsvWriter w({"from", "to", "accuracy_lost_pct", "fairness_gained_pct", "unfairness_ratio_pct"});
    for (auto const& r : rows) {
        w.row({r.from, r.to, format_number(r.accuracy_lost), format_number(r.fairness_gained),
               format_number(r.unfairness_ratio)});
    }
    return w.str();
}

std::string averaged_csv(const std::vector<AveragedFront>& fronts)
{
    CsvWriter w(kAveragedColumns);
    for (auto const& f : fronts) {
        std::string const partition = f.partition == Partition::validation ? "validation" : "test";
        for (std::size_t i = 0; i < f.points.size(); ++i) {
            auto const& p = f.points[i];
            w.row({partition, std::to_string(i), format_number(p.percentile), format_number(p.error),
                   format_number(p.unfairness), format_number(p.error_q1), format_number(p.error_q3)});
        }
    }
    return w.str();
}

std::string effects_csv(const std::vector<EffectBin>& bins)
{
    CsvWriter w(kEffectColumns);
    for (auto const& b : bins) {
        bool const weight = b.hyperparameter == "class_weight";
        w.row({b.hyperparameter, format_number(b.lo), format_number(b.hi), std::to_string(b.count),
               format_number(b.error_mean), format_number(b.error_std), format_number(b.unfairness_mean),
               format_number(b.unfairness_std), weight ? ratio_cell(b.lo) : "", weight ? ratio_cell(b.hi) : ""});
    }
    return w.str();
}

std::string convergence_csv(const ConvergenceReport& report)
{
    CsvWriter w(kConvergenceColumns);
    for (auto const& r : report.rows) {
        bool const flagged = report.converged_at && *report.converged_at == r.generation;
        w.row({std::to_string(r.generation), format_number(r.front_size), format_number(r.error_mean),
               format_number(r.error_q1), format_number(r.error_q3), format_number(r.unfairness_mean),
               format_number(r.unfairness_q1), format_number(r.unfairness_q3), flagged ? "1" : "0"});
    }
    return w.str();
}

std::string compas_csv(const std::vector<SeedResult>& seeds)
{
    CsvWriter w(kCompasColumns);
    for (auto const& s : seeds) {
        if (!s.compas) {
            continue;
        }
        auto const seed = std::to_string(s.seed);
        w.row({seed, "learn", format_number(s.compas->learn.error), format_number(s.compas->learn.unfairness)});
        w.row({seed, "validation", format_number(s.compas->validation.error),
               format_number(s.compas->validation.unfairness)});
        w.row({seed, "test", format_number(s.compas->test.error), format_number(s.compas->test.unfairness)});
    }
    return w.str();
}

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& contents)
{
    std::error_code ec;
    if (path.has_parent_path()) {
        fs::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << contents;
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

// ---- SVG ----

namespace {

struct Axis {
    double lo = 0.0;
    double hi = 1.0;

    void widen()
    {
        if (!(hi > lo)) {
            lo -= 0.05;
            hi += 0.05;
        }
        double const pad = 0.05 * (hi - lo);
        lo -= pad;
        hi += pad;
    }
};

class Plot {
public:
    static constexpr double width = 640;
    static constexpr double height = 480;
    static constexpr double left = 70;
    static constexpr double right = 20;
    static constexpr double top = 40;
    static constexpr double bottom = 60;

    Plot(Axis x, Axis y) : x_(x), y_(y) {}

    [[nodiscard]] double px(double v) const { return left + (v - x_.lo) / (x_.hi - x_.lo) * (width - left - right); }
    [[nodiscard]] double py(double v) const
    {
        return height - bottom - (v - y_.lo) / (y_.hi - y_.lo) * (height - top - bottom);
    }

    void frame(const std::string& title, const std::string& xlabel, const std::string& ylabel)
    {
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
             << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
        out_ << "<style>text{font-family:sans-serif;font-size:12px}.title{font-size:14px}</style>\n";
        out_ << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        out_ << "<text class=\"title\" x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\">" << escape(title)
             << "</text>\n";
        double const x0 = left;
        double const x1 = width - right;
        double const y0 = height - bottom;
        double const y1 = top;
        out_ << "<rect x=\"" << x0 << "\" y=\"" << y1 << "\" width=\"" << x1 - x0 << "\" height=\"" << y0 - y1
             << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int k = 0; k <= 5; ++k) {
            double const vx = x_.lo + (x_.hi - x_.lo) * k / 5.0;
            double const vy = y_.lo + (y_.hi - y_.lo) * k / 5.0;
            out_ << "<line x1=\"" << px(vx) << "\" y1=\"" << y0 << "\" x2=\"" << px(vx) << "\" y2=\"" << y0 + 5
                 << "\" stroke=\"black\"/>\n";
            out_ << "<text x=\"" << px(vx) << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\">" << tick(vx)
                 << "</text>\n";
            out_ << "<line x1=\"" << x0 - 5 << "\" y1=\"" << py(vy) << "\" x2=\"" << x0 << "\" y2=\"" << py(vy)
                 << "\" stroke=\"black\"/>\n";
            out_ << "<text x=\"" << x0 - 8 << "\" y=\"" << py(vy) + 4 << "\" text-anchor=\"end\">" << tick(vy)
                 << "</text>\n";
        }
        out_ << "<text x=\"" << (x0 + x1) / 2 << "\" y=\"" << height - 15 << "\" text-anchor=\"middle\">"
             << escape(xlabel) << "</text>\n";
        out_ << "<text x=\"15\" y=\"" << (y0 + y1) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 15 "
             << (y0 + y1) / 2 << ")\">" << escape(ylabel) << "</text>\n";
    }

    std::ostringstream& out() { return out_; }

    std::string finish()
    {
        out_ << "</svg>\n";
        return out_.str();
    }

    static std::string escape(const std::string& s)
    {
        std::string r;
        for (char c : s) {
            switch (c) {
            case '<': r += "&lt;"; break;
            case '>': r += "&gt;"; break;
            case '&': r += "&amp;"; break;
            case '"': r += "&quot;"; break;
            default: r += c;
            }
        }
        return r;
    }

private:
    static std::string tick(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", v);
        return buf;
    }

    Axis x_;
    Axis y_;
    std::ostringstream out_;
};

std::string polyline(const Plot& plot, const std::vector<std::pair<double, double>>& pts)
{
    std::ostringstream s;
    for (auto const& [x, y] : pts) {
        s << plot.px(x) << ',' << plot.py(y) << ' ';
    }
    return s.str();
}

} // namespace

std::string front_svg(const std::vector<Front>& fronts, const AveragedFront& averaged, Partition partition,
                      const std::string& title, const std::vector<ObjectiveVector>& baselines)
{
    Axis x{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    Axis y = x;
    auto extend = [&](double e, double u) {
        x.lo = std::min(x.lo, e);
        x.hi = std::max(x.hi, e);
        y.lo = std::min(y.lo, u);
        y.hi = std::max(y.hi, u);
    };
    auto pick = [&](const FrontPoint& p) -> const ObjectiveVector& {
        return partition == Partition::validation ? p.validation : p.test;
    };
    for (auto const& f : fronts) {
        for (auto const& p : f) {
            extend(pick(p).error, pick(p).unfairness);
        }
    }
    for (auto const& p : averaged.points) {
        extend(p.error_q1, p.unfairness);
        extend(p.error_q3, p.unfairness);
    }
    for (auto const& b : baselines) {
        extend(b.error, b.unfairness);
    }
    if (!std::isfinite(x.lo)) {
        x = {0.0, 1.0};
        y = {0.0, 1.0};
    }
    x.widen();
    y.widen();

    Plot plot(x, y);
    plot.frame(title, "error (1 - G-mean)", "unfairness (FPR difference)");
    auto& out = plot.out();
    if (!averaged.points.empty()) {
        std::vector<std::pair<double, double>> band;
        for (auto const& p : averaged.points) {
            band.emplace_back(p.error_q1, p.unfairness);
        }
        for (auto it = averaged.points.rbegin(); it != averaged.points.rend(); ++it) {
            band.emplace_back(it->error_q3, it->unfairness);
        }
        out << "<polygon class=\"iqr\" points=\"" << polyline(plot, band)
            << "\" fill=\"steelblue\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
    }
    for (auto const& f : fronts) {
        for (auto const& p : f) {
            out << "<circle class=\"pareto\" cx=\"" << plot.px(pick(p).error) << "\" cy=\""
                << plot.py(pick(p).unfairness) << "\" r=\"2.5\" fill=\"gray\" fill-opacity=\"0.6\"/>\n";
        }
    }
    if (!averaged.points.empty()) {
        std::vector<std::pair<double, double>> line;
        for (auto const& p : averaged.points) {
            line.emplace_back(p.error, p.unfairness);
        }
        out << "<polyline class=\"averaged\" points=\"" << polyline(plot, line)
            << "\" fill=\"none\" stroke=\"steelblue\" stroke-width=\"2\"/>\n";
    }
    for (auto const& b : baselines) {
        out << "<rect class=\"baseline\" x=\"" << plot.px(b.error) - 5 << "\" y=\"" << plot.py(b.unfairness) - 5
            << "\" width=\"10\" height=\"10\" fill=\"crimson\"/>\n";
    }
    return plot.finish();
}

std::string convergence_svg(const ConvergenceReport& report, const std::string& title)
{
    Axis x{0.0, 1.0};
    Axis y{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (auto const& r : report.rows) {
        x.hi = std::max(x.hi, static_cast<double>(r.generation));
        for (double v : {r.error_q1, r.error_q3, r.unfairness_q1, r.unfairness_q3, r.error_mean, r.unfairness_mean}) {
            y.lo = std::min(y.lo, v);
            y.hi = std::max(y.hi, v);
        }
    }
    if (!std::isfinite(y.lo)) {
        y = {0.0, 1.0};
    }
    x.widen();
    y.widen();
    Plot plot(x, y);
    plot.frame(title, "generation", "objective on the non-dominated set");
    auto& out = plot.out();

    struct Series {
        const char* name;
        const char* colour;
        double ConvergenceRow::*mean;
        double ConvergenceRow::*q1;
        double ConvergenceRow::*q3;
    };
    Series const series[] = {
        {"error", "steelblue", &ConvergenceRow::error_mean, &ConvergenceRow::error_q1, &ConvergenceRow::error_q3},
        {"unfairness", "darkorange", &ConvergenceRow::unfairness_mean, &ConvergenceRow::unfairness_q1,
         &ConvergenceRow::unfairness_q3},
    };
    for (auto const& s : series) {
        std::vector<std::pair<double, double>> band;
        std::vector<std::pair<double, double>> line;
        for (auto const& r : report.rows) {
            band.emplace_back(r.generation, r.*s.q1);
            line.emplace_back(r.generation, r.*s.mean);
        }
        for (auto it = report.rows.rbegin(); it != report.rows.rend(); ++it) {
            band.emplace_back(it->generation, (*it).*s.q3);
        }
        out << "<polygon class=\"iqr\" points=\"" << polyline(plot, band) << "\" fill=\"" << s.colour
            << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";
        out << "<polyline class=\"" << s.name << "\" points=\"" << polyline(plot, line) << "\" fill=\"none\" stroke=\""
            << s.colour << "\" stroke-width=\"2\"/>\n";
    }
    if (report.converged_at) {
        double const g = *report.converged_at;
        out << "<line class=\"converged\" x1=\"" << plot.px(g) << "\" y1=\"" << Plot::top << "\" x2=\"" << plot.px(g)
            << "\" y2=\"" << Plot::height - Plot::bottom << "\" stroke=\"black\" stroke-dasharray=\"4 3\"/>\n";
    }
    out << "<text x=\"" << Plot::width - Plot::right - 10 << "\" y=\"" << Plot::top + 16
        << "\" text-anchor=\"end\" fill=\"steelblue\">error</text>\n";
    out << "<text x=\"" << Plot::width - Plot::right - 10 << "\" y=\"" << Plot::top + 32
        << "\" text-anchor=\"end\" fill=\"darkorange\">unfairness</text>\n";
    return plot.finish();
}

std::string front_file_name(std::uint64_t seed)
{
    return "front_seed" + std::to_string(seed) + ".csv";
}

std::string trace_file_name(std::uint64_t seed)
{
    return "trace_seed" + std::to_string(seed) + ".csv";
}

std::string trees_file_name(std::uint64_t seed)
{
    return "trees_seed" + std::to_string(seed) + ".json";
}

void write_reports(const fs::path& dir, const std::string& dataset, const std::vector<SeedResult>& seeds)
{
    auto const fronts = fronts_of(seeds);
    auto rows = summarize_fronts(fronts);
    std::vector<TradeoffRow> tradeoffs{tradeoff(rows, "min", "Q1"), tradeoff(rows, "min", "Q2")};
    auto const compas = summarize_compas(seeds);
    if (compas) {
        rows.push_back(*compas);
    }
    write_file(dir / "summary.csv", summary_csv(dataset, rows));
    write_file(dir / "tradeoff.csv", tradeoff_csv(tradeoffs));

    auto const validation = averaged_pareto(fronts, Partition::validation);
    auto const test = averaged_pareto(fronts, Partition::test);
    write_file(dir / "averaged_front.csv", averaged_csv({validation, test}));
    write_file(dir / "hyperparameter_effects.csv", effects_csv(hyperparameter_effect_stats(fronts)));

    std::vector<std::vector<GenerationTrace>> traces;
    for (auto const& s : seeds) {
        if (!s.traces.empty()) {
            traces.push_back(s.traces);
        }
    }
    if (!traces.empty()) {
        write_file(dir / "convergence.csv", convergence_csv(convergence_report(traces)));
    }

    if (compas) {
        write_file(dir / "compas.csv", compas_csv(seeds));
        CsvWriter w({"partition", "compas_error", "compas_unfairness", "front_unfairness", "unfairness_ratio"});
        for (auto const* f : {&validation, &test}) {
            bool const is_val = f->partition == Partition::validation;
            double const e = is_val ? compas->error_validation : compas->error_test;
            double const u = is_val ? compas->unfairness_validation : compas->unfairness_test;
            double const at = unfairness_at_error(*f, e);
            w.row({is_val ? "validation" : "test", format_number(e), format_number(u), format_number(at),
                   format_number(u > 0 ? at / u : std::numeric_limits<double>::quiet_NaN())});
        }
        write_file(dir / "compas_comparison.csv", w.str());
    }
}

std::vector<SeedResult> load_results(const fs::path& dir)
{
    if (!fs::is_directory(dir)) {
        throw IoError("not a directory: " + dir.string());
    }
    std::map<std::uint64_t, SeedResult> found;
    std::string const prefix = "front_seed";
    for (auto const& entry : fs::directory_iterator(dir)) {
        auto const name = entry.path().filename().string();
        if (name.rfind(prefix, 0) != 0 || entry.path().extension() != ".csv") {
            continue;
        }
        auto const digits = name.substr(prefix.size(), name.size() - prefix.size() - 4);
        auto const seed = static_cast<std::uint64_t>(to_integer(digits));
        SeedResult s;
        s.seed = seed;
        s.front = parse_front_csv(read_file(entry.path()));
        auto const trace = dir / trace_file_name(seed);
        if (fs::exists(trace)) {
            s.traces = parse_traces_csv(read_file(trace));
        }
        found.emplace(seed, std::move(s));
    }
    if (found.empty()) {
        throw IoError("no front files in " + dir.string());
    }
    auto const compas = dir / "compas.csv";
    if (fs::exists(compas)) {
        auto const table = parse_table(read_file(compas), kCompasColumns, "COMPAS CSV");
        for (auto const& r : table.rows) {
            auto it = found.find(static_cast<std::uint64_t>(to_integer(r[0])));
            if (it == found.end()) {
                continue;
            }
            auto& c = it->second.compas;
            if (!c) {
                c = CompasScores{it->first, {}, {}, {}};
            }
            ObjectiveVector const o{to_double(r[2]), to_double(r[3])};
            if (r[1] == "learn") {
                c->learn = o;
            } else if (r[1] == "validation") {
                c->validation = o;
            } else if (r[1] == "test") {
                c->test = o;
            } else {
                throw DataError("COMPAS CSV: unknown partition '" + r[1] + "'");
            }
        }
    }
    std::vector<SeedResult> out;
    for (auto& [seed, s] : found) {
        out.push_back(std::move(s));
    }
    return out;
}

void write_plots(const fs::path& dir, const std::string& dataset, const std::vector<SeedResult>& seeds)
{
    auto const fronts = fronts_of(seeds);
    auto const compas = summarize_compas(seeds);
    for (auto partition : {Partition::validation, Partition::test}) {
        bool const is_val = partition == Partition::validation;
        std::vector<ObjectiveVector> baselines;
        if (compas) {
            baselines.push_back(is_val ? ObjectiveVector{compas->error_validation, compas->unfairness_validation}
                                       : ObjectiveVector{compas->error_test, compas->unfairness_test});
        }
        auto const name = std::string(is_val ? "validation" : "test");
        write_file(dir / ("front_" + name + ".svg"),
                   front_svg(fronts, averaged_pareto(fronts, partition), partition,
                             dataset + ": Pareto fronts (" + name + ")", baselines));
    }
    std::vector<std::vector<GenerationTrace>> traces;
    for (auto const& s : seeds) {
        if (!s.traces.empty()) {
            traces.push_back(s.traces);
        }
    }
    if (!traces.empty()) {
        write_file(dir / "convergence.svg", convergence_svg(convergence_report(traces), dataset + ": convergence"));
    }
}

} // namespace fairtree
