#include "fairtree/dataset.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>

#include "fairtree/error.hpp"
#include "fairtree/random.hpp"

namespace fairtree {

namespace {

std::string trim(std::string_view s)
{
    auto const* ws = " \t\r\n";
    auto const b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) {
        return {};
    }
    auto const e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        auto const comma = s.find(',', start);
        auto const end = comma == std::string_view::npos ? s.size() : comma;
        auto item = trim(s.substr(start, end - start));
        if (!item.empty()) {
            out.push_back(std::move(item));
        }
        if (comma == std::string_view::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

std::optional<double> parse_double(std::string_view s)
{
    double v = 0.0;
    auto const* first = s.data();
    auto const* last = s.data() + s.size();
    if (first != last && *first == '+') {
        ++first;
    }
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || first == last) {
        return std::nullopt;
    }
    return v;
}

double parse_number_key(const std::string& key, const std::string& value)
{
    auto v = parse_double(value);
    if (!v) {
        throw SchemaError("schema key '" + key + "' expects a number, got '" + value + "'");
    }
    return *v;
}

bool parse_bool_key(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw SchemaError("schema key '" + key + "' expects true/false, got '" + value + "'");
}

bool contains(const std::vector<std::string>& v, const std::string& s)
{
    return std::find(v.begin(), v.end(), s) != v.end();
}

} // namespace

bool BinaryRule::matches(const std::string& cell) const
{
    auto const t = trim(cell);
    if (contains(values, t)) {
        return true;
    }
    if (at_least || above) {
        auto const v = parse_double(t);
        if (!v) {
            return false;
        }
        if (at_least && *v >= *at_least) {
            return true;
        }
        if (above && *v > *above) {
            return true;
        }
    }
    return false;
}

void DatasetSchema::validate() const
{
    if (target_column.empty()) {
        throw SchemaError("schema: missing 'target'");
    }
    if (protected_column.empty()) {
        throw SchemaError("schema: missing 'protected'");
    }
    if (positive.empty()) {
        throw SchemaError("schema: no rule for the positive label");
    }
    if (privileged.empty()) {
        throw SchemaError("schema: no rule for the privileged group");
    }
    if (contains(feature_columns, target_column) || contains(feature_columns, protected_column)) {
        throw SchemaError("schema: target and protected columns cannot be features");
    }
    for (auto const& c : categorical_columns) {
        if (!feature_columns.empty() && !contains(feature_columns, c)) {
            throw SchemaError("schema: categorical column '" + c + "' is not a feature");
        }
        if (c == target_column || c == protected_column || contains(drop_columns, c)) {
            throw SchemaError("schema: categorical column '" + c + "' is excluded from the features");
        }
    }
}

DatasetSchema parse_schema(const std::string& text)
{
    DatasetSchema schema;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto const hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        auto const content = trim(line);
        if (content.empty()) {
            continue;
        }
        auto const eq = content.find('=');
        if (eq == std::string::npos) {
            throw SchemaError("schema line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        auto const key = trim(std::string_view(content).substr(0, eq));
        auto const value = trim(std::string_view(content).substr(eq + 1));

        if (key == "name") {
            schema.name = value;
        } else if (key == "file") {
            schema.file = value;
        } else if (key == "target") {
            schema.target_column = value;
        } else if (key == "positive_label") {
            schema.positive.values = split_list(value);
        } else if (key == "positive_at_least") {
            schema.positive.at_least = parse_number_key(key, value);
        } else if (key == "positive_above") {
            schema.positive.above = parse_number_key(key, value);
        } else if (key == "protected") {
            schema.protected_column = value;
        } else if (key == "privileged_values" || key == "privileged_value") {
            schema.privileged.values = split_list(value);
        } else if (key == "privileged_at_least") {
            schema.privileged.at_least = parse_number_key(key, value);
        } else if (key == "privileged_above") {
            schema.privileged.above = parse_number_key(key, value);
        } else if (key == "features") {
            schema.feature_columns = split_list(value);
        } else if (key == "categorical") {
            schema.categorical_columns = split_list(value);
        } else if (key == "drop") {
            schema.drop_columns = split_list(value);
        } else if (key == "missing") {
            schema.missing_tokens = split_list(value);
        } else if (key == "score_column") {
            schema.score_column = value;
        } else if (key == "stratify") {
            schema.stratify = parse_bool_key(key, value);
        } else {
            throw SchemaError("schema line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
    }
    schema.validate();
    return schema;
}

DatasetSchema load_schema(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read schema file " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    auto schema = parse_schema(buf.str());
    if (schema.file.is_relative()) {
        schema.file = path.parent_path() / schema.file;
    }
    if (schema.name.empty()) {
        schema.name = path.stem().string();
    }
    return schema;
}

std::size_t RawDataset::column(const std::string& name) const
{
    auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
        throw SchemaError("column '" + name + "' not found");
    }
    return static_cast<std::size_t>(it - header.begin());
}

bool RawDataset::has_column(const std::string& name) const
{
    return contains(header, name);
}

RawDataset parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool field_started = false;

    auto end_field = [&] {
        record.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        // skip blank lines
        if (!(record.size() == 1 && record.front().empty())) {
            records.push_back(std::move(record));
        }
        record.clear();
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char const c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field_started || field.empty()) {
                quoted = true;
                field_started = true;
            } else {
                field.push_back(c);
            }
            break;
        case ',':
            end_field();
            break;
        case '\r':
            break;
        case '\n':
            end_record();
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (quoted) {
        throw DataError("CSV: unterminated quoted field");
    }
    if (field_started || !field.empty() || !record.empty()) {
        end_record();
    }

    RawDataset raw;
    if (records.empty()) {
        throw DataError("CSV: missing header row");
    }
    raw.header = std::move(records.front());
    for (auto& h : raw.header) {
        h = trim(h);
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != raw.header.size()) {
            throw DataError("CSV: record " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                            " fields, header has " + std::to_string(raw.header.size()));
        }
        raw.rows.push_back(std::move(records[r]));
    }
    return raw;
}

RawDataset read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot read " + path.string());
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

namespace {

std::vector<std::string> effective_features(const RawDataset& raw, const DatasetSchema& schema)
{
    if (!schema.feature_columns.empty()) {
        return schema.feature_columns;
    }
    std::vector<std::string> out;
    for (auto const& h : raw.header) {
        if (h == schema.target_column || h == schema.protected_column || contains(schema.drop_columns, h)) {
            continue;
        }
        // duplicated header names: the first occurrence wins
        if (!contains(out, h)) {
            out.push_back(h);
        }
    }
    return out;
}

} // namespace

RawDataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema)
{
    auto raw = read_csv(path);
    std::vector<std::string> required{schema.target_column, schema.protected_column};
    for (auto const* list : {&schema.feature_columns, &schema.categorical_columns, &schema.drop_columns}) {
        required.insert(required.end(), list->begin(), list->end());
    }
    if (!schema.score_column.empty()) {
        required.push_back(schema.score_column);
    }
    for (auto const& name : required) {
        if (!raw.has_column(name)) {
            throw SchemaError("dataset " + path.string() + ": schema column '" + name + "' not in header");
        }
    }
    return raw;
}

EncodedDataset EncodedDataset::subset(const std::vector<std::size_t>& rows) const
{
    EncodedDataset out;
    out.feature_names = feature_names;
    out.feature_kinds = feature_kinds;
    out.code_books = code_books;
    auto const n = this->rows();
    auto const m = cols();
    out.features.resize(rows.size() * m);
    for (std::size_t c = 0; c < m; ++c) {
        auto const* src = features.data() + c * n;
        auto* dst = out.features.data() + c * rows.size();
        for (std::size_t i = 0; i < rows.size(); ++i) {
            dst[i] = src[rows[i]];
        }
    }
    out.y.reserve(rows.size());
    out.z.reserve(rows.size());
    out.row_ids.reserve(rows.size());
    for (auto r : rows) {
        out.y.push_back(y[r]);
        out.z.push_back(z[r]);
        out.row_ids.push_back(row_ids[r]);
        if (!scores.empty()) {
            out.scores.push_back(scores[r]);
        }
    }
    return out;
}

EncodedDataset EncodedDataset::from_rows(const std::vector<std::vector<double>>& x, std::vector<std::uint8_t> y,
                                         std::vector<std::uint8_t> z)
{
    if (x.size() != y.size()) {
        throw DataError("from_rows: feature and label row counts differ");
    }
    if (z.empty()) {
        z.assign(y.size(), 0);
    }
    if (z.size() != y.size()) {
        throw DataError("from_rows: group and label row counts differ");
    }
    EncodedDataset d;
    auto const n = x.size();
    auto const m = n == 0 ? 0 : x.front().size();
    for (std::size_t c = 0; c < m; ++c) {
        d.feature_names.push_back("x" + std::to_string(c));
    }
    d.feature_kinds.assign(m, FeatureKind::numeric);
    d.code_books.assign(m, {});
    d.features.resize(n * m);
    for (std::size_t r = 0; r < n; ++r) {
        if (x[r].size() != m) {
            throw DataError("from_rows: ragged feature rows");
        }
        for (std::size_t c = 0; c < m; ++c) {
            d.features[c * n + r] = x[r][c];
        }
    }
    d.y = std::move(y);
    d.z = std::move(z);
    d.row_ids.resize(n);
    std::iota(d.row_ids.begin(), d.row_ids.end(), std::size_t{0});
    return d;
}

EncodedDataset preprocess(const RawDataset& raw, const DatasetSchema& schema)
{
    if (raw.rows.empty()) {
        throw DataError("preprocess: dataset has no rows");
    }
    auto const n = raw.rows.size();
    auto is_missing = [&](const std::string& cell) { return cell.empty() || contains(schema.missing_tokens, cell); };

    EncodedDataset out;
    out.feature_names = effective_features(raw, schema);
    auto const m = out.feature_names.size();
    out.feature_kinds.resize(m);
    out.code_books.resize(m);
    out.features.resize(n * m);

    std::vector<std::string> cells(n);
    for (std::size_t c = 0; c < m; ++c) {
        auto const& name = out.feature_names[c];
        auto const col = raw.column(name);
        std::size_t present = 0;
        for (std::size_t r = 0; r < n; ++r) {
            cells[r] = trim(raw.rows[r][col]);
            present += is_missing(cells[r]) ? 0 : 1;
        }
        if (present == 0) {
            throw DataError("preprocess: column '" + name + "' has no values to impute from");
        }
        double* dst = out.features.data() + c * n;

        if (contains(schema.categorical_columns, name)) {
            out.feature_kinds[c] = FeatureKind::categorical;
            // mode, ties broken by first appearance
            std::unordered_map<std::string, std::size_t> freq;
            std::vector<std::string> seen;
            for (auto const& cell : cells) {
                if (is_missing(cell)) {
                    continue;
                }
                if (freq[cell]++ == 0) {
                    seen.push_back(cell);
                }
            }
            std::string const* mode = &seen.front();
            for (auto const& s : seen) {
                if (freq[s] > freq[*mode]) {
                    mode = &s;
                }
            }
            std::string const mode_value = *mode;
            std::unordered_map<std::string, std::size_t> codes;
            auto& book = out.code_books[c];
            for (std::size_t r = 0; r < n; ++r) {
                auto const& v = is_missing(cells[r]) ? mode_value : cells[r];
                auto [it, inserted] = codes.try_emplace(v, book.size());
                if (inserted) {
                    book.push_back(v);
                }
                dst[r] = static_cast<double>(it->second);
            }
        } else {
            out.feature_kinds[c] = FeatureKind::numeric;
            std::vector<double> values;
            values.reserve(present);
            std::vector<bool> missing(n, false);
            for (std::size_t r = 0; r < n; ++r) {
                if (is_missing(cells[r])) {
                    missing[r] = true;
                    continue;
                }
                auto v = parse_double(cells[r]);
                if (!v || !std::isfinite(*v)) {
                    throw DataError("preprocess: column '" + name + "' row " + std::to_string(r) +
                                    ": non-numeric value '" + cells[r] + "'");
                }
                dst[r] = *v;
                values.push_back(*v);
            }
            std::sort(values.begin(), values.end());
            auto const k = values.size();
            double const median = k % 2 == 1 ? values[k / 2] : 0.5 * (values[k / 2 - 1] + values[k / 2]);
            for (std::size_t r = 0; r < n; ++r) {
                if (missing[r]) {
                    dst[r] = median;
                }
            }
        }
    }

    auto const target = raw.column(schema.target_column);
    auto const prot = raw.column(schema.protected_column);
    out.y.resize(n);
    out.z.resize(n);
    for (std::size_t r = 0; r < n; ++r) {
        out.y[r] = schema.positive.matches(raw.rows[r][target]) ? 1 : 0;
        out.z[r] = schema.privileged.matches(raw.rows[r][prot]) ? 1 : 0;
    }
    auto const positives = static_cast<std::size_t>(std::count(out.y.begin(), out.y.end(), 1));
    if (positives == 0 || positives == n) {
        throw DataError("preprocess: target '" + schema.target_column + "' maps to a single class");
    }
    if (!schema.score_column.empty()) {
        auto const sc = raw.column(schema.score_column);
        out.scores.reserve(n);
        for (auto const& row : raw.rows) {
            out.scores.push_back(trim(row[sc]));
        }
    }
    out.row_ids.resize(n);
    std::iota(out.row_ids.begin(), out.row_ids.end(), std::size_t{0});
    return out;
}

SplitSizes split_sizes(std::size_t n)
{
    // learn = round(9n/16), test = round(n/4), both half-up in exact integer
    // arithmetic; validation takes what is left (1000 -> 563, 187, 250)
    auto const learn = (9 * n + 8) / 16;
    auto const test = (n + 2) / 4;
    return {learn, n - learn - test, test};
}

namespace {

constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;

std::vector<std::size_t> shuffled(std::vector<std::size_t> v, Rng& rng)
{
    for (std::size_t i = v.size(); i > 1; --i) {
        auto const j = static_cast<std::size_t>(rng.index(i));
        std::swap(v[i - 1], v[j]);
    }
    return v;
}

} // namespace

SplitBundle split(const EncodedDataset& data, std::uint64_t seed, bool stratify, int attempt)
{
    auto const n = data.rows();
    if (n < 16) {
        throw DataError("split: dataset too small (" + std::to_string(n) + " rows, need at least 16)");
    }
    Rng rng({seed, kSplitStream, static_cast<std::uint64_t>(attempt)});

    std::vector<std::size_t> perm;
    if (!stratify) {
        std::vector<std::size_t> all(n);
        std::iota(all.begin(), all.end(), std::size_t{0});
        perm = shuffled(std::move(all), rng);
    } else {
        std::vector<std::size_t> pos;
        std::vector<std::size_t> neg;
        for (std::size_t i = 0; i < n; ++i) {
            (data.y[i] == 1 ? pos : neg).push_back(i);
        }
        pos = shuffled(std::move(pos), rng);
        neg = shuffled(std::move(neg), rng);
        // interleave so every prefix holds the class ratio up to rounding
        std::size_t pi = 0;
        std::size_t ni = 0;
        perm.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            bool const take_pos =
                ni == neg.size() || (pi < pos.size() && 2 * pi * n < (2 * i + 1) * pos.size());
            perm.push_back(take_pos ? pos[pi++] : neg[ni++]);
        }
    }

    auto const sizes = split_sizes(n);
    auto const mid = perm.begin() + static_cast<std::ptrdiff_t>(sizes.learn);
    auto const tail = mid + static_cast<std::ptrdiff_t>(sizes.validation);
    SplitBundle out;
    out.learn = data.subset({perm.begin(), mid});
    out.validation = data.subset({mid, tail});
    out.test = data.subset({tail, perm.end()});
    out.seed = seed;
    out.attempt = attempt;
    return out;
}

bool supports_objectives(const EncodedDataset& data)
{
    bool pos = false;
    bool neg = false;
    std::array<bool, 2> group_neg{false, false};
    for (std::size_t i = 0; i < data.rows(); ++i) {
        if (data.y[i] == 1) {
            pos = true;
        } else {
            neg = true;
            group_neg[data.z[i]] = true;
        }
    }
    return pos && neg && group_neg[0] && group_neg[1];
}

SplitBundle split_for_objectives(const EncodedDataset& data, std::uint64_t seed, bool stratify, std::ostream* log,
                                 int max_attempts)
{
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        auto s = split(data, seed, stratify, attempt);
        if (s.learn.rows() > 0 && supports_objectives(s.validation) && supports_objectives(s.test)) {
            return s;
        }
        if (log != nullptr) {
            *log << "seed " << seed << ": partition " << attempt
                 << " leaves a class or a group's negatives out of validation/test; redrawing\n";
        }
    }
    throw DataError("split: no valid partition for seed " + std::to_string(seed) + " after " +
                    std::to_string(max_attempts) + " attempts");
}

} // namespace fairtree
