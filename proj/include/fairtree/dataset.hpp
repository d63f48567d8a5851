#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fairtree {

/// How raw cells of the target or protected column map onto {0, 1}.
struct BinaryRule {
    /// Cell equals one of these strings (after trimming) -> 1.
    std::vector<std::string> values;
    /// Numeric cell >= at_least -> 1.
    std::optional<double> at_least;
    /// Numeric cell > above -> 1.
    std::optional<double> above;

    [[nodiscard]] bool matches(const std::string& cell) const;
    [[nodiscard]] bool empty() const { return values.empty() && !at_least && !above; }
};

/// Declarative description of one benchmark dataset.
///
/// Loaded from a `key = value` file; see parse_schema() for the grammar.
struct DatasetSchema {
    std::string name;
    /// CSV path; relative paths are resolved against the schema file's directory.
    std::filesystem::path file;
    /// Empty means "every column not excluded below".
    std::vector<std::string> feature_columns;
    std::vector<std::string> categorical_columns;
    std::vector<std::string> drop_columns;
    std::string target_column;
    BinaryRule positive;
    std::string protected_column;
    BinaryRule privileged;
    /// Cells treated as missing in addition to the empty string.
    std::vector<std::string> missing_tokens;
    /// Optional external-predictor column kept alongside the features (COMPAS score_text).
    std::string score_column;
    bool stratify = false;

    /// Checks the invariants that do not depend on a CSV header.
    void validate() const;
};

/// Parses the schema grammar:
///
///     # comment
///     key = value
///
/// List-valued keys (features, categorical, drop, missing, positive_label,
/// privileged_values) take comma-separated items. Unknown keys are errors.
DatasetSchema parse_schema(const std::string& text);
DatasetSchema load_schema(const std::filesystem::path& path);

struct RawDataset {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    [[nodiscard]] std::size_t column(const std::string& name) const;
    [[nodiscard]] bool has_column(const std::string& name) const;
};

/// Reads a comma-separated file with a header row. Quoted fields may contain
/// commas, doubled quotes and newlines.
RawDataset read_csv(const std::filesystem::path& path);
RawDataset parse_csv(const std::string& text);

/// Reads the file named by the schema and checks all schema columns exist.
RawDataset load_dataset(const std::filesystem::path& path, const DatasetSchema& schema);

enum class FeatureKind : std::uint8_t { numeric, categorical };

/// Fully numeric, imputed dataset with binary target and protected group.
///
/// Features are stored column-major: value(row, col) = features[col * n + row].
struct EncodedDataset {
    std::vector<std::string> feature_names;
    std::vector<FeatureKind> feature_kinds;
    /// One code book per feature; empty for numeric features. Index = code.
    std::vector<std::vector<std::string>> code_books;
    std::vector<double> features;
    std::vector<std::uint8_t> y;
    std::vector<std::uint8_t> z;
    /// Row position in the preprocessed source dataset.
    std::vector<std::size_t> row_ids;
    /// Raw external-predictor cells, aligned with rows; empty if the schema has none.
    std::vector<std::string> scores;

    [[nodiscard]] std::size_t rows() const { return y.size(); }
    [[nodiscard]] std::size_t cols() const { return feature_names.size(); }
    [[nodiscard]] double value(std::size_t row, std::size_t col) const { return features[col * rows() + row]; }

    /// Copy of the given rows, in the given order.
    [[nodiscard]] EncodedDataset subset(const std::vector<std::size_t>& rows) const;
    /// Builds a purely numeric dataset from row-major values.
    static EncodedDataset from_rows(const std::vector<std::vector<double>>& x, std::vector<std::uint8_t> y,
                                    std::vector<std::uint8_t> z = {});
};

/// Imputes (median for numeric, mode for categorical), encodes categoricals
/// by first appearance and binarizes target and protected columns.
EncodedDataset preprocess(const RawDataset& raw, const DatasetSchema& schema);

struct SplitSizes {
    std::size_t learn;
    std::size_t validation;
    std::size_t test;
};

/// learn = round(9n/16), test = round(n/4), both half-up; validation is the rest.
SplitSizes split_sizes(std::size_t n);

struct SplitBundle {
    EncodedDataset learn;
    EncodedDataset validation;
    EncodedDataset test;
    std::uint64_t seed = 0;
    /// Number of re-draws needed to satisfy the objective preconditions.
    int attempt = 0;
};

/// Uniform random permutation (stratified by y when requested) then
/// contiguous slicing by split_sizes(). Requires n >= 16.
SplitBundle split(const EncodedDataset& data, std::uint64_t seed, bool stratify = false, int attempt = 0);

/// True when both classes occur and each protected group has a negative.
bool supports_objectives(const EncodedDataset& data);

/// split() retried with successive sub-seeds until validation and test both
/// support the objectives and learn is non-empty. Each retry is logged to
/// `log` when non-null. Throws DataError after max_attempts.
SplitBundle split_for_objectives(const EncodedDataset& data, std::uint64_t seed, bool stratify = false,
                                 std::ostream* log = nullptr, int max_attempts = 100);

} // namespace fairtree
