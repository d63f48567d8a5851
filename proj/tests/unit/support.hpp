#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fairtree/dataset.hpp"
#include "fairtree/nsga2.hpp"
#include "fairtree/random.hpp"

namespace fairtree::testing {

inline std::filesystem::path data_dir()
{
    return FAIRTREE_DATA_DIR;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("fairtree_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

/// Random dataset whose label depends noisily on the first feature and the group.
inline EncodedDataset random_dataset(Rng& rng, std::size_t n, std::size_t m, int levels = 6)
{
    std::vector<std::vector<double>> x(n, std::vector<double>(m));
    std::vector<std::uint8_t> y(n);
    std::vector<std::uint8_t> z(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            x[i][j] = static_cast<double>(rng.index(static_cast<std::uint64_t>(levels)));
        }
        z[i] = static_cast<std::uint8_t>(rng.index(2));
        double const p = 0.2 + 0.1 * x[i][0] / levels + 0.2 * z[i];
        y[i] = rng.uniform() < p ? 1 : 0;
    }
    return EncodedDataset::from_rows(x, y, z);
}

/// Individual carrying only what the ranking code reads.
inline Individual scored(double error, double unfairness, int leaves = 10, int max_leaf_nodes = 10)
{
    Individual ind;
    ind.objectives = {error, unfairness};
    ind.tree_leaves = leaves;
    ind.hp.max_leaf_nodes = max_leaf_nodes;
    return ind;
}

} // namespace fairtree::testing
