#include "fairtree/random.hpp"

#include <limits>
#include <sstream>
#include <vector>

#include "fairtree/error.hpp"

namespace fairtree {

Rng::Rng(std::initializer_list<std::uint64_t> key)
{
    std::vector<std::uint32_t> words;
    words.reserve(key.size() * 2);
    for (auto k : key) {
        words.push_back(static_cast<std::uint32_t>(k & 0xffffffffU));
        words.push_back(static_cast<std::uint32_t>(k >> 32U));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
}

double Rng::uniform()
{
    // top 53 bits -> [0, 1)
    return static_cast<double>(engine_() >> 11U) * 0x1.0p-53;
}

std::uint64_t Rng::index(std::uint64_t n)
{
    if (n == 0) {
        throw ConfigError("Rng::index: empty range");
    }
    // rejection sampling keeps every residue equally likely
    auto const limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x = engine_();
    while (x >= limit) {
        x = engine_();
    }
    return x % n;
}

std::string Rng::state() const
{
    std::ostringstream os;
    os << engine_;
    return os.str();
}

void Rng::restore(const std::string& state)
{
    std::istringstream is(state);
    is >> engine_;
    if (!is) {
        throw ConfigError("Rng::restore: malformed engine state");
    }
}

} // namespace fairtree
