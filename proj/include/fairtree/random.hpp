#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <string>

namespace fairtree {

/// Seeded random stream with platform-independent draws.
///
/// The standard distributions are implementation-defined, so every draw here
/// is derived directly from the raw 64-bit engine output. Two streams seeded
/// alike produce identical sequences on any conforming standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : Rng({seed}) {}
    Rng(std::initializer_list<std::uint64_t> key);

    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n). n must be positive.
    std::uint64_t index(std::uint64_t n);

    std::uint64_t next() { return engine_(); }

    /// Opaque textual engine state, restorable with restore().
    [[nodiscard]] std::string state() const;
    void restore(const std::string& state);

private:
    std::mt19937_64 engine_;
};

} // namespace fairtree
