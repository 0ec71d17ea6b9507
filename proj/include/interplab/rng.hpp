#pragma once

#include <cstdint>
#include <string_view>
#include <utility>

namespace interplab {

// Counter-based generator (Threefry2x64, 20 rounds). Each (seed, stream
// label) pair keys an independent substream; values are pure functions of
// the counter, so element (i, j) of a sampled matrix is reproducible without
// generating its predecessors. Extending a sample (more rows, more Monte
// Carlo draws) leaves previously drawn elements untouched.
class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::string_view stream);

    // Raw 128-bit block for counter (c0, c1).
    std::pair<std::uint64_t, std::uint64_t> block(std::uint64_t c0, std::uint64_t c1) const;

    // Uniform on [0, 1), from the first word of the block.
    double uniform(std::uint64_t c0, std::uint64_t c1) const;

    // Uniform on [lo, hi).
    double uniform_in(double lo, double hi, std::uint64_t c0, std::uint64_t c1) const;

    // Standard normal via Box-Muller; one block yields one variate.
    double normal(std::uint64_t c0, std::uint64_t c1) const;

  private:
    std::uint64_t key0_;
    std::uint64_t key1_;
};

// FNV-1a, used to fold substream labels into the generator key.
std::uint64_t fnv1a_hash(std::string_view text) noexcept;

} // namespace interplab
