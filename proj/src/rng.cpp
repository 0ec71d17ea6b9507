#include "interplab/rng.hpp"

#include <cmath>
#include <numbers>

namespace interplab {

namespace {

constexpr std::uint64_t kKeyParity = 0x1BD11BDAA9FC1A22ull;
constexpr int kRotations[8] = {16, 42, 12, 31, 16, 32, 24, 21};

constexpr std::uint64_t rotl(std::uint64_t x, int r) noexcept {
    return (x << r) | (x >> (64 - r));
}

} // namespace

std::uint64_t fnv1a_hash(std::string_view text) noexcept {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

CounterRng::CounterRng(std::uint64_t seed, std::string_view stream)
    : key0_(seed), key1_(fnv1a_hash(stream)) {}

std::pair<std::uint64_t, std::uint64_t> CounterRng::block(std::uint64_t c0,
                                                          std::uint64_t c1) const {
    const std::uint64_t ks[3] = {key0_, key1_, key0_ ^ key1_ ^ kKeyParity};
    std::uint64_t x0 = c0 + ks[0];
    std::uint64_t x1 = c1 + ks[1];
    for (int round = 0; round < 20; ++round) {
        x0 += x1;
        x1 = rotl(x1, kRotations[round % 8]);
        x1 ^= x0;
        if (round % 4 == 3) {
            const std::uint64_t inject = static_cast<std::uint64_t>(round / 4 + 1);
            x0 += ks[(round / 4 + 1) % 3];
            x1 += ks[(round / 4 + 2) % 3] + inject;
        }
    }
    return {x0, x1};
}

double CounterRng::uniform(std::uint64_t c0, std::uint64_t c1) const {
    const auto [w0, w1] = block(c0, c1);
    (void)w1;
    return static_cast<double>(w0 >> 11) * 0x1.0p-53;
}

double CounterRng::uniform_in(double lo, double hi, std::uint64_t c0,
                              std::uint64_t c1) const {
    return lo + (hi - lo) * uniform(c0, c1);
}

double CounterRng::normal(std::uint64_t c0, std::uint64_t c1) const {
    const auto [w0, w1] = block(c0, c1);
    // u1 in (0, 1] keeps the log finite; u2 in [0, 1).
    const double u1 = static_cast<double>((w0 >> 11) + 1) * 0x1.0p-53;
    const double u2 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace interplab
