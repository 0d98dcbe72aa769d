#include "mcsentinel/rng.hpp"

#include <cmath>
#include <numbers>

namespace mcsentinel {

namespace {

std::uint64_t mix(std::uint64_t x) { return SplitMix64(x).next(); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed, std::uint64_t stream) {
    SplitMix64 sm(mix(seed) ^ mix(stream + 1));
    for (auto& s : s_) s = sm.next();
}

double Xoshiro256::normal() {
    if (has_cached_) {
        has_cached_ = false;
        return cached_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    cached_ = radius * std::sin(angle);
    has_cached_ = true;
    return radius * std::cos(angle);
}

}  // namespace mcsentinel
