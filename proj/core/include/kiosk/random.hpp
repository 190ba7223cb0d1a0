#pragma once
/**
 * @file random.hpp
 * @brief Portable, seeded random sampling.
 *
 * The generator is xoshiro256** (Blackman & Vigna, 2018) seeded by expanding
 * a 64-bit seed with SplitMix64. Uniform doubles take the top 53 bits.
 * Normal variates use the Marsaglia polar method. No standard library
 * distribution is used, so draw sequences do not depend on the C++ runtime.
 */

#include <array>
#include <cstdint>

#include "kiosk/catalog.hpp"

namespace kiosk {

/// SplitMix64 finalizer (Stafford variant 13).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the stream used by cell `cell_index` of a sweep seeded with
/// `master`. Stable across releases; pinned by golden tests.
std::uint64_t derive_cell_seed(std::uint64_t master, std::uint64_t cell_index) noexcept;

/// Single-owner xoshiro256** stream.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) noexcept;

    std::uint64_t next_u64() noexcept;
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform() noexcept;
    /// Standard normal variate.
    double standard_normal() noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::array<std::uint64_t, 4> state_{};
    std::uint64_t seed_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

struct BernoulliDraw {
    bool success = false;
    double q = 0.0;  ///< the uniform that decided the outcome; success == (q < p)
};

/// Throws DomainError unless p in [0, 1].
BernoulliDraw bernoulli(RandomStream& stream, double p);

/// Index i with probability weight_i / sum(weights). One uniform per call.
std::size_t sample_category(RandomStream& stream, const CategoryCatalog& catalog);

/// Normal(price_mean, price_std) redrawn until strictly positive; throws
/// SamplingError after `max_redraws` rejections.
double sample_price(RandomStream& stream, const Category& category, int max_redraws = 1000);

}  // namespace kiosk
