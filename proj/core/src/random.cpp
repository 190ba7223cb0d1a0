#include "kiosk/random.hpp"

#include <cmath>
#include <string>

#include "kiosk/errors.hpp"

namespace kiosk {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

std::uint64_t derive_cell_seed(std::uint64_t master, std::uint64_t cell_index) noexcept {
    // Two finalizer rounds: the first decorrelates the master seed, the
    // second folds in the index. For a fixed master the map is a bijection
    // of cell_index, so distinct cells never share a seed.
    return mix64(mix64(master + kGolden) ^ (cell_index * kGolden + 0x632be59bd9b4e019ULL));
}

RandomStream::RandomStream(std::uint64_t seed) noexcept : seed_(seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) {
        s += kGolden;
        word = mix64(s);
    }
}

std::uint64_t RandomStream::next_u64() noexcept {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RandomStream::uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomStream::standard_normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    double x = 0.0;
    double y = 0.0;
    double s = 0.0;
    do {
        x = 2.0 * uniform() - 1.0;
        y = 2.0 * uniform() - 1.0;
        s = x * x + y * y;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_normal_ = y * scale;
    has_spare_ = true;
    return x * scale;
}

BernoulliDraw bernoulli(RandomStream& stream, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw DomainError("bernoulli probability must lie in [0, 1], got " + std::to_string(p));
    }
    const double q = stream.uniform();
    return {q < p, q};
}

std::size_t sample_category(RandomStream& stream, const CategoryCatalog& catalog) {
    const double q = stream.uniform();
    const auto& cumulative = catalog.cumulative_weights();
    for (std::size_t i = 0; i + 1 < cumulative.size(); ++i) {
        if (q < cumulative[i]) return i;
    }
    return cumulative.size() - 1;
}

double sample_price(RandomStream& stream, const Category& category, int max_redraws) {
    for (int attempt = 0; attempt <= max_redraws; ++attempt) {
        const double price = category.price_mean + category.price_std * stream.standard_normal();
        if (price > 0.0) return price;
    }
    throw SamplingError("price distribution of '" + category.name + "' produced no positive draw in " +
                        std::to_string(max_redraws) + " redraws");
}

}  // namespace kiosk
