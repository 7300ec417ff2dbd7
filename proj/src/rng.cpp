#include "circuitforge/rng.hpp"

#include <stdexcept>

namespace circuitforge {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t SeedPath::mix() const {
    std::uint64_t s = splitmix64(root);
    for (std::uint64_t c : path) s = splitmix64(s ^ splitmix64(c + 0x632be59bd9b4e019ULL));
    return s;
}

nlohmann::ordered_json SeedPath::to_json() const {
    nlohmann::ordered_json j;
    j["root"] = root;
    j["path"] = path;
    return j;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("Rng::below bound must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
        r = next();
    } while (r >= limit);
    return r % bound;
}

std::int64_t Rng::int_in(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw std::invalid_argument("Rng::int_in empty range");
    std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) + 1;
    if (span == 0) return static_cast<std::int64_t>(next());  // full 64-bit range
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span));
}

std::size_t Rng::weighted(const std::vector<std::uint64_t>& weights) {
    std::uint64_t total = 0;
    for (auto w : weights) total += w;
    if (total == 0) throw std::invalid_argument("Rng::weighted all-zero weights");
    std::uint64_t r = below(total);
    for (std::size_t i = 0; i < weights.size(); ++i) {
        if (r < weights[i]) return i;
        r -= weights[i];
    }
    return weights.size() - 1;  // unreachable
}

mpz_class Rng::below_big(const mpz_class& bound) {
    if (bound <= 0) throw std::invalid_argument("Rng::below_big bound must be positive");
    const std::size_t bits = mpz_sizeinbase(bound.get_mpz_t(), 2);
    const std::size_t limbs = (bits + 63) / 64;
    const unsigned top_bits = static_cast<unsigned>(bits - (limbs - 1) * 64);
    const std::uint64_t top_mask =
        top_bits == 64 ? UINT64_MAX : ((std::uint64_t{1} << top_bits) - 1);
    while (true) {
        mpz_class r = 0;
        for (std::size_t i = 0; i < limbs; ++i) {
            std::uint64_t limb = next();
            if (i == 0) limb &= top_mask;  // most significant limb first
            mpz_mul_2exp(r.get_mpz_t(), r.get_mpz_t(), 64);
            mpz_class limb_z;
            mpz_import(limb_z.get_mpz_t(), 1, 1, sizeof(limb), 0, 0, &limb);
            r += limb_z;
        }
        if (r < bound) return r;
    }
}

}  // namespace circuitforge
