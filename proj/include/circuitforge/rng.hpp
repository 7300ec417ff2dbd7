#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <gmpxx.h>
#include <json.hpp>

namespace circuitforge {

std::uint64_t splitmix64(std::uint64_t x);

// Root seed plus a derivation path (record index, lane index, ...).
// Identical (root, path) always yields identical draws, so records can be
// generated in any order or in parallel.
struct SeedPath {
    std::uint64_t root = 0;
    std::vector<std::uint64_t> path;

    SeedPath child(std::uint64_t index) const {
        SeedPath s = *this;
        s.path.push_back(index);
        return s;
    }
    std::uint64_t mix() const;
    nlohmann::ordered_json to_json() const;
};

// mt19937_64 with hand-rolled bounded draws. The standard distributions are
// implementation-defined, so every draw here goes through rejection sampling
// to keep datasets byte-identical across toolchains.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(splitmix64(seed)) {}
    explicit Rng(const SeedPath& sp) : eng_(sp.mix()) {}

    std::uint64_t next() { return eng_(); }

    // Uniform on [0, bound); bound > 0.
    std::uint64_t below(std::uint64_t bound);

    // Uniform on [lo, hi] inclusive.
    std::int64_t int_in(std::int64_t lo, std::int64_t hi);

    // Index drawn proportionally to weights (not all zero).
    std::size_t weighted(const std::vector<std::uint64_t>& weights);

    bool chance(std::uint64_t num, std::uint64_t den) { return below(den) < num; }

    // Uniform on [0, bound) for arbitrary-precision bounds (shape unranking).
    mpz_class below_big(const mpz_class& bound);

private:
    std::mt19937_64 eng_;
};

}  // namespace circuitforge
