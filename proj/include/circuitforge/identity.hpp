#pragma once

#include <cstdint>

#include <json.hpp>

#include "circuitforge/circuit.hpp"

namespace circuitforge {

// Default test field: the Mersenne prime 2^61 - 1. Large enough that a
// single trial's false-equivalent bound D/p is negligible at desk scale.
constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

struct PitResult {
    enum class Verdict { equivalent, not_equivalent };
    enum class Method { exact, randomized };

    Verdict verdict = Verdict::equivalent;
    Method method = Method::exact;
    unsigned trials = 0;        // evaluation points used (0 for exact)
    mpq_class error_bound = 0;  // upper bound on false-equivalent probability

    bool equivalent() const { return verdict == Verdict::equivalent; }
    nlohmann::ordered_json to_json() const;  // schema "pit/1"
};

// Decides equivalence by expanding both circuits to canonical polynomials.
// Certain, but can DegreeOverflow on deliberately deep product chains.
PitResult pit_exact(const Circuit& c1, const Circuit& c2,
                    std::size_t term_cap = kDefaultTermCap);

// Schwartz-Zippel: evaluates both circuits at `trials` uniform points of
// Z/pZ. A disagreement is a certain not_equivalent; full agreement returns
// equivalent with error bound (D/p)^trials where D is the syntactic degree
// bound. Equivalent inputs are never rejected.
PitResult pit_randomized(const Circuit& c1, const Circuit& c2, unsigned trials, std::uint64_t p,
                         std::uint64_t seed);

// Randomized test with automatic fallback to the exact method when the
// circuits cannot be tested mod p (non-embeddable constants, degree >= p).
PitResult pit_auto(const Circuit& c1, const Circuit& c2, unsigned trials, std::uint64_t p,
                   std::uint64_t seed, std::size_t term_cap = kDefaultTermCap);

}  // namespace circuitforge
