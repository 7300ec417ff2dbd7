#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "circuitforge/circuit.hpp"
#include "circuitforge/rng.hpp"

namespace circuitforge {

// Distribution over constant input gates.
struct ConstantDist {
    enum class Kind { none, uniform_int, uniform_digits, fixed_set };
    Kind kind = Kind::none;
    std::int64_t lo = 0, hi = 0;           // uniform_int
    unsigned digits = 1;                   // uniform_digits: exactly k decimal digits
    std::vector<std::string> values;       // fixed_set, canonical literals

    bool present() const { return kind != Kind::none; }
};

// The P1/P2-style gate distribution that populates a circuit class: which
// constants, which variables, and how often each operator kind appears.
struct GateSampler {
    ConstantDist constants;
    std::vector<std::string> var_pool;
    std::vector<std::uint64_t> var_weights;  // empty = uniform over the pool
    std::uint64_t leaf_const_weight = 1;     // leaf kind split when both present
    std::uint64_t leaf_var_weight = 1;
    std::uint64_t sum_weight = 1;            // the paper's q : 1-q operator split
    std::uint64_t product_weight = 1;

    bool has_constants() const { return constants.present(); }
    bool has_variables() const { return !var_pool.empty(); }
    void validate() const;  // throws EmptySamplerError / SpecError

    FieldElement draw_constant(Rng& rng, const FieldDesc& field) const;
    const std::string& draw_variable(Rng& rng) const;
    OpKind draw_op(Rng& rng) const;

    nlohmann::ordered_json to_json() const;
    static GateSampler from_json(const nlohmann::json& j);
    std::string hash() const;  // FNV-1a of the canonical serialization
};

// Binary-tree skeleton with an exact internal-node count and exact height.
struct ShapeNode {
    std::unique_ptr<ShapeNode> left, right;
    bool is_leaf() const { return !left; }
};

struct CircuitShape {
    std::unique_ptr<ShapeNode> root;
    std::uint32_t internal_nodes = 0;
    std::uint32_t height = 0;

    std::string encode() const;  // canonical shape key, for frequency checks
};

// True iff some circuit has exactly size s and depth d: s even, and the
// operator count n = s/2 admits a binary tree of height d
// (ceil(log2(n+1)) <= d <= n), or the degenerate s = 0, d = 0.
bool feasible(std::uint32_t s, std::uint32_t d);

// Number of full binary trees with n internal nodes and height exactly d.
mpz_class shape_count(std::uint32_t n, std::uint32_t d);

// Uniform over skeletons with exactly s/2 internal nodes and height exactly
// d, by ranked unranking against the shape-count table.
CircuitShape sample_shape(std::uint32_t s, std::uint32_t d, Rng& rng);
CircuitShape sample_shape(std::uint32_t s, std::uint32_t d, std::uint64_t seed);

// Draws a circuit of exactly (class.size, class.depth) with gates from the
// sampler. Deterministic given the seed path.
Circuit sample_circuit(const CircuitClass& cls, const GateSampler& sampler, Rng& rng);
Circuit sample_circuit(const CircuitClass& cls, const GateSampler& sampler, const SeedPath& seed);

enum class RewriteRule { commute, rotate_assoc, distribute, factor, fold_const };

RewriteRule rewrite_rule_from_name(const std::string& name);

// Applies one equivalence-preserving rewrite at the given gate (or at a
// seeded random applicable site when site is nullopt). The result computes
// the same polynomial; size and depth may change.
Circuit rewrite(const Circuit& c, RewriteRule rule, std::optional<GateId> site, Rng& rng);

// Chain of `length` random rewrites, each drawn uniformly over all
// applicable (rule, site) pairs.
Circuit rewrite_chain(const Circuit& c, unsigned length, Rng& rng);

// Canonical sum-of-monomials circuit: monomials in graded-lex order summed
// left-deep, each monomial a left-deep product with unit coefficients
// omitted; a bare constant term is a single Const gate.
Circuit expansion_circuit(const Polynomial& p, std::size_t term_cap = kDefaultTermCap);

// k factors, each v^d + c with v from the sampler's variable pool and c from
// its constant distribution, multiplied left-deep.
struct FactoredSpec {
    std::uint32_t factors = 2;
    std::vector<unsigned> degrees = {1};  // broadcast when a single entry

    nlohmann::ordered_json to_json() const;
    static FactoredSpec from_json(const nlohmann::json& j);
};

Circuit sample_factored(const FactoredSpec& spec, const GateSampler& sampler,
                        const FieldDesc& field, Rng& rng);

// Single constant change or Sum<->Product swap, retried until the result is
// verified not polynomial-equal to c. Size and depth are preserved.
Circuit perturb(const Circuit& c, Rng& rng, unsigned retries = 16);

}  // namespace circuitforge
