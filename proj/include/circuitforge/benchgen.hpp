#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "circuitforge/generate.hpp"
#include "circuitforge/textio.hpp"

namespace circuitforge {

enum class Task { evaluate, pit, expand, factor };

std::string task_name(Task t);
Task task_from_name(const std::string& name);

// One benchmark item. The target is verified against the semantic oracle at
// generation time and again by audit_dataset.
struct DatasetRecord {
    std::uint64_t id = 0;
    Task task = Task::evaluate;
    std::string input;
    std::string target;
    std::vector<Circuit> circuits;  // one, or two for pit / seq2seq pairs
    CircuitClass cls;
    SeedPath seed;
    nlohmann::ordered_json meta;

    nlohmann::ordered_json to_json() const;
    static DatasetRecord from_json(const nlohmann::json& j);
};

// -- task generators -------------------------------------------------------------

// Constant-only circuits by default; with_variables adds per-record variable
// bindings, recorded under meta.assignment.
std::vector<DatasetRecord> gen_evaluate(const CircuitClass& cls, const GateSampler& sampler,
                                        std::uint64_t n, std::uint64_t seed,
                                        Style style = Style::infix, bool with_variables = false);

// ceil(n/2) equivalent pairs built by rewrite chains (label 1, syntactically
// distinct) and floor(n/2) perturbed pairs (label 0), alternating by id.
// Every label is verified by the exact identity test.
std::vector<DatasetRecord> gen_pit(unsigned chain_length, unsigned retries,
                                   const CircuitClass& cls, const GateSampler& sampler,
                                   std::uint64_t n, std::uint64_t seed,
                                   Style style = Style::infix);

// direction = expand pairs a factored rendering with its canonical
// sum-of-monomials rendering; factor swaps input and target.
std::vector<DatasetRecord> gen_seq2seq(Task direction, const FactoredSpec& spec,
                                       const GateSampler& sampler, const FieldDesc& field,
                                       std::uint64_t n, std::uint64_t seed,
                                       Style style = Style::infix);

// -- dataset audit ------------------------------------------------------------------

// Re-verifies every record through the parse -> polynomial route, which is
// independent of the gate-order evaluation used at generation time.
struct AuditReport {
    std::uint64_t checked = 0;
    std::vector<std::uint64_t> failed_ids;

    bool ok() const { return failed_ids.empty(); }
};

AuditReport audit_dataset(const std::vector<DatasetRecord>& records);

// -- dataset files ("dataset/1" JSON Lines) -------------------------------------------

std::string dataset_to_string(const std::vector<DatasetRecord>& records,
                              const std::string& config_hash);
void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records,
                   const std::string& config_hash);

struct Dataset {
    std::string config_hash;
    std::vector<DatasetRecord> records;
};

Dataset read_dataset(const std::string& path);

// -- split design -----------------------------------------------------------------------

// One side item: a circuit class, the sampler populating it, and how many
// records to draw.
struct GenSpec {
    CircuitClass cls;
    GateSampler sampler;
    std::uint64_t count = 0;

    nlohmann::ordered_json to_json() const;
    static GenSpec from_json(const nlohmann::json& j);
};

using SplitSide = std::vector<GenSpec>;

SplitSide split_side_from_json(const nlohmann::json& j);

enum class SplitMode { systematic, productive, custom };

std::string split_mode_name(SplitMode m);
SplitMode split_mode_from_name(const std::string& name);

struct SplitManifest {
    SplitSide train, test;
    SplitMode mode = SplitMode::custom;
    bool systematic = false;  // same (s,d,X) classes, different samplers
    bool productive = false;  // disjoint (s,d) classes
    nlohmann::ordered_json support;  // variable / operator / constant support report
    std::vector<std::string> warnings;

    nlohmann::ordered_json to_json() const;  // schema "split/1"
};

// Validates the requested mode against the class structure and reports
// basis-support relations. Box-1 violations on variables or operators
// become warnings, never silent failures; constant-support divergence is
// reported without warning (it is the experiment in length-generalization
// style splits).
SplitManifest design_split(const SplitSide& train, const SplitSide& test, SplitMode mode);

// -- circuit divergence --------------------------------------------------------------------

struct PropertyDivergence {
    mpq_class w1 = 0;       // exact Wasserstein-1 between empirical samples
    mpq_class jaccard = 1;  // support overlap
};

struct DivergenceReport {
    // keys: size, depth, degree, variable_count, constant_magnitude
    std::map<std::string, PropertyDivergence> properties;
    bool systematic = false;
    bool productive = false;

    nlohmann::ordered_json to_json() const;  // schema "divergence/1"
};

// Per-property divergence vector over the records' primary circuits.
// Constant magnitude uses the decimal digit count of integer values and a
// log-magnitude bucket otherwise. Never aggregated into one scalar.
DivergenceReport divergence(const std::vector<DatasetRecord>& train,
                            const std::vector<DatasetRecord>& test);

// Exact W1 between two one-dimensional empirical distributions.
mpq_class wasserstein1(std::vector<long long> a, std::vector<long long> b);

std::uint64_t constant_magnitude(const FieldElement& v);

// FNV-1a over a canonical serialization; used for config and sampler hashes.
std::string fnv1a_hex(const std::string& text);

}  // namespace circuitforge
