#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "circuitforge/polynomial.hpp"

namespace circuitforge {

using GateId = std::uint32_t;

enum class GateKind { constant, variable, sum, product };

struct Gate {
    GateId id = 0;
    GateKind kind = GateKind::constant;
    FieldElement value;  // constant gates
    std::string var;     // variable gates

    static Gate make_const(GateId id, FieldElement v) {
        return {id, GateKind::constant, std::move(v), {}};
    }
    static Gate make_var(GateId id, std::string name) {
        return {id, GateKind::variable, FieldElement(), std::move(name)};
    }
    static Gate make_op(GateId id, OpKind op) {
        return {id, op == OpKind::sum ? GateKind::sum : GateKind::product, FieldElement(), {}};
    }

    bool is_input() const { return kind == GateKind::constant || kind == GateKind::variable; }
    bool is_operator() const { return !is_input(); }
    OpKind op() const { return kind == GateKind::sum ? OpKind::sum : OpKind::product; }
};

struct TraceStep {
    GateId gate;
    OpKind op;
    FieldElement left, right, result;
};

// One step per operator gate, children before parents, ties broken by gate
// id, so regenerated traces are byte-identical.
struct EvalTrace {
    std::vector<TraceStep> steps;
    FieldElement final_value;

    // "g<k> = <left> <op> <right> -> <value>" per step, newline-terminated.
    std::string to_text() const;
};

constexpr std::size_t kDefaultTermCap = 1'000'000;

// Directed acyclic graph of constant/variable/sum/product gates with a
// single output. Operator gates have fan-in exactly 2 and fan-out at most 1
// (so the operators form a tree); input gates may feed several parents. A
// lone input gate is a valid degenerate circuit of size 0 and depth 0.
//
// Immutable after construction; every accessor is const and pure.
class Circuit {
public:
    const std::vector<Gate>& gates() const { return gates_; }
    const Gate& gate(GateId id) const;
    const std::vector<std::pair<GateId, GateId>>& edges() const { return edges_; }
    std::span<const GateId> children(GateId id) const;
    GateId output() const { return output_; }
    const FieldDesc& field() const { return field_; }
    // Variables appearing in the circuit, shortlex order.
    const std::vector<std::string>& variables() const { return variables_; }

    std::uint32_t size() const { return static_cast<std::uint32_t>(edges_.size()); }
    std::uint32_t depth() const { return depth_; }
    std::uint32_t operator_count() const { return operator_count_; }

    // Syntactic degree: Const 0, Var 1, Sum max, Product sum. An upper bound
    // on the canonical degree of the polynomial rooted at v.
    unsigned gate_degree(GateId v) const;
    unsigned degree() const { return gate_degree(output_); }

    std::pair<FieldElement, EvalTrace> evaluate(const Assignment& assignment) const;

    // Induced circuit on the ancestors of v, with v as output.
    Circuit subcircuit(GateId v) const;

    Polynomial to_polynomial(std::size_t term_cap = kDefaultTermCap) const;

    bool has_shared_leaves() const;
    // Duplicates shared input gates so the whole circuit is a strict formula
    // tree (the form token strings map onto). Identity when already a tree.
    Circuit normalize_leaves() const;

    nlohmann::ordered_json to_json() const;  // schema "circuit/1"
    static Circuit from_json(const nlohmann::json& j);

    friend Circuit build_circuit(std::vector<Gate> gates,
                                 std::vector<std::pair<GateId, GateId>> edges, GateId output,
                                 std::optional<FieldDesc> field);

private:
    Circuit() = default;
    void finalize();  // caches children/depth/variables after validation

    std::vector<Gate> gates_;
    std::vector<std::pair<GateId, GateId>> edges_;  // (child, parent), construction order
    GateId output_ = 0;
    FieldDesc field_;
    std::vector<std::string> variables_;
    std::vector<std::vector<GateId>> children_;  // operand order = edge order
    std::uint32_t depth_ = 0;
    std::uint32_t operator_count_ = 0;
};

// Validates and freezes a circuit. Gate ids must be dense (gates[i].id == i);
// edges are (child, parent) pairs whose order fixes operand order. The field
// is taken from constant gates when not given explicitly.
Circuit build_circuit(std::vector<Gate> gates, std::vector<std::pair<GateId, GateId>> edges,
                      GateId output, std::optional<FieldDesc> field = std::nullopt);

// The (F, X, s, d) class descriptor circuits are sampled from.
struct CircuitClass {
    FieldDesc field;
    std::vector<std::string> variables;
    std::uint32_t size = 0;
    std::uint32_t depth = 0;
    std::optional<unsigned> degree_bound;

    bool operator==(const CircuitClass&) const = default;
    std::string key() const;  // stable string used for per-class breakdowns
    nlohmann::ordered_json to_json() const;
    static CircuitClass from_json(const nlohmann::json& j);
};

// Strict binary expression tree over the gate grammar. Sampling, rewriting
// and token rendering all operate on this form; conversion back to a Circuit
// numbers gates in post-order, which keeps the "circuit/1" edge encoding
// (sorted by parent, then child) faithful to operand order.
struct Formula {
    GateKind kind = GateKind::constant;
    FieldElement value;
    std::string var;
    std::unique_ptr<Formula> left, right;

    static std::unique_ptr<Formula> make_const(FieldElement v);
    static std::unique_ptr<Formula> make_var(std::string name);
    static std::unique_ptr<Formula> make_op(OpKind op, std::unique_ptr<Formula> l,
                                            std::unique_ptr<Formula> r);
    std::unique_ptr<Formula> clone() const;
    bool is_input() const { return kind == GateKind::constant || kind == GateKind::variable; }
    OpKind op() const { return kind == GateKind::sum ? OpKind::sum : OpKind::product; }
};

using FormulaPtr = std::unique_ptr<Formula>;

// Duplicates shared leaves; the result mirrors normalize_leaves().
FormulaPtr circuit_to_formula(const Circuit& c);
Circuit formula_to_circuit(const Formula& f, FieldDesc field);

}  // namespace circuitforge
