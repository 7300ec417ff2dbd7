#include "circuitforge/circuit.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>

namespace circuitforge {

std::string EvalTrace::to_text() const {
    std::ostringstream os;
    for (const auto& s : steps) {
        os << "g" << s.gate << " = " << s.left.to_string() << " " << op_symbol(s.op) << " "
           << s.right.to_string() << " -> " << s.result.to_string() << "\n";
    }
    return os.str();
}

const Gate& Circuit::gate(GateId id) const {
    if (id >= gates_.size()) throw UnknownGateError(id);
    return gates_[id];
}

std::span<const GateId> Circuit::children(GateId id) const {
    if (id >= gates_.size()) throw UnknownGateError(id);
    return children_[id];
}

void Circuit::finalize() {
    children_.assign(gates_.size(), {});
    for (const auto& [child, parent] : edges_) children_[parent].push_back(child);

    operator_count_ = 0;
    std::set<std::string, ShortLex> vars;
    for (const auto& g : gates_) {
        if (g.is_operator()) ++operator_count_;
        if (g.kind == GateKind::variable) vars.insert(g.var);
    }
    variables_.assign(vars.begin(), vars.end());

    // Longest input-to-output path, in edges. Gate ids are already verified
    // acyclic; children precede parents in any topological scan we do here.
    std::vector<std::uint32_t> lp(gates_.size(), 0);
    std::vector<GateId> order;
    order.reserve(gates_.size());
    {
        std::vector<std::uint32_t> pending(gates_.size(), 0);
        std::priority_queue<GateId, std::vector<GateId>, std::greater<>> ready;
        for (const auto& g : gates_) {
            pending[g.id] = static_cast<std::uint32_t>(children_[g.id].size());
            if (pending[g.id] == 0) ready.push(g.id);
        }
        std::vector<std::vector<GateId>> parents(gates_.size());
        for (const auto& [child, parent] : edges_) parents[child].push_back(parent);
        while (!ready.empty()) {
            GateId g = ready.top();
            ready.pop();
            order.push_back(g);
            for (GateId p : parents[g])
                if (--pending[p] == 0) ready.push(p);
        }
    }
    for (GateId g : order) {
        for (GateId c : children_[g]) lp[g] = std::max(lp[g], lp[c] + 1);
    }
    depth_ = lp[output_];
}

Circuit build_circuit(std::vector<Gate> gates, std::vector<std::pair<GateId, GateId>> edges,
                      GateId output, std::optional<FieldDesc> field) {
    const std::size_t n = gates.size();
    if (n == 0) throw DataError("circuit has no gates");
    for (std::size_t i = 0; i < n; ++i)
        if (gates[i].id != i) throw DataError("gate ids must be dense and in order");
    for (const auto& [child, parent] : edges) {
        if (child >= n) throw UnknownGateError(child);
        if (parent >= n) throw UnknownGateError(parent);
    }
    if (output >= n) throw UnknownGateError(output);

    std::vector<std::uint32_t> fan_in(n, 0), fan_out(n, 0);
    for (const auto& [child, parent] : edges) {
        ++fan_in[parent];
        ++fan_out[child];
    }

    // Cycle check first: a back-edge is reported as a cycle even though it
    // also breaks fan-in counts.
    {
        std::vector<std::uint32_t> pending = fan_in;
        std::queue<GateId> ready;
        for (std::size_t i = 0; i < n; ++i)
            if (pending[i] == 0) ready.push(static_cast<GateId>(i));
        std::size_t seen = 0;
        std::vector<std::vector<GateId>> parents(n);
        for (const auto& [child, parent] : edges) parents[child].push_back(parent);
        while (!ready.empty()) {
            GateId g = ready.front();
            ready.pop();
            ++seen;
            for (GateId p : parents[g])
                if (--pending[p] == 0) ready.push(p);
        }
        if (seen != n) throw CycleDetectedError();
    }

    for (std::size_t i = 0; i < n; ++i) {
        const Gate& g = gates[i];
        if (g.is_input() && fan_in[i] != 0) throw FanInViolationError(g.id);
        if (g.is_operator() && fan_in[i] != 2) throw FanInViolationError(g.id);
        if (g.is_operator() && fan_out[i] > 1) throw FanOutViolationError(g.id);
    }

    if (n == 1) {
        if (!gates[0].is_input() || output != 0) throw AmbiguousOutputError();
    } else {
        if (!gates[output].is_operator() || fan_out[output] != 0) throw AmbiguousOutputError();
        for (std::size_t i = 0; i < n; ++i)
            if (i != output && gates[i].is_operator() && fan_out[i] == 0)
                throw AmbiguousOutputError();
    }

    // Every gate must lie on a path into the output.
    {
        std::vector<bool> reach(n, false);
        std::vector<std::vector<GateId>> kids(n);
        for (const auto& [child, parent] : edges) kids[parent].push_back(child);
        std::vector<GateId> stack{output};
        reach[output] = true;
        while (!stack.empty()) {
            GateId g = stack.back();
            stack.pop_back();
            for (GateId c : kids[g])
                if (!reach[c]) {
                    reach[c] = true;
                    stack.push_back(c);
                }
        }
        for (std::size_t i = 0; i < n; ++i)
            if (!reach[i]) throw DanglingGateError(static_cast<GateId>(i));
    }

    // Field descriptor: explicit, else taken from constant gates.
    FieldDesc fd = field.value_or(FieldDesc::rational());
    bool fd_known = field.has_value();
    for (const auto& g : gates) {
        if (g.kind != GateKind::constant) continue;
        if (!fd_known) {
            fd = g.value.field();
            fd_known = true;
        } else if (g.value.field() != fd) {
            throw MixedFieldError("constant gates span different fields");
        }
    }

    Circuit c;
    c.gates_ = std::move(gates);
    c.edges_ = std::move(edges);
    c.output_ = output;
    c.field_ = fd;
    c.finalize();
    return c;
}

unsigned Circuit::gate_degree(GateId v) const {
    if (v >= gates_.size()) throw UnknownGateError(v);
    std::vector<int> memo(gates_.size(), -1);
    // Iterative post-order; operator fan-out <= 1 keeps this linear.
    std::vector<std::pair<GateId, bool>> stack{{v, false}};
    while (!stack.empty()) {
        auto [g, expanded] = stack.back();
        stack.pop_back();
        if (memo[g] >= 0) continue;
        const Gate& gate = gates_[g];
        if (gate.kind == GateKind::constant) {
            memo[g] = 0;
        } else if (gate.kind == GateKind::variable) {
            memo[g] = 1;
        } else if (!expanded) {
            stack.push_back({g, true});
            for (GateId ch : children_[g]) stack.push_back({ch, false});
        } else {
            int a = memo[children_[g][0]], b = memo[children_[g][1]];
            memo[g] = gate.kind == GateKind::sum ? std::max(a, b) : a + b;
        }
    }
    return static_cast<unsigned>(memo[v]);
}

std::pair<FieldElement, EvalTrace> Circuit::evaluate(const Assignment& assignment) const {
    std::vector<std::optional<FieldElement>> val(gates_.size());
    EvalTrace trace;

    // Deterministic topological order: children before parents, ties by id.
    std::vector<std::uint32_t> pending(gates_.size(), 0);
    std::vector<std::vector<GateId>> parents(gates_.size());
    for (const auto& [child, parent] : edges_) {
        ++pending[parent];
        parents[child].push_back(parent);
    }
    std::priority_queue<GateId, std::vector<GateId>, std::greater<>> ready;
    for (const auto& g : gates_)
        if (pending[g.id] == 0) ready.push(g.id);

    while (!ready.empty()) {
        GateId id = ready.top();
        ready.pop();
        const Gate& g = gates_[id];
        switch (g.kind) {
            case GateKind::constant:
                val[id] = g.value;
                break;
            case GateKind::variable: {
                auto it = assignment.find(g.var);
                if (it == assignment.end()) throw MissingVariableError(g.var);
                if (it->second.field() != field_) throw MixedFieldError();
                val[id] = it->second;
                break;
            }
            case GateKind::sum:
            case GateKind::product: {
                const FieldElement& l = *val[children_[id][0]];
                const FieldElement& r = *val[children_[id][1]];
                FieldElement out = field_op(l, r, g.op());
                trace.steps.push_back({id, g.op(), l, r, out});
                val[id] = std::move(out);
                break;
            }
        }
        for (GateId p : parents[id])
            if (--pending[p] == 0) ready.push(p);
    }

    trace.final_value = *val[output_];
    return {*val[output_], std::move(trace)};
}

Circuit Circuit::subcircuit(GateId v) const {
    if (v >= gates_.size()) throw UnknownGateError(v);
    if (gates_[v].is_input()) {
        if (gates_.size() == 1) return *this;
        throw NotARootError(v);
    }

    std::vector<bool> keep(gates_.size(), false);
    std::vector<GateId> stack{v};
    keep[v] = true;
    while (!stack.empty()) {
        GateId g = stack.back();
        stack.pop_back();
        for (GateId c : children_[g])
            if (!keep[c]) {
                keep[c] = true;
                stack.push_back(c);
            }
    }

    std::vector<GateId> remap(gates_.size(), 0);
    std::vector<Gate> sub_gates;
    for (GateId i = 0; i < gates_.size(); ++i) {
        if (!keep[i]) continue;
        remap[i] = static_cast<GateId>(sub_gates.size());
        Gate g = gates_[i];
        g.id = remap[i];
        sub_gates.push_back(std::move(g));
    }
    std::vector<std::pair<GateId, GateId>> sub_edges;
    for (const auto& [child, parent] : edges_)
        if (keep[child] && keep[parent]) sub_edges.emplace_back(remap[child], remap[parent]);

    return build_circuit(std::move(sub_gates), std::move(sub_edges), remap[v], field_);
}

Polynomial Circuit::to_polynomial(std::size_t term_cap) const {
    std::vector<std::optional<Polynomial>> memo(gates_.size());
    std::vector<std::pair<GateId, bool>> stack{{output_, false}};
    while (!stack.empty()) {
        auto [g, expanded] = stack.back();
        stack.pop_back();
        if (memo[g]) continue;
        const Gate& gate = gates_[g];
        if (gate.kind == GateKind::constant) {
            memo[g] = Polynomial::constant(gate.value);
        } else if (gate.kind == GateKind::variable) {
            memo[g] = Polynomial::variable(gate.var, field_);
        } else if (!expanded) {
            stack.push_back({g, true});
            for (GateId ch : children_[g]) stack.push_back({ch, false});
        } else {
            Polynomial r =
                poly_combine(*memo[children_[g][0]], *memo[children_[g][1]], gate.op());
            if (r.term_count() > term_cap) throw DegreeOverflowError(term_cap);
            memo[g] = std::move(r);
        }
    }
    return *memo[output_];
}

bool Circuit::has_shared_leaves() const {
    std::vector<std::uint32_t> fan_out(gates_.size(), 0);
    for (const auto& [child, parent] : edges_) ++fan_out[child];
    for (const auto& g : gates_)
        if (g.is_input() && fan_out[g.id] > 1) return true;
    return false;
}

Circuit Circuit::normalize_leaves() const {
    if (!has_shared_leaves()) return *this;
    return formula_to_circuit(*circuit_to_formula(*this), field_);
}

// -- circuit/1 JSON ------------------------------------------------------------

static nlohmann::ordered_json field_to_json(const FieldDesc& f) {
    nlohmann::ordered_json j;
    if (f.kind == FieldDesc::Kind::rational) {
        j["kind"] = "rational";
    } else {
        j["kind"] = "prime";
        j["p"] = f.p;
    }
    return j;
}

static FieldDesc field_from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "rational") return FieldDesc::rational();
    if (kind == "prime") return FieldDesc::prime(j.at("p").get<std::uint64_t>());
    throw DataError("unknown field kind '" + kind + "'");
}

nlohmann::ordered_json Circuit::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "circuit/1";
    auto& gs = j["gates"] = nlohmann::ordered_json::array();
    for (const auto& g : gates_) {
        nlohmann::ordered_json gj;
        gj["id"] = g.id;
        switch (g.kind) {
            case GateKind::constant:
                gj["kind"] = "const";
                gj["value"] = g.value.to_string();
                break;
            case GateKind::variable:
                gj["kind"] = "var";
                gj["name"] = g.var;
                break;
            case GateKind::sum:
                gj["kind"] = "sum";
                break;
            case GateKind::product:
                gj["kind"] = "product";
                break;
        }
        gs.push_back(std::move(gj));
    }
    auto sorted = edges_;
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second < b.second : a.first < b.first;
    });
    auto& es = j["edges"] = nlohmann::ordered_json::array();
    for (const auto& [child, parent] : sorted) es.push_back({child, parent});
    j["output"] = output_;
    j["field"] = field_to_json(field_);
    return j;
}

Circuit Circuit::from_json(const nlohmann::json& j) {
    if (j.value("schema", "") != "circuit/1") throw DataError("expected schema \"circuit/1\"");
    FieldDesc fd = field_from_json(j.at("field"));
    std::vector<Gate> gates;
    for (const auto& gj : j.at("gates")) {
        GateId id = gj.at("id").get<GateId>();
        const std::string kind = gj.at("kind").get<std::string>();
        if (kind == "const")
            gates.push_back(Gate::make_const(id, FieldElement::parse(gj.at("value"), fd)));
        else if (kind == "var")
            gates.push_back(Gate::make_var(id, gj.at("name").get<std::string>()));
        else if (kind == "sum")
            gates.push_back(Gate::make_op(id, OpKind::sum));
        else if (kind == "product")
            gates.push_back(Gate::make_op(id, OpKind::product));
        else
            throw DataError("unknown gate kind '" + kind + "'");
    }
    std::vector<std::pair<GateId, GateId>> edges;
    for (const auto& ej : j.at("edges"))
        edges.emplace_back(ej.at(0).get<GateId>(), ej.at(1).get<GateId>());
    return build_circuit(std::move(gates), std::move(edges), j.at("output").get<GateId>(), fd);
}

// -- CircuitClass ----------------------------------------------------------------

std::string CircuitClass::key() const {
    std::ostringstream os;
    os << field.to_string() << "|X=";
    for (std::size_t i = 0; i < variables.size(); ++i) os << (i ? "," : "") << variables[i];
    os << "|s=" << size << "|d=" << depth;
    if (degree_bound) os << "|deg<=" << *degree_bound;
    return os.str();
}

nlohmann::ordered_json CircuitClass::to_json() const {
    nlohmann::ordered_json j;
    j["field"] = field_to_json(field);
    j["variables"] = variables;
    j["size"] = size;
    j["depth"] = depth;
    if (degree_bound) j["degree_bound"] = *degree_bound;
    return j;
}

CircuitClass CircuitClass::from_json(const nlohmann::json& j) {
    CircuitClass c;
    c.field = field_from_json(j.at("field"));
    if (j.contains("variables"))
        for (const auto& v : j.at("variables")) c.variables.push_back(v.get<std::string>());
    std::sort(c.variables.begin(), c.variables.end(), ShortLex{});
    c.size = j.at("size").get<std::uint32_t>();
    c.depth = j.at("depth").get<std::uint32_t>();
    if (j.contains("degree_bound")) c.degree_bound = j.at("degree_bound").get<unsigned>();
    return c;
}

// -- formula trees ------------------------------------------------------------------

FormulaPtr Formula::make_const(FieldElement v) {
    auto f = std::make_unique<Formula>();
    f->kind = GateKind::constant;
    f->value = std::move(v);
    return f;
}

FormulaPtr Formula::make_var(std::string name) {
    auto f = std::make_unique<Formula>();
    f->kind = GateKind::variable;
    f->var = std::move(name);
    return f;
}

FormulaPtr Formula::make_op(OpKind op, FormulaPtr l, FormulaPtr r) {
    auto f = std::make_unique<Formula>();
    f->kind = op == OpKind::sum ? GateKind::sum : GateKind::product;
    f->left = std::move(l);
    f->right = std::move(r);
    return f;
}

FormulaPtr Formula::clone() const {
    auto f = std::make_unique<Formula>();
    f->kind = kind;
    f->value = value;
    f->var = var;
    if (left) f->left = left->clone();
    if (right) f->right = right->clone();
    return f;
}

static FormulaPtr gate_to_formula(const Circuit& c, GateId id) {
    const Gate& g = c.gate(id);
    switch (g.kind) {
        case GateKind::constant:
            return Formula::make_const(g.value);
        case GateKind::variable:
            return Formula::make_var(g.var);
        default: {
            auto kids = c.children(id);
            return Formula::make_op(g.op(), gate_to_formula(c, kids[0]),
                                    gate_to_formula(c, kids[1]));
        }
    }
}

FormulaPtr circuit_to_formula(const Circuit& c) { return gate_to_formula(c, c.output()); }

static GateId emit_formula(const Formula& f, std::vector<Gate>& gates,
                           std::vector<std::pair<GateId, GateId>>& edges) {
    if (f.kind == GateKind::constant) {
        GateId id = static_cast<GateId>(gates.size());
        gates.push_back(Gate::make_const(id, f.value));
        return id;
    }
    if (f.kind == GateKind::variable) {
        GateId id = static_cast<GateId>(gates.size());
        gates.push_back(Gate::make_var(id, f.var));
        return id;
    }
    GateId l = emit_formula(*f.left, gates, edges);
    GateId r = emit_formula(*f.right, gates, edges);
    GateId id = static_cast<GateId>(gates.size());
    gates.push_back(Gate::make_op(id, f.op()));
    edges.emplace_back(l, id);
    edges.emplace_back(r, id);
    return id;
}

Circuit formula_to_circuit(const Formula& f, FieldDesc field) {
    std::vector<Gate> gates;
    std::vector<std::pair<GateId, GateId>> edges;
    GateId out = emit_formula(f, gates, edges);
    return build_circuit(std::move(gates), std::move(edges), out, field);
}

}  // namespace circuitforge
