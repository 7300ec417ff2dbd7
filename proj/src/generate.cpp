#include "circuitforge/generate.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <sstream>

namespace circuitforge {

// -- gate sampler ---------------------------------------------------------------

void GateSampler::validate() const {
    if (!has_constants() && !has_variables()) throw EmptySamplerError();
    if (!var_weights.empty() && var_weights.size() != var_pool.size())
        throw SpecError("variable weights do not match the pool");
    if (constants.kind == ConstantDist::Kind::uniform_int && constants.lo > constants.hi)
        throw SpecError("empty uniform_int range");
    if (constants.kind == ConstantDist::Kind::uniform_digits && constants.digits == 0)
        throw SpecError("uniform_digits needs at least one digit");
    if (constants.kind == ConstantDist::Kind::fixed_set && constants.values.empty())
        throw EmptySamplerError("fixed_set constant distribution is empty");
    if (sum_weight + product_weight == 0) throw SpecError("operator weights are all zero");
}

FieldElement GateSampler::draw_constant(Rng& rng, const FieldDesc& field) const {
    std::int64_t n = 0;
    switch (constants.kind) {
        case ConstantDist::Kind::none:
            throw EmptySamplerError("sampler has no constant distribution");
        case ConstantDist::Kind::uniform_int:
            n = rng.int_in(constants.lo, constants.hi);
            break;
        case ConstantDist::Kind::uniform_digits: {
            if (constants.digits == 1) {
                n = rng.int_in(0, 9);
            } else {
                std::int64_t lo = 1;
                for (unsigned i = 1; i < constants.digits; ++i) lo *= 10;
                n = rng.int_in(lo, lo * 10 - 1);
            }
            break;
        }
        case ConstantDist::Kind::fixed_set: {
            const std::string& text = constants.values[rng.below(constants.values.size())];
            return FieldElement::parse(text, field);
        }
    }
    if (field.kind == FieldDesc::Kind::rational) return FieldElement::rational(n);
    std::uint64_t v = n >= 0 ? static_cast<std::uint64_t>(n) % field.p
                             : field.p - (static_cast<std::uint64_t>(-n) % field.p);
    return FieldElement::prime(v % field.p, field.p);
}

const std::string& GateSampler::draw_variable(Rng& rng) const {
    if (!has_variables()) throw EmptySamplerError("sampler has no variable pool");
    if (var_weights.empty()) return var_pool[rng.below(var_pool.size())];
    return var_pool[rng.weighted(var_weights)];
}

OpKind GateSampler::draw_op(Rng& rng) const {
    return rng.weighted({sum_weight, product_weight}) == 0 ? OpKind::sum : OpKind::product;
}

nlohmann::ordered_json GateSampler::to_json() const {
    nlohmann::ordered_json j;
    switch (constants.kind) {
        case ConstantDist::Kind::none:
            j["constants"] = nullptr;
            break;
        case ConstantDist::Kind::uniform_int:
            j["constants"] = {{"kind", "uniform_int"}, {"lo", constants.lo}, {"hi", constants.hi}};
            break;
        case ConstantDist::Kind::uniform_digits:
            j["constants"] = {{"kind", "uniform_digits"}, {"digits", constants.digits}};
            break;
        case ConstantDist::Kind::fixed_set:
            j["constants"] = {{"kind", "fixed_set"}, {"values", constants.values}};
            break;
    }
    if (has_variables()) {
        nlohmann::ordered_json v;
        v["pool"] = var_pool;
        if (!var_weights.empty()) v["weights"] = var_weights;
        j["variables"] = std::move(v);
    } else {
        j["variables"] = nullptr;
    }
    j["leaf_weights"] = {{"constant", leaf_const_weight}, {"variable", leaf_var_weight}};
    j["operator_weights"] = {{"sum", sum_weight}, {"product", product_weight}};
    return j;
}

GateSampler GateSampler::from_json(const nlohmann::json& j) {
    GateSampler s;
    if (j.contains("constants") && !j.at("constants").is_null()) {
        const auto& c = j.at("constants");
        const std::string kind = c.at("kind").get<std::string>();
        if (kind == "uniform_int") {
            s.constants.kind = ConstantDist::Kind::uniform_int;
            s.constants.lo = c.at("lo").get<std::int64_t>();
            s.constants.hi = c.at("hi").get<std::int64_t>();
        } else if (kind == "uniform_digits") {
            s.constants.kind = ConstantDist::Kind::uniform_digits;
            s.constants.digits = c.at("digits").get<unsigned>();
        } else if (kind == "fixed_set") {
            s.constants.kind = ConstantDist::Kind::fixed_set;
            for (const auto& v : c.at("values")) s.constants.values.push_back(v.get<std::string>());
        } else {
            throw DataError("unknown constant distribution '" + kind + "'");
        }
    }
    if (j.contains("variables") && !j.at("variables").is_null()) {
        const auto& v = j.at("variables");
        for (const auto& name : v.at("pool")) s.var_pool.push_back(name.get<std::string>());
        if (v.contains("weights"))
            for (const auto& w : v.at("weights")) s.var_weights.push_back(w.get<std::uint64_t>());
    }
    if (j.contains("leaf_weights")) {
        s.leaf_const_weight = j.at("leaf_weights").value("constant", std::uint64_t{1});
        s.leaf_var_weight = j.at("leaf_weights").value("variable", std::uint64_t{1});
    }
    if (j.contains("operator_weights")) {
        s.sum_weight = j.at("operator_weights").value("sum", std::uint64_t{1});
        s.product_weight = j.at("operator_weights").value("product", std::uint64_t{1});
    }
    s.validate();
    return s;
}

std::string GateSampler::hash() const {
    const std::string dump = to_json().dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

// -- shapes -----------------------------------------------------------------------

bool feasible(std::uint32_t s, std::uint32_t d) {
    if (s == 0) return d == 0;
    if (s % 2 != 0) return false;
    std::uint32_t n = s / 2;
    if (d > n) return false;
    // minimum height of a binary tree with n internal nodes
    std::uint32_t min_d = 0;
    while ((std::uint64_t{1} << min_d) < std::uint64_t{n} + 1) ++min_d;
    return d >= min_d;
}

namespace {

// count_le(n, h): full binary trees with n internal nodes and height <= h.
const mpz_class& count_le(std::uint32_t n, std::int64_t h) {
    static std::map<std::pair<std::uint32_t, std::int64_t>, mpz_class> memo;
    static const mpz_class zero = 0, one = 1;
    static std::mutex mu;
    if (h < 0) return zero;
    if (n == 0) return one;
    if (h == 0) return zero;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_pair(n, h);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    mpz_class total = 0;
    for (std::uint32_t i = 0; i < n; ++i)
        total += count_le(i, h - 1) * count_le(n - 1 - i, h - 1);
    return memo.emplace(key, std::move(total)).first->second;
}

mpz_class count_eq(std::uint32_t n, std::int64_t d) {
    return count_le(n, d) - count_le(n, d - 1);
}

std::unique_ptr<ShapeNode> unrank_le(std::uint32_t n, std::int64_t h, mpz_class rank);

std::unique_ptr<ShapeNode> unrank_eq(std::uint32_t n, std::int64_t d, mpz_class rank) {
    if (d == 0) return std::make_unique<ShapeNode>();  // n == 0 by feasibility
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t j = n - 1 - i;
        // left subtree reaches height d-1
        mpz_class ca = count_eq(i, d - 1) * count_le(j, d - 1);
        if (rank < ca) {
            mpz_class right_count = count_le(j, d - 1);
            mpz_class rl = rank / right_count, rr = rank % right_count;
            auto node = std::make_unique<ShapeNode>();
            node->left = unrank_eq(i, d - 1, std::move(rl));
            node->right = unrank_le(j, d - 1, std::move(rr));
            return node;
        }
        rank -= ca;
        // only the right subtree reaches height d-1
        mpz_class cb = count_le(i, d - 2) * count_eq(j, d - 1);
        if (rank < cb) {
            mpz_class right_count = count_eq(j, d - 1);
            mpz_class rl = rank / right_count, rr = rank % right_count;
            auto node = std::make_unique<ShapeNode>();
            node->left = unrank_le(i, d - 2, std::move(rl));
            node->right = unrank_eq(j, d - 1, std::move(rr));
            return node;
        }
        rank -= cb;
    }
    throw std::logic_error("shape unranking out of range");
}

std::unique_ptr<ShapeNode> unrank_le(std::uint32_t n, std::int64_t h, mpz_class rank) {
    if (n == 0) return std::make_unique<ShapeNode>();
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t j = n - 1 - i;
        mpz_class c = count_le(i, h - 1) * count_le(j, h - 1);
        if (rank < c) {
            mpz_class right_count = count_le(j, h - 1);
            mpz_class rl = rank / right_count, rr = rank % right_count;
            auto node = std::make_unique<ShapeNode>();
            node->left = unrank_le(i, h - 1, std::move(rl));
            node->right = unrank_le(j, h - 1, std::move(rr));
            return node;
        }
        rank -= c;
    }
    throw std::logic_error("shape unranking out of range");
}

void encode_node(const ShapeNode& n, std::string& out) {
    if (n.is_leaf()) {
        out += '.';
        return;
    }
    out += '(';
    encode_node(*n.left, out);
    encode_node(*n.right, out);
    out += ')';
}

}  // namespace

std::string CircuitShape::encode() const {
    std::string out;
    encode_node(*root, out);
    return out;
}

mpz_class shape_count(std::uint32_t n, std::uint32_t d) { return count_eq(n, d); }

CircuitShape sample_shape(std::uint32_t s, std::uint32_t d, Rng& rng) {
    if (!feasible(s, d)) throw InfeasibleClassError(s, d);
    CircuitShape shape;
    shape.internal_nodes = s / 2;
    shape.height = d;
    if (s == 0) {
        shape.root = std::make_unique<ShapeNode>();
        return shape;
    }
    mpz_class total = count_eq(shape.internal_nodes, d);
    shape.root = unrank_eq(shape.internal_nodes, d, rng.below_big(total));
    return shape;
}

CircuitShape sample_shape(std::uint32_t s, std::uint32_t d, std::uint64_t seed) {
    Rng rng(seed);
    return sample_shape(s, d, rng);
}

// -- circuit sampling ------------------------------------------------------------------

namespace {

FormulaPtr fill_shape(const ShapeNode& node, const CircuitClass& cls, const GateSampler& sampler,
                      Rng& rng) {
    if (node.is_leaf()) {
        bool use_var;
        if (sampler.has_constants() && sampler.has_variables())
            use_var = rng.weighted({sampler.leaf_const_weight, sampler.leaf_var_weight}) == 1;
        else
            use_var = sampler.has_variables();
        if (use_var) return Formula::make_var(sampler.draw_variable(rng));
        return Formula::make_const(sampler.draw_constant(rng, cls.field));
    }
    OpKind op = sampler.draw_op(rng);
    FormulaPtr l = fill_shape(*node.left, cls, sampler, rng);
    FormulaPtr r = fill_shape(*node.right, cls, sampler, rng);
    return Formula::make_op(op, std::move(l), std::move(r));
}

}  // namespace

Circuit sample_circuit(const CircuitClass& cls, const GateSampler& sampler, Rng& rng) {
    if (!feasible(cls.size, cls.depth)) throw InfeasibleClassError(cls.size, cls.depth);
    sampler.validate();
    for (const auto& v : sampler.var_pool)
        if (std::find(cls.variables.begin(), cls.variables.end(), v) == cls.variables.end())
            throw SpecError("sampler variable '" + v + "' is not in the class variable set");
    CircuitShape shape = sample_shape(cls.size, cls.depth, rng);
    FormulaPtr tree = fill_shape(*shape.root, cls, sampler, rng);
    return formula_to_circuit(*tree, cls.field);
}

Circuit sample_circuit(const CircuitClass& cls, const GateSampler& sampler, const SeedPath& seed) {
    Rng rng(seed);
    return sample_circuit(cls, sampler, rng);
}

// -- rewrites ---------------------------------------------------------------------------

RewriteRule rewrite_rule_from_name(const std::string& name) {
    if (name == "commute") return RewriteRule::commute;
    if (name == "rotate_assoc") return RewriteRule::rotate_assoc;
    if (name == "distribute") return RewriteRule::distribute;
    if (name == "factor") return RewriteRule::factor;
    if (name == "fold_const") return RewriteRule::fold_const;
    throw DataError("unknown rewrite rule '" + name + "'");
}

namespace {

bool formula_equal(const Formula& a, const Formula& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case GateKind::constant:
            return a.value == b.value;
        case GateKind::variable:
            return a.var == b.var;
        default:
            return formula_equal(*a.left, *b.left) && formula_equal(*a.right, *b.right);
    }
}

// The four ways two products can share a syntactic factor; first match wins.
struct FactorMatch {
    bool found = false;
    bool common_left_in_l = false, common_left_in_r = false;
};

FactorMatch match_common_factor(const Formula& l, const Formula& r) {
    if (formula_equal(*l.left, *r.left)) return {true, true, true};
    if (formula_equal(*l.left, *r.right)) return {true, true, false};
    if (formula_equal(*l.right, *r.left)) return {true, false, true};
    if (formula_equal(*l.right, *r.right)) return {true, false, false};
    return {};
}

bool rule_applicable(const Formula& f, RewriteRule rule) {
    switch (rule) {
        case RewriteRule::commute:
            return !f.is_input();
        case RewriteRule::rotate_assoc:
            return !f.is_input() &&
                   ((f.left->kind == f.kind) || (f.right->kind == f.kind));
        case RewriteRule::distribute:
            return f.kind == GateKind::product &&
                   (f.left->kind == GateKind::sum || f.right->kind == GateKind::sum);
        case RewriteRule::factor:
            return f.kind == GateKind::sum && f.left->kind == GateKind::product &&
                   f.right->kind == GateKind::product &&
                   match_common_factor(*f.left, *f.right).found;
        case RewriteRule::fold_const:
            return !f.is_input() && f.left->kind == GateKind::constant &&
                   f.right->kind == GateKind::constant;
    }
    return false;
}

FormulaPtr apply_rule(FormulaPtr f, RewriteRule rule) {
    switch (rule) {
        case RewriteRule::commute:
            std::swap(f->left, f->right);
            return f;
        case RewriteRule::rotate_assoc:
            if (f->left->kind == f->kind) {
                // (a ∘ b) ∘ c  ->  a ∘ (b ∘ c)
                FormulaPtr l = std::move(f->left);
                FormulaPtr a = std::move(l->left), b = std::move(l->right);
                FormulaPtr c = std::move(f->right);
                return Formula::make_op(f->op(), std::move(a),
                                        Formula::make_op(f->op(), std::move(b), std::move(c)));
            } else {
                // a ∘ (b ∘ c)  ->  (a ∘ b) ∘ c
                FormulaPtr r = std::move(f->right);
                FormulaPtr a = std::move(f->left);
                FormulaPtr b = std::move(r->left), c = std::move(r->right);
                return Formula::make_op(f->op(),
                                        Formula::make_op(f->op(), std::move(a), std::move(b)),
                                        std::move(c));
            }
        case RewriteRule::distribute:
            if (f->right->kind == GateKind::sum) {
                // a * (b + c)  ->  a*b + a*c
                FormulaPtr a = std::move(f->left);
                FormulaPtr b = std::move(f->right->left), c = std::move(f->right->right);
                return Formula::make_op(
                    OpKind::sum, Formula::make_op(OpKind::product, a->clone(), std::move(b)),
                    Formula::make_op(OpKind::product, std::move(a), std::move(c)));
            } else {
                // (b + c) * a  ->  b*a + c*a
                FormulaPtr a = std::move(f->right);
                FormulaPtr b = std::move(f->left->left), c = std::move(f->left->right);
                return Formula::make_op(
                    OpKind::sum, Formula::make_op(OpKind::product, std::move(b), a->clone()),
                    Formula::make_op(OpKind::product, std::move(c), std::move(a)));
            }
        case RewriteRule::factor: {
            FactorMatch m = match_common_factor(*f->left, *f->right);
            FormulaPtr common =
                m.common_left_in_l ? std::move(f->left->left) : std::move(f->left->right);
            FormulaPtr rest_l =
                m.common_left_in_l ? std::move(f->left->right) : std::move(f->left->left);
            FormulaPtr rest_r =
                m.common_left_in_r ? std::move(f->right->right) : std::move(f->right->left);
            // a*b + a*c  ->  a * (b + c)
            return Formula::make_op(
                OpKind::product, std::move(common),
                Formula::make_op(OpKind::sum, std::move(rest_l), std::move(rest_r)));
        }
        case RewriteRule::fold_const:
            return Formula::make_const(field_op(f->left->value, f->right->value, f->op()));
    }
    return f;
}

// Nodes in post-order, so indices line up with the gate ids of the tree form.
void collect_postorder(Formula* f, std::vector<Formula*>& out) {
    if (f->left) collect_postorder(f->left.get(), out);
    if (f->right) collect_postorder(f->right.get(), out);
    out.push_back(f);
}

FormulaPtr rewrite_at(FormulaPtr root, Formula* target, RewriteRule rule) {
    if (root.get() == target) return apply_rule(std::move(root), rule);
    if (root->left) root->left = rewrite_at(std::move(root->left), target, rule);
    if (root->right) root->right = rewrite_at(std::move(root->right), target, rule);
    return root;
}

}  // namespace

Circuit rewrite(const Circuit& c, RewriteRule rule, std::optional<GateId> site, Rng& rng) {
    FormulaPtr tree = circuit_to_formula(c.normalize_leaves());
    std::vector<Formula*> nodes;
    collect_postorder(tree.get(), nodes);

    Formula* target = nullptr;
    if (site) {
        if (*site >= nodes.size()) throw UnknownGateError(*site);
        if (!rule_applicable(*nodes[*site], rule)) throw RuleNotApplicableError(*site);
        target = nodes[*site];
    } else {
        std::vector<Formula*> sites;
        for (Formula* n : nodes)
            if (rule_applicable(*n, rule)) sites.push_back(n);
        if (sites.empty()) throw NoApplicableSiteError();
        target = sites[rng.below(sites.size())];
    }
    FormulaPtr out = rewrite_at(std::move(tree), target, rule);
    return formula_to_circuit(*out, c.field());
}

Circuit rewrite_chain(const Circuit& c, unsigned length, Rng& rng) {
    static constexpr RewriteRule kRules[] = {RewriteRule::commute, RewriteRule::rotate_assoc,
                                             RewriteRule::distribute, RewriteRule::factor,
                                             RewriteRule::fold_const};
    Circuit cur = c;
    for (unsigned step = 0; step < length; ++step) {
        FormulaPtr tree = circuit_to_formula(cur);
        std::vector<Formula*> nodes;
        collect_postorder(tree.get(), nodes);
        std::vector<std::pair<RewriteRule, Formula*>> options;
        for (RewriteRule rule : kRules)
            for (Formula* n : nodes)
                if (rule_applicable(*n, rule)) options.emplace_back(rule, n);
        if (options.empty()) throw NoApplicableSiteError();
        auto [rule, target] = options[rng.below(options.size())];
        FormulaPtr out = rewrite_at(std::move(tree), target, rule);
        cur = formula_to_circuit(*out, c.field());
    }
    return cur;
}

// -- expansion ----------------------------------------------------------------------------

namespace {

FormulaPtr monomial_formula(const Monomial& m, const FieldElement& coeff) {
    std::vector<FormulaPtr> factors;
    if (m.is_unit() || !coeff.is_one()) factors.push_back(Formula::make_const(coeff));
    for (const auto& [var, exp] : m.exponents())
        for (unsigned i = 0; i < exp; ++i) factors.push_back(Formula::make_var(var));
    FormulaPtr acc = std::move(factors.front());
    for (std::size_t i = 1; i < factors.size(); ++i)
        acc = Formula::make_op(OpKind::product, std::move(acc), std::move(factors[i]));
    return acc;
}

FieldElement zero_of(const FieldDesc& f) {
    return f.kind == FieldDesc::Kind::rational ? FieldElement::rational(0)
                                               : FieldElement::prime(0, f.p);
}

}  // namespace

Circuit expansion_circuit(const Polynomial& p, std::size_t term_cap) {
    if (p.term_count() > term_cap) throw DegreeOverflowError(term_cap);
    if (p.is_zero()) {
        FormulaPtr zero = Formula::make_const(zero_of(p.field()));
        return formula_to_circuit(*zero, p.field());
    }
    FormulaPtr acc;
    for (const auto& [m, c] : p.terms()) {
        FormulaPtr term = monomial_formula(m, c);
        acc = acc ? Formula::make_op(OpKind::sum, std::move(acc), std::move(term))
                  : std::move(term);
    }
    return formula_to_circuit(*acc, p.field());
}

// -- factored sampling -------------------------------------------------------------------------

nlohmann::ordered_json FactoredSpec::to_json() const {
    nlohmann::ordered_json j;
    j["factors"] = factors;
    j["degrees"] = degrees;
    return j;
}

FactoredSpec FactoredSpec::from_json(const nlohmann::json& j) {
    FactoredSpec s;
    s.factors = j.at("factors").get<std::uint32_t>();
    if (j.contains("degrees")) {
        s.degrees.clear();
        if (j.at("degrees").is_array())
            for (const auto& d : j.at("degrees")) s.degrees.push_back(d.get<unsigned>());
        else
            s.degrees.push_back(j.at("degrees").get<unsigned>());
    }
    return s;
}

Circuit sample_factored(const FactoredSpec& spec, const GateSampler& sampler,
                        const FieldDesc& field, Rng& rng) {
    if (spec.factors == 0) throw InvalidSpecError("factored spec needs at least one factor");
    if (spec.degrees.empty() ||
        (spec.degrees.size() != 1 && spec.degrees.size() != spec.factors))
        throw InvalidSpecError("per-factor degrees must be one entry or one per factor");
    for (unsigned d : spec.degrees)
        if (d == 0) throw InvalidSpecError("factor degree must be at least 1");
    if (!sampler.has_variables()) throw EmptySamplerError("factored sampling needs variables");
    if (!sampler.has_constants()) throw EmptySamplerError("factored sampling needs constants");

    FormulaPtr acc;
    for (std::uint32_t k = 0; k < spec.factors; ++k) {
        unsigned deg = spec.degrees.size() == 1 ? spec.degrees[0] : spec.degrees[k];
        const std::string& var = sampler.draw_variable(rng);
        FieldElement c = sampler.draw_constant(rng, field);
        // v^deg + c, the power as a left-deep product
        FormulaPtr power = Formula::make_var(var);
        for (unsigned i = 1; i < deg; ++i)
            power = Formula::make_op(OpKind::product, std::move(power), Formula::make_var(var));
        FormulaPtr factor =
            Formula::make_op(OpKind::sum, std::move(power), Formula::make_const(c));
        acc = acc ? Formula::make_op(OpKind::product, std::move(acc), std::move(factor))
                  : std::move(factor);
    }
    return formula_to_circuit(*acc, field);
}

// -- perturbation -------------------------------------------------------------------------------

Circuit perturb(const Circuit& c, Rng& rng, unsigned retries) {
    std::vector<GateId> sites;
    for (const auto& g : c.gates())
        if (g.kind == GateKind::constant || g.is_operator()) sites.push_back(g.id);
    if (sites.empty()) throw PerturbExhaustedError(retries);

    const Polynomial original = c.to_polynomial();
    for (unsigned attempt = 0; attempt < retries; ++attempt) {
        GateId site = sites[rng.below(sites.size())];
        std::vector<Gate> gates = c.gates();
        Gate& g = gates[site];
        if (g.kind == GateKind::constant) {
            if (g.value.is_rational()) {
                std::int64_t delta = rng.int_in(1, 9) * (rng.below(2) == 0 ? 1 : -1);
                g.value = g.value + FieldElement::rational(delta);
            } else {
                std::uint64_t p = g.value.as_prime().p;
                g.value = g.value + FieldElement::prime(1 + rng.below(p - 1), p);
            }
        } else {
            g.kind = g.kind == GateKind::sum ? GateKind::product : GateKind::sum;
        }
        Circuit candidate = build_circuit(std::move(gates), c.edges(), c.output(), c.field());
        if (!poly_equal(candidate.to_polynomial(), original)) return candidate;
    }
    throw PerturbExhaustedError(retries);
}

}  // namespace circuitforge
