#include "circuitforge/identity.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "circuitforge/rng.hpp"

namespace circuitforge {

nlohmann::ordered_json PitResult::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "pit/1";
    j["verdict"] = verdict == Verdict::equivalent ? "equivalent" : "not_equivalent";
    j["method"] = method == Method::exact ? "exact" : "randomized";
    j["trials"] = trials;
    j["error_bound"] = error_bound.get_str();
    return j;
}

PitResult pit_exact(const Circuit& c1, const Circuit& c2, std::size_t term_cap) {
    if (c1.field() != c2.field()) throw MixedFieldError();
    PitResult r;
    r.method = PitResult::Method::exact;
    r.verdict = poly_equal(c1.to_polynomial(term_cap), c2.to_polynomial(term_cap))
                    ? PitResult::Verdict::equivalent
                    : PitResult::Verdict::not_equivalent;
    return r;
}

namespace {

// Evaluates a circuit over Z/pZ on raw machine words. Constants are
// embedded once, then each point costs one pass over the gates.
class ModEvaluator {
public:
    ModEvaluator(const Circuit& c, std::uint64_t p) : circuit_(c), p_(p) {
        embedded_.resize(c.gates().size(), 0);
        for (const auto& g : c.gates()) {
            if (g.kind != GateKind::constant) continue;
            if (g.value.is_rational()) {
                auto v = embed_mod(g.value.as_rational(), p);
                if (!v) throw NonEmbeddableConstantError();
                embedded_[g.id] = *v;
            } else {
                if (g.value.as_prime().p != p)
                    throw MixedFieldError("circuit modulus differs from test prime");
                embedded_[g.id] = g.value.as_prime().value;
            }
        }
        // children-before-parents order, fixed once
        std::vector<std::uint32_t> pending(c.gates().size(), 0);
        std::vector<std::vector<GateId>> parents(c.gates().size());
        for (const auto& [child, parent] : c.edges()) {
            ++pending[parent];
            parents[child].push_back(parent);
        }
        std::queue<GateId> ready;
        for (const auto& g : c.gates())
            if (pending[g.id] == 0) ready.push(g.id);
        while (!ready.empty()) {
            GateId g = ready.front();
            ready.pop();
            order_.push_back(g);
            for (GateId par : parents[g])
                if (--pending[par] == 0) ready.push(par);
        }
    }

    std::uint64_t eval(const std::map<std::string, std::uint64_t>& point) const {
        std::vector<std::uint64_t> val(circuit_.gates().size(), 0);
        for (GateId id : order_) {
            const Gate& g = circuit_.gate(id);
            switch (g.kind) {
                case GateKind::constant:
                    val[id] = embedded_[id];
                    break;
                case GateKind::variable:
                    val[id] = point.at(g.var);
                    break;
                case GateKind::sum:
                    val[id] = add_mod(val[circuit_.children(id)[0]],
                                      val[circuit_.children(id)[1]], p_);
                    break;
                case GateKind::product:
                    val[id] = mul_mod(val[circuit_.children(id)[0]],
                                      val[circuit_.children(id)[1]], p_);
                    break;
            }
        }
        return val[circuit_.output()];
    }

private:
    const Circuit& circuit_;
    std::uint64_t p_;
    std::vector<std::uint64_t> embedded_;
    std::vector<GateId> order_;
};

}  // namespace

PitResult pit_randomized(const Circuit& c1, const Circuit& c2, unsigned trials, std::uint64_t p,
                         std::uint64_t seed) {
    if (c1.field() != c2.field()) throw MixedFieldError();
    const std::uint64_t degree_bound = std::max(c1.degree(), c2.degree());
    if (degree_bound >= p) throw DegreeTooLargeError();

    std::set<std::string, ShortLex> universe;
    for (const auto& v : c1.variables()) universe.insert(v);
    for (const auto& v : c2.variables()) universe.insert(v);

    ModEvaluator e1(c1, p), e2(c2, p);
    Rng rng(seed);

    PitResult r;
    r.method = PitResult::Method::randomized;
    r.verdict = PitResult::Verdict::equivalent;
    for (unsigned t = 0; t < trials; ++t) {
        std::map<std::string, std::uint64_t> point;
        for (const auto& v : universe) point[v] = rng.below(p);
        ++r.trials;
        if (e1.eval(point) != e2.eval(point)) {
            r.verdict = PitResult::Verdict::not_equivalent;
            break;
        }
    }
    // (D/p)^trials: the Schwartz-Zippel bound per independent point.
    mpq_class per_trial(degree_bound, p);
    per_trial.canonicalize();
    r.error_bound = 1;
    for (unsigned t = 0; t < r.trials; ++t) r.error_bound *= per_trial;
    if (r.trials == 0) r.error_bound = 1;  // no evidence gathered
    return r;
}

PitResult pit_auto(const Circuit& c1, const Circuit& c2, unsigned trials, std::uint64_t p,
                   std::uint64_t seed, std::size_t term_cap) {
    try {
        return pit_randomized(c1, c2, trials, p, seed);
    } catch (const NonEmbeddableConstantError&) {
    } catch (const DegreeTooLargeError&) {
    }
    return pit_exact(c1, c2, term_cap);
}

}  // namespace circuitforge
