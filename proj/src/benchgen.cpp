#include "circuitforge/benchgen.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "circuitforge/identity.hpp"

namespace circuitforge {

std::string task_name(Task t) {
    switch (t) {
        case Task::evaluate: return "evaluate";
        case Task::pit: return "pit";
        case Task::expand: return "expand";
        case Task::factor: return "factor";
    }
    return "evaluate";
}

Task task_from_name(const std::string& name) {
    if (name == "evaluate") return Task::evaluate;
    if (name == "pit") return Task::pit;
    if (name == "expand") return Task::expand;
    if (name == "factor") return Task::factor;
    throw DataError("unknown task '" + name + "'");
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << h;
    return os.str();
}

// -- records ------------------------------------------------------------------

nlohmann::ordered_json DatasetRecord::to_json() const {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["task"] = task_name(task);
    j["input"] = input;
    j["target"] = target;
    auto& cs = j["circuits"] = nlohmann::ordered_json::array();
    for (const auto& c : circuits) cs.push_back(c.to_json());
    j["class"] = cls.to_json();
    j["seed"] = seed.to_json();
    j["meta"] = meta;
    return j;
}

DatasetRecord DatasetRecord::from_json(const nlohmann::json& j) {
    DatasetRecord r;
    r.id = j.at("id").get<std::uint64_t>();
    r.task = task_from_name(j.at("task").get<std::string>());
    r.input = j.at("input").get<std::string>();
    r.target = j.at("target").get<std::string>();
    for (const auto& cj : j.at("circuits")) r.circuits.push_back(Circuit::from_json(cj));
    r.cls = CircuitClass::from_json(j.at("class"));
    r.seed.root = j.at("seed").at("root").get<std::uint64_t>();
    for (const auto& p : j.at("seed").at("path")) r.seed.path.push_back(p.get<std::uint64_t>());
    r.meta = j.at("meta");
    return r;
}

namespace {

// Per-record RNG lanes.
enum Lane : std::uint64_t { kCircuitLane = 0, kPairLane = 1, kAssignLane = 2 };

nlohmann::ordered_json base_meta(const GateSampler& sampler, Style style) {
    nlohmann::ordered_json meta;
    meta["sampler_hash"] = sampler.hash();
    meta["style"] = style_name(style);
    return meta;
}

FieldElement zero_of(const FieldDesc& f) {
    return f.kind == FieldDesc::Kind::rational ? FieldElement::rational(0)
                                               : FieldElement::prime(0, f.p);
}

}  // namespace

std::vector<DatasetRecord> gen_evaluate(const CircuitClass& cls, const GateSampler& sampler,
                                        std::uint64_t n, std::uint64_t seed, Style style,
                                        bool with_variables) {
    GateSampler effective = sampler;
    if (!with_variables) {
        // Default evaluation circuits are constant-only.
        effective.var_pool.clear();
        effective.var_weights.clear();
    }
    effective.validate();
    if (!with_variables && !effective.has_constants())
        throw EmptySamplerError("evaluate task needs a constant distribution");

    std::vector<DatasetRecord> records;
    records.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SeedPath sp{seed, {i}};
        Rng circuit_rng(sp.child(kCircuitLane));
        Circuit c = sample_circuit(cls, effective, circuit_rng);

        DatasetRecord r;
        r.id = i;
        r.task = Task::evaluate;
        r.seed = sp;
        r.cls = cls;
        r.meta = base_meta(effective, style);

        Assignment assignment;
        if (!c.variables().empty()) {
            Rng assign_rng(sp.child(kAssignLane));
            nlohmann::ordered_json aj;
            for (const auto& v : c.variables()) {
                FieldElement val = sampler.has_constants()
                                       ? sampler.draw_constant(assign_rng, cls.field)
                                       : zero_of(cls.field);
                assignment.emplace(v, val);
                aj[v] = val.to_string();
            }
            r.meta["assignment"] = std::move(aj);
        }

        r.input = render_text(c, style);
        r.target = c.evaluate(assignment).first.to_string();
        r.meta["canonical_degree"] = c.to_polynomial().degree();
        r.circuits.push_back(std::move(c));
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<DatasetRecord> gen_pit(unsigned chain_length, unsigned retries,
                                   const CircuitClass& cls, const GateSampler& sampler,
                                   std::uint64_t n, std::uint64_t seed, Style style) {
    if (n < 2) throw InvalidSpecError("pit generation needs at least two records");
    sampler.validate();

    std::vector<DatasetRecord> records;
    records.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SeedPath sp{seed, {i}};
        Rng circuit_rng(sp.child(kCircuitLane));
        Circuit first = sample_circuit(cls, sampler, circuit_rng);
        Rng pair_rng(sp.child(kPairLane));

        const bool positive = i % 2 == 0;
        Circuit second = first;
        if (positive) {
            bool distinct = false;
            for (unsigned attempt = 0; attempt < 64 && !distinct; ++attempt) {
                second = rewrite_chain(first, chain_length, pair_rng);
                distinct = render_text(second, style) != render_text(first, style);
            }
            if (!distinct)
                throw Error("rewrite chains kept normalizing to the input string");
        } else {
            second = perturb(first, pair_rng, retries);
        }

        PitResult verified = pit_exact(first, second);
        if (verified.equivalent() != positive)
            throw Error("pit label verification failed at construction");

        DatasetRecord r;
        r.id = i;
        r.task = Task::pit;
        r.seed = sp;
        r.cls = cls;
        r.input = render_text(first, style) + " = " + render_text(second, style);
        r.target = positive ? "1" : "0";
        r.meta = base_meta(sampler, style);
        r.meta["kind"] = positive ? "rewrite_chain" : "perturb";
        if (positive) r.meta["chain_length"] = chain_length;
        r.meta["pit"] = verified.to_json();
        r.meta["canonical_degree"] = first.to_polynomial().degree();
        r.circuits.push_back(std::move(first));
        r.circuits.push_back(std::move(second));
        records.push_back(std::move(r));
    }
    return records;
}

std::vector<DatasetRecord> gen_seq2seq(Task direction, const FactoredSpec& spec,
                                       const GateSampler& sampler, const FieldDesc& field,
                                       std::uint64_t n, std::uint64_t seed, Style style) {
    if (direction != Task::expand && direction != Task::factor)
        throw InvalidSpecError("seq2seq direction must be expand or factor");
    sampler.validate();

    std::vector<DatasetRecord> records;
    records.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
        SeedPath sp{seed, {i}};
        Rng rng(sp.child(kCircuitLane));
        Circuit factored = sample_factored(spec, sampler, field, rng);
        Polynomial p = factored.to_polynomial();
        Circuit expanded = expansion_circuit(p);

        DatasetRecord r;
        r.id = i;
        r.task = direction;
        r.seed = sp;
        const Circuit& in_c = direction == Task::expand ? factored : expanded;
        const Circuit& out_c = direction == Task::expand ? expanded : factored;
        r.input = render_text(in_c, style);
        r.target = render_text(out_c, style);
        r.cls = CircuitClass{field, in_c.variables(), in_c.size(), in_c.depth(), {}};
        r.meta = base_meta(sampler, style);
        r.meta["direction"] = task_name(direction);
        r.meta["factored"] = spec.to_json();
        r.meta["canonical_degree"] = p.degree();
        if (direction == Task::expand) {
            r.circuits.push_back(std::move(factored));
            r.circuits.push_back(std::move(expanded));
        } else {
            r.circuits.push_back(std::move(expanded));
            r.circuits.push_back(std::move(factored));
        }
        records.push_back(std::move(r));
    }
    return records;
}

// -- audit ------------------------------------------------------------------------

namespace {

Assignment assignment_from_meta(const nlohmann::ordered_json& meta, const FieldDesc& field) {
    Assignment a;
    if (!meta.contains("assignment")) return a;
    for (const auto& [var, text] : meta.at("assignment").items())
        a.emplace(var, FieldElement::parse(text.get<std::string>(), field));
    return a;
}

bool audit_record(const DatasetRecord& r) {
    const Style style = style_from_name(r.meta.at("style").get<std::string>());
    switch (r.task) {
        case Task::evaluate: {
            if (r.circuits.size() != 1) return false;
            if (render_text(r.circuits[0], style) != r.input) return false;
            // Independent route: text -> parse -> polynomial -> evaluation.
            auto [parsed, align] = parse_text(r.input, style, false, r.cls.field);
            Assignment a = assignment_from_meta(r.meta, r.cls.field);
            FieldElement v = poly_eval(parsed.to_polynomial(), a);
            return v.to_string() == r.target;
        }
        case Task::pit: {
            if (r.circuits.size() != 2) return false;
            std::string expected = render_text(r.circuits[0], style) + " = " +
                                   render_text(r.circuits[1], style);
            if (expected != r.input) return false;
            bool label = r.target == "1";
            if (!label && r.target != "0") return false;
            return pit_exact(r.circuits[0], r.circuits[1]).equivalent() == label;
        }
        case Task::expand:
        case Task::factor: {
            if (r.circuits.size() != 2) return false;
            if (render_text(r.circuits[0], style) != r.input) return false;
            if (render_text(r.circuits[1], style) != r.target) return false;
            auto [in_c, ia] = parse_text(r.input, style, false, r.cls.field);
            auto [out_c, oa] = parse_text(r.target, style, false, r.cls.field);
            Polynomial pin = in_c.to_polynomial(), pout = out_c.to_polynomial();
            if (!poly_equal(pin, pout)) return false;
            // The expanded side must be the canonical sum-of-monomials form.
            const std::string expanded_side =
                r.task == Task::expand ? r.target : r.input;
            return render_text(expansion_circuit(pin), style) == expanded_side;
        }
    }
    return false;
}

}  // namespace

AuditReport audit_dataset(const std::vector<DatasetRecord>& records) {
    AuditReport report;
    for (const auto& r : records) {
        ++report.checked;
        bool ok = false;
        try {
            ok = audit_record(r);
        } catch (const Error&) {
            ok = false;
        }
        if (!ok) report.failed_ids.push_back(r.id);
    }
    return report;
}

// -- dataset files ------------------------------------------------------------------

std::string dataset_to_string(const std::vector<DatasetRecord>& records,
                              const std::string& config_hash) {
    std::ostringstream os;
    nlohmann::ordered_json header;
    header["schema"] = "dataset/1";
    header["config_hash"] = config_hash;
    os << header.dump() << "\n";
    for (const auto& r : records) os << r.to_json().dump() << "\n";
    return os.str();
}

void write_dataset(const std::string& path, const std::vector<DatasetRecord>& records,
                   const std::string& config_hash) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    out << dataset_to_string(records, config_hash);
}

Dataset read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    Dataset ds;
    std::string line;
    if (!std::getline(in, line)) throw DataError("empty dataset file '" + path + "'");
    nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
    if (header.is_discarded() || header.value("schema", "") != "dataset/1")
        throw DataError("missing dataset/1 header in '" + path + "'");
    ds.config_hash = header.value("config_hash", "");
    std::uint64_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError(path + ":" + std::to_string(lineno) + ": bad JSON record");
        ds.records.push_back(DatasetRecord::from_json(j));
    }
    return ds;
}

// -- split design ----------------------------------------------------------------------

nlohmann::ordered_json GenSpec::to_json() const {
    nlohmann::ordered_json j;
    j["class"] = cls.to_json();
    j["sampler"] = sampler.to_json();
    j["count"] = count;
    return j;
}

GenSpec GenSpec::from_json(const nlohmann::json& j) {
    GenSpec s;
    s.cls = CircuitClass::from_json(j.at("class"));
    s.sampler = GateSampler::from_json(j.at("sampler"));
    s.count = j.value("count", std::uint64_t{1});
    return s;
}

SplitSide split_side_from_json(const nlohmann::json& j) {
    SplitSide side;
    if (j.contains("items")) {
        for (const auto& item : j.at("items")) side.push_back(GenSpec::from_json(item));
    } else {
        side.push_back(GenSpec::from_json(j));
    }
    return side;
}

std::string split_mode_name(SplitMode m) {
    switch (m) {
        case SplitMode::systematic: return "systematic";
        case SplitMode::productive: return "productive";
        case SplitMode::custom: return "custom";
    }
    return "custom";
}

SplitMode split_mode_from_name(const std::string& name) {
    if (name == "systematic") return SplitMode::systematic;
    if (name == "productive") return SplitMode::productive;
    if (name == "custom") return SplitMode::custom;
    throw DataError("unknown split mode '" + name + "'");
}

namespace {

// Closed constant-support intervals; fixed-set values become points.
using Interval = std::pair<mpq_class, mpq_class>;

std::vector<Interval> constant_support(const SplitSide& side) {
    std::vector<Interval> out;
    for (const auto& item : side) {
        const ConstantDist& c = item.sampler.constants;
        switch (c.kind) {
            case ConstantDist::Kind::none:
                break;
            case ConstantDist::Kind::uniform_int:
                out.emplace_back(mpq_class(c.lo), mpq_class(c.hi));
                break;
            case ConstantDist::Kind::uniform_digits: {
                mpz_class lo = 1;
                for (unsigned i = 1; i < c.digits; ++i) lo *= 10;
                if (c.digits == 1) lo = 0;
                mpz_class hi = c.digits == 1 ? mpz_class(9) : mpz_class(lo * 10 - 1);
                out.emplace_back(mpq_class(lo), mpq_class(hi));
                break;
            }
            case ConstantDist::Kind::fixed_set:
                for (const auto& v : c.values) {
                    mpq_class q(v, 10);
                    q.canonicalize();
                    out.emplace_back(q, q);
                }
                break;
        }
    }
    std::sort(out.begin(), out.end());
    // merge overlapping or integer-adjacent intervals
    std::vector<Interval> merged;
    for (const auto& iv : out) {
        if (!merged.empty()) {
            auto& last = merged.back();
            bool adjacent = iv.first.get_den() == 1 && last.second.get_den() == 1 &&
                            iv.first == last.second + 1;
            if (iv.first <= last.second || adjacent) {
                last.second = std::max(last.second, iv.second);
                continue;
            }
        }
        merged.push_back(iv);
    }
    return merged;
}

bool covers(const std::vector<Interval>& outer, const std::vector<Interval>& inner) {
    for (const auto& iv : inner) {
        bool hit = false;
        for (const auto& o : outer)
            if (o.first <= iv.first && iv.second <= o.second) {
                hit = true;
                break;
            }
        if (!hit) return false;
    }
    return true;
}

bool intersects(const std::vector<Interval>& a, const std::vector<Interval>& b) {
    for (const auto& x : a)
        for (const auto& y : b)
            if (x.first <= y.second && y.first <= x.second) return true;
    return false;
}

nlohmann::ordered_json intervals_to_json(const std::vector<Interval>& ivs) {
    nlohmann::ordered_json j = nlohmann::ordered_json::array();
    for (const auto& iv : ivs) j.push_back({iv.first.get_str(), iv.second.get_str()});
    return j;
}

std::set<std::string> side_operators(const SplitSide& side) {
    std::set<std::string> ops;
    for (const auto& item : side) {
        if (item.sampler.sum_weight > 0) ops.insert("sum");
        if (item.sampler.product_weight > 0) ops.insert("product");
    }
    return ops;
}

std::set<std::string, ShortLex> side_variables(const SplitSide& side) {
    std::set<std::string, ShortLex> vars;
    for (const auto& item : side)
        for (const auto& v : item.sampler.var_pool) vars.insert(v);
    return vars;
}

std::string structure_key(const CircuitClass& c) {
    CircuitClass k = c;
    k.degree_bound.reset();
    return k.key();
}

}  // namespace

SplitManifest design_split(const SplitSide& train, const SplitSide& test, SplitMode mode) {
    if (train.empty() || test.empty()) throw SpecError("both split sides need at least one class");
    for (const auto& item : train) item.sampler.validate();
    for (const auto& item : test) item.sampler.validate();
    for (const auto& item : train)
        if (!feasible(item.cls.size, item.cls.depth))
            throw SpecError("infeasible train class " + item.cls.key());
    for (const auto& item : test)
        if (!feasible(item.cls.size, item.cls.depth))
            throw SpecError("infeasible test class " + item.cls.key());

    SplitManifest m;
    m.train = train;
    m.test = test;
    m.mode = mode;

    // structural flags
    std::set<std::string> train_keys, test_keys;
    std::multiset<std::string> train_hashes, test_hashes;
    std::set<std::pair<std::uint32_t, std::uint32_t>> train_sd, test_sd;
    for (const auto& item : train) {
        train_keys.insert(structure_key(item.cls));
        train_hashes.insert(item.sampler.hash());
        train_sd.insert({item.cls.size, item.cls.depth});
    }
    for (const auto& item : test) {
        test_keys.insert(structure_key(item.cls));
        test_hashes.insert(item.sampler.hash());
        test_sd.insert({item.cls.size, item.cls.depth});
    }
    m.systematic = train_keys == test_keys && train_hashes != test_hashes;
    m.productive = true;
    for (const auto& sd : test_sd)
        if (train_sd.count(sd)) m.productive = false;

    if (mode == SplitMode::systematic && !m.systematic)
        throw SpecError("requested systematic split, but classes differ or samplers coincide");
    if (mode == SplitMode::productive && !m.productive)
        throw SpecError("requested productive split, but a (size, depth) class appears on both sides");

    // support report
    auto train_vars = side_variables(train), test_vars = side_variables(test);
    std::vector<std::string> missing_vars;
    for (const auto& v : test_vars)
        if (!train_vars.count(v)) missing_vars.push_back(v);
    for (const auto& v : missing_vars)
        m.warnings.push_back("basis support violation: test variable '" + v +
                             "' is not sampled in train");

    auto train_ops = side_operators(train), test_ops = side_operators(test);
    std::vector<std::string> missing_ops;
    for (const auto& op : test_ops)
        if (!train_ops.count(op)) missing_ops.push_back(op);
    for (const auto& op : missing_ops)
        m.warnings.push_back("operator support violation: test uses '" + op +
                             "' gates never sampled in train");

    auto train_consts = constant_support(train), test_consts = constant_support(test);
    std::string relation;
    const bool sub = covers(train_consts, test_consts);
    const bool super = covers(test_consts, train_consts);
    if (train_consts.empty() && test_consts.empty())
        relation = "equal";
    else if (sub && super)
        relation = "equal";
    else if (sub)
        relation = "subset";
    else if (super)
        relation = "superset";
    else if (!intersects(train_consts, test_consts))
        relation = "disjoint";
    else
        relation = "overlap";

    nlohmann::ordered_json support;
    support["variables"] = {{"train", std::vector<std::string>(train_vars.begin(), train_vars.end())},
                            {"test", std::vector<std::string>(test_vars.begin(), test_vars.end())},
                            {"covered", missing_vars.empty()}};
    support["operators"] = {{"train", std::vector<std::string>(train_ops.begin(), train_ops.end())},
                            {"test", std::vector<std::string>(test_ops.begin(), test_ops.end())},
                            {"covered", missing_ops.empty()}};
    support["constants"] = {{"train", intervals_to_json(train_consts)},
                            {"test", intervals_to_json(test_consts)},
                            {"relation", relation}};
    m.support = std::move(support);
    return m;
}

nlohmann::ordered_json SplitManifest::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "split/1";
    j["mode"] = split_mode_name(mode);
    auto side_json = [](const SplitSide& side) {
        nlohmann::ordered_json s;
        auto& items = s["items"] = nlohmann::ordered_json::array();
        for (const auto& item : side) items.push_back(item.to_json());
        return s;
    };
    j["train"] = side_json(train);
    j["test"] = side_json(test);
    j["flags"] = {{"systematic", systematic}, {"productive", productive}};
    j["support"] = support;
    j["warnings"] = warnings;
    return j;
}

// -- divergence ------------------------------------------------------------------------

std::uint64_t constant_magnitude(const FieldElement& v) {
    if (v.is_rational()) {
        const mpq_class& q = v.as_rational();
        if (q.get_den() == 1) {
            mpz_class a = abs(q.get_num());
            return a.get_str().size();
        }
        // log-magnitude bucket for non-integer rationals
        mpq_class a = abs(q);
        if (a < 1) return 0;
        mpz_class floor_v = a.get_num() / a.get_den();
        return floor_v.get_str().size();
    }
    return std::to_string(v.as_prime().value).size();
}

mpq_class wasserstein1(std::vector<long long> a, std::vector<long long> b) {
    if (a.empty() || b.empty()) throw EmptySideError();
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const std::size_t m = a.size(), n = b.size();
    std::size_t i = 0, j = 0;
    mpq_class u = 0, w = 0;
    while (i < m && j < n) {
        mpq_class ua(static_cast<unsigned long>(i + 1), static_cast<unsigned long>(m));
        mpq_class ub(static_cast<unsigned long>(j + 1), static_cast<unsigned long>(n));
        ua.canonicalize();
        ub.canonicalize();
        mpq_class next = std::min(ua, ub);
        long long gap = a[i] > b[j] ? a[i] - b[j] : b[j] - a[i];
        w += (next - u) * mpq_class(static_cast<long>(gap));
        u = next;
        if (ua == next) ++i;
        if (ub == next) ++j;
    }
    return w;
}

namespace {

mpq_class jaccard(const std::set<long long>& a, const std::set<long long>& b) {
    if (a.empty() && b.empty()) return 1;
    std::size_t inter = 0;
    for (long long v : a) inter += b.count(v);
    std::size_t uni = a.size() + b.size() - inter;
    if (uni == 0) return 1;
    mpq_class r(static_cast<unsigned long>(inter), static_cast<unsigned long>(uni));
    r.canonicalize();
    return r;
}

struct PropertySamples {
    std::vector<long long> size, depth, degree, var_count, constant_mag;
};

PropertySamples collect(const std::vector<DatasetRecord>& records) {
    PropertySamples s;
    for (const auto& r : records) {
        if (r.circuits.empty()) throw DataError("record without circuit payload");
        const Circuit& c = r.circuits.front();
        s.size.push_back(c.size());
        s.depth.push_back(c.depth());
        s.degree.push_back(c.degree());
        s.var_count.push_back(static_cast<long long>(c.variables().size()));
        for (const auto& g : c.gates())
            if (g.kind == GateKind::constant)
                s.constant_mag.push_back(static_cast<long long>(constant_magnitude(g.value)));
    }
    return s;
}

PropertyDivergence diverge(const std::vector<long long>& a, const std::vector<long long>& b) {
    PropertyDivergence d;
    if (a.empty() || b.empty()) {
        d.w1 = 0;
        d.jaccard = (a.empty() && b.empty()) ? 1 : 0;
        return d;
    }
    d.w1 = wasserstein1(a, b);
    d.jaccard = jaccard(std::set<long long>(a.begin(), a.end()),
                        std::set<long long>(b.begin(), b.end()));
    return d;
}

}  // namespace

DivergenceReport divergence(const std::vector<DatasetRecord>& train,
                            const std::vector<DatasetRecord>& test) {
    if (train.empty() || test.empty()) throw EmptySideError();
    PropertySamples a = collect(train), b = collect(test);

    DivergenceReport rep;
    rep.properties["size"] = diverge(a.size, b.size);
    rep.properties["depth"] = diverge(a.depth, b.depth);
    rep.properties["degree"] = diverge(a.degree, b.degree);
    rep.properties["variable_count"] = diverge(a.var_count, b.var_count);
    rep.properties["constant_magnitude"] = diverge(a.constant_mag, b.constant_mag);

    // flags from class descriptors and sampler hashes
    std::set<std::string> train_keys, test_keys;
    std::set<std::string> train_hashes, test_hashes;
    std::set<std::pair<std::uint32_t, std::uint32_t>> train_sd, test_sd;
    for (const auto& r : train) {
        train_keys.insert(structure_key(r.cls));
        train_sd.insert({r.cls.size, r.cls.depth});
        if (r.meta.contains("sampler_hash")) train_hashes.insert(r.meta.at("sampler_hash"));
    }
    for (const auto& r : test) {
        test_keys.insert(structure_key(r.cls));
        test_sd.insert({r.cls.size, r.cls.depth});
        if (r.meta.contains("sampler_hash")) test_hashes.insert(r.meta.at("sampler_hash"));
    }
    rep.systematic = train_keys == test_keys && train_hashes != test_hashes;
    rep.productive = true;
    for (const auto& sd : test_sd)
        if (train_sd.count(sd)) rep.productive = false;
    return rep;
}

nlohmann::ordered_json DivergenceReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "divergence/1";
    auto& props = j["properties"] = nlohmann::ordered_json::object();
    for (const char* key : {"size", "depth", "degree", "variable_count", "constant_magnitude"}) {
        const auto& d = properties.at(key);
        nlohmann::ordered_json pj;
        pj["w1"] = d.w1.get_d();
        pj["w1_exact"] = d.w1.get_str();
        pj["jaccard"] = d.jaccard.get_d();
        pj["jaccard_exact"] = d.jaccard.get_str();
        props[key] = std::move(pj);
    }
    j["flags"] = {{"systematic", systematic}, {"productive", productive}};
    return j;
}

}  // namespace circuitforge
