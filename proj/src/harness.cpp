#include "circuitforge/harness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace circuitforge {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Lenient field-value parser: optional sign, digits with leading zeros,
// optional "/ denominator" with spaces tolerated around the slash.
std::optional<FieldElement> parse_value_lenient(const std::string& raw, const FieldDesc& field) {
    std::string s = trim(raw);
    if (s.empty()) return std::nullopt;
    std::string compact;
    for (char c : s)
        if (!std::isspace(static_cast<unsigned char>(c))) compact += c;
    std::size_t i = 0;
    std::string num;
    if (compact[i] == '+' || compact[i] == '-') {
        if (compact[i] == '-') num += '-';
        ++i;
    }
    std::size_t digits = 0;
    while (i < compact.size() && std::isdigit(static_cast<unsigned char>(compact[i]))) {
        num += compact[i];
        ++i;
        ++digits;
    }
    if (digits == 0) return std::nullopt;
    std::string den;
    if (i < compact.size() && compact[i] == '/') {
        ++i;
        while (i < compact.size() && std::isdigit(static_cast<unsigned char>(compact[i]))) {
            den += compact[i];
            ++i;
        }
        if (den.empty()) return std::nullopt;
    }
    if (i != compact.size()) return std::nullopt;
    try {
        std::string text = den.empty() ? num : num + "/" + den;
        if (!den.empty() && mpz_class(den) == 0) return std::nullopt;
        return FieldElement::parse(text, field);
    } catch (const Error&) {
        return std::nullopt;
    }
}

std::vector<std::string> token_texts(const TokenString& ts) {
    std::vector<std::string> out;
    out.reserve(ts.tokens.size());
    for (const auto& t : ts.tokens) out.push_back(t.text);
    return out;
}

}  // namespace

nlohmann::ordered_json Verdict::to_json() const {
    nlohmann::ordered_json j;
    j["status"] = status == Status::correct      ? "correct"
                  : status == Status::incorrect ? "incorrect"
                                                : "unparseable";
    j["syntactic_match"] = syntactic_match;
    j["normalized"] = normalized;
    if (!detail.empty()) j["detail"] = detail;
    if (semantic_check) j["pit"] = semantic_check->to_json();
    return j;
}

Verdict grade_answer(const DatasetRecord& record, const std::string& output_text) {
    Verdict v;
    switch (record.task) {
        case Task::evaluate: {
            auto got = parse_value_lenient(output_text, record.cls.field);
            if (!got) {
                v.status = Verdict::Status::unparseable;
                v.detail = "no field value recognized";
                return v;
            }
            v.normalized = got->to_string();
            FieldElement want = FieldElement::parse(record.target, record.cls.field);
            v.status = (*got == want) ? Verdict::Status::correct : Verdict::Status::incorrect;
            if (v.status == Verdict::Status::incorrect)
                v.detail = "expected " + record.target;
            v.syntactic_match = v.correct() && trim(output_text) == record.target;
            return v;
        }
        case Task::pit: {
            const std::string s = lower(trim(output_text));
            std::string label;
            if (s == "1" || s == "yes" || s == "true") label = "1";
            else if (s == "0" || s == "no" || s == "false") label = "0";
            if (label.empty()) {
                v.status = Verdict::Status::unparseable;
                v.detail = "no 0/1 label recognized";
                return v;
            }
            v.normalized = label;
            v.status = label == record.target ? Verdict::Status::correct
                                              : Verdict::Status::incorrect;
            if (v.status == Verdict::Status::incorrect) v.detail = "expected " + record.target;
            v.syntactic_match = v.correct();
            return v;
        }
        case Task::expand:
        case Task::factor: {
            const Style style = style_from_name(record.meta.at("style").get<std::string>());
            std::optional<Circuit> parsed;
            try {
                TokenString ts = style == Style::prefix ? tokenize(output_text, Style::prefix)
                                                        : lex_lenient(output_text);
                parsed = parse(ts, true, record.cls.field).first;
            } catch (const Error& e) {
                v.status = Verdict::Status::unparseable;
                v.detail = e.what();
                return v;
            }
            v.normalized = render_text(*parsed, style);
            if (record.circuits.size() < 2) throw DataError("seq2seq record lacks a target circuit");
            PitResult check = pit_exact(*parsed, record.circuits[1]);
            v.semantic_check = check;
            v.status = check.equivalent() ? Verdict::Status::correct
                                          : Verdict::Status::incorrect;
            if (v.status == Verdict::Status::incorrect)
                v.detail = "not polynomial-equal to the target";
            // Exact canonical string, up to token spacing.
            try {
                TokenString out_ts = style == Style::prefix ? tokenize(output_text, Style::prefix)
                                                            : lex_lenient(output_text);
                TokenString want_ts = tokenize(record.target, style);
                v.syntactic_match = token_texts(out_ts) == token_texts(want_ts);
            } catch (const Error&) {
                v.syntactic_match = false;
            }
            return v;
        }
    }
    return v;
}

// -- trace grading -----------------------------------------------------------------

namespace {

struct TraceLine {
    GateId gate = 0;
    OpKind op = OpKind::sum;
    FieldElement left, right, result;
};

std::optional<TraceLine> parse_trace_line(const std::string& line, const FieldDesc& field) {
    std::istringstream is(line);
    std::vector<std::string> toks;
    std::string t;
    while (is >> t) toks.push_back(t);
    if (toks.size() != 7) return std::nullopt;
    if (toks[1] != "=" || toks[5] != "->") return std::nullopt;
    if (toks[0].size() < 2 || toks[0][0] != 'g') return std::nullopt;
    for (std::size_t i = 1; i < toks[0].size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(toks[0][i]))) return std::nullopt;
    if (toks[3] != "+" && toks[3] != "*") return std::nullopt;

    TraceLine out;
    out.gate = static_cast<GateId>(std::stoul(toks[0].substr(1)));
    out.op = toks[3] == "+" ? OpKind::sum : OpKind::product;
    auto l = parse_value_lenient(toks[2], field);
    auto r = parse_value_lenient(toks[4], field);
    auto v = parse_value_lenient(toks[6], field);
    if (!l || !r || !v) return std::nullopt;
    out.left = *l;
    out.right = *r;
    out.result = *v;
    return out;
}

Assignment assignment_from_meta(const nlohmann::ordered_json& meta, const FieldDesc& field) {
    Assignment a;
    if (!meta.contains("assignment")) return a;
    for (const auto& [var, text] : meta.at("assignment").items())
        a.emplace(var, FieldElement::parse(text.get<std::string>(), field));
    return a;
}

}  // namespace

nlohmann::ordered_json TraceVerdict::to_json() const {
    nlohmann::ordered_json j;
    j["structural"] = structural == Structural::complete      ? "complete"
                      : structural == Structural::incomplete ? "incomplete"
                                                              : "malformed";
    j["steps_checked"] = steps_checked;
    if (first_failing)
        j["first_failing"] = *first_failing;
    else
        j["first_failing"] = nullptr;
    j["final_ok"] = final_ok;
    return j;
}

TraceVerdict grade_trace(const DatasetRecord& record, const std::string& trace_lines) {
    if (record.circuits.empty()) throw DataError("record carries no circuit payload");
    const Circuit& c = record.circuits.front();
    const FieldDesc& field = record.cls.field;
    Assignment assignment = assignment_from_meta(record.meta, field);

    TraceVerdict v;
    std::map<GateId, FieldElement> established;
    auto leaf_value = [&](GateId id) -> std::optional<FieldElement> {
        const Gate& g = c.gate(id);
        if (g.kind == GateKind::constant) return g.value;
        if (g.kind == GateKind::variable) {
            auto it = assignment.find(g.var);
            if (it == assignment.end()) return std::nullopt;
            return it->second;
        }
        auto it = established.find(id);
        if (it == established.end()) return std::nullopt;
        return it->second;
    };

    std::vector<std::string> lines;
    {
        std::istringstream is(trace_lines);
        std::string line;
        while (std::getline(is, line))
            if (!trim(line).empty()) lines.push_back(line);
    }

    std::set<GateId> seen;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto parsed = parse_trace_line(lines[i], field);
        if (!parsed) {
            v.structural = TraceVerdict::Structural::malformed;
            if (!v.first_failing) v.first_failing = i;
            return v;
        }
        ++v.steps_checked;
        const TraceLine& step = *parsed;
        if (step.gate >= c.gates().size() || !c.gate(step.gate).is_operator() ||
            seen.count(step.gate)) {
            v.structural = TraceVerdict::Structural::malformed;
            if (!v.first_failing) v.first_failing = i;
            return v;
        }
        seen.insert(step.gate);

        bool ok = c.gate(step.gate).op() == step.op;
        if (ok) {
            auto kids = c.children(step.gate);
            auto lv = leaf_value(kids[0]), rv = leaf_value(kids[1]);
            if (!lv || !rv) {
                ok = false;  // operand not previously established
            } else {
                bool in_order = step.left == *lv && step.right == *rv;
                bool swapped = step.left == *rv && step.right == *lv;
                ok = in_order || swapped;
            }
        }
        if (ok) ok = field_op(step.left, step.right, step.op) == step.result;
        if (!ok && !v.first_failing) v.first_failing = i;
        established.emplace(step.gate, step.result);
    }

    for (const auto& g : c.gates())
        if (g.is_operator() && !seen.count(g.id)) {
            v.structural = TraceVerdict::Structural::incomplete;
            break;
        }

    if (c.operator_count() == 0) {
        v.final_ok = lines.empty();
    } else {
        auto it = established.find(c.output());
        v.final_ok = it != established.end() &&
                     it->second == FieldElement::parse(record.target, field);
    }
    return v;
}

// -- model output ingestion -----------------------------------------------------------

std::vector<ModelOutput> read_outputs(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::vector<ModelOutput> out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError(path + ":" + std::to_string(lineno) + ": bad JSON");
        if (j.value("schema", "") != "") continue;  // tolerate a header line
        ModelOutput mo;
        mo.id = j.at("id").get<std::uint64_t>();
        mo.output = j.value("output", "");
        if (j.contains("attention"))
            mo.attention = j.at("attention").get<std::vector<std::vector<double>>>();
        out.push_back(std::move(mo));
    }
    return out;
}

std::map<std::uint64_t, std::string> read_traces(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path + "'");
    std::map<std::uint64_t, std::string> out;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw DataError(path + ":" + std::to_string(lineno) + ": bad JSON");
        std::uint64_t id = j.at("id").get<std::uint64_t>();
        const auto& t = j.at("trace");
        if (t.is_string()) {
            out[id] = t.get<std::string>();
        } else {
            std::string joined;
            for (const auto& l : t) joined += l.get<std::string>() + "\n";
            out[id] = joined;
        }
    }
    return out;
}

// -- aggregation -----------------------------------------------------------------------

EvalReport aggregate(const std::vector<DatasetRecord>& records,
                     const std::vector<ModelOutput>& outputs,
                     const std::map<std::uint64_t, std::string>& traces) {
    std::map<std::uint64_t, const DatasetRecord*> by_id;
    for (const auto& r : records) by_id[r.id] = &r;
    std::map<std::uint64_t, const ModelOutput*> out_by_id;
    for (const auto& o : outputs) {
        if (!by_id.count(o.id)) throw UnknownRecordIdError(o.id);
        out_by_id[o.id] = &o;
    }
    for (const auto& [id, _] : traces)
        if (!by_id.count(id)) throw UnknownRecordIdError(id);

    EvalReport rep;
    std::uint64_t correct = 0;
    for (const auto& [id, rec] : by_id) {
        RecordGrade g;
        g.id = id;
        auto oit = out_by_id.find(id);
        if (oit == out_by_id.end()) {
            g.verdict.status = Verdict::Status::unparseable;
            g.verdict.detail = "no model output for this record";
        } else {
            g.verdict = grade_answer(*rec, oit->second->output);
            if (oit->second->attention && !rec->circuits.empty() && rec->task != Task::pit) {
                const Style style = style_from_name(rec->meta.at("style").get<std::string>());
                auto [ts, align] = render(rec->circuits.front(), style);
                g.attention_distance =
                    attention_distance(*oit->second->attention, rec->circuits.front(), align);
            }
        }
        auto tit = traces.find(id);
        if (tit != traces.end()) g.trace = grade_trace(*rec, tit->second);

        if (g.verdict.correct()) ++correct;
        auto& cls_bucket = rep.by_class[rec->cls.key()];
        ++cls_bucket.total;
        if (g.verdict.correct()) ++cls_bucket.correct;
        if (!rec->circuits.empty()) {
            const Circuit& c = rec->circuits.front();
            for (const auto& [name, value] :
                 std::initializer_list<std::pair<const char*, std::uint64_t>>{
                     {"size", c.size()}, {"depth", c.depth()}, {"degree", c.degree()}}) {
                auto& b = rep.by_bucket[std::string(name) + "=" + std::to_string(value)];
                ++b.total;
                if (g.verdict.correct()) ++b.correct;
            }
        }
        rep.grades.push_back(std::move(g));
    }

    const std::uint64_t n = records.size();
    rep.accuracy = n == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(n);
    rep.epsilon = 1.0 - rep.accuracy;
    return rep;
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = "report/1";
    j["n"] = grades.size();
    j["accuracy"] = accuracy;
    j["epsilon"] = epsilon;
    auto bucket_json = [](const std::map<std::string, Bucket>& m) {
        nlohmann::ordered_json b = nlohmann::ordered_json::object();
        for (const auto& [key, v] : m) {
            b[key] = {{"total", v.total},
                      {"correct", v.correct},
                      {"accuracy", v.total == 0
                                       ? 0.0
                                       : static_cast<double>(v.correct) /
                                             static_cast<double>(v.total)}};
        }
        return b;
    };
    j["by_class"] = bucket_json(by_class);
    j["by_bucket"] = bucket_json(by_bucket);
    auto& gs = j["verdicts"] = nlohmann::ordered_json::array();
    for (const auto& g : grades) {
        nlohmann::ordered_json gj;
        gj["id"] = g.id;
        gj["verdict"] = g.verdict.to_json();
        if (g.trace) gj["trace"] = g.trace->to_json();
        if (g.attention_distance) gj["attention_distance"] = *g.attention_distance;
        gs.push_back(std::move(gj));
    }
    return j;
}

// -- attention metric ---------------------------------------------------------------------

double attention_distance(const std::vector<std::vector<double>>& attention, const Circuit& c,
                          const Alignment& align) {
    Circuit tree = c.normalize_leaves();
    AdjacencyMatrix adj = adjacency(tree, align);
    if (adj.n == 0) throw AlignmentMismatchError("empty alignment");

    // Total token count of the rendered string. Infix renderings of operator
    // circuits open with "(" (position 0 unaligned) and close with ")", so
    // the last aligned token sits at total - 2; otherwise it is the last
    // token outright.
    const std::size_t max_pos = adj.positions.back();
    const std::size_t total = align.count(0) ? max_pos + 1 : max_pos + 2;
    if (attention.size() != total) throw ShapeMismatchError(attention.size(), total);
    for (std::size_t r = 0; r < attention.size(); ++r) {
        if (attention[r].size() != total) throw ShapeMismatchError(attention[r].size(), total);
        double sum = 0;
        for (double x : attention[r]) sum += x;
        if (std::abs(sum - 1.0) > 1e-6 && std::abs(sum) > 1e-9)
            throw NotRowStochasticError(r);
    }

    // parent position of every aligned gate
    std::vector<std::optional<std::size_t>> parent_index(adj.n);
    for (std::size_t i = 0; i < adj.n; ++i)
        for (std::size_t j = 0; j < adj.n; ++j)
            if (adj.at(i, j)) parent_index[i] = j;

    double sum_tv = 0;
    std::size_t scored = 0;
    for (std::size_t i = 0; i < adj.n; ++i) {
        if (!parent_index[i]) continue;  // the output gate is not scored
        const auto& row = attention[adj.positions[i]];
        double mass = 0;
        for (std::size_t k = 0; k < adj.n; ++k) mass += row[adj.positions[k]];
        double tv;
        if (mass <= 1e-12) {
            tv = 1.0;
        } else {
            tv = 0;
            for (std::size_t k = 0; k < adj.n; ++k) {
                double p = row[adj.positions[k]] / mass;
                double q = k == *parent_index[i] ? 1.0 : 0.0;
                tv += std::abs(p - q);
            }
            tv /= 2.0;
        }
        sum_tv += tv;
        ++scored;
    }
    return scored == 0 ? 0.0 : sum_tv / static_cast<double>(scored);
}

// -- prompts ---------------------------------------------------------------------------------

nlohmann::ordered_json PromptBundle::to_json() const {
    nlohmann::ordered_json j;
    auto& s = j["support"] = nlohmann::ordered_json::array();
    for (const auto& [q, a] : support) s.push_back({{"question", q}, {"answer", a}});
    j["query"] = query;
    j["text"] = text;
    j["classes"] = classes;
    return j;
}

PromptBundle build_prompt(const std::vector<DatasetRecord>& support, const DatasetRecord& query,
                          const PromptTemplate& tmpl) {
    for (const auto& r : support)
        if (r.task != query.task) throw MixedTaskKindsError();

    PromptBundle b;
    std::ostringstream os;
    for (const auto& r : support) {
        b.support.emplace_back(r.input, r.target);
        b.classes.push_back(r.cls.to_json());
        os << tmpl.question_prefix << r.input << " " << tmpl.answer_prefix << r.target
           << tmpl.separator;
    }
    b.query = query.input;
    b.classes.push_back(query.cls.to_json());
    std::string answer_head = tmpl.answer_prefix;
    while (!answer_head.empty() && answer_head.back() == ' ') answer_head.pop_back();
    os << tmpl.question_prefix << query.input << " " << answer_head;
    b.text = os.str();
    return b;
}

}  // namespace circuitforge
