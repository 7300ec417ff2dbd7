// circuit-forge: generate, split, grade and inspect algebraic-circuit
// benchmarks. Exit codes: 0 success, 1 usage error, 2 data error.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "circuitforge/benchgen.hpp"
#include "circuitforge/harness.hpp"
#include "circuitforge/identity.hpp"

namespace cf = circuitforge;
using nlohmann::ordered_json;

namespace {

nlohmann::json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cf::DataError("cannot open '" + path + "'");
    nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw cf::DataError("'" + path + "' is not valid JSON");
    return j;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cf::DataError("cannot open '" + path + "' for writing");
    out << text;
}

void write_json_file(const std::string& path, const ordered_json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

cf::CircuitClass class_from_file(const nlohmann::json& j) {
    if (j.contains("class")) return cf::CircuitClass::from_json(j.at("class"));
    return cf::CircuitClass::from_json(j);
}

cf::GateSampler sampler_from_file(const nlohmann::json& j) {
    if (j.contains("sampler")) return cf::GateSampler::from_json(j.at("sampler"));
    return cf::GateSampler::from_json(j);
}

struct GenOptions {
    std::string task;
    std::string class_path, sampler_path, out_path;
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::string style = "infix";
    unsigned chain_length = 3;
    unsigned retries = 16;
    bool with_variables = false;
    bool no_audit = false;
};

int run_gen(const GenOptions& opt) {
    const cf::Task task = cf::task_from_name(opt.task);
    const cf::Style style = cf::style_from_name(opt.style);
    nlohmann::json class_doc = read_json_file(opt.class_path);
    nlohmann::json sampler_doc =
        opt.sampler_path.empty() ? class_doc : read_json_file(opt.sampler_path);
    cf::GateSampler sampler = sampler_from_file(sampler_doc);

    ordered_json config;
    config["task"] = opt.task;
    config["n"] = opt.n;
    config["seed"] = opt.seed;
    config["style"] = opt.style;
    config["sampler"] = sampler.to_json();

    std::vector<cf::DatasetRecord> records;
    switch (task) {
        case cf::Task::evaluate: {
            cf::CircuitClass cls = class_from_file(class_doc);
            config["class"] = cls.to_json();
            config["with_variables"] = opt.with_variables;
            records = cf::gen_evaluate(cls, sampler, opt.n, opt.seed, style, opt.with_variables);
            break;
        }
        case cf::Task::pit: {
            cf::CircuitClass cls = class_from_file(class_doc);
            config["class"] = cls.to_json();
            config["chain_length"] = opt.chain_length;
            config["retries"] = opt.retries;
            records = cf::gen_pit(opt.chain_length, opt.retries, cls, sampler, opt.n, opt.seed,
                                  style);
            break;
        }
        case cf::Task::expand:
        case cf::Task::factor: {
            if (!class_doc.contains("factored"))
                throw cf::InvalidSpecError("expand/factor generation needs a \"factored\" spec");
            cf::FactoredSpec spec = cf::FactoredSpec::from_json(class_doc.at("factored"));
            cf::FieldDesc field = cf::FieldDesc::rational();
            if (class_doc.contains("class"))
                field = cf::CircuitClass::from_json(class_doc.at("class")).field;
            config["factored"] = spec.to_json();
            records = cf::gen_seq2seq(task, spec, sampler, field, opt.n, opt.seed, style);
            break;
        }
    }

    const std::string hash = cf::fnv1a_hex(config.dump());
    if (!opt.no_audit) {
        cf::AuditReport audit = cf::audit_dataset(records);
        if (!audit.ok()) {
            std::cerr << "audit failed for " << audit.failed_ids.size() << " of "
                      << audit.checked << " records\n";
            return 2;
        }
    }
    cf::write_dataset(opt.out_path, records, hash);
    std::cout << records.size() << " records -> " << opt.out_path << " (config " << hash
              << (opt.no_audit ? ", unaudited" : ", audited") << ")\n";
    return 0;
}

int run_split(const std::string& train_path, const std::string& test_path,
              const std::string& mode, const std::string& out_path) {
    cf::SplitSide train = cf::split_side_from_json(read_json_file(train_path));
    cf::SplitSide test = cf::split_side_from_json(read_json_file(test_path));
    cf::SplitManifest m = cf::design_split(train, test, cf::split_mode_from_name(mode));
    write_json_file(out_path, m.to_json());
    for (const auto& w : m.warnings) std::cerr << "warning: " << w << "\n";
    std::cout << "split manifest -> " << out_path << " (systematic=" << m.systematic
              << ", productive=" << m.productive << ", " << m.warnings.size()
              << " warnings)\n";
    return 0;
}

int run_divergence(const std::string& train_path, const std::string& test_path,
                   const std::string& out_path) {
    cf::Dataset train = cf::read_dataset(train_path);
    cf::Dataset test = cf::read_dataset(test_path);
    cf::DivergenceReport rep = cf::divergence(train.records, test.records);
    write_json_file(out_path, rep.to_json());
    std::cout << "divergence report -> " << out_path << "\n";
    return 0;
}

int run_grade(const std::string& dataset_path, const std::string& outputs_path,
              const std::string& traces_path, const std::string& out_path) {
    cf::Dataset ds = cf::read_dataset(dataset_path);
    std::vector<cf::ModelOutput> outputs = cf::read_outputs(outputs_path);
    std::map<std::uint64_t, std::string> traces;
    if (!traces_path.empty()) traces = cf::read_traces(traces_path);
    cf::EvalReport rep = cf::aggregate(ds.records, outputs, traces);
    write_json_file(out_path, rep.to_json());
    std::cout << "graded " << ds.records.size() << " records: accuracy " << rep.accuracy
              << ", epsilon " << rep.epsilon << " -> " << out_path << "\n";
    return 0;
}

int run_prompt(const std::string& dataset_path, const std::string& support_ids,
               std::uint64_t query_id, const std::string& out_path) {
    cf::Dataset ds = cf::read_dataset(dataset_path);
    std::map<std::uint64_t, const cf::DatasetRecord*> by_id;
    for (const auto& r : ds.records) by_id[r.id] = &r;
    auto find = [&](std::uint64_t id) -> const cf::DatasetRecord& {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw cf::UnknownRecordIdError(id);
        return *it->second;
    };
    std::vector<cf::DatasetRecord> support;
    if (!support_ids.empty()) {
        std::stringstream ss(support_ids);
        std::string item;
        while (std::getline(ss, item, ',')) {
            if (item.empty()) continue;
            support.push_back(find(std::stoull(item)));
        }
    }
    cf::PromptBundle bundle = cf::build_prompt(support, find(query_id));
    write_text_file(out_path, bundle.text + "\n");
    std::cout << support.size() << "-shot prompt -> " << out_path << "\n";
    return 0;
}

int run_render(const std::string& circuit_path, const std::string& style) {
    cf::Circuit c = cf::Circuit::from_json(read_json_file(circuit_path));
    std::cout << cf::render_text(c, cf::style_from_name(style)) << "\n";
    return 0;
}

int run_parse(const std::string& text, const std::string& style, bool lenient,
              const std::string& out_path) {
    auto [c, align] = cf::parse_text(text, cf::style_from_name(style), lenient);
    if (out_path.empty())
        std::cout << c.to_json().dump(2) << "\n";
    else
        write_json_file(out_path, c.to_json());
    return 0;
}

int run_inspect(const std::string& circuit_path) {
    cf::Circuit c = cf::Circuit::from_json(read_json_file(circuit_path));
    ordered_json j;
    j["size"] = c.size();
    j["depth"] = c.depth();
    j["operator_gates"] = c.operator_count();
    j["degree"] = c.degree();
    j["variables"] = c.variables();
    cf::Polynomial p = c.to_polynomial();
    j["polynomial"] = p.to_string();
    j["canonical_degree"] = p.degree();
    j["is_zero"] = p.is_zero();
    j["infix"] = cf::render_text(c, cf::Style::infix);
    j["prefix"] = cf::render_text(c, cf::Style::prefix);
    std::cout << j.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"algebraic-circuit benchmark toolkit"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* cmd_gen = app.add_subcommand("gen", "generate a verified dataset");
    cmd_gen->add_option("--task", gen.task, "evaluate|pit|expand|factor")->required();
    cmd_gen->add_option("--class", gen.class_path, "class/1 config file")->required();
    cmd_gen->add_option("--sampler", gen.sampler_path, "sampler config file");
    cmd_gen->add_option("-n,--count", gen.n, "number of records")->required();
    cmd_gen->add_option("--seed", gen.seed, "root seed (all randomness flows from it)")
        ->required();
    cmd_gen->add_option("--style", gen.style, "infix|prefix (default infix)");
    cmd_gen->add_option("--chain-length", gen.chain_length, "rewrite chain length for pit");
    cmd_gen->add_option("--retries", gen.retries, "perturbation retry budget");
    cmd_gen->add_flag("--with-variables", gen.with_variables,
                      "evaluate task: allow variable leaves with per-record bindings");
    cmd_gen->add_flag("--no-audit", gen.no_audit, "skip the post-generation audit pass");
    cmd_gen->add_option("-o,--out", gen.out_path, "output JSONL path")->required();

    std::string split_train, split_test, split_mode = "custom", split_out;
    auto* cmd_split = app.add_subcommand("split", "design a train/test split");
    cmd_split->add_option("--train", split_train, "train side spec")->required();
    cmd_split->add_option("--test", split_test, "test side spec")->required();
    cmd_split->add_option("--mode", split_mode, "systematic|productive|custom");
    cmd_split->add_option("-o,--out", split_out, "manifest output path")->required();

    std::string div_train, div_test, div_out;
    auto* cmd_div = app.add_subcommand("divergence", "per-property train/test divergence");
    cmd_div->add_option("--train", div_train, "train dataset JSONL")->required();
    cmd_div->add_option("--test", div_test, "test dataset JSONL")->required();
    cmd_div->add_option("-o,--out", div_out, "report output path")->required();

    std::string grade_dataset, grade_outputs, grade_traces, grade_out;
    auto* cmd_grade = app.add_subcommand("grade", "grade model outputs against a dataset");
    cmd_grade->add_option("--dataset", grade_dataset, "dataset JSONL")->required();
    cmd_grade->add_option("--outputs", grade_outputs, "model outputs JSONL")->required();
    cmd_grade->add_option("--traces", grade_traces, "model trace JSONL");
    cmd_grade->add_option("-o,--out", grade_out, "report output path")->required();

    std::string prompt_dataset, prompt_support, prompt_out;
    std::uint64_t prompt_query = 0;
    auto* cmd_prompt = app.add_subcommand("prompt", "assemble a few-shot prompt");
    cmd_prompt->add_option("--dataset", prompt_dataset, "dataset JSONL")->required();
    cmd_prompt->add_option("--support-ids", prompt_support, "comma-separated record ids");
    cmd_prompt->add_option("--query-id", prompt_query, "query record id")->required();
    cmd_prompt->add_option("-o,--out", prompt_out, "prompt text output path")->required();

    std::string render_circuit, render_style = "infix";
    auto* cmd_render = app.add_subcommand("render", "token string of a circuit/1 file");
    cmd_render->add_option("--circuit", render_circuit, "circuit/1 JSON file")->required();
    cmd_render->add_option("--style", render_style, "infix|prefix");

    std::string parse_text_arg, parse_style = "infix", parse_out;
    bool parse_lenient = false;
    auto* cmd_parse = app.add_subcommand("parse", "parse a token string into circuit/1 JSON");
    cmd_parse->add_option("--text", parse_text_arg, "expression text")->required();
    cmd_parse->add_option("--style", parse_style, "infix|prefix");
    cmd_parse->add_flag("--lenient", parse_lenient, "accept precedence and loose spacing");
    cmd_parse->add_option("-o,--out", parse_out, "circuit output path (default stdout)");

    std::string inspect_circuit;
    auto* cmd_inspect = app.add_subcommand("inspect", "structural summary of a circuit");
    cmd_inspect->add_option("--circuit", inspect_circuit, "circuit/1 JSON file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_split->parsed()) return run_split(split_train, split_test, split_mode, split_out);
        if (cmd_div->parsed()) return run_divergence(div_train, div_test, div_out);
        if (cmd_grade->parsed())
            return run_grade(grade_dataset, grade_outputs, grade_traces, grade_out);
        if (cmd_prompt->parsed())
            return run_prompt(prompt_dataset, prompt_support, prompt_query, prompt_out);
        if (cmd_render->parsed()) return run_render(render_circuit, render_style);
        if (cmd_parse->parsed())
            return run_parse(parse_text_arg, parse_style, parse_lenient, parse_out);
        if (cmd_inspect->parsed()) return run_inspect(inspect_circuit);
    } catch (const cf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
