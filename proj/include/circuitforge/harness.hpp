#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "circuitforge/benchgen.hpp"
#include "circuitforge/identity.hpp"

namespace circuitforge {

struct Verdict {
    enum class Status { correct, incorrect, unparseable };
    Status status = Status::unparseable;
    bool syntactic_match = false;  // seq2seq only: exact canonical string
    std::string normalized;        // canonical form of the model answer
    std::string detail;            // failure description
    std::optional<PitResult> semantic_check;  // seq2seq: the equivalence test run

    bool correct() const { return status == Status::correct; }
    nlohmann::ordered_json to_json() const;
};

// evaluate: lenient-parse a field value, exact equality with the target.
// pit: normalize {0,1,yes,no,true,false} to a label.
// expand/factor: lenient-parse, semantic polynomial equality, plus a
// separate syntactic flag for the exact canonical string.
Verdict grade_answer(const DatasetRecord& record, const std::string& output_text);

struct TraceVerdict {
    enum class Structural { complete, incomplete, malformed };
    Structural structural = Structural::complete;
    std::size_t steps_checked = 0;
    std::optional<std::size_t> first_failing;  // step index in the model trace
    bool final_ok = false;

    bool passed() const {
        return structural == Structural::complete && !first_failing && final_ok;
    }
    nlohmann::ordered_json to_json() const;
};

// Verifies "g<k> = <left> <op> <right> -> <value>" lines against the
// record's circuit: exact arithmetic per step, operands equal to previously
// established child values, full operator coverage, and the final value
// against the target.
TraceVerdict grade_trace(const DatasetRecord& record, const std::string& trace_lines);

// One line of the model-outputs JSONL: {"id", "output", optional "attention"}.
struct ModelOutput {
    std::uint64_t id = 0;
    std::string output;
    std::optional<std::vector<std::vector<double>>> attention;
};

std::vector<ModelOutput> read_outputs(const std::string& path);
std::map<std::uint64_t, std::string> read_traces(const std::string& path);

struct RecordGrade {
    std::uint64_t id = 0;
    Verdict verdict;
    std::optional<TraceVerdict> trace;
    std::optional<double> attention_distance;
};

struct EvalReport {
    std::vector<RecordGrade> grades;  // ordered by record id
    double accuracy = 0.0;
    double epsilon = 1.0;

    struct Bucket {
        std::uint64_t total = 0, correct = 0;
    };
    std::map<std::string, Bucket> by_class;
    std::map<std::string, Bucket> by_bucket;  // size/depth/degree property buckets

    nlohmann::ordered_json to_json() const;  // schema "report/1"
};

// Missing outputs count as unparseable; outputs for unknown ids raise
// UnknownRecordIdError. Deterministic fold ordered by record id.
EvalReport aggregate(const std::vector<DatasetRecord>& records,
                     const std::vector<ModelOutput>& outputs,
                     const std::map<std::uint64_t, std::string>& traces = {});

// Mean row-wise total-variation distance between the model's attention and
// the circuit's adjacency target. A is (total token count)^2 and
// row-stochastic within 1e-6 (all-zero rows are permitted and treated as
// absent attention). Rows are restricted to aligned (non-parenthesis)
// positions and renormalized; each aligned token with a parent is scored
// against the one-hot row of the adjacency matrix (its parent's position).
// The output-gate row has no adjacency target and is not scored.
double attention_distance(const std::vector<std::vector<double>>& attention, const Circuit& c,
                          const Alignment& align);

struct PromptTemplate {
    std::string question_prefix = "Q: ";
    std::string answer_prefix = "A: ";
    std::string separator = "\n";
};

struct PromptBundle {
    std::vector<std::pair<std::string, std::string>> support;  // (question, answer)
    std::string query;
    std::string text;  // rendered prompt, ends with the bare answer prefix
    std::vector<nlohmann::ordered_json> classes;  // support classes then query class

    nlohmann::ordered_json to_json() const;
};

// "Q: <input> A: <target>" per support record, then "Q: <query input> A:".
// Support may be empty (zero-shot); all items must share one task kind.
PromptBundle build_prompt(const std::vector<DatasetRecord>& support, const DatasetRecord& query,
                          const PromptTemplate& tmpl = {});

}  // namespace circuitforge
