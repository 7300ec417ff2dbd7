#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace circuitforge {

// Base class for every typed error the library throws. The CLI maps these
// to exit code 2 (data error); anything else is a usage or internal error.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct MixedFieldError : Error {
    MixedFieldError() : Error("operands belong to different fields") {}
    explicit MixedFieldError(const std::string& what) : Error(what) {}
};

struct MissingVariableError : Error {
    std::string variable;
    explicit MissingVariableError(std::string var)
        : Error("assignment does not cover variable '" + var + "'"), variable(std::move(var)) {}
};

struct DegreeOverflowError : Error {
    explicit DegreeOverflowError(std::size_t cap)
        : Error("polynomial expansion exceeds the term cap (" + std::to_string(cap) + ")") {}
};

// -- circuit construction ----------------------------------------------------

struct CycleDetectedError : Error {
    CycleDetectedError() : Error("circuit graph contains a cycle") {}
};

struct FanInViolationError : Error {
    std::uint32_t gate;
    explicit FanInViolationError(std::uint32_t g)
        : Error("gate " + std::to_string(g) + " has invalid fan-in"), gate(g) {}
};

struct FanOutViolationError : Error {
    std::uint32_t gate;
    explicit FanOutViolationError(std::uint32_t g)
        : Error("operator gate " + std::to_string(g) + " has fan-out > 1"), gate(g) {}
};

struct AmbiguousOutputError : Error {
    AmbiguousOutputError() : Error("circuit does not have a unique output gate") {}
};

struct DanglingGateError : Error {
    std::uint32_t gate;
    explicit DanglingGateError(std::uint32_t g)
        : Error("gate " + std::to_string(g) + " is not connected to the output"), gate(g) {}
};

struct UnknownGateError : Error {
    std::uint32_t gate;
    explicit UnknownGateError(std::uint32_t g)
        : Error("no gate with id " + std::to_string(g)), gate(g) {}
};

struct NotARootError : Error {
    std::uint32_t gate;
    explicit NotARootError(std::uint32_t g)
        : Error("gate " + std::to_string(g) + " is a shared input gate, not a subcircuit root"), gate(g) {}
};

// -- token strings ------------------------------------------------------------

struct SyntaxError : Error {
    std::size_t position;  // token index
    explicit SyntaxError(std::size_t pos, const std::string& detail = "unexpected token")
        : Error(detail + " at position " + std::to_string(pos)), position(pos) {}
};

struct UnbalancedParensError : Error {
    UnbalancedParensError() : Error("unbalanced parentheses") {}
};

struct UnknownTokenError : Error {
    std::string token;
    explicit UnknownTokenError(std::string text)
        : Error("unknown token '" + text + "'"), token(std::move(text)) {}
};

struct AlignmentMismatchError : Error {
    explicit AlignmentMismatchError(const std::string& what = "alignment does not match circuit")
        : Error(what) {}
};

// -- generation ---------------------------------------------------------------

struct InfeasibleClassError : Error {
    InfeasibleClassError(std::uint32_t s, std::uint32_t d)
        : Error("no circuit has size " + std::to_string(s) + " and depth " + std::to_string(d)) {}
};

struct EmptySamplerError : Error {
    explicit EmptySamplerError(const std::string& what = "gate sampler has no usable distribution")
        : Error(what) {}
};

struct RuleNotApplicableError : Error {
    std::uint32_t gate;
    explicit RuleNotApplicableError(std::uint32_t g)
        : Error("rewrite rule not applicable at gate " + std::to_string(g)), gate(g) {}
};

struct NoApplicableSiteError : Error {
    NoApplicableSiteError() : Error("rewrite rule has no applicable site in this circuit") {}
};

struct PerturbExhaustedError : Error {
    explicit PerturbExhaustedError(unsigned retries)
        : Error("no non-equivalent perturbation found in " + std::to_string(retries) + " attempts") {}
};

struct InvalidSpecError : Error {
    explicit InvalidSpecError(const std::string& what) : Error(what) {}
};

// -- datasets and splits -------------------------------------------------------

struct SpecError : Error {
    explicit SpecError(const std::string& what) : Error(what) {}
};

struct EmptySideError : Error {
    EmptySideError() : Error("divergence requires nonempty train and test sides") {}
};

struct UnknownRecordIdError : Error {
    std::uint64_t id;
    explicit UnknownRecordIdError(std::uint64_t rid)
        : Error("output references unknown record id " + std::to_string(rid)), id(rid) {}
};

struct MixedTaskKindsError : Error {
    MixedTaskKindsError() : Error("prompt items must share one task kind") {}
};

// -- identity testing ----------------------------------------------------------

struct DegreeTooLargeError : Error {
    DegreeTooLargeError() : Error("degree bound is not below the field size") {}
};

struct NonEmbeddableConstantError : Error {
    NonEmbeddableConstantError() : Error("rational constant has a denominator divisible by the prime") {}
};

// -- attention grading -----------------------------------------------------------

struct ShapeMismatchError : Error {
    ShapeMismatchError(std::size_t got, std::size_t want)
        : Error("attention matrix is " + std::to_string(got) + "x" + std::to_string(got) +
                ", expected " + std::to_string(want) + "x" + std::to_string(want)) {}
};

struct NotRowStochasticError : Error {
    explicit NotRowStochasticError(std::size_t row)
        : Error("attention row " + std::to_string(row) + " does not sum to 1") {}
};

// -- file / JSON ingestion -------------------------------------------------------

struct DataError : Error {
    explicit DataError(const std::string& what) : Error(what) {}
};

}  // namespace circuitforge
