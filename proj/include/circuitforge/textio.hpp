#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "circuitforge/circuit.hpp"

namespace circuitforge {

enum class Style { infix, prefix };

inline std::string style_name(Style s) { return s == Style::infix ? "infix" : "prefix"; }
Style style_from_name(const std::string& name);

struct Token {
    enum class Kind { constant, variable, plus, times, lparen, rparen };
    Kind kind;
    std::string text;

    bool is_paren() const { return kind == Kind::lparen || kind == Kind::rparen; }
    bool is_op() const { return kind == Kind::plus || kind == Kind::times; }
};

// Single-space-separated token sequence. Infix is fully parenthesized
// binary; prefix carries no parentheses.
struct TokenString {
    std::vector<Token> tokens;
    Style style = Style::infix;

    std::string to_text() const;
    std::size_t aligned_count() const;  // non-parenthesis tokens
};

// Non-parenthesis token position -> gate id of the (leaf-duplicated) formula
// tree; a bijection onto its gates.
using Alignment = std::map<std::size_t, GateId>;

// 0/1 matrix over non-parenthesis token positions: entry (i,j) = 1 iff the
// gate at position i is a child of the gate at position j.
struct AdjacencyMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> positions;  // full-string positions, ascending
    std::vector<GateId> gates;           // gate aligned to each index
    std::vector<std::uint8_t> bits;      // row-major

    bool at(std::size_t i, std::size_t j) const { return bits[i * n + j] != 0; }
    std::size_t ones() const;
};

// Splits strict dataset text (single spaces, canonical grammar) into tokens.
TokenString tokenize(const std::string& text, Style style);

// Character-level lexer for grading model output: arbitrary whitespace,
// adjacent punctuation, negative literals. Infix only.
TokenString lex_lenient(const std::string& text);

// Token string plus token-to-gate alignment for the normalized formula tree
// of c. Gate ids in the alignment match c.normalize_leaves().
std::pair<TokenString, Alignment> render(const Circuit& c, Style style);

inline std::string render_text(const Circuit& c, Style style = Style::infix) {
    return render(c, style).first.to_text();
}

// Strict mode accepts exactly render's grammar. Lenient mode additionally
// accepts redundant parentheses and "*"-over-"+" precedence; it exists for
// grading model output and is never used on dataset inputs.
std::pair<Circuit, Alignment> parse(const TokenString& ts, bool lenient = false,
                                    FieldDesc field = FieldDesc::rational());

std::pair<Circuit, Alignment> parse_text(const std::string& text, Style style = Style::infix,
                                         bool lenient = false,
                                         FieldDesc field = FieldDesc::rational());

AdjacencyMatrix adjacency(const Circuit& c, const Alignment& align);

}  // namespace circuitforge
