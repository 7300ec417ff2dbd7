#include "circuitforge/textio.hpp"

#include <cctype>
#include <sstream>

namespace circuitforge {

Style style_from_name(const std::string& name) {
    if (name == "infix") return Style::infix;
    if (name == "prefix") return Style::prefix;
    throw DataError("unknown style '" + name + "'");
}

std::string TokenString::to_text() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) os << ' ';
        os << tokens[i].text;
    }
    return os.str();
}

std::size_t TokenString::aligned_count() const {
    std::size_t n = 0;
    for (const auto& t : tokens)
        if (!t.is_paren()) ++n;
    return n;
}

std::size_t AdjacencyMatrix::ones() const {
    std::size_t k = 0;
    for (auto b : bits) k += b;
    return k;
}

namespace {

bool is_constant_text(const std::string& t) {
    std::size_t i = t[0] == '-' ? 1 : 0;
    if (i == t.size()) return false;
    bool slash = false;
    for (std::size_t j = i; j < t.size(); ++j) {
        if (t[j] == '/' && !slash && j > i && j + 1 < t.size()) {
            slash = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(t[j]))) return false;
    }
    return true;
}

bool is_identifier(const std::string& t) {
    if (!(std::isalpha(static_cast<unsigned char>(t[0])) || t[0] == '_')) return false;
    for (char c : t)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

Token classify(const std::string& text) {
    if (text == "(") return {Token::Kind::lparen, text};
    if (text == ")") return {Token::Kind::rparen, text};
    if (text == "+") return {Token::Kind::plus, text};
    if (text == "*") return {Token::Kind::times, text};
    if (is_constant_text(text)) return {Token::Kind::constant, text};
    if (is_identifier(text)) return {Token::Kind::variable, text};
    throw UnknownTokenError(text);
}

}  // namespace

TokenString tokenize(const std::string& text, Style style) {
    TokenString ts;
    ts.style = style;
    std::string cur;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        if (i == text.size() || text[i] == ' ') {
            if (cur.empty()) {
                if (i != text.size() || !ts.tokens.empty())
                    continue;  // tolerate leading/trailing space runs
            } else {
                ts.tokens.push_back(classify(cur));
                cur.clear();
            }
        } else {
            cur += text[i];
        }
    }
    return ts;
}

TokenString lex_lenient(const std::string& text) {
    TokenString ts;
    ts.style = Style::infix;
    std::size_t i = 0;
    while (i < text.size()) {
        char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        if (c == '(' || c == ')' || c == '+' || c == '*') {
            ts.tokens.push_back(classify(std::string(1, c)));
            ++i;
            continue;
        }
        if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i + 1;
            if (c == '-' && (j >= text.size() || !std::isdigit(static_cast<unsigned char>(text[j]))))
                throw UnknownTokenError("-");
            while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j < text.size() && text[j] == '/' && j + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
                ++j;
                while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            }
            ts.tokens.push_back({Token::Kind::constant, text.substr(i, j - i)});
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i + 1;
            while (j < text.size() &&
                   (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            ts.tokens.push_back({Token::Kind::variable, text.substr(i, j - i)});
            i = j;
            continue;
        }
        throw UnknownTokenError(std::string(1, c));
    }
    return ts;
}

// -- rendering ---------------------------------------------------------------

namespace {

// Post-order ids mirror formula_to_circuit, so the alignment refers to the
// gates of the normalized circuit.
void number_postorder(const Formula& f, std::map<const Formula*, GateId>& ids, GateId& next) {
    if (f.left) number_postorder(*f.left, ids, next);
    if (f.right) number_postorder(*f.right, ids, next);
    ids[&f] = next++;
}

void render_node(const Formula& f, Style style, const std::map<const Formula*, GateId>& ids,
                 TokenString& ts, Alignment& align) {
    auto emit = [&](Token t) {
        align[ts.tokens.size()] = ids.at(&f);
        ts.tokens.push_back(std::move(t));
    };
    if (f.kind == GateKind::constant) {
        emit({Token::Kind::constant, f.value.to_string()});
        return;
    }
    if (f.kind == GateKind::variable) {
        emit({Token::Kind::variable, f.var});
        return;
    }
    Token op{f.kind == GateKind::sum ? Token::Kind::plus : Token::Kind::times,
             std::string(1, op_symbol(f.op()))};
    if (style == Style::infix) {
        ts.tokens.push_back({Token::Kind::lparen, "("});
        render_node(*f.left, style, ids, ts, align);
        emit(std::move(op));
        render_node(*f.right, style, ids, ts, align);
        ts.tokens.push_back({Token::Kind::rparen, ")"});
    } else {
        emit(std::move(op));
        render_node(*f.left, style, ids, ts, align);
        render_node(*f.right, style, ids, ts, align);
    }
}

}  // namespace

std::pair<TokenString, Alignment> render(const Circuit& c, Style style) {
    FormulaPtr tree = circuit_to_formula(c);
    std::map<const Formula*, GateId> ids;
    GateId next = 0;
    number_postorder(*tree, ids, next);
    TokenString ts;
    ts.style = style;
    Alignment align;
    render_node(*tree, style, ids, ts, align);
    return {std::move(ts), std::move(align)};
}

// -- parsing -----------------------------------------------------------------

namespace {

struct Cursor {
    const std::vector<Token>& toks;
    std::size_t pos = 0;

    bool done() const { return pos >= toks.size(); }
    const Token& peek() const {
        if (done()) throw SyntaxError(pos, "unexpected end of input");
        return toks[pos];
    }
    const Token& take() {
        const Token& t = peek();
        ++pos;
        return t;
    }
};

struct ParsedNode {
    FormulaPtr tree;
};

// Leaf / operator positions are recorded during parsing and bound to gate
// ids afterwards via the same post-order numbering render uses.
using PositionMap = std::map<const Formula*, std::size_t>;

FormulaPtr make_leaf(const Token& t, const FieldDesc& field) {
    if (t.kind == Token::Kind::constant)
        return Formula::make_const(FieldElement::parse(t.text, field));
    return Formula::make_var(t.text);
}

FormulaPtr parse_strict_infix(Cursor& cur, const FieldDesc& field, PositionMap& where) {
    const Token& t = cur.peek();
    if (t.kind == Token::Kind::lparen) {
        cur.take();
        FormulaPtr left = parse_strict_infix(cur, field, where);
        const Token& op = cur.peek();
        if (!op.is_op()) throw SyntaxError(cur.pos, "expected operator");
        std::size_t op_pos = cur.pos;
        cur.take();
        FormulaPtr right = parse_strict_infix(cur, field, where);
        if (cur.done()) throw UnbalancedParensError();
        if (cur.peek().kind != Token::Kind::rparen) throw SyntaxError(cur.pos, "expected ')'");
        cur.take();
        FormulaPtr node = Formula::make_op(
            op.kind == Token::Kind::plus ? OpKind::sum : OpKind::product, std::move(left),
            std::move(right));
        where[node.get()] = op_pos;
        return node;
    }
    if (t.kind == Token::Kind::constant || t.kind == Token::Kind::variable) {
        std::size_t pos = cur.pos;
        FormulaPtr leaf = make_leaf(cur.take(), field);
        where[leaf.get()] = pos;
        return leaf;
    }
    if (t.kind == Token::Kind::rparen) throw SyntaxError(cur.pos, "unexpected ')'");
    throw SyntaxError(cur.pos, "expected expression");
}

FormulaPtr parse_strict_prefix(Cursor& cur, const FieldDesc& field, PositionMap& where) {
    const Token& t = cur.peek();
    if (t.is_paren()) throw SyntaxError(cur.pos, "parenthesis in prefix input");
    if (t.is_op()) {
        std::size_t op_pos = cur.pos;
        OpKind op = cur.take().kind == Token::Kind::plus ? OpKind::sum : OpKind::product;
        FormulaPtr left = parse_strict_prefix(cur, field, where);
        FormulaPtr right = parse_strict_prefix(cur, field, where);
        FormulaPtr node = Formula::make_op(op, std::move(left), std::move(right));
        where[node.get()] = op_pos;
        return node;
    }
    std::size_t pos = cur.pos;
    FormulaPtr leaf = make_leaf(cur.take(), field);
    where[leaf.get()] = pos;
    return leaf;
}

FormulaPtr parse_lenient_expr(Cursor& cur, const FieldDesc& field, PositionMap& where);

FormulaPtr parse_lenient_factor(Cursor& cur, const FieldDesc& field, PositionMap& where) {
    const Token& t = cur.peek();
    if (t.kind == Token::Kind::lparen) {
        cur.take();
        FormulaPtr inner = parse_lenient_expr(cur, field, where);
        if (cur.done()) throw UnbalancedParensError();
        if (cur.peek().kind != Token::Kind::rparen) throw SyntaxError(cur.pos, "expected ')'");
        cur.take();
        return inner;
    }
    if (t.kind == Token::Kind::constant || t.kind == Token::Kind::variable) {
        std::size_t pos = cur.pos;
        FormulaPtr leaf = make_leaf(cur.take(), field);
        where[leaf.get()] = pos;
        return leaf;
    }
    if (t.kind == Token::Kind::rparen) throw SyntaxError(cur.pos, "unexpected ')'");
    throw SyntaxError(cur.pos, "expected expression");
}

FormulaPtr parse_lenient_term(Cursor& cur, const FieldDesc& field, PositionMap& where) {
    FormulaPtr acc = parse_lenient_factor(cur, field, where);
    while (!cur.done() && cur.peek().kind == Token::Kind::times) {
        std::size_t op_pos = cur.pos;
        cur.take();
        FormulaPtr rhs = parse_lenient_factor(cur, field, where);
        acc = Formula::make_op(OpKind::product, std::move(acc), std::move(rhs));
        where[acc.get()] = op_pos;
    }
    return acc;
}

FormulaPtr parse_lenient_expr(Cursor& cur, const FieldDesc& field, PositionMap& where) {
    FormulaPtr acc = parse_lenient_term(cur, field, where);
    while (!cur.done() && cur.peek().kind == Token::Kind::plus) {
        std::size_t op_pos = cur.pos;
        cur.take();
        FormulaPtr rhs = parse_lenient_term(cur, field, where);
        acc = Formula::make_op(OpKind::sum, std::move(acc), std::move(rhs));
        where[acc.get()] = op_pos;
    }
    return acc;
}

void collect_alignment(const Formula& f, const PositionMap& where,
                       const std::map<const Formula*, GateId>& ids, Alignment& align) {
    if (f.left) collect_alignment(*f.left, where, ids, align);
    if (f.right) collect_alignment(*f.right, where, ids, align);
    align[where.at(&f)] = ids.at(&f);
}

}  // namespace

std::pair<Circuit, Alignment> parse(const TokenString& ts, bool lenient, FieldDesc field) {
    if (ts.tokens.empty()) throw SyntaxError(0, "empty input");
    Cursor cur{ts.tokens};
    PositionMap where;
    FormulaPtr tree;
    if (lenient) {
        tree = ts.style == Style::prefix ? parse_strict_prefix(cur, field, where)
                                         : parse_lenient_expr(cur, field, where);
    } else if (ts.style == Style::infix) {
        tree = parse_strict_infix(cur, field, where);
    } else {
        tree = parse_strict_prefix(cur, field, where);
    }
    if (!cur.done()) {
        if (cur.peek().kind == Token::Kind::rparen) throw UnbalancedParensError();
        throw SyntaxError(cur.pos, "trailing tokens");
    }

    std::map<const Formula*, GateId> ids;
    GateId next = 0;
    number_postorder(*tree, ids, next);
    Alignment align;
    collect_alignment(*tree, where, ids, align);
    return {formula_to_circuit(*tree, field), std::move(align)};
}

std::pair<Circuit, Alignment> parse_text(const std::string& text, Style style, bool lenient,
                                         FieldDesc field) {
    TokenString ts = lenient ? lex_lenient(text) : tokenize(text, style);
    return parse(ts, lenient, field);
}

AdjacencyMatrix adjacency(const Circuit& c, const Alignment& align) {
    Circuit tree = c.normalize_leaves();
    if (align.size() != tree.gates().size())
        throw AlignmentMismatchError("alignment covers " + std::to_string(align.size()) +
                                     " tokens for " + std::to_string(tree.gates().size()) +
                                     " gates");
    AdjacencyMatrix m;
    m.n = align.size();
    std::vector<bool> seen(tree.gates().size(), false);
    std::vector<std::size_t> index_of(tree.gates().size(), 0);
    for (const auto& [pos, gate] : align) {
        if (gate >= tree.gates().size() || seen[gate])
            throw AlignmentMismatchError("alignment is not a bijection onto gates");
        seen[gate] = true;
        index_of[gate] = m.positions.size();
        m.positions.push_back(pos);
        m.gates.push_back(gate);
    }
    m.bits.assign(m.n * m.n, 0);
    for (const auto& [child, parent] : tree.edges())
        m.bits[index_of[child] * m.n + index_of[parent]] = 1;
    return m;
}

}  // namespace circuitforge
