#include "circuitforge/polynomial.hpp"

#include <sstream>

namespace circuitforge {

Monomial::Monomial(Exponents exps) : exps_(std::move(exps)) {
    for (auto it = exps_.begin(); it != exps_.end();) {
        it = it->second == 0 ? exps_.erase(it) : std::next(it);
    }
}

unsigned Monomial::total_degree() const {
    unsigned d = 0;
    for (const auto& [_, e] : exps_) d += e;
    return d;
}

Monomial Monomial::operator*(const Monomial& other) const {
    Exponents out = exps_;
    for (const auto& [v, e] : other.exps_) out[v] += e;
    return Monomial(std::move(out));
}

std::string Monomial::to_string() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, e] : exps_) {
        for (unsigned i = 0; i < e; ++i) {
            if (!first) os << "*";
            os << v;
            first = false;
        }
    }
    return os.str();
}

bool GradedLexDescending::operator()(const Monomial& a, const Monomial& b) const {
    unsigned da = a.total_degree(), db = b.total_degree();
    if (da != db) return da > db;
    // Walk variables in shortlex order; the monomial with the higher exponent
    // on the earliest differing variable comes first.
    auto ia = a.exponents().begin(), ea = a.exponents().end();
    auto ib = b.exponents().begin(), eb = b.exponents().end();
    ShortLex less;
    while (ia != ea && ib != eb) {
        if (less(ia->first, ib->first)) return true;   // a has the earlier variable
        if (less(ib->first, ia->first)) return false;
        if (ia->second != ib->second) return ia->second > ib->second;
        ++ia;
        ++ib;
    }
    return ia != ea;
}

Polynomial Polynomial::constant(const FieldElement& c) {
    Polynomial p(c.field());
    if (!c.is_zero()) p.terms_.emplace(Monomial(), c);
    return p;
}

Polynomial Polynomial::variable(const std::string& name, FieldDesc field) {
    Polynomial p(field);
    FieldElement one = field.kind == FieldDesc::Kind::rational
                           ? FieldElement::rational(1)
                           : FieldElement::prime(1, field.p);
    p.terms_.emplace(Monomial::variable(name), one);
    return p;
}

unsigned Polynomial::degree() const {
    // Terms are kept in graded-lex descending order, so the first entry has
    // the maximum total degree.
    return terms_.empty() ? 0 : terms_.begin()->first.total_degree();
}

void Polynomial::add_term(const Monomial& m, const FieldElement& c) {
    auto it = terms_.find(m);
    if (it == terms_.end()) {
        if (!c.is_zero()) terms_.emplace(m, c);
        return;
    }
    FieldElement s = it->second + c;
    if (s.is_zero())
        terms_.erase(it);
    else
        it->second = s;
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
    if (field_ != other.field_) throw MixedFieldError();
    Polynomial out = *this;
    for (const auto& [m, c] : other.terms_) out.add_term(m, c);
    return out;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
    if (field_ != other.field_) throw MixedFieldError();
    Polynomial out(field_);
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : other.terms_) out.add_term(ma * mb, ca * cb);
    return out;
}

FieldElement Polynomial::eval(const Assignment& assignment) const {
    FieldElement acc = field_.kind == FieldDesc::Kind::rational
                           ? FieldElement::rational(0)
                           : FieldElement::prime(0, field_.p);
    for (const auto& [m, c] : terms_) {
        FieldElement term = c;
        for (const auto& [v, e] : m.exponents()) {
            auto it = assignment.find(v);
            if (it == assignment.end()) throw MissingVariableError(v);
            if (it->second.field() != field_) throw MixedFieldError();
            for (unsigned i = 0; i < e; ++i) term = term * it->second;
        }
        acc = acc + term;
    }
    return acc;
}

std::string Polynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        if (m.is_unit())
            os << c.to_string();
        else if (c.is_one())
            os << m.to_string();
        else
            os << c.to_string() << "*" << m.to_string();
    }
    return os.str();
}

Polynomial poly_combine(const Polynomial& p, const Polynomial& q, OpKind kind) {
    return kind == OpKind::sum ? p + q : p * q;
}

}  // namespace circuitforge
