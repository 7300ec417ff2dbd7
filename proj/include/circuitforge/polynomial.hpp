#pragma once

#include <map>
#include <string>

#include "circuitforge/field.hpp"

namespace circuitforge {

// Canonical variable order: shorter names first, then lexicographic. This
// keeps x2 < x10 and gives one global order for any identifier set.
struct ShortLex {
    bool operator()(const std::string& a, const std::string& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

// Product of variables with positive exponents; the empty map is the unit.
class Monomial {
public:
    using Exponents = std::map<std::string, unsigned, ShortLex>;

    Monomial() = default;
    explicit Monomial(Exponents exps);
    static Monomial variable(const std::string& name) { return Monomial({{name, 1}}); }

    const Exponents& exponents() const { return exps_; }
    unsigned total_degree() const;
    bool is_unit() const { return exps_.empty(); }

    Monomial operator*(const Monomial& other) const;
    bool operator==(const Monomial& other) const { return exps_ == other.exps_; }

    std::string to_string() const;  // repeated variables joined by "*"

private:
    Exponents exps_;
};

// Graded-lex order, descending: higher total degree first, ties broken by
// the exponent on the earliest variable. Serialization iterates this order.
struct GradedLexDescending {
    bool operator()(const Monomial& a, const Monomial& b) const;
};

using Assignment = std::map<std::string, FieldElement, ShortLex>;

// Canonical sparse multivariate polynomial over one exact field. Two
// polynomials are mathematically equal iff their term maps are identical;
// zero coefficients are never stored.
class Polynomial {
public:
    using Terms = std::map<Monomial, FieldElement, GradedLexDescending>;

    explicit Polynomial(FieldDesc field = FieldDesc::rational()) : field_(field) {}

    static Polynomial zero(FieldDesc field) { return Polynomial(field); }
    static Polynomial constant(const FieldElement& c);
    static Polynomial variable(const std::string& name, FieldDesc field);

    const FieldDesc& field() const { return field_; }
    const Terms& terms() const { return terms_; }
    std::size_t term_count() const { return terms_.size(); }
    bool is_zero() const { return terms_.empty(); }

    // Maximum total degree over stored monomials; 0 for the zero polynomial
    // (pair with is_zero() where the distinction matters).
    unsigned degree() const;

    Polynomial operator+(const Polynomial& other) const;
    Polynomial operator*(const Polynomial& other) const;
    bool operator==(const Polynomial& other) const {
        return field_ == other.field_ && terms_ == other.terms_;
    }

    FieldElement eval(const Assignment& assignment) const;

    std::string to_string() const;

private:
    void add_term(const Monomial& m, const FieldElement& c);

    FieldDesc field_;
    Terms terms_;
};

Polynomial poly_combine(const Polynomial& p, const Polynomial& q, OpKind kind);

inline FieldElement poly_eval(const Polynomial& p, const Assignment& assignment) {
    return p.eval(assignment);
}

inline bool poly_equal(const Polynomial& p, const Polynomial& q) {
    if (p.field() != q.field()) throw MixedFieldError();
    return p == q;
}

}  // namespace circuitforge
