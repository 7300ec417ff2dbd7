#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include <gmpxx.h>

#include "circuitforge/errors.hpp"

namespace circuitforge {

// Which field a circuit, polynomial or value lives in. Rationals are the
// default; prime fields back the randomized identity test.
struct FieldDesc {
    enum class Kind { rational, prime };
    Kind kind = Kind::rational;
    std::uint64_t p = 0;  // modulus, prime kind only

    static FieldDesc rational() { return {Kind::rational, 0}; }
    static FieldDesc prime(std::uint64_t p) { return {Kind::prime, p}; }

    bool operator==(const FieldDesc&) const = default;
    std::string to_string() const;
};

// A value in Z/pZ, fully reduced.
struct PrimeValue {
    std::uint64_t value = 0;
    std::uint64_t p = 0;
    bool operator==(const PrimeValue&) const = default;
};

// Exact field element: an arbitrary-precision rational in lowest terms with
// positive denominator, or a reduced prime-field value. Arithmetic never
// mixes the two variants (or two different moduli).
class FieldElement {
public:
    FieldElement() : rep_(mpq_class(0)) {}

    static FieldElement rational(long num, unsigned long den = 1);
    static FieldElement rational(const mpq_class& q);
    static FieldElement prime(std::uint64_t value, std::uint64_t p);

    // Parses canonical text: signed decimal, optional "/den". Prime-field
    // literals reduce modulo p ("-1" maps to p-1).
    static FieldElement parse(const std::string& text, const FieldDesc& field);

    const FieldDesc field() const;
    bool is_rational() const { return std::holds_alternative<mpq_class>(rep_); }
    const mpq_class& as_rational() const;
    const PrimeValue& as_prime() const;

    bool is_zero() const;
    bool is_one() const;

    FieldElement operator+(const FieldElement& other) const;
    FieldElement operator*(const FieldElement& other) const;
    FieldElement negated() const;

    bool operator==(const FieldElement& other) const { return rep_ == other.rep_; }

    // Canonical text: "a/b" with the denominator omitted when 1.
    std::string to_string() const;

private:
    explicit FieldElement(mpq_class q) : rep_(std::move(q)) {}
    explicit FieldElement(PrimeValue v) : rep_(v) {}
    void check_same_field(const FieldElement& other) const;

    std::variant<mpq_class, PrimeValue> rep_;
};

enum class OpKind { sum, product };

inline char op_symbol(OpKind k) { return k == OpKind::sum ? '+' : '*'; }

// The two gate operations of the circuit grammar.
FieldElement field_op(const FieldElement& a, const FieldElement& b, OpKind kind);

// Modular arithmetic helpers shared with the randomized identity test.
std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p);
std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p);
std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p);

// Embeds a rational into Z/pZ via the modular inverse of its denominator.
// Returns nullopt when p divides the denominator.
std::optional<std::uint64_t> embed_mod(const mpq_class& q, std::uint64_t p);

}  // namespace circuitforge
