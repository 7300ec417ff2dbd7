#include "circuitforge/field.hpp"

#include <cctype>

namespace circuitforge {

std::string FieldDesc::to_string() const {
    return kind == Kind::rational ? "rational" : "prime(" + std::to_string(p) + ")";
}

FieldElement FieldElement::rational(long num, unsigned long den) {
    mpq_class q(num, den);
    q.canonicalize();
    return FieldElement(std::move(q));
}

FieldElement FieldElement::rational(const mpq_class& q) {
    mpq_class c = q;
    c.canonicalize();
    return FieldElement(std::move(c));
}

FieldElement FieldElement::prime(std::uint64_t value, std::uint64_t p) {
    return FieldElement(PrimeValue{value % p, p});
}

FieldElement FieldElement::parse(const std::string& text, const FieldDesc& field) {
    if (text.empty()) throw DataError("empty constant literal");
    std::size_t i = text[0] == '-' ? 1 : 0;
    if (i == text.size()) throw DataError("bad constant literal '" + text + "'");
    bool seen_slash = false;
    for (std::size_t j = i; j < text.size(); ++j) {
        if (text[j] == '/' && !seen_slash && j + 1 < text.size() && j > i) {
            seen_slash = true;
            continue;
        }
        if (!std::isdigit(static_cast<unsigned char>(text[j])))
            throw DataError("bad constant literal '" + text + "'");
    }
    mpq_class q(text, 10);
    q.canonicalize();
    if (field.kind == FieldDesc::Kind::rational) return FieldElement(std::move(q));
    auto v = embed_mod(q, field.p);
    if (!v) throw NonEmbeddableConstantError();
    return FieldElement(PrimeValue{*v, field.p});
}

const FieldDesc FieldElement::field() const {
    if (is_rational()) return FieldDesc::rational();
    return FieldDesc::prime(std::get<PrimeValue>(rep_).p);
}

const mpq_class& FieldElement::as_rational() const {
    if (!is_rational()) throw MixedFieldError("prime-field value used as rational");
    return std::get<mpq_class>(rep_);
}

const PrimeValue& FieldElement::as_prime() const {
    if (is_rational()) throw MixedFieldError("rational value used as prime-field element");
    return std::get<PrimeValue>(rep_);
}

bool FieldElement::is_zero() const {
    if (is_rational()) return std::get<mpq_class>(rep_) == 0;
    return std::get<PrimeValue>(rep_).value == 0;
}

bool FieldElement::is_one() const {
    if (is_rational()) return std::get<mpq_class>(rep_) == 1;
    const auto& pv = std::get<PrimeValue>(rep_);
    return pv.value == 1 % pv.p;
}

void FieldElement::check_same_field(const FieldElement& other) const {
    if (field() != other.field()) throw MixedFieldError();
}

FieldElement FieldElement::operator+(const FieldElement& other) const {
    check_same_field(other);
    if (is_rational()) {
        mpq_class r = std::get<mpq_class>(rep_) + std::get<mpq_class>(other.rep_);
        return FieldElement(std::move(r));
    }
    const auto& a = std::get<PrimeValue>(rep_);
    const auto& b = std::get<PrimeValue>(other.rep_);
    return FieldElement(PrimeValue{add_mod(a.value, b.value, a.p), a.p});
}

FieldElement FieldElement::operator*(const FieldElement& other) const {
    check_same_field(other);
    if (is_rational()) {
        mpq_class r = std::get<mpq_class>(rep_) * std::get<mpq_class>(other.rep_);
        return FieldElement(std::move(r));
    }
    const auto& a = std::get<PrimeValue>(rep_);
    const auto& b = std::get<PrimeValue>(other.rep_);
    return FieldElement(PrimeValue{mul_mod(a.value, b.value, a.p), a.p});
}

FieldElement FieldElement::negated() const {
    if (is_rational()) {
        mpq_class r = -std::get<mpq_class>(rep_);
        return FieldElement(std::move(r));
    }
    const auto& a = std::get<PrimeValue>(rep_);
    return FieldElement(PrimeValue{a.value == 0 ? 0 : a.p - a.value, a.p});
}

std::string FieldElement::to_string() const {
    if (is_rational()) {
        const auto& q = std::get<mpq_class>(rep_);
        if (q.get_den() == 1) return q.get_num().get_str();
        return q.get_str();
    }
    return std::to_string(std::get<PrimeValue>(rep_).value);
}

FieldElement field_op(const FieldElement& a, const FieldElement& b, OpKind kind) {
    return kind == OpKind::sum ? a + b : a * b;
}

std::uint64_t mul_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(a) * b) % p);
}

std::uint64_t add_mod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    std::uint64_t s = a + b;  // p < 2^63 throughout, no overflow
    return s >= p ? s - p : s;
}

std::uint64_t pow_mod(std::uint64_t base, std::uint64_t exp, std::uint64_t p) {
    std::uint64_t acc = 1 % p;
    base %= p;
    while (exp > 0) {
        if (exp & 1) acc = mul_mod(acc, base, p);
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    return acc;
}

std::uint64_t inv_mod(std::uint64_t a, std::uint64_t p) {
    // p prime, a not divisible by p
    return pow_mod(a, p - 2, p);
}

std::optional<std::uint64_t> embed_mod(const mpq_class& q, std::uint64_t p) {
    mpz_class pz;
    mpz_set_ui(pz.get_mpz_t(), static_cast<unsigned long>(p));
    mpz_class num_m = q.get_num() % pz;
    if (num_m < 0) num_m += pz;
    mpz_class den_m = q.get_den() % pz;
    if (den_m == 0) return std::nullopt;
    std::uint64_t n = mpz_get_ui(num_m.get_mpz_t());
    std::uint64_t d = mpz_get_ui(den_m.get_mpz_t());
    return mul_mod(n, inv_mod(d, p), p);
}

}  // namespace circuitforge
