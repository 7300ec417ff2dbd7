#include <doctest.h>

#include "circuitforge/polynomial.hpp"
#include "circuitforge/rng.hpp"
#include "oracle.hpp"

using namespace circuitforge;

namespace {

FieldElement q(long n, unsigned long d = 1) { return FieldElement::rational(n, d); }

Polynomial var(const std::string& name) {
    return Polynomial::variable(name, FieldDesc::rational());
}

Polynomial constant(long n) { return Polynomial::constant(q(n)); }

// x^2 - 1 via (x + 1) * (x + (-1)), the brute-force oracle route:
// the oracle expansion yields {x^2: 1, (): -1}.
Polynomial x_squared_minus_one() {
    Polynomial p = poly_combine(var("x") + constant(1), var("x") + constant(-1),
                                OpKind::product);
    return p;
}

Polynomial random_poly(Rng& rng, unsigned max_terms = 6, unsigned max_vars = 3) {
    static const std::string names[] = {"x1", "x2", "x3"};
    Polynomial p(FieldDesc::rational());
    unsigned terms = 1 + static_cast<unsigned>(rng.below(max_terms));
    for (unsigned t = 0; t < terms; ++t) {
        Polynomial term = Polynomial::constant(q(rng.int_in(-5, 5)));
        unsigned deg = static_cast<unsigned>(rng.below(3));
        for (unsigned k = 0; k < deg; ++k) {
            const std::string& v = names[rng.below(max_vars)];
            term = poly_combine(term, var(v), OpKind::product);
        }
        p = poly_combine(p, term, OpKind::sum);
    }
    return p;
}

oracle::Poly to_oracle(const Polynomial& p) {
    oracle::Poly out;
    for (const auto& [m, c] : p.terms()) {
        oracle::Mono om;
        for (const auto& [v, e] : m.exponents()) om[v] = static_cast<int>(e);
        const mpq_class& r = c.as_rational();
        out[om] = oracle::frac(r.get_num().get_si(), r.get_den().get_si());
    }
    return out;
}

}  // namespace

TEST_CASE("field_op on rationals and prime fields") {
    CHECK(field_op(q(2, 3), q(1, 3), OpKind::sum) == q(1));
    CHECK(field_op(FieldElement::prime(5, 7), FieldElement::prime(4, 7), OpKind::sum) ==
          FieldElement::prime(2, 7));  // 9 mod 7
    CHECK(field_op(q(1, 2), q(2, 1), OpKind::product) == q(1));
    CHECK_THROWS_AS(field_op(q(1), FieldElement::prime(1, 7), OpKind::sum), MixedFieldError);
    CHECK_THROWS_AS(
        field_op(FieldElement::prime(1, 7), FieldElement::prime(1, 11), OpKind::sum),
        MixedFieldError);
}

TEST_CASE("canonical form is preserved by arithmetic") {
    Rng rng(7);
    for (int i = 0; i < 1000; ++i) {
        FieldElement a = q(rng.int_in(-40, 40), 1 + rng.below(12));
        FieldElement b = q(rng.int_in(-40, 40), 1 + rng.below(12));
        for (FieldElement r : {a + b, a * b}) {
            const mpq_class& v = r.as_rational();
            CHECK(v.get_den() > 0);
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), v.get_num().get_mpz_t(), v.get_den().get_mpz_t());
            CHECK(g == 1);
        }
        std::uint64_t pa = rng.below(101), pb = rng.below(101);
        FieldElement fa = FieldElement::prime(pa, 101), fb = FieldElement::prime(pb, 101);
        CHECK((fa + fb).as_prime().value < 101);
        CHECK((fa * fb).as_prime().value < 101);
    }
}

TEST_CASE("field element text form") {
    CHECK(q(-1).to_string() == "-1");
    CHECK(q(3, 6).to_string() == "1/2");
    CHECK(q(0).to_string() == "0");
    CHECK(FieldElement::prime(9, 7).to_string() == "2");
    CHECK(FieldElement::parse("-4/6", FieldDesc::rational()).to_string() == "-2/3");
    CHECK(FieldElement::parse("-1", FieldDesc::prime(7)).to_string() == "6");
}

TEST_CASE("poly_combine collects like terms") {
    Polynomial p = poly_combine(var("x1") + var("x2"), var("x1"), OpKind::sum);
    CHECK(p.term_count() == 2);
    CHECK(p.to_string() == "2*x1 + x2");
}

TEST_CASE("poly_combine product matches the expansion oracle") {
    // oracle: (x + 1) * (x - 1)
    oracle::Poly ox = oracle::p_mul(oracle::p_add(oracle::p_var("x"), oracle::p_const(oracle::frac(1))),
                                    oracle::p_add(oracle::p_var("x"), oracle::p_const(oracle::frac(-1))));
    Polynomial p = x_squared_minus_one();
    CHECK(oracle::p_eq(to_oracle(p), ox));
    CHECK(p.term_count() == 2);
    CHECK(p.degree() == 2);
    CHECK(p.to_string() == "x*x + -1");
}

TEST_CASE("zero polynomial is absorbing under product") {
    Polynomial z = Polynomial::zero(FieldDesc::rational());
    Rng rng(3);
    Polynomial p = random_poly(rng);
    Polynomial prod = poly_combine(p, z, OpKind::product);
    CHECK(prod.is_zero());
    CHECK(prod.degree() == 0);
}

TEST_CASE("poly_eval") {
    Assignment at{{"x", q(3)}};
    CHECK(poly_eval(x_squared_minus_one(), at) == q(8));
    CHECK(poly_eval(constant(7), {}) == q(7));
    Polynomial two_x1_plus_x2 = poly_combine(constant(2), var("x1"), OpKind::product) + var("x2");
    CHECK(poly_eval(two_x1_plus_x2, {{"x1", q(1)}, {"x2", q(0)}}) == q(2));

    CHECK_THROWS_WITH_AS(poly_eval(two_x1_plus_x2, {{"x1", q(1)}}),
                         "assignment does not cover variable 'x2'", MissingVariableError);
    CHECK_THROWS_AS(poly_eval(var("x"), {{"x", FieldElement::prime(1, 7)}}), MixedFieldError);
}

TEST_CASE("poly_degree and the zero flag") {
    CHECK(x_squared_minus_one().degree() == 2);
    CHECK(constant(5).degree() == 0);
    CHECK_FALSE(constant(5).is_zero());
    Polynomial deg1 =
        poly_combine(constant(2), var("x1"), OpKind::product) + var("x2") + constant(7);
    CHECK(deg1.degree() == 1);
    Polynomial z = Polynomial::zero(FieldDesc::rational());
    CHECK(z.degree() == 0);
    CHECK(z.is_zero());
}

TEST_CASE("poly_equal is canonical equality") {
    Polynomial expanded = var("x") * var("x") + constant(-1);
    CHECK(poly_equal(x_squared_minus_one(), expanded));
    CHECK_FALSE(poly_equal(var("x") + constant(1), var("x") + constant(2)));
    Polynomial empty_sum = Polynomial::zero(FieldDesc::rational());
    CHECK(poly_equal(empty_sum, constant(1) + constant(-1)));
    CHECK_THROWS_AS(poly_equal(constant(1), Polynomial::constant(FieldElement::prime(1, 7))),
                    MixedFieldError);
}

TEST_CASE("ring laws hold on random polynomials") {
    Rng rng(42);
    for (int i = 0; i < 1000; ++i) {
        Polynomial a = random_poly(rng), b = random_poly(rng), c = random_poly(rng);
        CHECK(a + b == b + a);
        CHECK(a * b == b * a);
        CHECK((a + b) + c == a + (b + c));
        CHECK((a * b) * c == a * (b * c));
        CHECK(a * (b + c) == a * b + a * c);
    }
}

TEST_CASE("degree law for products in an integral domain") {
    Rng rng(43);
    int checked = 0;
    while (checked < 300) {
        Polynomial a = random_poly(rng), b = random_poly(rng);
        if (a.is_zero() || b.is_zero()) continue;
        CHECK((a * b).degree() == a.degree() + b.degree());
        ++checked;
    }
}

TEST_CASE("evaluation is a homomorphism") {
    Rng rng(44);
    for (int i = 0; i < 300; ++i) {
        Polynomial a = random_poly(rng), b = random_poly(rng);
        Assignment at;
        for (const std::string v : {"x1", "x2", "x3"})
            at.emplace(v, q(rng.int_in(-9, 9), 1 + rng.below(9)));
        OpKind k = rng.below(2) == 0 ? OpKind::sum : OpKind::product;
        CHECK(poly_eval(poly_combine(a, b, k), at) ==
              field_op(poly_eval(a, at), poly_eval(b, at), k));
    }
}

TEST_CASE("canonical graded-lex term order") {
    Polynomial p = poly_combine(constant(2), var("x1"), OpKind::product) + var("x2") + constant(7);
    CHECK(p.to_string() == "2*x1 + x2 + 7");
    Polynomial p2 = var("x10") + var("x2");  // shortlex keeps x2 before x10
    CHECK(p2.to_string() == "x2 + x10");
}
