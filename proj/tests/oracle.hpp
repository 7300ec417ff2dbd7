// Test-only brute-force oracle: naive fraction and polynomial arithmetic,
// kept independent of the library implementation it checks.
#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace oracle {

struct Frac {
    long long num = 0;
    long long den = 1;
};

inline Frac frac(long long n, long long d = 1) {
    if (d == 0) throw std::invalid_argument("zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    long long g = std::gcd(n < 0 ? -n : n, d);
    if (g == 0) g = 1;
    return {n / g, d / g};
}

inline Frac add(Frac a, Frac b) { return frac(a.num * b.den + b.num * a.den, a.den * b.den); }
inline Frac mul(Frac a, Frac b) { return frac(a.num * b.num, a.den * b.den); }
inline Frac neg(Frac a) { return {-a.num, a.den}; }
inline bool eq(Frac a, Frac b) { return a.num == b.num && a.den == b.den; }

using Mono = std::map<std::string, int>;
using Poly = std::map<Mono, Frac>;

inline Poly p_const(Frac c) {
    Poly p;
    if (c.num != 0) p[{}] = c;
    return p;
}

inline Poly p_var(const std::string& name) {
    Poly p;
    p[{{name, 1}}] = frac(1);
    return p;
}

inline Poly p_add(const Poly& a, const Poly& b) {
    Poly out = a;
    for (const auto& [m, c] : b) {
        auto it = out.find(m);
        if (it == out.end()) {
            out[m] = c;
        } else {
            Frac s = add(it->second, c);
            if (s.num == 0)
                out.erase(it);
            else
                it->second = s;
        }
    }
    return out;
}

inline Poly p_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a) {
        for (const auto& [mb, cb] : b) {
            Mono m = ma;
            for (const auto& [v, e] : mb) m[v] += e;
            Frac prod = mul(ca, cb);
            auto it = out.find(m);
            if (it == out.end()) {
                if (prod.num != 0) out[m] = prod;
            } else {
                Frac s = add(it->second, prod);
                if (s.num == 0)
                    out.erase(it);
                else
                    it->second = s;
            }
        }
    }
    return out;
}

inline Frac p_eval(const Poly& p, const std::map<std::string, Frac>& at) {
    Frac acc = frac(0);
    for (const auto& [m, c] : p) {
        Frac term = c;
        for (const auto& [v, e] : m)
            for (int i = 0; i < e; ++i) term = mul(term, at.at(v));
        acc = add(acc, term);
    }
    return acc;
}

inline bool p_eq(const Poly& a, const Poly& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [m, c] : a) {
        auto it = b.find(m);
        if (it == b.end() || !eq(c, it->second)) return false;
    }
    return true;
}

inline int p_degree(const Poly& p) {
    int d = 0;
    for (const auto& [m, _] : p) {
        int t = 0;
        for (const auto& [v, e] : m) t += e;
        d = std::max(d, t);
    }
    return d;
}

}  // namespace oracle
