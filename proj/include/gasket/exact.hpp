// Exact arithmetic aliases and formatting helpers (GMP-backed).
#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>

namespace gasket {

using BigInt = mpz_class;
using Rational = mpq_class;

// "p" or "p/q" string, canonical form (q > 0, gcd(p,q) = 1).
inline std::string to_string(const Rational& r) {
    if (r.get_den() == 1) return r.get_num().get_str();
    return r.get_num().get_str() + "/" + r.get_den().get_str();
}

inline std::string to_string(const BigInt& z) { return z.get_str(); }

// Doubles are dyadic rationals; the conversion is exact.
inline Rational rational_from_double(double x) {
    Rational r;
    mpq_set_d(r.get_mpq_t(), x);
    return r;
}

// mpq_class(num, den) does not reduce the fraction, and GMP arithmetic
// requires canonical operands; always build ratios through here.
inline Rational make_rational(const BigInt& num, const BigInt& den) {
    if (den == 0) throw std::invalid_argument("make_rational: zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

inline Rational make_rational(long num, long den) {
    return make_rational(BigInt(num), BigInt(den));
}

inline double to_double(const Rational& r) { return r.get_d(); }

// Exact integer quotient; throws if the division leaves a remainder.
inline BigInt exact_div(const BigInt& num, const BigInt& den) {
    if (!mpz_divisible_p(num.get_mpz_t(), den.get_mpz_t()))
        throw std::logic_error("exact_div: " + num.get_str() + " not divisible by " + den.get_str());
    return num / den;
}

inline BigInt pow_int(unsigned long base, unsigned long exp) {
    BigInt r;
    mpz_ui_pow_ui(r.get_mpz_t(), base, exp);
    return r;
}

}  // namespace gasket
