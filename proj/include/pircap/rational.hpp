#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <string>

#include "pircap/errors.hpp"

namespace pircap {

// Exact arbitrary-precision fractions. GMP keeps them in lowest terms with a
// positive denominator, which is exactly the canonical form reports use.
using Rational = boost::multiprecision::mpq_rational;
using BigInt = boost::multiprecision::mpz_int;

// Canonical text form: "p/q" in lowest terms, plain "p" when q == 1.
inline std::string rational_to_string(const Rational& r) { return r.str(); }

// Accepts "p", "p/q", and negative values. The mpq string constructor does
// not canonicalize, so parse the parts and rebuild through the canonicalizing
// two-integer constructor.
inline Rational parse_rational(const std::string& s) {
    try {
        const auto slash = s.find('/');
        if (slash == std::string::npos) return Rational(BigInt(s));
        BigInt num(s.substr(0, slash));
        BigInt den(s.substr(slash + 1));
        if (den == 0) throw ParseError("rational with zero denominator: " + s);
        return Rational(num, den);
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        throw ParseError("invalid rational: " + s);
    }
}

inline Rational rational_pow(const Rational& base, long exp) {
    if (exp < 0) {
        if (base == 0) throw BadParams("0 cannot be raised to a negative power");
        return rational_pow(Rational(1) / base, -exp);
    }
    Rational acc(1), b = base;
    while (exp > 0) {
        if (exp & 1) acc *= b;
        b *= b;
        exp >>= 1;
    }
    return acc;
}

inline BigInt integer_pow(BigInt base, long exp) {
    if (exp < 0) throw BadParams("negative integer exponent");
    BigInt acc(1);
    while (exp > 0) {
        if (exp & 1) acc *= base;
        base *= base;
        exp >>= 1;
    }
    return acc;
}

}  // namespace pircap
