// Exact rational arithmetic used by every density comparison in the library.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace removal_lab {

using BigInt = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

inline Rat rat(long long num, long long den = 1) {
    if (den == 0) throw std::invalid_argument("rational with zero denominator");
    return Rat(BigInt(num), BigInt(den));
}

inline double rat_to_double(const Rat& r) { return r.convert_to<double>(); }

inline BigInt rat_num(const Rat& r) { return boost::multiprecision::numerator(r); }
inline BigInt rat_den(const Rat& r) { return boost::multiprecision::denominator(r); }

// ceil(r * n) for integer n >= 0.
inline long long ceil_mul(const Rat& r, long long n) {
    BigInt num = rat_num(r) * n;
    BigInt den = rat_den(r);
    BigInt q = num / den;
    if (q * den != num && num > 0) q += 1;
    return q.convert_to<long long>();
}

inline long long floor_mul(const Rat& r, long long n) {
    BigInt num = rat_num(r) * n;
    BigInt den = rat_den(r);
    BigInt q = num / den;
    if (q * den != num && num < 0) q -= 1;
    return q.convert_to<long long>();
}

// Exact power with small nonnegative integer exponent.
inline Rat rat_pow(const Rat& base, unsigned exp) {
    Rat out(1);
    Rat b = base;
    unsigned e = exp;
    while (e > 0) {
        if (e & 1u) out *= b;
        b *= b;
        e >>= 1u;
    }
    return out;
}

// Decimal integer from string; strips leading zeros that cpp_int would read
// as an octal prefix.
inline BigInt parse_bigint(std::string text) {
    bool neg = !text.empty() && text[0] == '-';
    if (neg || (!text.empty() && text[0] == '+')) text.erase(0, 1);
    while (text.size() > 1 && text[0] == '0') text.erase(0, 1);
    if (text.empty() || text.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("bad integer literal");
    BigInt v(text);
    return neg ? -v : v;
}

// "p/q", "p", or a plain decimal such as "0.05" (parsed exactly).
inline Rat parse_rat(const std::string& text) {
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        BigInt num = parse_bigint(text.substr(0, slash));
        BigInt den = parse_bigint(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("rational with zero denominator: " + text);
        return Rat(num, den);
    }
    auto dot = text.find('.');
    if (dot == std::string::npos) return Rat(parse_bigint(text));
    bool neg = text[0] == '-';
    std::string digits = text;
    digits.erase(dot, 1);
    if (neg) digits.erase(0, 1);
    if (digits.empty()) throw std::invalid_argument("bad rational literal: " + text);
    BigInt num = parse_bigint(digits);
    BigInt den = 1;
    size_t frac_digits = text.size() - dot - 1;
    for (size_t i = 0; i < frac_digits; ++i) den *= 10;
    if (neg) num = -num;
    return Rat(num, den);
}

inline std::string rat_string(const Rat& r) {
    return rat_num(r).str() + "/" + rat_den(r).str();
}

// Exact floor(log2(r)) for r > 0.
inline long long floor_log2(const Rat& r) {
    if (r <= 0) throw std::invalid_argument("floor_log2 of nonpositive value");
    BigInt num = rat_num(r);
    BigInt den = rat_den(r);
    long long f = static_cast<long long>(boost::multiprecision::msb(num)) -
                  static_cast<long long>(boost::multiprecision::msb(den));
    // Candidate f satisfies 2^{f-1} < r < 2^{f+1}; adjust by exact comparison.
    auto cmp_pow = [&](long long e) -> int {  // compare r with 2^e
        BigInt lhs = num, rhs = den;
        if (e >= 0)
            rhs <<= static_cast<unsigned>(e);
        else
            lhs <<= static_cast<unsigned>(-e);
        if (lhs < rhs) return -1;
        return lhs == rhs ? 0 : 1;
    };
    if (cmp_pow(f) < 0) --f;
    while (cmp_pow(f + 1) >= 0) ++f;
    return f;
}

}  // namespace removal_lab
