#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace gp2 {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

inline BigInt big_abs(const BigInt& v) { return v < 0 ? BigInt(-v) : v; }

// Floor division (rounds toward negative infinity).
inline BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline BigInt ceil_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) == (b < 0))) ++q;
    return q;
}

// Least non-negative residue of a modulo d (d > 0).
inline BigInt mod_floor(const BigInt& a, const BigInt& d) {
    BigInt r = a % d;
    if (r < 0) r += d;
    return r;
}

inline BigInt big_gcd(const BigInt& a, const BigInt& b) {
    return boost::multiprecision::gcd(big_abs(a), big_abs(b));
}

inline std::string to_string(const BigInt& v) { return v.str(); }

inline BigInt parse_bigint(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("empty integer literal");
    std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
    if (i == s.size()) throw std::invalid_argument("malformed integer literal: " + s);
    for (std::size_t k = i; k < s.size(); ++k)
        if (s[k] < '0' || s[k] > '9') throw std::invalid_argument("malformed integer literal: " + s);
    return BigInt(s);
}

// Number of bits needed to represent |v|; 0 for v == 0.
inline std::size_t bit_length(const BigInt& v) {
    if (v == 0) return 0;
    return boost::multiprecision::msb(big_abs(v)) + 1;
}

inline bool fits_int64(const BigInt& v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

}  // namespace gp2
