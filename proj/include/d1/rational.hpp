#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace d1 {

// Arbitrary-precision naturals/integers for positions and block indices
// (5^l and 2^i overflow 64 bits quickly), exact rationals for densities.
using Nat = boost::multiprecision::cpp_int;
using Rat = boost::multiprecision::cpp_rational;

struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Nat pow2(std::size_t e) {
    Nat n = 1;
    return n << e;
}

inline Nat pow5(std::size_t e) {
    Nat n = 1;
    for (std::size_t i = 0; i < e; ++i) n *= 5;
    return n;
}

// floor(log2(n)) for n >= 1, i.e. the i with 2^i <= n < 2^{i+1}.
inline std::size_t log2_floor(const Nat& n) {
    if (n <= 0) throw domain_error("log2_floor: argument must be positive");
    return boost::multiprecision::msb(n);
}

// Largest e with 2^e | n, for n >= 1.
inline std::size_t pow2_valuation(const Nat& n) {
    if (n <= 0) throw domain_error("pow2_valuation: argument must be positive");
    return boost::multiprecision::lsb(n);
}

inline bool is_power_of_2(const Nat& n) {
    return n > 0 && boost::multiprecision::lsb(n) == boost::multiprecision::msb(n);
}

// 1 - 2^{-m}
inline Rat one_minus_pow2_inv(std::size_t m) {
    return Rat(pow2(m) - 1, pow2(m));
}

inline std::string to_string(const Nat& n) { return n.str(); }

} // namespace d1
