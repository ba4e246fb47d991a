#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/multiprecision/cpp_int.hpp>

namespace qramverify {

using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>, boost::multiprecision::et_off>;
using Rational =
    boost::multiprecision::number<boost::multiprecision::cpp_rational_backend, boost::multiprecision::et_off>;

/// Exact value of a decimal literal such as "0.5" or "3" (no exponent form).
Rational parse_decimal(std::string_view text);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

bool is_integer(const Rational& q);

/// Requires is_integer(q) and a value that fits in 64 bits.
std::int64_t to_int64(const Rational& q);

inline Rational pow2(unsigned k) { return Rational(BigInt(1) << k); }

}  // namespace qramverify
