#include "qramverify/rational.hpp"

#include <cctype>

#include "qramverify/errors.hpp"

namespace qramverify {

Rational parse_decimal(std::string_view text) {
  if (text.empty()) throw Error("empty numeric literal");
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-') {
    negative = true;
    pos = 1;
  }
  BigInt digits = 0;
  BigInt scale = 1;
  bool seen_point = false;
  bool seen_digit = false;
  for (; pos < text.size(); ++pos) {
    const char c = text[pos];
    if (c == '.') {
      if (seen_point) throw Error("malformed numeric literal '" + std::string(text) + "'");
      seen_point = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw Error("malformed numeric literal '" + std::string(text) + "'");
    seen_digit = true;
    digits = digits * 10 + (c - '0');
    if (seen_point) scale *= 10;
  }
  if (!seen_digit) throw Error("malformed numeric literal '" + std::string(text) + "'");
  Rational value(digits, scale);
  return negative ? Rational(-value) : value;
}

std::string to_string(const Rational& q) {
  if (boost::multiprecision::denominator(q) == 1) return boost::multiprecision::numerator(q).str();
  return boost::multiprecision::numerator(q).str() + "/" + boost::multiprecision::denominator(q).str();
}

double to_double(const Rational& q) { return q.convert_to<double>(); }

bool is_integer(const Rational& q) { return boost::multiprecision::denominator(q) == 1; }

std::int64_t to_int64(const Rational& q) {
  if (!is_integer(q)) throw Error("expected an integer, got " + to_string(q));
  return boost::multiprecision::numerator(q).convert_to<std::int64_t>();
}

}  // namespace qramverify
