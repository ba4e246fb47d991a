#pragma once

#include <string>

#include "qramverify/rational.hpp"

namespace qramverify {

/// Measurement policy applied to every measurement of the verified function.
struct FlagSpec {
  enum class Kind { Rand, Cert, Whp };

  Kind kind = Kind::Rand;
  /// Only meaningful for Whp; lies in (0, 1].
  Rational threshold = 0;

  static FlagSpec rand() { return {Kind::Rand, 0}; }
  static FlagSpec cert() { return {Kind::Cert, 1}; }
  /// Throws FlagError unless 0 < a <= 1.
  static FlagSpec whp(const Rational& a);

  /// Lower bound on an admissible outcome probability; rand is strict (> 0).
  bool strict() const { return kind == Kind::Rand; }
  Rational bound() const;

  friend bool operator==(const FlagSpec&, const FlagSpec&) = default;
};

/// "rand", "cert" or "whp(0.5)".
std::string to_string(const FlagSpec& flag);

/// Numeric admissibility test used by the simulator: p > 0, p >= 1 - slack,
/// or p >= a - slack.
bool admissible(const FlagSpec& flag, double probability, double slack);

}  // namespace qramverify
