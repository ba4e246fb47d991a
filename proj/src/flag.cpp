#include "qramverify/flag.hpp"

#include "qramverify/errors.hpp"

namespace qramverify {

FlagSpec FlagSpec::whp(const Rational& a) {
  if (a <= 0 || a > 1) throw FlagError("whp threshold " + to_string(a) + " outside (0, 1]");
  return {Kind::Whp, a};
}

Rational FlagSpec::bound() const {
  switch (kind) {
    case Kind::Rand: return 0;
    case Kind::Cert: return 1;
    case Kind::Whp: return threshold;
  }
  return 0;
}

std::string to_string(const FlagSpec& flag) {
  switch (flag.kind) {
    case FlagSpec::Kind::Rand: return "rand";
    case FlagSpec::Kind::Cert: return "cert";
    case FlagSpec::Kind::Whp: {
      // Exact decimal form so the text reparses to the same threshold.
      Rational scaled = flag.threshold;
      std::size_t places = 0;
      while (!is_integer(scaled) && places < 40) {
        scaled *= 10;
        ++places;
      }
      if (!is_integer(scaled)) return "whp(" + std::to_string(to_double(flag.threshold)) + ")";
      std::string n = to_string(scaled);
      if (places == 0) return "whp(" + n + ")";
      if (n.size() <= places) n.insert(0, places + 1 - n.size(), '0');
      n.insert(n.size() - places, ".");
      return "whp(" + n + ")";
    }
  }
  return "rand";
}

bool admissible(const FlagSpec& flag, double probability, double slack) {
  switch (flag.kind) {
    case FlagSpec::Kind::Rand: return probability > slack;
    case FlagSpec::Kind::Cert: return probability >= 1.0 - slack;
    case FlagSpec::Kind::Whp: return probability >= to_double(flag.threshold) - slack;
  }
  return false;
}

}  // namespace qramverify
