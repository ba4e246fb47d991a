#pragma once

#include <cstdint>
#include <string>

// Symbol-naming contract shared by obligation generation, spec encoding and
// counterexample decoding. docs/symbols.md describes the same scheme.
namespace qramverify::naming {

inline constexpr const char* kInvSqrt2 = "invsqrt2";

/// Components of one amplitude: the real and imaginary parts are each stored
/// as a pair (a, b) denoting a + b*sqrt(2).
enum class AmpPart { ReA, ReB, ImA, ImB };

inline std::string classical(const std::string& var, std::int64_t version) {
  return var + "_v" + std::to_string(version);
}

inline std::string amplitude(std::int64_t generation, std::uint64_t index, AmpPart part) {
  static constexpr const char* suffix[] = {"re_a", "re_b", "im_a", "im_b"};
  return "sv" + std::to_string(generation) + "_" + std::to_string(index) + "_" +
         suffix[static_cast<int>(part)];
}

inline std::string probability(const std::string& var, std::int64_t version, std::uint64_t outcome) {
  return "pr_" + var + "_v" + std::to_string(version) + "_" + std::to_string(outcome);
}

inline std::string sqrt_witness(const std::string& var, std::int64_t version, std::uint64_t outcome) {
  return "sqrtpr_" + var + "_v" + std::to_string(version) + "_" + std::to_string(outcome);
}

/// The k-th measurement of `var` (k counted from 0).
inline std::string measured(const std::string& var, std::size_t k = 0) {
  return "meas_" + var + (k == 0 ? std::string() : "_" + std::to_string(k + 1));
}

inline std::string oracle_entry(const std::string& oracle, std::uint64_t input) {
  return oracle + "_" + std::to_string(input);
}

inline std::string spec_var(const std::string& name) { return "speq_" + name; }

inline std::string divmod_quotient(std::size_t k) { return "dmq_" + std::to_string(k); }
inline std::string divmod_remainder(std::size_t k) { return "dmr_" + std::to_string(k); }

}  // namespace qramverify::naming
