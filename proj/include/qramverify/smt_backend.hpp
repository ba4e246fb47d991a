#pragma once

#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qramverify/obligation.hpp"

namespace qramverify {

struct SolverConfig {
  std::string executable = "z3";
  /// Wall-clock limit per query, seconds.
  double timeout_seconds = 60;
  std::vector<std::string> extra_args;
  bool produce_models = true;
  /// Argument of set-logic.
  std::string logic = "ALL";
};

struct EmitOptions {
  bool negate_post = true;
  bool get_model = false;
  std::string logic = "ALL";
};

/// Deterministic SMT-LIB2 script for prog ∧ pre ∧ ¬post (or prog ∧ pre when
/// negate_post is false). Integer div/mod by positive constants are replaced
/// by quotient/remainder witnesses.
std::string emit_smt(const ObligationSet& prog, const ObligationSet& pre, const ObligationSet& post,
                     const SymbolTable& st, const EmitOptions& options = {});

enum class SatResult { Sat, Unsat, Unknown, Timeout };

struct SolverRun {
  SatResult result = SatResult::Unknown;
  std::string output;
  std::chrono::duration<double> elapsed{0};
};

/// Runs `<executable> <extra_args> <script-file>` and classifies its first
/// output line. Throws SolverSpawnError when the executable cannot be run.
SolverRun run_solver(const std::string& script, const SolverConfig& cfg);

/// Model value: exact when the solver printed a rational, otherwise the
/// numeric value of an algebraic number.
struct ModelValue {
  std::optional<Rational> exact;
  double approx = 0;
};

using Model = std::map<std::string, ModelValue>;

/// Parses the `(define-fun name () Sort value)` list following `sat`.
/// Throws SolverProtocolError on malformed output.
Model parse_model(const std::string& text);

struct Counterexample {
  Model values;
  /// meas_* symbols.
  std::map<std::string, std::int64_t> measured;
  /// Oracle tables as 0/1 vectors.
  std::map<std::string, std::vector<int>> oracles;
  /// Last classical versions, keyed by variable name.
  std::map<std::string, std::int64_t> classical;
  std::optional<std::int64_t> returned;
};

Counterexample decode_model(const Model& model, const SymbolTable& st);

struct Verdict {
  enum class Status { Verified, Refuted, Vacuous, Unknown };

  Status status = Status::Unknown;
  std::optional<Counterexample> counterexample;
  std::string reason;
  std::chrono::duration<double> setup{0};
  std::chrono::duration<double> solve{0};
};

const char* to_string(Verdict::Status s);

/// Query 1: prog ∧ pre ∧ ¬post. Unsat leads to query 2: prog ∧ pre, whose
/// satisfiability separates Verified from Vacuous.
Verdict check(const ObligationSet& prog, const ObligationSet& pre, const ObligationSet& post, const SymbolTable& st,
              const SolverConfig& cfg);

}  // namespace qramverify
