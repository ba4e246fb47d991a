#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qramverify/qram_model.hpp"
#include "qramverify/speq.hpp"

namespace qramverify {

/// Concrete oracle tables: name -> f(0), f(1), ...
using OracleTables = std::map<std::string, std::vector<int>>;
using ClassicalEnv = std::map<std::string, std::int64_t>;

/// Dense state vector over `layout` plus the classical environment.
struct SimState {
  QubitLayout layout;
  std::vector<std::complex<double>> amplitudes;
  ClassicalEnv env;
};

struct SimBranch {
  double probability = 1;
  /// (measured variable, outcome, conditional probability) per measurement.
  struct Outcome {
    std::string var;
    std::uint64_t value = 0;
    double probability = 1;
  };
  std::vector<Outcome> outcomes;
  SimState final_state;
  std::optional<std::int64_t> returned;
};

/// Every measurement branch with nonzero probability, depth first.
/// Throws UnboundOracle when a program oracle has no table.
std::vector<SimBranch> run_all_branches(const QramProgram& p, const OracleTables& tables, const ClassicalEnv& inputs);

/// True when every measurement along the branch passes the flag test.
bool branch_admissible(const SimBranch& b, const FlagSpec& flag, double slack = 1e-9);

struct BruteCheckResult {
  bool holds = true;
  /// Some table/input/spec-variable choice satisfies pre and admits a branch.
  bool satisfiable = false;
  struct Witness {
    OracleTables tables;
    ClassicalEnv inputs;
    ClassicalEnv spec_values;
    SimBranch branch;
  };
  std::optional<Witness> violation;
  std::size_t cases = 0;
};

/// Exhaustive check of `spec` against `p` over all oracle tables (argument
/// width at most 3 bits), classical inputs and free spec variables (N ranges
/// over [0, 64]).
BruteCheckResult brute_check(const QramProgram& p, const SpeqSpec& spec);

/// Enumerates every 0/1 table of 2^bits entries in lexicographic order.
std::vector<std::vector<int>> all_tables(unsigned bits);

}  // namespace qramverify
