#pragma once

#include <optional>
#include <string>

#include "qramverify/flag.hpp"
#include "qramverify/obligation.hpp"
#include "qramverify/qram_model.hpp"

namespace qramverify {

struct ProgramObligations {
  ObligationSet prog{Group::Prog, {}, {}};
  SymbolTable symbols;
  /// Symbol term of the RETURN variable's last version; empty without RETURN.
  std::optional<logic::Term> ret;
};

/// SSA encoding of a valid program. Declares its oracle tables and classical
/// inputs, then folds gen_process over the processes.
ProgramObligations gen_program(const QramProgram& p, const FlagSpec& flag);

/// Obligations for one process, advancing `st` (classical versions, state
/// generation, measurement records, return binding).
ObligationSet gen_process(const QramProcess& proc, SymbolTable& st, const FlagSpec& flag);

/// Probability, outcome-admissibility and post-state obligations for
/// measuring quantum variable `x` in the live generation.
ObligationSet gen_measurement(const std::string& x, SymbolTable& st, const FlagSpec& flag);

/// Classical value of an operand at the current versions in `st`; boolean
/// operations become 0/1 via ite.
logic::Term classical_value(const Operand& operand, const SymbolTable& st);
/// Truth of a classical condition at the current versions in `st`.
logic::Term classical_condition(const OpInstr& op, const SymbolTable& st);

}  // namespace qramverify
