#pragma once

#include <chrono>
#include <string>

#include "qramverify/lowering.hpp"
#include "qramverify/obligation_gen.hpp"
#include "qramverify/silq_ast.hpp"
#include "qramverify/smt_backend.hpp"
#include "qramverify/speq.hpp"

namespace qramverify {

/// Parsed and type-checked source.
SilqAst load_program(const std::string& source);

/// Everything between the source texts and the solver.
struct VerificationTask {
  SilqAst ast;
  SpeqSpec spec;
  QramProgram program;
  ProgramObligations obligations;
  EncodedSpec encoded;
  std::chrono::duration<double> setup{0};

  /// Query-1 script (prog ∧ pre ∧ ¬post).
  std::string script(bool get_model = false) const;
};

/// Parses both sources, lowers the function named in the spec, generates
/// and binds the obligations.
VerificationTask prepare(const std::string& program_source, const std::string& spec_source,
                         const LoweringOptions& lowering = {});

/// Runs the two solver queries and records the setup time in the verdict.
Verdict verify(const VerificationTask& task, const SolverConfig& cfg);

/// Links program inputs, oracles and returned value to the spec's names.
SpecBinding make_binding(const QramProgram& program, const ProgramObligations& obligations);

}  // namespace qramverify
