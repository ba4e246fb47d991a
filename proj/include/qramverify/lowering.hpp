#pragma once

#include <string>

#include "qramverify/qram_model.hpp"
#include "qramverify/silq_ast.hpp"

namespace qramverify {

struct LoweringOptions {
  /// Merge consecutive single-qubit gates on disjoint wires of the same
  /// register (same controls) into one QOP.
  bool fuse = false;
};

/// Lowers function `fname` of a type-checked AST into a QRAM program.
QramProgram lower_function(const SilqAst& ast, const std::string& fname, LoweringOptions options = {});

/// Control instruction for a type-checked boolean condition.
CtrlInstr lower_condition(const Expr& e);

/// Operation operand for a type-checked classical or control expression.
Operand lower_operand(const Expr& e);

/// First variable read by `op`, scanning left to right.
std::optional<std::string> first_variable(const OpInstr& op);

}  // namespace qramverify
