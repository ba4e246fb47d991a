#pragma once

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>

namespace qramverify {

/// Operators admitted inside UNARY / BINARY operation instructions.
enum class Operator {
  Not,    // unary logical negation
  Apply,  // unary oracle application, UNARY(f, x)
  And,
  Eq,
  Lt,
  Le,
  Add,
  Sub,
  Mul,
  Mod,
  Index,  // BINARY(x, [], i): bit i of x
};

bool is_logical(Operator op);
const char* operator_text(Operator op);

struct OpInstr;

struct VarRef {
  std::string name;
  friend bool operator==(const VarRef&, const VarRef&) = default;
};

using Operand = std::variant<VarRef, std::int64_t, std::shared_ptr<const OpInstr>>;

/// UNARY(op, a) or BINARY(l, op, r). For Operator::Apply the oracle name is
/// held in `oracle` and the argument in `lhs`.
struct OpInstr {
  bool binary = false;
  Operator op = Operator::Not;
  std::string oracle;
  Operand lhs;
  Operand rhs;
};

OpInstr make_unary(Operator op, Operand a);
OpInstr make_apply(const std::string& oracle, Operand a);
OpInstr make_binary(Operand l, Operator op, Operand r);
Operand as_operand(OpInstr op);

bool operator==(const OpInstr& a, const OpInstr& b);
bool operand_equal(const Operand& a, const Operand& b);

/// Text form used by the IR dump, e.g. `BINARY(UNARY(f,x),==,1)`.
std::string to_string(const OpInstr& op);
std::string to_string(const Operand& operand);

/// Variables referenced (oracle names excluded).
void free_variables(const OpInstr& op, std::set<std::string>& out);
void free_variables(const Operand& operand, std::set<std::string>& out);

/// True when the top-level operator yields a boolean.
bool is_boolean(const OpInstr& op);

}  // namespace qramverify
