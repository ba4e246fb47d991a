#include "qramverify/op_instr.hpp"

namespace qramverify {

bool is_logical(Operator op) {
  switch (op) {
    case Operator::Not:
    case Operator::And:
    case Operator::Eq:
    case Operator::Lt:
    case Operator::Le: return true;
    default: return false;
  }
}

const char* operator_text(Operator op) {
  switch (op) {
    case Operator::Not: return "not";
    case Operator::Apply: return "apply";
    case Operator::And: return "and";
    case Operator::Eq: return "==";
    case Operator::Lt: return "<";
    case Operator::Le: return "<=";
    case Operator::Add: return "+";
    case Operator::Sub: return "-";
    case Operator::Mul: return "*";
    case Operator::Mod: return "mod";
    case Operator::Index: return "[]";
  }
  return "?";
}

OpInstr make_unary(Operator op, Operand a) {
  OpInstr r;
  r.binary = false;
  r.op = op;
  r.lhs = std::move(a);
  return r;
}

OpInstr make_apply(const std::string& oracle, Operand a) {
  OpInstr r = make_unary(Operator::Apply, std::move(a));
  r.oracle = oracle;
  return r;
}

OpInstr make_binary(Operand l, Operator op, Operand r) {
  OpInstr o;
  o.binary = true;
  o.op = op;
  o.lhs = std::move(l);
  o.rhs = std::move(r);
  return o;
}

Operand as_operand(OpInstr op) { return std::make_shared<const OpInstr>(std::move(op)); }

bool operand_equal(const Operand& a, const Operand& b) {
  if (a.index() != b.index()) return false;
  if (auto* v = std::get_if<VarRef>(&a)) return *v == std::get<VarRef>(b);
  if (auto* c = std::get_if<std::int64_t>(&a)) return *c == std::get<std::int64_t>(b);
  return *std::get<std::shared_ptr<const OpInstr>>(a) == *std::get<std::shared_ptr<const OpInstr>>(b);
}

bool operator==(const OpInstr& a, const OpInstr& b) {
  if (a.binary != b.binary || a.op != b.op || a.oracle != b.oracle) return false;
  if (!operand_equal(a.lhs, b.lhs)) return false;
  return !a.binary || operand_equal(a.rhs, b.rhs);
}

std::string to_string(const Operand& operand) {
  if (auto* v = std::get_if<VarRef>(&operand)) return v->name;
  if (auto* c = std::get_if<std::int64_t>(&operand)) return std::to_string(*c);
  return to_string(*std::get<std::shared_ptr<const OpInstr>>(operand));
}

std::string to_string(const OpInstr& op) {
  if (!op.binary) {
    const std::string head = op.op == Operator::Apply ? op.oracle : operator_text(op.op);
    return "UNARY(" + head + "," + to_string(op.lhs) + ")";
  }
  return "BINARY(" + to_string(op.lhs) + "," + operator_text(op.op) + "," + to_string(op.rhs) + ")";
}

void free_variables(const Operand& operand, std::set<std::string>& out) {
  if (auto* v = std::get_if<VarRef>(&operand)) {
    out.insert(v->name);
  } else if (auto* p = std::get_if<std::shared_ptr<const OpInstr>>(&operand)) {
    free_variables(**p, out);
  }
}

void free_variables(const OpInstr& op, std::set<std::string>& out) {
  free_variables(op.lhs, out);
  if (op.binary) free_variables(op.rhs, out);
}

bool is_boolean(const OpInstr& op) { return is_logical(op.op); }

}  // namespace qramverify
