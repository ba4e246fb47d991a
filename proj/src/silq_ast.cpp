#include <sstream>

#include "qramverify/errors.hpp"
#include "qramverify/silq_ast.hpp"

namespace qramverify {

unsigned size(const SilqType& t) {
  switch (t.kind) {
    case SilqType::Kind::Bit: return 1;
    case SilqType::Kind::UInt: return t.bits;
    case SilqType::Kind::Int: return 64;
    case SilqType::Kind::Oracle: return t.bits;
  }
  return 1;
}

namespace {

std::string annotated(const std::vector<std::string>& ann, const std::string& base) {
  std::string s;
  for (const auto& a : ann) s += a + " ";
  return s + base;
}

std::string base_text(const SilqType& t) {
  const std::string bang = t.classical ? "!" : "";
  switch (t.kind) {
    case SilqType::Kind::Bit: return bang + "B";
    case SilqType::Kind::UInt: return bang + "uint[" + std::to_string(t.bits) + "]";
    case SilqType::Kind::Int: return "!Z";
    case SilqType::Kind::Oracle: break;
  }
  return "";
}

}  // namespace

std::string to_string(const SilqType& t) {
  if (t.kind != SilqType::Kind::Oracle) return annotated(t.arg_annotations, base_text(t));
  const std::string arg = t.bits == 1 ? "B" : "uint[" + std::to_string(t.bits) + "]";
  return annotated(t.arg_annotations, arg) + (t.classical_arrow ? "!->" : "->") +
         annotated(t.result_annotations, "B");
}

// ---------------------------------------------------------------- printing

namespace {

void print_expr(std::ostream& os, const Expr& e);

void print_operand(std::ostream& os, const Expr& e) {
  if (e.kind == Expr::Kind::Binary) {
    os << "(";
    print_expr(os, e);
    os << ")";
  } else {
    print_expr(os, e);
  }
}

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Int: os << e.value; return;
    case Expr::Kind::TypedConst: os << e.value << ":" << to_string(*e.annotation); return;
    case Expr::Kind::Var: os << e.name; return;
    case Expr::Kind::Index: os << e.name << "[" << e.value << "]"; return;
    case Expr::Kind::Call:
      os << e.name << "(";
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i) os << ", ";
        print_expr(os, e.args[i]);
      }
      os << ")";
      return;
    case Expr::Kind::Unary:
      os << e.name;
      print_operand(os, e.args[0]);
      return;
    case Expr::Kind::Binary:
      print_operand(os, e.args[0]);
      os << " " << e.name << " ";
      print_operand(os, e.args[1]);
      return;
  }
}

void print_body(std::ostream& os, const std::vector<Stmt>& body, int depth);

void print_stmt(std::ostream& os, const Stmt& s, int depth) {
  const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
  os << pad;
  switch (s.kind) {
    case Stmt::Kind::If:
      os << "if ";
      print_expr(os, s.value);
      os << " {\n";
      print_body(os, s.then_body, depth + 1);
      os << pad << "}";
      if (s.has_else) {
        os << " else {\n";
        print_body(os, s.else_body, depth + 1);
        os << pad << "}";
      }
      os << "\n";
      return;
    case Stmt::Kind::Return: os << "return " << s.target.name << ";\n"; return;
    case Stmt::Kind::Phase:
      os << "phase(";
      print_expr(os, s.value);
      os << ");\n";
      return;
    default:
      print_expr(os, s.target);
      os << (s.rebind ? " = " : " := ");
      print_expr(os, s.value);
      os << ";\n";
      return;
  }
}

void print_body(std::ostream& os, const std::vector<Stmt>& body, int depth) {
  for (const auto& s : body) print_stmt(os, s, depth);
}

}  // namespace

std::string print_silq(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string print_silq(const SilqAst& ast) {
  std::ostringstream os;
  for (std::size_t f = 0; f < ast.functions.size(); ++f) {
    const FunctionDef& fn = ast.functions[f];
    if (f) os << "\n";
    os << "def " << fn.name << "(";
    for (std::size_t i = 0; i < fn.params.size(); ++i) {
      if (i) os << ", ";
      os << fn.params[i].name << ": " << to_string(fn.params[i].type);
    }
    os << ")";
    if (fn.return_annotation) os << ": " << to_string(*fn.return_annotation);
    os << "{\n";
    print_body(os, fn.body, 1);
    os << "}\n";
  }
  return os.str();
}

// ---------------------------------------------------------------- structure

bool same_structure(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value) return false;
  if (a.annotation.has_value() != b.annotation.has_value()) return false;
  if (a.annotation && !(*a.annotation == *b.annotation)) return false;
  if (a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i)
    if (!same_structure(a.args[i], b.args[i])) return false;
  return true;
}

namespace {

bool same_body(const std::vector<Stmt>& a, const std::vector<Stmt>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same_structure(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool same_structure(const Stmt& a, const Stmt& b) {
  return a.kind == b.kind && a.rebind == b.rebind && a.has_else == b.has_else && same_structure(a.target, b.target) &&
         same_structure(a.value, b.value) && same_body(a.then_body, b.then_body) &&
         same_body(a.else_body, b.else_body);
}

bool same_structure(const SilqAst& a, const SilqAst& b) {
  if (a.functions.size() != b.functions.size()) return false;
  for (std::size_t f = 0; f < a.functions.size(); ++f) {
    const FunctionDef& x = a.functions[f];
    const FunctionDef& y = b.functions[f];
    if (x.name != y.name || x.params.size() != y.params.size()) return false;
    for (std::size_t i = 0; i < x.params.size(); ++i)
      if (x.params[i].name != y.params[i].name || !(x.params[i].type == y.params[i].type)) return false;
    if (x.return_annotation.has_value() != y.return_annotation.has_value()) return false;
    if (x.return_annotation && !(*x.return_annotation == *y.return_annotation)) return false;
    if (!same_body(x.body, y.body)) return false;
  }
  return true;
}

std::size_t count_statements(const std::vector<Stmt>& body) {
  std::size_t n = 0;
  for (const auto& s : body) n += 1 + count_statements(s.then_body) + count_statements(s.else_body);
  return n;
}

// ---------------------------------------------------------------- angles

namespace {

// value * pi^power
struct AngleTerm {
  Rational value;
  int power = 0;
};

AngleTerm angle_term(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Int: return {Rational(e.value), 0};
    case Expr::Kind::Var:
      if (e.name == "pi") return {Rational(1), 1};
      break;
    case Expr::Kind::Unary:
      if (e.name == "-") {
        AngleTerm t = angle_term(e.args[0]);
        t.value = -t.value;
        return t;
      }
      break;
    case Expr::Kind::Binary: {
      AngleTerm l = angle_term(e.args[0]);
      AngleTerm r = angle_term(e.args[1]);
      if (e.name == "*") return {l.value * r.value, l.power + r.power};
      if (e.name == "/") {
        if (r.power != 0 || r.value == 0) break;
        return {l.value / r.value, l.power};
      }
      if (e.name == "+" || e.name == "-") {
        if (l.value == 0) l.power = r.power;
        if (r.value == 0) r.power = l.power;
        if (l.power != r.power) break;
        return {e.name == "+" ? l.value + r.value : l.value - r.value, l.power};
      }
      break;
    }
    default: break;
  }
  throw UnsupportedAngle("angle " + print_silq(e) + " is not a rational multiple of pi");
}

}  // namespace

Rational angle_of(const Expr& e) {
  const AngleTerm t = angle_term(e);
  if (t.value == 0) return 0;
  if (t.power != 1) throw UnsupportedAngle("angle " + print_silq(e) + " is not a rational multiple of pi");
  return t.value;
}

std::optional<SilqType> return_type(const FunctionDef& fn) {
  if (fn.body.empty() || fn.body.back().kind != Stmt::Kind::Return) return std::nullopt;
  return fn.body.back().target.type;
}

}  // namespace qramverify
