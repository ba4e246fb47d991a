#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qramverify/rational.hpp"

namespace qramverify {

struct SourcePos {
  std::size_t line = 0;
  std::size_t col = 0;
};

/// Type of a Silq-Hybrid value. `Int` is the unbounded classical integer that
/// untyped literals receive; it has no bit width of its own.
struct SilqType {
  enum class Kind { Bit, UInt, Int, Oracle };

  Kind kind = Kind::Bit;
  bool classical = false;
  /// Width of uint[n]; for oracles, the argument width.
  unsigned bits = 1;
  /// Oracle surface details kept for printing only: argument/result
  /// annotations (`const`, `qfree`, ...), and whether the arrow is `!->`.
  std::vector<std::string> arg_annotations;
  std::vector<std::string> result_annotations;
  bool classical_arrow = true;

  static SilqType bit(bool classical) { return {Kind::Bit, classical, 1, {}, {}, true}; }
  static SilqType uint(unsigned n, bool classical) { return {Kind::UInt, classical, n, {}, {}, true}; }
  static SilqType integer() { return {Kind::Int, true, 64, {}, {}, true}; }
  static SilqType oracle(unsigned arg_bits) { return {Kind::Oracle, true, arg_bits, {}, {}, true}; }

  bool quantum() const { return !classical; }
  bool bounded() const { return kind != Kind::Int; }

  /// Semantic equality: annotations are ignored.
  friend bool operator==(const SilqType& a, const SilqType& b) {
    return a.kind == b.kind && a.classical == b.classical && a.bits == b.bits;
  }
};

/// Number of bits/qubits a value of this type occupies.
unsigned size(const SilqType& t);

std::string to_string(const SilqType& t);

struct Expr {
  enum class Kind {
    Int,         // 3
    TypedConst,  // 0:uint[2]
    Var,         // x, pi
    Index,       // x[1]
    Call,        // H(x), measure(x), f(x), g(a, b)
    Unary,       // !e, -e
    Binary,      // a op b
  };

  Kind kind = Kind::Int;
  /// Variable name, callee, or operator text.
  std::string name;
  /// Literal value or index.
  std::int64_t value = 0;
  std::optional<SilqType> annotation;
  std::vector<Expr> args;
  SourcePos pos;

  /// Filled in by type_check.
  std::optional<SilqType> type;
};

struct Stmt {
  enum class Kind {
    Assign,     // x := e or x = e (declaration or classical update)
    GateApply,  // x := H(x), y[0] := X(y[0])
    Measure,    // r := measure(x)
    Phase,      // phase(pi);
    If,         // if e { ... } else { ... }
    Return,     // return x;
  };

  Kind kind = Kind::Assign;
  /// Assign/GateApply/Measure: the left-hand side (Var or Index).
  /// Return: the returned Var.
  Expr target;
  /// `=` rather than `:=`.
  bool rebind = false;
  /// Assign: right-hand side. GateApply: the gate call. Measure: the
  /// measured Var. Phase: the angle. If: the condition.
  Expr value;
  std::vector<Stmt> then_body;
  std::vector<Stmt> else_body;
  bool has_else = false;
  SourcePos pos;

  /// Filled in by type_check: for If, whether the condition is quantum; for
  /// Assign, whether it declares a quantum register.
  bool quantum = false;
};

struct Param {
  std::string name;
  SilqType type;
};

struct FunctionDef {
  std::string name;
  std::vector<Param> params;
  std::optional<SilqType> return_annotation;
  std::vector<Stmt> body;
  SourcePos pos;
};

struct SilqAst {
  std::vector<FunctionDef> functions;

  const FunctionDef* find(std::string_view name) const;
};

/// Parses Silq-Hybrid source and checks that every variable is defined
/// before use and that a top-level return is the last statement.
SilqAst parse_silq(std::string_view source);

/// Annotates every expression with its type and classifies conditions.
SilqAst type_check(SilqAst ast);

/// Source text that parse_silq maps back to a structurally equal AST.
std::string print_silq(const SilqAst& ast);
std::string print_silq(const Expr& e);

/// Structural equality ignoring positions and type annotations.
bool same_structure(const Expr& a, const Expr& b);
bool same_structure(const Stmt& a, const Stmt& b);
bool same_structure(const SilqAst& a, const SilqAst& b);

/// Statements in a body, counting nested branch statements.
std::size_t count_statements(const std::vector<Stmt>& body);

/// Angle expression over `pi` as a rational multiple of pi; throws
/// UnsupportedAngle when the expression is not of that form.
Rational angle_of(const Expr& e);

/// Type of the variable returned by `fn`, if it returns one. Requires a
/// type-checked AST.
std::optional<SilqType> return_type(const FunctionDef& fn);

}  // namespace qramverify
