#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qramverify/flag.hpp"
#include "qramverify/obligation.hpp"
#include "qramverify/silq_ast.hpp"

namespace qramverify {

/// {0,1}^n, N, or a function type between them.
struct SpeqType {
  enum class Kind { BitVec, Nat, Function };

  Kind kind = Kind::BitVec;
  unsigned bits = 1;
  /// Function argument and result.
  std::shared_ptr<const SpeqType> arg;
  std::shared_ptr<const SpeqType> result;

  static SpeqType bitvec(unsigned n) { return {Kind::BitVec, n, nullptr, nullptr}; }
  static SpeqType nat() { return {Kind::Nat, 0, nullptr, nullptr}; }
  static SpeqType function(SpeqType a, SpeqType r);

  friend bool operator==(const SpeqType& a, const SpeqType& b);
};

/// `{0, 1}^2`, `{0, 1}`, `N`, `{0, 1}^2->{0, 1}`.
std::string to_string(const SpeqType& t);

struct SpeqExpr {
  enum class Kind {
    // arithmetic
    Num,
    Var,
    Apply,  // f(a)
    Add,
    Sub,
    Mul,
    Div,
    Mod,
    Pow,
    Dot,  // a.b
    Neg,
    Sum,  // SUM[x](a)
    // logic
    False,
    True,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Not,
    And,
    Or,
    Implies,
    Forall,  // @x. l
    Exists,  // exists x. l
  };

  Kind kind = Kind::Num;
  BigInt value = 0;
  /// Variable, function or bound-variable name.
  std::string name;
  std::vector<SpeqExpr> args;

  bool is_logical() const;
};

std::string to_string(const SpeqExpr& e);

struct SpeqItem {
  bool is_define = false;
  std::string name;
  SpeqType type;
  SpeqExpr expr;
};

struct SpeqSpec {
  std::string function_name;
  FlagSpec flag;
  std::vector<std::pair<std::string, SpeqType>> inputs;
  std::string ret_name;
  SpeqType ret_type;
  /// Block contents in source order.
  std::vector<SpeqItem> pre_items;
  std::vector<SpeqItem> post_items;

  std::vector<SpeqExpr> pre() const;
  std::vector<SpeqExpr> post() const;
  std::vector<std::pair<std::string, SpeqType>> defined_vars() const;
  /// Type of any declared name (inputs, ret, defines).
  std::optional<SpeqType> type_of(const std::string& name) const;
};

SpeqSpec parse_speq(std::string_view source);

/// Canonical text; parse_speq(format_speq(s)) is equivalent to s.
std::string format_speq(const SpeqSpec& spec);

/// Default spec for `function_name`: its parameters as inputs, the returned
/// type as `<name>_ret`, flag rand and empty blocks. No trailing newline.
std::string generate_skeleton(const SilqAst& ast, const std::string& function_name);

/// Links spec names to program symbols.
struct SpecBinding {
  /// Term for the program's returned value.
  logic::Term ret;
  /// Program classical inputs: name -> term for their initial value.
  std::map<std::string, logic::Term> inputs;
  /// Program oracle parameters: name -> argument bits.
  std::map<std::string, unsigned> oracles;
};

struct EncodedSpec {
  ObligationSet pre{Group::Pre, {}, {}};
  ObligationSet post{Group::Post, {}, {}};
};

/// Encodes pre/post as quantifier-free obligations. Declares the spec's
/// symbols in `st`.
EncodedSpec encode_spec(const SpeqSpec& spec, const SpecBinding& binding, SymbolTable& st);

/// Direct evaluation with quantifiers and SUM enumerated over their ranges.
/// `values` binds scalar names, `tables` binds function names.
struct SpeqEnv {
  std::map<std::string, BigInt> values;
  std::map<std::string, std::vector<BigInt>> tables;
};
bool evaluate_logic(const SpeqExpr& e, const SpeqSpec& spec, const SpeqEnv& env);
BigInt evaluate_arith(const SpeqExpr& e, const SpeqSpec& spec, const SpeqEnv& env);

}  // namespace qramverify
