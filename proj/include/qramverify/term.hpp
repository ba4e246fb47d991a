#pragma once

#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "qramverify/rational.hpp"

namespace qramverify::logic {

enum class Sort { Bool, Int, Real };

enum class Op {
  True,
  False,
  Num,
  Var,
  Add,
  Sub,
  Mul,
  Neg,
  IntDiv,
  Mod,
  ToReal,
  Eq,
  Lt,
  Le,
  Not,
  And,
  Or,
  Implies,
  Ite,
};

/// Immutable, structurally shared SMT term. The builders below perform
/// constant folding and insert `to_real` where Int meets Real.
class Term {
 public:
  Term();

  Op op() const;
  Sort sort() const;
  const Rational& value() const;
  const std::string& name() const;
  const std::vector<Term>& args() const;

  bool is_const() const { return op() == Op::Num; }
  bool is_true() const { return op() == Op::True; }
  bool is_false() const { return op() == Op::False; }

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node;
  explicit Term(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;

  friend Term make(Op op, Sort sort, std::vector<Term> args, Rational value, std::string name);
};

Term make(Op op, Sort sort, std::vector<Term> args, Rational value = 0, std::string name = {});

Term bool_const(bool v);
Term int_const(const Rational& v);
Term real_const(const Rational& v);
Term var(const std::string& name, Sort sort);

Term add(std::vector<Term> args);
Term sub(const Term& a, const Term& b);
Term mul(std::vector<Term> args);
Term neg(const Term& a);
Term to_real(const Term& a);
/// Euclidean integer division and remainder (SMT-LIB `div` / `mod`).
Term int_div(const Term& a, const Term& b);
Term mod(const Term& a, const Term& b);

Term eq(const Term& a, const Term& b);
Term lt(const Term& a, const Term& b);
Term le(const Term& a, const Term& b);
Term gt(const Term& a, const Term& b);
Term ge(const Term& a, const Term& b);
Term not_(const Term& a);
Term and_(std::vector<Term> args);
Term or_(std::vector<Term> args);
Term implies(const Term& a, const Term& b);
Term ite(const Term& c, const Term& a, const Term& b);

inline Term add(const Term& a, const Term& b) { return add(std::vector<Term>{a, b}); }
inline Term mul(const Term& a, const Term& b) { return mul(std::vector<Term>{a, b}); }
inline Term and_(const Term& a, const Term& b) { return and_(std::vector<Term>{a, b}); }
inline Term or_(const Term& a, const Term& b) { return or_(std::vector<Term>{a, b}); }

void write_smt(std::ostream& os, const Term& t);
std::string to_smt(const Term& t);

void collect_vars(const Term& t, std::set<std::string>& out);

/// Replaces variables by terms; variables missing from `subst` are kept.
Term substitute(const Term& t, const std::map<std::string, Term>& subst);

/// Euclidean quotient/remainder on exact integers: 0 <= r < |m|.
BigInt euclid_div(const BigInt& a, const BigInt& m);
BigInt euclid_mod(const BigInt& a, const BigInt& m);

/// Exact evaluation. Throws UndeclaredSymbol for unbound variables and Error
/// for division by zero.
bool evaluate_bool(const Term& t, const std::map<std::string, Rational>& env);
Rational evaluate_number(const Term& t, const std::map<std::string, Rational>& env);

/// Floating-point evaluation for models holding irrational values; equalities
/// and inequalities are decided with the relative tolerance `tol`.
bool evaluate_bool_approx(const Term& t, const std::map<std::string, double>& env, double tol);
double evaluate_number_approx(const Term& t, const std::map<std::string, double>& env, double tol);

}  // namespace qramverify::logic
