#include "qramverify/term.hpp"

#include <cmath>
#include <sstream>

#include "qramverify/errors.hpp"

namespace qramverify::logic {

struct Term::Node {
  Op op;
  Sort sort;
  Rational value;
  std::string name;
  std::vector<Term> args;
};

Term::Term() : Term(bool_const(true)) {}

Term::Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Op Term::op() const { return node_->op; }
Sort Term::sort() const { return node_->sort; }
const Rational& Term::value() const { return node_->value; }
const std::string& Term::name() const { return node_->name; }
const std::vector<Term>& Term::args() const { return node_->args; }

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.op() != b.op() || a.sort() != b.sort() || a.value() != b.value() || a.name() != b.name() ||
      a.args().size() != b.args().size())
    return false;
  for (std::size_t i = 0; i < a.args().size(); ++i)
    if (a.args()[i] != b.args()[i]) return false;
  return true;
}

Term make(Op op, Sort sort, std::vector<Term> args, Rational value, std::string name) {
  auto node = std::make_shared<Term::Node>();
  node->op = op;
  node->sort = sort;
  node->value = std::move(value);
  node->name = std::move(name);
  node->args = std::move(args);
  return Term(std::move(node));
}

Term bool_const(bool v) {
  static const Term t = make(Op::True, Sort::Bool, {});
  static const Term f = make(Op::False, Sort::Bool, {});
  return v ? t : f;
}

Term int_const(const Rational& v) {
  if (!is_integer(v)) throw Error("integer constant expected, got " + to_string(v));
  return make(Op::Num, Sort::Int, {}, v);
}

Term real_const(const Rational& v) { return make(Op::Num, Sort::Real, {}, v); }

Term var(const std::string& name, Sort sort) { return make(Op::Var, sort, {}, 0, name); }

namespace {

bool is_numeric(Sort s) { return s == Sort::Int || s == Sort::Real; }

void require_numeric(const Term& t, const char* where) {
  if (!is_numeric(t.sort())) throw Error(std::string("numeric operand expected in ") + where);
}

void require_bool(const Term& t, const char* where) {
  if (t.sort() != Sort::Bool) throw Error(std::string("boolean operand expected in ") + where);
}

Sort join(const std::vector<Term>& args) {
  for (const auto& a : args)
    if (a.sort() == Sort::Real) return Sort::Real;
  return Sort::Int;
}

std::vector<Term> coerce(std::vector<Term> args, Sort target) {
  if (target == Sort::Real)
    for (auto& a : args) a = to_real(a);
  return args;
}

Term num(const Rational& v, Sort s) { return s == Sort::Real ? real_const(v) : int_const(v); }

}  // namespace

Term to_real(const Term& a) {
  require_numeric(a, "to_real");
  if (a.sort() == Sort::Real) return a;
  if (a.is_const()) return real_const(a.value());
  return make(Op::ToReal, Sort::Real, {a});
}

Term add(std::vector<Term> args) {
  for (const auto& a : args) require_numeric(a, "+");
  const Sort s = join(args);
  args = coerce(std::move(args), s);
  std::vector<Term> kept;
  Rational constant = 0;
  for (auto& a : args) {
    if (a.op() == Op::Add) {
      for (const auto& inner : a.args()) {
        if (inner.is_const())
          constant += inner.value();
        else
          kept.push_back(inner);
      }
    } else if (a.is_const()) {
      constant += a.value();
    } else {
      kept.push_back(a);
    }
  }
  if (constant != 0) kept.push_back(num(constant, s));
  if (kept.empty()) return num(0, s);
  if (kept.size() == 1) return kept.front();
  return make(Op::Add, s, std::move(kept));
}

Term sub(const Term& a, const Term& b) {
  require_numeric(a, "-");
  require_numeric(b, "-");
  const Sort s = join({a, b});
  if (b.is_const() && b.value() == 0) return s == Sort::Real ? to_real(a) : a;
  if (a.is_const() && b.is_const()) return num(a.value() - b.value(), s);
  return make(Op::Sub, s, coerce({a, b}, s));
}

Term mul(std::vector<Term> args) {
  for (const auto& a : args) require_numeric(a, "*");
  const Sort s = join(args);
  args = coerce(std::move(args), s);
  Rational constant = 1;
  std::vector<Term> kept;
  for (auto& a : args) {
    if (a.is_const())
      constant *= a.value();
    else
      kept.push_back(a);
  }
  if (constant == 0) return num(0, s);
  if (kept.empty()) return num(constant, s);
  if (constant != 1) kept.insert(kept.begin(), num(constant, s));
  if (kept.size() == 1) return kept.front();
  return make(Op::Mul, s, std::move(kept));
}

Term neg(const Term& a) {
  require_numeric(a, "neg");
  if (a.is_const()) return num(-a.value(), a.sort());
  if (a.op() == Op::Neg) return a.args().front();
  return make(Op::Neg, a.sort(), {a});
}

BigInt euclid_div(const BigInt& a, const BigInt& m) {
  if (m == 0) throw Error("division by zero");
  BigInt q = a / m;  // truncates toward zero
  BigInt r = a - q * m;
  if (r < 0) {
    if (m > 0)
      q -= 1;
    else
      q += 1;
  }
  return q;
}

BigInt euclid_mod(const BigInt& a, const BigInt& m) { return a - euclid_div(a, m) * m; }

Term int_div(const Term& a, const Term& b) {
  if (a.sort() != Sort::Int || b.sort() != Sort::Int) throw Error("div requires integer operands");
  if (a.is_const() && b.is_const() && b.value() != 0)
    return int_const(Rational(euclid_div(numerator(a.value()), numerator(b.value()))));
  if (b.is_const() && b.value() == 1) return a;
  return make(Op::IntDiv, Sort::Int, {a, b});
}

Term mod(const Term& a, const Term& b) {
  if (a.sort() != Sort::Int || b.sort() != Sort::Int) throw Error("mod requires integer operands");
  if (a.is_const() && b.is_const() && b.value() != 0)
    return int_const(Rational(euclid_mod(numerator(a.value()), numerator(b.value()))));
  if (b.is_const() && (b.value() == 1 || b.value() == -1)) return int_const(0);
  return make(Op::Mod, Sort::Int, {a, b});
}

Term eq(const Term& a, const Term& b) {
  if (a.sort() == Sort::Bool || b.sort() == Sort::Bool) {
    require_bool(a, "=");
    require_bool(b, "=");
    if (a.op() == Op::True) return b;
    if (b.op() == Op::True) return a;
    return make(Op::Eq, Sort::Bool, {a, b});
  }
  if (a.is_const() && b.is_const()) return bool_const(a.value() == b.value());
  const Sort s = join({a, b});
  return make(Op::Eq, Sort::Bool, coerce({a, b}, s));
}

Term lt(const Term& a, const Term& b) {
  require_numeric(a, "<");
  require_numeric(b, "<");
  if (a.is_const() && b.is_const()) return bool_const(a.value() < b.value());
  return make(Op::Lt, Sort::Bool, coerce({a, b}, join({a, b})));
}

Term le(const Term& a, const Term& b) {
  require_numeric(a, "<=");
  require_numeric(b, "<=");
  if (a.is_const() && b.is_const()) return bool_const(a.value() <= b.value());
  return make(Op::Le, Sort::Bool, coerce({a, b}, join({a, b})));
}

Term gt(const Term& a, const Term& b) { return lt(b, a); }
Term ge(const Term& a, const Term& b) { return le(b, a); }

Term not_(const Term& a) {
  require_bool(a, "not");
  if (a.op() == Op::True) return bool_const(false);
  if (a.op() == Op::False) return bool_const(true);
  if (a.op() == Op::Not) return a.args().front();
  return make(Op::Not, Sort::Bool, {a});
}

Term and_(std::vector<Term> args) {
  std::vector<Term> kept;
  for (auto& a : args) {
    require_bool(a, "and");
    if (a.op() == Op::True) continue;
    if (a.op() == Op::False) return bool_const(false);
    if (a.op() == Op::And) {
      kept.insert(kept.end(), a.args().begin(), a.args().end());
    } else {
      kept.push_back(a);
    }
  }
  if (kept.empty()) return bool_const(true);
  if (kept.size() == 1) return kept.front();
  return make(Op::And, Sort::Bool, std::move(kept));
}

Term or_(std::vector<Term> args) {
  std::vector<Term> kept;
  for (auto& a : args) {
    require_bool(a, "or");
    if (a.op() == Op::False) continue;
    if (a.op() == Op::True) return bool_const(true);
    if (a.op() == Op::Or) {
      kept.insert(kept.end(), a.args().begin(), a.args().end());
    } else {
      kept.push_back(a);
    }
  }
  if (kept.empty()) return bool_const(false);
  if (kept.size() == 1) return kept.front();
  return make(Op::Or, Sort::Bool, std::move(kept));
}

Term implies(const Term& a, const Term& b) {
  require_bool(a, "=>");
  require_bool(b, "=>");
  if (a.op() == Op::True) return b;
  if (a.op() == Op::False || b.op() == Op::True) return bool_const(true);
  return make(Op::Implies, Sort::Bool, {a, b});
}

Term ite(const Term& c, const Term& a, const Term& b) {
  require_bool(c, "ite");
  if (c.op() == Op::True) return a;
  if (c.op() == Op::False) return b;
  if (a == b) return a;
  if (a.sort() == Sort::Bool || b.sort() == Sort::Bool) {
    require_bool(a, "ite");
    require_bool(b, "ite");
    return make(Op::Ite, Sort::Bool, {c, a, b});
  }
  const Sort s = join({a, b});
  auto branches = coerce({a, b}, s);
  return make(Op::Ite, s, {c, branches[0], branches[1]});
}

namespace {

void write_number(std::ostream& os, const Rational& v, Sort sort) {
  const bool negative = v < 0;
  const Rational mag = negative ? Rational(-v) : v;
  if (negative) os << "(- ";
  if (sort == Sort::Int) {
    os << numerator(mag).str();
  } else if (is_integer(mag)) {
    os << numerator(mag).str() << ".0";
  } else {
    os << "(/ " << numerator(mag).str() << ".0 " << denominator(mag).str() << ".0)";
  }
  if (negative) os << ")";
}

const char* op_symbol(Op op) {
  switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Neg: return "-";
    case Op::IntDiv: return "div";
    case Op::Mod: return "mod";
    case Op::ToReal: return "to_real";
    case Op::Eq: return "=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Not: return "not";
    case Op::And: return "and";
    case Op::Or: return "or";
    case Op::Implies: return "=>";
    case Op::Ite: return "ite";
    default: return "?";
  }
}

}  // namespace

void write_smt(std::ostream& os, const Term& t) {
  switch (t.op()) {
    case Op::True: os << "true"; return;
    case Op::False: os << "false"; return;
    case Op::Num: write_number(os, t.value(), t.sort()); return;
    case Op::Var: os << t.name(); return;
    default: break;
  }
  os << "(" << op_symbol(t.op());
  for (const auto& a : t.args()) {
    os << " ";
    write_smt(os, a);
  }
  os << ")";
}

std::string to_smt(const Term& t) {
  std::ostringstream os;
  write_smt(os, t);
  return os.str();
}

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.op() == Op::Var) {
    out.insert(t.name());
    return;
  }
  for (const auto& a : t.args()) collect_vars(a, out);
}

Term substitute(const Term& t, const std::map<std::string, Term>& subst) {
  switch (t.op()) {
    case Op::Var: {
      auto it = subst.find(t.name());
      return it == subst.end() ? t : it->second;
    }
    case Op::True:
    case Op::False:
    case Op::Num: return t;
    default: break;
  }
  std::vector<Term> args;
  args.reserve(t.args().size());
  for (const auto& a : t.args()) args.push_back(substitute(a, subst));
  switch (t.op()) {
    case Op::Add: return add(std::move(args));
    case Op::Sub: return sub(args[0], args[1]);
    case Op::Mul: return mul(std::move(args));
    case Op::Neg: return neg(args[0]);
    case Op::IntDiv: return int_div(args[0], args[1]);
    case Op::Mod: return mod(args[0], args[1]);
    case Op::ToReal: return to_real(args[0]);
    case Op::Eq: return eq(args[0], args[1]);
    case Op::Lt: return lt(args[0], args[1]);
    case Op::Le: return le(args[0], args[1]);
    case Op::Not: return not_(args[0]);
    case Op::And: return and_(std::move(args));
    case Op::Or: return or_(std::move(args));
    case Op::Implies: return implies(args[0], args[1]);
    case Op::Ite: return ite(args[0], args[1], args[2]);
    default: throw Error("substitute: unexpected operator");
  }
}

namespace {

// Shared evaluator over an arithmetic domain. Value is Rational (exact) or
// double (approximate, with tolerance-based comparisons).
template <typename Num>
struct Evaluator {
  const std::map<std::string, Num>& env;
  double tol;

  bool close(const Num& a, const Num& b) const {
    if constexpr (std::is_same_v<Num, double>) {
      const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
      return std::fabs(a - b) <= tol * scale;
    } else {
      return a == b;
    }
  }
  bool less(const Num& a, const Num& b) const {
    if constexpr (std::is_same_v<Num, double>)
      return a < b && !close(a, b);
    else
      return a < b;
  }

  static BigInt as_integer(const Num& v) {
    if constexpr (std::is_same_v<Num, double>) {
      return BigInt(static_cast<long long>(std::llround(v)));
    } else {
      if (!is_integer(v)) throw Error("integer operation on non-integer value " + to_string(v));
      return numerator(v);
    }
  }

  Num number(const Term& t) const {
    switch (t.op()) {
      case Op::Num:
        if constexpr (std::is_same_v<Num, double>)
          return to_double(t.value());
        else
          return t.value();
      case Op::Var: {
        auto it = env.find(t.name());
        if (it == env.end()) throw UndeclaredSymbol("no value for symbol '" + t.name() + "'");
        return it->second;
      }
      case Op::Add: {
        Num s = 0;
        for (const auto& a : t.args()) s += number(a);
        return s;
      }
      case Op::Sub: return number(t.args()[0]) - number(t.args()[1]);
      case Op::Mul: {
        Num p = 1;
        for (const auto& a : t.args()) p *= number(a);
        return p;
      }
      case Op::Neg: return -number(t.args()[0]);
      case Op::ToReal: return number(t.args()[0]);
      case Op::IntDiv:
      case Op::Mod: {
        const BigInt a = as_integer(number(t.args()[0]));
        const BigInt m = as_integer(number(t.args()[1]));
        const BigInt r = t.op() == Op::IntDiv ? euclid_div(a, m) : euclid_mod(a, m);
        if constexpr (std::is_same_v<Num, double>)
          return r.template convert_to<double>();
        else
          return Rational(r);
      }
      case Op::Ite: return boolean(t.args()[0]) ? number(t.args()[1]) : number(t.args()[2]);
      default: throw Error("numeric term expected, got " + to_smt(t));
    }
  }

  bool boolean(const Term& t) const {
    switch (t.op()) {
      case Op::True: return true;
      case Op::False: return false;
      case Op::Eq:
        if (t.args()[0].sort() == Sort::Bool) return boolean(t.args()[0]) == boolean(t.args()[1]);
        return close(number(t.args()[0]), number(t.args()[1]));
      case Op::Lt: return less(number(t.args()[0]), number(t.args()[1]));
      case Op::Le: {
        const Num a = number(t.args()[0]);
        const Num b = number(t.args()[1]);
        return less(a, b) || close(a, b);
      }
      case Op::Not: return !boolean(t.args()[0]);
      case Op::And:
        for (const auto& a : t.args())
          if (!boolean(a)) return false;
        return true;
      case Op::Or:
        for (const auto& a : t.args())
          if (boolean(a)) return true;
        return false;
      case Op::Implies: return !boolean(t.args()[0]) || boolean(t.args()[1]);
      case Op::Ite: return boolean(t.args()[0]) ? boolean(t.args()[1]) : boolean(t.args()[2]);
      default: throw Error("boolean term expected, got " + to_smt(t));
    }
  }
};

}  // namespace

bool evaluate_bool(const Term& t, const std::map<std::string, Rational>& env) {
  return Evaluator<Rational>{env, 0.0}.boolean(t);
}

Rational evaluate_number(const Term& t, const std::map<std::string, Rational>& env) {
  return Evaluator<Rational>{env, 0.0}.number(t);
}

bool evaluate_bool_approx(const Term& t, const std::map<std::string, double>& env, double tol) {
  return Evaluator<double>{env, tol}.boolean(t);
}

double evaluate_number_approx(const Term& t, const std::map<std::string, double>& env, double tol) {
  return Evaluator<double>{env, tol}.number(t);
}

}  // namespace qramverify::logic
