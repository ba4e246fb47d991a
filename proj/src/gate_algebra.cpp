#include "qramverify/gate_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "qramverify/errors.hpp"
#include "qramverify/naming.hpp"

namespace qramverify {

double QSqrt2::to_double() const { return qramverify::to_double(a) + qramverify::to_double(b) * std::sqrt(2.0); }

std::string to_string(const QSqrt2& v) {
  if (v.b == 0) return to_string(v.a);
  std::string s = v.a == 0 ? "" : to_string(v.a) + "+";
  return s + to_string(v.b) + "*sqrt2";
}

// ---------------------------------------------------------------- Poly

Poly::Poly(QSqrt2 c) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, std::move(c));
}

Poly Poly::symbol(const std::string& name) {
  Poly p;
  p.terms_.emplace(Monomial{name}, QSqrt2(1));
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

QSqrt2 Poly::constant() const {
  if (terms_.empty()) return {};
  if (!is_constant()) throw Error("polynomial is not constant: " + to_string(*this));
  return terms_.begin()->second;
}

std::set<std::string> Poly::symbols() const {
  std::set<std::string> out;
  for (const auto& [m, c] : terms_) out.insert(m.begin(), m.end());
  return out;
}

std::size_t Poly::degree() const {
  std::size_t d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.size());
  return d;
}

QSqrt2 Poly::evaluate(const std::map<std::string, int>& assignment) const {
  QSqrt2 sum;
  for (const auto& [m, c] : terms_) {
    bool live = true;
    for (const auto& s : m) {
      auto it = assignment.find(s);
      if (it == assignment.end()) throw UndeclaredSymbol(s);
      if (it->second == 0) {
        live = false;
        break;
      }
    }
    if (live) sum = sum + c;
  }
  return sum;
}

void Poly::add_term(const Monomial& m, const QSqrt2& c) {
  if (c.is_zero()) return;
  auto it = terms_.find(m);
  if (it == terms_.end()) {
    terms_.emplace(m, c);
    return;
  }
  it->second = it->second + c;
  if (it->second.is_zero()) terms_.erase(it);
}

Poly operator+(const Poly& x, const Poly& y) {
  Poly r = x;
  for (const auto& [m, c] : y.terms_) r.add_term(m, c);
  return r;
}

Poly operator-(const Poly& x) {
  Poly r;
  for (const auto& [m, c] : x.terms_) r.terms_.emplace(m, -c);
  return r;
}

Poly operator-(const Poly& x, const Poly& y) { return x + (-y); }

Poly operator*(const Poly& x, const Poly& y) {
  Poly r;
  for (const auto& [mx, cx] : x.terms_) {
    for (const auto& [my, cy] : y.terms_) {
      Poly::Monomial m;
      std::set_union(mx.begin(), mx.end(), my.begin(), my.end(), std::back_inserter(m));
      r.add_term(m, cx * cy);
    }
  }
  return r;
}

std::string to_string(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (const auto& [m, c] : p.terms()) {
    if (!out.empty()) out += " + ";
    out += "(" + to_string(c) + ")";
    for (const auto& s : m) out += "*" + s;
  }
  return out;
}

// ---------------------------------------------------------------- Scalar

std::complex<double> Scalar::to_complex() const {
  return {re.constant().to_double(), im.constant().to_double()};
}

std::set<std::string> Scalar::symbols() const {
  auto s = re.symbols();
  auto t = im.symbols();
  s.insert(t.begin(), t.end());
  return s;
}

// ---------------------------------------------------------------- SymbolicMatrix

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::string identity_label(std::size_t dim) {
  std::string label;
  for (std::size_t d = dim; d > 1; d >>= 1) label += label.empty() ? "I" : "⊗I";
  return label.empty() ? "1" : label;
}

}  // namespace

SymbolicMatrix::SymbolicMatrix(std::size_t dim, std::string label)
    : dim_(dim), label_(std::move(label)), entries_(dim * dim) {
  if (!is_power_of_two(dim)) throw DimensionMismatch("matrix dimension " + std::to_string(dim) + " is not a power of two");
}

SymbolicMatrix SymbolicMatrix::identity(std::size_t dim) {
  SymbolicMatrix m(dim, identity_label(dim));
  for (std::size_t i = 0; i < dim; ++i) m.at(i, i) = Scalar(1);
  return m;
}

unsigned SymbolicMatrix::qubits() const {
  unsigned k = 0;
  while ((std::size_t{1} << k) < dim_) ++k;
  return k;
}

SymbolicMatrix SymbolicMatrix::adjoint() const {
  SymbolicMatrix r(dim_, label_ + "†");
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) r.at(j, i) = at(i, j).conj();
  return r;
}

bool SymbolicMatrix::is_concrete() const {
  return std::all_of(entries_.begin(), entries_.end(), [](const Scalar& s) { return s.is_constant(); });
}

bool SymbolicMatrix::is_identity() const { return *this == identity(dim_); }

bool SymbolicMatrix::is_scalar_identity() const {
  if (dim_ == 0 || !at(0, 0).is_constant()) return false;
  for (std::size_t i = 0; i < dim_; ++i)
    for (std::size_t j = 0; j < dim_; ++j) {
      const Scalar& e = at(i, j);
      if (i == j ? !(e == at(0, 0)) : !e.is_zero()) return false;
    }
  return true;
}

SymbolicMatrix operator*(const SymbolicMatrix& x, const SymbolicMatrix& y) {
  if (x.dim_ != y.dim_)
    throw DimensionMismatch("cannot multiply " + std::to_string(x.dim_) + " by " + std::to_string(y.dim_));
  SymbolicMatrix r(x.dim_, x.label_ + "·" + y.label_);
  for (std::size_t i = 0; i < x.dim_; ++i)
    for (std::size_t k = 0; k < x.dim_; ++k) {
      const Scalar& a = x.at(i, k);
      if (a.is_zero()) continue;
      for (std::size_t j = 0; j < x.dim_; ++j) {
        const Scalar& b = y.at(k, j);
        if (!b.is_zero()) r.at(i, j) = r.at(i, j) + a * b;
      }
    }
  return r;
}

// ---------------------------------------------------------------- gates

namespace {

// e^{i k pi / 4}
Scalar unit_root8(int k) {
  const QSqrt2 r = QSqrt2::invsqrt2();
  switch (((k % 8) + 8) % 8) {
    case 0: return {Poly(1), Poly()};
    case 1: return {Poly(r), Poly(r)};
    case 2: return {Poly(), Poly(1)};
    case 3: return {Poly(-r), Poly(r)};
    case 4: return {Poly(-1), Poly()};
    case 5: return {Poly(-r), Poly(-r)};
    case 6: return {Poly(), Poly(-1)};
    default: return {Poly(r), Poly(-r)};
  }
}

std::string angle_label(const Rational& angle) {
  if (angle == 1) return "π";
  if (angle == -1) return "-π";
  const BigInt num = numerator(angle);
  const BigInt den = denominator(angle);
  std::string s = num == 1 ? "π" : num == -1 ? "-π" : num.str() + "π";
  return den == 1 ? s : s + "/" + den.str();
}

}  // namespace

SymbolicMatrix gate(const Gate& g) {
  switch (g.kind) {
    case GateKind::H: {
      SymbolicMatrix m(2, "H");
      const Poly r(QSqrt2::invsqrt2());
      m.at(0, 0) = Scalar(r);
      m.at(0, 1) = Scalar(r);
      m.at(1, 0) = Scalar(r);
      m.at(1, 1) = Scalar(-r);
      return m;
    }
    case GateKind::X: {
      SymbolicMatrix m(2, "X");
      m.at(0, 1) = Scalar(1);
      m.at(1, 0) = Scalar(1);
      return m;
    }
    case GateKind::I: return SymbolicMatrix::identity(2);
    case GateKind::Phase: {
      const Rational quarters = g.angle * 4;
      if (!is_integer(quarters)) throw UnsupportedAngle(to_string(g.angle) + "*pi is not a multiple of pi/4");
      const BigInt k = numerator(quarters) % 8;
      SymbolicMatrix m(1, angle_label(g.angle));
      m.at(0, 0) = unit_root8(static_cast<int>(k));
      return m;
    }
  }
  throw Error("unknown gate");
}

SymbolicMatrix kron(const SymbolicMatrix& a, const SymbolicMatrix& b) {
  std::string label;
  if (a.dim() == 1) label = a.label() + b.label();
  else if (b.dim() == 1) label = a.label() + b.label();
  else label = a.label() + "⊗" + b.label();
  SymbolicMatrix r(a.dim() * b.dim(), label);
  const std::size_t bd = b.dim();
  for (std::size_t i1 = 0; i1 < a.dim(); ++i1)
    for (std::size_t j1 = 0; j1 < a.dim(); ++j1) {
      const Scalar& x = a.at(i1, j1);
      if (x.is_zero()) continue;
      for (std::size_t i2 = 0; i2 < bd; ++i2)
        for (std::size_t j2 = 0; j2 < bd; ++j2) {
          const Scalar& y = b.at(i2, j2);
          if (!y.is_zero()) r.at(i1 * bd + i2, j1 * bd + j2) = x * y;
        }
    }
  return r;
}

SymbolicMatrix embed(const SymbolicMatrix& u, std::span<const unsigned> target_wires, unsigned total_qubits) {
  if (u.dim() != (std::size_t{1} << target_wires.size()))
    throw DimensionMismatch("gate of dimension " + std::to_string(u.dim()) + " on " +
                            std::to_string(target_wires.size()) + " wires");
  std::uint64_t target_mask = 0;
  for (unsigned w : target_wires) {
    if (w >= total_qubits)
      throw WireOutOfRange("wire " + std::to_string(w) + " outside " + std::to_string(total_qubits) + " qubits");
    if (target_mask & (std::uint64_t{1} << w)) throw WireOutOfRange("wire " + std::to_string(w) + " repeated");
    target_mask |= std::uint64_t{1} << w;
  }
  const std::size_t dim = std::size_t{1} << total_qubits;
  auto local = [&](std::size_t index) {
    std::size_t v = 0;
    for (std::size_t k = 0; k < target_wires.size(); ++k) v |= ((index >> target_wires[k]) & 1U) << k;
    return v;
  };

  // Single-wire gates get a per-wire label, most-significant wire first.
  std::string label = u.label();
  if (target_wires.size() == 1 && total_qubits > 1) {
    label.clear();
    for (unsigned w = total_qubits; w-- > 0;) {
      if (!label.empty()) label += "⊗";
      label += (target_mask >> w) & 1U ? u.label() : "I";
    }
  }

  SymbolicMatrix r(dim, label);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) {
      if ((i & ~target_mask) != (j & ~target_mask)) continue;
      const Scalar& e = u.at(local(i), local(j));
      if (!e.is_zero()) r.at(i, j) = e;
    }
  return r;
}

// ---------------------------------------------------------------- layout

QubitLayout::QubitLayout(std::vector<Entry> entries) : entries_(std::move(entries)) {}

unsigned QubitLayout::total_qubits() const {
  unsigned n = 0;
  for (const auto& e : entries_) n += e.size;
  return n;
}

bool QubitLayout::contains(const std::string& name) const {
  return std::any_of(entries_.begin(), entries_.end(), [&](const Entry& e) { return e.name == name; });
}

unsigned QubitLayout::size_of(const std::string& name) const {
  for (const auto& e : entries_)
    if (e.name == name) return e.size;
  throw LayoutMismatch("variable " + name + " is not in the quantum state");
}

unsigned QubitLayout::offset(const std::string& name) const {
  unsigned below = total_qubits();
  for (const auto& e : entries_) {
    below -= e.size;
    if (e.name == name) return below;
  }
  throw LayoutMismatch("variable " + name + " is not in the quantum state");
}

std::vector<unsigned> QubitLayout::wires(const std::string& name) const {
  const unsigned off = offset(name);
  std::vector<unsigned> w(size_of(name));
  for (unsigned k = 0; k < w.size(); ++k) w[k] = off + k;
  return w;
}

std::uint64_t QubitLayout::value_of(std::uint64_t joint_index, const std::string& name) const {
  const unsigned n = size_of(name);
  return (joint_index >> offset(name)) & ((std::uint64_t{1} << n) - 1);
}

QubitLayout QubitLayout::with(const std::string& name, unsigned size) const {
  if (contains(name)) throw DuplicateVariable(name);
  auto e = entries_;
  e.push_back({name, size});
  return QubitLayout(std::move(e));
}

QubitLayout QubitLayout::without(const std::string& name) const {
  auto e = entries_;
  auto it = std::find_if(e.begin(), e.end(), [&](const Entry& x) { return x.name == name; });
  if (it == e.end()) throw AbsentVariable(name);
  e.erase(it);
  return QubitLayout(std::move(e));
}

// ---------------------------------------------------------------- controls

namespace {

// Raised internally when evaluation meets an oracle entry whose value has not
// been fixed on the current branch.
struct NeedSymbol {
  std::string name;
};

class PredicateEvaluator {
 public:
  PredicateEvaluator(const QubitLayout& layout, std::uint64_t index, const std::map<std::string, int>& fixed)
      : layout_(layout), index_(index), fixed_(fixed) {}

  std::int64_t eval(const Operand& operand) const {
    if (auto* v = std::get_if<VarRef>(&operand)) {
      if (!layout_.contains(v->name))
        throw NonBooleanPredicate("control mentions " + v->name + ", which is not a quantum variable");
      return static_cast<std::int64_t>(layout_.value_of(index_, v->name));
    }
    if (auto* c = std::get_if<std::int64_t>(&operand)) return *c;
    return eval(*std::get<std::shared_ptr<const OpInstr>>(operand));
  }

  std::int64_t eval(const OpInstr& op) const {
    if (!op.binary) {
      const std::int64_t a = eval(op.lhs);
      switch (op.op) {
        case Operator::Not: return a == 0 ? 1 : 0;
        case Operator::Apply: {
          if (a < 0) throw NonBooleanPredicate("negative oracle argument");
          const std::string sym = naming::oracle_entry(op.oracle, static_cast<std::uint64_t>(a));
          auto it = fixed_.find(sym);
          if (it == fixed_.end()) throw NeedSymbol{sym};
          return it->second;
        }
        default: throw NonBooleanPredicate(std::string("operator ") + operator_text(op.op) + " is not unary");
      }
    }
    const std::int64_t l = eval(op.lhs);
    const std::int64_t r = eval(op.rhs);
    switch (op.op) {
      case Operator::And: return (l != 0 && r != 0) ? 1 : 0;
      case Operator::Eq: return l == r ? 1 : 0;
      case Operator::Lt: return l < r ? 1 : 0;
      case Operator::Le: return l <= r ? 1 : 0;
      case Operator::Add: return l + r;
      case Operator::Sub: return l - r;
      case Operator::Mul: return l * r;
      case Operator::Mod: {
        if (r == 0) throw NonBooleanPredicate("mod by zero");
        return ((l % r) + r) % r;
      }
      case Operator::Index: return (l >> r) & 1;
      default: throw NonBooleanPredicate(std::string("operator ") + operator_text(op.op) + " is not binary");
    }
  }

 private:
  const QubitLayout& layout_;
  std::uint64_t index_;
  const std::map<std::string, int>& fixed_;
};

// Truth value of `op` at basis index `index` as a polynomial in the oracle
// symbols it touches: sum over branches of the branch indicator.
Poly predicate_value(const OpInstr& op, const QubitLayout& layout, std::uint64_t index,
                     std::map<std::string, int>& fixed) {
  try {
    return Poly(PredicateEvaluator(layout, index, fixed).eval(op) != 0 ? 1 : 0);
  } catch (const NeedSymbol& need) {
    const Poly s = Poly::symbol(need.name);
    fixed[need.name] = 0;
    Poly p0 = predicate_value(op, layout, index, fixed);
    fixed[need.name] = 1;
    Poly p1 = predicate_value(op, layout, index, fixed);
    fixed.erase(need.name);
    return (Poly(1) - s) * p0 + s * p1;
  }
}

}  // namespace

std::vector<Poly> control_diag(const OpInstr& control, const QubitLayout& layout) {
  if (!is_boolean(control)) throw NonBooleanPredicate(to_string(control));
  std::vector<Poly> b(layout.dim());
  std::map<std::string, int> fixed;
  for (std::uint64_t v = 0; v < b.size(); ++v) b[v] = predicate_value(control, layout, v, fixed);
  return b;
}

std::vector<Poly> control_diag(std::span<const OpInstr> controls, const QubitLayout& layout) {
  std::vector<Poly> b(layout.dim(), Poly(1));
  for (const auto& c : controls) {
    const auto bc = control_diag(c, layout);
    for (std::size_t v = 0; v < b.size(); ++v) b[v] = b[v] * bc[v];
  }
  return b;
}

SymbolicMatrix controlled_u(const SymbolicMatrix& u_full, std::span<const Poly> b) {
  if (u_full.dim() != b.size())
    throw DimensionMismatch("unitary of dimension " + std::to_string(u_full.dim()) + " with " +
                            std::to_string(b.size()) + " control entries");
  SymbolicMatrix cu(u_full.dim(), "C(" + u_full.label() + ")");
  for (std::size_t i = 0; i < u_full.dim(); ++i)
    for (std::size_t j = 0; j < u_full.dim(); ++j) {
      const Scalar delta(i == j ? 1 : 0);
      cu.at(i, j) = delta + (u_full.at(i, j) - delta) * Scalar(b[j]);
    }
  return cu;
}

}  // namespace qramverify
