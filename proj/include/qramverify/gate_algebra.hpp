#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qramverify/op_instr.hpp"
#include "qramverify/rational.hpp"

namespace qramverify {

/// Exact element a + b*sqrt(2) of Q(sqrt 2). invsqrt2 is (0, 1/2).
struct QSqrt2 {
  Rational a = 0;
  Rational b = 0;

  QSqrt2() = default;
  QSqrt2(Rational a_, Rational b_ = 0) : a(std::move(a_)), b(std::move(b_)) {}
  QSqrt2(int v) : a(v) {}

  static QSqrt2 invsqrt2() { return {0, Rational(1, 2)}; }

  bool is_zero() const { return a == 0 && b == 0; }
  double to_double() const;

  friend QSqrt2 operator+(const QSqrt2& x, const QSqrt2& y) { return {x.a + y.a, x.b + y.b}; }
  friend QSqrt2 operator-(const QSqrt2& x, const QSqrt2& y) { return {x.a - y.a, x.b - y.b}; }
  friend QSqrt2 operator-(const QSqrt2& x) { return {-x.a, -x.b}; }
  friend QSqrt2 operator*(const QSqrt2& x, const QSqrt2& y) {
    return {x.a * y.a + 2 * x.b * y.b, x.a * y.b + x.b * y.a};
  }
  friend bool operator==(const QSqrt2& x, const QSqrt2& y) { return x.a == y.a && x.b == y.b; }
};

std::string to_string(const QSqrt2& v);

/// Multilinear polynomial over 0/1-valued control symbols (oracle-table
/// entries) with coefficients in Q(sqrt 2). x*x reduces to x.
class Poly {
 public:
  using Monomial = std::vector<std::string>;  // sorted, duplicate-free

  Poly() = default;
  Poly(QSqrt2 c);
  Poly(int c) : Poly(QSqrt2(c)) {}
  static Poly symbol(const std::string& name);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Requires is_constant().
  QSqrt2 constant() const;
  std::set<std::string> symbols() const;
  std::size_t degree() const;
  const std::map<Monomial, QSqrt2>& terms() const { return terms_; }

  /// Value under a complete 0/1 assignment of the symbols.
  QSqrt2 evaluate(const std::map<std::string, int>& assignment) const;

  friend Poly operator+(const Poly& x, const Poly& y);
  friend Poly operator-(const Poly& x, const Poly& y);
  friend Poly operator-(const Poly& x);
  friend Poly operator*(const Poly& x, const Poly& y);
  friend bool operator==(const Poly& x, const Poly& y) { return x.terms_ == y.terms_; }

 private:
  void add_term(const Monomial& m, const QSqrt2& c);
  std::map<Monomial, QSqrt2> terms_;
};

std::string to_string(const Poly& p);

/// Complex scalar as a pair of real polynomials.
struct Scalar {
  Poly re;
  Poly im;

  Scalar() = default;
  Scalar(Poly r, Poly i = Poly()) : re(std::move(r)), im(std::move(i)) {}
  Scalar(int v) : re(v) {}

  bool is_zero() const { return re.is_zero() && im.is_zero(); }
  bool is_constant() const { return re.is_constant() && im.is_constant(); }
  Scalar conj() const { return {re, -im}; }
  std::complex<double> to_complex() const;
  std::set<std::string> symbols() const;

  friend Scalar operator+(const Scalar& x, const Scalar& y) { return {x.re + y.re, x.im + y.im}; }
  friend Scalar operator-(const Scalar& x, const Scalar& y) { return {x.re - y.re, x.im - y.im}; }
  friend Scalar operator*(const Scalar& x, const Scalar& y) {
    return {x.re * y.re - x.im * y.im, x.re * y.im + x.im * y.re};
  }
  friend bool operator==(const Scalar& x, const Scalar& y) { return x.re == y.re && x.im == y.im; }
};

/// Square matrix of Scalars, dimension a power of two. The label is a
/// diagnostic name only.
class SymbolicMatrix {
 public:
  SymbolicMatrix() = default;
  SymbolicMatrix(std::size_t dim, std::string label = {});

  static SymbolicMatrix identity(std::size_t dim);

  std::size_t dim() const { return dim_; }
  /// log2(dim).
  unsigned qubits() const;
  const std::string& label() const { return label_; }
  void set_label(std::string label) { label_ = std::move(label); }

  const Scalar& at(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  Scalar& at(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }

  SymbolicMatrix adjoint() const;
  bool is_concrete() const;
  bool is_identity() const;
  /// True when the matrix equals c*I for a constant c.
  bool is_scalar_identity() const;

  friend SymbolicMatrix operator*(const SymbolicMatrix& x, const SymbolicMatrix& y);
  friend bool operator==(const SymbolicMatrix& x, const SymbolicMatrix& y) {
    return x.dim_ == y.dim_ && x.entries_ == y.entries_;
  }

 private:
  std::size_t dim_ = 0;
  std::string label_;
  std::vector<Scalar> entries_;
};

enum class GateKind { H, X, I, Phase };

struct Gate {
  GateKind kind = GateKind::I;
  /// Phase angle as a multiple of pi.
  Rational angle = 0;
};

/// H, X and I are 2x2; Phase(theta) is the 1x1 matrix [e^{i theta}], which
/// embed() widens to a global phase on its target register.
SymbolicMatrix gate(const Gate& g);

SymbolicMatrix kron(const SymbolicMatrix& a, const SymbolicMatrix& b);

/// Operator acting as `u` on `target_wires` (u's local bit k sits on wire
/// target_wires[k]; wire 0 is the least-significant qubit) and as identity
/// elsewhere, on `total_qubits` qubits.
SymbolicMatrix embed(const SymbolicMatrix& u, std::span<const unsigned> target_wires, unsigned total_qubits);

/// Joint-state layout. Variables are listed most-significant first; within a
/// variable bit 0 is its least-significant qubit.
class QubitLayout {
 public:
  struct Entry {
    std::string name;
    unsigned size = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  QubitLayout() = default;
  explicit QubitLayout(std::vector<Entry> entries);

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  unsigned total_qubits() const;
  std::uint64_t dim() const { return std::uint64_t{1} << total_qubits(); }
  bool contains(const std::string& name) const;
  unsigned size_of(const std::string& name) const;
  /// Wire index of the variable's bit 0.
  unsigned offset(const std::string& name) const;
  std::vector<unsigned> wires(const std::string& name) const;
  std::uint64_t value_of(std::uint64_t joint_index, const std::string& name) const;

  /// New variable becomes the least-significant block.
  QubitLayout with(const std::string& name, unsigned size) const;
  QubitLayout without(const std::string& name) const;

  friend bool operator==(const QubitLayout&, const QubitLayout&) = default;

 private:
  std::vector<Entry> entries_;
};

/// b_v for every joint basis value v: the (possibly symbolic) 0/1 truth value
/// of the conjunction of `controls`. Oracle applications f(k) become the
/// table symbol f_k.
std::vector<Poly> control_diag(std::span<const OpInstr> controls, const QubitLayout& layout);
std::vector<Poly> control_diag(const OpInstr& control, const QubitLayout& layout);

/// CU = I + (U - I) * diag(b).
SymbolicMatrix controlled_u(const SymbolicMatrix& u_full, std::span<const Poly> b);

}  // namespace qramverify
