#include "qramverify/obligation_gen.hpp"

#include <algorithm>
#include <set>

#include "qramverify/errors.hpp"
#include "qramverify/naming.hpp"

namespace qramverify {

namespace {

using logic::Term;
using naming::AmpPart;

constexpr AmpPart kParts[] = {AmpPart::ReA, AmpPart::ReB, AmpPart::ImA, AmpPart::ImB};

Term int_num(const Rational& v) { return logic::int_const(v); }
Term real_num(const Rational& v) { return logic::real_const(v); }

std::optional<Rational> upper_for(unsigned size, bool bounded) {
  if (!bounded) return std::nullopt;
  return pow2(size);
}

const Term& invsqrt2(SymbolTable& st) {
  static const Term t = logic::var(naming::kInvSqrt2, logic::Sort::Real);
  st.declare({naming::kInvSqrt2, logic::Sort::Real, SymbolDecl::Role::Constant, std::nullopt, std::nullopt});
  return t;
}

Term amp(std::int64_t g, std::uint64_t i, AmpPart part) {
  return logic::var(naming::amplitude(g, i, part), logic::Sort::Real);
}

/// Rational linear combination of amplitude symbols.
class LinearForm {
 public:
  void add(const std::string& sym, const Rational& c) {
    if (c == 0) return;
    Rational& v = coeffs_[sym];
    v += c;
    if (v == 0) coeffs_.erase(sym);
  }
  bool empty() const { return coeffs_.empty(); }
  Term term() const {
    std::vector<Term> parts;
    for (const auto& [sym, c] : coeffs_) {
      Term v = logic::var(sym, logic::Sort::Real);
      parts.push_back(c == 1 ? v : logic::mul(real_num(c), v));
    }
    return parts.empty() ? real_num(0) : logic::add(parts);
  }

 private:
  std::map<std::string, Rational> coeffs_;
};

/// Accumulates Σ_j c_j · sv{t}_j with concrete Q(√2)-complex coefficients
/// into the four parts of one target amplitude.
struct AmpAccumulator {
  LinearForm parts[4];

  void add(const QSqrt2& cre, const QSqrt2& cim, std::int64_t g, std::uint64_t j, const std::array<bool, 4>& zero) {
    auto sym = [&](AmpPart p) { return naming::amplitude(g, j, p); };
    auto put = [&](AmpPart target, AmpPart source, const Rational& c) {
      if (!zero[static_cast<int>(source)]) parts[static_cast<int>(target)].add(sym(source), c);
    };
    // re = cre*xre - cim*xim; im = cre*xim + cim*xre, each factor a + b*sqrt2.
    put(AmpPart::ReA, AmpPart::ReA, cre.a);
    put(AmpPart::ReA, AmpPart::ReB, 2 * cre.b);
    put(AmpPart::ReA, AmpPart::ImA, -cim.a);
    put(AmpPart::ReA, AmpPart::ImB, -2 * cim.b);
    put(AmpPart::ReB, AmpPart::ReB, cre.a);
    put(AmpPart::ReB, AmpPart::ReA, cre.b);
    put(AmpPart::ReB, AmpPart::ImB, -cim.a);
    put(AmpPart::ReB, AmpPart::ImA, -cim.b);
    put(AmpPart::ImA, AmpPart::ImA, cre.a);
    put(AmpPart::ImA, AmpPart::ImB, 2 * cre.b);
    put(AmpPart::ImA, AmpPart::ReA, cim.a);
    put(AmpPart::ImA, AmpPart::ReB, 2 * cim.b);
    put(AmpPart::ImB, AmpPart::ImB, cre.a);
    put(AmpPart::ImB, AmpPart::ImA, cre.b);
    put(AmpPart::ImB, AmpPart::ReB, cim.a);
    put(AmpPart::ImB, AmpPart::ReA, cim.b);
  }
};

std::map<std::string, std::int64_t> versions_of(const Memory& m) {
  std::map<std::string, std::int64_t> out;
  for (const auto& [name, reg] : m.registers()) out[name] = reg.ver;
  return out;
}

void check_layout(const QubitLayout& layout, const Memory& mem) {
  const auto& regs = mem.registers();
  bool ok = layout.entries().size() == regs.size();
  for (const auto& e : layout.entries()) {
    auto it = regs.find(e.name);
    ok = ok && it != regs.end() && it->second.size == e.size;
  }
  if (!ok) throw LayoutMismatch("state layout does not match quantum memory " + to_string(mem));
}

Generation& push_generation(SymbolTable& st, QubitLayout layout, const Memory& mem) {
  Generation g;
  g.index = static_cast<std::int64_t>(st.generations().size());
  g.layout = std::move(layout);
  g.versions = versions_of(mem);
  g.zero_parts.assign(g.layout.dim(), {false, false, false, false});
  for (std::uint64_t i = 0; i < g.layout.dim(); ++i)
    for (AmpPart p : kParts)
      st.declare({naming::amplitude(g.index, i, p), logic::Sort::Real, SymbolDecl::Role::Amplitude, std::nullopt,
                  std::nullopt});
  st.generations().push_back(std::move(g));
  st.live_generation = st.generations().size() - 1;
  return st.generations().back();
}

const Generation* live(const SymbolTable& st) {
  return st.live_generation ? &st.generations()[*st.live_generation] : nullptr;
}

Term current_classical(const std::string& name, const SymbolTable& st) {
  auto it = st.final_classical.find(name);
  if (it == st.final_classical.end()) throw UndeclaredSymbol("classical variable " + name + " has no value");
  return st.term(naming::classical(name, it->second));
}

Term oracle_lookup(const std::string& f, const Term& arg, const SymbolTable& st) {
  auto it = st.oracles().find(f);
  if (it == st.oracles().end()) throw UnboundOracle("oracle " + f + " is not declared");
  const std::uint64_t n = std::uint64_t{1} << it->second;
  if (arg.is_const()) {
    const Rational& v = arg.value();
    if (v < 0 || v >= Rational(BigInt(n))) throw Error("oracle " + f + " applied outside its domain");
    return st.term(naming::oracle_entry(f, static_cast<std::uint64_t>(to_int64(v))));
  }
  Term out = st.term(naming::oracle_entry(f, n - 1));
  for (std::uint64_t k = n - 1; k-- > 0;)
    out = logic::ite(logic::eq(arg, int_num(Rational(BigInt(k)))), st.term(naming::oracle_entry(f, k)), out);
  return out;
}

Term to_int(const Term& b) { return logic::ite(b, int_num(1), int_num(0)); }

Term op_value(const OpInstr& op, const SymbolTable& st);

Term op_truth(const OpInstr& op, const SymbolTable& st) {
  if (!is_boolean(op)) return logic::eq(op_value(op, st), int_num(1));
  auto value = [&](const Operand& o) { return classical_value(o, st); };
  auto truth = [&](const Operand& o) {
    if (auto p = std::get_if<std::shared_ptr<const OpInstr>>(&o)) return op_truth(**p, st);
    return logic::eq(value(o), int_num(1));
  };
  switch (op.op) {
    case Operator::Not: return logic::not_(truth(op.lhs));
    case Operator::And: return logic::and_(truth(op.lhs), truth(op.rhs));
    case Operator::Eq: return logic::eq(value(op.lhs), value(op.rhs));
    case Operator::Lt: return logic::lt(value(op.lhs), value(op.rhs));
    case Operator::Le: return logic::le(value(op.lhs), value(op.rhs));
    default: throw NonBooleanCondition(to_string(op));
  }
}

Term op_value(const OpInstr& op, const SymbolTable& st) {
  if (is_boolean(op)) return to_int(op_truth(op, st));
  auto value = [&](const Operand& o) { return classical_value(o, st); };
  switch (op.op) {
    case Operator::Apply: return oracle_lookup(op.oracle, value(op.lhs), st);
    case Operator::Add: return logic::add(value(op.lhs), value(op.rhs));
    case Operator::Sub: return logic::sub(value(op.lhs), value(op.rhs));
    case Operator::Mul: return logic::mul(value(op.lhs), value(op.rhs));
    case Operator::Mod: return logic::mod(value(op.lhs), value(op.rhs));
    case Operator::Index: {
      Term i = value(op.rhs);
      if (!i.is_const()) throw UnsupportedFeature("bit index must be a constant: " + to_string(op));
      return logic::mod(logic::int_div(value(op.lhs), int_num(pow2(static_cast<unsigned>(to_int64(i.value()))))),
                        int_num(2));
    }
    default: throw Error("unexpected operator in " + to_string(op));
  }
}

/// Whether storing `value` into an n-bit register needs the modulo wrap.
bool needs_wrap(const Operand& value, unsigned size, const SymbolTable& st) {
  if (std::holds_alternative<std::int64_t>(value)) {
    const auto v = std::get<std::int64_t>(value);
    return v < 0 || Rational(v) >= pow2(size);
  }
  if (auto r = std::get_if<VarRef>(&value)) {
    const SymbolDecl& d = st.at(naming::classical(r->name, st.final_classical.at(r->name)));
    return !d.upper || *d.upper > pow2(size);
  }
  const OpInstr& op = *std::get<std::shared_ptr<const OpInstr>>(value);
  if (is_boolean(op) || op.op == Operator::Index || op.op == Operator::Apply) return false;
  if (op.op == Operator::Mod && std::holds_alternative<std::int64_t>(op.rhs)) {
    const auto m = std::get<std::int64_t>(op.rhs);
    return m <= 0 || Rational(m) > pow2(size);
  }
  return true;
}

Term classical_guard(const QramProcess& proc, const SymbolTable& st) {
  std::vector<Term> parts;
  for (const auto& g : proc.gamma)
    if (!g.quantum) parts.push_back(classical_condition(g.op, st));
  return logic::and_(parts);
}

std::vector<OpInstr> quantum_controls(const QramProcess& proc) {
  std::vector<OpInstr> out;
  for (const auto& g : proc.gamma)
    if (g.quantum) out.push_back(g.op);
  return out;
}

/// guard -> lhs = rhs and, when `fallback` is given, !guard -> lhs = fallback.
void guarded_eq(ObligationSet& out, const Term& guard, const Term& lhs, const Term& rhs,
                const std::optional<Term>& fallback) {
  if (guard.is_true()) {
    out.add(logic::eq(lhs, rhs));
    return;
  }
  out.add(logic::implies(guard, logic::eq(lhs, rhs)));
  if (fallback) out.add(logic::implies(logic::not_(guard), logic::eq(lhs, *fallback)));
}

void gen_cset(const CSet& c, const QramProcess& proc, SymbolTable& st, ObligationSet& out) {
  for (const auto& g : proc.gamma)
    if (g.quantum) throw MixedConditionError("classical assignment to " + c.var + " under a quantum condition");
  const Term guard = classical_guard(proc, st);
  Term value = classical_value(c.value, st);
  if (c.bounded && needs_wrap(c.value, c.size, st)) value = logic::mod(value, int_num(pow2(c.size)));

  std::optional<Term> old;
  if (auto it = st.final_classical.find(c.var); it != st.final_classical.end())
    old = st.term(naming::classical(c.var, it->second));
  if (!guard.is_true() && !old)
    throw LoweringError("conditional declaration of " + c.var + " has no previous value");

  const std::int64_t w = proc.mem_c.at(c.var).ver;
  const std::string name = naming::classical(c.var, w);
  st.declare({name, logic::Sort::Int, SymbolDecl::Role::Classical, c.bounded ? std::optional<Rational>(0) : std::nullopt,
              upper_for(c.size, c.bounded)});
  st.final_classical[c.var] = w;
  st.classical_sizes[c.var] = c.size;
  guarded_eq(out, guard, st.term(name), value, old);
}

void gen_qinit(const QInit& q, const QramProcess& proc, SymbolTable& st, ObligationSet& out) {
  const Generation* prev = live(st);
  const QubitLayout layout = prev ? prev->layout.with(q.var, q.size) : QubitLayout({{q.var, q.size}});
  check_layout(layout, proc.mem_q);
  const std::int64_t prev_index = prev ? prev->index : -1;
  const std::vector<std::array<bool, 4>> prev_zero = prev ? prev->zero_parts : std::vector<std::array<bool, 4>>{};
  Generation& g = push_generation(st, layout, proc.mem_q);
  for (std::uint64_t k = 0; k < g.layout.dim(); ++k) {
    const std::uint64_t low = k & ((std::uint64_t{1} << q.size) - 1);
    const std::uint64_t high = k >> q.size;
    for (AmpPart p : kParts) {
      const int pi = static_cast<int>(p);
      Term rhs = real_num(0);
      bool zero = true;
      if (low == q.value) {
        if (prev_index < 0) {
          if (p == AmpPart::ReA) {
            rhs = real_num(1);
            zero = false;
          }
        } else if (!prev_zero[high][pi]) {
          rhs = amp(prev_index, high, p);
          zero = false;
        }
      }
      g.zero_parts[k][pi] = zero;
      out.add(logic::eq(amp(g.index, k, p), rhs));
    }
  }
}

/// ite tree over the 0/1 symbols in `syms`; `leaf` receives the assignment.
template <class Leaf>
Term branch(const std::vector<std::string>& syms, std::size_t pos, std::map<std::string, int>& assignment,
            const SymbolTable& st, const Leaf& leaf) {
  if (pos == syms.size()) return leaf(assignment);
  assignment[syms[pos]] = 1;
  Term one = branch(syms, pos + 1, assignment, st, leaf);
  assignment[syms[pos]] = 0;
  Term zero = branch(syms, pos + 1, assignment, st, leaf);
  assignment.erase(syms[pos]);
  if (one == zero) return one;
  return logic::ite(logic::eq(st.term(syms[pos]), int_num(1)), one, zero);
}

void gen_qop(const QOp& q, const QramProcess& proc, SymbolTable& st, ObligationSet& out) {
  const Generation* prev = live(st);
  if (!prev) throw LayoutMismatch("gate on " + q.var + " with no live quantum state");
  check_layout(prev->layout, proc.mem_q);
  if (!prev->layout.contains(q.var)) throw LayoutMismatch(q.var + " is not in the quantum state");
  if (q.u.dim() != (std::uint64_t{1} << prev->layout.size_of(q.var)))
    throw DimensionMismatch("operator of dimension " + std::to_string(q.u.dim()) + " on " + q.var);

  const auto controls = quantum_controls(proc);
  if (!q.u.is_scalar_identity()) {
    for (const auto& c : controls) {
      std::set<std::string> vars;
      free_variables(c, vars);
      if (vars.count(q.var)) throw ControlOnTarget("operation on " + q.var + " is controlled by " + to_string(c));
    }
  }

  const auto wires = prev->layout.wires(q.var);
  const unsigned total = prev->layout.total_qubits();
  SymbolicMatrix cu = embed(q.u, wires, total);
  if (!controls.empty()) {
    const auto b = control_diag(controls, prev->layout);
    cu = controlled_u(cu, b);
  }

  const Term guard = classical_guard(proc, st);
  const QubitLayout layout = prev->layout;
  const std::int64_t prev_index = prev->index;
  const auto prev_zero = prev->zero_parts;
  Generation& g = push_generation(st, layout, proc.mem_q);

  for (std::uint64_t i = 0; i < layout.dim(); ++i) {
    std::set<std::string> symset;
    std::vector<std::uint64_t> cols;
    for (std::uint64_t j = 0; j < layout.dim(); ++j) {
      const Scalar& c = cu.at(i, j);
      if (c.is_zero()) continue;
      cols.push_back(j);
      for (const auto& s : c.symbols()) symset.insert(s);
    }
    const std::vector<std::string> syms(symset.begin(), symset.end());
    bool zero[4] = {true, true, true, true};
    Term rhs[4];
    for (AmpPart p : kParts) {
      const int pi = static_cast<int>(p);
      std::map<std::string, int> assignment;
      rhs[pi] = branch(syms, 0, assignment, st, [&](const std::map<std::string, int>& a) {
        AmpAccumulator acc;
        for (std::uint64_t j : cols) {
          const Scalar& c = cu.at(i, j);
          acc.add(c.re.evaluate(a), c.im.evaluate(a), prev_index, j, prev_zero[j]);
        }
        if (!acc.parts[pi].empty()) zero[pi] = false;
        return acc.parts[pi].term();
      });
    }
    for (AmpPart p : kParts) {
      const int pi = static_cast<int>(p);
      const Term lhs = amp(g.index, i, p);
      const bool copy_zero = prev_zero[i][pi];
      g.zero_parts[i][pi] = zero[pi] && (guard.is_true() || copy_zero);
      guarded_eq(out, guard, lhs, rhs[pi], copy_zero ? real_num(0) : amp(prev_index, i, p));
    }
  }
}

void gen_return(const Return& r, SymbolTable& st) {
  st.returned = current_classical(r.var, st);
  st.returned_var = r.var;
}

}  // namespace

Term classical_value(const Operand& operand, const SymbolTable& st) {
  if (auto v = std::get_if<std::int64_t>(&operand)) return int_num(Rational(*v));
  if (auto r = std::get_if<VarRef>(&operand)) return current_classical(r->name, st);
  return op_value(*std::get<std::shared_ptr<const OpInstr>>(operand), st);
}

Term classical_condition(const OpInstr& op, const SymbolTable& st) { return op_truth(op, st); }

ObligationSet gen_measurement(const std::string& x, SymbolTable& st, const FlagSpec& flag) {
  ObligationSet out{Group::Prog, {}, {}};
  const Generation* prev = live(st);
  if (!prev || !prev->layout.contains(x)) throw AbsentVariable("measured variable " + x + " is not in the quantum state");
  const QubitLayout old_layout = prev->layout;
  const std::int64_t old_index = prev->index;
  const auto old_zero = prev->zero_parts;
  const auto old_versions = prev->versions;
  const std::int64_t version = prev->versions.count(x) ? prev->versions.at(x) : 0;
  const unsigned size = old_layout.size_of(x);
  const std::uint64_t outcomes = std::uint64_t{1} << size;
  const Term r2 = invsqrt2(st);

  // Probabilities.
  std::vector<Term> pr(outcomes);
  std::vector<std::vector<Term>> squares(outcomes);
  for (std::uint64_t k = 0; k < old_layout.dim(); ++k) {
    const std::uint64_t i = old_layout.value_of(k, x);
    for (auto [pa, pb] : {std::pair{AmpPart::ReA, AmpPart::ReB}, std::pair{AmpPart::ImA, AmpPart::ImB}}) {
      const bool za = old_zero[k][static_cast<int>(pa)];
      const bool zb = old_zero[k][static_cast<int>(pb)];
      const Term a = amp(old_index, k, pa);
      const Term b = amp(old_index, k, pb);
      if (!za) squares[i].push_back(logic::mul(a, a));
      if (!zb) squares[i].push_back(logic::mul({real_num(2), b, b}));
      if (!za && !zb) squares[i].push_back(logic::mul({real_num(4), r2, a, b}));
    }
  }
  std::vector<Term> total;
  for (std::uint64_t i = 0; i < outcomes; ++i) {
    const std::string name = naming::probability(x, version, i);
    st.declare({name, logic::Sort::Real, SymbolDecl::Role::Probability, std::nullopt, std::nullopt});
    pr[i] = st.term(name);
    out.add(logic::le(real_num(0), pr[i]));
    out.add(logic::le(pr[i], real_num(1)));
    out.add(logic::eq(pr[i], squares[i].empty() ? real_num(0) : logic::add(squares[i])));
    total.push_back(pr[i]);
  }
  out.add(logic::eq(logic::add(total), real_num(1)));

  // Admissible outcomes.
  std::size_t occurrence = 0;
  for (const auto& m : st.measurements()) occurrence += m.quantum_var == x;
  const std::string meas_name = naming::measured(x, occurrence);
  st.declare({meas_name, logic::Sort::Int, SymbolDecl::Role::Measured, Rational(0), Rational(BigInt(outcomes))});
  const Term meas = st.term(meas_name);
  for (std::uint64_t i = 0; i < outcomes; ++i) {
    Term ok;
    switch (flag.kind) {
      case FlagSpec::Kind::Rand: ok = logic::gt(pr[i], real_num(0)); break;
      case FlagSpec::Kind::Cert: ok = logic::eq(pr[i], real_num(1)); break;
      case FlagSpec::Kind::Whp: ok = logic::ge(pr[i], real_num(flag.threshold)); break;
    }
    out.add(logic::implies(logic::eq(meas, int_num(Rational(BigInt(i)))), ok));
  }

  MeasurementRecord rec;
  rec.quantum_var = x;
  rec.version = version;
  rec.size = size;
  rec.generation = old_index;

  // Post-measurement state.
  const QubitLayout layout = old_layout.without(x);
  if (layout.empty()) {
    st.live_generation.reset();
  } else {
    std::vector<Term> witness(outcomes);
    for (std::uint64_t i = 0; i < outcomes; ++i) {
      const std::string name = naming::sqrt_witness(x, version, i);
      st.declare({name, logic::Sort::Real, SymbolDecl::Role::SqrtWitness, std::nullopt, std::nullopt});
      witness[i] = st.term(name);
      out.add(logic::le(real_num(0), witness[i]));
      out.add(logic::eq(logic::mul(witness[i], witness[i]), pr[i]));
    }
    Memory mem{MemoryTag::Quantum};
    for (const auto& e : layout.entries()) mem = mem_amend(mem, e.name, e.size);
    Generation& g = push_generation(st, layout, mem);
    g.versions = old_versions;
    g.versions.erase(x);
    // Residual indices that some outcome can reach with a nonzero part.
    std::vector<std::array<bool, 4>> reach(layout.dim(), {true, true, true, true});
    std::vector<std::pair<std::uint64_t, std::uint64_t>> split(old_layout.dim());
    for (std::uint64_t k = 0; k < old_layout.dim(); ++k) {
      std::uint64_t j = 0;
      for (const auto& e : layout.entries()) j |= old_layout.value_of(k, e.name) << layout.offset(e.name);
      split[k] = {old_layout.value_of(k, x), j};
      for (auto [pa, pb] : {std::pair{AmpPart::ReA, AmpPart::ReB}, std::pair{AmpPart::ImA, AmpPart::ImB}}) {
        const int ai = static_cast<int>(pa);
        if (!old_zero[k][ai] || !old_zero[k][static_cast<int>(pb)]) reach[j][ai] = false;
      }
    }
    for (std::uint64_t j = 0; j < layout.dim(); ++j) {
      g.zero_parts[j] = {reach[j][0], true, reach[j][2], true};
      out.add(logic::eq(amp(g.index, j, AmpPart::ReB), real_num(0)));
      out.add(logic::eq(amp(g.index, j, AmpPart::ImB), real_num(0)));
    }
    for (std::uint64_t k = 0; k < old_layout.dim(); ++k) {
      const auto [i, j] = split[k];
      for (auto [pa, pb] : {std::pair{AmpPart::ReA, AmpPart::ReB}, std::pair{AmpPart::ImA, AmpPart::ImB}}) {
        const int ai = static_cast<int>(pa);
        const int bi = static_cast<int>(pb);
        std::vector<Term> value;
        if (!old_zero[k][ai]) value.push_back(amp(old_index, k, pa));
        if (!old_zero[k][bi]) value.push_back(logic::mul({real_num(2), r2, amp(old_index, k, pb)}));
        const Term rhs = value.empty() ? real_num(0) : logic::add(value);
        if (g.zero_parts[j][ai]) continue;
        out.add(logic::implies(logic::eq(meas, int_num(Rational(BigInt(i)))),
                               logic::eq(logic::mul(witness[i], amp(g.index, j, pa)), rhs)));
      }
    }
    for (std::uint64_t j = 0; j < layout.dim(); ++j)
      for (AmpPart p : {AmpPart::ReA, AmpPart::ImA})
        if (g.zero_parts[j][static_cast<int>(p)]) out.add(logic::eq(amp(g.index, j, p), real_num(0)));
  }
  st.measurements().push_back(rec);
  return out;
}

ObligationSet gen_process(const QramProcess& proc, SymbolTable& st, const FlagSpec& flag) {
  ObligationSet out{Group::Prog, {}, {}};
  if (auto m = std::get_if<QMeas>(&proc.q)) {
    if (!proc.gamma.empty()) throw LoweringError("measurement of " + m->var + " under a condition");
    auto meas_result = gen_measurement(m->var, st, flag);
    out.append(meas_result);
    const auto* cm = std::get_if<CMeas>(&proc.c);
    if (!cm) throw LoweringError("QMEAS of " + m->var + " without CMEAS");
    MeasurementRecord& rec = st.measurements().back();
    const unsigned size = rec.size;
    const std::int64_t w = proc.mem_c.at(cm->var).ver;
    const std::string name = naming::classical(cm->var, w);
    st.declare({name, logic::Sort::Int, SymbolDecl::Role::Classical, Rational(0), pow2(size)});
    st.final_classical[cm->var] = w;
    st.classical_sizes[cm->var] = size;
    rec.classical_var = cm->var;
    rec.classical_version = w;
    std::size_t occurrence = st.measurements().size() - 1;
    std::size_t k = 0;
    for (std::size_t n = 0; n < occurrence; ++n) k += st.measurements()[n].quantum_var == m->var;
    out.add(logic::eq(st.term(name), st.term(naming::measured(m->var, k))));
    if (st.live_generation) check_layout(st.generations()[*st.live_generation].layout, proc.mem_q);
    return out;
  }
  if (std::holds_alternative<CMeas>(proc.c)) throw LoweringError("CMEAS without QMEAS");

  if (auto qi = std::get_if<QInit>(&proc.q)) gen_qinit(*qi, proc, st, out);
  else if (auto qo = std::get_if<QOp>(&proc.q)) gen_qop(*qo, proc, st, out);

  if (auto cs = std::get_if<CSet>(&proc.c)) gen_cset(*cs, proc, st, out);
  else if (auto r = std::get_if<Return>(&proc.c)) gen_return(*r, st);
  return out;
}

ProgramObligations gen_program(const QramProgram& p, const FlagSpec& flag) {
  ProgramObligations out;
  SymbolTable& st = out.symbols;
  for (const auto& o : p.oracles) st.declare_oracle(o.name, o.arg_bits);
  for (const auto& in : p.inputs) {
    const std::int64_t w = p.initial_c.contains(in.name) ? p.initial_c.at(in.name).ver : 0;
    st.declare({naming::classical(in.name, w), logic::Sort::Int, SymbolDecl::Role::Classical, Rational(0),
                pow2(in.size)});
    st.final_classical[in.name] = w;
    st.classical_sizes[in.name] = in.size;
  }
  for (const auto& proc : p.processes) out.prog.append(gen_process(proc, st, flag));
  out.ret = st.returned;
  return out;
}

}  // namespace qramverify
