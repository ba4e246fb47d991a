#include "qramverify/sim_oracle.hpp"

#include <cmath>
#include <functional>
#include <set>

#include "qramverify/errors.hpp"

namespace qramverify {

namespace {

constexpr double kPrune = 1e-12;
constexpr std::int64_t kNatLimit = 64;
constexpr unsigned kMaxOracleBits = 3;
constexpr unsigned kMaxEnumeratedBits = 12;

std::int64_t floor_mod(std::int64_t a, std::int64_t m) {
  if (m == 0) throw Error("modulo by zero");
  const std::int64_t r = a % m;
  return r < 0 ? r + (m < 0 ? -m : m) : r;
}

/// Operand values against one basis state and the classical environment.
class Evaluator {
 public:
  Evaluator(const ClassicalEnv& env, const OracleTables& tables, const QubitLayout* layout = nullptr,
            std::uint64_t basis = 0)
      : env_(env), tables_(tables), layout_(layout), basis_(basis) {}

  std::int64_t value(const Operand& o) const {
    if (auto c = std::get_if<std::int64_t>(&o)) return *c;
    if (auto v = std::get_if<VarRef>(&o)) {
      if (layout_ && layout_->contains(v->name)) return static_cast<std::int64_t>(layout_->value_of(basis_, v->name));
      auto it = env_.find(v->name);
      if (it == env_.end()) throw AbsentVariable("no value for " + v->name);
      return it->second;
    }
    return value(*std::get<std::shared_ptr<const OpInstr>>(o));
  }

  std::int64_t value(const OpInstr& op) const {
    const std::int64_t a = value(op.lhs);
    switch (op.op) {
      case Operator::Not: return a == 0 ? 1 : 0;
      case Operator::Apply: {
        auto it = tables_.find(op.oracle);
        if (it == tables_.end()) throw UnboundOracle("no table for oracle " + op.oracle);
        if (a < 0 || static_cast<std::size_t>(a) >= it->second.size())
          throw Error("oracle " + op.oracle + " applied outside its domain");
        return it->second[static_cast<std::size_t>(a)];
      }
      default: break;
    }
    const std::int64_t b = value(op.rhs);
    switch (op.op) {
      case Operator::And: return (a != 0 && b != 0) ? 1 : 0;
      case Operator::Eq: return a == b ? 1 : 0;
      case Operator::Lt: return a < b ? 1 : 0;
      case Operator::Le: return a <= b ? 1 : 0;
      case Operator::Add: return a + b;
      case Operator::Sub: return a - b;
      case Operator::Mul: return a * b;
      case Operator::Mod: return floor_mod(a, b);
      case Operator::Index: return (a >> b) & 1;
      default: throw Error("unexpected operator " + std::string(operator_text(op.op)));
    }
  }

 private:
  const ClassicalEnv& env_;
  const OracleTables& tables_;
  const QubitLayout* layout_;
  std::uint64_t basis_;
};

using Matrix = std::vector<std::complex<double>>;

Matrix concrete(const SymbolicMatrix& u) {
  Matrix m(u.dim() * u.dim());
  for (std::size_t i = 0; i < u.dim(); ++i)
    for (std::size_t j = 0; j < u.dim(); ++j) {
      if (!u.at(i, j).is_constant()) throw Error("operator " + u.label() + " is not concrete");
      m[i * u.dim() + j] = u.at(i, j).to_complex();
    }
  return m;
}

class Simulator {
 public:
  Simulator(const QramProgram& p, const OracleTables& tables) : p_(p), tables_(tables) {}

  std::vector<SimBranch> run(const ClassicalEnv& inputs) {
    SimBranch start;
    start.final_state.env = inputs;
    std::vector<SimBranch> out;
    step(0, std::move(start), out);
    return out;
  }

 private:
  void step(std::size_t pc, SimBranch b, std::vector<SimBranch>& out) {
    for (; pc < p_.processes.size(); ++pc) {
      const QramProcess& proc = p_.processes[pc];
      if (auto m = std::get_if<QMeas>(&proc.q)) {
        measure(pc, *m, std::get<CMeas>(proc.c), std::move(b), out);
        return;
      }
      const bool enabled = classical_guard(proc, b.final_state);
      if (enabled) {
        if (auto qi = std::get_if<QInit>(&proc.q)) init(*qi, b.final_state);
        else if (auto qo = std::get_if<QOp>(&proc.q)) apply(*qo, proc, b.final_state);
      }
      if (auto cs = std::get_if<CSet>(&proc.c)) {
        if (enabled) {
          std::int64_t v = Evaluator(b.final_state.env, tables_).value(cs->value);
          if (cs->bounded) v = floor_mod(v, std::int64_t{1} << cs->size);
          b.final_state.env[cs->var] = v;
        }
      } else if (auto r = std::get_if<Return>(&proc.c)) {
        auto it = b.final_state.env.find(r->var);
        if (it == b.final_state.env.end()) throw AbsentVariable("returned variable " + r->var + " has no value");
        b.returned = it->second;
      }
    }
    out.push_back(std::move(b));
  }

  bool classical_guard(const QramProcess& proc, const SimState& s) const {
    for (const auto& g : proc.gamma)
      if (!g.quantum && Evaluator(s.env, tables_).value(g.op) == 0) return false;
    return true;
  }

  static void init(const QInit& q, SimState& s) {
    if (s.layout.empty()) {
      s.layout = QubitLayout({{q.var, q.size}});
      s.amplitudes.assign(std::size_t{1} << q.size, 0.0);
      s.amplitudes[q.value] = 1.0;
      return;
    }
    const std::size_t block = std::size_t{1} << q.size;
    std::vector<std::complex<double>> next(s.amplitudes.size() * block, 0.0);
    for (std::size_t k = 0; k < s.amplitudes.size(); ++k) next[k * block + q.value] = s.amplitudes[k];
    s.layout = s.layout.with(q.var, q.size);
    s.amplitudes = std::move(next);
  }

  bool quantum_guard(const QramProcess& proc, const SimState& s, std::uint64_t index) const {
    for (const auto& g : proc.gamma)
      if (g.quantum && Evaluator(s.env, tables_, &s.layout, index).value(g.op) == 0) return false;
    return true;
  }

  static bool reads_target(const QOp& q, const QramProcess& proc) {
    std::set<std::string> vars;
    for (const auto& g : proc.gamma)
      if (g.quantum) free_variables(g.op, vars);
    return vars.count(q.var) != 0;
  }

  void apply(const QOp& q, const QramProcess& proc, SimState& s) const {
    const Matrix u = concrete(q.u);
    const std::size_t d = q.u.dim();
    const unsigned off = s.layout.offset(q.var);
    const std::uint64_t mask = ((std::uint64_t{1} << s.layout.size_of(q.var)) - 1) << off;
    std::vector<std::complex<double>> next = s.amplitudes;
    if (reads_target(q, proc)) {
      // Only a scalar U may be controlled by its own register: decide per basis state.
      if (!q.u.is_scalar_identity()) throw ControlOnTarget("control reads the target register " + q.var);
      for (std::uint64_t k = 0; k < s.amplitudes.size(); ++k)
        if (quantum_guard(proc, s, k)) next[k] = u[0] * s.amplitudes[k];
      s.amplitudes = std::move(next);
      return;
    }
    for (std::uint64_t base = 0; base < s.amplitudes.size(); ++base) {
      if (base & mask) continue;
      if (!quantum_guard(proc, s, base)) continue;
      for (std::size_t i = 0; i < d; ++i) {
        std::complex<double> acc = 0;
        for (std::size_t j = 0; j < d; ++j) acc += u[i * d + j] * s.amplitudes[base | (j << off)];
        next[base | (i << off)] = acc;
      }
    }
    s.amplitudes = std::move(next);
  }

  void measure(std::size_t pc, const QMeas& m, const CMeas& c, SimBranch b, std::vector<SimBranch>& out) {
    const SimState& s = b.final_state;
    const unsigned size = s.layout.size_of(m.var);
    const QubitLayout rest = s.layout.without(m.var);
    for (std::uint64_t outcome = 0; outcome < (std::uint64_t{1} << size); ++outcome) {
      double p = 0;
      for (std::uint64_t k = 0; k < s.amplitudes.size(); ++k)
        if (s.layout.value_of(k, m.var) == outcome) p += std::norm(s.amplitudes[k]);
      if (p < kPrune) continue;
      SimBranch next = b;
      SimState& ns = next.final_state;
      ns.layout = rest;
      if (rest.empty()) {
        ns.amplitudes.clear();
      } else {
        ns.amplitudes.assign(rest.dim(), 0.0);
        const double norm = std::sqrt(p);
        for (std::uint64_t k = 0; k < s.amplitudes.size(); ++k) {
          if (s.layout.value_of(k, m.var) != outcome) continue;
          std::uint64_t j = 0;
          for (const auto& e : rest.entries()) j |= s.layout.value_of(k, e.name) << rest.offset(e.name);
          ns.amplitudes[j] = s.amplitudes[k] / norm;
        }
      }
      ns.env[c.var] = static_cast<std::int64_t>(outcome);
      next.probability *= p;
      next.outcomes.push_back({m.var, outcome, p});
      step(pc + 1, std::move(next), out);
    }
  }

  const QramProgram& p_;
  const OracleTables& tables_;
};

std::vector<std::int64_t> domain_of(const SpeqType& t, const std::string& name) {
  std::int64_t n;
  if (t.kind == SpeqType::Kind::Nat) {
    n = kNatLimit + 1;
  } else {
    if (t.bits > kMaxEnumeratedBits) throw DomainTooLarge(name + " has " + std::to_string(t.bits) + " bits");
    n = std::int64_t{1} << t.bits;
  }
  std::vector<std::int64_t> out(static_cast<std::size_t>(n));
  for (std::int64_t v = 0; v < n; ++v) out[static_cast<std::size_t>(v)] = v;
  return out;
}

/// Calls `body` with every combination of choices[i] values.
void free_names_of(const SpeqExpr& e, std::set<std::string>& bound, std::set<std::string>& out) {
  if (e.kind == SpeqExpr::Kind::Var && !bound.count(e.name)) out.insert(e.name);
  const bool binds = e.kind == SpeqExpr::Kind::Sum || e.kind == SpeqExpr::Kind::Forall || e.kind == SpeqExpr::Kind::Exists;
  const bool fresh = binds && bound.insert(e.name).second;
  for (const auto& a : e.args) free_names_of(a, bound, out);
  if (fresh) bound.erase(e.name);
}

template <class T>
void cartesian(const std::vector<std::vector<T>>& choices, std::vector<T>& current, std::size_t i,
               const std::function<void(const std::vector<T>&)>& body) {
  if (i == choices.size()) {
    body(current);
    return;
  }
  for (const auto& c : choices[i]) {
    current[i] = c;
    cartesian(choices, current, i + 1, body);
  }
}

}  // namespace

std::vector<SimBranch> run_all_branches(const QramProgram& p, const OracleTables& tables, const ClassicalEnv& inputs) {
  for (const auto& o : p.oracles) {
    auto it = tables.find(o.name);
    if (it == tables.end()) throw UnboundOracle("no table for oracle " + o.name);
    if (it->second.size() != (std::size_t{1} << o.arg_bits))
      throw UnboundOracle("table for " + o.name + " has " + std::to_string(it->second.size()) + " entries");
  }
  ClassicalEnv env = inputs;
  for (const auto& in : p.inputs)
    if (!env.count(in.name)) throw AbsentVariable("no value for input " + in.name);
  return Simulator(p, tables).run(env);
}

bool branch_admissible(const SimBranch& b, const FlagSpec& flag, double slack) {
  for (const auto& o : b.outcomes)
    if (!admissible(flag, o.probability, slack)) return false;
  return true;
}

std::vector<std::vector<int>> all_tables(unsigned bits) {
  const std::size_t n = std::size_t{1} << bits;
  std::vector<std::vector<int>> out;
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << n); ++code) {
    std::vector<int> t(n);
    for (std::size_t v = 0; v < n; ++v) t[v] = static_cast<int>((code >> (n - 1 - v)) & 1);
    out.push_back(std::move(t));
  }
  return out;
}

BruteCheckResult brute_check(const QramProgram& p, const SpeqSpec& spec) {
  for (const auto& o : p.oracles)
    if (o.arg_bits > kMaxOracleBits)
      throw DomainTooLarge("oracle " + o.name + " has " + std::to_string(o.arg_bits) + " argument bits");

  // Program-side choices: one table per oracle, one value per input.
  std::vector<std::vector<std::vector<int>>> table_choices;
  for (const auto& o : p.oracles) table_choices.push_back(all_tables(o.arg_bits));
  std::vector<std::vector<std::int64_t>> input_choices;
  for (const auto& in : p.inputs) input_choices.push_back(domain_of(SpeqType::bitvec(in.size), in.name));

  // Spec-side free variables.
  std::vector<std::string> free_names;
  std::vector<std::vector<std::int64_t>> free_choices;
  std::vector<std::pair<std::string, SpeqType>> free_functions;
  std::set<std::string> used;
  for (const auto* items : {&spec.pre_items, &spec.post_items})
    for (const auto& item : *items) {
      std::set<std::string> bound;
      if (!item.is_define) free_names_of(item.expr, bound, used);
    }
  for (const auto& [name, type] : spec.defined_vars()) {
    if (type.kind != SpeqType::Kind::Function && !used.count(name)) continue;
    if (type.kind == SpeqType::Kind::Function) {
      if (type.arg->kind != SpeqType::Kind::BitVec) throw NonFiniteFunction(name);
      free_functions.emplace_back(name, type);
    } else {
      free_names.push_back(name);
      free_choices.push_back(domain_of(type, name));
    }
  }
  std::vector<std::vector<std::vector<int>>> function_choices;
  for (const auto& [name, type] : free_functions) {
    if (type.arg->bits > kMaxOracleBits || !(*type.result == SpeqType::bitvec(1)))
      throw DomainTooLarge("spec function " + name + " is too large to enumerate");
    function_choices.push_back(all_tables(type.arg->bits));
  }

  const auto pre = spec.pre();
  const auto post = spec.post();
  const std::optional<BigInt> ret_bound =
      spec.ret_type.kind == SpeqType::Kind::BitVec ? std::optional<BigInt>(BigInt(1) << spec.ret_type.bits) : std::nullopt;

  BruteCheckResult result;
  std::vector<std::vector<int>> table_pick(table_choices.size());
  cartesian<std::vector<int>>(table_choices, table_pick, 0, [&](const std::vector<std::vector<int>>& picked_tables) {
    if (result.violation) return;
    OracleTables tables;
    for (std::size_t k = 0; k < p.oracles.size(); ++k) tables[p.oracles[k].name] = picked_tables[k];
    std::vector<std::int64_t> input_pick(input_choices.size());
    cartesian<std::int64_t>(input_choices, input_pick, 0, [&](const std::vector<std::int64_t>& picked_inputs) {
      if (result.violation) return;
      ClassicalEnv inputs;
      for (std::size_t k = 0; k < p.inputs.size(); ++k) inputs[p.inputs[k].name] = picked_inputs[k];
      std::vector<SimBranch> branches;
      for (auto& b : run_all_branches(p, tables, inputs))
        if (branch_admissible(b, spec.flag)) branches.push_back(std::move(b));

      SpeqEnv env;
      for (const auto& [name, table] : tables) env.tables[name] = std::vector<BigInt>(table.begin(), table.end());
      for (const auto& [name, v] : inputs) env.values[name] = v;

      std::vector<std::vector<int>> fn_pick(function_choices.size());
      cartesian<std::vector<int>>(function_choices, fn_pick, 0, [&](const std::vector<std::vector<int>>& fns) {
        if (result.violation) return;
        for (std::size_t k = 0; k < fns.size(); ++k)
          env.tables[free_functions[k].first] = std::vector<BigInt>(fns[k].begin(), fns[k].end());
        std::vector<std::int64_t> free_pick(free_choices.size());
        cartesian<std::int64_t>(free_choices, free_pick, 0, [&](const std::vector<std::int64_t>& values) {
          if (result.violation) return;
          ++result.cases;
          for (std::size_t k = 0; k < values.size(); ++k) env.values[free_names[k]] = values[k];
          env.values.erase(spec.ret_name);
          for (const auto& e : pre)
            if (!evaluate_logic(e, spec, env)) return;
          if (!branches.empty()) result.satisfiable = true;
          for (const auto& b : branches) {
            if (!b.returned) throw NoClassicalReturn("branch ended without RETURN");
            env.values[spec.ret_name] = *b.returned;
            bool ok = *b.returned >= 0 && (!ret_bound || BigInt(*b.returned) < *ret_bound);
            for (const auto& e : post) ok = ok && evaluate_logic(e, spec, env);
            if (!ok) {
              result.holds = false;
              ClassicalEnv spec_values;
              for (std::size_t k = 0; k < values.size(); ++k) spec_values[free_names[k]] = values[k];
              result.violation = BruteCheckResult::Witness{tables, inputs, spec_values, b};
              return;
            }
          }
        });
      });
    });
  });
  return result;
}

}  // namespace qramverify
