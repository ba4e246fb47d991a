#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <random>

#include "qramverify/errors.hpp"
#include "qramverify/naming.hpp"
#include "qramverify/obligation_gen.hpp"
#include "qramverify/pipeline.hpp"
#include "qramverify/sim_oracle.hpp"
#include "support.hpp"

using namespace qramverify;
using logic::Sort;
using logic::Term;
using cd = std::complex<double>;

namespace {

QramProgram lower_source(const std::string& src) {
  const SilqAst ast = load_program(src);
  return lower_function(ast, ast.functions.at(0).name);
}

QramProgram lower_corpus(const std::string& file) { return lower_source(qv_test::corpus(file)); }

SilqAst prefix_ast(const std::string& file) {
  SilqAst ast = load_program(qv_test::corpus(file));
  auto& body = ast.functions[0].body;
  body.erase(std::find_if(body.begin(), body.end(),
                          [](const Stmt& s) { return s.kind == Stmt::Kind::Measure || s.kind == Stmt::Kind::Return; }),
             body.end());
  return ast;
}

std::vector<std::string> small_programs() {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(qv_test::corpus_dir())) {
    if (e.path().extension() != ".slq") continue;
    const std::string name = e.path().filename().string();
    if (name == "dj4.slq" || name == "dj5.slq" || name == "bv4.slq" || name == "ghz5.slq") continue;
    out.push_back(name);
  }
  std::sort(out.begin(), out.end());
  return out;
}

SatResult solve(const ObligationSet& prog, const SymbolTable& st, std::vector<Term> extra) {
  ObligationSet pre{Group::Pre, std::move(extra), {}};
  EmitOptions o;
  o.negate_post = false;
  return run_solver(emit_smt(prog, pre, ObligationSet{Group::Post, {}, {}}, st, o), qv_test::solver_config()).result;
}

// True when prog entails `goal` (prog ∧ ¬goal is unsatisfiable).
bool entails(const ObligationSet& prog, const SymbolTable& st, const Term& goal) {
  return solve(prog, st, {logic::not_(goal)}) == SatResult::Unsat;
}

Term t(const SymbolTable& st, const std::string& name) { return st.term(name); }
Term iconst(int v) { return logic::int_const(v); }
Term rconst(const Rational& v) { return logic::real_const(v); }

// Values forced by the prog equations, in order: `v = e` and `g => v = e`.
std::map<std::string, Rational> forward_evaluate(const ObligationSet& prog, std::map<std::string, Rational> env) {
  for (const Term& a : prog.assertions) {
    Term eq = a;
    if (a.op() == logic::Op::Implies) {
      if (!logic::evaluate_bool(a.args()[0], env)) continue;
      eq = a.args()[1];
    }
    if (eq.op() != logic::Op::Eq || eq.args()[0].op() != logic::Op::Var) continue;
    const std::string& name = eq.args()[0].name();
    if (env.count(name)) continue;
    env[name] = logic::evaluate_number(eq.args()[1], env);
  }
  return env;
}

double pair_value(const Rational& a, const Rational& b) { return to_double(a) + to_double(b) * std::sqrt(2.0); }

// One state step: random values on the parts of `before` not known to vanish,
// then the values of `after` forced by the equations mentioning it.
std::pair<std::vector<cd>, std::vector<cd>> step(const ProgramObligations& ob, const Generation& before,
                                                 const Generation& after, std::mt19937& rng) {
  using naming::AmpPart;
  std::uniform_int_distribution<int> d(-9, 9);
  std::map<std::string, Rational> env;
  std::vector<cd> in;
  for (std::uint64_t i = 0; i < before.layout.dim(); ++i) {
    Rational v[4];
    for (int k = 0; k < 4; ++k) {
      v[k] = before.zero_parts[i][k] ? Rational(0) : Rational(d(rng));
      env[naming::amplitude(before.index, i, static_cast<AmpPart>(k))] = v[k];
    }
    in.emplace_back(pair_value(v[0], v[1]), pair_value(v[2], v[3]));
  }
  const std::string prefix = "sv" + std::to_string(after.index) + "_";
  ObligationSet eqs{Group::Prog, {}, {}};
  for (const auto& a : ob.prog.assertions) {
    std::set<std::string> vars;
    logic::collect_vars(a, vars);
    if (std::any_of(vars.begin(), vars.end(), [&](const std::string& v) { return v.rfind(prefix, 0) == 0; }))
      eqs.add(a);
  }
  const auto vals = forward_evaluate(eqs, env);
  std::vector<cd> out;
  for (std::uint64_t i = 0; i < after.layout.dim(); ++i) {
    const auto part = [&](AmpPart k) {
      const auto it = vals.find(naming::amplitude(after.index, i, k));
      return it == vals.end() ? Rational(0) : it->second;
    };
    out.emplace_back(pair_value(part(AmpPart::ReA), part(AmpPart::ReB)),
                     pair_value(part(AmpPart::ImA), part(AmpPart::ImB)));
  }
  return {in, out};
}

bool has_mul_over(const Term& t, const std::string& prefix) {
  if (t.op() == logic::Op::Mul) {
    for (const auto& a : t.args()) {
      std::set<std::string> vars;
      logic::collect_vars(a, vars);
      for (const auto& v : vars)
        if (v.rfind(prefix, 0) == 0) return true;
    }
  }
  for (const auto& a : t.args())
    if (has_mul_over(a, prefix)) return true;
  return false;
}

Term norm_of(const SymbolTable& st, const Generation& g) {
  std::vector<Term> terms;
  const Term inv = st.term(naming::kInvSqrt2);
  for (std::uint64_t i = 0; i < g.layout.dim(); ++i)
    for (auto [pa, pb] : {std::pair{naming::AmpPart::ReA, naming::AmpPart::ReB},
                          std::pair{naming::AmpPart::ImA, naming::AmpPart::ImB}}) {
      const Term a = st.term(naming::amplitude(g.index, i, pa));
      const Term b = st.term(naming::amplitude(g.index, i, pb));
      terms.push_back(logic::mul(a, a));
      terms.push_back(logic::mul({rconst(2), b, b}));
      terms.push_back(logic::mul({rconst(4), inv, a, b}));
    }
  return logic::add(terms);
}

}  // namespace

TEST(ObligationGen, GhzManifest) {
  const ProgramObligations ob = gen_program(lower_corpus("ghz2.slq"), FlagSpec::whp(Rational(1, 2)));
  EXPECT_EQ(ob.symbols.generations().size(), 6U);
  ASSERT_EQ(ob.symbols.measurements().size(), 2U);
  EXPECT_EQ(ob.symbols.measurements()[0].quantum_var, "y");
  EXPECT_EQ(ob.symbols.measurements()[1].quantum_var, "x");
  ASSERT_TRUE(ob.ret);
  EXPECT_EQ(logic::to_smt(*ob.ret), "y_v0");
  EXPECT_TRUE(std::find(ob.prog.assertions.begin(), ob.prog.assertions.end(),
                        logic::eq(ob.symbols.term("y_v0"), ob.symbols.term("meas_y"))) != ob.prog.assertions.end());
  EXPECT_EQ(ob.symbols.generations()[1].register_label(), "qxv0|qyv0");
}

TEST(ObligationGen, EmptyProgram) {
  const ProgramObligations ob = gen_program(lower_source("def f(){ }"), FlagSpec::rand());
  EXPECT_TRUE(ob.prog.empty());
  EXPECT_FALSE(ob.ret);
}

TEST(ObligationGen, DeutschJozsaTableSymbolsAreLinear) {
  const ProgramObligations ob = gen_program(lower_corpus("dj2.slq"), FlagSpec::rand());
  std::set<std::string> vars;
  for (const auto& a : ob.prog.assertions) logic::collect_vars(a, vars);
  for (int v = 0; v < 4; ++v) EXPECT_TRUE(vars.count("f_" + std::to_string(v))) << v;
  for (const auto& a : ob.prog.assertions) EXPECT_FALSE(has_mul_over(a, "f_")) << logic::to_smt(a);
}

TEST(ObligationGen, ClassicalGuard) {
  const ProgramObligations ob =
      gen_program(lower_source("def g(b: !B){ x := 0; if b { x = x + 2; } return x; }"), FlagSpec::rand());
  std::vector<std::string> text;
  for (const auto& a : ob.prog.assertions) text.push_back(logic::to_smt(a));
  EXPECT_NE(std::find(text.begin(), text.end(), "(=> (= b_v0 1) (= x_v1 (+ x_v0 2)))"), text.end());
  EXPECT_NE(std::find(text.begin(), text.end(), "(=> (not (= b_v0 1)) (= x_v1 x_v0))"), text.end());
}

TEST(ObligationGen, HadamardExpansion) {
  const ProgramObligations ob = gen_program(
      lower_source("def h(){ x := 0:B; x := H(x); if x { phase(pi/4); } x := H(x); }"), FlagSpec::rand());
  const auto& gens = ob.symbols.generations();
  const double r = 1 / std::sqrt(2.0);
  std::mt19937 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [in, out] = step(ob, gens[gens.size() - 2], gens.back(), rng);
    EXPECT_LE(std::abs(out[0] - r * (in[0] + in[1])), 1e-9);
    EXPECT_LE(std::abs(out[1] - r * (in[0] - in[1])), 1e-9);
  }
}

// Final amplitudes forced by prog equal the simulator's state: exactly for
// programs without H, to 1e-9 otherwise.
TEST(ObligationProperties, ModelFidelity) {
  std::size_t compared = 0;
  for (const auto& file : small_programs()) {
    const SilqAst ast = prefix_ast(file);
    const QramProgram p = lower_function(ast, ast.functions[0].name);
    const ProgramObligations ob = gen_program(p, FlagSpec::rand());
    const bool has_h = qv_test::corpus(file).find("H(") != std::string::npos;
    std::vector<OracleTables> tables{{}};
    for (const auto& o : p.oracles) {
      std::vector<OracleTables> next;
      for (const auto& base : tables)
        for (const auto& tab : all_tables(o.arg_bits)) {
          OracleTables m = base;
          m[o.name] = tab;
          next.push_back(m);
        }
      tables = std::move(next);
    }
    for (const auto& tab : tables)
      for (std::int64_t input = 0; input < (p.inputs.empty() ? 1 : 2); ++input) {
        std::map<std::string, Rational> env;
        ClassicalEnv inputs;
        for (const auto& in : p.inputs) {
          env[naming::classical(in.name, 0)] = input;
          inputs[in.name] = input;
        }
        for (const auto& [name, entries] : tab)
          for (std::size_t v = 0; v < entries.size(); ++v) env[naming::oracle_entry(name, v)] = entries[v];
        const auto values = forward_evaluate(ob.prog, env);
        const auto branches = run_all_branches(p, tab, inputs);
        ASSERT_EQ(branches.size(), 1U);
        const SimState& s = branches[0].final_state;
        if (ob.symbols.live_generation) {
          const Generation& g = ob.symbols.generations()[*ob.symbols.live_generation];
          ASSERT_EQ(g.layout, s.layout) << file;
          for (std::uint64_t i = 0; i < g.layout.dim(); ++i) {
            const auto part = [&](naming::AmpPart k) { return values.at(naming::amplitude(g.index, i, k)); };
            const double re = to_double(part(naming::AmpPart::ReA)) + to_double(part(naming::AmpPart::ReB)) * std::sqrt(2.0);
            const double im = to_double(part(naming::AmpPart::ImA)) + to_double(part(naming::AmpPart::ImB)) * std::sqrt(2.0);
            const double tol = has_h ? 1e-9 : 0.0;
            EXPECT_LE(std::abs(re - s.amplitudes[i].real()), tol) << file << " " << i;
            EXPECT_LE(std::abs(im - s.amplitudes[i].imag()), tol) << file << " " << i;
          }
        }
        for (const auto& [var, ver] : ob.symbols.final_classical)
          EXPECT_EQ(values.at(naming::classical(var, ver)), Rational(s.env.at(var))) << file << " " << var;
        ++compared;
      }
  }
  EXPECT_GT(compared, 50U);
}

TEST(ObligationProperties, NormalizationPropagates) {
  REQUIRE_SOLVER();
  for (const auto& file : small_programs()) {
    const QramProgram p = lower_corpus(file);
    ProgramObligations ob = gen_program(p, FlagSpec::rand());
    if (ob.symbols.generations().empty()) continue;
    if (!ob.symbols.contains(naming::kInvSqrt2))
      ob.symbols.declare({naming::kInvSqrt2, Sort::Real, SymbolDecl::Role::Constant, std::nullopt, std::nullopt});
    const auto& gens = ob.symbols.generations();
    ObligationSet pre{Group::Pre, {logic::eq(norm_of(ob.symbols, gens[0]), rconst(1))}, {}};
    ObligationSet post{Group::Post, {}, {}};
    for (const auto& g : gens)
      if (!g.layout.empty()) post.add(logic::eq(norm_of(ob.symbols, g), rconst(1)));
    const Verdict v = check(ob.prog, pre, post, ob.symbols, qv_test::solver_config());
    EXPECT_EQ(v.status, Verdict::Status::Verified) << file << " " << v.reason;
  }
}

TEST(ObligationProperties, GuardTotality) {
  REQUIRE_SOLVER();
  std::size_t pairs = 0;
  for (const auto& file : small_programs()) {
    const ProgramObligations ob = gen_program(lower_corpus(file), FlagSpec::rand());
    std::vector<Term> guards;
    for (const auto& a : ob.prog.assertions)
      if (a.op() == logic::Op::Implies && a.args()[0].op() != logic::Op::Eq) guards.push_back(a.args()[0]);
      else if (a.op() == logic::Op::Implies && a.args()[0].args()[0].name().rfind("meas_", 0) != 0)
        guards.push_back(a.args()[0]);
    for (std::size_t i = 0; i + 1 < guards.size(); ++i) {
      if (guards[i + 1] != logic::not_(guards[i])) continue;
      const Term exactly_one = logic::or_(logic::and_(guards[i], logic::not_(guards[i + 1])),
                                          logic::and_(logic::not_(guards[i]), guards[i + 1]));
      EXPECT_EQ(solve(ObligationSet{Group::Prog, {}, {}}, ob.symbols, {logic::not_(exactly_one)}), SatResult::Unsat)
          << file << " " << logic::to_smt(guards[i]);
      ++pairs;
    }
  }
  EXPECT_GT(pairs, 0U);
}

TEST(ObligationProperties, FlagOrdering) {
  REQUIRE_SOLVER();
  const std::vector<FlagSpec> whps{FlagSpec::whp(Rational(1, 4)), FlagSpec::whp(Rational(1, 2)),
                                   FlagSpec::whp(Rational(3, 4)), FlagSpec::whp(1)};
  for (const char* file : {"unfair_coin.slq", "ghz2.slq", "bell_parity.slq", "else_branch.slq"}) {
    const QramProgram p = lower_corpus(file);
    const ProgramObligations cert = gen_program(p, FlagSpec::cert());
    const ProgramObligations rand = gen_program(p, FlagSpec::rand());
    for (const auto& flag : whps) {
      const ProgramObligations whp = gen_program(p, flag);
      EXPECT_TRUE(entails(cert.prog, cert.symbols, whp.prog.conjunction())) << file << " " << to_string(flag);
      EXPECT_TRUE(entails(whp.prog, whp.symbols, rand.prog.conjunction())) << file << " " << to_string(flag);
    }
  }
}

TEST(ObligationProperties, DeterministicEmission) {
  for (const char* file : {"ghz2.slq", "dj2.slq", "toffoli.slq"}) {
    std::set<std::string> scripts;
    for (int run = 0; run < 3; ++run) {
      const QramProgram p = lower_corpus(file);
      const ProgramObligations ob = gen_program(p, FlagSpec::rand());
      scripts.insert(emit_smt(ob.prog, {}, {}, ob.symbols));
    }
    EXPECT_EQ(scripts.size(), 1U) << file;
  }
}

TEST(Measurement, HadamardStateBothOutcomes) {
  REQUIRE_SOLVER();
  const ProgramObligations ob = gen_program(
      lower_source("def m(){ x := 0:B; x := H(x); r := measure(x); return r; }"), FlagSpec::whp(Rational(1, 2)));
  const auto& st = ob.symbols;
  EXPECT_TRUE(entails(ob.prog, st, logic::eq(t(st, "pr_x_v1_0"), rconst(Rational(1, 2)))));
  EXPECT_TRUE(entails(ob.prog, st, logic::eq(t(st, "pr_x_v1_1"), rconst(Rational(1, 2)))));
  EXPECT_EQ(solve(ob.prog, st, {logic::eq(t(st, "meas_x"), iconst(0))}), SatResult::Sat);
  EXPECT_EQ(solve(ob.prog, st, {logic::eq(t(st, "meas_x"), iconst(1))}), SatResult::Sat);
}

TEST(Measurement, BasisStateUnderCert) {
  REQUIRE_SOLVER();
  const ProgramObligations ob =
      gen_program(lower_source("def m(){ x := 1:B; r := measure(x); return r; }"), FlagSpec::cert());
  const auto& st = ob.symbols;
  EXPECT_EQ(solve(ob.prog, st, {logic::eq(t(st, "meas_x"), iconst(1))}), SatResult::Sat);
  EXPECT_EQ(solve(ob.prog, st, {logic::eq(t(st, "meas_x"), iconst(0))}), SatResult::Unsat);
}

TEST(Measurement, GhzCollapse) {
  REQUIRE_SOLVER();
  const ProgramObligations ob = gen_program(lower_corpus("ghz2.slq"), FlagSpec::rand());
  const auto& st = ob.symbols;
  const Rational half(1, 2);
  EXPECT_TRUE(entails(ob.prog, st, logic::eq(t(st, "pr_y_v2_0"), rconst(half))));
  EXPECT_TRUE(entails(ob.prog, st, logic::eq(t(st, "pr_y_v2_3"), rconst(half))));
  EXPECT_TRUE(entails(ob.prog, st, logic::eq(t(st, "pr_y_v2_1"), rconst(0))));
  EXPECT_TRUE(entails(ob.prog, st, logic::eq(t(st, "pr_y_v2_2"), rconst(0))));
  const Term y0 = logic::eq(t(st, "meas_y"), iconst(0));
  const Term y3 = logic::eq(t(st, "meas_y"), iconst(3));
  EXPECT_TRUE(entails(ob.prog, st, logic::or_(y0, y3)));
  EXPECT_TRUE(entails(ob.prog, st, logic::implies(y0, logic::eq(t(st, "pr_x_v1_0"), rconst(1)))));
  EXPECT_TRUE(entails(ob.prog, st, logic::implies(y3, logic::eq(t(st, "pr_x_v1_1"), rconst(1)))));
}

TEST(ObligationGen, ControlledXPermutation) {
  const QramProgram p = lower_source(
      "def c(){ x := 0:B; y := 0:uint[2]; x := H(x); y[0] := H(y[0]); y[1] := H(y[1]); if x { y[0] := X(y[0]); } }");
  const ProgramObligations ob = gen_program(p, FlagSpec::rand());
  const auto& gens = ob.symbols.generations();
  std::mt19937 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto [in, out] = step(ob, gens[gens.size() - 2], gens.back(), rng);
    for (std::uint64_t i = 0; i < 8; ++i) {
      const std::uint64_t src = (i & 4U) ? i ^ 1U : i;
      EXPECT_LE(std::abs(out[i] - in[src]), 1e-9) << i;
    }
  }
}

TEST(ObligationGen, Errors) {
  QramProgram p = lower_source("def c(){ x := 0:B; x := X(x); }");
  std::get<QOp>(p.processes[1].q).u = kron(gate({GateKind::H, 0}), gate({GateKind::H, 0}));
  EXPECT_THROW(gen_program(p, FlagSpec::rand()), DimensionMismatch);
  QramProgram q = lower_source("def c(){ x := 0:B; x := X(x); }");
  q.processes[1].gamma.push_back({make_binary(VarRef{"x"}, Operator::Eq, 1), true});
  EXPECT_THROW(gen_program(q, FlagSpec::rand()), ControlOnTarget);
}
