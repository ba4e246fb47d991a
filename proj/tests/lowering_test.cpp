#include <gtest/gtest.h>

#include <algorithm>
#include <complex>
#include <filesystem>

#include "qramverify/errors.hpp"
#include "qramverify/lowering.hpp"
#include "qramverify/pipeline.hpp"
#include "qramverify/sim_oracle.hpp"
#include "support.hpp"

using namespace qramverify;
using cd = std::complex<double>;

namespace {

std::vector<std::filesystem::path> corpus_programs() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(qv_test::corpus_dir()))
    if (e.path().extension() == ".slq") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

// Direct interpreter for measurement-free function bodies, written against the
// AST only: it shares no code with lowering, the gate algebra or the simulator.
class AstInterpreter {
 public:
  AstInterpreter(const FunctionDef& fn, const OracleTables& tables, const ClassicalEnv& inputs)
      : fn_(fn), tables_(tables), env_(inputs) {}

  void run() {
    amps_ = {1.0};
    block(fn_.body, std::vector<bool>(1, true));
  }

  const std::vector<cd>& amplitudes() const { return amps_; }
  const std::vector<std::pair<std::string, unsigned>>& vars() const { return vars_; }
  const ClassicalEnv& env() const { return env_; }

 private:
  unsigned offset(const std::string& name) const {
    unsigned off = 0;
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
      if (it->first == name) return off;
      off += it->second;
    }
    throw std::logic_error("unknown register " + name);
  }
  bool is_quantum(const std::string& name) const {
    return std::any_of(vars_.begin(), vars_.end(), [&](const auto& v) { return v.first == name; });
  }
  unsigned width(const std::string& name) const {
    for (const auto& v : vars_)
      if (v.first == name) return v.second;
    return 0;
  }

  static std::int64_t wrap(std::int64_t v, const std::optional<SilqType>& t) {
    if (!t || !t->bounded()) return v;
    const std::int64_t m = std::int64_t{1} << size(*t);
    return ((v % m) + m) % m;
  }

  std::int64_t eval(const Expr& e, std::size_t idx) const {
    switch (e.kind) {
      case Expr::Kind::Int:
      case Expr::Kind::TypedConst: return e.value;
      case Expr::Kind::Var:
        if (is_quantum(e.name)) return static_cast<std::int64_t>((idx >> offset(e.name)) & ((1U << width(e.name)) - 1));
        return env_.at(e.name);
      case Expr::Kind::Index:
        if (is_quantum(e.name)) return static_cast<std::int64_t>((idx >> (offset(e.name) + e.value)) & 1U);
        return (env_.at(e.name) >> e.value) & 1;
      case Expr::Kind::Call: return tables_.at(e.name).at(static_cast<std::size_t>(eval(e.args.at(0), idx)));
      case Expr::Kind::Unary: {
        const std::int64_t v = eval(e.args[0], idx);
        return e.name == "!" ? !v : wrap(-v, e.type);
      }
      case Expr::Kind::Binary: {
        const std::int64_t a = eval(e.args[0], idx), b = eval(e.args[1], idx);
        if (e.name == "+") return wrap(a + b, e.type);
        if (e.name == "-") return wrap(a - b, e.type);
        if (e.name == "*") return wrap(a * b, e.type);
        if (e.name == "%") return wrap(((a % b) + b) % b, e.type);
        if (e.name == "==") return a == b;
        if (e.name == "!=") return a != b;
        if (e.name == "<") return a < b;
        if (e.name == "<=") return a <= b;
        if (e.name == ">") return a > b;
        if (e.name == ">=") return a >= b;
        if (e.name == "&&") return a && b;
        if (e.name == "||") return a || b;
        throw std::logic_error("operator " + e.name);
      }
    }
    return 0;
  }

  void block(const std::vector<Stmt>& body, const std::vector<bool>& mask) {
    for (const auto& s : body) statement(s, mask);
  }

  void statement(const Stmt& s, const std::vector<bool>& mask) {
    switch (s.kind) {
      case Stmt::Kind::Assign:
        if (s.quantum) {
          const unsigned n = size(*s.target.type);
          std::vector<cd> next(amps_.size() << n);
          for (std::size_t i = 0; i < amps_.size(); ++i) next[(i << n) | static_cast<std::size_t>(s.value.value)] = amps_[i];
          amps_ = std::move(next);
          vars_.emplace_back(s.target.name, n);
        } else {
          env_[s.target.name] = wrap(eval(s.value, 0), s.target.type);
        }
        return;
      case Stmt::Kind::GateApply: {
        const unsigned wire = offset(s.target.name) + (s.target.kind == Expr::Kind::Index ? s.target.value : 0);
        const double r = 1 / std::sqrt(2.0);
        const bool hadamard = s.value.name == "H";
        const std::size_t bit = std::size_t{1} << wire;
        for (std::size_t i = 0; i < amps_.size(); ++i) {
          if (i & bit || !mask[i]) continue;
          const cd a0 = amps_[i], a1 = amps_[i | bit];
          amps_[i] = hadamard ? r * (a0 + a1) : a1;
          amps_[i | bit] = hadamard ? r * (a0 - a1) : a0;
        }
        return;
      }
      case Stmt::Kind::Phase: {
        const cd ph = std::polar(1.0, M_PI * to_double(angle_of(s.value)));
        for (std::size_t i = 0; i < amps_.size(); ++i)
          if (mask[i]) amps_[i] *= ph;
        return;
      }
      case Stmt::Kind::If: {
        std::vector<bool> then_mask(amps_.size()), else_mask(amps_.size());
        for (std::size_t i = 0; i < amps_.size(); ++i) {
          const bool c = eval(s.value, i) != 0;
          then_mask[i] = mask[i] && c;
          else_mask[i] = mask[i] && !c;
        }
        block(s.then_body, then_mask);
        if (s.has_else) block(s.else_body, else_mask);
        return;
      }
      case Stmt::Kind::Measure:
      case Stmt::Kind::Return: throw std::logic_error("interpreter handles measurement-free prefixes only");
    }
  }

  const FunctionDef& fn_;
  const OracleTables& tables_;
  ClassicalEnv env_;
  std::vector<cd> amps_;
  std::vector<std::pair<std::string, unsigned>> vars_;
};

// Body up to (not including) the first top-level measurement or return.
SilqAst measurement_free_prefix(SilqAst ast) {
  auto& body = ast.functions.at(0).body;
  const auto it = std::find_if(body.begin(), body.end(), [](const Stmt& s) {
    return s.kind == Stmt::Kind::Measure || s.kind == Stmt::Kind::Return;
  });
  body.erase(it, body.end());
  return ast;
}

std::vector<OracleTables> table_choices(const QramProgram& p) {
  std::vector<OracleTables> out{{}};
  for (const auto& o : p.oracles) {
    std::vector<OracleTables> next;
    for (const auto& partial : out)
      for (const auto& t : all_tables(o.arg_bits)) {
        OracleTables m = partial;
        m[o.name] = t;
        next.push_back(m);
      }
    out = std::move(next);
  }
  return out;
}

std::vector<ClassicalEnv> input_choices(const QramProgram& p) {
  std::vector<ClassicalEnv> out{{}};
  for (const auto& in : p.inputs) {
    std::vector<ClassicalEnv> next;
    for (const auto& partial : out)
      for (std::int64_t v = 0; v < (std::int64_t{1} << in.size); ++v) {
        ClassicalEnv m = partial;
        m[in.name] = v;
        next.push_back(m);
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace

TEST(Lowering, GhzProcesses) {
  const QramProgram p = lower_function(load_program(qv_test::corpus("ghz2.slq")), "ghz");
  ASSERT_EQ(p.processes.size(), 8U);
  int controlled_x = 0;
  for (const auto& proc : p.processes) {
    if (const auto* op = std::get_if<QOp>(&proc.q); op && op->var == "y") {
      ++controlled_x;
      ASSERT_EQ(proc.gamma.size(), 1U);
      EXPECT_TRUE(proc.gamma[0].quantum);
      EXPECT_EQ(to_string(proc.gamma[0].op), "BINARY(x,==,1)");
    }
  }
  EXPECT_EQ(controlled_x, 2);
  EXPECT_TRUE(std::holds_alternative<QInit>(p.processes[0].q));
  EXPECT_TRUE(std::holds_alternative<Return>(p.processes.back().c));
}

TEST(Lowering, DeutschJozsaMatchesHandModel) {
  LoweringOptions fuse;
  fuse.fuse = true;
  const QramProgram p = lower_function(load_program(qv_test::corpus("dj2.slq")), "fixed_dj", fuse);
  ASSERT_EQ(p.processes.size(), 6U);
  ASSERT_EQ(p.oracles.size(), 1U);
  EXPECT_EQ(p.oracles[0], (OracleParam{"f", 2}));
  EXPECT_EQ(std::get<QInit>(p.processes[0].q), (QInit{"x", 2, 0}));
  const SymbolicMatrix h = gate({GateKind::H, 0});
  EXPECT_EQ(std::get<QOp>(p.processes[1].q).u, kron(h, h));
  EXPECT_EQ(std::get<QOp>(p.processes[3].q).u, kron(h, h));
  const QramProcess& oracle = p.processes[2];
  ASSERT_EQ(oracle.gamma.size(), 1U);
  EXPECT_EQ(to_string(oracle.gamma[0].op), "BINARY(UNARY(f,x),==,1)");
  EXPECT_TRUE(std::get<QOp>(oracle.q).u.is_scalar_identity());
  EXPECT_EQ(std::get<QOp>(oracle.q).u.at(0, 0), Scalar(-1));
  EXPECT_EQ(std::get<QMeas>(p.processes[4].q).var, "x");
  EXPECT_EQ(std::get<CMeas>(p.processes[4].c).var, "x");
  EXPECT_EQ(p.processes[3].mem_q.at("x").ver, 3);
}

TEST(Lowering, FusionPreservesProduct) {
  const SilqAst ast = load_program(qv_test::corpus("dj3.slq"));
  const QramProgram plain = lower_function(ast, "fixed_dj");
  LoweringOptions fuse;
  fuse.fuse = true;
  const QramProgram fused = lower_function(ast, "fixed_dj", fuse);
  EXPECT_LT(fused.processes.size(), plain.processes.size());
  for (const auto& t : all_tables(3)) {
    const auto a = run_all_branches(plain, {{"f", t}}, {});
    const auto b = run_all_branches(fused, {{"f", t}}, {});
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_NEAR(a[i].probability, b[i].probability, 1e-12);
      EXPECT_EQ(a[i].returned, b[i].returned);
    }
  }
}

TEST(Lowering, EmptyBody) {
  const QramProgram p = lower_function(load_program("def f(){ }"), "f");
  EXPECT_TRUE(p.processes.empty());
  EXPECT_THROW(lower_function(load_program("def f(){ }"), "g"), NoSuchFunction);
}

TEST(Lowering, Conditions) {
  const SilqAst ast = load_program(R"(
def c(a: !uint[2]){
    x := 0:B;
    if x { phase(pi); }
    if !(a <= 2) { x := X(x); }
})");
  const auto& body = ast.functions[0].body;
  const CtrlInstr qx = lower_condition(body[1].value);
  EXPECT_EQ(to_string(qx.op), "BINARY(x,==,1)");
  EXPECT_TRUE(qx.quantum);
  const CtrlInstr ca = lower_condition(body[2].value);
  EXPECT_EQ(to_string(ca.op), "UNARY(not,BINARY(a,<=,2))");
  EXPECT_FALSE(ca.quantum);
  const SilqAst dj = load_program(qv_test::corpus("dj2.slq"));
  for (const auto& s : dj.functions[0].body)
    if (s.kind == Stmt::Kind::If) {
      EXPECT_EQ(to_string(lower_condition(s.value).op), "BINARY(UNARY(f,x),==,1)");
    }
}

TEST(Lowering, Rejections) {
  EXPECT_THROW(lower_function(load_program("def f(b: !B){ x := 0:B; if b { r := measure(x); } }"), "f"), LoweringError);
  EXPECT_THROW(lower_function(load_program("def f(){ x := 0:B; y := 0:B; if x { r := measure(y); } }"), "f"), Error);
  EXPECT_THROW(lower_function(load_program("def f(){ x := 0:B; if x { x := X(x); } }"), "f"), ControlOnTarget);
}

TEST(LoweringProperties, CorpusProgramsAreValid) {
  for (const auto& path : corpus_programs()) {
    const SilqAst ast = load_program(qv_test::read_text(path));
    for (bool fuse : {false, true}) {
      LoweringOptions o;
      o.fuse = fuse;
      const QramProgram p = lower_function(ast, ast.functions[0].name, o);
      const auto v = validate_program(p);
      EXPECT_TRUE(v.empty()) << path << ": " << (v.empty() ? "" : v[0].message);
      if (!p.processes.empty()) {
        EXPECT_TRUE(p.processes.back().gamma.empty()) << path;
      }
    }
  }
}

// Each process's memories are its predecessor's transformed by the single
// operation its instruction calls for.
TEST(LoweringProperties, MemoryThreading) {
  for (const auto& path : corpus_programs()) {
    const SilqAst ast = load_program(qv_test::read_text(path));
    const QramProgram p = lower_function(ast, ast.functions[0].name);
    Memory mq(MemoryTag::Quantum), mc = p.initial_c;
    for (const auto& proc : p.processes) {
      if (const auto* init = std::get_if<QInit>(&proc.q)) mq = mem_add(mq, init->var, init->size);
      if (const auto* op = std::get_if<QOp>(&proc.q)) mq = mem_iter(mq, op->var);
      if (const auto* meas = std::get_if<QMeas>(&proc.q)) {
        const unsigned n = mq.at(meas->var).size;
        mq = mem_del(mq, meas->var);
        mc = mem_amend(mc, std::get<CMeas>(proc.c).var, n);
      }
      if (const auto* set = std::get_if<CSet>(&proc.c)) mc = mem_amend(mc, set->var, set->size);
      EXPECT_EQ(proc.mem_q, mq) << path << " " << to_string(proc.q);
      EXPECT_EQ(proc.mem_c, mc) << path << " " << to_string(proc.c);
    }
  }
}

// Every statement and expression kind has a lowering rule.
TEST(LoweringProperties, FragmentClosure) {
  const std::vector<std::pair<Stmt::Kind, std::string>> stmts{
      {Stmt::Kind::Assign, "c := 1;"},
      {Stmt::Kind::GateApply, "x := H(x);"},
      {Stmt::Kind::Measure, "m := measure(x);"},
      {Stmt::Kind::Phase, "if x { phase(pi/2); }"},
      {Stmt::Kind::If, "if b { c = 2; } else { c = 3; }"},
      {Stmt::Kind::Return, "return c;"},
  };
  const std::vector<std::pair<Expr::Kind, std::string>> exprs{
      {Expr::Kind::Int, "d := 4;"},
      {Expr::Kind::TypedConst, "y := 1:uint[2];"},
      {Expr::Kind::Var, "d := c;"},
      {Expr::Kind::Index, "y := 1:uint[2]; if y[1] { x := X(x); }"},
      {Expr::Kind::Call, "e := f(b);"},
      {Expr::Kind::Unary, "if !b { c = 5; }"},
      {Expr::Kind::Binary, "d := c * 2 + 1;"},
  };
  EXPECT_EQ(stmts.size(), static_cast<std::size_t>(Stmt::Kind::Return) + 1);
  EXPECT_EQ(exprs.size(), static_cast<std::size_t>(Expr::Kind::Binary) + 1);
  const std::string head = "def t(f: const B!->qfree B, b: !B){ x := 0:B; c := 0; ";
  for (const auto& [kind, text] : stmts) {
    const std::string src = head + text + (kind == Stmt::Kind::Return ? "}" : " }");
    EXPECT_NO_THROW(lower_function(load_program(src), "t")) << src;
  }
  for (const auto& [kind, text] : exprs) {
    const std::string src = head + text + " }";
    EXPECT_NO_THROW(lower_function(load_program(src), "t")) << src;
  }
}

TEST(LoweringProperties, SemanticFidelityAgainstAst) {
  std::size_t compared = 0;
  for (const auto& path : corpus_programs()) {
    const SilqAst full = load_program(qv_test::read_text(path));
    const SilqAst ast = measurement_free_prefix(full);
    const FunctionDef& fn = ast.functions[0];
    const QramProgram p = lower_function(ast, fn.name);
    if (p.oracles.size() == 1 && p.oracles[0].arg_bits > 3) continue;
    for (const auto& tables : table_choices(p))
      for (const auto& inputs : input_choices(p)) {
        AstInterpreter interp(fn, tables, inputs);
        interp.run();
        const auto branches = run_all_branches(p, tables, inputs);
        ASSERT_EQ(branches.size(), 1U) << path;
        const SimState& s = branches[0].final_state;
        ASSERT_EQ(s.layout.entries().size(), interp.vars().size()) << path;
        for (std::size_t k = 0; k < interp.vars().size(); ++k) {
          EXPECT_EQ(s.layout.entries()[k].name, interp.vars()[k].first);
          EXPECT_EQ(s.layout.entries()[k].size, interp.vars()[k].second);
        }
        if (interp.vars().empty()) {
          EXPECT_TRUE(s.amplitudes.empty()) << path;
        } else {
          ASSERT_EQ(s.amplitudes.size(), interp.amplitudes().size()) << path;
        }
        for (std::size_t i = 0; i < s.amplitudes.size() && !interp.vars().empty(); ++i)
          EXPECT_NEAR(std::abs(s.amplitudes[i] - interp.amplitudes()[i]), 0, 1e-9) << path << " index " << i;
        for (const auto& [name, value] : interp.env()) {
          ASSERT_TRUE(s.env.count(name)) << path << " " << name;
          EXPECT_EQ(s.env.at(name), value) << path << " " << name;
        }
        ++compared;
      }
  }
  EXPECT_GT(compared, 100U);
}
