#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "qramverify/errors.hpp"
#include "qramverify/pipeline.hpp"
#include "qramverify/sim_oracle.hpp"
#include "support.hpp"

using namespace qramverify;

namespace {

QramProgram lower_source(const std::string& src) {
  const SilqAst ast = load_program(src);
  return lower_function(ast, ast.functions.at(0).name);
}

QramProgram lower_corpus(const std::string& name) { return lower_source(qv_test::corpus(name + ".slq")); }

SpeqSpec spec_file(const std::string& rel) { return parse_speq(qv_test::corpus(rel)); }

double norm(const SimState& s) {
  double n = 0;
  for (const auto& a : s.amplitudes) n += std::norm(a);
  return n;
}

// Random measurement-free program over 1- and 2-qubit variables; single-bit
// variables may act as controls for gates on the others.
std::string random_program(std::mt19937& rng) {
  std::vector<std::pair<std::string, unsigned>> vars;
  unsigned total = 0;
  std::string src = "def r(){\n";
  while (total < 6) {
    const unsigned size = 1 + rng() % 2;
    if (total + size > 6) break;
    const std::string name = "v" + std::to_string(vars.size());
    vars.emplace_back(name, size);
    src += "  " + name + " := " + std::to_string(rng() % (1U << size)) + ":" + (size == 1 ? "B" : "uint[2]") + ";\n";
    total += size;
    if (rng() % 3 == 0) break;
  }
  static const char* gates[] = {"H", "X"};
  for (int k = 0; k < 12; ++k) {
    const auto& [t, tsize] = vars[rng() % vars.size()];
    const std::string target = tsize == 1 ? t : t + "[" + std::to_string(rng() % 2) + "]";
    std::string stmt;
    switch (rng() % 4) {
      case 0: stmt = "phase(" + std::string(rng() % 2 ? "pi" : "pi/4") + ");"; break;
      default: stmt = target + " := " + gates[rng() % 2] + "(" + target + ");"; break;
    }
    const auto& [c, csize] = vars[rng() % vars.size()];
    if (csize == 1 && c != t && rng() % 2) stmt = "if " + c + " { " + stmt + " }";
    src += "  " + stmt + "\n";
  }
  return src + "}\n";
}

}  // namespace

TEST(Sim, GhzBranches) {
  const auto branches = run_all_branches(lower_corpus("ghz2"), {}, {});
  ASSERT_EQ(branches.size(), 2U);
  std::set<std::int64_t> returned;
  for (const auto& b : branches) {
    EXPECT_NEAR(b.probability, 0.5, 1e-12);
    ASSERT_TRUE(b.returned);
    returned.insert(*b.returned);
    ASSERT_EQ(b.outcomes.size(), 2U);
    EXPECT_NEAR(b.outcomes[1].probability, 1.0, 1e-12);
  }
  EXPECT_EQ(returned, (std::set<std::int64_t>{0, 3}));
}

TEST(Sim, DeutschJozsaAndBernsteinVazirani) {
  const auto constant = run_all_branches(lower_corpus("dj2"), {{"f", {0, 0, 0, 0}}}, {});
  ASSERT_EQ(constant.size(), 1U);
  EXPECT_NEAR(constant[0].probability, 1, 1e-12);
  EXPECT_EQ(constant[0].returned, 0);
  // f(x) = s.x mod 2 with s = 2 (bit 1 set).
  const auto bv = run_all_branches(lower_corpus("bv2"), {{"f", {0, 0, 1, 1}}}, {});
  ASSERT_EQ(bv.size(), 1U);
  EXPECT_EQ(bv[0].returned, 2);
  const auto balanced = run_all_branches(lower_corpus("dj2"), {{"f", {0, 1, 1, 0}}}, {});
  for (const auto& b : balanced) EXPECT_NE(b.returned, 0);
}

TEST(Sim, ClassicalInputs) {
  const QramProgram p = lower_corpus("else_branch");
  const auto one = run_all_branches(p, {}, {{"b", 1}});
  ASSERT_EQ(one.size(), 2U);
  const auto zero = run_all_branches(p, {}, {{"b", 0}});
  ASSERT_EQ(zero.size(), 1U);
  EXPECT_EQ(zero[0].returned, 1);
}

TEST(Sim, Errors) {
  EXPECT_THROW(run_all_branches(lower_corpus("dj2"), {}, {}), UnboundOracle);
  const QramProgram big = lower_source(
      "def f(g: const uint[4]!->qfree B){ x := 0:uint[4]; if g(x) { phase(pi); } r := measure(x); return r; }");
  const SpeqSpec spec = parse_speq("f[rand](define g:{0, 1}^4->{0, 1})->\n(define f_ret:{0, 1}^4)\npre{\n}\npost{\n}");
  EXPECT_THROW(brute_check(big, spec), DomainTooLarge);
  EXPECT_EQ(all_tables(2).size(), 16U);
  EXPECT_EQ(all_tables(1), (std::vector<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}, {1, 1}}));
}

TEST(SimProperties, NormIsPreserved) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 150; ++trial) {
    const std::string src = random_program(rng);
    const auto branches = run_all_branches(lower_source(src), {}, {});
    ASSERT_EQ(branches.size(), 1U) << src;
    EXPECT_NEAR(norm(branches[0].final_state), 1.0, 1e-9) << src;
  }
}

TEST(SimProperties, BranchProbabilitiesSumToOne) {
  for (const auto& e : std::filesystem::directory_iterator(qv_test::corpus_dir())) {
    if (e.path().extension() != ".slq" || e.path().stem() == "dj5") continue;
    const QramProgram p = lower_source(qv_test::read_text(e.path()));
    OracleTables tables;
    for (const auto& o : p.oracles) tables[o.name] = std::vector<int>(std::size_t{1} << o.arg_bits, 1);
    ClassicalEnv inputs;
    for (const auto& in : p.inputs) inputs[in.name] = 1;
    double total = 0;
    for (const auto& b : run_all_branches(p, tables, inputs)) {
      total += b.probability;
      double product = 1;
      for (const auto& o : b.outcomes) product *= o.probability;
      EXPECT_NEAR(product, b.probability, 1e-12);
    }
    EXPECT_NEAR(total, 1.0, 1e-9) << e.path();
  }
}

TEST(BruteCheck, CorrectSpecsHold) {
  const auto dj = brute_check(lower_corpus("dj2"), spec_file("dj2.speq"));
  EXPECT_TRUE(dj.holds);
  EXPECT_TRUE(dj.satisfiable);
  EXPECT_GE(dj.cases, 8U);
  const auto bv = brute_check(lower_corpus("bv2"), spec_file("bv2.speq"));
  EXPECT_TRUE(bv.holds);
  EXPECT_TRUE(bv.satisfiable);
}

TEST(BruteCheck, WrongPostHasWitness) {
  const auto r = brute_check(lower_corpus("ghz2"), spec_file("mutants/ghz2.wrong_post.speq"));
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.violation);
  ASSERT_TRUE(r.violation->branch.returned);
  EXPECT_TRUE(*r.violation->branch.returned == 0 || *r.violation->branch.returned == 3);
}

TEST(BruteCheck, ContradictoryPreIsUnsatisfiable) {
  const auto r = brute_check(lower_corpus("ghz2"), spec_file("mutants/ghz2.contradictory_pre.speq"));
  EXPECT_TRUE(r.holds);
  EXPECT_FALSE(r.satisfiable);
}
