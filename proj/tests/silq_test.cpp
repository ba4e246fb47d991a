#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>

#include "qramverify/errors.hpp"
#include "qramverify/pipeline.hpp"
#include "qramverify/silq_ast.hpp"
#include "support.hpp"

using namespace qramverify;

namespace {

std::vector<std::filesystem::path> corpus_programs() {
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(qv_test::corpus_dir()))
    if (e.path().extension() == ".slq") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST(SilqParse, Ghz) {
  const SilqAst ast = parse_silq(qv_test::corpus("ghz2.slq"));
  ASSERT_EQ(ast.functions.size(), 1U);
  const FunctionDef& fn = ast.functions[0];
  EXPECT_EQ(fn.name, "ghz");
  EXPECT_TRUE(fn.params.empty());
  EXPECT_EQ(count_statements(fn.body), 9U);
  const auto it = std::find_if(fn.body.begin(), fn.body.end(), [](const Stmt& s) { return s.kind == Stmt::Kind::If; });
  ASSERT_NE(it, fn.body.end());
  ASSERT_EQ(it->then_body.size(), 2U);
  for (const auto& s : it->then_body) {
    EXPECT_EQ(s.kind, Stmt::Kind::GateApply);
    EXPECT_EQ(s.value.name, "X");
  }
}

TEST(SilqParse, DeutschJozsa) {
  const SilqAst ast = parse_silq(qv_test::corpus("dj2.slq"));
  const FunctionDef& fn = ast.functions.at(0);
  ASSERT_EQ(fn.params.size(), 1U);
  EXPECT_EQ(fn.params[0].type.kind, SilqType::Kind::Oracle);
  EXPECT_EQ(fn.params[0].type.bits, 2U);
  const auto it = std::find_if(fn.body.begin(), fn.body.end(), [](const Stmt& s) { return s.kind == Stmt::Kind::If; });
  ASSERT_NE(it, fn.body.end());
  EXPECT_EQ(it->value.kind, Expr::Kind::Call);
  EXPECT_EQ(it->value.name, "f");
  ASSERT_EQ(it->then_body.size(), 1U);
  EXPECT_EQ(it->then_body[0].kind, Stmt::Kind::Phase);
}

TEST(SilqParse, Errors) {
  EXPECT_THROW(parse_silq("def f(){ return x; }"), UseBeforeDefine);
  EXPECT_THROW(parse_silq("def f(){ x := 0:B; while x { x := H(x); } }"), UnsupportedFeature);
  EXPECT_THROW(parse_silq("def f(){ x := 0:B"), SyntaxError);
  EXPECT_THROW(parse_silq("def f(){ x := 0:B; return x; x := H(x); }"), UnsupportedFeature);
  try {
    parse_silq("def f(){\n  x := ;\n}");
    FAIL();
  } catch (const SyntaxError& e) {
    EXPECT_EQ(e.line(), 2U);
  }
}

TEST(SilqParse, PrintRoundTripOnCorpus) {
  for (const auto& path : corpus_programs()) {
    const SilqAst a = parse_silq(qv_test::read_text(path));
    const std::string printed = print_silq(a);
    const SilqAst b = parse_silq(printed);
    EXPECT_TRUE(same_structure(a, b)) << path << "\n" << printed;
    EXPECT_EQ(print_silq(b), printed) << path;
  }
}

TEST(SilqTypes, SizeFunction) {
  EXPECT_EQ(size(SilqType::bit(false)), 1U);
  for (unsigned n = 1; n <= 10; ++n) EXPECT_EQ(size(SilqType::uint(n, false)), n);
}

TEST(SilqTypes, GhzTypes) {
  const SilqAst ast = load_program(qv_test::corpus("ghz2.slq"));
  const auto& body = ast.functions[0].body;
  EXPECT_TRUE(body[0].quantum);
  EXPECT_TRUE(body[1].quantum);
  const Stmt& meas = body[4];
  ASSERT_EQ(meas.kind, Stmt::Kind::Measure);
  ASSERT_TRUE(meas.target.type);
  EXPECT_EQ(*meas.target.type, SilqType::uint(2, true));
  const auto rt = return_type(ast.functions[0]);
  ASSERT_TRUE(rt);
  EXPECT_EQ(*rt, SilqType::uint(2, true));
}

TEST(SilqTypes, HadamardKeepsQuantumBit) {
  const SilqAst ast = load_program("def f(){ x := 0:B; x := H(x); }");
  const Stmt& s = ast.functions[0].body[1];
  ASSERT_TRUE(s.target.type);
  EXPECT_EQ(*s.target.type, SilqType::bit(false));
}

TEST(SilqTypes, OracleConditionIsQuantum) {
  const SilqAst ast = load_program(qv_test::corpus("dj2.slq"));
  for (const auto& s : ast.functions[0].body)
    if (s.kind == Stmt::Kind::If) {
      EXPECT_TRUE(s.quantum);
    }
  const SilqAst c = load_program(qv_test::corpus("cond_flip.slq"));
  for (const auto& s : c.functions[0].body)
    if (s.kind == Stmt::Kind::If) {
      EXPECT_FALSE(s.quantum);
    }
}

TEST(SilqTypes, Errors) {
  EXPECT_THROW(load_program("def f(){ x := 0:B; c := 1; if x { c = 2; } }"), MixedConditionError);
  EXPECT_THROW(load_program("def f(){ x := 0:B; x := measure(x); x := H(x); }"), TypeError);
  EXPECT_THROW(load_program("def f(){ y := 0:uint[2]; y[2] := X(y[2]); }"), TypeError);
}

TEST(SilqAngles, MultiplesOfQuarterPi) {
  const auto angle = [](const std::string& text) {
    const SilqAst ast = parse_silq("def f(){ phase(" + text + "); }");
    return angle_of(ast.functions[0].body[0].value);
  };
  EXPECT_EQ(angle("pi"), Rational(1));
  EXPECT_EQ(angle("pi/4"), Rational(1, 4));
  EXPECT_EQ(angle("3*pi/4"), Rational(3, 4));
  EXPECT_THROW(angle("pi*pi"), UnsupportedAngle);
  EXPECT_THROW(lower_function(load_program("def f(){ x := 0:B; if x { phase(pi/3); } }"), "f"), UnsupportedAngle);
}
