#include <gtest/gtest.h>

#include <random>

#include "qramverify/errors.hpp"
#include "qramverify/term.hpp"

using namespace qramverify;
using namespace qramverify::logic;

TEST(Rational, ParseDecimal) {
  EXPECT_EQ(parse_decimal("0.5"), Rational(1, 2));
  EXPECT_EQ(parse_decimal("3"), Rational(3));
  EXPECT_EQ(parse_decimal("0.75"), Rational(3, 4));
  EXPECT_EQ(to_string(Rational(-1, 2)), "-1/2");
  EXPECT_TRUE(is_integer(Rational(4, 2)));
  EXPECT_EQ(to_int64(Rational(-7)), -7);
}

TEST(Term, ConstantFolding) {
  EXPECT_EQ(add(int_const(2), int_const(3)), int_const(5));
  EXPECT_EQ(mul(int_const(0), var("x", Sort::Int)), int_const(0));
  EXPECT_EQ(and_(bool_const(true), var("p", Sort::Bool)), var("p", Sort::Bool));
  EXPECT_TRUE(or_(bool_const(true), var("p", Sort::Bool)).is_true());
  EXPECT_EQ(to_smt(add(var("x", Sort::Int), int_const(2))), "(+ x 2)");
}

TEST(Term, RationalsPrintAsFractions) {
  EXPECT_EQ(to_smt(real_const(Rational(1, 2))), "(/ 1.0 2.0)");
  EXPECT_EQ(to_smt(real_const(Rational(-3, 4))), "(- (/ 3.0 4.0))");
}

TEST(Term, MixedSortsInsertToReal) {
  const Term t = add(var("n", Sort::Int), var("r", Sort::Real));
  EXPECT_EQ(t.sort(), Sort::Real);
  EXPECT_EQ(to_smt(t), "(+ (to_real n) r)");
}

TEST(Term, EuclideanDivModProperty) {
  for (int a = -20; a <= 20; ++a)
    for (int m : {-5, -3, -1, 1, 2, 7}) {
      const BigInt q = euclid_div(a, m), r = euclid_mod(a, m);
      EXPECT_EQ(BigInt(a), q * m + r) << a << " " << m;
      EXPECT_GE(r, 0);
      EXPECT_LT(r, abs(BigInt(m)));
    }
}

TEST(Term, EvaluateMatchesFolding) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> d(-30, 30);
  for (int i = 0; i < 200; ++i) {
    const int a = d(rng), b = d(rng);
    const Term x = var("x", Sort::Int), y = var("y", Sort::Int);
    const Term t = sub(mul(x, add(y, int_const(3))), x);
    const std::map<std::string, Rational> env{{"x", a}, {"y", b}};
    EXPECT_EQ(evaluate_number(t, env), Rational(a * (b + 3) - a));
    EXPECT_EQ(evaluate_number(substitute(t, {{"x", int_const(a)}, {"y", int_const(b)}}), {}),
              Rational(a * (b + 3) - a));
  }
}

TEST(Term, EvaluateRejectsUnbound) {
  EXPECT_THROW(evaluate_number(var("z", Sort::Int), {}), UndeclaredSymbol);
}

TEST(Term, ApproxEvaluation) {
  const Term s = var("s", Sort::Real);
  const Term t = eq(mul(s, s), real_const(Rational(1, 2)));
  EXPECT_TRUE(evaluate_bool_approx(t, {{"s", 0.7071067811865476}}, 1e-9));
  EXPECT_FALSE(evaluate_bool_approx(t, {{"s", 0.7}}, 1e-9));
}

TEST(Term, CollectVars) {
  std::set<std::string> vars;
  collect_vars(implies(eq(var("a", Sort::Int), int_const(1)), lt(var("b", Sort::Int), var("a", Sort::Int))), vars);
  EXPECT_EQ(vars, (std::set<std::string>{"a", "b"}));
}
