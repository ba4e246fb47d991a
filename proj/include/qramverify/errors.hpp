#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qramverify {

/// Base class for every diagnostic raised by the verifier pipeline.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define QRAMVERIFY_DEFINE_ERROR(Name)  \
  class Name : public Error {          \
   public:                             \
    using Error::Error;                \
  };

/// Raised by the lexers and parsers. Carries a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t line, std::size_t col, const std::string& expected)
      : Error(std::to_string(line) + ":" + std::to_string(col) + ": expected " + expected),
        line_(line),
        col_(col),
        expected_(expected) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t col() const noexcept { return col_; }
  const std::string& expected() const noexcept { return expected_; }

 private:
  std::size_t line_;
  std::size_t col_;
  std::string expected_;
};

// Silq-Hybrid front end.
QRAMVERIFY_DEFINE_ERROR(UnsupportedFeature)
QRAMVERIFY_DEFINE_ERROR(UseBeforeDefine)
QRAMVERIFY_DEFINE_ERROR(TypeError)
QRAMVERIFY_DEFINE_ERROR(MixedConditionError)

// SilSpeq front end.
QRAMVERIFY_DEFINE_ERROR(ScopeError)
QRAMVERIFY_DEFINE_ERROR(FlagError)
QRAMVERIFY_DEFINE_ERROR(ArityError)
QRAMVERIFY_DEFINE_ERROR(NoSuchFunction)
QRAMVERIFY_DEFINE_ERROR(NoClassicalReturn)
QRAMVERIFY_DEFINE_ERROR(UnboundedQuantifier)
QRAMVERIFY_DEFINE_ERROR(NonFiniteFunction)
QRAMVERIFY_DEFINE_ERROR(SpecBindingError)

// QRAM model and lowering.
QRAMVERIFY_DEFINE_ERROR(AbsentVariable)
QRAMVERIFY_DEFINE_ERROR(DuplicateVariable)
QRAMVERIFY_DEFINE_ERROR(LoweringError)
QRAMVERIFY_DEFINE_ERROR(NonBooleanCondition)

// Gate algebra.
QRAMVERIFY_DEFINE_ERROR(UnsupportedAngle)
QRAMVERIFY_DEFINE_ERROR(WireOutOfRange)
QRAMVERIFY_DEFINE_ERROR(NonBooleanPredicate)
QRAMVERIFY_DEFINE_ERROR(DimensionMismatch)

// Obligation generation.
QRAMVERIFY_DEFINE_ERROR(LayoutMismatch)
QRAMVERIFY_DEFINE_ERROR(ControlOnTarget)

// SMT back end.
QRAMVERIFY_DEFINE_ERROR(UndeclaredSymbol)
QRAMVERIFY_DEFINE_ERROR(SolverSpawnError)
QRAMVERIFY_DEFINE_ERROR(SolverProtocolError)

// Simulator.
QRAMVERIFY_DEFINE_ERROR(UnboundOracle)
QRAMVERIFY_DEFINE_ERROR(DomainTooLarge)

#undef QRAMVERIFY_DEFINE_ERROR

}  // namespace qramverify
