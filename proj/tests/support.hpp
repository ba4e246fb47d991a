#pragma once

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "qramverify/errors.hpp"
#include "qramverify/smt_backend.hpp"

namespace qv_test {

inline std::filesystem::path corpus_dir() { return QRAMVERIFY_CORPUS_DIR; }

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string corpus(const std::string& name) { return read_text(corpus_dir() / name); }

inline qramverify::SolverConfig solver_config(double timeout = 60) {
  qramverify::SolverConfig cfg;
  if (const char* env = std::getenv("QRAMVERIFY_SOLVER"); env && *env) cfg.executable = env;
  cfg.timeout_seconds = timeout;
  return cfg;
}

inline bool solver_available() {
  static const bool ok = [] {
    try {
      return qramverify::run_solver("(check-sat)\n", solver_config(10)).result == qramverify::SatResult::Sat;
    } catch (const qramverify::Error&) {
      return false;
    }
  }();
  return ok;
}

}  // namespace qv_test

#define REQUIRE_SOLVER()                                       \
  do {                                                         \
    if (!qv_test::solver_available()) GTEST_SKIP() << "no SMT solver"; \
  } while (0)
