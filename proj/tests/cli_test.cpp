#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>

#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun cli(const std::string& args) {
  const std::string cmd = std::string(QRAMVERIFY_CLI) + " " + args + " 2>&1";
  CliRun r;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string c(const std::string& name) { return (qv_test::corpus_dir() / name).string(); }

fs::path scratch_dir(const std::string& tag) {
  const fs::path d = fs::temp_directory_path() / ("qramverify-cli-" + tag + "-" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST(Cli, VerifyExitCodes) {
  REQUIRE_SOLVER();
  const CliRun ok = cli("verify " + c("ghz2.slq") + " " + c("ghz2.speq"));
  EXPECT_EQ(ok.code, 0) << ok.out;
  EXPECT_EQ(ok.out.rfind("Verified", 0), 0U) << ok.out;
  EXPECT_NE(ok.out.find("setup time:"), std::string::npos);
  EXPECT_NE(ok.out.find("verification time:"), std::string::npos);

  const CliRun bad = cli("verify " + c("ghz2.slq") + " " + c("mutants/ghz2.wrong_post.speq"));
  EXPECT_EQ(bad.code, 1) << bad.out;
  EXPECT_NE(bad.out.find("counterexample:"), std::string::npos);
  EXPECT_NE(bad.out.find("meas_y = "), std::string::npos) << bad.out;

  EXPECT_EQ(cli("verify " + c("ghz2.slq") + " " + c("mutants/ghz2.contradictory_pre.speq")).code, 4);
  EXPECT_EQ(cli("verify " + c("ghz2.slq") + " /nonexistent.speq").code, 2);
  EXPECT_EQ(cli("verify " + c("ghz2.slq") + " " + c("ghz2.speq") + " --solver /nonexistent/z3").code, 2);
}

TEST(Cli, TimeoutGivesUnknown) {
  const fs::path d = scratch_dir("timeout");
  const fs::path solver = d / "slow.sh";
  std::ofstream(solver) << "#!/bin/sh\nsleep 30\n";
  fs::permissions(solver, fs::perms::owner_all);
  const CliRun r = cli("verify " + c("ghz2.slq") + " " + c("ghz2.speq") + " --timeout 0.5 --solver " + solver.string());
  EXPECT_EQ(r.code, 3) << r.out;
  EXPECT_NE(r.out.find("Unknown"), std::string::npos);
  fs::remove_all(d);
}

TEST(Cli, JsonVerdict) {
  REQUIRE_SOLVER();
  const CliRun r = cli("verify --json " + c("ghz2.slq") + " " + c("mutants/ghz2.wrong_post.speq"));
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.out.find("\"verdict\": \"Refuted\""), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("\"meas_y\""), std::string::npos) << r.out;
}

TEST(Cli, GenSpec) {
  const fs::path d = scratch_dir("gen");
  fs::copy_file(c("ghz2.slq"), d / "ghz2.slq");
  const CliRun first = cli("gen-spec " + (d / "ghz2.slq").string());
  EXPECT_EQ(first.code, 0) << first.out;
  EXPECT_EQ(qv_test::read_text(d / "ghz2.speq"), "ghz[rand]()->\n(define ghz_ret:{0, 1}^2)\npre{\n}\npost{\n}");
  const CliRun second = cli("gen-spec " + (d / "ghz2.slq").string());
  EXPECT_EQ(second.code, 2);
  EXPECT_NE(second.out.find("already exists"), std::string::npos);
  fs::remove_all(d);
}

TEST(Cli, DumpIrAndEmitSmt) {
  const CliRun ir = cli("dump-ir " + c("ghz2.slq"));
  EXPECT_EQ(ir.code, 0);
  EXPECT_NE(ir.out.find("QINIT(x,1,0)"), std::string::npos) << ir.out;
  EXPECT_NE(ir.out.find("QMEAS(y)"), std::string::npos);
  const CliRun smt = cli("emit-smt " + c("ghz2.slq") + " " + c("ghz2.speq"));
  EXPECT_EQ(smt.code, 0);
  EXPECT_EQ(smt.out.rfind("(set-logic ALL)", 0), 0U) << smt.out.substr(0, 200);
  EXPECT_NE(smt.out.find("(check-sat)"), std::string::npos);
}

TEST(Cli, Simulate) {
  const CliRun r = cli("simulate " + c("dj2.slq") + " --oracle f=0,0,0,0");
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "p=1 ret=0\n");
  EXPECT_EQ(cli("simulate " + c("dj2.slq") + " --oracle f=0,2,0,0").code, 2);
}

TEST(Cli, SyntaxErrors) {
  const fs::path d = scratch_dir("syntax");
  std::ofstream(d / "bad.slq") << "def f(){\n  x := ;\n}\n";
  const CliRun r = cli("dump-ir " + (d / "bad.slq").string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.out.find("syntax error: 2:"), std::string::npos) << r.out;
  EXPECT_EQ(cli("frobnicate").code, 2);
  fs::remove_all(d);
}
