// qramverify: command-line front end.

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "qramverify/errors.hpp"
#include "qramverify/pipeline.hpp"
#include "qramverify/sim_oracle.hpp"

namespace fs = std::filesystem;
using namespace qramverify;
using nlohmann::json;

namespace {

enum ExitCode { kVerified = 0, kRefuted = 1, kError = 2, kUnknown = 3, kVacuous = 4 };

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

int exit_code(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Verified: return kVerified;
    case Verdict::Status::Refuted: return kRefuted;
    case Verdict::Status::Vacuous: return kVacuous;
    case Verdict::Status::Unknown: return kUnknown;
  }
  return kError;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string default_function(const SilqAst& ast) {
  if (ast.functions.empty()) throw NoSuchFunction("program defines no function");
  return ast.functions.front().name;
}

json verdict_json(const Verdict& v, const VerificationTask& task) {
  json j;
  j["function"] = task.spec.function_name;
  j["flag"] = to_string(task.spec.flag);
  j["verdict"] = to_string(v.status);
  j["setup_seconds"] = v.setup.count();
  j["verification_seconds"] = v.solve.count();
  if (!v.reason.empty()) j["reason"] = v.reason;
  if (v.counterexample) {
    const auto& cx = *v.counterexample;
    json c;
    c["measured"] = cx.measured;
    c["oracles"] = cx.oracles;
    c["classical"] = cx.classical;
    if (cx.returned) c["returned"] = *cx.returned;
    j["counterexample"] = c;
  }
  return j;
}

void print_verdict(std::ostream& os, const Verdict& v, const VerificationTask& task) {
  os << to_string(v.status);
  if (!v.reason.empty()) os << " (" << v.reason << ")";
  os << "\n";
  os << std::fixed << std::setprecision(3);
  os << "setup time: " << v.setup.count() << " s\n";
  os << "verification time: " << v.solve.count() << " s\n";
  os.unsetf(std::ios::fixed);
  if (!v.counterexample) return;
  const auto& cx = *v.counterexample;
  os << "counterexample:\n";
  for (const auto& [name, value] : cx.measured) os << "  " << name << " = " << value << "\n";
  for (const auto& [name, table] : cx.oracles) os << "  " << name << " = " << join(table) << "\n";
  for (const auto& [name, value] : cx.classical) os << "  " << name << " = " << value << "\n";
  if (cx.returned) os << "  " << task.spec.ret_name << " = " << *cx.returned << "\n";
}

SolverConfig solver_config(const std::string& solver, double timeout) {
  SolverConfig cfg;
  if (!solver.empty()) cfg.executable = solver;
  else if (const char* env = std::getenv("QRAMVERIFY_SOLVER"); env && *env) cfg.executable = env;
  cfg.timeout_seconds = timeout;
  return cfg;
}

struct VerifyArgs {
  std::string program;
  std::string spec;
  std::string solver;
  double timeout = 60;
  std::string emit_smt;
  std::string dump_ir;
  std::string all_dir;
  bool json = false;
  bool fuse = false;
};

int run_verify_all(const VerifyArgs& a) {
  std::vector<fs::path> programs;
  for (const auto& e : fs::directory_iterator(a.all_dir))
    if (e.path().extension() == ".slq") programs.push_back(e.path());
  std::sort(programs.begin(), programs.end());
  const SolverConfig cfg = solver_config(a.solver, a.timeout);
  LoweringOptions lowering;
  lowering.fuse = a.fuse;
  json all = json::array();
  int status = kVerified;
  for (const auto& prog : programs) {
    std::vector<fs::path> specs;
    fs::path spec = prog;
    spec.replace_extension(".speq");
    if (fs::exists(spec)) specs.push_back(spec);
    const fs::path mutants = prog.parent_path() / "mutants";
    if (fs::is_directory(mutants)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(mutants)) {
        const std::string name = e.path().filename().string();
        if (e.path().extension() == ".speq" && name.rfind(prog.stem().string() + ".", 0) == 0) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      specs.insert(specs.end(), found.begin(), found.end());
    }
    for (const auto& s : specs) {
      json row;
      row["program"] = prog.filename().string();
      row["spec"] = s.lexically_relative(a.all_dir).string();
      try {
        const VerificationTask task = prepare(read_file(prog.string()), read_file(s.string()), lowering);
        const Verdict v = verify(task, cfg);
        row["verdict"] = to_string(v.status);
        row["setup_seconds"] = v.setup.count();
        row["verification_seconds"] = v.solve.count();
      } catch (const std::exception& e) {
        row["verdict"] = "Error";
        row["error"] = e.what();
        status = kError;
      }
      if (!a.json) {
        std::cout << std::left << std::setw(24) << row["program"].get<std::string>() << std::setw(44)
                  << row["spec"].get<std::string>() << std::setw(9) << row["verdict"].get<std::string>();
        if (row.contains("setup_seconds"))
          std::cout << std::fixed << std::setprecision(3) << "  setup " << row["setup_seconds"].get<double>()
                    << " s  verification " << row["verification_seconds"].get<double>() << " s";
        if (row.contains("error")) std::cout << "  " << row["error"].get<std::string>();
        std::cout << "\n";
      }
      all.push_back(row);
    }
  }
  if (a.json) std::cout << all.dump(2) << "\n";
  return status;
}

int run_verify(VerifyArgs a) {
  if (!a.all_dir.empty()) return run_verify_all(a);
  if (a.program.empty()) throw Error("verify needs a program (or --all DIR)");
  if (a.spec.empty()) {
    fs::path spec = a.program;
    spec.replace_extension(".speq");
    if (!fs::exists(spec)) {
      const SilqAst ast = load_program(read_file(a.program));
      write_file(spec.string(), generate_skeleton(ast, default_function(ast)));
      std::cerr << "wrote specification skeleton " << spec.string() << "\n";
    }
    a.spec = spec.string();
  }
  LoweringOptions lowering;
  lowering.fuse = a.fuse;
  const VerificationTask task = prepare(read_file(a.program), read_file(a.spec), lowering);
  if (!a.dump_ir.empty()) write_file(a.dump_ir, dump_ir(task.program));
  if (!a.emit_smt.empty()) write_file(a.emit_smt, task.script(true));
  const Verdict v = verify(task, solver_config(a.solver, a.timeout));
  if (a.json) std::cout << verdict_json(v, task).dump(2) << "\n";
  else print_verdict(std::cout, v, task);
  return exit_code(v.status);
}

std::pair<std::string, std::string> split_binding(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0) throw Error("expected NAME=VALUE, got " + text);
  return {text.substr(0, eq), text.substr(eq + 1)};
}

int run_simulate(const std::string& program, const std::string& function, const std::vector<std::string>& oracles,
                 const std::vector<std::string>& inputs, bool fuse, bool as_json) {
  const SilqAst ast = load_program(read_file(program));
  LoweringOptions lowering;
  lowering.fuse = fuse;
  const QramProgram p = lower_function(ast, function.empty() ? default_function(ast) : function, lowering);
  OracleTables tables;
  for (const auto& o : oracles) {
    auto [name, values] = split_binding(o);
    std::vector<int> table;
    std::stringstream ss(values);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item != "0" && item != "1") throw Error("oracle table entries must be 0 or 1: " + o);
      table.push_back(item == "1");
    }
    tables[name] = std::move(table);
  }
  ClassicalEnv env;
  for (const auto& i : inputs) {
    auto [name, value] = split_binding(i);
    env[name] = std::stoll(value);
  }
  const auto branches = run_all_branches(p, tables, env);
  json out = json::array();
  for (const auto& b : branches) {
    if (as_json) {
      json row;
      row["p"] = b.probability;
      if (b.returned) row["ret"] = *b.returned;
      out.push_back(row);
    } else {
      std::cout << "p=" << std::setprecision(12) << b.probability << " ret=";
      if (b.returned) std::cout << *b.returned;
      else std::cout << "none";
      std::cout << "\n";
    }
  }
  if (as_json) std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verifier for Silq-Hybrid programs against SilSpeq specifications"};
  app.require_subcommand(1);

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Verify a program against its specification");
  verify_cmd->add_option("program", va.program, "Silq-Hybrid source (.slq)");
  verify_cmd->add_option("spec", va.spec, "SilSpeq specification (.speq); defaults to the program's .speq");
  verify_cmd->add_option("--solver", va.solver, "SMT solver executable (default: $QRAMVERIFY_SOLVER or z3)");
  verify_cmd->add_option("--timeout", va.timeout, "Per-query solver timeout in seconds")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--emit-smt", va.emit_smt, "Write the query script to FILE");
  verify_cmd->add_option("--dump-ir", va.dump_ir, "Write the QRAM program to FILE");
  verify_cmd->add_option("--all", va.all_dir, "Verify every DIR/*.slq against DIR/*.speq and DIR/mutants");
  verify_cmd->add_flag("--json", va.json, "Machine-readable output");
  verify_cmd->add_flag("--fuse", va.fuse, "Merge adjacent single-qubit gates");

  std::string gen_program, gen_function, gen_output;
  auto* gen_cmd = app.add_subcommand("gen-spec", "Write a specification skeleton next to the program");
  gen_cmd->add_option("program", gen_program, "Silq-Hybrid source")->required();
  gen_cmd->add_option("--function", gen_function, "Function to specify (default: the first)");
  gen_cmd->add_option("-o,--output", gen_output, "Output path (default: program with .speq extension)");

  std::string emit_program, emit_spec, emit_output;
  bool emit_sanity = false;
  bool emit_fuse = false;
  auto* emit_cmd = app.add_subcommand("emit-smt", "Print the SMT-LIB2 query");
  emit_cmd->add_option("program", emit_program)->required();
  emit_cmd->add_option("spec", emit_spec)->required();
  emit_cmd->add_option("-o,--output", emit_output, "Write to FILE instead of stdout");
  emit_cmd->add_flag("--sanity", emit_sanity, "Emit the prog and pre query instead of the negated post query");
  emit_cmd->add_flag("--fuse", emit_fuse, "Merge adjacent single-qubit gates");

  std::string ir_program, ir_function;
  bool ir_fuse = false;
  auto* ir_cmd = app.add_subcommand("dump-ir", "Print the lowered QRAM program");
  ir_cmd->add_option("program", ir_program)->required();
  ir_cmd->add_option("--function", ir_function, "Function to lower (default: the first)");
  ir_cmd->add_flag("--fuse", ir_fuse, "Merge adjacent single-qubit gates");

  std::string sim_program, sim_function;
  std::vector<std::string> sim_oracles, sim_inputs;
  bool sim_fuse = false;
  bool sim_json = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Enumerate measurement branches with the state-vector simulator");
  sim_cmd->add_option("program", sim_program)->required();
  sim_cmd->add_option("--function", sim_function, "Function to run (default: the first)");
  sim_cmd->add_option("--oracle", sim_oracles, "Oracle table, e.g. f=0,1,1,0");
  sim_cmd->add_option("--input", sim_inputs, "Classical input, e.g. b=1");
  sim_cmd->add_flag("--fuse", sim_fuse, "Merge adjacent single-qubit gates");
  sim_cmd->add_flag("--json", sim_json, "Machine-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kError;
  }

  try {
    if (*verify_cmd) return run_verify(va);
    if (*gen_cmd) {
      const SilqAst ast = load_program(read_file(gen_program));
      fs::path out = gen_output.empty() ? fs::path(gen_program).replace_extension(".speq") : fs::path(gen_output);
      if (fs::exists(out)) {
        std::cerr << "error: " << out.string() << " already exists\n";
        return kError;
      }
      write_file(out.string(), generate_skeleton(ast, gen_function.empty() ? default_function(ast) : gen_function));
      std::cout << out.string() << "\n";
      return 0;
    }
    if (*emit_cmd) {
      LoweringOptions lowering;
      lowering.fuse = emit_fuse;
      const VerificationTask task = prepare(read_file(emit_program), read_file(emit_spec), lowering);
      EmitOptions options;
      options.negate_post = !emit_sanity;
      const std::string script =
          emit_smt(task.obligations.prog, task.encoded.pre, task.encoded.post, task.obligations.symbols, options);
      if (emit_output.empty()) std::cout << script;
      else write_file(emit_output, script);
      return 0;
    }
    if (*ir_cmd) {
      const SilqAst ast = load_program(read_file(ir_program));
      LoweringOptions lowering;
      lowering.fuse = ir_fuse;
      std::cout << dump_ir(lower_function(ast, ir_function.empty() ? default_function(ast) : ir_function, lowering));
      return 0;
    }
    if (*sim_cmd) return run_simulate(sim_program, sim_function, sim_oracles, sim_inputs, sim_fuse, sim_json);
  } catch (const SyntaxError& e) {
    std::cerr << "syntax error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}
