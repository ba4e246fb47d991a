#include "qramverify/pipeline.hpp"

#include "qramverify/errors.hpp"
#include "qramverify/naming.hpp"

namespace qramverify {

SilqAst load_program(const std::string& source) {
  return type_check(parse_silq(source));
}

SpecBinding make_binding(const QramProgram& program, const ProgramObligations& obligations) {
  if (!obligations.ret) throw NoClassicalReturn(program.function + " returns no classical value");
  SpecBinding b;
  b.ret = *obligations.ret;
  for (const auto& in : program.inputs) {
    const std::int64_t w = program.initial_c.contains(in.name) ? program.initial_c.at(in.name).ver : 0;
    b.inputs[in.name] = obligations.symbols.term(naming::classical(in.name, w));
  }
  for (const auto& o : program.oracles) b.oracles[o.name] = o.arg_bits;
  return b;
}

std::string VerificationTask::script(bool get_model) const {
  EmitOptions options;
  options.get_model = get_model;
  return emit_smt(obligations.prog, encoded.pre, encoded.post, obligations.symbols, options);
}

VerificationTask prepare(const std::string& program_source, const std::string& spec_source,
                         const LoweringOptions& lowering) {
  const auto start = std::chrono::steady_clock::now();
  VerificationTask task;
  task.ast = load_program(program_source);
  task.spec = parse_speq(spec_source);
  task.program = lower_function(task.ast, task.spec.function_name, lowering);
  task.obligations = gen_program(task.program, task.spec.flag);
  task.encoded = encode_spec(task.spec, make_binding(task.program, task.obligations), task.obligations.symbols);
  task.setup = std::chrono::steady_clock::now() - start;
  return task;
}

Verdict verify(const VerificationTask& task, const SolverConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  Verdict v = check(task.obligations.prog, task.encoded.pre, task.encoded.post, task.obligations.symbols, cfg);
  // Script emission counts as setup; solver wall time is already in v.solve.
  v.setup = task.setup + (std::chrono::steady_clock::now() - start) - v.solve;
  return v;
}

}  // namespace qramverify
