#include "qramverify/qram_model.hpp"

#include <set>
#include <sstream>

#include "qramverify/errors.hpp"

namespace qramverify {

std::optional<Register> Memory::lookup(const std::string& name) const {
  auto it = regs_.find(name);
  if (it == regs_.end()) return std::nullopt;
  return it->second;
}

const Register& Memory::at(const std::string& name) const {
  auto it = regs_.find(name);
  if (it == regs_.end()) throw AbsentVariable(name);
  return it->second;
}

Memory mem_add(const Memory& m, const std::string& x, unsigned size) {
  if (m.contains(x)) throw DuplicateVariable(x);
  if (size == 0) throw Error("register " + x + " must have at least one bit");
  Memory r = m;
  r.regs_.emplace(x, Register{x, size, 0});
  return r;
}

Memory mem_iter(const Memory& m, const std::string& x) {
  if (!m.contains(x)) throw AbsentVariable(x);
  Memory r = m;
  ++r.regs_.at(x).ver;
  return r;
}

Memory mem_amend(const Memory& m, const std::string& x, unsigned size) {
  return m.contains(x) ? mem_iter(m, x) : mem_add(m, x, size);
}

Memory mem_del(const Memory& m, const std::string& x) {
  if (!m.contains(x)) throw AbsentVariable(x);
  Memory r = m;
  r.regs_.erase(x);
  return r;
}

bool is_skip(const QInst& q) { return std::holds_alternative<QSkip>(q); }
bool is_skip(const CInst& c) { return std::holds_alternative<CSkip>(c); }

std::string to_string(const QInst& q) {
  struct {
    std::string operator()(const QSkip&) const { return "SKIP"; }
    std::string operator()(const QInit& i) const {
      return "QINIT(" + i.var + "," + std::to_string(i.size) + "," + std::to_string(i.value) + ")";
    }
    std::string operator()(const QOp& o) const { return "QOP(" + o.u.label() + "," + o.var + ")"; }
    std::string operator()(const QMeas& m) const { return "QMEAS(" + m.var + ")"; }
  } visitor;
  return std::visit(visitor, q);
}

std::string to_string(const CInst& c) {
  struct {
    std::string operator()(const CSkip&) const { return "SKIP"; }
    std::string operator()(const CSet& s) const {
      return "CSET(" + s.var + "," + (s.bounded ? std::to_string(s.size) : std::string("Z")) + "," +
             to_string(s.value) + ")";
    }
    std::string operator()(const CMeas& m) const { return "CMEAS(" + m.var + ")"; }
    std::string operator()(const Return& r) const { return "RETURN(" + r.var + ")"; }
  } visitor;
  return std::visit(visitor, c);
}

std::string to_string(const Register& r) {
  return "(" + r.name + "," + std::to_string(r.size) + "," + std::to_string(r.ver) + ")";
}

std::string to_string(const Memory& m) {
  std::string out = m.tag() == MemoryTag::Quantum ? "Mq{" : "Mc{";
  bool first = true;
  for (const auto& [name, reg] : m.registers()) {
    if (!first) out += ",";
    first = false;
    out += name + ":" + to_string(reg);
  }
  return out + "}";
}

std::string to_string(const CtrlInstr& g) { return (g.quantum ? "q:" : "c:") + to_string(g.op); }

namespace {

// Checks that `cur` follows from `prev` by at most one of add/iter/amend/del.
// `seen` holds every (name, version) the memory has held so far.
void check_memory_step(const Memory& prev, const Memory& cur, std::set<std::pair<std::string, std::int64_t>>& seen,
                       std::size_t index, std::vector<Violation>& out) {
  const char* which = cur.tag() == MemoryTag::Quantum ? "quantum" : "classical";
  std::vector<std::string> changed;
  std::set<std::string> names;
  for (const auto& [n, r] : prev.registers()) names.insert(n);
  for (const auto& [n, r] : cur.registers()) names.insert(n);
  for (const auto& n : names) {
    const auto a = prev.lookup(n);
    const auto b = cur.lookup(n);
    if (a == b) continue;
    changed.push_back(n);
    if (a && b) {
      if (a->size != b->size || b->ver != a->ver + 1)
        out.push_back({index, Violation::Rule::MemoryStep,
                       std::string(which) + " register " + n + " changed from " + to_string(*a) + " to " +
                           to_string(*b) + ", which is not an iter"});
    } else if (b) {
      if (b->ver < 0 || seen.count({n, b->ver}))
        out.push_back({index, Violation::Rule::MemoryStep,
                       std::string(which) + " register " + to_string(*b) + " reuses a version"});
    }
    if (b) seen.insert({n, b->ver});
  }
  if (changed.size() > 1) {
    std::string list;
    for (const auto& n : changed) list += (list.empty() ? "" : ", ") + n;
    out.push_back({index, Violation::Rule::MemoryStep,
                   std::string(which) + " memory changed by more than one operation (" + list + ")"});
  }
}

}  // namespace

std::vector<Violation> validate_program(const QramProgram& p) {
  std::vector<Violation> out;
  Memory prev_q(MemoryTag::Quantum);
  Memory prev_c = p.initial_c;
  std::set<std::pair<std::string, std::int64_t>> seen_q;
  std::set<std::pair<std::string, std::int64_t>> seen_c;
  for (const auto& [n, r] : prev_c.registers()) seen_c.insert({n, r.ver});

  for (std::size_t i = 0; i < p.processes.size(); ++i) {
    const QramProcess& proc = p.processes[i];
    const auto* qm = std::get_if<QMeas>(&proc.q);
    const auto* cm = std::get_if<CMeas>(&proc.c);
    if (qm || cm) {
      if (!qm || !cm)
        out.push_back({i, Violation::Rule::MeasurePairing,
                       "QMEAS and CMEAS must appear together: " + to_string(proc.q) + " / " +
                           to_string(proc.c)});
    } else if (!is_skip(proc.q) && !is_skip(proc.c)) {
      out.push_back({i, Violation::Rule::OneInstruction,
                     "both " + to_string(proc.q) + " and " + to_string(proc.c) + " are active"});
    }
    check_memory_step(prev_q, proc.mem_q, seen_q, i, out);
    check_memory_step(prev_c, proc.mem_c, seen_c, i, out);
    prev_q = proc.mem_q;
    prev_c = proc.mem_c;
  }
  return out;
}

std::string dump_ir(const QramProgram& p) {
  std::ostringstream os;
  os << "# function " << p.function << "\n";
  for (const auto& o : p.oracles) os << "# oracle " << o.name << ":" << o.arg_bits << "\n";
  for (const auto& in : p.inputs) os << "# input " << in.name << ":" << in.size << "\n";
  for (const auto& proc : p.processes) {
    os << to_string(proc.q) << " | " << to_string(proc.mem_q) << " | " << to_string(proc.c) << " | "
       << to_string(proc.mem_c) << " | G[";
    for (std::size_t k = 0; k < proc.gamma.size(); ++k) os << (k ? "," : "") << to_string(proc.gamma[k]);
    os << "]\n";
  }
  return os.str();
}

}  // namespace qramverify
