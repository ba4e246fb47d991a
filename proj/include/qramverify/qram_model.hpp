#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qramverify/gate_algebra.hpp"
#include "qramverify/op_instr.hpp"

namespace qramverify {

struct Register {
  std::string name;
  unsigned size = 1;
  std::int64_t ver = 0;
  friend bool operator==(const Register&, const Register&) = default;
};

enum class MemoryTag { Classical, Quantum };

/// Persistent variable-to-register map. Operations return new memories.
class Memory {
 public:
  explicit Memory(MemoryTag tag = MemoryTag::Quantum) : tag_(tag) {}

  MemoryTag tag() const { return tag_; }
  bool contains(const std::string& name) const { return regs_.count(name) != 0; }
  std::optional<Register> lookup(const std::string& name) const;
  /// Throws AbsentVariable.
  const Register& at(const std::string& name) const;
  const std::map<std::string, Register>& registers() const { return regs_; }
  bool empty() const { return regs_.empty(); }

  friend bool operator==(const Memory&, const Memory&) = default;

 private:
  friend Memory mem_add(const Memory&, const std::string&, unsigned);
  friend Memory mem_iter(const Memory&, const std::string&);
  friend Memory mem_del(const Memory&, const std::string&);

  MemoryTag tag_;
  std::map<std::string, Register> regs_;
};

Memory mem_add(const Memory& m, const std::string& x, unsigned size);
Memory mem_iter(const Memory& m, const std::string& x);
Memory mem_amend(const Memory& m, const std::string& x, unsigned size);
Memory mem_del(const Memory& m, const std::string& x);

// Quantum instructions.
struct QSkip {
  friend bool operator==(const QSkip&, const QSkip&) = default;
};
struct QInit {
  std::string var;
  unsigned size = 1;
  std::uint64_t value = 0;
  friend bool operator==(const QInit&, const QInit&) = default;
};
/// `u` has dimension 2^size(var); controls live in the process's Γ.
struct QOp {
  SymbolicMatrix u;
  std::string var;
  friend bool operator==(const QOp& a, const QOp& b) { return a.var == b.var && a.u == b.u; }
};
struct QMeas {
  std::string var;
  friend bool operator==(const QMeas&, const QMeas&) = default;
};
using QInst = std::variant<QSkip, QInit, QOp, QMeas>;

// Classical instructions.
struct CSkip {
  friend bool operator==(const CSkip&, const CSkip&) = default;
};
/// Unbounded variables (integer literals without a declared width) carry
/// bounded = false; bounded values wrap modulo 2^size.
struct CSet {
  std::string var;
  unsigned size = 1;
  Operand value;
  bool bounded = true;
  friend bool operator==(const CSet& a, const CSet& b) {
    return a.var == b.var && a.size == b.size && a.bounded == b.bounded && operand_equal(a.value, b.value);
  }
};
struct CMeas {
  std::string var;
  friend bool operator==(const CMeas&, const CMeas&) = default;
};
struct Return {
  std::string var;
  friend bool operator==(const Return&, const Return&) = default;
};
using CInst = std::variant<CSkip, CSet, CMeas, Return>;

/// One conditional in force. `quantum` holds when the predicate reads
/// quantum variables.
struct CtrlInstr {
  OpInstr op;
  bool quantum = false;
  friend bool operator==(const CtrlInstr& a, const CtrlInstr& b) { return a.quantum == b.quantum && a.op == b.op; }
};

struct QramProcess {
  QInst q = QSkip{};
  Memory mem_q{MemoryTag::Quantum};
  CInst c = CSkip{};
  Memory mem_c{MemoryTag::Classical};
  /// Outermost conditional first.
  std::vector<CtrlInstr> gamma;
};

struct OracleParam {
  std::string name;
  unsigned arg_bits = 1;
  friend bool operator==(const OracleParam&, const OracleParam&) = default;
};

struct ClassicalInput {
  std::string name;
  unsigned size = 1;
  friend bool operator==(const ClassicalInput&, const ClassicalInput&) = default;
};

struct QramProgram {
  std::string function;
  std::vector<OracleParam> oracles;
  std::vector<ClassicalInput> inputs;
  /// Classical memory before the first process: inputs at version 0.
  Memory initial_c{MemoryTag::Classical};
  std::vector<QramProcess> processes;
};

bool is_skip(const QInst& q);
bool is_skip(const CInst& c);
std::string to_string(const QInst& q);
std::string to_string(const CInst& c);
std::string to_string(const Register& r);
std::string to_string(const Memory& m);
std::string to_string(const CtrlInstr& g);

struct Violation {
  std::size_t process = 0;
  enum class Rule { OneInstruction, MeasurePairing, MemoryStep } rule = Rule::OneInstruction;
  std::string message;
};

/// Every breach of the one-instruction, QMEAS/CMEAS pairing and
/// one-memory-operation rules. Empty iff the program is valid.
std::vector<Violation> validate_program(const QramProgram& p);

/// Line-oriented text form, one process per line.
std::string dump_ir(const QramProgram& p);

}  // namespace qramverify
