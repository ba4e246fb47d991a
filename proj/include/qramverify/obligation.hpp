#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qramverify/gate_algebra.hpp"
#include "qramverify/rational.hpp"
#include "qramverify/term.hpp"

namespace qramverify {

enum class Group { Prog, Pre, Post };

const char* to_string(Group g);

/// Ordered conjunction of assertions. `definitions` bind auxiliary symbols
/// (e.g. the returned-value link) and are asserted positively even in a
/// negated post group.
struct ObligationSet {
  Group group = Group::Prog;
  std::vector<logic::Term> assertions;
  std::vector<logic::Term> definitions;

  bool empty() const { return assertions.empty() && definitions.empty(); }
  void add(logic::Term t);
  void define(logic::Term t);
  void append(const ObligationSet& other);
  /// Conjunction of the assertions only.
  logic::Term conjunction() const;
};

struct SymbolDecl {
  enum class Role {
    Classical,
    Amplitude,
    Probability,
    SqrtWitness,
    Measured,
    OracleEntry,
    SpecVar,
    Witness,
    Constant,
  };

  std::string name;
  logic::Sort sort = logic::Sort::Real;
  Role role = Role::Classical;
  /// Inclusive lower and exclusive upper bound, asserted with the declaration.
  std::optional<Rational> lower;
  std::optional<Rational> upper;
};

/// Quantum-state generation record: which layout and which register
/// versions the amplitudes sv{t}_* describe.
struct Generation {
  std::int64_t index = 0;
  QubitLayout layout;
  std::map<std::string, std::int64_t> versions;
  /// Amplitude parts (indexed by naming::AmpPart) that are identically zero.
  std::vector<std::array<bool, 4>> zero_parts;

  /// Register label of the state, e.g. "qxv2|qyv0".
  std::string register_label() const;
};

struct MeasurementRecord {
  std::string quantum_var;
  std::int64_t version = 0;
  std::string classical_var;
  std::int64_t classical_version = 0;
  unsigned size = 1;
  std::int64_t generation = 0;
};

/// Declared symbols in declaration order plus the generation manifest.
class SymbolTable {
 public:
  /// Declares `decl`; a repeated name must carry an identical declaration.
  const SymbolDecl& declare(SymbolDecl decl);
  bool contains(const std::string& name) const { return index_.count(name) != 0; }
  const SymbolDecl& at(const std::string& name) const;
  const std::vector<SymbolDecl>& symbols() const { return symbols_; }

  logic::Term term(const std::string& name) const;

  /// Declares the oracle table f_0 .. f_{2^bits - 1} (0/1 integers).
  void declare_oracle(const std::string& oracle, unsigned bits);
  /// Table entries by oracle name, bit widths included.
  const std::map<std::string, unsigned>& oracles() const { return oracles_; }

  std::vector<Generation>& generations() { return generations_; }
  const std::vector<Generation>& generations() const { return generations_; }
  std::vector<MeasurementRecord>& measurements() { return measurements_; }
  const std::vector<MeasurementRecord>& measurements() const { return measurements_; }

  /// Generation describing the current joint state; empty before the first
  /// QINIT and after the last live variable is measured.
  std::optional<std::size_t> live_generation;

  /// Latest classical versions (variable -> version), final after the program.
  std::map<std::string, std::int64_t> final_classical;
  std::map<std::string, unsigned> classical_sizes;
  /// Returned value once RETURN has been processed.
  std::optional<logic::Term> returned;
  std::optional<std::string> returned_var;

 private:
  std::vector<SymbolDecl> symbols_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, unsigned> oracles_;
  std::vector<Generation> generations_;
  std::vector<MeasurementRecord> measurements_;
};

}  // namespace qramverify
