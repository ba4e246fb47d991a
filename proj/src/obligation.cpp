#include "qramverify/obligation.hpp"

#include "qramverify/errors.hpp"
#include "qramverify/naming.hpp"

namespace qramverify {

const char* to_string(Group g) {
  switch (g) {
    case Group::Prog: return "prog";
    case Group::Pre: return "pre";
    case Group::Post: return "post";
  }
  return "?";
}

void ObligationSet::add(logic::Term t) {
  if (!t.is_true()) assertions.push_back(std::move(t));
}

void ObligationSet::define(logic::Term t) {
  if (!t.is_true()) definitions.push_back(std::move(t));
}

void ObligationSet::append(const ObligationSet& other) {
  assertions.insert(assertions.end(), other.assertions.begin(), other.assertions.end());
  definitions.insert(definitions.end(), other.definitions.begin(), other.definitions.end());
}

logic::Term ObligationSet::conjunction() const { return logic::and_(assertions); }

std::string Generation::register_label() const {
  std::string out;
  for (const auto& e : layout.entries()) {
    if (!out.empty()) out += "|";
    auto it = versions.find(e.name);
    out += "q" + e.name + "v" + std::to_string(it == versions.end() ? 0 : it->second);
  }
  return out;
}

const SymbolDecl& SymbolTable::declare(SymbolDecl decl) {
  auto it = index_.find(decl.name);
  if (it != index_.end()) {
    const SymbolDecl& old = symbols_[it->second];
    if (old.sort != decl.sort || old.lower != decl.lower || old.upper != decl.upper)
      throw Error("symbol " + decl.name + " declared twice with different sorts or ranges");
    return old;
  }
  index_.emplace(decl.name, symbols_.size());
  symbols_.push_back(std::move(decl));
  return symbols_.back();
}

const SymbolDecl& SymbolTable::at(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UndeclaredSymbol(name);
  return symbols_[it->second];
}

logic::Term SymbolTable::term(const std::string& name) const { return logic::var(name, at(name).sort); }

void SymbolTable::declare_oracle(const std::string& oracle, unsigned bits) {
  auto it = oracles_.find(oracle);
  if (it != oracles_.end()) {
    if (it->second != bits)
      throw SpecBindingError("oracle " + oracle + " used with " + std::to_string(bits) + " and " +
                             std::to_string(it->second) + " argument bits");
    return;
  }
  if (bits > 20) throw DomainTooLarge("oracle " + oracle + " with " + std::to_string(bits) + " argument bits");
  oracles_[oracle] = bits;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v)
    declare({naming::oracle_entry(oracle, v), logic::Sort::Int, SymbolDecl::Role::OracleEntry, Rational(0), Rational(2)});
}

}  // namespace qramverify
