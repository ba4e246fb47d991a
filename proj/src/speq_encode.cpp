#include <functional>

#include "qramverify/errors.hpp"
#include "qramverify/naming.hpp"
#include "qramverify/speq.hpp"

namespace qramverify {

namespace {

using logic::Term;
using K = SpeqExpr::Kind;

constexpr unsigned kMaxEnumeratedBits = 20;

std::uint64_t domain_size(const SpeqType& t, const std::string& what) {
  if (t.kind == SpeqType::Kind::Nat) throw UnboundedQuantifier(what + " ranges over N");
  if (t.kind == SpeqType::Kind::Function) throw ScopeError(what + " ranges over a function type");
  if (t.bits > kMaxEnumeratedBits) throw DomainTooLarge(what + " ranges over " + std::to_string(t.bits) + " bits");
  return std::uint64_t{1} << t.bits;
}

std::uint64_t table_size(const std::string& name, const SpeqType& t) {
  if (t.arg->kind != SpeqType::Kind::BitVec) throw NonFiniteFunction(name + " has domain " + to_string(*t.arg));
  if (t.arg->bits > kMaxEnumeratedBits)
    throw DomainTooLarge(name + " has " + std::to_string(t.arg->bits) + " argument bits");
  return std::uint64_t{1} << t.arg->bits;
}

std::optional<Rational> upper_of(const SpeqType& t) {
  if (t.kind == SpeqType::Kind::BitVec) return Rational(pow2(t.bits));
  return std::nullopt;
}

Term num(const BigInt& v) { return logic::int_const(Rational(v)); }

/// Width of a dot-product operand, if it is a bit-vector variable or a
/// bit-vector-valued application.
std::optional<unsigned> width_of(const SpeqExpr& e, const SpeqSpec& spec) {
  if (e.kind == K::Var) {
    auto t = spec.type_of(e.name);
    if (t && t->kind == SpeqType::Kind::BitVec) return t->bits;
  } else if (e.kind == K::Apply) {
    auto t = spec.type_of(e.name);
    if (t && t->kind == SpeqType::Kind::Function && t->result->kind == SpeqType::Kind::BitVec) return t->result->bits;
  }
  return std::nullopt;
}

unsigned dot_width(const SpeqExpr& e, const SpeqSpec& spec) {
  auto l = width_of(e.args[0], spec);
  auto r = width_of(e.args[1], spec);
  if (l && r && *l != *r) throw ArityError("dot product of widths " + std::to_string(*l) + " and " + std::to_string(*r));
  if (!l && !r) throw ArityError("dot product " + to_string(e) + " has no bit-vector operand");
  return l ? *l : *r;
}

/// A bare function name under SUM means its application to the bound variable.
SpeqExpr sum_body(const SpeqExpr& e, const SpeqSpec& spec) {
  const SpeqExpr& body = e.args[0];
  if (body.kind == K::Var) {
    auto t = spec.type_of(body.name);
    if (t && t->kind == SpeqType::Kind::Function) {
      SpeqExpr var;
      var.kind = K::Var;
      var.name = e.name;
      SpeqExpr app;
      app.kind = K::Apply;
      app.name = body.name;
      app.args.push_back(var);
      return app;
    }
  }
  return body;
}

class Encoder {
 public:
  explicit Encoder(const SpeqSpec& spec) : spec_(spec) {}

  void bind_scalar(const std::string& name, Term t) { scalars_[name] = std::move(t); }
  void bind_table(const std::string& name, std::vector<Term> entries) { tables_[name] = std::move(entries); }

  Term logic(const SpeqExpr& e) {
    switch (e.kind) {
      case K::False: return logic::bool_const(false);
      case K::True: return logic::bool_const(true);
      case K::Eq: return logic::eq(arith(e.args[0]), arith(e.args[1]));
      case K::Ne: return logic::not_(logic::eq(arith(e.args[0]), arith(e.args[1])));
      case K::Lt: return logic::lt(arith(e.args[0]), arith(e.args[1]));
      case K::Le: return logic::le(arith(e.args[0]), arith(e.args[1]));
      case K::Gt: return logic::gt(arith(e.args[0]), arith(e.args[1]));
      case K::Ge: return logic::ge(arith(e.args[0]), arith(e.args[1]));
      case K::Not: return logic::not_(logic(e.args[0]));
      case K::And: return logic::and_(logic(e.args[0]), logic(e.args[1]));
      case K::Or: return logic::or_(logic(e.args[0]), logic(e.args[1]));
      case K::Implies: return logic::implies(logic(e.args[0]), logic(e.args[1]));
      case K::Forall:
      case K::Exists: {
        std::vector<Term> parts;
        for_each_value(e.name, [&] { parts.push_back(logic(e.args[0])); });
        return e.kind == K::Forall ? logic::and_(parts) : logic::or_(parts);
      }
      default: throw ScopeError("arithmetic expression " + to_string(e) + " used as a formula");
    }
  }

  Term arith(const SpeqExpr& e) {
    switch (e.kind) {
      case K::Num: return num(e.value);
      case K::Var: {
        auto it = scalars_.find(e.name);
        if (it == scalars_.end()) throw ScopeError("undeclared variable " + e.name);
        return it->second;
      }
      case K::Apply: return apply(e.name, arith(e.args[0]));
      case K::Add: return logic::add(arith(e.args[0]), arith(e.args[1]));
      case K::Sub: return logic::sub(arith(e.args[0]), arith(e.args[1]));
      case K::Mul: return logic::mul(arith(e.args[0]), arith(e.args[1]));
      case K::Div:
      case K::Mod: {
        Term d = arith(e.args[1]);
        if (d.is_const() && d.value() == 0) throw Error("division by zero in " + to_string(e));
        Term n = arith(e.args[0]);
        return e.kind == K::Div ? logic::int_div(n, d) : logic::mod(n, d);
      }
      case K::Neg: return logic::neg(arith(e.args[0]));
      case K::Pow: {
        Term base = arith(e.args[0]);
        Term exp = arith(e.args[1]);
        if (!exp.is_const() || !is_integer(exp.value()) || exp.value() < 0 || exp.value() > 64)
          throw UnsupportedFeature("exponent of " + to_string(e) + " must be a constant in [0, 64]");
        std::vector<Term> factors(static_cast<std::size_t>(to_int64(exp.value())), base);
        return factors.empty() ? num(1) : logic::mul(factors);
      }
      case K::Dot: {
        const unsigned w = dot_width(e, spec_);
        Term a = arith(e.args[0]);
        Term b = arith(e.args[1]);
        std::vector<Term> terms;
        for (unsigned i = 0; i < w; ++i) terms.push_back(logic::mul(bit(a, i), bit(b, i)));
        return logic::add(terms);
      }
      case K::Sum: {
        const SpeqExpr body = sum_body(e, spec_);
        std::vector<Term> terms;
        for_each_value(e.name, [&] { terms.push_back(arith(body)); });
        return terms.empty() ? num(0) : logic::add(terms);
      }
      default: throw ScopeError("formula " + to_string(e) + " used as a number");
    }
  }

 private:
  static Term bit(const Term& t, unsigned i) {
    return logic::mod(logic::int_div(t, logic::int_const(pow2(i))), num(2));
  }

  Term apply(const std::string& f, const Term& arg) {
    auto it = tables_.find(f);
    if (it == tables_.end()) throw ScopeError(f + " is not a function");
    const auto& entries = it->second;
    if (arg.is_const()) {
      const Rational& v = arg.value();
      if (v < 0 || v >= static_cast<long long>(entries.size()))
        throw Error("argument " + qramverify::to_string(v) + " outside the domain of " + f);
      return entries[static_cast<std::size_t>(to_int64(v))];
    }
    Term out = entries.back();
    for (std::size_t k = entries.size() - 1; k-- > 0;)
      out = logic::ite(logic::eq(arg, num(BigInt(k))), entries[k], out);
    return out;
  }

  void for_each_value(const std::string& name, const std::function<void()>& body) {
    auto type = spec_.type_of(name);
    if (!type) throw ScopeError("undeclared variable " + name);
    const std::uint64_t n = domain_size(*type, "quantified variable " + name);
    auto saved = scalars_.find(name) != scalars_.end() ? std::optional<Term>(scalars_[name]) : std::nullopt;
    for (std::uint64_t v = 0; v < n; ++v) {
      scalars_[name] = num(BigInt(v));
      body();
    }
    if (saved) scalars_[name] = *saved;
    else scalars_.erase(name);
  }

  const SpeqSpec& spec_;
  std::map<std::string, Term> scalars_;
  std::map<std::string, std::vector<Term>> tables_;
};

}  // namespace

EncodedSpec encode_spec(const SpeqSpec& spec, const SpecBinding& binding, SymbolTable& st) {
  Encoder enc(spec);

  for (const auto& [name, type] : spec.inputs) {
    if (type.kind == SpeqType::Kind::Function) {
      auto it = binding.oracles.find(name);
      if (it == binding.oracles.end()) throw SpecBindingError("spec input " + name + " is not an oracle of the program");
      const std::uint64_t n = table_size(name, type);
      if (type.arg->bits != it->second)
        throw SpecBindingError("oracle " + name + " takes " + std::to_string(it->second) + " bits, spec says " +
                               std::to_string(type.arg->bits));
      if (!(*type.result == SpeqType::bitvec(1)))
        throw SpecBindingError("oracle " + name + " returns one bit, spec says " + to_string(*type.result));
      st.declare_oracle(name, it->second);
      std::vector<Term> entries;
      for (std::uint64_t v = 0; v < n; ++v) entries.push_back(st.term(naming::oracle_entry(name, v)));
      enc.bind_table(name, std::move(entries));
    } else {
      auto it = binding.inputs.find(name);
      if (it == binding.inputs.end()) throw SpecBindingError("spec input " + name + " is not an input of the program");
      enc.bind_scalar(name, it->second);
    }
  }
  for (const auto& [name, bits] : binding.oracles) {
    if (!spec.type_of(name) || spec.type_of(name)->kind != SpeqType::Kind::Function)
      throw SpecBindingError("program oracle " + name + " is missing from the spec inputs");
  }
  for (const auto& [name, term] : binding.inputs) {
    bool listed = false;
    for (const auto& in : spec.inputs) listed = listed || in.first == name;
    if (!listed) throw SpecBindingError("program input " + name + " is missing from the spec inputs");
  }

  EncodedSpec out;
  const std::string ret = naming::spec_var(spec.ret_name);
  st.declare({ret, logic::Sort::Int, SymbolDecl::Role::SpecVar, std::nullopt, std::nullopt});
  Term ret_term = st.term(ret);
  enc.bind_scalar(spec.ret_name, ret_term);
  out.post.define(logic::eq(ret_term, binding.ret));
  out.post.add(logic::ge(ret_term, num(0)));
  if (auto up = upper_of(spec.ret_type)) out.post.add(logic::lt(ret_term, logic::int_const(*up)));

  auto encode_items = [&](const std::vector<SpeqItem>& items, ObligationSet& target) {
    for (const auto& item : items) {
      if (!item.is_define) {
        target.add(enc.logic(item.expr));
        continue;
      }
      const std::string sym = naming::spec_var(item.name);
      if (item.type.kind == SpeqType::Kind::Function) {
        const std::uint64_t n = table_size(item.name, item.type);
        std::vector<Term> entries;
        for (std::uint64_t v = 0; v < n; ++v) {
          const std::string e = naming::oracle_entry(sym, v);
          st.declare({e, logic::Sort::Int, SymbolDecl::Role::SpecVar, Rational(0), upper_of(*item.type.result)});
          entries.push_back(st.term(e));
        }
        enc.bind_table(item.name, std::move(entries));
      } else {
        st.declare({sym, logic::Sort::Int, SymbolDecl::Role::SpecVar, Rational(0), upper_of(item.type)});
        enc.bind_scalar(item.name, st.term(sym));
      }
    }
  };
  encode_items(spec.pre_items, out.pre);
  encode_items(spec.post_items, out.post);
  return out;
}

// ---------------------------------------------------------------- evaluation

namespace {

class Evaluator {
 public:
  Evaluator(const SpeqSpec& spec, const SpeqEnv& env) : spec_(spec), env_(env) {}

  bool logic(const SpeqExpr& e) {
    switch (e.kind) {
      case K::False: return false;
      case K::True: return true;
      case K::Eq: return arith(e.args[0]) == arith(e.args[1]);
      case K::Ne: return arith(e.args[0]) != arith(e.args[1]);
      case K::Lt: return arith(e.args[0]) < arith(e.args[1]);
      case K::Le: return arith(e.args[0]) <= arith(e.args[1]);
      case K::Gt: return arith(e.args[0]) > arith(e.args[1]);
      case K::Ge: return arith(e.args[0]) >= arith(e.args[1]);
      case K::Not: return !logic(e.args[0]);
      case K::And: return logic(e.args[0]) && logic(e.args[1]);
      case K::Or: return logic(e.args[0]) || logic(e.args[1]);
      case K::Implies: return !logic(e.args[0]) || logic(e.args[1]);
      case K::Forall:
      case K::Exists: {
        const bool forall = e.kind == K::Forall;
        bool result = forall;
        for_each_value(e.name, [&] {
          if (result != forall) return;
          if (logic(e.args[0]) != forall) result = !forall;
        });
        return result;
      }
      default: throw ScopeError("arithmetic expression " + to_string(e) + " used as a formula");
    }
  }

  BigInt arith(const SpeqExpr& e) {
    switch (e.kind) {
      case K::Num: return e.value;
      case K::Var: {
        if (auto it = locals_.find(e.name); it != locals_.end()) return it->second;
        if (auto it = env_.values.find(e.name); it != env_.values.end()) return it->second;
        throw ScopeError("no value for " + e.name);
      }
      case K::Apply: {
        auto it = env_.tables.find(e.name);
        if (it == env_.tables.end()) throw UnboundOracle("no table for " + e.name);
        const BigInt a = arith(e.args[0]);
        if (a < 0 || a >= static_cast<long long>(it->second.size()))
          throw Error("argument " + a.str() + " outside the domain of " + e.name);
        return it->second[static_cast<std::size_t>(a)];
      }
      case K::Add: return arith(e.args[0]) + arith(e.args[1]);
      case K::Sub: return arith(e.args[0]) - arith(e.args[1]);
      case K::Mul: return arith(e.args[0]) * arith(e.args[1]);
      case K::Div:
      case K::Mod: {
        const BigInt n = arith(e.args[0]);
        const BigInt d = arith(e.args[1]);
        if (d == 0) throw Error("division by zero in " + to_string(e));
        return e.kind == K::Div ? logic::euclid_div(n, d) : logic::euclid_mod(n, d);
      }
      case K::Neg: return -arith(e.args[0]);
      case K::Pow: {
        const BigInt base = arith(e.args[0]);
        const BigInt exp = arith(e.args[1]);
        if (exp < 0 || exp > 64) throw UnsupportedFeature("exponent of " + to_string(e) + " must be in [0, 64]");
        BigInt r = 1;
        for (BigInt i = 0; i < exp; ++i) r *= base;
        return r;
      }
      case K::Dot: {
        const unsigned w = dot_width(e, spec_);
        const BigInt a = arith(e.args[0]);
        const BigInt b = arith(e.args[1]);
        BigInt s = 0;
        for (unsigned i = 0; i < w; ++i) {
          const BigInt p = BigInt(1) << i;
          s += logic::euclid_mod(logic::euclid_div(a, p), 2) * logic::euclid_mod(logic::euclid_div(b, p), 2);
        }
        return s;
      }
      case K::Sum: {
        const SpeqExpr body = sum_body(e, spec_);
        BigInt s = 0;
        for_each_value(e.name, [&] { s += arith(body); });
        return s;
      }
      default: throw ScopeError("formula " + to_string(e) + " used as a number");
    }
  }

 private:
  void for_each_value(const std::string& name, const std::function<void()>& body) {
    auto type = spec_.type_of(name);
    if (!type) throw ScopeError("undeclared variable " + name);
    const std::uint64_t n = domain_size(*type, "quantified variable " + name);
    auto saved = locals_.count(name) ? std::optional<BigInt>(locals_[name]) : std::nullopt;
    for (std::uint64_t v = 0; v < n; ++v) {
      locals_[name] = BigInt(v);
      body();
    }
    if (saved) locals_[name] = *saved;
    else locals_.erase(name);
  }

  const SpeqSpec& spec_;
  const SpeqEnv& env_;
  std::map<std::string, BigInt> locals_;
};

}  // namespace

bool evaluate_logic(const SpeqExpr& e, const SpeqSpec& spec, const SpeqEnv& env) {
  return Evaluator(spec, env).logic(e);
}

BigInt evaluate_arith(const SpeqExpr& e, const SpeqSpec& spec, const SpeqEnv& env) {
  return Evaluator(spec, env).arith(e);
}

}  // namespace qramverify
