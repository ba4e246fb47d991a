#include <map>
#include <set>

#include "qramverify/errors.hpp"
#include "qramverify/silq_ast.hpp"

namespace qramverify {

namespace {

std::string where(const SourcePos& p) { return std::to_string(p.line) + ":" + std::to_string(p.col); }

bool is_arithmetic(const std::string& op) { return op == "+" || op == "-" || op == "*" || op == "%" || op == "/"; }
bool is_comparison(const std::string& op) {
  return op == "==" || op == "!=" || op == "<" || op == "<=" || op == ">" || op == ">=";
}

void collect_names(const Expr& e, std::set<std::string>& out) {
  if ((e.kind == Expr::Kind::Var && e.name != "pi") || e.kind == Expr::Kind::Index) out.insert(e.name);
  for (const auto& a : e.args) collect_names(a, out);
}

class TypeChecker {
 public:
  explicit TypeChecker(SilqAst& ast) : ast_(ast) {}

  void run() {
    for (auto& fn : ast_.functions) check_function(fn);
  }

 private:
  using Env = std::map<std::string, SilqType>;

  SilqType function_result(const std::string& name) {
    auto state = in_progress_.find(name);
    if (state != in_progress_.end() && state->second) throw TypeError("function " + name + " is recursive");
    FunctionDef* fn = nullptr;
    for (auto& f : ast_.functions)
      if (f.name == name) fn = &f;
    if (!fn) throw UseBeforeDefine("function " + name + " is not defined");
    check_function(*fn);
    const auto rt = return_type(*fn);
    if (!rt) throw TypeError("function " + name + " returns no value");
    return *rt;
  }

  void check_function(FunctionDef& fn) {
    if (in_progress_.count(fn.name)) return;
    in_progress_[fn.name] = true;
    Env env;
    for (const auto& p : fn.params) env[p.name] = p.type;
    body(fn.body, env, false);
    in_progress_[fn.name] = false;
  }

  void body(std::vector<Stmt>& stmts, Env& env, bool under_quantum) {
    for (auto& s : stmts) statement(s, env, under_quantum);
  }

  const SilqType& lookup(const Env& env, const Expr& e) const {
    auto it = env.find(e.name);
    if (it == env.end()) throw UseBeforeDefine(e.name + " is not live at " + where(e.pos));
    return it->second;
  }

  void check_index(const Expr& e, const SilqType& t) const {
    if (t.kind != SilqType::Kind::Bit && t.kind != SilqType::Kind::UInt)
      throw TypeError(e.name + " cannot be indexed at " + where(e.pos));
    if (e.value < 0 || e.value >= static_cast<std::int64_t>(size(t)))
      throw TypeError("index " + std::to_string(e.value) + " outside " + e.name + " of size " +
                      std::to_string(size(t)) + " at " + where(e.pos));
  }

  void statement(Stmt& s, Env& env, bool under_quantum) {
    switch (s.kind) {
      case Stmt::Kind::Assign: assign(s, env, under_quantum); return;
      case Stmt::Kind::GateApply: {
        const SilqType& t = lookup(env, s.target);
        if (!t.quantum()) throw TypeError("gate applied to classical " + s.target.name + " at " + where(s.pos));
        if (s.target.kind == Expr::Kind::Index) {
          check_index(s.target, t);
        } else if (size(t) != 1) {
          throw TypeError("gate applied to the " + std::to_string(size(t)) + "-qubit register " + s.target.name +
                          " (index a qubit) at " + where(s.pos));
        }
        s.target.type = t;
        s.value.type = t;
        s.value.args[0].type = s.target.kind == Expr::Kind::Index ? SilqType::bit(false) : t;
        return;
      }
      case Stmt::Kind::Measure: {
        Expr& src = s.value.args[0];
        const SilqType qt = lookup(env, src);
        if (!qt.quantum()) throw TypeError("measure of classical " + src.name + " at " + where(s.pos));
        src.type = qt;
        SilqType ct = qt;
        ct.classical = true;
        auto existing = env.find(s.target.name);
        if (existing != env.end() && s.target.name != src.name) {
          if (existing->second.quantum())
            throw TypeError("measurement overwrites live quantum " + s.target.name + " at " + where(s.pos));
          if (size(existing->second) != size(ct))
            throw TypeError("measurement result of size " + std::to_string(size(ct)) + " stored in " +
                            s.target.name + " of size " + std::to_string(size(existing->second)));
        }
        env.erase(src.name);
        env[s.target.name] = ct;
        s.target.type = ct;
        s.value.type = ct;
        return;
      }
      case Stmt::Kind::Phase: angle_of(s.value); return;
      case Stmt::Kind::If: {
        const SilqType ct = expr(s.value, env);
        if (ct.kind != SilqType::Kind::Bit)
          throw NonBooleanCondition("condition " + print_silq(s.value) + " has type " + to_string(ct) + " at " +
                                    where(s.pos));
        std::set<std::string> names;
        collect_names(s.value, names);
        bool any_quantum = false;
        bool any_classical = false;
        for (const auto& n : names) (env.at(n).quantum() ? any_quantum : any_classical) = true;
        if (any_quantum && any_classical)
          throw MixedConditionError("condition " + print_silq(s.value) + " reads both quantum and classical variables");
        s.quantum = any_quantum;
        Env then_env = env;
        body(s.then_body, then_env, under_quantum || s.quantum);
        Env else_env = env;
        body(s.else_body, else_env, under_quantum || s.quantum);
        return;
      }
      case Stmt::Kind::Return: {
        const SilqType& t = lookup(env, s.target);
        if (!t.classical || t.kind == SilqType::Kind::Oracle)
          throw TypeError("return of non-classical " + s.target.name + " at " + where(s.pos));
        s.target.type = t;
        return;
      }
    }
  }

  void assign(Stmt& s, Env& env, bool under_quantum) {
    if (s.target.kind == Expr::Kind::Index)
      throw UnsupportedFeature("assignment to a single bit of " + s.target.name + " at " + where(s.pos));
    auto existing = env.find(s.target.name);
    if (s.value.kind == Expr::Kind::TypedConst && s.value.annotation->quantum()) {
      const SilqType t = expr(s.value, env);
      if (s.rebind) throw TypeError("quantum register " + s.target.name + " must be declared with := at " + where(s.pos));
      if (existing != env.end())
        throw TypeError("redeclaration of " + s.target.name + " as a quantum register at " + where(s.pos));
      env[s.target.name] = t;
      s.target.type = t;
      s.quantum = true;
      return;
    }
    const SilqType rhs = expr(s.value, env);
    if (rhs.quantum())
      throw TypeError("quantum value " + print_silq(s.value) + " in a classical assignment at " + where(s.pos));
    if (rhs.kind == SilqType::Kind::Oracle) throw TypeError("oracle " + print_silq(s.value) + " used as a value");
    if (under_quantum)
      throw MixedConditionError("classical assignment to " + s.target.name + " under a quantum condition at " +
                                where(s.pos));
    SilqType t = rhs;
    if (existing != env.end()) {
      if (existing->second.quantum() || existing->second.kind == SilqType::Kind::Oracle)
        throw TypeError("classical assignment to " + s.target.name + " of type " + to_string(existing->second) +
                        " at " + where(s.pos));
      t = existing->second;
    }
    env[s.target.name] = t;
    s.target.type = t;
    s.quantum = false;
  }

  SilqType expr(Expr& e, const Env& env) {
    e.type = infer(e, env);
    return *e.type;
  }

  SilqType infer(Expr& e, const Env& env) {
    switch (e.kind) {
      case Expr::Kind::Int: return SilqType::integer();
      case Expr::Kind::TypedConst: {
        const SilqType& t = *e.annotation;
        if (t.kind == SilqType::Kind::Oracle) throw TypeError("constant of oracle type at " + where(e.pos));
        if (t.bounded() && (e.value < 0 || e.value >= (std::int64_t{1} << size(t))))
          throw TypeError(std::to_string(e.value) + " does not fit " + to_string(t) + " at " + where(e.pos));
        return t;
      }
      case Expr::Kind::Var:
        if (e.name == "pi") throw TypeError("pi outside a phase angle at " + where(e.pos));
        if (lookup(env, e).kind == SilqType::Kind::Oracle)
          throw TypeError("oracle " + e.name + " used without an argument at " + where(e.pos));
        return lookup(env, e);
      case Expr::Kind::Index: {
        const SilqType& t = lookup(env, e);
        check_index(e, t);
        return SilqType::bit(t.classical);
      }
      case Expr::Kind::Call: return call(e, env);
      case Expr::Kind::Unary: {
        const SilqType a = expr(e.args[0], env);
        if (e.name == "!") {
          if (a.kind != SilqType::Kind::Bit) throw TypeError("negation of non-boolean at " + where(e.pos));
          return SilqType::bit(a.classical);
        }
        if (a.quantum()) throw TypeError("arithmetic on quantum value at " + where(e.pos));
        return SilqType::integer();
      }
      case Expr::Kind::Binary: {
        const SilqType l = expr(e.args[0], env);
        const SilqType r = expr(e.args[1], env);
        const bool classical = l.classical && r.classical;
        if (l.kind == SilqType::Kind::Oracle || r.kind == SilqType::Kind::Oracle)
          throw TypeError("oracle used as a value at " + where(e.pos));
        if (e.name == "&&" || e.name == "||") {
          if (l.kind != SilqType::Kind::Bit || r.kind != SilqType::Kind::Bit)
            throw TypeError("operands of " + e.name + " must be boolean at " + where(e.pos));
          return SilqType::bit(classical);
        }
        if (is_comparison(e.name)) return SilqType::bit(classical);
        if (e.name == "/") throw UnsupportedFeature("division outside a phase angle at " + where(e.pos));
        if (is_arithmetic(e.name)) {
          const bool l_lit = e.args[0].kind == Expr::Kind::Int;
          const bool r_lit = e.args[1].kind == Expr::Kind::Int;
          if ((!l_lit && !l.bounded()) || (!r_lit && !r.bounded()) || (l_lit && r_lit)) {
            SilqType t = SilqType::integer();
            t.classical = classical;
            return t;
          }
          unsigned width = 0;
          if (!l_lit) width = std::max(width, size(l));
          if (!r_lit) width = std::max(width, size(r));
          return width == 1 && (l_lit || l.kind == SilqType::Kind::Bit) && (r_lit || r.kind == SilqType::Kind::Bit)
                     ? SilqType::bit(classical)
                     : SilqType::uint(width, classical);
        }
        throw TypeError("unknown operator " + e.name);
      }
    }
    throw TypeError("unknown expression");
  }

  SilqType call(Expr& e, const Env& env) {
    if (e.name == "H" || e.name == "X" || e.name == "measure" || e.name == "phase")
      throw TypeError(e.name + " used inside an expression at " + where(e.pos));
    auto it = env.find(e.name);
    if (it != env.end()) {
      if (it->second.kind != SilqType::Kind::Oracle) throw TypeError(e.name + " is not callable at " + where(e.pos));
      if (e.args.size() != 1) throw TypeError("oracle " + e.name + " takes one argument at " + where(e.pos));
      const SilqType a = expr(e.args[0], env);
      if (a.kind == SilqType::Kind::Oracle) throw TypeError("oracle passed to oracle at " + where(e.pos));
      if (e.args[0].kind == Expr::Kind::Int) {
        if (e.args[0].value < 0 || e.args[0].value >= (std::int64_t{1} << it->second.bits))
          throw TypeError("oracle argument out of range at " + where(e.pos));
      } else if (a.bounded() && size(a) != it->second.bits) {
        throw TypeError("oracle " + e.name + " expects " + std::to_string(it->second.bits) + " bits, got " +
                        std::to_string(size(a)) + " at " + where(e.pos));
      }
      return SilqType::bit(a.classical);
    }
    for (auto& a : e.args) {
      const SilqType t = expr(a, env);
      if (t.quantum()) throw TypeError("quantum argument to " + e.name + " at " + where(e.pos));
    }
    const FunctionDef* callee = ast_.find(e.name);
    if (!callee) throw UseBeforeDefine("function " + e.name + " is not defined");
    if (callee->params.size() != e.args.size())
      throw TypeError(e.name + " expects " + std::to_string(callee->params.size()) + " arguments at " + where(e.pos));
    return function_result(e.name);
  }

  SilqAst& ast_;
  std::map<std::string, bool> in_progress_;
};

}  // namespace

SilqAst type_check(SilqAst ast) {
  TypeChecker(ast).run();
  return ast;
}

}  // namespace qramverify
