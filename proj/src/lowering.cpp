#include "qramverify/lowering.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "qramverify/errors.hpp"

namespace qramverify {

namespace {

std::string where(const SourcePos& p) { return std::to_string(p.line) + ":" + std::to_string(p.col); }

bool is_logical_expr(const Expr& e) {
  if (e.kind == Expr::Kind::Unary) return e.name == "!";
  if (e.kind != Expr::Kind::Binary) return false;
  static const char* ops[] = {"==", "!=", "<", "<=", ">", ">=", "&&", "||"};
  return std::any_of(std::begin(ops), std::end(ops), [&](const char* o) { return e.name == o; });
}

OpInstr logical(const Expr& e);

OpInstr truth_of(const Expr& e) {
  if (is_logical_expr(e)) return logical(e);
  switch (e.kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Index:
    case Expr::Kind::Call:
    case Expr::Kind::TypedConst: return make_binary(lower_operand(e), Operator::Eq, std::int64_t{1});
    default: throw NonBooleanCondition(print_silq(e) + " at " + where(e.pos) + " is not a condition");
  }
}

OpInstr logical(const Expr& e) {
  if (e.kind == Expr::Kind::Unary) return make_unary(Operator::Not, as_operand(truth_of(e.args[0])));
  const std::string& op = e.name;
  if (op == "&&") return make_binary(as_operand(truth_of(e.args[0])), Operator::And, as_operand(truth_of(e.args[1])));
  if (op == "||") {
    OpInstr l = make_unary(Operator::Not, as_operand(truth_of(e.args[0])));
    OpInstr r = make_unary(Operator::Not, as_operand(truth_of(e.args[1])));
    return make_unary(Operator::Not, as_operand(make_binary(as_operand(l), Operator::And, as_operand(r))));
  }
  const Operand l = lower_operand(e.args[0]);
  const Operand r = lower_operand(e.args[1]);
  if (op == "==") return make_binary(l, Operator::Eq, r);
  if (op == "<") return make_binary(l, Operator::Lt, r);
  if (op == "<=") return make_binary(l, Operator::Le, r);
  if (op == ">") return make_binary(r, Operator::Lt, l);
  if (op == ">=") return make_binary(r, Operator::Le, l);
  if (op == "!=") return make_unary(Operator::Not, as_operand(make_binary(l, Operator::Eq, r)));
  throw NonBooleanCondition(print_silq(e));
}

void first_variable_into(const Operand& o, std::optional<std::string>& out) {
  if (out) return;
  if (auto* v = std::get_if<VarRef>(&o)) {
    out = v->name;
  } else if (auto* p = std::get_if<std::shared_ptr<const OpInstr>>(&o)) {
    first_variable_into((*p)->lhs, out);
    if ((*p)->binary) first_variable_into((*p)->rhs, out);
  }
}

struct FuseSlot {
  std::size_t process = 0;
  std::string var;
  std::map<unsigned, std::string> wire_labels;
};

class Lowerer {
 public:
  Lowerer(const FunctionDef& fn, LoweringOptions options) : fn_(fn), options_(options) {}

  QramProgram run() {
    program_.function = fn_.name;
    program_.initial_c = Memory(MemoryTag::Classical);
    for (const auto& p : fn_.params) {
      if (p.type.kind == SilqType::Kind::Oracle) {
        program_.oracles.push_back({p.name, p.type.bits});
      } else if (p.type.quantum()) {
        throw UnsupportedFeature("quantum parameter " + p.name + " of " + fn_.name);
      } else if (!p.type.bounded()) {
        throw UnsupportedFeature("unbounded integer parameter " + p.name + " of " + fn_.name);
      } else {
        program_.inputs.push_back({p.name, size(p.type)});
        program_.initial_c = mem_add(program_.initial_c, p.name, size(p.type));
      }
    }
    mem_c_ = program_.initial_c;
    body(fn_.body);
    return std::move(program_);
  }

 private:
  void body(const std::vector<Stmt>& stmts) {
    for (const auto& s : stmts) statement(s);
  }

  bool controlled() const { return !gamma_.empty(); }
  bool quantum_controlled() const {
    return std::any_of(gamma_.begin(), gamma_.end(), [](const CtrlInstr& g) { return g.quantum; });
  }

  void emit(QInst q, CInst c) {
    program_.processes.push_back({std::move(q), mem_q_, std::move(c), mem_c_, gamma_});
    slot_.reset();
  }

  void statement(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: assign(s); return;
      case Stmt::Kind::GateApply: gate_apply(s); return;
      case Stmt::Kind::Phase: phase(s); return;
      case Stmt::Kind::Measure: measure(s); return;
      case Stmt::Kind::If: {
        slot_.reset();
        const CtrlInstr c = lower_condition(s.value);
        gamma_.push_back(c);
        body(s.then_body);
        gamma_.pop_back();
        slot_.reset();
        if (s.has_else) {
          gamma_.push_back({make_unary(Operator::Not, as_operand(c.op)), c.quantum});
          body(s.else_body);
          gamma_.pop_back();
          slot_.reset();
        }
        return;
      }
      case Stmt::Kind::Return:
        if (controlled()) throw LoweringError("return under a condition at " + where(s.pos));
        emit(QSkip{}, Return{s.target.name});
        return;
    }
  }

  void assign(const Stmt& s) {
    const std::string& x = s.target.name;
    if (!s.target.type) throw LoweringError("assignment to " + x + " has not been type checked");
    const SilqType& t = *s.target.type;
    if (s.quantum) {
      if (controlled()) throw LoweringError("declaration of quantum register " + x + " under a condition at " + where(s.pos));
      mem_q_ = mem_add(mem_q_, x, size(t));
      quantum_order_.push_back(x);
      emit(QInit{x, size(t), static_cast<std::uint64_t>(s.value.value)}, CSkip{});
      return;
    }
    if (quantum_controlled())
      throw LoweringError("classical assignment to " + x + " under a quantum condition at " + where(s.pos));
    if (controlled() && !mem_c_.contains(x))
      throw LoweringError("declaration of " + x + " under a condition at " + where(s.pos));
    if (s.value.kind == Expr::Kind::Call && !program_has_oracle(s.value.name))
      throw UnsupportedFeature("call to function " + s.value.name + " at " + where(s.pos));
    Operand value = lower_operand(s.value);
    mem_c_ = mem_amend(mem_c_, x, size(t));
    emit(QSkip{}, CSet{x, size(t), std::move(value), t.bounded()});
  }

  bool program_has_oracle(const std::string& name) const {
    return std::any_of(program_.oracles.begin(), program_.oracles.end(),
                       [&](const OracleParam& o) { return o.name == name; });
  }

  void check_control_targets(const std::string& target, const SourcePos& pos) const {
    for (const auto& g : gamma_) {
      if (!g.quantum) continue;
      std::set<std::string> vars;
      free_variables(g.op, vars);
      if (vars.count(target))
        throw ControlOnTarget("gate on " + target + " controlled by " + to_string(g.op) + " at " + where(pos));
    }
  }

  void gate_apply(const Stmt& s) {
    const std::string& x = s.target.name;
    if (!mem_q_.contains(x)) throw LoweringError(x + " is not a live quantum register at " + where(s.pos));
    check_control_targets(x, s.pos);
    const unsigned n = mem_q_.at(x).size;
    const unsigned wire = s.target.kind == Expr::Kind::Index ? static_cast<unsigned>(s.target.value) : 0;
    const Gate g{s.value.name == "H" ? GateKind::H : GateKind::X, 0};
    const SymbolicMatrix u1 = gate(g);
    const std::vector<unsigned> wires{wire};
    SymbolicMatrix u = embed(u1, wires, n);

    if (options_.fuse && slot_ && slot_->var == x && slot_->process + 1 == program_.processes.size() &&
        !slot_->wire_labels.count(wire)) {
      QramProcess& last = program_.processes.back();
      auto& op = std::get<QOp>(last.q);
      slot_->wire_labels[wire] = u1.label();
      SymbolicMatrix fused = u * op.u;
      std::string label;
      for (unsigned w = n; w-- > 0;) {
        if (!label.empty()) label += "⊗";
        auto it = slot_->wire_labels.find(w);
        label += it == slot_->wire_labels.end() ? "I" : it->second;
      }
      fused.set_label(label);
      op.u = std::move(fused);
      return;
    }

    mem_q_ = mem_iter(mem_q_, x);
    emit(QOp{std::move(u), x}, CSkip{});
    slot_ = FuseSlot{program_.processes.size() - 1, x, {{wire, u1.label()}}};
  }

  void phase(const Stmt& s) {
    std::optional<std::string> target;
    for (auto it = gamma_.rbegin(); it != gamma_.rend() && !target; ++it)
      if (it->quantum) target = first_variable(it->op);
    if (!target && !quantum_order_.empty()) target = quantum_order_.front();
    if (!target) throw LoweringError("phase with no quantum register in scope at " + where(s.pos));
    const unsigned n = mem_q_.at(*target).size;
    SymbolicMatrix u = kron(gate(Gate{GateKind::Phase, angle_of(s.value)}), SymbolicMatrix::identity(std::size_t{1} << n));
    mem_q_ = mem_iter(mem_q_, *target);
    emit(QOp{std::move(u), *target}, CSkip{});
  }

  void measure(const Stmt& s) {
    if (controlled()) throw LoweringError("measurement under a condition at " + where(s.pos));
    const std::string& q = s.value.args[0].name;
    const std::string& r = s.target.name;
    const unsigned n = mem_q_.at(q).size;
    mem_q_ = mem_del(mem_q_, q);
    quantum_order_.erase(std::remove(quantum_order_.begin(), quantum_order_.end(), q), quantum_order_.end());
    mem_c_ = mem_amend(mem_c_, r, n);
    emit(QMeas{q}, CMeas{r});
  }

  const FunctionDef& fn_;
  LoweringOptions options_;
  QramProgram program_;
  Memory mem_q_{MemoryTag::Quantum};
  Memory mem_c_{MemoryTag::Classical};
  std::vector<CtrlInstr> gamma_;
  std::vector<std::string> quantum_order_;
  std::optional<FuseSlot> slot_;
};

}  // namespace

Operand lower_operand(const Expr& e) {
  switch (e.kind) {
    case Expr::Kind::Int:
    case Expr::Kind::TypedConst: return e.value;
    case Expr::Kind::Var: return VarRef{e.name};
    case Expr::Kind::Index: return as_operand(make_binary(VarRef{e.name}, Operator::Index, e.value));
    case Expr::Kind::Call:
      if (e.args.size() != 1) throw UnsupportedFeature("call to function " + e.name + " at " + where(e.pos));
      return as_operand(make_apply(e.name, lower_operand(e.args[0])));
    case Expr::Kind::Unary:
      if (e.name == "-") return as_operand(make_binary(std::int64_t{0}, Operator::Sub, lower_operand(e.args[0])));
      return as_operand(logical(e));
    case Expr::Kind::Binary: {
      if (is_logical_expr(e)) return as_operand(logical(e));
      const Operand l = lower_operand(e.args[0]);
      const Operand r = lower_operand(e.args[1]);
      if (e.name == "+") return as_operand(make_binary(l, Operator::Add, r));
      if (e.name == "-") return as_operand(make_binary(l, Operator::Sub, r));
      if (e.name == "*") return as_operand(make_binary(l, Operator::Mul, r));
      if (e.name == "%") return as_operand(make_binary(l, Operator::Mod, r));
      throw UnsupportedFeature("operator " + e.name + " at " + where(e.pos));
    }
  }
  throw LoweringError("unknown expression");
}

CtrlInstr lower_condition(const Expr& e) {
  if (!e.type) throw LoweringError("condition " + print_silq(e) + " has not been type checked");
  return {truth_of(e), e.type->quantum()};
}

std::optional<std::string> first_variable(const OpInstr& op) {
  std::optional<std::string> out;
  first_variable_into(op.lhs, out);
  if (op.binary) first_variable_into(op.rhs, out);
  return out;
}

QramProgram lower_function(const SilqAst& ast, const std::string& fname, LoweringOptions options) {
  const FunctionDef* fn = ast.find(fname);
  if (!fn) throw NoSuchFunction(fname);
  return Lowerer(*fn, options).run();
}

}  // namespace qramverify
