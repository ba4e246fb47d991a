#include <set>
#include <sstream>

#include "lexer.hpp"
#include "qramverify/errors.hpp"
#include "qramverify/speq.hpp"

namespace qramverify {

SpeqType SpeqType::function(SpeqType a, SpeqType r) {
  SpeqType t;
  t.kind = Kind::Function;
  t.bits = 0;
  t.arg = std::make_shared<const SpeqType>(std::move(a));
  t.result = std::make_shared<const SpeqType>(std::move(r));
  return t;
}

bool operator==(const SpeqType& a, const SpeqType& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case SpeqType::Kind::BitVec: return a.bits == b.bits;
    case SpeqType::Kind::Nat: return true;
    case SpeqType::Kind::Function: return *a.arg == *b.arg && *a.result == *b.result;
  }
  return false;
}

std::string to_string(const SpeqType& t) {
  switch (t.kind) {
    case SpeqType::Kind::BitVec: return t.bits == 1 ? "{0, 1}" : "{0, 1}^" + std::to_string(t.bits);
    case SpeqType::Kind::Nat: return "N";
    case SpeqType::Kind::Function: return to_string(*t.arg) + "->" + to_string(*t.result);
  }
  return "?";
}

bool SpeqExpr::is_logical() const {
  switch (kind) {
    case Kind::False:
    case Kind::True:
    case Kind::Eq:
    case Kind::Ne:
    case Kind::Lt:
    case Kind::Le:
    case Kind::Gt:
    case Kind::Ge:
    case Kind::Not:
    case Kind::And:
    case Kind::Or:
    case Kind::Implies:
    case Kind::Forall:
    case Kind::Exists: return true;
    default: return false;
  }
}

namespace {

const char* infix_text(SpeqExpr::Kind k) {
  using K = SpeqExpr::Kind;
  switch (k) {
    case K::Add: return " + ";
    case K::Sub: return " - ";
    case K::Mul: return " * ";
    case K::Div: return " / ";
    case K::Mod: return " mod ";
    case K::Pow: return "^";
    case K::Dot: return ".";
    case K::Eq: return " = ";
    case K::Ne: return " != ";
    case K::Lt: return " < ";
    case K::Le: return " <= ";
    case K::Gt: return " > ";
    case K::Ge: return " >= ";
    case K::And: return " & ";
    case K::Or: return " | ";
    case K::Implies: return " -> ";
    default: return nullptr;
  }
}

bool is_atom(const SpeqExpr& e) {
  using K = SpeqExpr::Kind;
  return e.kind == K::Num || e.kind == K::Var || e.kind == K::Apply || e.kind == K::Sum || e.kind == K::False ||
         e.kind == K::True;
}

void print(std::ostream& os, const SpeqExpr& e);

void print_child(std::ostream& os, const SpeqExpr& e) {
  if (is_atom(e)) {
    print(os, e);
  } else {
    os << "(";
    print(os, e);
    os << ")";
  }
}

void print(std::ostream& os, const SpeqExpr& e) {
  using K = SpeqExpr::Kind;
  switch (e.kind) {
    case K::Num: os << e.value; return;
    case K::Var: os << e.name; return;
    case K::Apply:
      os << e.name << "(";
      print(os, e.args[0]);
      os << ")";
      return;
    case K::Sum:
      os << "SUM[" << e.name << "](";
      print(os, e.args[0]);
      os << ")";
      return;
    case K::False: os << "ff"; return;
    case K::True: os << "tt"; return;
    case K::Neg:
      os << "-";
      print_child(os, e.args[0]);
      return;
    case K::Not:
      os << "¬";
      print_child(os, e.args[0]);
      return;
    case K::Forall:
    case K::Exists:
      os << (e.kind == K::Forall ? "@" : "exists ") << e.name << ". ";
      print(os, e.args[0]);
      return;
    default: {
      const char* op = infix_text(e.kind);
      print_child(os, e.args[0]);
      os << op;
      print_child(os, e.args[1]);
      return;
    }
  }
}

}  // namespace

std::string to_string(const SpeqExpr& e) {
  std::ostringstream os;
  print(os, e);
  return os.str();
}

std::vector<SpeqExpr> SpeqSpec::pre() const {
  std::vector<SpeqExpr> out;
  for (const auto& i : pre_items)
    if (!i.is_define) out.push_back(i.expr);
  return out;
}

std::vector<SpeqExpr> SpeqSpec::post() const {
  std::vector<SpeqExpr> out;
  for (const auto& i : post_items)
    if (!i.is_define) out.push_back(i.expr);
  return out;
}

std::vector<std::pair<std::string, SpeqType>> SpeqSpec::defined_vars() const {
  std::vector<std::pair<std::string, SpeqType>> out;
  for (const auto* items : {&pre_items, &post_items})
    for (const auto& i : *items)
      if (i.is_define) out.emplace_back(i.name, i.type);
  return out;
}

std::optional<SpeqType> SpeqSpec::type_of(const std::string& name) const {
  for (const auto& [n, t] : inputs)
    if (n == name) return t;
  if (name == ret_name) return ret_type;
  for (const auto& [n, t] : defined_vars())
    if (n == name) return t;
  return std::nullopt;
}

// ---------------------------------------------------------------- parser

namespace {

using detail::Token;
using detail::TokenStream;

const std::vector<std::string> kSymbols = {"->", "<=", ">=", "!=", "=", "<", ">", "&", "|", "!", "@", ".", ",", "(",
                                           ")", "{",  "}",  "[",  "]", "^", "+", "-", "*", "/", ":", "%"};

const std::map<std::string, Token> kAliases = {
    {"¬", {Token::Kind::Symbol, "!", {}}},      {"→", {Token::Kind::Symbol, "->", {}}},
    {"∀", {Token::Kind::Symbol, "@", {}}},      {"∃", {Token::Kind::Ident, "exists", {}}},
    {"∧", {Token::Kind::Symbol, "&", {}}},      {"∨", {Token::Kind::Symbol, "|", {}}},
    {"≤", {Token::Kind::Symbol, "<=", {}}},     {"≥", {Token::Kind::Symbol, ">=", {}}},
    {"≠", {Token::Kind::Symbol, "!=", {}}},     {"ℕ", {Token::Kind::Ident, "N", {}}},
    {"⇒", {Token::Kind::Symbol, "->", {}}},
};

SpeqExpr node(SpeqExpr::Kind k, std::vector<SpeqExpr> args, std::string name = {}) {
  SpeqExpr e;
  e.kind = k;
  e.args = std::move(args);
  e.name = std::move(name);
  return e;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : ts_(detail::tokenize(src, kSymbols, kAliases)) {}

  SpeqSpec spec() {
    SpeqSpec s;
    s.function_name = ts_.identifier("function name");
    s.flag = flags();
    ts_.expect_symbol("(");
    if (!ts_.is_symbol(")")) {
      do {
        ts_.accept_ident("define");
        std::string name = ts_.identifier("input name");
        ts_.expect_symbol(":");
        s.inputs.emplace_back(std::move(name), type());
      } while (ts_.accept_symbol(","));
    }
    ts_.expect_symbol(")");
    ts_.expect_symbol("->");
    ts_.expect_symbol("(");
    ts_.expect_ident("define");
    s.ret_name = ts_.identifier("return name");
    ts_.expect_symbol(":");
    s.ret_type = type();
    ts_.expect_symbol(")");
    ts_.expect_ident("pre");
    s.pre_items = block();
    ts_.expect_ident("post");
    s.post_items = block();
    if (!ts_.at_end()) ts_.fail("end of specification");
    return s;
  }

 private:
  FlagSpec flags() {
    ts_.expect_symbol("[");
    std::optional<FlagSpec> flag;
    do {
      const Token& t = ts_.peek();
      if (t.kind != Token::Kind::Ident) throw FlagError("malformed flag at " + pos(t));
      const std::string name = ts_.next().text;
      FlagSpec f;
      if (name == "rand") {
        f = FlagSpec::rand();
      } else if (name == "cert") {
        f = FlagSpec::cert();
      } else if (name == "whp") {
        Rational a(1, 2);
        if (ts_.accept_symbol("(")) {
          if (ts_.peek().kind != Token::Kind::Number) throw FlagError("whp needs a numeric threshold at " + pos(t));
          a = parse_decimal(ts_.next().text);
          if (!ts_.accept_symbol(")")) throw FlagError("malformed whp flag at " + pos(t));
        }
        f = FlagSpec::whp(a);
      } else {
        throw FlagError("unknown flag '" + name + "' at " + pos(t));
      }
      if (flag) throw FlagError("more than one flag at " + pos(t));
      flag = f;
    } while (ts_.accept_symbol(","));
    if (!ts_.accept_symbol("]")) throw FlagError("malformed flag list at " + pos(ts_.peek()));
    return *flag;
  }

  SpeqType type() {
    SpeqType t;
    if (ts_.accept_ident("N")) {
      t = SpeqType::nat();
    } else {
      ts_.expect_symbol("{");
      if (ts_.number("0") != "0") ts_.fail("'0'");
      ts_.expect_symbol(",");
      if (ts_.number("1") != "1") ts_.fail("'1'");
      ts_.expect_symbol("}");
      unsigned n = 1;
      if (ts_.accept_symbol("^")) {
        const long v = std::stol(ts_.number("bit width"));
        if (v < 1 || v > 62) throw SyntaxError(ts_.peek().pos.line, ts_.peek().pos.col, "bit width in [1, 62]");
        n = static_cast<unsigned>(v);
      }
      t = SpeqType::bitvec(n);
    }
    if (ts_.accept_symbol("->")) return SpeqType::function(t, type());
    return t;
  }

  std::vector<SpeqItem> block() {
    ts_.expect_symbol("{");
    std::vector<SpeqItem> items;
    while (!ts_.accept_symbol("}")) {
      SpeqItem item;
      if (ts_.accept_ident("define")) {
        item.is_define = true;
        item.name = ts_.identifier("variable name");
        ts_.expect_symbol(":");
        item.type = type();
      } else if (ts_.accept_ident("assert")) {
        ts_.expect_symbol("(");
        item.expr = expr();
        ts_.expect_symbol(")");
      } else {
        ts_.fail("'define', 'assert' or '}'");
      }
      items.push_back(std::move(item));
    }
    return items;
  }

  SpeqExpr expr() { return implication(); }

  SpeqExpr implication() {
    SpeqExpr l = disjunction();
    if (ts_.accept_symbol("->")) return node(SpeqExpr::Kind::Implies, {std::move(l), implication()});
    return l;
  }

  SpeqExpr disjunction() {
    SpeqExpr e = conjunction();
    while (ts_.accept_symbol("|")) e = node(SpeqExpr::Kind::Or, {std::move(e), conjunction()});
    return e;
  }

  SpeqExpr conjunction() {
    SpeqExpr e = negation();
    while (ts_.accept_symbol("&")) e = node(SpeqExpr::Kind::And, {std::move(e), negation()});
    return e;
  }

  SpeqExpr negation() {
    if (ts_.accept_symbol("!")) return node(SpeqExpr::Kind::Not, {negation()});
    if (ts_.is_symbol("@") || ts_.is_ident("exists")) {
      const bool forall = ts_.next().text == "@";
      std::string v = ts_.identifier("bound variable");
      ts_.expect_symbol(".");
      return node(forall ? SpeqExpr::Kind::Forall : SpeqExpr::Kind::Exists, {expr()}, std::move(v));
    }
    return comparison();
  }

  SpeqExpr comparison() {
    SpeqExpr l = additive();
    static const std::pair<const char*, SpeqExpr::Kind> ops[] = {
        {"=", SpeqExpr::Kind::Eq},  {"!=", SpeqExpr::Kind::Ne}, {"<=", SpeqExpr::Kind::Le},
        {">=", SpeqExpr::Kind::Ge}, {"<", SpeqExpr::Kind::Lt},  {">", SpeqExpr::Kind::Gt}};
    for (const auto& [text, kind] : ops)
      if (ts_.accept_symbol(text)) return node(kind, {std::move(l), additive()});
    return l;
  }

  SpeqExpr additive() {
    SpeqExpr e = multiplicative();
    for (;;) {
      if (ts_.accept_symbol("+")) e = node(SpeqExpr::Kind::Add, {std::move(e), multiplicative()});
      else if (ts_.accept_symbol("-")) e = node(SpeqExpr::Kind::Sub, {std::move(e), multiplicative()});
      else return e;
    }
  }

  SpeqExpr multiplicative() {
    SpeqExpr e = unary();
    for (;;) {
      if (ts_.accept_symbol("*")) e = node(SpeqExpr::Kind::Mul, {std::move(e), unary()});
      else if (ts_.accept_symbol("/")) e = node(SpeqExpr::Kind::Div, {std::move(e), unary()});
      else if (ts_.accept_ident("mod") || ts_.accept_symbol("%")) e = node(SpeqExpr::Kind::Mod, {std::move(e), unary()});
      else return e;
    }
  }

  SpeqExpr unary() {
    if (ts_.accept_symbol("-")) return node(SpeqExpr::Kind::Neg, {unary()});
    return power();
  }

  SpeqExpr power() {
    SpeqExpr base = primary();
    while (ts_.is_symbol(".")) {
      ts_.next();
      base = node(SpeqExpr::Kind::Dot, {std::move(base), primary()});
    }
    if (ts_.accept_symbol("^")) return node(SpeqExpr::Kind::Pow, {std::move(base), unary()});
    return base;
  }

  SpeqExpr primary() {
    const Token& t = ts_.peek();
    if (t.kind == Token::Kind::Number) {
      const std::string text = ts_.next().text;
      if (text.find('.') != std::string::npos)
        throw SyntaxError(t.pos.line, t.pos.col, "integer, found " + text);
      SpeqExpr e;
      e.kind = SpeqExpr::Kind::Num;
      e.value = BigInt(text);
      return e;
    }
    if (ts_.accept_symbol("(")) {
      SpeqExpr e = expr();
      ts_.expect_symbol(")");
      return e;
    }
    if (t.kind != Token::Kind::Ident) ts_.fail("expression");
    const std::string name = ts_.next().text;
    if (name == "ff") return node(SpeqExpr::Kind::False, {});
    if (name == "tt") return node(SpeqExpr::Kind::True, {});
    if (name == "SUM") {
      ts_.expect_symbol("[");
      std::string v = ts_.identifier("summation variable");
      ts_.expect_symbol("]");
      ts_.expect_symbol("(");
      SpeqExpr body = expr();
      ts_.expect_symbol(")");
      return node(SpeqExpr::Kind::Sum, {std::move(body)}, std::move(v));
    }
    if (ts_.accept_symbol("(")) {
      SpeqExpr arg = expr();
      ts_.expect_symbol(")");
      return node(SpeqExpr::Kind::Apply, {std::move(arg)}, name);
    }
    return node(SpeqExpr::Kind::Var, {}, name);
  }

  static std::string pos(const Token& t) { return std::to_string(t.pos.line) + ":" + std::to_string(t.pos.col); }

  TokenStream ts_;
};

// Scope, typing and width checks.
class Checker {
 public:
  explicit Checker(SpeqSpec& spec) : spec_(spec) {}

  void run() {
    if (spec_.ret_name != spec_.function_name + "_ret")
      throw ScopeError("return variable " + spec_.ret_name + " must be named " + spec_.function_name + "_ret");
    if (spec_.ret_type.kind == SpeqType::Kind::Function) throw ScopeError("return value of function type");
    for (const auto& [n, t] : spec_.inputs) declare(n, t);
    declare(spec_.ret_name, spec_.ret_type);
    for (auto* items : {&spec_.pre_items, &spec_.post_items}) {
      for (auto& item : *items) {
        if (item.is_define) {
          declare(item.name, item.type);
        } else {
          if (!check(item.expr, {}).logical) throw ScopeError("assert of non-logical " + to_string(item.expr));
        }
      }
    }
  }

 private:
  struct Info {
    bool logical = false;
    std::optional<unsigned> width;
  };

  void declare(const std::string& n, const SpeqType& t) {
    if (scope_.count(n)) throw ScopeError(n + " is declared twice");
    scope_.emplace(n, t);
  }

  const SpeqType& lookup(const std::string& n) const {
    auto it = scope_.find(n);
    if (it == scope_.end()) throw ScopeError("undeclared variable " + n);
    return it->second;
  }

  Info arith(const SpeqExpr& e, const std::set<std::string>& bound) {
    const Info i = check(e, bound);
    if (i.logical) throw ScopeError("logical expression " + to_string(e) + " used as a number");
    return i;
  }

  Info logic(const SpeqExpr& e, const std::set<std::string>& bound) {
    const Info i = check(e, bound);
    if (!i.logical) throw ScopeError("arithmetic expression " + to_string(e) + " used as a formula");
    return i;
  }

  void bound_variable(const std::string& v) {
    const SpeqType& t = lookup(v);
    if (t.kind == SpeqType::Kind::Function) throw ScopeError("cannot quantify over function " + v);
  }

  Info check(const SpeqExpr& e, const std::set<std::string>& bound) {
    using K = SpeqExpr::Kind;
    switch (e.kind) {
      case K::Num: return {false, std::nullopt};
      case K::Var: {
        const SpeqType& t = lookup(e.name);
        if (t.kind == SpeqType::Kind::Function) throw ScopeError("function " + e.name + " used without an argument");
        return {false, t.kind == SpeqType::Kind::BitVec ? std::optional<unsigned>(t.bits) : std::nullopt};
      }
      case K::Apply: {
        const SpeqType& t = lookup(e.name);
        if (t.kind != SpeqType::Kind::Function) throw ScopeError(e.name + " is not a function");
        arith(e.args[0], bound);
        const SpeqType& r = *t.result;
        return {false, r.kind == SpeqType::Kind::BitVec ? std::optional<unsigned>(r.bits) : std::nullopt};
      }
      case K::Sum: {
        bound_variable(e.name);
        auto inner = bound;
        inner.insert(e.name);
        if (e.args[0].kind == K::Var && lookup(e.args[0].name).kind == SpeqType::Kind::Function) return {};
        arith(e.args[0], inner);
        return {};
      }
      case K::Dot: {
        const Info l = arith(e.args[0], bound);
        const Info r = arith(e.args[1], bound);
        if (!l.width && !r.width) throw ArityError("dot product " + to_string(e) + " has no bit-vector operand");
        if (l.width && r.width && *l.width != *r.width)
          throw ArityError("dot product of widths " + std::to_string(*l.width) + " and " + std::to_string(*r.width));
        return {};
      }
      case K::Add:
      case K::Sub:
      case K::Mul:
      case K::Div:
      case K::Mod:
      case K::Pow:
        arith(e.args[0], bound);
        arith(e.args[1], bound);
        return {};
      case K::Neg: arith(e.args[0], bound); return {};
      case K::False:
      case K::True: return {true, std::nullopt};
      case K::Eq:
      case K::Ne:
      case K::Lt:
      case K::Le:
      case K::Gt:
      case K::Ge:
        arith(e.args[0], bound);
        arith(e.args[1], bound);
        return {true, std::nullopt};
      case K::Not: logic(e.args[0], bound); return {true, std::nullopt};
      case K::And:
      case K::Or:
      case K::Implies:
        logic(e.args[0], bound);
        logic(e.args[1], bound);
        return {true, std::nullopt};
      case K::Forall:
      case K::Exists: {
        bound_variable(e.name);
        auto inner = bound;
        inner.insert(e.name);
        logic(e.args[0], inner);
        return {true, std::nullopt};
      }
    }
    return {};
  }

  SpeqSpec& spec_;
  std::map<std::string, SpeqType> scope_;
};

}  // namespace

SpeqSpec parse_speq(std::string_view source) {
  SpeqSpec spec = Parser(source).spec();
  Checker(spec).run();
  return spec;
}

// ---------------------------------------------------------------- output

namespace {

void format_block(std::ostream& os, const char* name, const std::vector<SpeqItem>& items) {
  os << name << "{\n";
  for (const auto& i : items) {
    if (i.is_define) os << "    define " << i.name << ":" << to_string(i.type) << "\n";
    else os << "    assert(" << to_string(i.expr) << ")\n";
  }
  os << "}";
}

std::string header(const std::string& fn, const FlagSpec& flag,
                   const std::vector<std::pair<std::string, SpeqType>>& inputs, const std::string& ret_name,
                   const SpeqType& ret_type) {
  std::ostringstream os;
  os << fn << "[" << to_string(flag) << "](";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (i) os << ", ";
    os << "define " << inputs[i].first << ":" << to_string(inputs[i].second);
  }
  os << ")->\n(define " << ret_name << ":" << to_string(ret_type) << ")\n";
  return os.str();
}

SpeqType speq_type_of(const SilqType& t) {
  switch (t.kind) {
    case SilqType::Kind::Bit: return SpeqType::bitvec(1);
    case SilqType::Kind::UInt: return SpeqType::bitvec(t.bits);
    case SilqType::Kind::Int: return SpeqType::nat();
    case SilqType::Kind::Oracle: return SpeqType::function(SpeqType::bitvec(t.bits), SpeqType::bitvec(1));
  }
  return SpeqType::nat();
}

}  // namespace

std::string format_speq(const SpeqSpec& spec) {
  std::ostringstream os;
  os << header(spec.function_name, spec.flag, spec.inputs, spec.ret_name, spec.ret_type);
  format_block(os, "pre", spec.pre_items);
  os << "\n";
  format_block(os, "post", spec.post_items);
  return os.str();
}

std::string generate_skeleton(const SilqAst& ast, const std::string& function_name) {
  const FunctionDef* fn = ast.find(function_name);
  if (!fn) throw NoSuchFunction(function_name);
  const auto rt = return_type(*fn);
  if (!rt) throw NoClassicalReturn(function_name + " returns no classical value");
  std::vector<std::pair<std::string, SpeqType>> inputs;
  for (const auto& p : fn->params) inputs.emplace_back(p.name, speq_type_of(p.type));
  SpeqSpec spec;
  spec.function_name = function_name;
  spec.flag = FlagSpec::rand();
  spec.inputs = std::move(inputs);
  spec.ret_name = function_name + "_ret";
  spec.ret_type = speq_type_of(*rt);
  return format_speq(spec);
}

}  // namespace qramverify
