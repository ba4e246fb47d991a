#include <set>

#include "lexer.hpp"
#include "qramverify/errors.hpp"
#include "qramverify/silq_ast.hpp"

namespace qramverify {

namespace {

using detail::Token;
using detail::TokenStream;

const std::vector<std::string> kSymbols = {":=", "==", "!=", "<=", ">=", "&&", "||", "!->", "->", "(", ")", "{", "}",
                                           "[", "]", ",", ";", ":", "=", "<", ">", "!", "+", "-", "*", "/", "%"};

const std::map<std::string, Token> kAliases = {
    {"¬", {Token::Kind::Symbol, "!", {}}},   {"≤", {Token::Kind::Symbol, "<=", {}}},
    {"≥", {Token::Kind::Symbol, ">=", {}}},  {"≠", {Token::Kind::Symbol, "!=", {}}},
    {"∧", {Token::Kind::Symbol, "&&", {}}},  {"∨", {Token::Kind::Symbol, "||", {}}},
    {"→", {Token::Kind::Symbol, "->", {}}},  {"π", {Token::Kind::Ident, "pi", {}}},
    {"𝔹", {Token::Kind::Ident, "B", {}}},    {"ℕ", {Token::Kind::Ident, "N", {}}},
    {"ℤ", {Token::Kind::Ident, "Z", {}}},
};

const std::set<std::string> kTypeAnnotations = {"const", "qfree", "mfree", "lifted"};
const std::set<std::string> kUnsupportedKeywords = {"for", "while", "repeat", "forget", "lambda", "dup", "reverse",
                                                    "assert", "import", "dat", "then"};

class Parser {
 public:
  explicit Parser(std::string_view src) : ts_(detail::tokenize(src, kSymbols, kAliases)) {}

  SilqAst program() {
    SilqAst ast;
    while (!ts_.at_end()) ast.functions.push_back(function());
    return ast;
  }

 private:
  FunctionDef function() {
    FunctionDef fn;
    fn.pos = ts_.peek().pos;
    reject_unsupported();
    ts_.expect_ident("def");
    fn.name = ts_.identifier("function name");
    ts_.expect_symbol("(");
    if (!ts_.is_symbol(")")) {
      do {
        Param p;
        p.name = ts_.identifier("parameter name");
        ts_.expect_symbol(":");
        p.type = type();
        fn.params.push_back(std::move(p));
      } while (ts_.accept_symbol(","));
    }
    ts_.expect_symbol(")");
    if (ts_.accept_symbol(":")) fn.return_annotation = type();
    fn.body = block();
    return fn;
  }

  SilqType type() {
    std::vector<std::string> arg_ann = annotations();
    SilqType t = base_type();
    if (ts_.is_symbol("!->") || ts_.is_symbol("->")) {
      const bool classical_arrow = ts_.next().text == "!->";
      std::vector<std::string> res_ann = annotations();
      SilqType result = base_type();
      if (result.kind != SilqType::Kind::Bit)
        throw UnsupportedFeature("oracle result type " + to_string(result) + " (only B is supported)");
      if (t.kind != SilqType::Kind::Bit && t.kind != SilqType::Kind::UInt)
        throw UnsupportedFeature("oracle argument type " + to_string(t));
      SilqType o = SilqType::oracle(size(t));
      o.arg_annotations = std::move(arg_ann);
      o.result_annotations = std::move(res_ann);
      o.classical_arrow = classical_arrow;
      return o;
    }
    if (!arg_ann.empty()) t.arg_annotations = std::move(arg_ann);
    return t;
  }

  std::vector<std::string> annotations() {
    std::vector<std::string> out;
    while (ts_.peek().kind == Token::Kind::Ident && kTypeAnnotations.count(ts_.peek().text)) out.push_back(ts_.next().text);
    return out;
  }

  SilqType base_type() {
    const bool classical = ts_.accept_symbol("!");
    const Token& t = ts_.peek();
    if (t.kind != Token::Kind::Ident) ts_.fail("type");
    const std::string name = ts_.next().text;
    if (name == "B" || name == "bool") return SilqType::bit(classical);
    if (name == "uint") {
      ts_.expect_symbol("[");
      const std::string n = ts_.number("register width");
      ts_.expect_symbol("]");
      const long width = std::stol(n);
      if (width < 1 || width > 62) throw TypeError("uint width " + n + " out of range");
      return SilqType::uint(static_cast<unsigned>(width), classical);
    }
    if (name == "N" || name == "Z" || name == "int") {
      if (!classical) throw TypeError("unbounded integers must be classical (write !" + name + ")");
      return SilqType::integer();
    }
    throw SyntaxError(t.pos.line, t.pos.col, "type, found '" + name + "'");
  }

  std::vector<Stmt> block() {
    ts_.expect_symbol("{");
    std::vector<Stmt> body;
    while (!ts_.is_symbol("}")) {
      if (ts_.at_end()) ts_.fail("'}'");
      body.push_back(statement());
    }
    ts_.expect_symbol("}");
    return body;
  }

  void reject_unsupported() {
    const Token& t = ts_.peek();
    if (t.kind == Token::Kind::Ident && kUnsupportedKeywords.count(t.text))
      throw UnsupportedFeature("'" + t.text + "' at " + std::to_string(t.pos.line) + ":" + std::to_string(t.pos.col) +
                               " is outside the Silq-Hybrid fragment");
  }

  Stmt statement() {
    reject_unsupported();
    Stmt s;
    s.pos = ts_.peek().pos;
    if (ts_.accept_ident("if")) {
      s.kind = Stmt::Kind::If;
      s.value = expression();
      if (s.value.kind == Expr::Kind::Call && s.value.name == "measure")
        throw UnsupportedFeature("branching on a measurement");
      s.then_body = block();
      if (ts_.accept_ident("else")) {
        s.has_else = true;
        if (ts_.is_ident("if")) s.else_body.push_back(statement());
        else s.else_body = block();
      }
      return s;
    }
    if (ts_.accept_ident("return")) {
      s.kind = Stmt::Kind::Return;
      s.target = primary();
      if (s.target.kind != Expr::Kind::Var) throw UnsupportedFeature("return of an expression (return a variable)");
      ts_.expect_symbol(";");
      return s;
    }
    if (ts_.is_ident("phase") && ts_.is_symbol("(", 1)) {
      ts_.next();
      ts_.next();
      s.kind = Stmt::Kind::Phase;
      s.value = expression();
      ts_.expect_symbol(")");
      ts_.expect_symbol(";");
      return s;
    }
    s.target = lvalue();
    if (ts_.accept_symbol("=")) s.rebind = true;
    else ts_.expect_symbol(":=");
    s.value = expression();
    ts_.expect_symbol(";");
    classify_assignment(s);
    return s;
  }

  void classify_assignment(Stmt& s) {
    const Expr& v = s.value;
    if (v.kind != Expr::Kind::Call) return;
    if (v.name == "measure") {
      if (v.args.size() != 1 || v.args[0].kind != Expr::Kind::Var)
        throw TypeError("measure takes one variable at " + where(v.pos));
      if (s.target.kind != Expr::Kind::Var) throw TypeError("measurement result must be bound to a variable");
      s.kind = Stmt::Kind::Measure;
    } else if (v.name == "H" || v.name == "X") {
      if (v.args.size() != 1) throw TypeError(v.name + " takes one argument at " + where(v.pos));
      if (!same_structure(v.args[0], s.target))
        throw UnsupportedFeature("gate result must be assigned back to its argument at " + where(s.pos));
      s.kind = Stmt::Kind::GateApply;
    }
  }

  Expr lvalue() {
    Expr e;
    e.pos = ts_.peek().pos;
    e.kind = Expr::Kind::Var;
    e.name = ts_.identifier("statement");
    if (ts_.accept_symbol("[")) e = index_of(std::move(e));
    return e;
  }

  Expr index_of(Expr base) {
    Expr e;
    e.pos = base.pos;
    e.kind = Expr::Kind::Index;
    e.name = base.name;
    if (base.kind != Expr::Kind::Var) throw TypeError("only variables can be indexed at " + where(base.pos));
    e.value = std::stoll(ts_.number("integer index"));
    ts_.expect_symbol("]");
    return e;
  }

  Expr make_binary(std::string op, Expr l, Expr r) {
    Expr e;
    e.pos = l.pos;
    e.kind = Expr::Kind::Binary;
    e.name = std::move(op);
    e.args.push_back(std::move(l));
    e.args.push_back(std::move(r));
    return e;
  }

  Expr expression() { return disjunction(); }

  Expr disjunction() {
    Expr e = conjunction();
    while (ts_.is_symbol("||")) {
      ts_.next();
      e = make_binary("||", std::move(e), conjunction());
    }
    return e;
  }

  Expr conjunction() {
    Expr e = comparison();
    while (ts_.is_symbol("&&")) {
      ts_.next();
      e = make_binary("&&", std::move(e), comparison());
    }
    return e;
  }

  Expr comparison() {
    Expr e = additive();
    for (const char* op : {"==", "!=", "<=", ">=", "<", ">"}) {
      if (ts_.is_symbol(op)) {
        ts_.next();
        return make_binary(op, std::move(e), additive());
      }
    }
    return e;
  }

  Expr additive() {
    Expr e = multiplicative();
    while (ts_.is_symbol("+") || ts_.is_symbol("-")) {
      std::string op = ts_.next().text;
      e = make_binary(op, std::move(e), multiplicative());
    }
    return e;
  }

  Expr multiplicative() {
    Expr e = unary();
    while (ts_.is_symbol("*") || ts_.is_symbol("/") || ts_.is_symbol("%")) {
      std::string op = ts_.next().text;
      e = make_binary(op, std::move(e), unary());
    }
    return e;
  }

  Expr unary() {
    if (ts_.is_symbol("!") || ts_.is_symbol("-")) {
      Expr e;
      e.pos = ts_.peek().pos;
      e.kind = Expr::Kind::Unary;
      e.name = ts_.next().text;
      e.args.push_back(unary());
      return e;
    }
    return primary();
  }

  Expr primary() {
    Expr e;
    e.pos = ts_.peek().pos;
    if (ts_.peek().kind == Token::Kind::Number) {
      const std::string text = ts_.next().text;
      if (text.find('.') != std::string::npos) throw UnsupportedFeature("non-integer literal " + text);
      e.kind = Expr::Kind::Int;
      e.value = std::stoll(text);
      if (ts_.accept_symbol(":")) {
        e.kind = Expr::Kind::TypedConst;
        e.annotation = type();
      }
      return e;
    }
    if (ts_.accept_symbol("(")) {
      e = expression();
      ts_.expect_symbol(")");
      return e;
    }
    reject_unsupported();
    e.name = ts_.identifier("expression");
    if (ts_.accept_symbol("(")) {
      e.kind = Expr::Kind::Call;
      if (!ts_.is_symbol(")")) {
        do e.args.push_back(expression());
        while (ts_.accept_symbol(","));
      }
      ts_.expect_symbol(")");
      if (e.args.size() > 2)
        throw UnsupportedFeature("call to " + e.name + " with " + std::to_string(e.args.size()) +
                                 " arguments (at most two are allowed)");
      return e;
    }
    e.kind = Expr::Kind::Var;
    if (ts_.accept_symbol("[")) return index_of(std::move(e));
    return e;
  }

  static std::string where(const SourcePos& p) { return std::to_string(p.line) + ":" + std::to_string(p.col); }

  TokenStream ts_;
};

// Definedness and return placement.
class ScopeChecker {
 public:
  explicit ScopeChecker(const SilqAst& ast) : ast_(ast) {}

  void check() {
    std::set<std::string> names;
    for (const auto& fn : ast_.functions) {
      if (!names.insert(fn.name).second) throw TypeError("function " + fn.name + " defined twice");
    }
    for (const auto& fn : ast_.functions) {
      std::set<std::string> scope;
      for (const auto& p : fn.params) {
        if (!scope.insert(p.name).second) throw TypeError("parameter " + p.name + " repeated in " + fn.name);
      }
      for (std::size_t i = 0; i < fn.body.size(); ++i) {
        if (fn.body[i].kind == Stmt::Kind::Return && i + 1 != fn.body.size())
          throw UnsupportedFeature("return must be the final statement of " + fn.name);
      }
      body(fn.body, scope);
    }
  }

 private:
  void body(const std::vector<Stmt>& stmts, std::set<std::string>& scope) {
    for (const auto& s : stmts) statement(s, scope);
  }

  void statement(const Stmt& s, std::set<std::string>& scope) {
    switch (s.kind) {
      case Stmt::Kind::If: {
        use(s.value, scope);
        auto inner = scope;
        body(s.then_body, inner);
        auto other = scope;
        body(s.else_body, other);
        return;
      }
      case Stmt::Kind::Return: use(s.target, scope); return;
      case Stmt::Kind::Phase: use(s.value, scope); return;
      case Stmt::Kind::GateApply: use(s.target, scope); return;
      case Stmt::Kind::Measure:
      case Stmt::Kind::Assign:
        use(s.value, scope);
        if (s.rebind || s.target.kind == Expr::Kind::Index) use(s.target, scope);
        scope.insert(s.target.name);
        return;
    }
  }

  void use(const Expr& e, const std::set<std::string>& scope) {
    switch (e.kind) {
      case Expr::Kind::Var:
      case Expr::Kind::Index:
        if (e.name == "pi" && e.kind == Expr::Kind::Var) return;
        if (!scope.count(e.name))
          throw UseBeforeDefine(e.name + " used before definition at " + std::to_string(e.pos.line) + ":" +
                                std::to_string(e.pos.col));
        return;
      case Expr::Kind::Call:
        if (!is_builtin(e.name) && !scope.count(e.name) && !ast_.find(e.name))
          throw UseBeforeDefine("function " + e.name + " is not defined");
        for (const auto& a : e.args) use(a, scope);
        return;
      default:
        for (const auto& a : e.args) use(a, scope);
        return;
    }
  }

  static bool is_builtin(const std::string& n) { return n == "H" || n == "X" || n == "measure" || n == "phase"; }

  const SilqAst& ast_;
};

}  // namespace

const FunctionDef* SilqAst::find(std::string_view name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

SilqAst parse_silq(std::string_view source) {
  SilqAst ast = Parser(source).program();
  ScopeChecker(ast).check();
  return ast;
}

}  // namespace qramverify
