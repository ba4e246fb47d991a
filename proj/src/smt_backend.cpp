#include "qramverify/smt_backend.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <Eigen/Core>
#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <unsupported/Eigen/Polynomials>

#include "qramverify/errors.hpp"
#include "qramverify/naming.hpp"

namespace qramverify {

// ---------------------------------------------------------------- emission

namespace {

using logic::Op;
using logic::Term;

/// Replaces (div a m) and (mod a m) with m a positive integer constant by
/// witness symbols q, r constrained by a = m*q + r, 0 <= r < m.
class DivModLowering {
 public:
  Term rewrite(const Term& t) {
    if (t.args().empty()) return t;
    std::vector<Term> args;
    args.reserve(t.args().size());
    bool changed = false;
    for (const auto& a : t.args()) {
      args.push_back(rewrite(a));
      changed = changed || !(args.back() == a);
    }
    if ((t.op() == Op::IntDiv || t.op() == Op::Mod) && args[1].is_const() && args[1].value() > 0) {
      const auto key = logic::to_smt(args[0]) + "|" + logic::to_smt(args[1]);
      auto it = index_.find(key);
      std::size_t k;
      if (it == index_.end()) {
        k = witnesses_.size();
        index_.emplace(key, k);
        const Term q = logic::var(naming::divmod_quotient(k), logic::Sort::Int);
        const Term r = logic::var(naming::divmod_remainder(k), logic::Sort::Int);
        witnesses_.push_back(k);
        constraints_.push_back(logic::eq(args[0], logic::add(logic::mul(args[1], q), r)));
        constraints_.push_back(logic::le(logic::int_const(0), r));
        constraints_.push_back(logic::lt(r, args[1]));
      } else {
        k = it->second;
      }
      return logic::var(t.op() == Op::IntDiv ? naming::divmod_quotient(k) : naming::divmod_remainder(k),
                        logic::Sort::Int);
    }
    if (!changed) return t;
    return logic::make(t.op(), t.sort(), std::move(args), t.value(), t.name());
  }

  const std::vector<std::size_t>& witnesses() const { return witnesses_; }
  const std::vector<Term>& constraints() const { return constraints_; }

 private:
  std::map<std::string, std::size_t> index_;
  std::vector<std::size_t> witnesses_;
  std::vector<Term> constraints_;
};

const char* sort_name(logic::Sort s) {
  switch (s) {
    case logic::Sort::Bool: return "Bool";
    case logic::Sort::Int: return "Int";
    case logic::Sort::Real: return "Real";
  }
  return "?";
}

void write_bound(std::ostream& os, const SymbolDecl& d) {
  auto constant = [&](const Rational& v) {
    return d.sort == logic::Sort::Int ? logic::int_const(v) : logic::real_const(v);
  };
  const Term x = logic::var(d.name, d.sort);
  if (d.lower) os << "(assert " << logic::to_smt(logic::le(constant(*d.lower), x)) << ")\n";
  if (d.upper) os << "(assert " << logic::to_smt(logic::lt(x, constant(*d.upper))) << ")\n";
}

}  // namespace

std::string emit_smt(const ObligationSet& prog, const ObligationSet& pre, const ObligationSet& post,
                     const SymbolTable& st, const EmitOptions& options) {
  std::vector<const ObligationSet*> groups = {&prog, &pre};
  std::set<std::string> free;
  for (const auto* g : {&prog, &pre, &post}) {
    for (const auto& t : g->assertions) logic::collect_vars(t, free);
    for (const auto& t : g->definitions) logic::collect_vars(t, free);
  }
  for (const auto& name : free)
    if (!st.contains(name)) throw UndeclaredSymbol(name);

  DivModLowering lower;
  std::vector<std::pair<std::string, std::vector<Term>>> body;
  auto lowered = [&](const std::vector<Term>& ts) {
    std::vector<Term> out;
    for (const auto& t : ts) out.push_back(lower.rewrite(t));
    return out;
  };
  for (const auto* g : groups) {
    std::vector<Term> ts = lowered(g->definitions);
    for (auto& t : lowered(g->assertions)) ts.push_back(std::move(t));
    body.emplace_back(to_string(g->group), std::move(ts));
  }
  std::optional<Term> negated_post;
  std::vector<Term> post_definitions;
  if (options.negate_post) {
    post_definitions = lowered(post.definitions);
    negated_post = logic::not_(logic::and_(lowered(post.assertions)));
  }

  std::ostringstream os;
  os << "(set-logic " << options.logic << ")\n";
  if (options.get_model) os << "(set-option :produce-models true)\n";
  for (const auto& d : st.symbols()) os << "(declare-fun " << d.name << " () " << sort_name(d.sort) << ")\n";
  for (std::size_t k : lower.witnesses()) {
    os << "(declare-fun " << naming::divmod_quotient(k) << " () Int)\n";
    os << "(declare-fun " << naming::divmod_remainder(k) << " () Int)\n";
  }
  for (const auto& d : st.symbols()) write_bound(os, d);
  if (st.contains(naming::kInvSqrt2)) {
    os << "(assert (> " << naming::kInvSqrt2 << " 0.0))\n";
    os << "(assert (= (* " << naming::kInvSqrt2 << " " << naming::kInvSqrt2 << ") (/ 1.0 2.0)))\n";
  }
  for (const auto& c : lower.constraints()) os << "(assert " << logic::to_smt(c) << ")\n";
  for (const auto& [group, ts] : body) {
    os << "; " << group << "\n";
    for (const auto& t : ts) os << "(assert " << logic::to_smt(t) << ")\n";
  }
  if (negated_post) {
    os << "; post\n";
    for (const auto& t : post_definitions) os << "(assert " << logic::to_smt(t) << ")\n";
    os << "(assert " << logic::to_smt(*negated_post) << ")\n";
  }
  os << "(check-sat)\n";
  if (options.get_model) os << "(get-model)\n";
  return os.str();
}

// ---------------------------------------------------------------- solver process

namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& content) {
    std::string pattern = (std::filesystem::temp_directory_path() / "qramverify-XXXXXX.smt2").string();
    std::vector<char> buf(pattern.begin(), pattern.end());
    buf.push_back('\0');
    const int fd = mkstemps(buf.data(), 5);
    if (fd < 0) throw SolverSpawnError(std::string("cannot create script file: ") + std::strerror(errno));
    path_ = buf.data();
    std::size_t done = 0;
    while (done < content.size()) {
      const ssize_t n = ::write(fd, content.data() + done, content.size() - done);
      if (n <= 0) {
        ::close(fd);
        throw SolverSpawnError("cannot write script file " + path_);
      }
      done += static_cast<std::size_t>(n);
    }
    ::close(fd);
  }
  ~TempFile() { std::filesystem::remove(path_); }
  TempFile(const TempFile&) = delete;
  TempFile& operator=(const TempFile&) = delete;

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class FileDescriptor {
 public:
  explicit FileDescriptor(int fd = -1) : fd_(fd) {}
  ~FileDescriptor() { reset(); }
  FileDescriptor(const FileDescriptor&) = delete;
  FileDescriptor& operator=(const FileDescriptor&) = delete;
  int get() const { return fd_; }
  void reset(int fd = -1) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = fd;
  }

 private:
  int fd_;
};

SatResult classify(const std::string& output) {
  std::istringstream is(output);
  std::string line;
  while (std::getline(is, line)) {
    line.erase(std::remove_if(line.begin(), line.end(), [](unsigned char c) { return std::isspace(c); }), line.end());
    if (line.empty()) continue;
    if (line == "sat") return SatResult::Sat;
    if (line == "unsat") return SatResult::Unsat;
    if (line == "unknown" || line == "timeout") return SatResult::Unknown;
    throw SolverProtocolError("unexpected solver output: " + output.substr(0, 400));
  }
  throw SolverProtocolError("empty solver output");
}

}  // namespace

SolverRun run_solver(const std::string& script, const SolverConfig& cfg) {
  if (cfg.timeout_seconds <= 0) throw Error("solver timeout must be positive");
  TempFile file(script);
  int out_pipe[2];
  int err_pipe[2];
  if (::pipe(out_pipe) != 0) throw SolverSpawnError("pipe failed");
  FileDescriptor out_read(out_pipe[0]);
  FileDescriptor out_write(out_pipe[1]);
  if (::pipe2(err_pipe, O_CLOEXEC) != 0) throw SolverSpawnError("pipe failed");
  FileDescriptor err_read(err_pipe[0]);
  FileDescriptor err_write(err_pipe[1]);

  std::vector<std::string> argv_s = {cfg.executable};
  argv_s.insert(argv_s.end(), cfg.extra_args.begin(), cfg.extra_args.end());
  argv_s.push_back(file.path());
  std::vector<char*> argv;
  for (auto& a : argv_s) argv.push_back(a.data());
  argv.push_back(nullptr);

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) throw SolverSpawnError("fork failed");
  if (pid == 0) {
    ::setpgid(0, 0);
    ::dup2(out_pipe[1], STDOUT_FILENO);
    ::dup2(out_pipe[1], STDERR_FILENO);
    ::close(out_pipe[0]);
    ::execvp(argv[0], argv.data());
    const int e = errno;
    [[maybe_unused]] auto n = ::write(err_pipe[1], &e, sizeof e);
    ::_exit(127);
  }
  out_write.reset();
  err_write.reset();

  int exec_errno = 0;
  if (::read(err_read.get(), &exec_errno, sizeof exec_errno) == static_cast<ssize_t>(sizeof exec_errno)) {
    ::waitpid(pid, nullptr, 0);
    throw SolverSpawnError("cannot run " + cfg.executable + ": " + std::strerror(exec_errno));
  }

  SolverRun run;
  const auto deadline = start + std::chrono::duration<double>(cfg.timeout_seconds);
  bool timed_out = false;
  char buf[4096];
  for (;;) {
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) {
      timed_out = true;
      break;
    }
    pollfd pfd{out_read.get(), POLLIN, 0};
    const int r = ::poll(&pfd, 1, static_cast<int>(std::min<long long>(left.count(), 1000)));
    if (r < 0 && errno == EINTR) continue;
    if (r <= 0) continue;
    const ssize_t n = ::read(out_read.get(), buf, sizeof buf);
    if (n <= 0) break;
    run.output.append(buf, static_cast<std::size_t>(n));
  }
  if (timed_out) {
    ::kill(-pid, SIGKILL);
    ::kill(pid, SIGKILL);
  }
  ::waitpid(pid, nullptr, 0);
  run.elapsed = std::chrono::steady_clock::now() - start;
  run.result = timed_out ? SatResult::Timeout : classify(run.output);
  return run;
}

// ---------------------------------------------------------------- model parsing

namespace {

struct SExpr {
  std::string atom;
  std::vector<SExpr> list;
  bool is_list = false;
};

class SExprReader {
 public:
  explicit SExprReader(const std::string& text) : text_(text) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip();
    if (pos_ >= text_.size()) throw SolverProtocolError("unexpected end of model");
    SExpr e;
    if (text_[pos_] == '(') {
      ++pos_;
      e.is_list = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw SolverProtocolError("unbalanced parentheses in model");
        if (text_[pos_] == ')') {
          ++pos_;
          return e;
        }
        e.list.push_back(read());
      }
    }
    if (text_[pos_] == ')') throw SolverProtocolError("unexpected ')' in model");
    if (text_[pos_] == '"' || text_[pos_] == '|') {
      const char close = text_[pos_];
      const std::size_t end = text_.find(close, pos_ + 1);
      if (end == std::string::npos) throw SolverProtocolError("unterminated literal in model");
      e.atom = text_.substr(pos_, end - pos_ + 1);
      pos_ = end + 1;
      return e;
    }
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')')
      ++pos_;
    e.atom = text_.substr(start, pos_ - start);
    return e;
  }

 private:
  void skip() {
    while (pos_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      } else if (text_[pos_] == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

Rational atom_value(const std::string& a) {
  try {
    return parse_decimal(a);
  } catch (const Error&) {
    throw SolverProtocolError("unexpected model value " + a);
  }
}

/// Coefficients (lowest degree first) of a univariate polynomial in x.
std::vector<double> polynomial(const SExpr& e) {
  auto combine = [](std::vector<double> a, const std::vector<double>& b, double sign) {
    if (a.size() < b.size()) a.resize(b.size(), 0.0);
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
    return a;
  };
  if (!e.is_list) {
    if (e.atom == "x") return {0.0, 1.0};
    return {to_double(atom_value(e.atom))};
  }
  if (e.list.empty() || e.list[0].is_list) throw SolverProtocolError("malformed root-obj polynomial");
  const std::string& op = e.list[0].atom;
  if (op == "+" || (op == "-" && e.list.size() > 2)) {
    std::vector<double> acc = polynomial(e.list[1]);
    for (std::size_t i = 2; i < e.list.size(); ++i) acc = combine(acc, polynomial(e.list[i]), op == "+" ? 1.0 : -1.0);
    return acc;
  }
  if (op == "-") return combine({}, polynomial(e.list[1]), -1.0);
  if (op == "*") {
    std::vector<double> acc = {1.0};
    for (std::size_t i = 1; i < e.list.size(); ++i) {
      const std::vector<double> f = polynomial(e.list[i]);
      std::vector<double> prod(acc.size() + f.size() - 1, 0.0);
      for (std::size_t a = 0; a < acc.size(); ++a)
        for (std::size_t b = 0; b < f.size(); ++b) prod[a + b] += acc[a] * f[b];
      acc = std::move(prod);
    }
    return acc;
  }
  if (op == "^" && e.list.size() == 3) {
    const std::vector<double> base = polynomial(e.list[1]);
    const long k = static_cast<long>(to_double(atom_value(e.list[2].atom)));
    std::vector<double> acc = {1.0};
    for (long i = 0; i < k; ++i) {
      std::vector<double> prod(acc.size() + base.size() - 1, 0.0);
      for (std::size_t a = 0; a < acc.size(); ++a)
        for (std::size_t b = 0; b < base.size(); ++b) prod[a + b] += acc[a] * base[b];
      acc = std::move(prod);
    }
    return acc;
  }
  throw SolverProtocolError("unsupported operator " + op + " in root-obj");
}

double root_object(const SExpr& poly, long index) {
  std::vector<double> c = polynomial(poly);
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  if (c.size() < 2) throw SolverProtocolError("constant root-obj polynomial");
  Eigen::VectorXd coeffs(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) coeffs[static_cast<Eigen::Index>(i)] = c[i];
  Eigen::PolynomialSolver<double, Eigen::Dynamic> solver(coeffs);
  std::vector<double> roots;
  solver.realRoots(roots, 1e-7);
  std::sort(roots.begin(), roots.end());
  if (index < 1 || static_cast<std::size_t>(index) > roots.size())
    throw SolverProtocolError("root-obj index out of range");
  return roots[static_cast<std::size_t>(index - 1)];
}

ModelValue value_of(const SExpr& e) {
  if (!e.is_list) {
    if (e.atom == "true") return {Rational(1), 1.0};
    if (e.atom == "false") return {Rational(0), 0.0};
    const Rational v = atom_value(e.atom);
    return {v, to_double(v)};
  }
  if (e.list.empty() || e.list[0].is_list) throw SolverProtocolError("malformed model value");
  const std::string& op = e.list[0].atom;
  if (op == "-" && e.list.size() == 2) {
    ModelValue v = value_of(e.list[1]);
    if (v.exact) v.exact = -*v.exact;
    v.approx = -v.approx;
    return v;
  }
  if (op == "/" && e.list.size() == 3) {
    const ModelValue n = value_of(e.list[1]);
    const ModelValue d = value_of(e.list[2]);
    if (n.exact && d.exact && *d.exact != 0) {
      const Rational q = *n.exact / *d.exact;
      return {q, to_double(q)};
    }
    return {std::nullopt, n.approx / d.approx};
  }
  if (op == "root-obj" && e.list.size() == 3)
    return {std::nullopt, root_object(e.list[1], static_cast<long>(to_double(atom_value(e.list[2].atom))))};
  throw SolverProtocolError("unsupported model value form " + op);
}

}  // namespace

Model parse_model(const std::string& text) {
  SExprReader reader(text);
  Model model;
  while (!reader.at_end()) {
    const SExpr e = reader.read();
    if (!e.is_list) {
      if (e.atom == "sat" || e.atom == "unsat" || e.atom == "unknown") continue;
      throw SolverProtocolError("unexpected token " + e.atom + " in solver output");
    }
    std::vector<SExpr> items = e.list;
    if (!items.empty() && !items[0].is_list && items[0].atom == "model") items.erase(items.begin());
    if (!items.empty() && !items[0].is_list && items[0].atom == "error") continue;
    for (const auto& d : items) {
      if (!d.is_list || d.list.size() != 5 || d.list[0].atom != "define-fun") continue;
      if (!d.list[2].is_list || !d.list[2].list.empty()) continue;
      model[d.list[1].atom] = value_of(d.list[4]);
    }
  }
  return model;
}

Counterexample decode_model(const Model& model, const SymbolTable& st) {
  Counterexample cx;
  cx.values = model;
  auto integer = [&](const std::string& name) -> std::optional<std::int64_t> {
    auto it = model.find(name);
    if (it == model.end()) return std::nullopt;
    if (it->second.exact && is_integer(*it->second.exact)) return to_int64(*it->second.exact);
    return static_cast<std::int64_t>(std::llround(it->second.approx));
  };
  for (const auto& d : st.symbols())
    if (d.role == SymbolDecl::Role::Measured)
      if (auto v = integer(d.name)) cx.measured[d.name] = *v;
  for (const auto& [f, bits] : st.oracles()) {
    std::vector<int> table;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << bits); ++v)
      table.push_back(static_cast<int>(integer(naming::oracle_entry(f, v)).value_or(0)));
    cx.oracles[f] = std::move(table);
  }
  for (const auto& [var, w] : st.final_classical)
    if (auto v = integer(naming::classical(var, w))) cx.classical[var] = *v;
  if (st.returned && st.returned->op() == Op::Var) cx.returned = integer(st.returned->name());
  return cx;
}

const char* to_string(Verdict::Status s) {
  switch (s) {
    case Verdict::Status::Verified: return "Verified";
    case Verdict::Status::Refuted: return "Refuted";
    case Verdict::Status::Vacuous: return "Vacuous";
    case Verdict::Status::Unknown: return "Unknown";
  }
  return "?";
}

Verdict check(const ObligationSet& prog, const ObligationSet& pre, const ObligationSet& post, const SymbolTable& st,
              const SolverConfig& cfg) {
  Verdict v;
  EmitOptions first;
  first.negate_post = true;
  first.get_model = cfg.produce_models;
  first.logic = cfg.logic;
  const SolverRun q1 = run_solver(emit_smt(prog, pre, post, st, first), cfg);
  v.solve += q1.elapsed;
  switch (q1.result) {
    case SatResult::Sat:
      v.status = Verdict::Status::Refuted;
      if (cfg.produce_models) v.counterexample = decode_model(parse_model(q1.output), st);
      else v.counterexample = Counterexample{};
      return v;
    case SatResult::Unknown: v.reason = "solver returned unknown"; return v;
    case SatResult::Timeout: v.reason = "timeout"; return v;
    case SatResult::Unsat: break;
  }
  EmitOptions second;
  second.negate_post = false;
  second.logic = cfg.logic;
  const SolverRun q2 = run_solver(emit_smt(prog, pre, post, st, second), cfg);
  v.solve += q2.elapsed;
  switch (q2.result) {
    case SatResult::Sat: v.status = Verdict::Status::Verified; break;
    case SatResult::Unsat:
      v.status = Verdict::Status::Vacuous;
      v.reason = "prog and pre are unsatisfiable";
      break;
    case SatResult::Unknown: v.reason = "solver returned unknown on the sanity query"; break;
    case SatResult::Timeout: v.reason = "timeout on the sanity query"; break;
  }
  return v;
}

}  // namespace qramverify
