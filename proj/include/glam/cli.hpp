#pragma once

// The command layer behind the `glam` binary. Argument parsing lives in
// tools/glam.cpp; everything here works on already parsed commands so that
// tests can drive it with string streams.
//
// Exit codes: 0 success, 1 domain error (parse, type, evaluation, BDE), 2
// usage error.

#include <cctype>
#include <cstdint>
#include <iostream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "glam/bde.hpp"
#include "glam/denot.hpp"
#include "glam/error.hpp"
#include "glam/frontend.hpp"
#include "glam/machine.hpp"
#include "glam/prelude.hpp"
#include "glam/typing.hpp"

namespace glam {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;
inline constexpr int kExitUsage = 2;

namespace cmd {

struct Check {
  std::string path;
};
struct Run {
  std::string path;
  std::string expr;
  std::uint64_t fuel = 0;  // 0: default_fuel()
};
struct Take {
  std::string path;
  std::string expr;
  std::size_t n = 0;
  std::uint64_t fuel = 0;
};
struct Denote {
  std::string path;
  std::string expr;
  unsigned index = 0;
};
struct BdeCompile {
  std::string path;
  std::string name;
};
struct BdeRun {
  std::string path;
  std::string name;
  std::vector<std::string> args;  // closed stream expressions over the prelude
  std::size_t n = 0;
  std::uint64_t fuel = 0;
};
struct Repl {
  std::optional<std::string> path;
  std::istream* in = nullptr;
  bool prompt = false;
};

}  // namespace cmd

using Command = std::variant<cmd::Check, cmd::Run, cmd::Take, cmd::Denote, cmd::BdeCompile, cmd::BdeRun,
                             cmd::Repl>;

struct CliOptions {
  std::optional<std::string> prelude_path;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A prelude plus optionally one loaded .gl file, with everything checked.
class Session {
 public:
  explicit Session(const CliOptions& opts = {}) {
    if (opts.prelude_path) {
      prelude_ = load_prelude_from(*opts.prelude_path);
    } else {
      prelude_ = load_prelude();
    }
    prelude_checked_ = check_program(prelude_, &checker_);
    reset_scope();
  }

  void load(const std::string& path) { load_source(read_file(path)); }

  void load_source(const std::string& text) {
    Program p = parse_program(text, &prelude_);
    CheckedProgram c = check_program(p, &checker_, &prelude_checked_.names);
    file_ = std::move(p);
    file_checked_ = std::move(c);
    reset_scope();
  }

  // Adds `def` / `type` items on top of what is loaded.
  void add_items(const std::string& text) {
    std::string combined = extra_ + "\n" + text;
    Program base = prelude_;
    if (file_) {
      for (const auto& a : file_->aliases) base.aliases.push_back(a);
      for (const auto& d : file_->defs) base.defs.push_back(d);
    }
    Program p = parse_program(combined, &base);
    check_program(p, &checker_, &names());
    extra_ = combined;
    extra_prog_ = std::move(p);
    extra_prog_base_ = std::move(base);
    reset_scope();
  }

  const CheckedProgram* file_checked() const { return file_checked_ ? &*file_checked_ : nullptr; }
  const PrettyNames& names() const { return names_; }

  struct Resolved {
    Term term;  // elaborated, closed
    Type type;
  };

  Resolved resolve(const std::string& expr) {
    Term t = parse_term(expr, &scope_, false);
    auto [e, a] = checker_.infer(TypingContext{}, t);
    return {e, a};
  }

  std::string show_type(const Type& a) const { return pretty(a, &names_); }
  std::string show_term(const Term& t) const { return pretty(t, &names_); }

 private:
  Checker checker_;
  Program prelude_;
  CheckedProgram prelude_checked_;
  std::optional<Program> file_;
  std::optional<CheckedProgram> file_checked_;
  std::string extra_;
  std::optional<Program> extra_prog_;
  std::optional<Program> extra_prog_base_;
  Scope scope_;
  PrettyNames names_;

  void reset_scope() {
    scope_ = Scope::of(prelude_);
    names_ = prelude_checked_.names;
    if (file_) {
      scope_.add(*file_);
      names_ = file_checked_->names;
    }
    if (extra_prog_) {
      scope_.add(*extra_prog_);
      names_.add(*extra_prog_);
    }
  }
};

namespace detail {

inline std::string join(const std::vector<std::uint64_t>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(xs[i]);
  }
  return out;
}

inline Type strip_box(const Type& a) { return a.is(TypeKind::Box) ? a.body() : a; }

// mu a. Nat * |>a, up to renaming, possibly boxed.
inline bool is_nat_stream(const Type& a0) {
  Type a = strip_box(a0);
  if (!a.is(TypeKind::Mu)) return false;
  Type body = a.body();
  return body.is(TypeKind::Prod) && body.left().is(TypeKind::Nat) && body.right().is(TypeKind::Later) &&
         body.right().body().is(TypeKind::Var) && body.right().body().name() == a.name();
}

inline std::uint64_t fuel_or_default(std::uint64_t f) { return f ? f : default_fuel(); }

inline void need_positive(std::uint64_t v, const char* what) {
  if (v == 0) throw UsageError(std::string(what) + " must be positive");
}

inline std::string take_text(Session& s, const std::string& expr, std::size_t n, std::uint64_t fuel) {
  auto r = s.resolve(expr);
  if (!is_nat_stream(r.type)) {
    throw Error(ErrorCode::NotObservable, "'" + expr + "' has type " + s.show_type(r.type) + ", not a stream");
  }
  return join(take_stream(r.term, n, fuel_or_default(fuel)));
}

inline std::string denote_text(Session& s, const std::string& expr, unsigned index) {
  auto r = s.resolve(expr);
  if (is_nat_stream(r.type)) return join(den_take(r.term, index));
  if (r.type.is(TypeKind::Nat)) return std::to_string(den_nat(r.term, index));
  return show(den_term(r.term, index));
}

inline std::string step_text(Session& s, const std::string& expr) {
  auto r = s.resolve(expr);
  auto next = step(r.term);
  if (!next) return is_value(r.term) ? "value" : "stuck";
  return s.show_term(*next);
}

struct Runner {
  std::ostream& out;
  std::ostream& err;
  const CliOptions& opts;

  int operator()(const cmd::Check& c) {
    Session s(opts);
    s.load(c.path);
    for (const auto& d : s.file_checked()->defs) out << d.name << " : " << s.show_type(d.type) << "\n";
    return kExitOk;
  }

  int operator()(const cmd::Run& c) {
    Session s(opts);
    s.load(c.path);
    auto r = s.resolve(c.expr);
    std::uint64_t fuel = fuel_or_default(c.fuel);
    Term v = eval_value(r.term, fuel);
    out << s.show_term(v) << "\n";
    return kExitOk;
  }

  int operator()(const cmd::Take& c) {
    need_positive(c.n, "n");
    Session s(opts);
    s.load(c.path);
    out << take_text(s, c.expr, c.n, c.fuel) << "\n";
    return kExitOk;
  }

  int operator()(const cmd::Denote& c) {
    need_positive(c.index, "index");
    Session s(opts);
    s.load(c.path);
    out << denote_text(s, c.expr, c.index) << "\n";
    return kExitOk;
  }

  int operator()(const cmd::BdeCompile& c) {
    auto defs = load_bde(read_file(c.path));
    CompiledBde b = compile_bde(defs, c.name);
    const PrettyNames& names = checked_prelude().names;
    Checker checker;
    checker.infer(TypingContext{}, b.guarded);
    checker.infer(TypingContext{}, b.lifted);
    out << "guarded : " << pretty(b.guarded_type, &names) << "\n";
    out << "  " << pretty(b.guarded, &names) << "\n";
    out << "lifted : " << pretty(b.lifted_type, &names) << "\n";
    out << "  " << pretty(b.lifted, &names) << "\n";
    return kExitOk;
  }

  int operator()(const cmd::BdeRun& c) {
    need_positive(c.n, "n");
    auto defs = load_bde(read_file(c.path));
    const BdeDef& d = find_bde(defs, c.name);
    if (c.args.size() != d.arity) {
      throw Error(ErrorCode::ArityError, "'" + d.name + "' takes " + std::to_string(d.arity) +
                                             " stream arguments, given " + std::to_string(c.args.size()));
    }
    CompiledBde b = compile_bde(defs, c.name);
    Session s(opts);
    std::uint64_t fuel = fuel_or_default(c.fuel);
    Term applied = b.lifted;
    std::vector<HostStream> host;
    for (const auto& a : c.args) {
      auto r = s.resolve(a);
      if (!is_nat_stream(r.type)) {
        throw Error(ErrorCode::TypeMismatch, "argument '" + a + "' is not a stream");
      }
      Term boxed = r.type.is(TypeKind::Box) ? r.term : Term::box({}, r.term);
      applied = Term::app(applied, boxed);
      host.push_back(HostStream::prefix(take_stream(r.term, c.n, fuel)));
    }
    Checker checker;
    checker.infer(TypingContext{}, applied);
    auto compiled = take_stream(applied, c.n, fuel);
    auto oracle = oracle_eval(defs, c.name, host, c.n);
    out << "compiled " << join(compiled) << "\n";
    out << "oracle   " << join(oracle) << "\n";
    bool same = compiled == oracle;
    out << (same ? "MATCH" : "MISMATCH") << "\n";
    return same ? kExitOk : kExitDomain;
  }

  int operator()(const cmd::Repl& c) {
    Session s(opts);
    if (c.path) s.load(*c.path);
    std::istream& in = c.in ? *c.in : std::cin;
    std::string line;
    while (true) {
      if (c.prompt) out << "glam> " << std::flush;
      if (!std::getline(in, line)) break;
      std::string_view v = trim(line);
      if (v.empty() || v.substr(0, 2) == "--") continue;
      if (v == ":q" || v == ":quit") break;
      try {
        repl_line(s, std::string(v));
      } catch (const Error& e) {
        err << e.what() << "\n";
      } catch (const UsageError& e) {
        err << "usage: " << e.what() << "\n";
      }
    }
    return kExitOk;
  }

  static std::string_view trim(std::string_view v) {
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.front()))) v.remove_prefix(1);
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    return v;
  }

  // "12 expr" -> (12, "expr")
  static std::pair<std::uint64_t, std::string> count_and_rest(std::string_view rest) {
    rest = trim(rest);
    std::size_t k = 0;
    while (k < rest.size() && std::isdigit(static_cast<unsigned char>(rest[k]))) ++k;
    if (k == 0) throw UsageError("expected a number");
    std::uint64_t n = std::stoull(std::string(rest.substr(0, k)));
    return {n, std::string(trim(rest.substr(k)))};
  }

  void repl_line(Session& s, const std::string& line) {
    auto starts = [&](std::string_view p) {
      return line.size() >= p.size() && line.compare(0, p.size(), p) == 0 &&
             (line.size() == p.size() || std::isspace(static_cast<unsigned char>(line[p.size()])));
    };
    std::string_view rest = std::string_view(line);
    if (starts(":t")) {
      auto r = s.resolve(std::string(trim(rest.substr(2))));
      out << s.show_type(r.type) << "\n";
    } else if (starts(":step")) {
      out << step_text(s, std::string(trim(rest.substr(5)))) << "\n";
    } else if (starts(":take")) {
      auto [n, e] = count_and_rest(rest.substr(5));
      need_positive(n, "n");
      out << take_text(s, e, n, 0) << "\n";
    } else if (starts(":den")) {
      auto [i, e] = count_and_rest(rest.substr(4));
      need_positive(i, "index");
      out << denote_text(s, e, static_cast<unsigned>(i)) << "\n";
    } else if (starts(":load")) {
      s.load(std::string(trim(rest.substr(5))));
      out << "loaded " << s.file_checked()->defs.size() << " definitions\n";
    } else if (!line.empty() && line[0] == ':') {
      throw UsageError("unknown command " + line.substr(0, line.find(' ')));
    } else if (starts("def") || starts("type")) {
      s.add_items(line);
    } else {
      auto r = s.resolve(line);
      std::uint64_t fuel = default_fuel();
      out << s.show_term(eval_value(r.term, fuel)) << "\n";
    }
  }
};

}  // namespace detail

inline int run_command(const Command& c, std::ostream& out, std::ostream& err, const CliOptions& opts = {}) {
  try {
    return std::visit(detail::Runner{out, err, opts}, c);
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return kExitDomain;
  }
}

}  // namespace glam
