#pragma once

// Concrete syntax: lexer, parser for types, terms and programs, the fix[T]
// macro, and a pretty-printer whose output parses back to an alpha-equal term.

#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "glam/error.hpp"
#include "glam/syntax.hpp"

namespace glam {

// ------------------------------------------------------------- programs

struct Definition {
  std::string name;
  Type type;
  Term body;
  // ascribe(body, type). Later definitions that mention `name` share this
  // exact node, so a definition is type checked and elaborated once.
  Term ref;
  SourcePos pos;
};

struct TypeAlias {
  std::string name;
  Type type;
};

struct Program {
  std::vector<TypeAlias> aliases;
  std::vector<Definition> defs;

  const Definition* find(std::string_view name) const {
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }
  const TypeAlias* find_alias(std::string_view name) const {
    for (auto it = aliases.rbegin(); it != aliases.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }
};

// Names visible to the parser besides locally bound variables.
struct Scope {
  std::map<std::string, Term, std::less<>> terms;
  std::map<std::string, Type, std::less<>> types;

  void add(const Program& p) {
    for (const auto& a : p.aliases) types[a.name] = a.type;
    for (const auto& d : p.defs) terms[d.name] = d.ref;
  }
  static Scope of(const Program& p) {
    Scope s;
    s.add(p);
    return s;
  }
};

// --------------------------------------------------------- fix[T] macro

// Rec_T = mu r. |>r -> (|>T -> T) -> T
inline Type fix_rec_type(const Type& t) {
  auto fv = type_free_vars(t);
  std::string r = "r";
  if (std::find(fv.begin(), fv.end(), r) != fv.end()) {
    r = fresh_name(r, [&](const std::string& n) {
      return std::find(fv.begin(), fv.end(), n) != fv.end();
    });
  }
  Type body = Type::arrow(Type::later(Type::var(r)),
                          Type::arrow(Type::arrow(Type::later(t), t), t));
  return Type::mu(r, body);
}

// Turing's guarded fixed point combinator at T, of type (|>T -> T) -> T:
//   theta = \y:|>Rec. \f:(|>T -> T). f ((next \z:Rec. unfold z) <*> y <*> next y <*> next f)
//   fix   = theta (next (fold[Rec] theta))
inline Term make_fix(const Type& t) {
  Type rec = fix_rec_type(t);
  Term unfolder = Term::next(Term::lam("z", rec, Term::unfold(Term::var("z"))));
  Term y = Term::var("y");
  Term f = Term::var("f");
  Term inner = Term::later_app(
      Term::later_app(Term::later_app(unfolder, y), Term::next(y)), Term::next(f));
  Term theta = Term::lam(
      "y", Type::later(rec),
      Term::lam("f", Type::arrow(Type::later(t), t), Term::app(f, inner)));
  return Term::app(theta, Term::next(Term::fold(rec, theta)));
}

// If t is (alpha-equal to) make_fix(T), returns T.
inline std::optional<Type> match_fix(const Term& t) {
  if (!t.is(TermKind::App) || !t.child(0).is(TermKind::Lam)) return std::nullopt;
  const Term& theta = t.child(0);
  if (!theta.child(0).is(TermKind::Lam)) return std::nullopt;
  const auto& fannot = theta.child(0).annotation();
  if (!fannot || !fannot->is(TypeKind::Arrow)) return std::nullopt;
  Type target = fannot->right();
  if (!alpha_eq(t, make_fix(target))) return std::nullopt;
  return target;
}

// ----------------------------------------------------------------- lexer

namespace detail {

enum class Tok { Ident, Number, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  SourcePos pos;
};

inline bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
inline bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'';
}

inline std::vector<Token> lex(std::string_view src) {
  static const char* const symbols[] = {"<*>", "|>", "->", "<-", "\\", ".", ",", ":", ";",
                                        "=",   "(",  ")",  "[",  "]",  "{", "}", "#", "*",
                                        "+",   "|"};
  std::vector<Token> out;
  unsigned line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "--") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    SourcePos pos{line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), pos});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* s : symbols) {
      std::string_view sym(s);
      if (src.substr(i, sym.size()) == sym) {
        out.push_back({Tok::Sym, std::string(sym), pos});
        advance(sym.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw Error(ErrorCode::LexError, std::string("unexpected character '") + c + "'", pos);
    }
  }
  out.push_back({Tok::End, "", SourcePos{line, col}});
  return out;
}

inline bool is_keyword(std::string_view s) {
  static const char* const kws[] = {"case", "of",   "inl",  "inr",  "abort", "fold", "unfold",
                                    "next", "prev", "box",  "boxp", "unbox", "succ", "fst",
                                    "snd",  "fix",  "def",  "type", "mu",    "Nat",  "Unit",
                                    "Void", "addN", "mulN"};
  for (const char* k : kws) {
    if (s == k) return true;
  }
  return false;
}

// ---------------------------------------------------------------- parser

class Parser {
 public:
  Parser(std::string_view src, const Scope* scope, bool allow_free)
      : toks_(lex(src)), scope_(scope), allow_free_(allow_free) {}

  Term parse_term_eof() {
    Term t = term();
    expect_end();
    return t;
  }
  Type parse_type_eof() {
    Type a = type();
    expect_end();
    return a;
  }

  Program parse_program(const Program* base) {
    Program prog;
    Scope local;
    if (base) local.add(*base);
    if (scope_) {
      for (const auto& [k, v] : scope_->terms) local.terms.emplace(k, v);
      for (const auto& [k, v] : scope_->types) local.types.emplace(k, v);
    }
    scope_ = &local;
    std::vector<std::string> seen_terms, seen_types;
    while (peek().kind != Tok::End) {
      SourcePos pos = peek().pos;
      if (accept_kw("type")) {
        std::string name = ident("type alias name");
        if (std::find(seen_types.begin(), seen_types.end(), name) != seen_types.end()) {
          throw Error(ErrorCode::DuplicateName, "type '" + name + "' defined twice", pos);
        }
        expect("=");
        Type a = type();
        expect(";");
        seen_types.push_back(name);
        prog.aliases.push_back({name, a});
        local.types[name] = a;
        continue;
      }
      if (!accept_kw("def")) fail("expected 'def' or 'type'");
      std::string name = ident("definition name");
      if (std::find(seen_terms.begin(), seen_terms.end(), name) != seen_terms.end()) {
        throw Error(ErrorCode::DuplicateName, "'" + name + "' defined twice", pos);
      }
      expect(":");
      Type a = type();
      expect("=");
      Term body = term();
      expect(";");
      seen_terms.push_back(name);
      Definition d{name, a, body, Term::ascribe(body, a).with_pos(pos), pos};
      local.terms[name] = d.ref;
      prog.defs.push_back(std::move(d));
    }
    return prog;
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  const Scope* scope_;
  bool allow_free_;
  std::vector<std::string> bound_;
  std::vector<std::string> tbound_;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(i_ + k, toks_.size() - 1)]; }
  const Token& take() { return toks_[i_ < toks_.size() - 1 ? i_++ : i_]; }

  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::SyntaxError, msg + ", found " + found, t.pos);
  }
  bool is_sym(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Sym && peek(k).text == s;
  }
  bool is_kw(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Ident && peek(k).text == s;
  }
  bool accept(std::string_view s) {
    if (!is_sym(s)) return false;
    take();
    return true;
  }
  bool accept_kw(std::string_view s) {
    if (!is_kw(s)) return false;
    take();
    return true;
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }
  void expect_kw(std::string_view s) {
    if (!accept_kw(s)) fail("expected '" + std::string(s) + "'");
  }
  void expect_end() {
    if (peek().kind != Tok::End) fail("unexpected trailing input");
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident || is_keyword(peek().text)) fail(std::string("expected ") + what);
    return take().text;
  }

  // ---- types:  arrow > sum > prod > prefix/atom

  Type type() {
    Type lhs = type_sum();
    if (accept("->")) return Type::arrow(lhs, type());
    return lhs;
  }
  Type type_sum() {
    Type lhs = type_prod();
    while (accept("+")) lhs = Type::sum(lhs, type_prod());
    return lhs;
  }
  Type type_prod() {
    Type lhs = type_prefix();
    while (accept("*")) lhs = Type::prod(lhs, type_prefix());
    return lhs;
  }
  Type type_prefix() {
    if (accept("|>")) return Type::later(type_prefix());
    if (accept("#")) return Type::box(type_prefix());
    if (accept_kw("mu")) {
      std::string a = ident("type variable");
      expect(".");
      tbound_.push_back(a);
      Type body = type();
      tbound_.pop_back();
      return Type::mu(a, body);
    }
    return type_atom();
  }
  Type type_atom() {
    if (accept("(")) {
      Type a = type();
      expect(")");
      return a;
    }
    if (accept_kw("Nat")) return Type::nat();
    if (accept_kw("Unit")) return Type::unit();
    if (accept_kw("Void")) return Type::void_();
    std::string name = ident("type");
    if (std::find(tbound_.begin(), tbound_.end(), name) == tbound_.end() && scope_) {
      auto it = scope_->types.find(name);
      if (it != scope_->types.end()) return it->second;
    }
    return Type::var(name);
  }
  Type bracket_type() {
    expect("[");
    Type a = type();
    expect("]");
    return a;
  }

  // ---- terms

  bool closing_kw(std::size_t k = 0) const {
    return is_kw("prev", k) || is_kw("box", k) || is_kw("boxp", k);
  }
  bool starts_binder() const {
    if (is_sym("\\") || is_kw("case")) return true;
    return closing_kw() && (is_sym("{", 1) || is_sym(".", 1));
  }
  bool starts_prefix() const {
    static const char* const kws[] = {"succ", "fst",  "snd",   "next", "unfold",
                                      "unbox", "inl", "inr",   "abort", "fold"};
    for (const char* k : kws) {
      if (is_kw(k)) return true;
    }
    return closing_kw() && !is_sym("{", 1) && !is_sym(".", 1);
  }
  bool starts_atom() const {
    const Token& t = peek();
    if (t.kind == Tok::Number) return true;
    if (t.kind == Tok::Sym) return t.text == "(";
    if (t.kind != Tok::Ident) return false;
    return !is_keyword(t.text) || t.text == "fix" || t.text == "addN" || t.text == "mulN";
  }

  Term term() {
    if (starts_binder()) return binder_form();
    return ostar();
  }

  Term ostar() {
    Term lhs = app();
    while (is_sym("<*>")) {
      SourcePos pos = take().pos;
      if (starts_binder()) return Term::later_app(lhs, binder_form()).with_pos(pos);
      lhs = Term::later_app(lhs, app()).with_pos(pos);
    }
    return lhs;
  }

  Term app() {
    SourcePos pos = peek().pos;
    if (is_kw("addN") || is_kw("mulN")) {
      std::string op = take().text;
      std::vector<Term> args = app_args();
      return primitive(op, std::move(args), pos);
    }
    if (starts_binder()) return binder_form();
    if (!starts_prefix() && !starts_atom()) fail("expected a term");
    Term head = prefix();
    for (Term& a : app_args()) head = Term::app(head, std::move(a)).with_pos(pos);
    return head;
  }

  std::vector<Term> app_args() {
    std::vector<Term> args;
    while (true) {
      if (starts_binder()) {
        args.push_back(binder_form());
        break;
      }
      if (starts_prefix() || starts_atom()) {
        args.push_back(prefix());
        continue;
      }
      break;
    }
    return args;
  }

  Term prefix_or_binder() {
    if (starts_binder()) return binder_form();
    if (!starts_prefix() && !starts_atom()) fail("expected a term");
    return prefix();
  }

  Term prefix() {
    SourcePos pos = peek().pos;
    if (!starts_prefix()) return atom();
    std::string kw = take().text;
    if (kw == "inl" || kw == "inr" || kw == "abort" || kw == "fold") {
      Type annot = bracket_type();
      Term arg = prefix_or_binder();
      Term t = kw == "inl"     ? Term::in1(annot, arg)
               : kw == "inr"   ? Term::in2(annot, arg)
               : kw == "abort" ? Term::abort(annot, arg)
                               : Term::fold(annot, arg);
      return t.with_pos(pos);
    }
    if (kw == "prev" || kw == "box" || kw == "boxp") {
      Term body = prefix_or_binder();
      if (!body.is_closed()) {
        throw Error(ErrorCode::SyntaxError,
                    "'" + kw + " t' requires a closed t; free variable '" + body.free_vars()[0] +
                        "' (use '" + kw + ". t' or an explicit substitution)",
                    pos);
      }
      return closing(kw, {}, body).with_pos(pos);
    }
    Term arg = prefix_or_binder();
    Term t = kw == "succ"     ? Term::succ(arg)
             : kw == "fst"    ? Term::proj1(arg)
             : kw == "snd"    ? Term::proj2(arg)
             : kw == "next"   ? Term::next(arg)
             : kw == "unfold" ? Term::unfold(arg)
                              : Term::unbox(arg);
    return t.with_pos(pos);
  }

  static Term closing(const std::string& kw, ExplicitSubst sigma, Term body) {
    if (kw == "prev") return Term::prev(std::move(sigma), std::move(body));
    if (kw == "box") return Term::box(std::move(sigma), std::move(body));
    return Term::box_sum(std::move(sigma), std::move(body));
  }

  Term atom() {
    const Token& tok = peek();
    SourcePos pos = tok.pos;
    if (tok.kind == Tok::Number) {
      std::string digits = take().text;
      if (digits.size() > 6) throw Error(ErrorCode::SyntaxError, "numeral too large", pos);
      return Term::numeral(std::stoull(digits)).with_pos(pos);
    }
    if (accept("(")) {
      if (accept(")")) return Term::unit().with_pos(pos);
      Term first = term();
      if (accept(",")) {
        Term second = term();
        expect(")");
        return Term::pair(first, second).with_pos(pos);
      }
      if (accept(":")) {
        Type a = type();
        expect(")");
        return Term::ascribe(first, a).with_pos(pos);
      }
      expect(")");
      return first;
    }
    if (accept_kw("fix")) return make_fix(bracket_type()).with_pos(pos);
    if (is_kw("addN") || is_kw("mulN")) return primitive(take().text, {}, pos);
    std::string name = ident("a term");
    return identifier(name, pos);
  }

  Term identifier(const std::string& name, SourcePos pos) {
    if (std::find(bound_.rbegin(), bound_.rend(), name) != bound_.rend()) {
      return Term::var(name).with_pos(pos);
    }
    if (scope_) {
      auto it = scope_->terms.find(name);
      if (it != scope_->terms.end()) return it->second;
    }
    if (!allow_free_) {
      throw Error(ErrorCode::UnknownIdentifier, "unknown identifier '" + name + "'", pos);
    }
    return Term::var(name).with_pos(pos);
  }

  Term primitive(const std::string& op, std::vector<Term> args, SourcePos pos) {
    const PrimitiveInfo* info = find_primitive(op);
    if (args.size() > info->arity) {
      throw Error(ErrorCode::ArityError,
                  op + " takes " + std::to_string(info->arity) + " arguments, given " +
                      std::to_string(args.size()),
                  pos);
    }
    // Eta-expand partial applications so Prim nodes are always saturated.
    std::vector<std::string> params;
    auto taken = [&](const std::string& n) {
      for (const auto& a : args) {
        if (a.has_free(n)) return true;
      }
      return std::find(params.begin(), params.end(), n) != params.end();
    };
    std::vector<Term> full = args;
    while (full.size() < info->arity) {
      params.push_back(fresh_name("n", taken));
      full.push_back(Term::var(params.back()));
    }
    Term t = Term::prim(op, std::move(full)).with_pos(pos);
    for (auto it = params.rbegin(); it != params.rend(); ++it) {
      t = Term::lam(*it, Type::nat(), t).with_pos(pos);
    }
    return t;
  }

  Term with_bound(const std::vector<std::string>& names, bool replace) {
    std::vector<std::string> saved = bound_;
    if (replace) bound_.clear();
    bound_.insert(bound_.end(), names.begin(), names.end());
    Term t;
    try {
      t = term();
    } catch (...) {
      bound_ = std::move(saved);
      throw;
    }
    bound_ = std::move(saved);
    return t;
  }

  Term binder_form() {
    SourcePos pos = peek().pos;
    if (accept("\\")) {
      std::string x = ident("a variable");
      std::optional<Type> annot;
      if (accept(":")) annot = type();
      expect(".");
      Term body = with_bound({x}, false);
      return Term::lam(x, annot, body).with_pos(pos);
    }
    if (accept_kw("case")) {
      Term scrut = term();
      expect_kw("of");
      expect_kw("inl");
      std::string x1 = ident("a variable");
      expect("->");
      Term t1 = with_bound({x1}, false);
      expect("|");
      expect_kw("inr");
      std::string x2 = ident("a variable");
      expect("->");
      Term t2 = with_bound({x2}, false);
      return Term::case_(scrut, x1, t1, x2, t2).with_pos(pos);
    }
    std::string kw = take().text;
    if (accept(".")) {
      // Identity substitution on the free variables of the body.
      Term body = term();
      ExplicitSubst sigma;
      for (const auto& x : body.free_vars()) sigma.push_back({x, Term::var(x)});
      return closing(kw, std::move(sigma), body).with_pos(pos);
    }
    expect("{");
    ExplicitSubst sigma;
    std::vector<std::string> names;
    if (!is_sym("}")) {
      do {
        SourcePos vpos = peek().pos;
        std::string x = ident("a variable");
        if (std::find(names.begin(), names.end(), x) != names.end()) {
          throw Error(ErrorCode::SyntaxError, "variable '" + x + "' listed twice", vpos);
        }
        expect("<-");
        Term t = term();
        names.push_back(x);
        sigma.push_back({x, t});
      } while (accept(","));
    }
    expect("}");
    expect(".");
    Term body = with_bound(names, true);
    return closing(kw, std::move(sigma), body).with_pos(pos);
  }
};

}  // namespace detail

// Free identifiers not in scope become variables when allow_free is set,
// otherwise they are UnknownIdentifier errors.
inline Term parse_term(std::string_view text, const Scope* scope = nullptr,
                       bool allow_free = true) {
  return detail::Parser(text, scope, allow_free).parse_term_eof();
}

inline Type parse_type(std::string_view text, const Scope* scope = nullptr) {
  return detail::Parser(text, scope, true).parse_type_eof();
}

// Definitions of `base` (normally the prelude) are visible and may be
// shadowed; names defined twice within `text` are an error.
inline Program parse_program(std::string_view text, const Program* base = nullptr) {
  return detail::Parser(text, nullptr, false).parse_program(base);
}

// ---------------------------------------------------------- pretty printer

// Optional display names: term nodes (by identity) and type aliases.
struct PrettyNames {
  std::unordered_map<const void*, std::string> terms;
  std::vector<TypeAlias> types;
  bool fold_fix = true;

  void add(const Program& p) {
    for (const auto& a : p.aliases) types.push_back(a);
    for (const auto& d : p.defs) {
      terms[d.ref.id()] = d.name;
      terms[d.body.id()] = d.name;
    }
  }
};

namespace detail {

enum class TyCtx { Top, ArrowLeft, SumOperand, ProdOperand, Prefix };

inline void print_type(std::string& out, const Type& a, TyCtx ctx, const PrettyNames* names) {
  if (names) {
    for (const auto& alias : names->types) {
      if (type_alpha_eq(alias.type, a) && a.kind() != TypeKind::Var) {
        out += alias.name;
        return;
      }
    }
  }
  auto wrap = [&](bool paren, auto&& body) {
    if (paren) out += "(";
    body();
    if (paren) out += ")";
  };
  switch (a.kind()) {
    case TypeKind::Var: out += a.name(); return;
    case TypeKind::Nat: out += "Nat"; return;
    case TypeKind::Unit: out += "Unit"; return;
    case TypeKind::Void: out += "Void"; return;
    case TypeKind::Later:
      out += "|>";
      print_type(out, a.body(), TyCtx::Prefix, names);
      return;
    case TypeKind::Box:
      out += "#";
      print_type(out, a.body(), TyCtx::Prefix, names);
      return;
    case TypeKind::Mu:
      wrap(ctx != TyCtx::Top, [&] {
        out += "mu " + a.name() + ". ";
        print_type(out, a.body(), TyCtx::Top, names);
      });
      return;
    case TypeKind::Arrow:
      wrap(ctx != TyCtx::Top, [&] {
        print_type(out, a.left(), TyCtx::ArrowLeft, names);
        out += " -> ";
        print_type(out, a.right(), TyCtx::Top, names);
      });
      return;
    case TypeKind::Sum:
      wrap(ctx == TyCtx::ProdOperand || ctx == TyCtx::Prefix, [&] {
        print_type(out, a.left(), TyCtx::SumOperand, names);
        out += " + ";
        // Left associative: a right operand that is itself a sum needs parens.
        if (a.right().is(TypeKind::Sum)) {
          out += "(";
          print_type(out, a.right(), TyCtx::Top, names);
          out += ")";
        } else {
          print_type(out, a.right(), TyCtx::SumOperand, names);
        }
      });
      return;
    case TypeKind::Prod:
      wrap(ctx == TyCtx::Prefix, [&] {
        print_type(out, a.left(), TyCtx::ProdOperand, names);
        out += " * ";
        if (a.right().is(TypeKind::Prod)) {
          out += "(";
          print_type(out, a.right(), TyCtx::Top, names);
          out += ")";
        } else {
          print_type(out, a.right(), TyCtx::ProdOperand, names);
        }
      });
      return;
  }
}

// Positions a term can be printed in, loosest first.
enum class TmCtx { Top, StarLeft, StarRight, AppHead, Arg };

class TermPrinter {
 public:
  explicit TermPrinter(const PrettyNames* names) : names_(names) {}

  void print(std::string& out, const Term& t, TmCtx ctx) {
    if (names_) {
      // numerals always print as digits, even when a definition is one
      auto it = names_->terms.find(t.id());
      if (it != names_->terms.end() && !t.as_numeral()) {
        out += it->second;
        return;
      }
      if (names_->fold_fix && t.is(TermKind::App) && t.is_closed()) {
        if (auto target = match_fix(t)) {
          out += "fix[";
          print_type(out, *target, TyCtx::Top, names_);
          out += "]";
          return;
        }
      }
    }
    switch (t.kind()) {
      case TermKind::Var: out += t.name(); return;
      case TermKind::Zero: out += "0"; return;
      case TermKind::UnitVal: out += "()"; return;
      case TermKind::Succ: {
        if (auto n = t.as_numeral()) {
          out += std::to_string(*n);
          return;
        }
        prefix(out, "succ", t.child(0), ctx);
        return;
      }
      case TermKind::Pair:
        out += "(";
        print(out, t.child(0), TmCtx::Top);
        out += ", ";
        print(out, t.child(1), TmCtx::Top);
        out += ")";
        return;
      case TermKind::Ascribe:
        out += "(";
        print(out, t.child(0), TmCtx::Top);
        out += " : ";
        print_type(out, *t.annotation(), TyCtx::Top, names_);
        out += ")";
        return;
      case TermKind::Proj1: prefix(out, "fst", t.child(0), ctx); return;
      case TermKind::Proj2: prefix(out, "snd", t.child(0), ctx); return;
      case TermKind::Unfold: prefix(out, "unfold", t.child(0), ctx); return;
      case TermKind::Next: prefix(out, "next", t.child(0), ctx); return;
      case TermKind::Unbox: prefix(out, "unbox", t.child(0), ctx); return;
      case TermKind::Abort: prefix(out, annotated("abort", t), t.child(0), ctx); return;
      case TermKind::In1: prefix(out, annotated("inl", t), t.child(0), ctx); return;
      case TermKind::In2: prefix(out, annotated("inr", t), t.child(0), ctx); return;
      case TermKind::Fold: prefix(out, annotated("fold", t), t.child(0), ctx); return;
      case TermKind::App: {
        bool paren = ctx == TmCtx::Arg;
        if (paren) out += "(";
        print(out, t.child(0), TmCtx::AppHead);
        out += " ";
        print(out, t.child(1), TmCtx::Arg);
        if (paren) out += ")";
        return;
      }
      case TermKind::Prim: {
        bool paren = ctx == TmCtx::Arg || ctx == TmCtx::AppHead;
        if (paren) out += "(";
        out += t.name();
        for (const auto& a : t.children()) {
          out += " ";
          print(out, a, TmCtx::Arg);
        }
        if (paren) out += ")";
        return;
      }
      case TermKind::LaterApp: {
        bool paren = ctx != TmCtx::Top && ctx != TmCtx::StarLeft;
        if (paren) out += "(";
        print(out, t.child(0), TmCtx::StarLeft);
        out += " <*> ";
        print(out, t.child(1), TmCtx::StarRight);
        if (paren) out += ")";
        return;
      }
      case TermKind::Lam: {
        bool paren = ctx != TmCtx::Top;
        if (paren) out += "(";
        out += "\\" + t.name();
        if (t.annotation()) {
          out += ":";
          print_type(out, *t.annotation(), TyCtx::ArrowLeft, names_);
        }
        out += ". ";
        print(out, t.child(0), TmCtx::Top);
        if (paren) out += ")";
        return;
      }
      case TermKind::Case: {
        bool paren = ctx != TmCtx::Top;
        if (paren) out += "(";
        out += "case ";
        print(out, t.child(0), TmCtx::Top);
        out += " of inl " + t.binder1() + " -> ";
        print(out, t.child(1), TmCtx::Top);
        out += " | inr " + t.binder2() + " -> ";
        print(out, t.child(2), TmCtx::Top);
        if (paren) out += ")";
        return;
      }
      case TermKind::Prev:
      case TermKind::BoxI:
      case TermKind::BoxSum: {
        bool paren = ctx != TmCtx::Top;
        if (paren) out += "(";
        out += t.is(TermKind::Prev) ? "prev" : t.is(TermKind::BoxI) ? "box" : "boxp";
        if (!is_identity(t.subst(), t.child(0))) {
          out += "{";
          for (std::size_t k = 0; k < t.subst().size(); ++k) {
            if (k) out += ", ";
            out += t.subst()[k].var + " <- ";
            print(out, t.subst()[k].term, TmCtx::Top);
          }
          out += "}";
        }
        out += ". ";
        print(out, t.child(0), TmCtx::Top);
        if (paren) out += ")";
        return;
      }
    }
  }

 private:
  const PrettyNames* names_;

  // The substitution the `prev.` sugar produces: x <- x for each free
  // variable of the body, in order.
  static bool is_identity(const ExplicitSubst& sigma, const Term& body) {
    const auto& fv = body.free_vars();
    if (sigma.size() != fv.size()) return false;
    for (std::size_t k = 0; k < fv.size(); ++k) {
      if (sigma[k].var != fv[k] || !sigma[k].term.is(TermKind::Var) || sigma[k].term.name() != fv[k]) {
        return false;
      }
    }
    return true;
  }

  std::string annotated(const char* kw, const Term& t) {
    std::string s = kw;
    s += "[";
    print_type(s, *t.annotation(), TyCtx::Top, names_);
    s += "]";
    return s;
  }

  void prefix(std::string& out, const std::string& kw, const Term& arg, TmCtx ctx) {
    bool paren = ctx == TmCtx::Arg;
    if (paren) out += "(";
    out += kw + " ";
    print(out, arg, TmCtx::Arg);
    if (paren) out += ")";
  }
};

}  // namespace detail

inline std::string pretty(const Type& a, const PrettyNames* names = nullptr) {
  std::string out;
  detail::print_type(out, a, detail::TyCtx::Top, names);
  return out;
}

inline std::string pretty(const Term& t, const PrettyNames* names = nullptr) {
  std::string out;
  detail::TermPrinter(names).print(out, t, detail::TmCtx::Top);
  return out;
}

}  // namespace glam
