#pragma once

// Behavioural differential equations (BDEs) over streams of naturals, their
// compilation to guarded fixed points, and a reference evaluator on host
// lazy streams.
//
// File syntax, one or more of:
//
//   bde plus(2) { head = x1 + x2; tail = plus(z1, z2); }
//
// In a BDE of arity k the head is a polynomial in x1..xk (numerals, + and *).
// The tail is built from
//   xi    the stream  head(argument i) :: zeros
//   yi    argument i
//   zi    the tail of argument i
//   g(..) a call of this BDE or of one defined earlier in the file
// and a + b / a * b abbreviate plus(a, b) / times(a, b), which must then be
// defined earlier.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include "glam/error.hpp"
#include "glam/frontend.hpp"
#include "glam/prelude.hpp"
#include "glam/syntax.hpp"

namespace glam {

struct HeadExpr {
  enum class Kind { Num, Var, Add, Mul };
  Kind kind = Kind::Num;
  std::uint64_t value = 0;
  std::string name;  // Var: the identifier as written
  std::vector<HeadExpr> args;
  SourcePos pos;
};

struct TailExpr {
  enum class Kind { X, Y, Z, Call };
  Kind kind = Kind::Call;
  unsigned index = 0;  // X, Y, Z: 1-based
  std::string name;    // Call: callee
  std::vector<TailExpr> args;
  SourcePos pos;
};

struct BdeDef {
  std::string name;
  unsigned arity = 0;
  HeadExpr head;
  TailExpr tail;
  SourcePos pos;
};

namespace detail {

// xi / yi / zi with a positive decimal index.
inline std::optional<std::pair<char, unsigned>> stream_variable(const std::string& s) {
  static const std::regex re("([xyz])([1-9][0-9]{0,8})");
  std::smatch m;
  if (!std::regex_match(s, m, re)) return std::nullopt;
  return std::make_pair(m.str(1)[0], static_cast<unsigned>(std::stoul(m.str(2))));
}

inline bool looks_like_variable(const std::string& s) {
  static const std::regex re("[a-z][0-9]+");
  return std::regex_match(s, re);
}

class BdeParser {
 public:
  explicit BdeParser(std::string_view src) : toks_(lex(src)) {}

  std::vector<BdeDef> file() {
    std::vector<BdeDef> out;
    while (peek().kind != Tok::End) out.push_back(def());
    return out;
  }

 private:
  std::vector<Token> toks_;
  std::size_t at_ = 0;

  const Token& peek() const { return toks_[at_]; }
  bool is_sym(const char* s) const { return peek().kind == Tok::Sym && peek().text == s; }
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::SyntaxError, msg, peek().pos);
  }
  void expect_sym(const char* s) {
    if (!is_sym(s)) fail(std::string("expected '") + s + "'");
    ++at_;
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return toks_[at_++].text;
  }
  void keyword(const char* kw) {
    if (peek().kind != Tok::Ident || peek().text != kw) fail(std::string("expected '") + kw + "'");
    ++at_;
  }

  BdeDef def() {
    BdeDef d;
    d.pos = peek().pos;
    keyword("bde");
    d.name = ident("a BDE name");
    expect_sym("(");
    if (peek().kind != Tok::Number) fail("expected the arity");
    d.arity = static_cast<unsigned>(std::stoul(toks_[at_++].text));
    expect_sym(")");
    expect_sym("{");
    keyword("head");
    expect_sym("=");
    d.head = head_sum();
    expect_sym(";");
    keyword("tail");
    expect_sym("=");
    d.tail = tail_sum();
    expect_sym(";");
    expect_sym("}");
    return d;
  }

  HeadExpr head_sum() {
    HeadExpr e = head_prod();
    while (is_sym("+")) {
      SourcePos p = peek().pos;
      ++at_;
      e = HeadExpr{HeadExpr::Kind::Add, 0, {}, {e, head_prod()}, p};
    }
    return e;
  }
  HeadExpr head_prod() {
    HeadExpr e = head_atom();
    while (is_sym("*")) {
      SourcePos p = peek().pos;
      ++at_;
      e = HeadExpr{HeadExpr::Kind::Mul, 0, {}, {e, head_atom()}, p};
    }
    return e;
  }
  HeadExpr head_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Number) {
      ++at_;
      return HeadExpr{HeadExpr::Kind::Num, std::stoull(t.text), {}, {}, t.pos};
    }
    if (t.kind == Tok::Ident) {
      ++at_;
      if (is_sym("(")) {
        throw Error(ErrorCode::UnknownSymbol, "calls are not allowed in a head: '" + t.text + "'", t.pos);
      }
      return HeadExpr{HeadExpr::Kind::Var, 0, t.text, {}, t.pos};
    }
    if (is_sym("(")) {
      ++at_;
      HeadExpr e = head_sum();
      expect_sym(")");
      return e;
    }
    fail("expected a head expression");
  }

  TailExpr tail_sum() {
    TailExpr e = tail_prod();
    while (is_sym("+")) {
      SourcePos p = peek().pos;
      ++at_;
      e = TailExpr{TailExpr::Kind::Call, 0, "plus", {e, tail_prod()}, p};
    }
    return e;
  }
  TailExpr tail_prod() {
    TailExpr e = tail_atom();
    while (is_sym("*")) {
      SourcePos p = peek().pos;
      ++at_;
      e = TailExpr{TailExpr::Kind::Call, 0, "times", {e, tail_atom()}, p};
    }
    return e;
  }
  TailExpr tail_atom() {
    const Token& t = peek();
    if (t.kind == Tok::Number) fail("numerals are not allowed in a tail; define a constant stream");
    if (t.kind == Tok::Ident) {
      ++at_;
      if (is_sym("(")) {
        ++at_;
        TailExpr call{TailExpr::Kind::Call, 0, t.text, {}, t.pos};
        if (!is_sym(")")) {
          call.args.push_back(tail_sum());
          while (is_sym(",")) {
            ++at_;
            call.args.push_back(tail_sum());
          }
        }
        expect_sym(")");
        return call;
      }
      if (auto v = stream_variable(t.text)) {
        TailExpr::Kind k = v->first == 'x' ? TailExpr::Kind::X
                           : v->first == 'y' ? TailExpr::Kind::Y
                                             : TailExpr::Kind::Z;
        return TailExpr{k, v->second, {}, {}, t.pos};
      }
      return TailExpr{TailExpr::Kind::Call, 0, t.text, {}, t.pos};
    }
    if (is_sym("(")) {
      ++at_;
      TailExpr e = tail_sum();
      expect_sym(")");
      return e;
    }
    fail("expected a tail expression");
  }
};

}  // namespace detail

// Syntax only; see validate_bde for scoping.
inline std::vector<BdeDef> parse_bde(std::string_view src) {
  return detail::BdeParser(src).file();
}

// Checks names, arities, variable indices and that every callee is the BDE
// itself or defined earlier. Throws on the first problem.
inline void validate_bde(const std::vector<BdeDef>& defs) {
  std::map<std::string, std::size_t> index;
  for (std::size_t n = 0; n < defs.size(); ++n) {
    if (!index.emplace(defs[n].name, n).second) {
      throw Error(ErrorCode::DuplicateName, "BDE '" + defs[n].name + "' is defined twice", defs[n].pos);
    }
  }
  for (std::size_t n = 0; n < defs.size(); ++n) {
    const BdeDef& d = defs[n];
    auto check_head = [&](auto&& self, const HeadExpr& e) -> void {
      if (e.kind == HeadExpr::Kind::Var) {
        auto v = detail::stream_variable(e.name);
        if (!v || v->first != 'x' || v->second > d.arity) {
          throw Error(detail::looks_like_variable(e.name) ? ErrorCode::BadVariable : ErrorCode::UnknownSymbol,
                      "'" + e.name + "' is not a head variable of '" + d.name + "'", e.pos);
        }
      }
      for (const auto& a : e.args) self(self, a);
    };
    check_head(check_head, d.head);
    auto check_tail = [&](auto&& self, const TailExpr& e) -> void {
      if (e.kind != TailExpr::Kind::Call) {
        if (e.index > d.arity) {
          const char* letter = e.kind == TailExpr::Kind::X ? "x" : e.kind == TailExpr::Kind::Y ? "y" : "z";
          throw Error(ErrorCode::BadVariable,
                      std::string(letter) + std::to_string(e.index) + " exceeds the arity of '" + d.name + "'",
                      e.pos);
        }
        return;
      }
      auto it = index.find(e.name);
      if (it == index.end()) {
        if (e.args.empty() && detail::looks_like_variable(e.name)) {
          throw Error(ErrorCode::BadVariable, "'" + e.name + "' is not a tail variable", e.pos);
        }
        throw Error(ErrorCode::UnknownSymbol, "unknown BDE '" + e.name + "'", e.pos);
      }
      if (it->second > n) {
        throw Error(ErrorCode::ForwardReference, "'" + e.name + "' is defined after '" + d.name + "'", e.pos);
      }
      const BdeDef& callee = defs[it->second];
      if (e.args.size() != callee.arity) {
        throw Error(ErrorCode::ArityError,
                    "'" + e.name + "' takes " + std::to_string(callee.arity) + " arguments, given " +
                        std::to_string(e.args.size()),
                    e.pos);
      }
      for (const auto& a : e.args) self(self, a);
    };
    check_tail(check_tail, d.tail);
  }
}

inline std::vector<BdeDef> load_bde(std::string_view src) {
  auto defs = parse_bde(src);
  validate_bde(defs);
  return defs;
}

inline const BdeDef& find_bde(const std::vector<BdeDef>& defs, std::string_view name) {
  for (const auto& d : defs) {
    if (d.name == name) return d;
  }
  throw Error(ErrorCode::UnknownSymbol, "no BDE named '" + std::string(name) + "'");
}

// --------------------------------------------------------------- compilation

struct CompiledBde {
  Term guarded;  // fix[GStr^k -> GStr] (\f. \y1 ... \yk. ...)
  Type guarded_type;
  Term lifted;  // box f for k = 0, otherwise L_k (box f), on coinductive streams
  Type lifted_type;
};

namespace detail {

struct PreludeRefs {
  Type gstr, str;
  Term cons, head, tail, zeros;
  Term l1, l2;
};

inline PreludeRefs prelude_refs() {
  const Program& p = load_prelude();
  auto ref = [&](const char* n) { return p.find(n)->ref; };
  return {p.find_alias("GStr")->type, p.find_alias("Str")->type, ref("cons"), ref("head"), ref("tail"),
          ref("zeros"), ref("L"), ref("L2")};
}

inline Type stream_fn_type(const Type& elem, unsigned k) {
  Type t = elem;
  for (unsigned n = 0; n < k; ++n) t = Type::arrow(elem, t);
  return t;
}

inline std::string indexed(const char* base, unsigned n) { return base + std::to_string(n); }

class BdeCompiler {
 public:
  explicit BdeCompiler(const std::vector<BdeDef>& defs) : defs_(defs), refs_(prelude_refs()) {}

  const Term& guarded(const std::string& name) {
    auto it = done_.find(name);
    if (it != done_.end()) return it->second;
    const BdeDef& d = find_bde(defs_, name);
    Term g = Term::app(make_fix(stream_fn_type(refs_.gstr, d.arity)), phi(d));
    return done_.emplace(name, g).first->second;
  }

  CompiledBde compile(const std::string& name) {
    const BdeDef& d = find_bde(defs_, name);
    CompiledBde c;
    c.guarded = guarded(name);
    c.guarded_type = stream_fn_type(refs_.gstr, d.arity);
    c.lifted_type = stream_fn_type(refs_.str, d.arity);
    c.lifted = d.arity == 0 ? Term::box({}, c.guarded) : Term::app(lift(d.arity), Term::box({}, c.guarded));
    return c;
  }

 private:
  const std::vector<BdeDef>& defs_;
  PreludeRefs refs_;
  std::map<std::string, Term> done_;

  Term head_term(const HeadExpr& e) {
    switch (e.kind) {
      case HeadExpr::Kind::Num:
        return Term::numeral(e.value);
      case HeadExpr::Kind::Var:
        return Term::var(e.name);
      case HeadExpr::Kind::Add:
        return Term::prim("addN", {head_term(e.args[0]), head_term(e.args[1])});
      case HeadExpr::Kind::Mul:
        return Term::prim("mulN", {head_term(e.args[0]), head_term(e.args[1])});
    }
    return Term::zero();
  }

  Term tail_term(const BdeDef& self, const TailExpr& e) {
    switch (e.kind) {
      case TailExpr::Kind::X:
        return Term::next(Term::var(indexed("x", e.index)));
      case TailExpr::Kind::Y:
        return Term::next(Term::var(indexed("y", e.index)));
      case TailExpr::Kind::Z:
        return Term::var(indexed("z", e.index));
      case TailExpr::Kind::Call: {
        Term acc = e.name == self.name ? Term::var("f") : Term::next(guarded(e.name));
        for (const auto& a : e.args) acc = Term::later_app(acc, tail_term(self, a));
        return acc;
      }
    }
    return Term::var("f");
  }

  Term phi(const BdeDef& d) {
    std::vector<Binding> head_sub, tail_sub;
    for (unsigned n = 1; n <= d.arity; ++n) {
      Term y = Term::var(indexed("y", n));
      Term hd = Term::app(refs_.head, y);
      head_sub.push_back({indexed("x", n), hd});
      tail_sub.push_back({indexed("x", n), Term::app(Term::app(refs_.cons, hd), Term::next(refs_.zeros))});
      tail_sub.push_back({indexed("z", n), Term::app(refs_.tail, y)});
    }
    Term h = subst(head_term(d.head), head_sub);
    Term t = subst(tail_term(d, d.tail), tail_sub);
    Term body = Term::app(Term::app(refs_.cons, h), t);
    for (unsigned n = d.arity; n >= 1; --n) body = Term::lam(indexed("y", n), std::nullopt, body);
    return Term::lam("f", std::nullopt, body);
  }

  // \F. \s1 ... \sk. box. (unbox F) (unbox s1) ... (unbox sk) for k >= 1;
  // the prelude's L and L2 for k = 1, 2.
  Term lift(unsigned k) {
    if (k == 1) return refs_.l1;
    if (k == 2) return refs_.l2;
    Term body = Term::unbox(Term::var("F"));
    ExplicitSubst sigma{{"F", Term::var("F")}};
    for (unsigned n = 1; n <= k; ++n) {
      body = Term::app(body, Term::unbox(Term::var(indexed("s", n))));
      sigma.push_back({indexed("s", n), Term::var(indexed("s", n))});
    }
    Term lam = Term::box(std::move(sigma), body);
    for (unsigned n = k; n >= 1; --n) lam = Term::lam(indexed("s", n), refs_.str, lam);
    return Term::lam("F", Type::box(stream_fn_type(refs_.gstr, k)), lam);
  }
};

}  // namespace detail

// Compiles BDE `name` from an already validated list.
inline CompiledBde compile_bde(const std::vector<BdeDef>& defs, const std::string& name) {
  return detail::BdeCompiler(defs).compile(name);
}

// ------------------------------------------------------------------ oracle

// A memoized lazy stream of naturals on the host.
class HostStream {
 public:
  using Thunk = std::function<HostStream()>;

  HostStream() = default;
  HostStream(std::uint64_t head, Thunk tail) : node_(std::make_shared<Node>()) {
    node_->head = head;
    node_->thunk = std::move(tail);
  }

  std::uint64_t head() const { return node_->head; }
  HostStream tail() const {
    if (!node_->tail) {
      node_->tail = node_->thunk().node_;
      node_->thunk = nullptr;
    }
    return HostStream(node_->tail);
  }
  std::vector<std::uint64_t> take(std::size_t n) const {
    std::vector<std::uint64_t> out;
    HostStream s = *this;
    for (std::size_t k = 0; k < n; ++k) {
      out.push_back(s.head());
      if (k + 1 < n) s = s.tail();
    }
    return out;
  }

  static HostStream generate(std::function<std::uint64_t(std::uint64_t)> g, std::uint64_t from = 0) {
    auto shared = std::make_shared<std::function<std::uint64_t(std::uint64_t)>>(std::move(g));
    return HostStream((*shared)(from), [shared, from] { return generate(*shared, from + 1); });
  }
  static HostStream constant(std::uint64_t c) {
    return generate([c](std::uint64_t) { return c; });
  }
  // The given prefix; reading past it is an error.
  static HostStream prefix(std::vector<std::uint64_t> xs) {
    auto data = std::make_shared<const std::vector<std::uint64_t>>(std::move(xs));
    return from_prefix(data, 0);
  }

 private:
  struct Node {
    std::uint64_t head = 0;
    Thunk thunk;
    std::shared_ptr<Node> tail;
  };
  explicit HostStream(std::shared_ptr<Node> n) : node_(std::move(n)) {}
  std::shared_ptr<Node> node_;

  static HostStream from_prefix(std::shared_ptr<const std::vector<std::uint64_t>> data, std::size_t i) {
    if (i >= data->size()) throw Error(ErrorCode::NotObservable, "argument stream prefix exhausted");
    return HostStream((*data)[i], [data, i] { return from_prefix(data, i + 1); });
  }
};

namespace detail {

class BdeOracle {
 public:
  explicit BdeOracle(const std::vector<BdeDef>& defs) : defs_(defs) {}

  HostStream apply(const BdeDef& d, const std::vector<HostStream>& args) {
    if (args.size() != d.arity) {
      throw Error(ErrorCode::ArityError, "'" + d.name + "' takes " + std::to_string(d.arity) + " arguments");
    }
    std::vector<std::uint64_t> heads;
    for (const auto& a : args) heads.push_back(a.head());
    std::uint64_t h = head_value(d.head, heads);
    const BdeDef* def = &d;
    return HostStream(h, [this, def, args] { return tail_value(*def, def->tail, args); });
  }

 private:
  const std::vector<BdeDef>& defs_;

  static std::uint64_t head_value(const HeadExpr& e, const std::vector<std::uint64_t>& xs) {
    switch (e.kind) {
      case HeadExpr::Kind::Num: return e.value;
      case HeadExpr::Kind::Var: return xs.at(stream_variable(e.name)->second - 1);
      case HeadExpr::Kind::Add: return head_value(e.args[0], xs) + head_value(e.args[1], xs);
      case HeadExpr::Kind::Mul: return head_value(e.args[0], xs) * head_value(e.args[1], xs);
    }
    return 0;
  }

  HostStream tail_value(const BdeDef& d, const TailExpr& e, const std::vector<HostStream>& args) {
    switch (e.kind) {
      case TailExpr::Kind::X: {
        std::uint64_t h = args.at(e.index - 1).head();
        return HostStream(h, [] { return HostStream::constant(0); });
      }
      case TailExpr::Kind::Y:
        return args.at(e.index - 1);
      case TailExpr::Kind::Z:
        return args.at(e.index - 1).tail();
      case TailExpr::Kind::Call: {
        std::vector<HostStream> vals;
        for (const auto& a : e.args) vals.push_back(tail_value(d, a, args));
        return apply(find_bde(defs_, e.name), vals);
      }
    }
    return HostStream::constant(0);
  }
};

}  // namespace detail

// First n elements of BDE `name` applied to `args`, computed directly from
// the equations.
inline std::vector<std::uint64_t> oracle_eval(const std::vector<BdeDef>& defs, const std::string& name,
                                              const std::vector<HostStream>& args, std::size_t n) {
  detail::BdeOracle oracle(defs);
  return oracle.apply(find_bde(defs, name), args).take(n);
}

}  // namespace glam
