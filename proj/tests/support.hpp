#pragma once

// Shared test fixtures: a corpus program on top of the prelude, a
// type-directed generator of closed well-typed terms, a typed observer that
// unfolds values to a bounded later-depth, and host-side reference
// sequences.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "glam/glam.hpp"

namespace glam::testing {

// Extra definitions used by the tests, over the prelude.
inline constexpr const char* kCorpusSource = R"(
type SRow = mu a. Str * |>a;

def succF : Nat -> Nat = \x. succ x;
def nats : GStr = iterate' succF 0;
def natsFrom : Nat -> Str = \n. box. iterate' succF n;
def rowsFrom : Nat -> SRow =
  fix[Nat -> SRow] \g. \n. fold[SRow] (natsFrom n, g <*> next (succ n));
def rows : SStr = box. rowsFrom 0;
)";

inline const Program& corpus() {
  static const Program p = parse_program(kCorpusSource, &load_prelude());
  return p;
}

inline const Scope& corpus_scope() {
  static const Scope s = [] {
    Scope sc = Scope::of(load_prelude());
    sc.add(corpus());
    return sc;
  }();
  return s;
}

// Closed term over prelude + corpus, still carrying ascriptions.
inline Term parse_closed(std::string_view text) { return parse_term(text, &corpus_scope(), false); }

inline std::pair<Term, Type> elab(std::string_view text) {
  Checker c;
  return c.infer(TypingContext{}, parse_closed(text));
}

inline Type named_type(std::string_view name) { return corpus_scope().types.at(std::string(name)); }
inline Term named(std::string_view name) { return corpus_scope().terms.at(std::string(name)); }

// head (prev. tail (... (prev. tail s))) with n tails: the n-th element of
// a closed guarded stream, as an elaborated Nat term.
inline Term nth_term(const Term& s, unsigned n) {
  Term cur = s;
  for (unsigned k = 0; k < n; ++k) cur = Term::prev({}, Term::app(prelude_term("tail"), cur));
  return Term::app(prelude_term("head"), cur);
}

// ---------------------------------------------------------------- samples

// A fixed closed inhabitant of each type the prelude mentions.
inline Term sample_of(const Type& a) {
  auto is = [&](const char* alias) { return type_alpha_eq(a, named_type(alias)); };
  if (is("GStr")) return named("paperfolds");
  if (is("Str")) return parse_closed("box. nats");
  if (is("GCoNat")) return named("infinity");
  if (is("CoNat")) return parse_closed("box. cosucc (cosucc cozero)");
  if (is("BStr")) return named("thuemorse");
  if (is("SStr")) return named("rows");
  if (is("SRow")) return parse_closed("rowsFrom 1");
  switch (a.kind()) {
    case TypeKind::Nat:
      return Term::numeral(2);
    case TypeKind::Unit:
      return Term::unit();
    case TypeKind::Prod:
      return Term::pair(sample_of(a.left()), sample_of(a.right()));
    case TypeKind::Sum:
      return Term::in1(a, sample_of(a.left()));
    case TypeKind::Later:
      return Term::next(sample_of(a.body()));
    case TypeKind::Box:
      return Term::box({}, sample_of(a.body()));
    case TypeKind::Arrow: {
      if (a.left().is(TypeKind::Nat) && a.right().is(TypeKind::Nat)) return named("succF");
      // (Nat * |>GStr) -> GStr and GStr -> Nat * |>GStr: the stream
      // algebra and coalgebra.
      if (a.right().is(TypeKind::Mu) && a.left().is(TypeKind::Prod)) {
        return parse_closed("\\p: Nat * |>GStr. cons (succ (fst p)) (snd p)");
      }
      if (a.left().is(TypeKind::Mu) && a.right().is(TypeKind::Prod)) {
        return parse_closed("\\s: GStr. (head s, tail s)");
      }
      return Term::lam("u", a.left(), sample_of(a.right()));
    }
    default:
      throw Error(ErrorCode::NotObservable, "no sample for " + pretty(a));
  }
}

// ---------------------------------------------------------------- observer

// Evaluates t : a and prints the value, unfolding at most `depth` laters.
// Functions are observed on sample_of their domain.
inline std::string observe(const Term& t, const Type& a, unsigned depth, std::uint64_t& fuel) {
  Term v = eval_value(t, fuel);
  switch (a.kind()) {
    case TypeKind::Nat:
      return std::to_string(*v.as_numeral());
    case TypeKind::Unit:
      return "()";
    case TypeKind::Prod:
      return "(" + observe(Term::proj1(v), a.left(), depth, fuel) + ", " +
             observe(Term::proj2(v), a.right(), depth, fuel) + ")";
    case TypeKind::Sum:
      return v.is(TermKind::In1) ? "inl " + observe(v.child(0), a.left(), depth, fuel)
                                 : "inr " + observe(v.child(0), a.right(), depth, fuel);
    case TypeKind::Mu:
      return "fold " + observe(Term::unfold(v), unfold_mu(a), depth, fuel);
    case TypeKind::Later:
      if (depth == 0) return "*";
      return "next " + observe(Term::prev({}, v), a.body(), depth - 1, fuel);
    case TypeKind::Box:
      return "box " + observe(Term::unbox(v), a.body(), depth, fuel);
    case TypeKind::Arrow:
      return "fn " + observe(Term::app(v, sample_of(a.left())), a.right(), depth, fuel);
    default:
      throw Error(ErrorCode::NotObservable, "cannot observe " + pretty(a));
  }
}

inline std::string observe(const Term& t, const Type& a, unsigned depth) {
  std::uint64_t fuel = kDefaultFuel;
  return observe(t, a, depth, fuel);
}

// ------------------------------------------------------------- fix points

// A fix-defined definition with its leading lambdas instantiated by samples:
// fix = Theta_T F closed at type T.
struct FixInstance {
  std::string name;
  Type type;
  Term fix;
  Term functional;
  // F (next (Theta_T F))
  Term unfolded() const { return Term::app(functional, Term::next(fix)); }
};

inline std::optional<FixInstance> fix_instance(const std::string& name, const Term& elaborated, Type type) {
  Term t = elaborated;
  while (t.is(TermKind::Lam) && type.is(TypeKind::Arrow)) {
    t = subst(t.child(0), t.name(), sample_of(type.left()));
    type = type.right();
  }
  if (!t.is(TermKind::App) || !match_fix(t.child(0))) return std::nullopt;
  return FixInstance{name, type, t, t.child(1)};
}

inline std::vector<FixInstance> prelude_fix_instances() {
  std::vector<FixInstance> out;
  for (const auto& d : checked_prelude().defs) {
    if (auto f = fix_instance(d.name, d.elaborated, d.type)) out.push_back(*f);
  }
  return out;
}

// ---------------------------------------------------------------- generator

// Type-directed generator of closed well-typed terms. Bound variables only
// ever have constant types, so prev/box bodies may mention them freely.
class TermGen {
 public:
  explicit TermGen(std::uint64_t seed) : rng_(seed) {}

  Term nat(int depth) { return gen(Type::nat(), {}, depth); }
  Term stream(int depth) { return gen(gstr(), {}, depth); }

  Term gen(const Type& a, const std::vector<std::pair<std::string, Type>>& ctx, int depth) {
    if (depth > 0 && coin(3)) {
      if (Term t = generic(a, ctx, depth); t.id()) return t;
    }
    return specific(a, ctx, depth);
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  using Ctx = std::vector<std::pair<std::string, Type>>;
  std::mt19937_64 rng_;
  unsigned counter_ = 0;

  static Type gstr() { return named_type("GStr"); }
  static Type str() { return named_type("Str"); }
  static Type nn() { return Type::arrow(Type::nat(), Type::nat()); }
  static Type nsum() { return Type::sum(Type::nat(), Type::nat()); }

  unsigned below(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }
  bool coin(unsigned one_in) { return below(one_in) == 0; }
  std::string fresh() { return "v" + std::to_string(++counter_); }

  // prev/box with the identity substitution on the body's free variables.
  static ExplicitSubst identity_on(const Term& body) {
    ExplicitSubst s;
    for (const auto& x : free_vars(body)) s.push_back({x, Term::var(x)});
    return s;
  }

  Type constant_type() {
    switch (below(4)) {
      case 0: return nn();
      case 1: return nsum();
      case 2: return Type::box(Type::nat());
      default: return Type::nat();
    }
  }

  Term generic(const Type& a, const Ctx& ctx, int depth) {
    switch (below(6)) {
      case 0: {
        Type b = constant_type();
        std::string x = fresh();
        Ctx inner = ctx;
        inner.push_back({x, b});
        return Term::app(Term::lam(x, b, gen(a, inner, depth - 1)), gen(b, ctx, depth - 1));
      }
      case 1:
        return Term::proj1(Term::pair(gen(a, ctx, depth - 1), gen(Type::nat(), ctx, 0)));
      case 2: {
        std::string x = fresh(), y = fresh();
        Ctx cx = ctx, cy = ctx;
        cx.push_back({x, Type::nat()});
        cy.push_back({y, Type::nat()});
        return Term::case_(gen(nsum(), ctx, depth - 1), x, gen(a, cx, depth - 1), y, gen(a, cy, depth - 1));
      }
      case 3: {
        Term body = gen(a, ctx, depth - 1);
        return Term::unbox(Term::box(identity_on(body), body));
      }
      case 4: {
        Term body = Term::next(gen(a, ctx, depth - 1));
        return Term::prev(identity_on(body), body);
      }
      default: {
        std::vector<std::string> vs;
        for (const auto& [x, b] : ctx) {
          if (type_alpha_eq(a, b)) vs.push_back(x);
        }
        if (vs.empty()) return Term();
        return Term::var(vs[below(static_cast<unsigned>(vs.size()))]);
      }
    }
  }

  Term app(const char* f, std::initializer_list<Term> args) {
    Term t = named(f);
    for (const auto& a : args) t = Term::app(t, a);
    return t;
  }

  Term specific(const Type& a, const Ctx& ctx, int depth) {
    int d = depth - 1;
    if (a.is(TypeKind::Nat)) {
      if (depth <= 0) return Term::numeral(below(4));
      switch (below(9)) {
        case 0: return Term::succ(gen(a, ctx, d));
        case 1: return Term::prim("addN", {gen(a, ctx, d), gen(a, ctx, d)});
        case 2: return Term::prim("mulN", {gen(a, ctx, d), Term::numeral(below(3))});
        case 3: return app("head", {gen(gstr(), ctx, d)});
        case 4: return app("coHead", {gen(str(), ctx, d)});
        case 5: {
          Term s = gen(gstr(), ctx, d);
          Term cur = s;
          for (unsigned k = below(3) + 1; k > 0; --k) {
            Term body = app("tail", {cur});
            cur = Term::prev(identity_on(body), body);
          }
          return app("head", {cur});
        }
        case 6: return Term::app(gen(nn(), ctx, d), gen(a, ctx, d));
        case 7: {
          std::string x = fresh(), y = fresh();
          return Term::case_(gen(nsum(), ctx, d), x, Term::var(x), y, Term::succ(Term::var(y)));
        }
        default: return Term::numeral(below(6));
      }
    }
    if (a.is(TypeKind::Unit)) return Term::unit();
    if (type_alpha_eq(a, nsum())) {
      return coin(2) ? Term::in1(a, gen(Type::nat(), ctx, d)) : Term::in2(a, gen(Type::nat(), ctx, d));
    }
    if (type_alpha_eq(a, nn())) {
      if (depth <= 0 || coin(3)) return named("succF");
      std::string x = fresh();
      Ctx inner = ctx;
      inner.push_back({x, Type::nat()});
      return Term::lam(x, Type::nat(), gen(Type::nat(), inner, d));
    }
    if (a.is(TypeKind::Box) && a.body().is(TypeKind::Nat)) {
      Term body = gen(Type::nat(), ctx, d);
      return Term::box(identity_on(body), body);
    }
    if (type_alpha_eq(a, gstr())) {
      if (depth <= 0) {
        const char* leaves[] = {"zeros", "toggle", "paperfolds", "nats"};
        return named(leaves[below(4)]);
      }
      switch (below(10)) {
        case 0: return app("cons", {gen(Type::nat(), ctx, d), Term::next(gen(a, ctx, d))});
        case 1: return app("map", {gen(nn(), ctx, d), gen(a, ctx, d)});
        case 2: return app("iterate'", {gen(nn(), ctx, d), gen(Type::nat(), ctx, d)});
        case 3: return app("interleave", {gen(a, ctx, d), Term::next(gen(a, ctx, d))});
        case 4: return app("gplus", {gen(a, ctx, d), gen(a, ctx, d)});
        case 5: return Term::unbox(gen(str(), ctx, d));
        case 6: return app("every2nd", {gen(str(), ctx, d)});
        case 7: {
          Term body = app("tail", {gen(a, ctx, d)});
          return Term::prev(identity_on(body), body);
        }
        default: {
          const char* leaves[] = {"zeros", "toggle", "paperfolds", "nats"};
          return named(leaves[below(4)]);
        }
      }
    }
    if (type_alpha_eq(a, str())) {
      if (depth <= 0 || coin(2)) {
        Term body = gen(gstr(), ctx, d);
        return Term::box(identity_on(body), body);
      }
      switch (below(3)) {
        case 0: return app("coTail", {gen(a, ctx, d)});
        case 1: return app("mapConst", {gen(nn(), ctx, d), gen(a, ctx, d)});
        default: return app("coCons", {gen(Type::nat(), ctx, d), gen(a, ctx, d)});
      }
    }
    if (a.is(TypeKind::Later)) {
      if (depth > 0 && a.body().is(TypeKind::Nat) && coin(2)) {
        return Term::later_app(Term::next(gen(nn(), ctx, d)), gen(a, ctx, d));
      }
      return Term::next(gen(a.body(), ctx, d));
    }
    throw Error(ErrorCode::NotObservable, "generator has no rule for " + pretty(a));
  }
};

// Random types over the given variables, for the metric lemmas. Boxes only
// wrap closed types and mu binders are fresh.
class TypeGen {
 public:
  explicit TypeGen(std::uint64_t seed) : rng_(seed) {}

  Type gen(const std::vector<std::string>& vars, int depth) {
    unsigned pick = below(depth <= 0 ? 4 : 11);
    switch (pick) {
      case 0: return Type::nat();
      case 1: return Type::unit();
      case 2: return vars.empty() ? Type::void_() : Type::var(vars[below(static_cast<unsigned>(vars.size()))]);
      case 3: return vars.empty() ? Type::nat() : Type::var(vars[below(static_cast<unsigned>(vars.size()))]);
      case 4: return Type::prod(gen(vars, depth - 1), gen(vars, depth - 1));
      case 5: return Type::sum(gen(vars, depth - 1), gen(vars, depth - 1));
      case 6: return Type::arrow(gen(vars, depth - 1), gen(vars, depth - 1));
      case 7:
      case 8: return Type::later(gen(vars, depth - 1));
      case 9: return Type::box(gen({}, depth - 1));
      default: {
        std::string b = "m" + std::to_string(++counter_);
        std::vector<std::string> inner = vars;
        inner.push_back(b);
        return Type::mu(b, gen(inner, depth - 1));
      }
    }
  }

 private:
  std::mt19937_64 rng_;
  unsigned counter_ = 0;
  unsigned below(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }
};

// ------------------------------------------------------------ host oracles

// Declared types of the prelude definitions, in surface syntax.
inline const std::vector<std::pair<const char*, const char*>>& pinned_prelude_types() {
  static const std::vector<std::pair<const char*, const char*>> table{
      {"cons", "Nat -> |>GStr -> GStr"},
      {"head", "GStr -> Nat"},
      {"tail", "GStr -> |>GStr"},
      {"gsecond", "GStr -> |>Nat"},
      {"gthird", "GStr -> |>|>Nat"},
      {"zeros", "GStr"},
      {"map", "(Nat -> Nat) -> GStr -> GStr"},
      {"iterate'", "(Nat -> Nat) -> Nat -> GStr"},
      {"iterate", "|>(Nat -> Nat) -> Nat -> GStr"},
      {"interleave'", "GStr -> GStr -> GStr"},
      {"interleave", "GStr -> |>GStr -> GStr"},
      {"toggle", "GStr"},
      {"paperfolds", "GStr"},
      {"initial", "(Nat * |>GStr -> GStr) -> GStr -> GStr"},
      {"final", "(GStr -> Nat * |>GStr) -> GStr -> GStr"},
      {"coCons", "Nat -> Str -> Str"},
      {"coHead", "Str -> Nat"},
      {"coTail", "Str -> Str"},
      {"second", "Str -> Nat"},
      {"lim", "#(GStr -> GStr) -> Str -> Str"},
      {"L", "#(GStr -> GStr) -> Str -> Str"},
      {"L2", "#(GStr -> GStr -> GStr) -> Str -> Str -> Str"},
      {"mapConst", "(Nat -> Nat) -> Str -> Str"},
      {"every2nd", "Str -> GStr"},
      {"diag", "SStr -> GStr"},
      {"cozero", "GCoNat"},
      {"cosucc", "GCoNat -> GCoNat"},
      {"infinity", "GCoNat"},
      {"gpred", "GCoNat -> Unit + |>GCoNat"},
      {"pred", "CoNat -> Unit + CoNat"},
  };
  return table;
}

inline std::uint64_t toggle_at(std::uint64_t n) { return n % 2 == 0 ? 1 : 0; }

// paperfolds = interleave toggle paperfolds
inline std::uint64_t paperfolds_at(std::uint64_t n) {
  return n % 2 == 0 ? toggle_at(n / 2) : paperfolds_at(n / 2);
}

inline std::uint64_t thue_morse_at(std::uint64_t n) { return __builtin_popcountll(n) % 2; }

// The fixed point of 0 -> 01, 1 -> 0.
inline std::vector<std::uint64_t> fibonacci_word(std::size_t n) {
  std::vector<std::uint64_t> w{0};
  while (w.size() < n) {
    std::vector<std::uint64_t> next;
    for (auto c : w) {
      next.push_back(0);
      if (c == 0) next.push_back(1);
    }
    w = std::move(next);
  }
  w.resize(n);
  return w;
}

template <class F>
std::vector<std::uint64_t> tabulate(std::size_t n, F f) {
  std::vector<std::uint64_t> out;
  for (std::size_t k = 0; k < n; ++k) out.push_back(f(k));
  return out;
}

}  // namespace glam::testing
