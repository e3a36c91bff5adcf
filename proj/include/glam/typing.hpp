#pragma once

// Type formation, constancy and guardedness, the us/bd metrics, and a
// bidirectional checker that also elaborates: every lambda in its output is
// annotated and ascriptions are dropped, so elaborated terms (and their
// reducts) synthesize their types.

#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "glam/error.hpp"
#include "glam/frontend.hpp"
#include "glam/syntax.hpp"

namespace glam {

// ------------------------------------------------------- type predicates

inline bool guarded_in(const std::string& alpha, const Type& a, bool under_later = false) {
  switch (a.kind()) {
    case TypeKind::Var:
      return a.name() != alpha || under_later;
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
      return true;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Arrow:
      return guarded_in(alpha, a.left(), under_later) && guarded_in(alpha, a.right(), under_later);
    case TypeKind::Mu:
      return a.name() == alpha || guarded_in(alpha, a.body(), under_later);
    case TypeKind::Later:
      return guarded_in(alpha, a.body(), true);
    case TypeKind::Box:
      return guarded_in(alpha, a.body(), under_later);
  }
  return true;
}

// Every Later lies beneath a Box.
inline bool is_constant(const Type& a) {
  switch (a.kind()) {
    case TypeKind::Var:
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
    case TypeKind::Box:
      return true;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Arrow:
      return is_constant(a.left()) && is_constant(a.right());
    case TypeKind::Mu:
      return is_constant(a.body());
    case TypeKind::Later:
      return false;
  }
  return true;
}

namespace detail {

inline void wf_type(std::vector<std::string>& vars, const Type& a, SourcePos pos) {
  switch (a.kind()) {
    case TypeKind::Var:
      if (std::find(vars.begin(), vars.end(), a.name()) == vars.end()) {
        throw Error(ErrorCode::UnboundTypeVar, "unbound type variable '" + a.name() + "'", pos);
      }
      return;
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
      return;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Arrow:
      wf_type(vars, a.left(), pos);
      wf_type(vars, a.right(), pos);
      return;
    case TypeKind::Mu:
      vars.push_back(a.name());
      wf_type(vars, a.body(), pos);
      vars.pop_back();
      if (!guarded_in(a.name(), a.body())) {
        throw Error(ErrorCode::UnguardedMu,
                    "'" + a.name() + "' is not guarded in " + pretty(a), pos);
      }
      return;
    case TypeKind::Later:
      wf_type(vars, a.body(), pos);
      return;
    case TypeKind::Box: {
      auto fv = type_free_vars(a.body());
      if (!fv.empty()) {
        throw Error(ErrorCode::OpenBox,
                    "# applied to a type with free variable '" + fv[0] + "': " + pretty(a), pos);
      }
      std::vector<std::string> none;
      wf_type(none, a.body(), pos);
      return;
    }
  }
}

}  // namespace detail

// Throws UnboundTypeVar, UnguardedMu or OpenBox.
inline void wf_type(const std::vector<std::string>& vars, const Type& a, SourcePos pos = {}) {
  std::vector<std::string> v = vars;
  detail::wf_type(v, a, pos);
}

inline bool is_wf_type(const std::vector<std::string>& vars, const Type& a) {
  try {
    wf_type(vars, a);
    return true;
  } catch (const Error&) {
    return false;
  }
}

// Node count with every Later subtree counting 0.
inline unsigned unguarded_size(const Type& a) {
  switch (a.kind()) {
    case TypeKind::Var:
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
      return 1;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Arrow:
      return 1 + unguarded_size(a.left()) + unguarded_size(a.right());
    case TypeKind::Mu:
    case TypeKind::Box:
      return 1 + unguarded_size(a.body());
    case TypeKind::Later:
      return 0;
  }
  return 0;
}

inline unsigned box_depth(const Type& a) {
  switch (a.kind()) {
    case TypeKind::Var:
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
      return 0;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Arrow:
      return std::min(box_depth(a.left()), box_depth(a.right()));
    case TypeKind::Mu:
    case TypeKind::Later:
      return box_depth(a.body());
    case TypeKind::Box:
      return 1 + box_depth(a.body());
  }
  return 0;
}

// ---------------------------------------------------------------- checker

class TypingContext {
 public:
  TypingContext() = default;
  TypingContext(std::initializer_list<std::pair<std::string, Type>> vars) : vars_(vars) {}

  const Type* lookup(const std::string& x) const {
    for (auto it = vars_.rbegin(); it != vars_.rend(); ++it) {
      if (it->first == x) return &it->second;
    }
    return nullptr;
  }
  TypingContext extended(const std::string& x, const Type& a) const {
    TypingContext c = *this;
    c.vars_.emplace_back(x, a);
    return c;
  }
  const std::vector<std::pair<std::string, Type>>& vars() const { return vars_; }

 private:
  std::vector<std::pair<std::string, Type>> vars_;
};

class Checker {
 public:
  explicit Checker(const PrettyNames* names = nullptr) : names_(names) {}

  // Returns the elaborated term, which synthesizes `a`.
  Term check(const TypingContext& ctx, const Term& t, const Type& a) {
    return chk(ctx, t, a, t.pos());
  }
  std::pair<Term, Type> infer(const TypingContext& ctx, const Term& t) {
    return inf(ctx, t, t.pos());
  }
  void set_names(const PrettyNames* names) { names_ = names; }

 private:
  struct Memo {
    Term original;
    Term elaborated;
    Type type;
  };
  const PrettyNames* names_;
  std::unordered_map<const void*, Memo> memo_;

  std::string show(const Type& a) const { return pretty(a, names_); }

  static SourcePos at(const Term& t, SourcePos outer) { return t.pos().known() ? t.pos() : outer; }

  [[noreturn]] void mismatch(const Type& expected, const Type& found, SourcePos pos,
                             const std::string& what = "") const {
    std::string msg = "expected " + show(expected) + ", found " + show(found);
    if (!what.empty()) msg += " (" + what + ")";
    throw Error(ErrorCode::TypeMismatch, msg, pos);
  }
  [[noreturn]] void expected_shape(const char* shape, const Type& found, SourcePos pos,
                                   const std::string& what) const {
    throw Error(ErrorCode::TypeMismatch,
                std::string("expected ") + shape + " type, found " + show(found) + " (" + what + ")",
                pos);
  }
  void annotation_ok(const Type& a, SourcePos pos) const { wf_type({}, a, pos); }

  void same(const Type& expected, const Type& found, SourcePos pos) const {
    if (!type_alpha_eq(expected, found)) mismatch(expected, found, pos);
  }

  // Context of a prev/box/boxp body: exactly the substituted variables.
  std::pair<TypingContext, ExplicitSubst> closing_context(const TypingContext& ctx, const Term& t,
                                                          SourcePos pos) {
    TypingContext inner;
    ExplicitSubst sigma;
    for (const auto& b : t.subst()) {
      auto [e, a] = inf(ctx, b.term, pos);
      if (!is_constant(a)) {
        throw Error(ErrorCode::NonConstantSubstType,
                    "substitution for '" + b.var + "' has non-constant type " + show(a), pos);
      }
      inner = inner.extended(b.var, a);
      sigma.push_back({b.var, e});
    }
    for (const auto& x : t.child(0).free_vars()) {
      if (!inner.lookup(x)) {
        throw Error(ErrorCode::EscapingVariable,
                    "variable '" + x + "' is not listed in the explicit substitution", pos);
      }
    }
    return {inner, sigma};
  }

  std::pair<Term, Type> inf(const TypingContext& ctx, const Term& t, SourcePos outer) {
    if (t.is_closed()) {
      auto it = memo_.find(t.id());
      if (it != memo_.end()) return {it->second.elaborated, it->second.type};
      auto result = inf_raw(ctx, t, outer);
      memo_.emplace(t.id(), Memo{t, result.first, result.second});
      return result;
    }
    return inf_raw(ctx, t, outer);
  }

  std::pair<Term, Type> inf_raw(const TypingContext& ctx, const Term& t, SourcePos outer) {
    SourcePos pos = at(t, outer);
    switch (t.kind()) {
      case TermKind::Var: {
        const Type* a = ctx.lookup(t.name());
        if (!a) throw Error(ErrorCode::UnboundVariable, "unbound variable '" + t.name() + "'", pos);
        return {t, *a};
      }
      case TermKind::Zero:
        return {t, Type::nat()};
      case TermKind::Succ:
        return {t.rebuild({chk(ctx, t.child(0), Type::nat(), pos)}, {}), Type::nat()};
      case TermKind::UnitVal:
        return {t, Type::unit()};
      case TermKind::Pair: {
        auto [a, ta] = inf(ctx, t.child(0), pos);
        auto [b, tb] = inf(ctx, t.child(1), pos);
        return {t.rebuild({a, b}, {}), Type::prod(ta, tb)};
      }
      case TermKind::Proj1:
      case TermKind::Proj2: {
        auto [e, a] = inf(ctx, t.child(0), pos);
        if (!a.is(TypeKind::Prod)) expected_shape("a product", a, pos, "projection");
        return {t.rebuild({e}, {}), t.is(TermKind::Proj1) ? a.left() : a.right()};
      }
      case TermKind::Abort: {
        annotation_ok(*t.annotation(), pos);
        return {t.rebuild({chk(ctx, t.child(0), Type::void_(), pos)}, {}), *t.annotation()};
      }
      case TermKind::In1:
      case TermKind::In2: {
        const Type& s = *t.annotation();
        annotation_ok(s, pos);
        if (!s.is(TypeKind::Sum)) expected_shape("a sum", s, pos, "injection annotation");
        Type part = t.is(TermKind::In1) ? s.left() : s.right();
        return {t.rebuild({chk(ctx, t.child(0), part, pos)}, {}), s};
      }
      case TermKind::Case: {
        auto [scrut, s] = inf(ctx, t.child(0), pos);
        if (!s.is(TypeKind::Sum)) expected_shape("a sum", s, pos, "case scrutinee");
        auto [b1, c] = inf(ctx.extended(t.binder1(), s.left()), t.child(1), pos);
        Term b2 = chk(ctx.extended(t.binder2(), s.right()), t.child(2), c, pos);
        return {t.rebuild({scrut, b1, b2}, {}), c};
      }
      case TermKind::Lam: {
        if (!t.annotation()) {
          throw Error(ErrorCode::CannotSynthesize,
                      "cannot synthesize a type for \\" + t.name() +
                          " without an annotation; write \\" + t.name() + ":T or ascribe it",
                      pos);
        }
        annotation_ok(*t.annotation(), pos);
        auto [body, b] = inf(ctx.extended(t.name(), *t.annotation()), t.child(0), pos);
        return {t.rebuild({body}, {}), Type::arrow(*t.annotation(), b)};
      }
      case TermKind::App: {
        auto [f, fa] = inf(ctx, t.child(0), pos);
        if (!fa.is(TypeKind::Arrow)) expected_shape("a function", fa, pos, "application");
        Term a = chk(ctx, t.child(1), fa.left(), pos);
        return {t.rebuild({f, a}, {}), fa.right()};
      }
      case TermKind::Fold: {
        const Type& m = *t.annotation();
        annotation_ok(m, pos);
        if (!m.is(TypeKind::Mu)) expected_shape("a mu", m, pos, "fold annotation");
        return {t.rebuild({chk(ctx, t.child(0), unfold_mu(m), pos)}, {}), m};
      }
      case TermKind::Unfold: {
        auto [e, m] = inf(ctx, t.child(0), pos);
        if (!m.is(TypeKind::Mu)) expected_shape("a mu", m, pos, "unfold");
        return {t.rebuild({e}, {}), unfold_mu(m)};
      }
      case TermKind::Next: {
        auto [e, a] = inf(ctx, t.child(0), pos);
        return {t.rebuild({e}, {}), Type::later(a)};
      }
      case TermKind::Prev: {
        auto [inner, sigma] = closing_context(ctx, t, pos);
        auto [body, la] = inf(inner, t.child(0), pos);
        if (!la.is(TypeKind::Later)) expected_shape("a later", la, pos, "body of prev");
        return {t.rebuild({body}, std::move(sigma)), la.body()};
      }
      case TermKind::LaterApp: {
        auto [f, lf] = inf(ctx, t.child(0), pos);
        if (!lf.is(TypeKind::Later) || !lf.body().is(TypeKind::Arrow)) {
          expected_shape("a |>(A -> B)", lf, pos, "left of <*>");
        }
        Term a = chk(ctx, t.child(1), Type::later(lf.body().left()), pos);
        return {t.rebuild({f, a}, {}), Type::later(lf.body().right())};
      }
      case TermKind::BoxI: {
        auto [inner, sigma] = closing_context(ctx, t, pos);
        auto [body, a] = inf(inner, t.child(0), pos);
        return {t.rebuild({body}, std::move(sigma)), Type::box(a)};
      }
      case TermKind::Unbox: {
        auto [e, a] = inf(ctx, t.child(0), pos);
        if (!a.is(TypeKind::Box)) expected_shape("a #", a, pos, "unbox");
        return {t.rebuild({e}, {}), a.body()};
      }
      case TermKind::BoxSum: {
        auto [inner, sigma] = closing_context(ctx, t, pos);
        auto [body, s] = inf(inner, t.child(0), pos);
        if (!s.is(TypeKind::Sum)) expected_shape("a sum", s, pos, "body of boxp");
        return {t.rebuild({body}, std::move(sigma)),
                Type::sum(Type::box(s.left()), Type::box(s.right()))};
      }
      case TermKind::Prim: {
        std::vector<Term> args;
        for (const auto& a : t.children()) args.push_back(chk(ctx, a, Type::nat(), pos));
        return {t.rebuild(std::move(args), {}), Type::nat()};
      }
      case TermKind::Ascribe: {
        annotation_ok(*t.annotation(), pos);
        return {chk(ctx, t.child(0), *t.annotation(), pos), *t.annotation()};
      }
    }
    throw Error(ErrorCode::CannotSynthesize, "unsupported term", pos);
  }

  Term chk(const TypingContext& ctx, const Term& t, const Type& a, SourcePos outer) {
    SourcePos pos = at(t, outer);
    switch (t.kind()) {
      case TermKind::Lam: {
        if (!a.is(TypeKind::Arrow)) expected_shape("a non-function", a, pos, "lambda checked against it");
        if (t.annotation() && !type_alpha_eq(*t.annotation(), a.left())) {
          mismatch(a.left(), *t.annotation(), pos, "lambda annotation");
        }
        Term body = chk(ctx.extended(t.name(), a.left()), t.child(0), a.right(), pos);
        return Term::lam(t.name(), a.left(), body).with_pos(t.pos());
      }
      case TermKind::Pair: {
        if (!a.is(TypeKind::Prod)) expected_shape("a non-product", a, pos, "pair checked against it");
        Term l = chk(ctx, t.child(0), a.left(), pos);
        Term r = chk(ctx, t.child(1), a.right(), pos);
        return t.rebuild({l, r}, {});
      }
      case TermKind::Case: {
        auto [scrut, s] = inf(ctx, t.child(0), pos);
        if (!s.is(TypeKind::Sum)) expected_shape("a sum", s, pos, "case scrutinee");
        Term b1 = chk(ctx.extended(t.binder1(), s.left()), t.child(1), a, pos);
        Term b2 = chk(ctx.extended(t.binder2(), s.right()), t.child(2), a, pos);
        return t.rebuild({scrut, b1, b2}, {});
      }
      case TermKind::Next: {
        if (!a.is(TypeKind::Later)) expected_shape("a non-later", a, pos, "next checked against it");
        return t.rebuild({chk(ctx, t.child(0), a.body(), pos)}, {});
      }
      case TermKind::Prev: {
        auto [inner, sigma] = closing_context(ctx, t, pos);
        Term body = chk(inner, t.child(0), Type::later(a), pos);
        return t.rebuild({body}, std::move(sigma));
      }
      case TermKind::BoxI: {
        if (!a.is(TypeKind::Box)) expected_shape("a non-#", a, pos, "box checked against it");
        auto [inner, sigma] = closing_context(ctx, t, pos);
        Term body = chk(inner, t.child(0), a.body(), pos);
        return t.rebuild({body}, std::move(sigma));
      }
      case TermKind::BoxSum: {
        if (!a.is(TypeKind::Sum) || !a.left().is(TypeKind::Box) || !a.right().is(TypeKind::Box)) {
          expected_shape("a #A + #B", a, pos, "boxp checked against it");
        }
        auto [inner, sigma] = closing_context(ctx, t, pos);
        Term body = chk(inner, t.child(0), Type::sum(a.left().body(), a.right().body()), pos);
        return t.rebuild({body}, std::move(sigma));
      }
      case TermKind::LaterApp: {
        if (!a.is(TypeKind::Later)) expected_shape("a non-later", a, pos, "<*> checked against it");
        std::optional<std::pair<Term, Type>> right;
        try {
          right = inf(ctx, t.child(1), pos);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::CannotSynthesize) throw;
        }
        if (right) {
          if (!right->second.is(TypeKind::Later)) {
            expected_shape("a later", right->second, pos, "right of <*>");
          }
          Type fn = Type::later(Type::arrow(right->second.body(), a.body()));
          Term f = chk(ctx, t.child(0), fn, pos);
          return t.rebuild({f, right->first}, {});
        }
        auto [e, found] = inf(ctx, t, pos);
        same(a, found, pos);
        return e;
      }
      case TermKind::App: {
        std::optional<std::pair<Term, Type>> head;
        try {
          head = inf(ctx, t.child(0), pos);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::CannotSynthesize) throw;
        }
        if (head) {
          if (!head->second.is(TypeKind::Arrow)) {
            expected_shape("a function", head->second, pos, "application");
          }
          same(a, head->second.right(), pos);
          Term arg = chk(ctx, t.child(1), head->second.left(), pos);
          return t.rebuild({head->first, arg}, {});
        }
        auto [arg, aa] = inf(ctx, t.child(1), pos);
        Term f = chk(ctx, t.child(0), Type::arrow(aa, a), pos);
        return t.rebuild({f, arg}, {});
      }
      default: {
        auto [e, found] = inf(ctx, t, pos);
        same(a, found, pos);
        return e;
      }
    }
  }
};

inline Type infer(const TypingContext& ctx, const Term& t) {
  Checker c;
  return c.infer(ctx, t).second;
}

inline void check(const TypingContext& ctx, const Term& t, const Type& a) {
  Checker c;
  c.check(ctx, t, a);
}

inline Term elaborate(const TypingContext& ctx, const Term& t, const Type& a) {
  Checker c;
  return c.check(ctx, t, a);
}

// ------------------------------------------------------------- programs

struct CheckedDef {
  std::string name;
  Type type;
  Term elaborated;  // closed, fully annotated, no ascriptions
};

struct CheckedProgram {
  std::vector<CheckedDef> defs;
  PrettyNames names;

  const CheckedDef* find(std::string_view name) const {
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) {
      if (it->name == name) return &*it;
    }
    return nullptr;
  }
};

// Checks each definition against its declared type. `checker` may be shared
// across programs so common prelude definitions are elaborated once.
inline CheckedProgram check_program(const Program& p, Checker* checker = nullptr,
                                    const PrettyNames* base_names = nullptr) {
  CheckedProgram out;
  if (base_names) out.names = *base_names;
  out.names.add(p);
  Checker local;
  Checker& c = checker ? *checker : local;
  c.set_names(&out.names);
  for (const auto& a : p.aliases) {
    try {
      wf_type({}, a.type);
    } catch (const Error& e) {
      c.set_names(nullptr);
      throw Error(e.code(), "in type '" + a.name + "': " + e.message(), e.pos());
    }
  }
  for (const auto& d : p.defs) {
    try {
      wf_type({}, d.type, d.pos);
      Term e = c.check({}, d.ref, d.type);
      out.names.terms[e.id()] = d.name;
      out.defs.push_back({d.name, d.type, e});
    } catch (const Error& e) {
      c.set_names(nullptr);
      throw Error(e.code(), "in definition '" + d.name + "': " + e.message(),
                  e.pos().known() ? e.pos() : d.pos);
    }
  }
  c.set_names(nullptr);
  return out;
}

}  // namespace glam
