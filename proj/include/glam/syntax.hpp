#pragma once

// Abstract syntax of guarded lambda-calculus types and terms: construction,
// free variables, capture-avoiding substitution and alpha-equivalence.
//
// Terms and types are immutable and reference counted. Substitution returns
// the original node whenever nothing underneath it changes, so closed
// subterms (inlined definitions in particular) stay shared by pointer.

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "glam/error.hpp"

namespace glam {

// ---------------------------------------------------------------- types

enum class TypeKind { Var, Nat, Unit, Void, Prod, Sum, Arrow, Mu, Later, Box };

class Type {
 public:
  Type() = default;

  static Type var(std::string name);
  static Type nat();
  static Type unit();
  static Type void_();
  static Type prod(Type a, Type b);
  static Type sum(Type a, Type b);
  static Type arrow(Type a, Type b);
  static Type mu(std::string binder, Type body);
  static Type later(Type a);
  static Type box(Type a);

  explicit operator bool() const { return rep_ != nullptr; }
  TypeKind kind() const;
  // Var name or Mu binder.
  const std::string& name() const;
  // Left operand of Prod/Sum/Arrow; body of Mu/Later/Box.
  const Type& left() const;
  const Type& right() const;
  const Type& body() const { return left(); }
  const void* id() const { return rep_.get(); }

  bool is(TypeKind k) const { return rep_ && kind() == k; }

 private:
  struct Rep;
  explicit Type(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  std::shared_ptr<const Rep> rep_;
};

struct Type::Rep {
  TypeKind kind;
  std::string name;
  Type left;
  Type right;
};

inline TypeKind Type::kind() const { return rep_->kind; }
inline const std::string& Type::name() const { return rep_->name; }
inline const Type& Type::left() const { return rep_->left; }
inline const Type& Type::right() const { return rep_->right; }

inline Type Type::var(std::string name) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Var, std::move(name), {}, {}}));
}
inline Type Type::nat() {
  static const Type t(std::make_shared<const Rep>(Rep{TypeKind::Nat, {}, {}, {}}));
  return t;
}
inline Type Type::unit() {
  static const Type t(std::make_shared<const Rep>(Rep{TypeKind::Unit, {}, {}, {}}));
  return t;
}
inline Type Type::void_() {
  static const Type t(std::make_shared<const Rep>(Rep{TypeKind::Void, {}, {}, {}}));
  return t;
}
inline Type Type::prod(Type a, Type b) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Prod, {}, std::move(a), std::move(b)}));
}
inline Type Type::sum(Type a, Type b) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Sum, {}, std::move(a), std::move(b)}));
}
inline Type Type::arrow(Type a, Type b) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Arrow, {}, std::move(a), std::move(b)}));
}
inline Type Type::mu(std::string binder, Type body) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Mu, std::move(binder), std::move(body), {}}));
}
inline Type Type::later(Type a) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Later, {}, std::move(a), {}}));
}
inline Type Type::box(Type a) {
  return Type(std::make_shared<const Rep>(Rep{TypeKind::Box, {}, std::move(a), {}}));
}

inline bool is_binary(TypeKind k) {
  return k == TypeKind::Prod || k == TypeKind::Sum || k == TypeKind::Arrow;
}

// -------------------------------------------------------- fresh names

// Picks `base` with a numeric suffix that `taken` rejects. Trailing digits
// of base are dropped first so repeated freshening stays readable.
template <class Taken>
std::string fresh_name(const std::string& base, Taken&& taken) {
  std::string stem = base;
  while (!stem.empty() && std::isdigit(static_cast<unsigned char>(stem.back()))) stem.pop_back();
  if (stem.empty()) stem = "v";
  for (unsigned n = 1;; ++n) {
    std::string candidate = stem + std::to_string(n);
    if (!taken(candidate)) return candidate;
  }
}

// ------------------------------------------------------ type operations

namespace detail {

inline void type_free_vars(const Type& a, std::vector<std::string>& bound,
                           std::vector<std::string>& out) {
  switch (a.kind()) {
    case TypeKind::Var:
      if (std::find(bound.begin(), bound.end(), a.name()) == bound.end() &&
          std::find(out.begin(), out.end(), a.name()) == out.end()) {
        out.push_back(a.name());
      }
      return;
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
      return;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Arrow:
      type_free_vars(a.left(), bound, out);
      type_free_vars(a.right(), bound, out);
      return;
    case TypeKind::Mu:
      bound.push_back(a.name());
      type_free_vars(a.body(), bound, out);
      bound.pop_back();
      return;
    case TypeKind::Later:
    case TypeKind::Box:
      type_free_vars(a.body(), bound, out);
      return;
  }
}

using TypeEnv = std::vector<std::pair<std::string, std::string>>;

inline bool type_alpha_eq(const Type& a, const Type& b, TypeEnv& env) {
  if (a.id() == b.id() && env.empty()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TypeKind::Var: {
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool l = it->first == a.name();
        bool r = it->second == b.name();
        if (l || r) return l && r;
      }
      return a.name() == b.name();
    }
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
      return true;
    case TypeKind::Prod:
    case TypeKind::Sum:
    case TypeKind::Arrow:
      return type_alpha_eq(a.left(), b.left(), env) && type_alpha_eq(a.right(), b.right(), env);
    case TypeKind::Mu: {
      env.emplace_back(a.name(), b.name());
      bool eq = type_alpha_eq(a.body(), b.body(), env);
      env.pop_back();
      return eq;
    }
    case TypeKind::Later:
    case TypeKind::Box:
      return type_alpha_eq(a.body(), b.body(), env);
  }
  return false;
}

}  // namespace detail

inline std::vector<std::string> type_free_vars(const Type& a) {
  std::vector<std::string> bound, out;
  detail::type_free_vars(a, bound, out);
  return out;
}

inline bool type_is_closed(const Type& a) { return type_free_vars(a).empty(); }

// Structural equality modulo renaming of mu-bound variables.
inline bool type_alpha_eq(const Type& a, const Type& b) {
  detail::TypeEnv env;
  return detail::type_alpha_eq(a, b, env);
}

// a[b/alpha], renaming mu binders that would capture free variables of b.
inline Type type_subst(const Type& a, const std::string& alpha, const Type& b) {
  switch (a.kind()) {
    case TypeKind::Var:
      return a.name() == alpha ? b : a;
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
      return a;
    case TypeKind::Prod:
      return Type::prod(type_subst(a.left(), alpha, b), type_subst(a.right(), alpha, b));
    case TypeKind::Sum:
      return Type::sum(type_subst(a.left(), alpha, b), type_subst(a.right(), alpha, b));
    case TypeKind::Arrow:
      return Type::arrow(type_subst(a.left(), alpha, b), type_subst(a.right(), alpha, b));
    case TypeKind::Later:
      return Type::later(type_subst(a.body(), alpha, b));
    case TypeKind::Box:
      return Type::box(type_subst(a.body(), alpha, b));
    case TypeKind::Mu: {
      if (a.name() == alpha) return a;
      auto fv_b = type_free_vars(b);
      if (std::find(fv_b.begin(), fv_b.end(), a.name()) == fv_b.end()) {
        return Type::mu(a.name(), type_subst(a.body(), alpha, b));
      }
      auto fv_body = type_free_vars(a.body());
      auto taken = [&](const std::string& n) {
        return n == alpha || std::find(fv_b.begin(), fv_b.end(), n) != fv_b.end() ||
               std::find(fv_body.begin(), fv_body.end(), n) != fv_body.end();
      };
      std::string fresh = fresh_name(a.name(), taken);
      Type renamed = type_subst(a.body(), a.name(), Type::var(fresh));
      return Type::mu(fresh, type_subst(renamed, alpha, b));
    }
  }
  return a;
}

// A[mu a.A / a] for mu a.A.
inline Type unfold_mu(const Type& mu) { return type_subst(mu.body(), mu.name(), mu); }

// ---------------------------------------------------------------- terms

enum class TermKind {
  Var,
  Zero,
  Succ,
  UnitVal,
  Pair,
  Proj1,
  Proj2,
  Abort,
  In1,
  In2,
  Case,
  Lam,
  App,
  Fold,
  Unfold,
  Next,
  Prev,
  LaterApp,
  BoxI,
  Unbox,
  BoxSum,
  Prim,
  Ascribe,
};

class Term;
struct Binding;
using ExplicitSubst = std::vector<Binding>;

class Term {
 public:
  Term() = default;

  static Term var(std::string name);
  static Term zero();
  static Term succ(Term t);
  static Term unit();
  static Term pair(Term a, Term b);
  static Term proj1(Term t);
  static Term proj2(Term t);
  static Term abort(Type annot, Term t);
  static Term in1(Type annot, Term t);
  static Term in2(Type annot, Term t);
  static Term case_(Term scrutinee, std::string x1, Term t1, std::string x2, Term t2);
  static Term lam(std::string x, std::optional<Type> annot, Term body);
  static Term app(Term f, Term a);
  static Term fold(Type annot, Term t);
  static Term unfold(Term t);
  static Term next(Term t);
  static Term prev(ExplicitSubst sigma, Term body);
  static Term later_app(Term f, Term a);
  static Term box(ExplicitSubst sigma, Term body);
  static Term unbox(Term t);
  static Term box_sum(ExplicitSubst sigma, Term body);
  static Term prim(std::string op, std::vector<Term> args);
  static Term ascribe(Term t, Type type);

  // Succ^n(Zero).
  static Term numeral(std::uint64_t n);

  explicit operator bool() const { return rep_ != nullptr; }
  TermKind kind() const;
  bool is(TermKind k) const { return rep_ && kind() == k; }

  // Var name, Lam binder, Prim operator, first Case binder.
  const std::string& name() const;
  const std::string& binder1() const { return name(); }
  const std::string& binder2() const;
  // Children in source order. Case: scrutinee, branch1, branch2.
  // Prev/BoxI/BoxSum: the body only (substituted terms live in subst()).
  const std::vector<Term>& children() const;
  const Term& child(std::size_t i) const { return children()[i]; }
  const std::optional<Type>& annotation() const;
  const ExplicitSubst& subst() const;
  // Sorted, duplicate free.
  const std::vector<std::string>& free_vars() const;
  bool is_closed() const { return free_vars().empty(); }
  bool has_free(const std::string& x) const;
  bool has_ascription() const;
  SourcePos pos() const;
  Term with_pos(SourcePos pos) const;
  const void* id() const { return rep_.get(); }

  std::optional<std::uint64_t> as_numeral() const;

  // Rebuilds this node with different children/subst terms but the same
  // binders and annotations. Returns *this if nothing changed.
  Term rebuild(std::vector<Term> kids, ExplicitSubst sigma) const;

 private:
  struct Rep;
  explicit Term(std::shared_ptr<const Rep> rep) : rep_(std::move(rep)) {}
  static Term make(Rep rep);
  static Rep unary(TermKind k, Term t);
  static Rep annotated(TermKind k, Type annot, Term t);
  static Rep closing(TermKind k, ExplicitSubst sigma, Term body);
  std::shared_ptr<const Rep> rep_;
};

struct Binding {
  std::string var;
  Term term;
};

struct Term::Rep {
  TermKind kind{};
  std::string name;
  std::string name2;
  std::vector<Term> kids;
  std::optional<Type> annot;
  ExplicitSubst sigma;
  std::vector<std::string> fv;
  bool has_ascribe = false;
  SourcePos pos;
};

inline TermKind Term::kind() const { return rep_->kind; }
inline const std::string& Term::name() const { return rep_->name; }
inline const std::string& Term::binder2() const { return rep_->name2; }
inline const std::vector<Term>& Term::children() const { return rep_->kids; }
inline const std::optional<Type>& Term::annotation() const { return rep_->annot; }
inline const ExplicitSubst& Term::subst() const { return rep_->sigma; }
inline const std::vector<std::string>& Term::free_vars() const { return rep_->fv; }
inline bool Term::has_ascription() const { return rep_->has_ascribe; }
inline SourcePos Term::pos() const { return rep_->pos; }

inline bool Term::has_free(const std::string& x) const {
  return std::binary_search(rep_->fv.begin(), rep_->fv.end(), x);
}

namespace detail {

inline void merge_into(std::vector<std::string>& acc, const std::vector<std::string>& more,
                       const std::string* except = nullptr) {
  if (more.empty()) return;
  std::vector<std::string> out;
  out.reserve(acc.size() + more.size());
  auto a = acc.begin();
  auto b = more.begin();
  while (a != acc.end() || b != more.end()) {
    if (b != more.end() && except && *b == *except) {
      ++b;
      continue;
    }
    if (b == more.end() || (a != acc.end() && *a < *b)) {
      out.push_back(*a++);
    } else if (a == acc.end() || *b < *a) {
      out.push_back(*b++);
    } else {
      out.push_back(*a++);
      ++b;
    }
  }
  acc = std::move(out);
}

}  // namespace detail

inline Term Term::make(Rep rep) {
  std::vector<std::string> fv;
  bool asc = rep.kind == TermKind::Ascribe;
  switch (rep.kind) {
    case TermKind::Var:
      fv.push_back(rep.name);
      break;
    case TermKind::Lam:
      detail::merge_into(fv, rep.kids[0].free_vars(), &rep.name);
      break;
    case TermKind::Case:
      detail::merge_into(fv, rep.kids[0].free_vars());
      detail::merge_into(fv, rep.kids[1].free_vars(), &rep.name);
      detail::merge_into(fv, rep.kids[2].free_vars(), &rep.name2);
      break;
    case TermKind::Prev:
    case TermKind::BoxI:
    case TermKind::BoxSum:
      // The body is closed by the explicit substitution.
      for (const auto& b : rep.sigma) detail::merge_into(fv, b.term.free_vars());
      break;
    default:
      for (const auto& k : rep.kids) detail::merge_into(fv, k.free_vars());
      break;
  }
  for (const auto& k : rep.kids) asc = asc || k.has_ascription();
  for (const auto& b : rep.sigma) asc = asc || b.term.has_ascription();
  rep.fv = std::move(fv);
  rep.has_ascribe = asc;
  return Term(std::make_shared<const Rep>(std::move(rep)));
}

inline Term Term::var(std::string name) {
  Rep r;
  r.kind = TermKind::Var;
  r.name = std::move(name);
  return make(std::move(r));
}
inline Term Term::zero() {
  static const Term z = [] {
    Rep r;
    r.kind = TermKind::Zero;
    return make(std::move(r));
  }();
  return z;
}
inline Term Term::unit() {
  static const Term u = [] {
    Rep r;
    r.kind = TermKind::UnitVal;
    return make(std::move(r));
  }();
  return u;
}

inline Term::Rep Term::unary(TermKind k, Term t) {
  Term::Rep r;
  r.kind = k;
  r.kids.push_back(std::move(t));
  return r;
}

inline Term Term::succ(Term t) { return make(unary(TermKind::Succ, std::move(t))); }
inline Term Term::proj1(Term t) { return make(unary(TermKind::Proj1, std::move(t))); }
inline Term Term::proj2(Term t) { return make(unary(TermKind::Proj2, std::move(t))); }
inline Term Term::unfold(Term t) { return make(unary(TermKind::Unfold, std::move(t))); }
inline Term Term::next(Term t) { return make(unary(TermKind::Next, std::move(t))); }
inline Term Term::unbox(Term t) { return make(unary(TermKind::Unbox, std::move(t))); }

inline Term Term::pair(Term a, Term b) {
  Rep r;
  r.kind = TermKind::Pair;
  r.kids = {std::move(a), std::move(b)};
  return make(std::move(r));
}
inline Term Term::app(Term f, Term a) {
  Rep r;
  r.kind = TermKind::App;
  r.kids = {std::move(f), std::move(a)};
  return make(std::move(r));
}
inline Term Term::later_app(Term f, Term a) {
  Rep r;
  r.kind = TermKind::LaterApp;
  r.kids = {std::move(f), std::move(a)};
  return make(std::move(r));
}

inline Term::Rep Term::annotated(TermKind k, Type annot, Term t) {
  Term::Rep r = unary(k, std::move(t));
  r.annot = std::move(annot);
  return r;
}
inline Term::Rep Term::closing(TermKind k, ExplicitSubst sigma, Term body) {
  Term::Rep r = unary(k, std::move(body));
  r.sigma = std::move(sigma);
  return r;
}

inline Term Term::abort(Type annot, Term t) {
  return make(annotated(TermKind::Abort, std::move(annot), std::move(t)));
}
inline Term Term::in1(Type annot, Term t) {
  return make(annotated(TermKind::In1, std::move(annot), std::move(t)));
}
inline Term Term::in2(Type annot, Term t) {
  return make(annotated(TermKind::In2, std::move(annot), std::move(t)));
}
inline Term Term::fold(Type annot, Term t) {
  return make(annotated(TermKind::Fold, std::move(annot), std::move(t)));
}
inline Term Term::ascribe(Term t, Type type) {
  return make(annotated(TermKind::Ascribe, std::move(type), std::move(t)));
}
inline Term Term::prev(ExplicitSubst sigma, Term body) {
  return make(closing(TermKind::Prev, std::move(sigma), std::move(body)));
}
inline Term Term::box(ExplicitSubst sigma, Term body) {
  return make(closing(TermKind::BoxI, std::move(sigma), std::move(body)));
}
inline Term Term::box_sum(ExplicitSubst sigma, Term body) {
  return make(closing(TermKind::BoxSum, std::move(sigma), std::move(body)));
}

inline Term Term::case_(Term scrutinee, std::string x1, Term t1, std::string x2, Term t2) {
  Rep r;
  r.kind = TermKind::Case;
  r.name = std::move(x1);
  r.name2 = std::move(x2);
  r.kids = {std::move(scrutinee), std::move(t1), std::move(t2)};
  return make(std::move(r));
}
inline Term Term::lam(std::string x, std::optional<Type> annot, Term body) {
  Rep r;
  r.kind = TermKind::Lam;
  r.name = std::move(x);
  r.annot = std::move(annot);
  r.kids = {std::move(body)};
  return make(std::move(r));
}
inline Term Term::prim(std::string op, std::vector<Term> args) {
  Rep r;
  r.kind = TermKind::Prim;
  r.name = std::move(op);
  r.kids = std::move(args);
  return make(std::move(r));
}

inline Term Term::numeral(std::uint64_t n) {
  Term t = zero();
  for (std::uint64_t i = 0; i < n; ++i) t = succ(t);
  return t;
}

inline std::optional<std::uint64_t> Term::as_numeral() const {
  std::uint64_t n = 0;
  const Term* cur = this;
  while (cur->kind() == TermKind::Succ) {
    ++n;
    cur = &cur->child(0);
  }
  if (cur->kind() != TermKind::Zero) return std::nullopt;
  return n;
}

inline Term Term::with_pos(SourcePos pos) const {
  Rep r = *rep_;
  r.pos = pos;
  return Term(std::make_shared<const Rep>(std::move(r)));
}

inline Term Term::rebuild(std::vector<Term> kids, ExplicitSubst sigma) const {
  bool same = kids.size() == rep_->kids.size() && sigma.size() == rep_->sigma.size();
  for (std::size_t i = 0; same && i < kids.size(); ++i) same = kids[i].id() == rep_->kids[i].id();
  for (std::size_t i = 0; same && i < sigma.size(); ++i) {
    same = sigma[i].term.id() == rep_->sigma[i].term.id() && sigma[i].var == rep_->sigma[i].var;
  }
  if (same) return *this;
  Rep r;
  r.kind = rep_->kind;
  r.name = rep_->name;
  r.name2 = rep_->name2;
  r.annot = rep_->annot;
  r.kids = std::move(kids);
  r.sigma = std::move(sigma);
  r.pos = rep_->pos;
  return make(std::move(r));
}

inline bool is_closing_binder(TermKind k) {
  return k == TermKind::Prev || k == TermKind::BoxI || k == TermKind::BoxSum;
}

// ------------------------------------------------------------ primitives

struct PrimitiveInfo {
  const char* name;
  std::size_t arity;
};

inline std::span<const PrimitiveInfo> primitives() {
  static constexpr PrimitiveInfo table[] = {{"addN", 2}, {"mulN", 2}};
  return table;
}

inline const PrimitiveInfo* find_primitive(const std::string& name) {
  for (const auto& p : primitives()) {
    if (name == p.name) return &p;
  }
  return nullptr;
}

inline std::uint64_t apply_primitive(const std::string& op, std::span<const std::uint64_t> args) {
  if (op == "addN") return args[0] + args[1];
  if (op == "mulN") return args[0] * args[1];
  throw Error(ErrorCode::UnknownIdentifier, "unknown primitive '" + op + "'");
}

// ------------------------------------------------------------ free vars

inline std::vector<std::string> free_vars(const Term& t) { return t.free_vars(); }

// ---------------------------------------------------------- substitution

namespace detail {

inline bool in_sorted(const std::vector<std::string>& v, const std::string& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

inline ExplicitSubst relevant(const ExplicitSubst& s, const Term& t) {
  ExplicitSubst out;
  for (const auto& b : s) {
    if (t.has_free(b.var)) out.push_back(b);
  }
  return out;
}

Term subst_rec(const Term& t, const ExplicitSubst& s);

// Decides the name a binder gets under substitution s applied to `body`,
// and extends s with a renaming when the binder would capture.
inline std::string enter_binder(const std::string& x, const Term& body, ExplicitSubst& s) {
  std::erase_if(s, [&](const Binding& b) { return b.var == x; });
  bool captures = false;
  for (const auto& b : s) {
    if (body.has_free(b.var) && b.term.has_free(x)) captures = true;
  }
  if (!captures) return x;
  auto taken = [&](const std::string& n) {
    if (body.has_free(n)) return true;
    for (const auto& b : s) {
      if (b.var == n || b.term.has_free(n)) return true;
    }
    return false;
  };
  std::string fresh = fresh_name(x, taken);
  s.push_back({x, Term::var(fresh)});
  return fresh;
}

inline Term subst_rec(const Term& t, const ExplicitSubst& all) {
  ExplicitSubst s = relevant(all, t);
  if (s.empty()) return t;
  switch (t.kind()) {
    case TermKind::Var:
      for (const auto& b : s) {
        if (b.var == t.name()) return b.term;
      }
      return t;
    case TermKind::Lam: {
      std::string x = enter_binder(t.name(), t.child(0), s);
      Term body = subst_rec(t.child(0), s);
      if (x == t.name() && body.id() == t.child(0).id()) return t;
      return Term::lam(x, t.annotation(), body).with_pos(t.pos());
    }
    case TermKind::Case: {
      Term scrut = subst_rec(t.child(0), s);
      ExplicitSubst s1 = s, s2 = s;
      std::string x1 = enter_binder(t.binder1(), t.child(1), s1);
      Term b1 = subst_rec(t.child(1), s1);
      std::string x2 = enter_binder(t.binder2(), t.child(2), s2);
      Term b2 = subst_rec(t.child(2), s2);
      return Term::case_(scrut, x1, b1, x2, b2).with_pos(t.pos());
    }
    case TermKind::Prev:
    case TermKind::BoxI:
    case TermKind::BoxSum: {
      ExplicitSubst sigma;
      sigma.reserve(t.subst().size());
      for (const auto& b : t.subst()) sigma.push_back({b.var, subst_rec(b.term, s)});
      return t.rebuild(t.children(), std::move(sigma));
    }
    default: {
      std::vector<Term> kids;
      kids.reserve(t.children().size());
      for (const auto& k : t.children()) kids.push_back(subst_rec(k, s));
      return t.rebuild(std::move(kids), {});
    }
  }
}

}  // namespace detail

// Simultaneous capture-avoiding substitution. For prev/box/boxp only the
// terms of the explicit substitution are affected; the body is closed by it.
inline Term subst(const Term& t, std::span<const Binding> bindings) {
  ExplicitSubst s(bindings.begin(), bindings.end());
  return detail::subst_rec(t, s);
}

inline Term subst(const Term& t, const std::string& x, const Term& u) {
  Binding b{x, u};
  return subst(t, std::span<const Binding>(&b, 1));
}

// ------------------------------------------------------ alpha-equivalence

namespace detail {

using TermEnv = std::vector<std::pair<std::string, std::string>>;

inline bool opt_type_eq(const std::optional<Type>& a, const std::optional<Type>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || type_alpha_eq(*a, *b);
}

inline bool alpha_rec(const Term& a, const Term& b, TermEnv& env) {
  if (a.id() == b.id() && a.is_closed()) return true;
  if (a.kind() != b.kind()) return false;
  if (!opt_type_eq(a.annotation(), b.annotation())) return false;
  switch (a.kind()) {
    case TermKind::Var:
      for (auto it = env.rbegin(); it != env.rend(); ++it) {
        bool l = it->first == a.name();
        bool r = it->second == b.name();
        if (l || r) return l && r;
      }
      return a.name() == b.name();
    case TermKind::Lam: {
      env.emplace_back(a.name(), b.name());
      bool eq = alpha_rec(a.child(0), b.child(0), env);
      env.pop_back();
      return eq;
    }
    case TermKind::Case: {
      if (!alpha_rec(a.child(0), b.child(0), env)) return false;
      env.emplace_back(a.binder1(), b.binder1());
      bool eq = alpha_rec(a.child(1), b.child(1), env);
      env.pop_back();
      if (!eq) return false;
      env.emplace_back(a.binder2(), b.binder2());
      eq = alpha_rec(a.child(2), b.child(2), env);
      env.pop_back();
      return eq;
    }
    case TermKind::Prev:
    case TermKind::BoxI:
    case TermKind::BoxSum: {
      if (a.subst().size() != b.subst().size()) return false;
      TermEnv inner;
      for (std::size_t i = 0; i < a.subst().size(); ++i) {
        if (!alpha_rec(a.subst()[i].term, b.subst()[i].term, env)) return false;
        inner.emplace_back(a.subst()[i].var, b.subst()[i].var);
      }
      return alpha_rec(a.child(0), b.child(0), inner);
    }
    case TermKind::Prim:
      if (a.name() != b.name()) return false;
      [[fallthrough]];
    default: {
      if (a.children().size() != b.children().size()) return false;
      for (std::size_t i = 0; i < a.children().size(); ++i) {
        if (!alpha_rec(a.child(i), b.child(i), env)) return false;
      }
      return true;
    }
  }
}

}  // namespace detail

// Equality up to consistent renaming of bound term variables, including
// explicit-substitution binders; annotations compared up to type alpha.
inline bool alpha_eq(const Term& a, const Term& b) {
  detail::TermEnv env;
  return detail::alpha_rec(a, b, env);
}

// Number of nodes, counting explicit-substitution terms.
inline std::size_t term_size(const Term& t) {
  std::size_t n = 1;
  for (const auto& k : t.children()) n += term_size(k);
  for (const auto& b : t.subst()) n += term_size(b.term);
  return n;
}

}  // namespace glam
