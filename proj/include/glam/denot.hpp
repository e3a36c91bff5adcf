#pragma once

// Finite-index denotations in the topos of trees. A closed term of type A is
// interpreted at a stage i >= 1 as an element of the i-th set of [[A]].
//
// Representation:
//   Nat, Unit, products, sums   plain data
//   A -> B at stage i           a callable usable at any stage j <= i
//   |>A at stage 1              the single point `*`
//   |>A at stage i+1            an element of A at stage i
//   #A                          a global element, j |-> element at stage j
//   mu a. A                     the representation of its unfolding
// Values of constant types are index invariant, so moving them between
// stages is the identity on the representation.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "glam/error.hpp"
#include "glam/syntax.hpp"

namespace glam {

enum class SemKind { Nat, Unit, Pair, In, Fun, LaterStar, Later, Global };

class SemVal;

namespace detail {
struct SemNode;
struct GlobalCell;
}  // namespace detail

class SemVal {
 public:
  using Fn = std::function<SemVal(unsigned, const SemVal&)>;
  using Family = std::function<SemVal(unsigned)>;

  SemVal() = default;

  static SemVal nat(std::uint64_t n);
  static SemVal unit();
  static SemVal pair(SemVal a, SemVal b);
  static SemVal in(int tag, SemVal v);
  static SemVal fun(unsigned ceiling, Fn fn);
  static SemVal later_star();
  static SemVal later(SemVal inner);
  static SemVal global(Family family);

  explicit operator bool() const { return node_ != nullptr; }
  SemKind kind() const;
  std::uint64_t nat_value() const;
  int tag() const;
  const SemVal& first() const;   // Pair left, In payload, Later inner
  const SemVal& second() const;  // Pair right
  unsigned ceiling() const;
  // Applies a function value at stage j. Stages above the ceiling are
  // clamped, which is sound only for constant types.
  SemVal call(unsigned j, const SemVal& arg) const;
  // Element of a global at stage j, memoized.
  SemVal at(unsigned j) const;
  SemVal with_ceiling(unsigned c) const;
  const void* id() const { return node_.get(); }

 private:
  explicit SemVal(std::shared_ptr<const detail::SemNode> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::SemNode> node_;
};

namespace detail {

struct GlobalCell {
  SemVal::Family family;
  std::mutex mu;
  std::map<unsigned, SemVal> memo;
};

struct SemNode {
  SemKind kind;
  std::uint64_t nat = 0;
  int tag = 0;
  SemVal a, b;
  unsigned ceiling = 0;
  std::shared_ptr<const SemVal::Fn> fn;
  std::shared_ptr<GlobalCell> global;
};

}  // namespace detail

inline SemVal SemVal::nat(std::uint64_t n) {
  auto node = std::make_shared<detail::SemNode>();
  node->kind = SemKind::Nat;
  node->nat = n;
  return SemVal(std::move(node));
}
inline SemVal SemVal::unit() {
  static const SemVal u = [] {
    auto node = std::make_shared<detail::SemNode>();
    node->kind = SemKind::Unit;
    return SemVal(std::move(node));
  }();
  return u;
}
inline SemVal SemVal::pair(SemVal a, SemVal b) {
  auto node = std::make_shared<detail::SemNode>();
  node->kind = SemKind::Pair;
  node->a = std::move(a);
  node->b = std::move(b);
  return SemVal(std::move(node));
}
inline SemVal SemVal::in(int tag, SemVal v) {
  auto node = std::make_shared<detail::SemNode>();
  node->kind = SemKind::In;
  node->tag = tag;
  node->a = std::move(v);
  return SemVal(std::move(node));
}
inline SemVal SemVal::fun(unsigned ceiling, Fn fn) {
  auto node = std::make_shared<detail::SemNode>();
  node->kind = SemKind::Fun;
  node->ceiling = ceiling;
  node->fn = std::make_shared<const Fn>(std::move(fn));
  return SemVal(std::move(node));
}
inline SemVal SemVal::later_star() {
  static const SemVal s = [] {
    auto node = std::make_shared<detail::SemNode>();
    node->kind = SemKind::LaterStar;
    return SemVal(std::move(node));
  }();
  return s;
}
inline SemVal SemVal::later(SemVal inner) {
  auto node = std::make_shared<detail::SemNode>();
  node->kind = SemKind::Later;
  node->a = std::move(inner);
  return SemVal(std::move(node));
}
inline SemVal SemVal::global(Family family) {
  auto node = std::make_shared<detail::SemNode>();
  node->kind = SemKind::Global;
  node->global = std::make_shared<detail::GlobalCell>();
  node->global->family = std::move(family);
  return SemVal(std::move(node));
}

inline SemKind SemVal::kind() const { return node_->kind; }
inline std::uint64_t SemVal::nat_value() const { return node_->nat; }
inline int SemVal::tag() const { return node_->tag; }
inline const SemVal& SemVal::first() const { return node_->a; }
inline const SemVal& SemVal::second() const { return node_->b; }
inline unsigned SemVal::ceiling() const { return node_->ceiling; }

inline SemVal SemVal::call(unsigned j, const SemVal& arg) const {
  if (kind() != SemKind::Fun) throw Error(ErrorCode::SemanticShape, "applying a non-function");
  return (*node_->fn)(std::min(j, node_->ceiling), arg);
}

inline SemVal SemVal::at(unsigned j) const {
  if (kind() != SemKind::Global) throw Error(ErrorCode::SemanticShape, "unboxing a non-global");
  auto& cell = *node_->global;
  {
    std::lock_guard<std::mutex> lock(cell.mu);
    auto it = cell.memo.find(j);
    if (it != cell.memo.end()) return it->second;
  }
  // Computed without the lock: the family may consult other globals.
  SemVal v = cell.family(j);
  std::lock_guard<std::mutex> lock(cell.mu);
  return cell.memo.emplace(j, v).first->second;
}

inline SemVal SemVal::with_ceiling(unsigned c) const {
  if (kind() != SemKind::Fun || c >= ceiling()) return *this;
  auto node = std::make_shared<detail::SemNode>(*node_);
  node->ceiling = c;
  return SemVal(std::move(node));
}

// -------------------------------------------------------------- restriction

// Restriction map of [[a]] from stage i+1 to stage i.
inline SemVal restrict(const Type& a, unsigned i, const SemVal& v) {
  if (i < 1) throw Error(ErrorCode::IndexZero, "restriction to stage 0");
  switch (a.kind()) {
    case TypeKind::Nat:
    case TypeKind::Unit:
    case TypeKind::Void:
    case TypeKind::Box:
    case TypeKind::Var:
      return v;
    case TypeKind::Prod:
      return SemVal::pair(restrict(a.left(), i, v.first()), restrict(a.right(), i, v.second()));
    case TypeKind::Sum:
      return SemVal::in(v.tag(), restrict(v.tag() == 1 ? a.left() : a.right(), i, v.first()));
    case TypeKind::Arrow:
      return v.with_ceiling(i);
    case TypeKind::Later:
      if (i == 1) return SemVal::later_star();
      if (v.kind() != SemKind::Later) throw Error(ErrorCode::SemanticShape, "expected a later value");
      return SemVal::later(restrict(a.body(), i - 1, v.first()));
    case TypeKind::Mu:
      return restrict(unfold_mu(a), i, v);
  }
  return v;
}

// Type-free restriction from stage `from` down to stage `to`, read off the
// representation. Moving up (to > from) is only meaningful for constant
// types, where it is the identity.
inline SemVal restrict_to(const SemVal& v, unsigned from, unsigned to) {
  if (from == to) return v;
  switch (v.kind()) {
    case SemKind::Nat:
    case SemKind::Unit:
    case SemKind::Global:
      return v;
    case SemKind::Pair: {
      SemVal a = restrict_to(v.first(), from, to);
      SemVal b = restrict_to(v.second(), from, to);
      if (a.id() == v.first().id() && b.id() == v.second().id()) return v;
      return SemVal::pair(a, b);
    }
    case SemKind::In: {
      SemVal a = restrict_to(v.first(), from, to);
      if (a.id() == v.first().id()) return v;
      return SemVal::in(v.tag(), a);
    }
    case SemKind::Fun:
      return v.with_ceiling(to);
    case SemKind::LaterStar:
      if (to == 1) return v;
      throw Error(ErrorCode::SemanticShape, "later value used above its stage");
    case SemKind::Later:
      if (to > from) throw Error(ErrorCode::SemanticShape, "later value used above its stage");
      if (to == 1) return SemVal::later_star();
      return SemVal::later(restrict_to(v.first(), from - 1, to - 1));
  }
  return v;
}

// ----------------------------------------------------------------- terms

using SemEnv = std::vector<std::pair<std::string, SemVal>>;

struct DenotOptions {
  unsigned max_depth = 10'000;
};

namespace detail {

struct DenEnvNode {
  std::string name;
  SemVal val;
  unsigned stage;
  std::shared_ptr<const DenEnvNode> next;
};
using DenEnv = std::shared_ptr<const DenEnvNode>;

inline DenEnv bind(DenEnv env, std::string name, SemVal v, unsigned stage) {
  return std::make_shared<const DenEnvNode>(DenEnvNode{std::move(name), std::move(v), stage, std::move(env)});
}

class Denoter : public std::enable_shared_from_this<Denoter> {
 public:
  explicit Denoter(DenotOptions opts) : opts_(opts) {}

  SemVal den(const Term& t, unsigned i, const DenEnv& env) {
    if (i < 1) throw Error(ErrorCode::IndexZero, "denotation at stage 0");
    if (++depth_ > opts_.max_depth) {
      depth_ = 0;
      throw Error(ErrorCode::DepthExceeded,
                  "recursion deeper than " + std::to_string(opts_.max_depth));
    }
    struct Guard {
      unsigned& d;
      ~Guard() {
        if (d) --d;
      }
    } guard{depth_};
    return den_raw(t, i, env);
  }

 private:
  DenotOptions opts_;
  unsigned depth_ = 0;

  static SemVal lookup(const DenEnv& env, const std::string& x, unsigned i) {
    for (const DenEnvNode* n = env.get(); n; n = n->next.get()) {
      if (n->name == x) return restrict_to(n->val, n->stage, i);
    }
    throw Error(ErrorCode::UnboundVariable, "unbound variable '" + x + "' in denotation");
  }

  static void expect(const SemVal& v, SemKind k, const char* what) {
    if (!v || v.kind() != k) throw Error(ErrorCode::SemanticShape, std::string("expected ") + what);
  }

  // Substituted terms are evaluated at stage i and reused at other stages,
  // which their constant types permit.
  DenEnv closing_env(const Term& t, unsigned i, const DenEnv& env) {
    DenEnv inner;
    for (const auto& b : t.subst()) inner = bind(inner, b.var, den(b.term, i, env), i);
    return inner;
  }

  SemVal den_raw(const Term& t, unsigned i, const DenEnv& env) {
    auto self = shared_from_this();
    switch (t.kind()) {
      case TermKind::Var:
        return lookup(env, t.name(), i);
      case TermKind::Zero:
        return SemVal::nat(0);
      case TermKind::Succ: {
        if (auto n = t.as_numeral()) return SemVal::nat(*n);
        SemVal v = den(t.child(0), i, env);
        expect(v, SemKind::Nat, "a number");
        return SemVal::nat(v.nat_value() + 1);
      }
      case TermKind::UnitVal:
        return SemVal::unit();
      case TermKind::Pair:
        return SemVal::pair(den(t.child(0), i, env), den(t.child(1), i, env));
      case TermKind::Proj1:
      case TermKind::Proj2: {
        SemVal v = den(t.child(0), i, env);
        expect(v, SemKind::Pair, "a pair");
        return t.is(TermKind::Proj1) ? v.first() : v.second();
      }
      case TermKind::Abort:
        throw Error(ErrorCode::SemanticShape, "abort has no denotation: Void is empty");
      case TermKind::In1:
        return SemVal::in(1, den(t.child(0), i, env));
      case TermKind::In2:
        return SemVal::in(2, den(t.child(0), i, env));
      case TermKind::Case: {
        SemVal v = den(t.child(0), i, env);
        expect(v, SemKind::In, "an injection");
        if (v.tag() == 1) return den(t.child(1), i, bind(env, t.binder1(), v.first(), i));
        return den(t.child(2), i, bind(env, t.binder2(), v.first(), i));
      }
      case TermKind::Lam: {
        Term body = t.child(0);
        std::string x = t.name();
        return SemVal::fun(i, [self, body, x, env](unsigned j, const SemVal& a) {
          return self->den(body, j, bind(env, x, a, j));
        });
      }
      case TermKind::App: {
        SemVal f = den(t.child(0), i, env);
        expect(f, SemKind::Fun, "a function");
        return f.call(i, den(t.child(1), i, env));
      }
      case TermKind::Fold:
      case TermKind::Unfold:
      case TermKind::Ascribe:
        return den(t.child(0), i, env);
      case TermKind::Next:
        if (i == 1) return SemVal::later_star();
        return SemVal::later(den(t.child(0), i - 1, env));
      case TermKind::LaterApp: {
        if (i == 1) return SemVal::later_star();
        SemVal f = den(t.child(0), i, env);
        SemVal a = den(t.child(1), i, env);
        expect(f, SemKind::Later, "a later function");
        expect(a, SemKind::Later, "a later argument");
        expect(f.first(), SemKind::Fun, "a function under later");
        return SemVal::later(f.first().call(i - 1, a.first()));
      }
      case TermKind::Prev: {
        DenEnv inner = closing_env(t, i, env);
        SemVal v = den(t.child(0), i + 1, inner);
        expect(v, SemKind::Later, "a later value under prev");
        return v.first();
      }
      case TermKind::BoxI: {
        DenEnv inner = closing_env(t, i, env);
        Term body = t.child(0);
        return SemVal::global([self, body, inner](unsigned j) { return self->den(body, j, inner); });
      }
      case TermKind::Unbox: {
        SemVal g = den(t.child(0), i, env);
        expect(g, SemKind::Global, "a global element");
        return g.at(i);
      }
      case TermKind::BoxSum: {
        DenEnv inner = closing_env(t, i, env);
        Term body = t.child(0);
        auto family = std::make_shared<SemVal>(SemVal::global(
            [self, body, inner](unsigned j) { return self->den(body, j, inner); }));
        SemVal first = family->at(1);
        expect(first, SemKind::In, "an injection under boxp");
        int tag = first.tag();
        return SemVal::in(tag, SemVal::global([family, tag](unsigned j) {
                            SemVal v = family->at(j);
                            if (v.kind() != SemKind::In || v.tag() != tag) {
                              throw Error(ErrorCode::SemanticShape, "boxp tag varies with the stage");
                            }
                            return v.first();
                          }));
      }
      case TermKind::Prim: {
        std::vector<std::uint64_t> args;
        for (const auto& a : t.children()) {
          SemVal v = den(a, i, env);
          expect(v, SemKind::Nat, "a number");
          args.push_back(v.nat_value());
        }
        return SemVal::nat(apply_primitive(t.name(), args));
      }
    }
    throw Error(ErrorCode::SemanticShape, "unsupported term");
  }
};

}  // namespace detail

// [[t]]_i(env); env values are taken to be at stage i.
inline SemVal den_term(const Term& t, unsigned i, const SemEnv& env = {},
                       DenotOptions opts = {}) {
  detail::DenEnv e;
  for (const auto& [x, v] : env) e = detail::bind(e, x, v, i);
  auto d = std::make_shared<detail::Denoter>(opts);
  return d->den(t, i, e);
}

inline std::uint64_t den_nat(const Term& t, unsigned i, DenotOptions opts = {}) {
  SemVal v = den_term(t, i, {}, opts);
  if (v.kind() != SemKind::Nat) throw Error(ErrorCode::SemanticShape, "not a number");
  return v.nat_value();
}

// The i-element approximation of a guarded (or boxed) stream.
inline std::vector<std::uint64_t> den_take(const Term& t, unsigned i, DenotOptions opts = {}) {
  SemVal v = den_term(t, i, {}, opts);
  if (v.kind() == SemKind::Global) v = v.at(i);
  std::vector<std::uint64_t> out;
  while (true) {
    if (v.kind() != SemKind::Pair || v.first().kind() != SemKind::Nat) {
      throw Error(ErrorCode::SemanticShape, "not a stream approximation");
    }
    out.push_back(v.first().nat_value());
    const SemVal& rest = v.second();
    if (rest.kind() == SemKind::LaterStar) return out;
    if (rest.kind() != SemKind::Later) throw Error(ErrorCode::SemanticShape, "not a stream tail");
    v = rest.first();
  }
}

// Equality of first-order semantic values; globals are compared at stages
// 1..global_samples. Functions are not comparable and yield false.
inline bool sem_equal(const SemVal& a, const SemVal& b, unsigned global_samples = 4) {
  if (a.id() == b.id()) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case SemKind::Nat: return a.nat_value() == b.nat_value();
    case SemKind::Unit:
    case SemKind::LaterStar: return true;
    case SemKind::Pair:
      return sem_equal(a.first(), b.first(), global_samples) &&
             sem_equal(a.second(), b.second(), global_samples);
    case SemKind::In:
      return a.tag() == b.tag() && sem_equal(a.first(), b.first(), global_samples);
    case SemKind::Later: return sem_equal(a.first(), b.first(), global_samples);
    case SemKind::Global:
      for (unsigned j = 1; j <= global_samples; ++j) {
        if (!sem_equal(a.at(j), b.at(j), global_samples)) return false;
      }
      return true;
    case SemKind::Fun: return false;
  }
  return false;
}

inline std::string show(const SemVal& v) {
  switch (v.kind()) {
    case SemKind::Nat: return std::to_string(v.nat_value());
    case SemKind::Unit: return "()";
    case SemKind::Pair: return "(" + show(v.first()) + ", " + show(v.second()) + ")";
    case SemKind::In: return (v.tag() == 1 ? "inl " : "inr ") + show(v.first());
    case SemKind::Fun: return "<fun>";
    case SemKind::LaterStar: return "*";
    case SemKind::Later: return "next " + show(v.first());
    case SemKind::Global: return "<global>";
  }
  return "?";
}

}  // namespace glam
