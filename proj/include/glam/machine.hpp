#pragma once

// Deterministic call-by-name small-step reduction of closed terms, in two
// independent implementations (recursive descent and explicit context
// search), plus evaluation drivers and stream/number observations.

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "glam/error.hpp"
#include "glam/frontend.hpp"
#include "glam/syntax.hpp"

namespace glam {

inline constexpr std::uint64_t kDefaultFuel = 1'000'000;

// GLAM_FUEL overrides the built-in default when set to a positive integer.
inline std::uint64_t default_fuel() {
  if (const char* env = std::getenv("GLAM_FUEL")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultFuel;
}

inline bool is_value(const Term& t) {
  switch (t.kind()) {
    case TermKind::Zero:
    case TermKind::UnitVal:
    case TermKind::Pair:
    case TermKind::In1:
    case TermKind::In2:
    case TermKind::Lam:
    case TermKind::Fold:
    case TermKind::Next:
    case TermKind::BoxI:
      return true;
    case TermKind::Succ:
      return t.as_numeral().has_value();
    default:
      return false;
  }
}

// Removes ascription nodes; annotations stay but reduction never reads them.
inline Term strip_ascriptions(const Term& t) {
  if (!t.has_ascription()) return t;
  std::unordered_map<const void*, Term> memo;
  auto go = [&](auto&& self, const Term& u) -> Term {
    if (!u.has_ascription()) return u;
    auto it = memo.find(u.id());
    if (it != memo.end()) return it->second;
    Term out;
    if (u.is(TermKind::Ascribe)) {
      out = self(self, u.child(0));
    } else {
      std::vector<Term> kids;
      for (const auto& k : u.children()) kids.push_back(self(self, k));
      ExplicitSubst sigma;
      for (const auto& b : u.subst()) sigma.push_back({b.var, self(self, b.term)});
      out = u.rebuild(std::move(kids), std::move(sigma));
    }
    memo.emplace(u.id(), out);
    return out;
  };
  return go(go, t);
}

// Contracts t if t itself is a redex.
inline std::optional<Term> contract(const Term& t) {
  switch (t.kind()) {
    case TermKind::Proj1:
    case TermKind::Proj2:
      if (t.child(0).is(TermKind::Pair)) return t.child(0).child(t.is(TermKind::Proj1) ? 0 : 1);
      return std::nullopt;
    case TermKind::Case: {
      const Term& s = t.child(0);
      if (s.is(TermKind::In1)) return subst(t.child(1), t.binder1(), s.child(0));
      if (s.is(TermKind::In2)) return subst(t.child(2), t.binder2(), s.child(0));
      return std::nullopt;
    }
    case TermKind::App:
      if (t.child(0).is(TermKind::Lam)) {
        const Term& lam = t.child(0);
        return subst(lam.child(0), lam.name(), t.child(1));
      }
      return std::nullopt;
    case TermKind::Unfold:
      if (t.child(0).is(TermKind::Fold)) return t.child(0).child(0);
      return std::nullopt;
    case TermKind::Prev:
      if (!t.subst().empty()) return Term::prev({}, subst(t.child(0), t.subst()));
      if (t.child(0).is(TermKind::Next)) return t.child(0).child(0);
      return std::nullopt;
    case TermKind::LaterApp:
      if (t.child(0).is(TermKind::Next) && t.child(1).is(TermKind::Next)) {
        return Term::next(Term::app(t.child(0).child(0), t.child(1).child(0)));
      }
      return std::nullopt;
    case TermKind::Unbox:
      if (t.child(0).is(TermKind::BoxI)) {
        const Term& b = t.child(0);
        return subst(b.child(0), b.subst());
      }
      return std::nullopt;
    case TermKind::BoxSum: {
      if (!t.subst().empty()) return Term::box_sum({}, subst(t.child(0), t.subst()));
      const Term& body = t.child(0);
      if (body.is(TermKind::In1) || body.is(TermKind::In2)) {
        std::optional<Type> annot = body.annotation();
        Type boxed = annot && annot->is(TypeKind::Sum)
                         ? Type::sum(Type::box(annot->left()), Type::box(annot->right()))
                         : *annot;
        Term inner = Term::box({}, body.child(0));
        return body.is(TermKind::In1) ? Term::in1(boxed, inner) : Term::in2(boxed, inner);
      }
      return std::nullopt;
    }
    case TermKind::Prim: {
      std::vector<std::uint64_t> args;
      for (const auto& a : t.children()) {
        auto n = a.as_numeral();
        if (!n) return std::nullopt;
        args.push_back(*n);
      }
      return Term::numeral(apply_primitive(t.name(), args));
    }
    default:
      return std::nullopt;
  }
}

namespace detail {

inline std::optional<Term> step_rec(const Term& t) {
  if (is_value(t)) return std::nullopt;
  if (auto r = contract(t)) return r;
  auto in_child = [&](std::size_t i) -> std::optional<Term> {
    auto c = step_rec(t.child(i));
    if (!c) return std::nullopt;
    std::vector<Term> kids = t.children();
    kids[i] = *c;
    return t.rebuild(std::move(kids), t.subst());
  };
  switch (t.kind()) {
    case TermKind::Succ:
    case TermKind::Proj1:
    case TermKind::Proj2:
    case TermKind::Case:
    case TermKind::App:
    case TermKind::Unfold:
    case TermKind::Unbox:
      return in_child(0);
    case TermKind::Prev:
    case TermKind::BoxSum:
      // A nonempty substitution was already consumed by contract().
      return in_child(0);
    case TermKind::LaterApp:
      return is_value(t.child(0)) ? in_child(1) : in_child(0);
    case TermKind::Prim:
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (t.child(i).as_numeral()) continue;
        if (is_value(t.child(i))) return std::nullopt;
        return in_child(i);
      }
      return std::nullopt;
    default:
      return std::nullopt;
  }
}

// Index of the child holding the evaluation-context hole, if any.
inline std::optional<std::size_t> hole_of(const Term& t) {
  switch (t.kind()) {
    case TermKind::Succ:
    case TermKind::Proj1:
    case TermKind::Proj2:
    case TermKind::Case:
    case TermKind::App:
    case TermKind::Unfold:
    case TermKind::Unbox:
      return 0;
    case TermKind::Prev:
    case TermKind::BoxSum:
      if (t.subst().empty()) return 0;
      return std::nullopt;
    case TermKind::LaterApp:
      if (!is_value(t.child(0))) return 0;
      return 1;
    case TermKind::Prim: {
      for (std::size_t i = 0; i < t.children().size(); ++i) {
        if (!t.child(i).as_numeral()) return i;
      }
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

}  // namespace detail

// One call-by-name step by structural recursion. Returns nullopt on values
// and on stuck terms.
inline std::optional<Term> step(const Term& t) {
  if (t.has_ascription()) return detail::step_rec(strip_ascriptions(t));
  return detail::step_rec(t);
}

// The same relation, computed by decomposing t = E[r] into an explicit frame
// stack, contracting r, and plugging the result back in.
inline std::optional<Term> step_by_context(const Term& t0) {
  Term t = t0.has_ascription() ? strip_ascriptions(t0) : t0;
  struct Frame {
    Term node;
    std::size_t index;
  };
  std::vector<Frame> frames;
  Term focus = t;
  std::optional<Term> reduct;
  while (true) {
    if (is_value(focus)) return std::nullopt;
    if ((reduct = contract(focus))) break;
    auto hole = detail::hole_of(focus);
    if (!hole) return std::nullopt;
    frames.push_back({focus, *hole});
    Term next = focus.child(*hole);
    focus = next;
  }
  Term plugged = *reduct;
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    std::vector<Term> kids = it->node.children();
    kids[it->index] = plugged;
    plugged = it->node.rebuild(std::move(kids), it->node.subst());
  }
  return plugged;
}

struct EvalOutcome {
  enum class Kind { Value, FuelExhausted, Stuck };
  Kind kind;
  Term term;  // the value, the stuck term, or the last term reached
  std::uint64_t steps;

  bool ok() const { return kind == Kind::Value; }
};

inline EvalOutcome eval(const Term& t0, std::uint64_t fuel = default_fuel()) {
  Term t = strip_ascriptions(t0);
  std::uint64_t steps = 0;
  while (true) {
    if (is_value(t)) return {EvalOutcome::Kind::Value, t, steps};
    if (steps >= fuel) return {EvalOutcome::Kind::FuelExhausted, t, steps};
    auto next = detail::step_rec(t);
    if (!next) return {EvalOutcome::Kind::Stuck, t, steps};
    t = *next;
    ++steps;
  }
}

// Evaluates to a value or throws FuelExhausted / Stuck. `fuel` is decremented
// by the steps taken.
inline Term eval_value(const Term& t, std::uint64_t& fuel) {
  EvalOutcome r = eval(t, fuel);
  fuel -= r.steps;
  switch (r.kind) {
    case EvalOutcome::Kind::Value:
      return r.term;
    case EvalOutcome::Kind::FuelExhausted:
      throw Error(ErrorCode::FuelExhausted,
                  "no value after " + std::to_string(r.steps) + " steps");
    case EvalOutcome::Kind::Stuck:
      throw Error(ErrorCode::Stuck, "stuck at " + pretty(r.term));
  }
  return r.term;
}

inline std::uint64_t observe_nat(const Term& t, std::uint64_t fuel = default_fuel()) {
  Term v = eval_value(t, fuel);
  auto n = v.as_numeral();
  if (!n) throw Error(ErrorCode::NotObservable, "value is not a numeral: " + pretty(v));
  return *n;
}

// First n elements of a closed guarded stream, or of a boxed one.
inline std::vector<std::uint64_t> take_stream(const Term& t, std::size_t n,
                                              std::uint64_t fuel = default_fuel()) {
  std::vector<std::uint64_t> out;
  if (n == 0) return out;
  Term cur = eval_value(t, fuel);
  if (cur.is(TermKind::BoxI)) cur = eval_value(Term::unbox(cur), fuel);
  while (true) {
    if (!cur.is(TermKind::Fold)) {
      throw Error(ErrorCode::NotObservable, "not a stream value: " + pretty(cur));
    }
    Term v = eval_value(Term::proj1(Term::unfold(cur)), fuel);
    auto h = v.as_numeral();
    if (!h) throw Error(ErrorCode::NotObservable, "stream element is not a numeral: " + pretty(v));
    out.push_back(*h);
    if (out.size() == n) return out;
    cur = eval_value(Term::prev({}, Term::proj2(Term::unfold(cur))), fuel);
  }
}

// t, step(t), step(step(t)), ... for at most max_steps steps.
inline std::vector<Term> trace(const Term& t, std::size_t max_steps) {
  std::vector<Term> out{strip_ascriptions(t)};
  while (out.size() <= max_steps) {
    auto next = detail::step_rec(out.back());
    if (!next) break;
    out.push_back(*next);
  }
  return out;
}

}  // namespace glam
