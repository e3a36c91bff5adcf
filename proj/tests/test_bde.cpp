#include <gtest/gtest.h>

#include "support.hpp"

using namespace glam;
using namespace glam::testing;

namespace {

using Nats = std::vector<std::uint64_t>;

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorCode::IoError;
}

const std::vector<BdeDef>& shipped() {
  static const std::vector<BdeDef> defs = load_bde(read_file(GLAM_SOURCE_DIR "/programs/streams.bde"));
  return defs;
}

// Argument streams, as guarded terms and as host functions of the index.
struct Arg {
  const char* term;
  std::function<std::uint64_t(std::uint64_t)> at;
};

const std::vector<Arg>& args() {
  static const std::vector<Arg> a{
      {"zeros", [](std::uint64_t) { return std::uint64_t{0}; }},
      {"toggle", toggle_at},
      {"nats", [](std::uint64_t n) { return n; }},
  };
  return a;
}

Term apply_compiled(const Term& f, const std::vector<const Arg*>& xs) {
  Term t = f;
  for (const Arg* a : xs) t = Term::app(t, elab(a->term).first);
  return t;
}

std::vector<HostStream> host_args(const std::vector<const Arg*>& xs) {
  std::vector<HostStream> out;
  for (const Arg* a : xs) out.push_back(HostStream::generate(a->at));
  return out;
}

// All argument tuples of length k.
std::vector<std::vector<const Arg*>> tuples(unsigned k) {
  std::vector<std::vector<const Arg*>> out{{}};
  for (unsigned n = 0; n < k; ++n) {
    std::vector<std::vector<const Arg*>> next;
    for (const auto& t : out) {
      for (const auto& a : args()) {
        auto u = t;
        u.push_back(&a);
        next.push_back(u);
      }
    }
    out = next;
  }
  return out;
}

Nats convolution(const Nats& a, const Nats& b) {
  Nats c(a.size(), 0);
  for (std::size_t n = 0; n < a.size(); ++n) {
    for (std::size_t i = 0; i <= n; ++i) c[n] += a[i] * b[n - i];
  }
  return c;
}

}  // namespace

TEST(ParseBde, Examples) {
  auto zeros = parse_bde("bde zeros(0) { head = 0; tail = zeros; }");
  ASSERT_EQ(zeros.size(), 1u);
  EXPECT_EQ(zeros[0].arity, 0u);
  EXPECT_EQ(zeros[0].head.kind, HeadExpr::Kind::Num);
  EXPECT_EQ(zeros[0].tail.name, "zeros");

  auto plus = parse_bde("bde plus(2) { head = x1 + x2; tail = plus(z1, z2); }");
  EXPECT_EQ(plus[0].head.kind, HeadExpr::Kind::Add);
  ASSERT_EQ(plus[0].tail.args.size(), 2u);
  EXPECT_EQ(plus[0].tail.args[1].kind, TailExpr::Kind::Z);
  EXPECT_EQ(plus[0].tail.args[1].index, 2u);

  auto times = parse_bde(
      "bde plus(2) { head = x1 + x2; tail = plus(z1, z2); }\n"
      "bde times(2) { head = x1 * x2; tail = plus(times(z1, y2), times(x1, z2)); }");
  ASSERT_EQ(times.size(), 2u);
  EXPECT_EQ(times[1].head.kind, HeadExpr::Kind::Mul);
  EXPECT_EQ(times[1].tail.name, "plus");
  EXPECT_NO_THROW(validate_bde(times));
}

TEST(ParseBde, InfixTailOperatorsNameEarlierBdes) {
  auto defs = parse_bde(
      "bde plus(2) { head = x1 + x2; tail = plus(z1, z2); }\n"
      "bde times(2) { head = x1 * x2; tail = times(z1, y2) + x1 * z2; }");
  const TailExpr& t = defs[1].tail;
  EXPECT_EQ(t.name, "plus");
  EXPECT_EQ(t.args[0].name, "times");
  EXPECT_EQ(t.args[1].name, "times");
  EXPECT_EQ(t.args[1].args[0].kind, TailExpr::Kind::X);
}

TEST(ParseBde, SyntaxErrors) {
  EXPECT_EQ(code_of([] { parse_bde("bde f(1) { head = x1 }"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_bde("bde f(1) { head = x1; tail = 3; }"); }), ErrorCode::SyntaxError);
  EXPECT_EQ(code_of([] { parse_bde("def f : Nat = 0;"); }), ErrorCode::SyntaxError);
}

TEST(ValidateBde, Errors) {
  EXPECT_EQ(code_of([] { load_bde("bde f(3) { head = x1; tail = f(z1, z2, w3); }"); }), ErrorCode::BadVariable);
  EXPECT_EQ(code_of([] { load_bde("bde f(1) { head = x2; tail = f(z1); }"); }), ErrorCode::BadVariable);
  EXPECT_EQ(code_of([] { load_bde("bde f(1) { head = x1; tail = f(y4); }"); }), ErrorCode::BadVariable);
  EXPECT_EQ(code_of([] {
              load_bde("bde f(1) { head = x1; tail = g(z1); }\n"
                       "bde g(1) { head = x1; tail = g(z1); }");
            }),
            ErrorCode::ForwardReference);
  EXPECT_EQ(code_of([] { load_bde("bde f(1) { head = x1; tail = nothere(z1); }"); }), ErrorCode::UnknownSymbol);
  EXPECT_EQ(code_of([] { load_bde("bde f(1) { head = x1; tail = f(z1, z1); }"); }), ErrorCode::ArityError);
  EXPECT_EQ(code_of([] {
              load_bde("bde f(0) { head = 0; tail = f; }\n"
                       "bde f(0) { head = 1; tail = f; }");
            }),
            ErrorCode::DuplicateName);
  EXPECT_NO_THROW(load_bde("bde plus(2) { head = x1 + x2; tail = plus(z1, z2); }"));
}

TEST(CompileBde, ZerosIsThePreludeZeros) {
  CompiledBde c = compile_bde(shipped(), "zeros");
  EXPECT_TRUE(alpha_eq(c.guarded, load_prelude().find("zeros")->body));
  EXPECT_TRUE(alpha_eq(elaborate({}, c.guarded, c.guarded_type), prelude_term("zeros")));
  EXPECT_TRUE(type_alpha_eq(c.guarded_type, named_type("GStr")));
  EXPECT_TRUE(type_alpha_eq(c.lifted_type, named_type("Str")));
}

TEST(CompileBde, TypesOfEveryShippedBde) {
  for (const auto& d : shipped()) {
    CompiledBde c = compile_bde(shipped(), d.name);
    Type g = named_type("GStr"), s = named_type("Str");
    for (unsigned n = 0; n < d.arity; ++n) {
      g = Type::arrow(named_type("GStr"), g);
      s = Type::arrow(named_type("Str"), s);
    }
    EXPECT_TRUE(type_alpha_eq(c.guarded_type, g)) << d.name;
    EXPECT_TRUE(type_alpha_eq(c.lifted_type, s)) << d.name;
    EXPECT_TRUE(type_alpha_eq(infer({}, c.guarded), g)) << d.name;
    EXPECT_TRUE(type_alpha_eq(infer({}, c.lifted), s)) << d.name;
  }
}

TEST(CompileBde, PlusAndTimesOnToggle) {
  Arg toggle{"toggle", toggle_at};
  Term plus = apply_compiled(compile_bde(shipped(), "plus").guarded, {&toggle, &toggle});
  EXPECT_EQ(take_stream(plus, 6), (Nats{2, 0, 2, 0, 2, 0}));
  Term times = apply_compiled(compile_bde(shipped(), "times").guarded, {&toggle, &toggle});
  EXPECT_EQ(take_stream(times, 6), (Nats{1, 0, 2, 0, 3, 0}));
  EXPECT_EQ(take_stream(times, 6), convolution(tabulate(6, toggle_at), tabulate(6, toggle_at)));
}

TEST(CompileBde, ArityThreeLifting) {
  auto defs = load_bde(
      "bde plus(2) { head = x1 + x2; tail = plus(z1, z2); }\n"
      "bde sum3(3) { head = x1 + x2 + x3; tail = plus(plus(z1, z2), z3); }");
  CompiledBde c = compile_bde(defs, "sum3");
  Type s = named_type("Str");
  EXPECT_TRUE(type_alpha_eq(infer({}, c.lifted), Type::arrow(s, Type::arrow(s, Type::arrow(s, s)))));
  Term applied = Term::app(Term::app(Term::app(c.lifted, elab("box. toggle").first), elab("box. nats").first),
                           elab("box. nats").first);
  EXPECT_EQ(take_stream(applied, 6), (Nats{1, 2, 5, 6, 9, 10}));
}

TEST(CompileBde, LiftedAgreesWithGuarded) {
  Term lifted = compile_bde(shipped(), "times").lifted;
  Term applied = Term::app(Term::app(lifted, elab("box. toggle").first), elab("box. nats").first);
  Arg toggle{"toggle", toggle_at}, nats{"nats", [](std::uint64_t n) { return n; }};
  Term guarded = apply_compiled(compile_bde(shipped(), "times").guarded, {&toggle, &nats});
  EXPECT_EQ(take_stream(applied, 8), take_stream(guarded, 8));
}

TEST(Oracle, Examples) {
  EXPECT_EQ(oracle_eval(shipped(), "zeros", {}, 3), (Nats{0, 0, 0}));
  auto toggle = HostStream::generate(toggle_at);
  EXPECT_EQ(oracle_eval(shipped(), "plus", {toggle, toggle}, 4), (Nats{2, 0, 2, 0}));
  EXPECT_EQ(oracle_eval(shipped(), "times", {toggle, toggle}, 5), (Nats{1, 0, 2, 0, 3}));
  EXPECT_EQ(oracle_eval(shipped(), "nats", {}, 6), (Nats{0, 1, 2, 3, 4, 5}));
  EXPECT_EQ(oracle_eval(shipped(), "three", {}, 3), (Nats{3, 0, 0}));
}

TEST(Oracle, AgainstClosedForms) {
  auto nats = HostStream::generate([](std::uint64_t n) { return n; });
  Nats n12 = tabulate(12, [](std::uint64_t n) { return n; });
  EXPECT_EQ(oracle_eval(shipped(), "times", {nats, nats}, 12), convolution(n12, n12));
  auto ones = HostStream::constant(1);
  EXPECT_EQ(oracle_eval(shipped(), "times", {ones, ones}, 8), tabulate(8, [](std::uint64_t n) { return n + 1; }));
}

TEST(HostStreams, Memoized) {
  unsigned calls = 0;
  auto s = HostStream::generate([&](std::uint64_t n) {
    ++calls;
    return n * n;
  });
  EXPECT_EQ(s.take(5), (Nats{0, 1, 4, 9, 16}));
  unsigned after = calls;
  EXPECT_EQ(s.take(5), (Nats{0, 1, 4, 9, 16}));
  EXPECT_EQ(calls, after);
  EXPECT_EQ(code_of([] { HostStream::prefix({1, 2}).take(3); }), ErrorCode::NotObservable);
}

// --------------------------------------------------------------- properties

TEST(BdeProperty, CompiledAgreesWithOracle) {
  for (const auto& d : shipped()) {
    CompiledBde c = compile_bde(shipped(), d.name);
    for (const auto& tuple : tuples(d.arity)) {
      EXPECT_EQ(take_stream(apply_compiled(c.guarded, tuple), 10), oracle_eval(shipped(), d.name, host_args(tuple), 10))
          << d.name;
    }
  }
}

TEST(BdeProperty, UnfoldingLaw) {
  for (const auto& d : shipped()) {
    CompiledBde c = compile_bde(shipped(), d.name);
    Term fix = strip_ascriptions(c.guarded);
    ASSERT_TRUE(fix.is(TermKind::App) && match_fix(fix.child(0))) << d.name;
    Term unfolded = Term::app(fix.child(1), Term::next(fix));
    for (const auto& tuple : tuples(d.arity)) {
      EXPECT_EQ(take_stream(apply_compiled(fix, tuple), 5), take_stream(apply_compiled(unfolded, tuple), 5)) << d.name;
    }
  }
}
