#include <gtest/gtest.h>

#include "support.hpp"

using namespace glam;
using namespace glam::testing;

namespace {

using Nats = std::vector<std::uint64_t>;

Term closed(std::string_view text) { return elab(text).first; }

ErrorCode check_fails(std::string_view def) {
  try {
    check_program(parse_program(def, &load_prelude()));
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << def;
  return ErrorCode::IoError;
}

}  // namespace

TEST(Prelude, LoadsAndChecks) {
  const Program& p = load_prelude();
  EXPECT_GE(p.defs.size(), 30u);
  EXPECT_NO_THROW(checked_prelude());
  EXPECT_EQ(prelude_source(), read_file(GLAM_SOURCE_DIR "/prelude.gl"));
}

TEST(Prelude, LoadFromPath) {
  Program p = load_prelude_from(GLAM_SOURCE_DIR "/prelude.gl");
  EXPECT_EQ(p.defs.size(), load_prelude().defs.size());
  EXPECT_THROW(load_prelude_from(GLAM_SOURCE_DIR "/no/such/prelude.gl"), Error);
}

TEST(Prelude, PinnedTypes) {
  Scope scope = Scope::of(load_prelude());
  for (const auto& [name, type] : pinned_prelude_types()) {
    const Definition* d = load_prelude().find(name);
    ASSERT_NE(d, nullptr) << name;
    EXPECT_TRUE(type_alpha_eq(d->type, parse_type(type, &scope))) << name;
    EXPECT_TRUE(type_alpha_eq(infer({}, prelude_term(name)), d->type)) << name;
  }
}

TEST(Prelude, Aliases) {
  Scope scope = Scope::of(load_prelude());
  auto is = [&](const char* alias, const char* type) {
    return type_alpha_eq(*&load_prelude().find_alias(alias)->type, parse_type(type));
  };
  EXPECT_TRUE(is("GStr", "mu a. Nat * |>a"));
  EXPECT_TRUE(is("Str", "#(mu a. Nat * |>a)"));
  EXPECT_TRUE(is("GCoNat", "mu a. Unit + |>a"));
  EXPECT_TRUE(is("CoNat", "#(mu a. Unit + |>a)"));
  EXPECT_TRUE(is_constant(scope.types.at("Str")));
  EXPECT_FALSE(is_constant(scope.types.at("GStr")));
}

TEST(Prelude, Examples) {
  EXPECT_EQ(pretty(load_prelude().find("interleave")->type), "(mu a. Nat * |>a) -> |>(mu a. Nat * |>a) -> mu a. Nat * |>a");
  EXPECT_TRUE(type_alpha_eq(load_prelude().find("pred")->type,
                            Type::arrow(named_type("CoNat"), Type::sum(Type::unit(), named_type("CoNat")))));
}

TEST(Prelude, Streams) {
  EXPECT_EQ(take_stream(prelude_term("zeros"), 5), (Nats{0, 0, 0, 0, 0}));
  EXPECT_EQ(take_stream(closed("map succF zeros"), 4), (Nats{1, 1, 1, 1}));
  EXPECT_EQ(take_stream(prelude_term("toggle"), 6), tabulate(6, toggle_at));
  EXPECT_EQ(take_stream(prelude_term("paperfolds"), 32), tabulate(32, paperfolds_at));
  EXPECT_EQ(take_stream(closed("interleave zeros (next toggle)"), 6), (Nats{0, 1, 0, 0, 0, 1}));
  EXPECT_EQ(take_stream(closed("interleave' nats zeros"), 6), (Nats{0, 0, 1, 0, 2, 0}));
  EXPECT_EQ(take_stream(closed("initial (\\p: Nat * |>GStr. cons (succ (fst p)) (snd p)) nats"), 4),
            (Nats{1, 2, 3, 4}));
  EXPECT_EQ(take_stream(closed("final (\\s: GStr. (head s, tail s)) paperfolds"), 8), tabulate(8, paperfolds_at));
  EXPECT_EQ(take_stream(closed("gplus nats nats"), 5), (Nats{0, 2, 4, 6, 8}));
}

TEST(Prelude, GuardedAccessors) {
  EXPECT_EQ(observe_nat(closed("prev. gsecond nats")), 1u);
  EXPECT_EQ(observe_nat(closed("prev. prev. gthird nats")), 2u);
}

TEST(Prelude, CoinductiveStreams) {
  EXPECT_EQ(observe_nat(closed("coHead (coCons 7 (box. zeros))")), 7u);
  EXPECT_EQ(take_stream(closed("coCons 7 (box. toggle)"), 4), (Nats{7, 1, 0, 1}));
  EXPECT_EQ(take_stream(closed("coTail (box. nats)"), 3), (Nats{1, 2, 3}));
  EXPECT_EQ(observe_nat(closed("second (box. nats)")), 1u);
  EXPECT_EQ(take_stream(closed("every2nd (box. nats)"), 5), (Nats{0, 2, 4, 6, 8}));
  EXPECT_EQ(take_stream(closed("every2ndStr (box. paperfolds)"), 8),
            tabulate(8, [](std::uint64_t n) { return paperfolds_at(2 * n); }));
  EXPECT_EQ(take_stream(closed("diag rows"), 4), (Nats{0, 2, 4, 6}));
  EXPECT_EQ(take_stream(closed("join rows"), 4), (Nats{0, 2, 4, 6}));
  EXPECT_EQ(take_stream(closed("L (box. map succF) (box. toggle)"), 4), (Nats{2, 1, 2, 1}));
  EXPECT_EQ(take_stream(closed("L2 (box. gplus) (box. nats) (box. toggle)"), 4), (Nats{1, 1, 3, 3}));
}

TEST(Prelude, MapConstIsBoxedMap) {
  TermGen g(61);
  for (int k = 0; k < 20; ++k) {
    std::string f = pretty(g.gen(Type::arrow(Type::nat(), Type::nat()), {}, 2));
    for (const char* s : {"nats", "paperfolds"}) {
      std::string lhs = "mapConst (" + f + ") (box. " + s + ")";
      std::string rhs = "box. map (" + f + ") " + s;
      EXPECT_EQ(take_stream(closed(lhs), 6), take_stream(closed(rhs), 6)) << lhs;
    }
  }
}

TEST(Prelude, IterateVariantsAgree) {
  TermGen g(62);
  for (int k = 0; k < 40; ++k) {
    Term f = elaborate({}, g.gen(Type::arrow(Type::nat(), Type::nat()), {}, 3), Type::arrow(Type::nat(), Type::nat()));
    Term x = elaborate({}, g.nat(3), Type::nat());
    Term primed = Term::app(Term::app(prelude_term("iterate'"), f), x);
    Term plain = Term::app(Term::app(prelude_term("iterate"), Term::next(f)), x);
    EXPECT_EQ(take_stream(primed, 5), take_stream(plain, 5)) << pretty(f);
  }
}

TEST(Prelude, Conaturals) {
  EXPECT_EQ(observe(closed("pred (box. cozero)"), parse_type("Unit + Unit"), 0).substr(0, 3), "inl");
  Type result = Type::sum(Type::unit(), named_type("CoNat"));
  EXPECT_EQ(observe(closed("pred (box. cosucc (cosucc cozero))"), result, 4),
            "inr box fold inr next fold inl ()");
  EXPECT_EQ(observe(closed("gpred infinity"), Type::sum(Type::unit(), Type::later(named_type("GCoNat"))), 2),
            "inr next fold inr next fold inr *");
}

TEST(Prelude, ThueMorseAndFibonacci) {
  EXPECT_EQ(take_stream(closed("bits thuemorse"), 32), tabulate(32, thue_morse_at));
  EXPECT_EQ(take_stream(closed("bits fibonacci"), 32), fibonacci_word(32));
}

TEST(Prelude, IllTypedCorpus) {
  EXPECT_EQ(check_fails("def paperfolds' : GStr = fix[GStr] \\s. interleave' s toggle;"), ErrorCode::TypeMismatch);
  EXPECT_EQ(check_fails("def circular : GStr = fix[GStr] \\s. s;"), ErrorCode::TypeMismatch);
  // the direct transcriptions of thue-morse and the fibonacci word, with
  // the recursive tail demanded now
  EXPECT_EQ(check_fails("def tm : BStr = fix[BStr] \\t. bcons ff (next (bcons tt (next tmStep <*> btail t)));"),
            ErrorCode::TypeMismatch);
  EXPECT_EQ(check_fails("def fib : BStr = fix[BStr] \\t. bcons ff (next (fibStep t));"), ErrorCode::TypeMismatch);
  EXPECT_EQ(check_fails("def early : GStr -> Nat = \\s. prev{u <- s}. gsecond u;"), ErrorCode::NonConstantSubstType);
  EXPECT_EQ(check_fails("type Bad = mu a. #(|>a);"), ErrorCode::OpenBox);
  EXPECT_EQ(check_fails("type Bad2 = mu a. |>(#a); def x : Nat = 0;"), ErrorCode::OpenBox);
}
