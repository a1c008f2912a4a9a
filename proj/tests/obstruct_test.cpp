#include <gtest/gtest.h>

#include <random>

#include "ctd/ideality.hpp"
#include "ctd/obstruct.hpp"
#include "oracle.hpp"

using namespace ctd;

namespace {

const WorldSet W3 = WorldSet::numbered(3);

IdealFun ranking012() { return IdealFun::from_ranking(W3, {0, 1, 2}); }

ObFun random_ob(std::mt19937_64& rng, const WorldSet& w, unsigned density) {
  ObFun ob(w);
  for (Mask x = 0; x <= w.full(); ++x)
    for (Mask y = 0; y <= w.full(); ++y)
      if (rng() % 100 < density) ob.add(x, y);
  return ob;
}

ObFun full_table(const WorldSet& w) {
  ObFun ob(w);
  for (Mask x = 0; x <= w.full(); ++x) ob.family(x) = Family::everything(w.size());
  return ob;
}

}  // namespace

TEST(Check5a, Examples) {
  const ObFun sup = ob_sup(ranking012());
  EXPECT_TRUE(check_5a(sup, true).holds);
  const Verdict v = check_5a(sup, false);
  ASSERT_FALSE(v.holds);
  EXPECT_TRUE(v.at("X").is_empty());

  EXPECT_TRUE(check_5a(ObFun(W3), false).holds);

  ObFun bad(W3);
  bad.add(W3.full(), 0);
  const Verdict b = check_5a(bad);
  ASSERT_FALSE(b.holds);
  EXPECT_EQ(b.at("X"), Prop::all(W3));
}

TEST(Check5b, Examples) {
  EXPECT_TRUE(check_5b(ob_sup(ranking012())).holds);
  EXPECT_TRUE(check_5b(full_table(W3)).holds);

  // ob({0}) = {{0}} only: {0,1} has the same trace on {0} but is missing.
  ObFun ob(W3);
  ob.add(0b001, 0b001);
  const Verdict v = check_5b(ob);
  ASSERT_FALSE(v.holds);
  EXPECT_TRUE(violates(ob, Condition::c5b, v));
  EXPECT_EQ(v.at("X").mask(), 0b001u);
  EXPECT_EQ(v.at("Y").mask(), 0b001u);
  EXPECT_EQ(v.at("Z").mask(), 0b011u);
}

TEST(Check5c, Examples) {
  EXPECT_TRUE(check_5c(ob_cap(ranking012())).holds);
  EXPECT_TRUE(check_5c(ob_sup(ranking012())).holds);

  const WorldSet w2 = WorldSet::numbered(2);
  ObFun ob(w2);
  ob.add(0b11, 0b01);
  ob.add(0b11, 0b10);
  const Verdict v = check_5c(ob);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.at("Y").mask(), 0b01u);
  EXPECT_EQ(v.at("Z").mask(), 0b10u);
}

TEST(Check5c, CapHoldsForEveryFAtThreeWorlds) {
  for (std::uint64_t code = 0; code < (1u << 12); code += 7) {
    std::vector<Mask> t(8);
    std::uint64_t c = code;
    for (Mask x = 0; x < 8; ++x) {
      t[x] = static_cast<Mask>(c) & x;
      c >>= popcount(x);
    }
    EXPECT_TRUE(check_5c(ob_cap(IdealFun(W3, t))).holds);
  }
}

TEST(Check5d, Examples) {
  EXPECT_TRUE(check_5d(ob_sup(ranking012())).holds);
  EXPECT_TRUE(check_5d(full_table(W3)).holds);

  const ObFun cap = ob_cap(ranking012());
  const Verdict v = check_5d(cap);
  ASSERT_FALSE(v.holds);
  // Lexicographically least witness, frozen from oracle::witness_5d.
  EXPECT_EQ(v.at("X").mask(), 0u);
  EXPECT_EQ(v.at("Y").mask(), 0u);
  EXPECT_EQ(v.at("Z").mask(), 0b011u);
  // The non-degenerate instance X={1}, Y={1}, Z=W is also a violation:
  // (W∖{1}) ∪ {1} = W, but W ∩ W ≠ F(W) = {0}.
  EXPECT_TRUE(violates(cap, Condition::c5d, 0b010, 0b010, 0b111));
}

TEST(Check5e, Examples) {
  EXPECT_TRUE(check_5e(ob_cap(ranking012())).holds);
  EXPECT_TRUE(check_5e(ObFun(W3)).holds);

  const WorldSet abc({"a", "b", "c"});
  const Verdict v = check_5e(ob_sup(IdealFun::from_ranking(abc, {0, 1, 2})));
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.at("X"), Prop::all(abc));
  EXPECT_EQ(v.at("Y"), Prop::of(abc, {"b", "c"}));
  EXPECT_EQ(v.at("Z"), Prop::of(abc, {"a", "c"}));
}

TEST(CheckAll, FixedOrderAndCustomSlot) {
  const ObFun ob = ob_sup(ranking012());
  const std::vector<Condition> sel{Condition::c5e, Condition::c5a, Condition::c5c};
  const CustomCondition nonempty{"c*-stand-in", [](Mask x, const Family& fam, unsigned) {
                                   return x == 0 || !fam.empty();
                                 }};
  const auto out = check_all(ob, sel, true, {nonempty});
  ASSERT_EQ(out.size(), 4u);
  EXPECT_EQ(out[0].condition, "5a");
  EXPECT_EQ(out[1].condition, "5c");
  EXPECT_EQ(out[2].condition, "5e");
  EXPECT_EQ(out[3].condition, "c*-stand-in");
  EXPECT_TRUE(out[3].holds);

  const auto custom = check_custom(ObFun(W3), nonempty);
  ASSERT_FALSE(custom.holds);
  EXPECT_EQ(custom.at("X").mask(), 1u);
}

TEST(Checks, EmptyTablePassesEverything) {
  for (unsigned n = 1; n <= 4; ++n) {
    const ObFun empty(WorldSet::numbered(n));
    for (Condition c : kAllConditions) EXPECT_TRUE(check(empty, c, false).holds) << condition_name(c);
  }
}

// Random tables: verdicts and lex-least witnesses agree with the set-based
// oracle, and every witness re-validates.
TEST(Checks, AgreeWithOracleOnRandomTables) {
  std::mt19937_64 rng(2024);
  for (int round = 0; round < 400; ++round) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 3);
    const WorldSet w = WorldSet::numbered(n);
    const unsigned density = static_cast<unsigned>(rng() % 100);
    const ObFun ob = round % 3 == 0 ? ob_sup(IdealFun(w, [&] {
      std::vector<Mask> t(w.context_count());
      for (auto& m : t) m = static_cast<Mask>(rng()) & w.full();
      return t;
    }())) : random_ob(rng, w, density);
    const oracle::Ob o = oracle::from_table(ob);

    auto expect_triple = [&](Condition c, const std::optional<oracle::Triple>& want) {
      const Verdict v = check(ob, c);
      ASSERT_EQ(v.holds, !want.has_value()) << condition_name(c);
      if (!want) return;
      EXPECT_TRUE(violates(ob, c, v));
      EXPECT_EQ(v.at("X").mask(), oracle::to_mask(std::get<0>(*want)));
      EXPECT_EQ(v.at("Y").mask(), oracle::to_mask(std::get<1>(*want)));
      EXPECT_EQ(v.at("Z").mask(), oracle::to_mask(std::get<2>(*want)));
    };
    expect_triple(Condition::c5b, oracle::witness_5b(o));
    expect_triple(Condition::c5c, oracle::witness_5c(o));
    expect_triple(Condition::c5d, oracle::witness_5d(o));
    expect_triple(Condition::c5e, oracle::witness_5e(o));
    for (bool ne : {true, false}) {
      const Verdict v = check_5a(ob, ne);
      const auto want = oracle::witness_5a(o, ne);
      ASSERT_EQ(v.holds, !want.has_value());
      if (want) {
        EXPECT_EQ(v.at("X").mask(), oracle::to_mask(*want));
      }
    }
  }
}
