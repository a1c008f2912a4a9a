#include <gtest/gtest.h>

#include "ctd/derive.hpp"
#include "ctd/ideality.hpp"
#include "oracle.hpp"

using namespace ctd;

namespace {
const WorldSet W4 = WorldSet::numbered(4);
const WorldSet W5 = WorldSet::numbered(5);

std::vector<std::string> rules_of(const Trace& t) {
  std::vector<std::string> out;
  for (const auto& s : t.steps) out.emplace_back(rule_name(s.rule));
  return out;
}

std::set<oracle::Fact> as_oracle(const Closure& c) {
  std::set<oracle::Fact> out;
  for (const auto& f : c.facts()) out.insert({oracle::from_mask(f.context.mask()), oracle::from_mask(f.obligatory.mask())});
  return out;
}
}  // namespace

TEST(ReplayTheorem1, ChainMatchesProof) {
  const Prop a(W4, 0b1100), b(W4, 0b1010);
  const Trace t = replay_theorem1(a, b);
  ASSERT_EQ(t.size(), 6u);
  EXPECT_EQ(rules_of(t), (std::vector<std::string>{"seed", "R-e", "R-d", "set-identity", "R-e", "R-b"}));
  EXPECT_EQ(t.steps[0].fact, (ObFact{Prop::all(W4), a}));
  EXPECT_EQ(t.steps[1].fact, (ObFact{a | b.complement(), a}));
  EXPECT_EQ(t.steps[2].fact, (ObFact{Prop::all(W4), a | b}));
  EXPECT_EQ(t.steps[3].fact, t.steps[2].fact);
  EXPECT_EQ(t.steps[3].note, "A | ~(A | ~B) = A | B");
  EXPECT_EQ(t.steps[4].fact, (ObFact{a.complement(), a | b}));
  EXPECT_EQ(t.conclusion(), (ObFact{Prop(W4, 0b0011), Prop(W4, 0b1010)}));
  EXPECT_TRUE(validate(t).holds);
}

TEST(ReplayTheorem1, Rendering) {
  const Trace t = replay_theorem1(Prop(W4, 0b1100), Prop(W4, 0b1010));
  const std::string expected =
      "#1: ob({0,1,2,3}) ∋ {2,3}  [seed]\n"
      "#2: ob({0,2,3}) ∋ {2,3}  [R-e; from #1; X={0,1,2,3}, Y={0,2,3}, Z={2,3}]\n"
      "#3: ob({0,1,2,3}) ∋ {1,2,3}  [R-d; from #2; X={0,2,3}, Y={2,3}, Z={0,1,2,3}]\n"
      "#4: ob({0,1,2,3}) ∋ {1,2,3}  [set-identity; from #3; A | ~(A | ~B) = A | B]\n"
      "#5: ob({0,1}) ∋ {1,2,3}  [R-e; from #4; X={0,1,2,3}, Y={0,1}, Z={1,2,3}]\n"
      "#6: ob({0,1}) ∋ {1,3}  [R-b; from #5; X={0,1}, Y={1,2,3}, Z={1,3}]\n";
  EXPECT_EQ(t.render(), expected);
}

TEST(ReplayTheorem1, SecondUniverse) {
  const Trace t = replay_theorem1(Prop(W5, 0b00110), Prop(W5, 0b01100));
  EXPECT_EQ(t.size(), 6u);
  EXPECT_EQ(t.conclusion().context, Prop::of(W5, {"0", "3", "4"}));
  EXPECT_EQ(t.conclusion().obligatory, Prop::of(W5, {"2", "3"}));
  EXPECT_TRUE(validate(t).holds);
}

TEST(ReplayTheorem1, RejectsNonGeneric) {
  const Prop a(W4, 0b1100);
  try {
    replay_theorem1(a, a);
    FAIL();
  } catch (const GenericityError& e) {
    EXPECT_NE(std::string(e.what()).find("A∖B"), std::string::npos);
  }
  EXPECT_THROW(replay_theorem1(Prop(W4, 0b0011), Prop(W4, 0b0111)), GenericityError);
}

TEST(Validate, CatchesTampering) {
  Trace t = replay_theorem1(Prop(W4, 0b1100), Prop(W4, 0b1010));
  Trace bad = t;
  bad.steps[5].fact.obligatory = Prop(W4, 0b0010);
  EXPECT_FALSE(validate(bad).holds);
  bad = t;
  bad.steps[2].premises = {4};
  EXPECT_FALSE(validate(bad).holds);
  bad = t;
  bad.steps[3].fact.obligatory = Prop(W4, 0b1100);
  EXPECT_FALSE(validate(bad).holds);
  EXPECT_TRUE(validate(Trace{}).holds);
}

TEST(Close, TheoremOneConclusionAndCount) {
  const Prop a(W4, 0b1100);
  const Closure c = close({{Prop::all(W4), a}});
  EXPECT_TRUE(c.contains(0b0011, 0b1010));
  // Frozen from oracle::closure.
  EXPECT_EQ(c.size(), 108u);
  EXPECT_EQ(as_oracle(c), oracle::closure({{oracle::world(4), {2, 3}}}, 4));

  const Trace t = c.trace_to({Prop(W4, 0b0011), Prop(W4, 0b1010)});
  EXPECT_TRUE(validate(t).holds);
  EXPECT_LE(t.size(), 6u);
  EXPECT_EQ(t.steps.front().rule, Rule::seed);
}

TEST(Close, EdgeCases) {
  EXPECT_EQ(ctd::close({}, {}, &W4).size(), 0u);
  EXPECT_THROW(ctd::close(std::vector<ObFact>{}), Error);

  const Closure only_b = close({{Prop::all(W4), Prop(W4, 0b1100)}}, RuleSet{true, false, false});
  EXPECT_EQ(only_b.size(), 1u);

  const WorldSet w13 = WorldSet::numbered(13);
  EXPECT_THROW(close({{Prop::all(w13), Prop(w13, 1)}}), SizeGuard);
}

TEST(Close, AgreesWithNaiveFixpoint) {
  std::mt19937_64 rng(3);
  for (int round = 0; round < 40; ++round) {
    const unsigned n = 1 + static_cast<unsigned>(rng() % 4);
    const WorldSet w = WorldSet::numbered(n);
    RuleSet rules{rng() % 2 == 0, rng() % 2 == 0, rng() % 2 == 0};
    std::vector<ObFact> seeds;
    std::set<oracle::Fact> oseeds;
    for (int k = 0; k < 2; ++k) {
      const Mask x = static_cast<Mask>(rng()) & w.full(), y = static_cast<Mask>(rng()) & w.full();
      seeds.push_back({Prop(w, x), Prop(w, y)});
      oseeds.insert({oracle::from_mask(x), oracle::from_mask(y)});
    }
    const Closure c = close(seeds, rules);
    EXPECT_EQ(as_oracle(c), oracle::closure(oseeds, static_cast<int>(n), rules.b, rules.d, rules.e));
    // Soundness: every fact has a valid trace.
    for (const auto& f : c.facts()) ASSERT_TRUE(validate(c.trace_to(f)).holds);
  }
}

TEST(Close, ConclusionIndependentOfB) {
  // Any B generic with A is derivable in ob(¬A) from A ∈ ob(W) alone.
  for (const WorldSet& w : {W4, W5}) {
    for (Mask a = 0; a <= w.full(); ++a) {
      std::optional<Closure> c;
      for (Mask b = 0; b <= w.full(); ++b) {
        if (!mutually_generic(Prop(w, a), Prop(w, b))) continue;
        if (!c) c = close({{Prop::all(w), Prop(w, a)}});
        EXPECT_TRUE(c->contains(w.full() & ~a, b));
      }
    }
  }
}

TEST(CheckAgainstTable, Examples) {
  const Trace t = replay_theorem1(Prop(W4, 0b1100), Prop(W4, 0b1010));
  // Ranking 2 < 0 < 1 < 3: F(W) = {2} ⊆ A; ob_sup fails 5(e), so the chain
  // breaks. First missing step frozen from the oracle.
  const ObFun sup = ob_sup(IdealFun::from_ranking(W4, {2, 0, 1, 3}));
  const Verdict v = check_against_table(t, sup);
  ASSERT_FALSE(v.holds);
  EXPECT_EQ(v.note, "step #5 missing");
  EXPECT_EQ(v.at("context").mask(), 0b0011u);
  EXPECT_EQ(v.at("obligatory").mask(), 0b1110u);

  EXPECT_TRUE(check_against_table(Trace{}, sup).holds);
  ObFun full(W4);
  for (Mask x = 0; x <= W4.full(); ++x) full.family(x) = Family::everything(4);
  EXPECT_TRUE(check_against_table(t, full).holds);
}

// Any table closed under 5(b), 5(d), 5(e) that contains the seed contains
// the whole chain; the closure itself is such a table.
TEST(CheckAgainstTable, ClosedTableContainsConclusion) {
  const Prop a(W4, 0b1100), b(W4, 0b1010);
  const Closure c = close({{Prop::all(W4), a}});
  ObFun ob(W4);
  for (const auto& f : c.facts()) ob.add(f.context.mask(), f.obligatory.mask());
  EXPECT_TRUE(check_5b(ob).holds);
  EXPECT_TRUE(check_5d(ob).holds);
  EXPECT_TRUE(check_5e(ob).holds);
  EXPECT_TRUE(check_against_table(replay_theorem1(a, b), ob).holds);
}
