#include <gtest/gtest.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "diamond/error.hpp"
#include "diamond/guessing.hpp"
#include "diamond/probability.hpp"
#include "diamond/pseudo_tree.hpp"
#include "support/oracles.hpp"

using namespace diamond;

namespace {

LevelMap levels_of(const std::map<std::uint64_t, std::vector<std::string>>& text) {
  std::map<std::uint64_t, std::vector<BitString>> raw;
  for (const auto& [n, strings] : text) {
    for (const auto& s : strings) raw[n].push_back(BitString::parse(s));
  }
  return LevelMap(std::move(raw));
}

// A_n = every string of length f(n).
GuessingStructure full_structure(const FuncSpec& f, std::uint64_t horizon) {
  std::map<std::uint64_t, std::vector<BitString>> raw;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << f(n)); ++w) raw[n].push_back(BitString::from_word(w, f(n)));
  }
  return GuessingStructure(FuncSpec::parse("pow2(" + f.str() + ")"), f, horizon, LevelMap(std::move(raw)));
}

SetWindow random_subject(std::mt19937_64& rng, std::uint64_t h) {
  SetWindow w(h);
  for (std::uint64_t i = 0; i < h; ++i) {
    if (rng() & 1) w.set(i);
  }
  return w;
}

}  // namespace

TEST(LevelMap, SortsDeduplicatesDropsEmpty) {
  const LevelMap m = levels_of({{2, {"11", "01", "11"}}, {3, {}}});
  EXPECT_EQ(m.levels().size(), 1u);
  ASSERT_EQ(m.size_at(2), 2u);
  EXPECT_EQ(m.at(2)[0].str(), "01");
  EXPECT_EQ(m.at(3).size(), 0u);
  EXPECT_TRUE(m.contains(2, BitString::parse("11").view()));
  EXPECT_FALSE(m.contains(2, BitString::parse("10").view()));
  EXPECT_EQ(m.highest(), 2u);
  EXPECT_EQ(m.node_count(), 2u);
}

TEST(GuessingStructure, Validates) {
  const FuncSpec id;
  EXPECT_THROW(GuessingStructure(FuncSpec::constant(1), id, 4, levels_of({{2, {"00", "01"}}})), PreconditionError);
  EXPECT_THROW(GuessingStructure(FuncSpec::constant(2), id, 4, levels_of({{2, {"0"}}})), PreconditionError);
  EXPECT_THROW(GuessingStructure(FuncSpec::constant(2), id, 2, levels_of({{2, {"00"}}})), HorizonError);
  const GuessingStructure g(FuncSpec::constant(2), id, 4, levels_of({{2, {"00", "01", "00"}}}));
  EXPECT_EQ(g.level(2).size(), 2u);
  EXPECT_EQ(g.max_length(), 3u);
}

TEST(GuessLevels, FullPowerSetGuessesEverything) {
  const GuessingStructure g = full_structure(FuncSpec(), 10);
  std::mt19937_64 rng(1);
  for (int t = 0; t < 20; ++t) {
    EXPECT_EQ(guess_levels(g, random_subject(rng, 10)).hits, SetWindow::full(10));
  }
}

TEST(GuessLevels, EmptyStructureGuessesNothing) {
  const GuessingStructure g(FuncSpec(), FuncSpec(), 10, LevelMap());
  EXPECT_TRUE(guess_levels(g, SetWindow::full(10)).hits.empty());
  EXPECT_THROW(guess_levels(g, SetWindow(8)), HorizonError);
}

TEST(GuessLevels, ZeroSubjectHitsFirstBranchingLevel) {
  const SplittingTree t = construct_splitting_tree(FuncSpec::parse("ruler"), 6, 1 << 20);
  const GuessingStructure g = to_guessing_structure(t.tree);
  const GuessSet s = guess_levels(g, SetWindow(g.horizon()));
  EXPECT_TRUE(s.hits.test(3));
}

// Property: hits agree with a dense-string membership oracle.
TEST(GuessLevels, MatchesDenseOracle) {
  const GuessingStructure g = random_structure(FuncSpec::parse("add(id,1)"), FuncSpec::parse("min(id,6)"), 24, 9);
  std::map<std::uint64_t, std::vector<std::string>> dense;
  for (const Level& level : g.levels().levels()) {
    for (const auto& s : level.nodes) dense[level.index].push_back(s.str());
  }
  std::mt19937_64 rng(4);
  for (int t = 0; t < 200; ++t) {
    const SetWindow x = random_subject(rng, 24);
    const auto xs = oracle::dense(x);
    const SetWindow hits = guess_levels(g, x).hits;
    for (std::uint64_t n = 0; n < 24; ++n) {
      EXPECT_EQ(hits.test(n), oracle::guessed(xs, g.f()(n), dense[n])) << n;
    }
  }
}

TEST(RestrictGuessing, SameFunctionIsIdentity) {
  const GuessingStructure g = random_structure(FuncSpec::parse("id"), FuncSpec::parse("id"), 12, 3);
  EXPECT_EQ(restrict_guessing(g, g.f()), g);
}

TEST(RestrictGuessing, ConstantZero) {
  const GuessingStructure g = random_structure(FuncSpec::parse("id"), FuncSpec::parse("id"), 12, 3);
  const GuessingStructure r = restrict_guessing(g, FuncSpec::constant(0));
  for (std::uint64_t n = 0; n < 12; ++n) {
    EXPECT_LE(r.level(n).size(), 1u);
    for (const auto& s : r.level(n)) EXPECT_EQ(s.size(), 0u);
  }
}

TEST(RestrictGuessing, PrefixesDeduplicated) {
  const GuessingStructure g(FuncSpec::constant(3), FuncSpec(), 3, levels_of({{2, {"00", "01", "11"}}}));
  const GuessingStructure r = restrict_guessing(g, FuncSpec::parse("min(id,1)"));
  ASSERT_EQ(r.level(2).size(), 2u);
  EXPECT_EQ(r.level(2)[0].str(), "0");
  EXPECT_EQ(r.level(2)[1].str(), "1");
  EXPECT_EQ(r.f(), FuncSpec::parse("min(id,1)"));
}

TEST(RestrictGuessing, MixedOrderUsesPointwiseMin) {
  const GuessingStructure g = random_structure(FuncSpec::parse("2"), FuncSpec::parse("id"), 8, 5);
  const FuncSpec cut = FuncSpec::parse("4");
  const GuessingStructure r = restrict_guessing(g, cut);
  for (std::uint64_t n = 0; n < 8; ++n) EXPECT_EQ(r.f()(n), std::min<std::uint64_t>(n, 4));
}

// Property: with g <= f every level guessed before is still guessed.
TEST(RestrictGuessing, GuessSetsGrow) {
  const GuessingStructure g = random_structure(FuncSpec::parse("add(id,2)"), FuncSpec::parse("id"), 14, 21);
  const GuessingStructure r = restrict_guessing(g, FuncSpec::parse("floorlog2"));
  std::mt19937_64 rng(8);
  for (int t = 0; t < 300; ++t) {
    const SetWindow x = random_subject(rng, 14);
    EXPECT_TRUE(guess_levels(g, x).hits.subset_of(guess_levels(r, x).hits));
  }
}

TEST(RkTransport, IdentityAndConstant) {
  const GuessingStructure g = random_structure(FuncSpec::parse("id"), FuncSpec::parse("id"), 16, 2);
  EXPECT_EQ(rk_transport(g, FuncSpec()), g);
  const GuessingStructure c = rk_transport(g, FuncSpec::constant(3));
  for (std::uint64_t i = 0; i < 16; ++i) {
    ASSERT_EQ(c.level(i).size(), g.level(3).size());
    for (std::size_t k = 0; k < c.level(i).size(); ++k) EXPECT_EQ(c.level(i)[k], g.level(3)[k]);
  }
  EXPECT_THROW(rk_transport(g, FuncSpec::constant(16)), HorizonError);
}

// Property: transported hits are the p-preimage of the original hits.
TEST(RkTransport, PreimageLaw) {
  const std::vector<std::string> maps{"floorlog2", "ruler", "min(add(id,3),15)", "const(7)", "min(mul(id,2),15)"};
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const GuessingStructure g = random_structure(FuncSpec::parse("add(id,1)"), FuncSpec::parse("id"), 16, seed);
    for (const auto& text : maps) {
      const FuncSpec p = FuncSpec::parse(text);
      const GuessingStructure t = rk_transport(g, p);
      for (int k = 0; k < 50; ++k) {
        const SetWindow x = random_subject(rng, 16);
        const SetWindow base = guess_levels(g, x).hits;
        const SetWindow moved = guess_levels(t, x).hits;
        for (std::uint64_t i = 0; i < 16; ++i) EXPECT_EQ(moved.test(i), base.test(p(i))) << text << " i=" << i;
      }
    }
  }
}

// Property: at any level, subjects with pairwise-distinct traces that are all
// guessed there number at most pi(n).
TEST(CountingBound, DistinctTracesAtALevel) {
  const GuessingStructure g = random_structure(FuncSpec::parse("min(id,5)"), FuncSpec::parse("id"), 12, 13);
  for (std::uint64_t n = 0; n < 12; ++n) {
    std::vector<BitString> traces;
    for (std::uint64_t w = 0; w < (std::uint64_t{1} << n); ++w) {
      const SetWindow x = SetWindow::from_words(12, {w});
      if (guess_levels(g, x).hits.test(n)) traces.push_back(x.prefix(n));
    }
    EXPECT_LE(traces.size(), g.pi()(n));
  }
}
