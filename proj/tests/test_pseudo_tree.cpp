#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "diamond/error.hpp"
#include "diamond/pseudo_tree.hpp"
#include "support/oracles.hpp"

using namespace diamond;

namespace {

const FuncSpec& ruler() {
  static const FuncSpec r = FuncSpec::parse("ruler");
  return r;
}

std::uint64_t ruler_value(std::uint64_t n) { return oracle::ruler(n); }

PseudoTree tree_of(const std::map<std::uint64_t, std::vector<std::string>>& text, std::uint64_t horizon,
                   const FuncSpec& pi = ruler()) {
  std::map<std::uint64_t, std::vector<BitString>> raw;
  for (const auto& [n, strings] : text) {
    for (const auto& s : strings) raw[n].push_back(BitString::parse(s));
  }
  return PseudoTree(pi, FuncSpec(), horizon, LevelMap(std::move(raw)));
}

std::vector<std::string> strings_at(const PseudoTree& t, std::uint64_t k) {
  std::vector<std::string> out;
  for (const auto& s : t.levels().at(k)) out.push_back(s.str());
  return out;
}

const SplittingTree& six_stages() {
  static const SplittingTree t = construct_splitting_tree(ruler(), 6, 1 << 20);
  return t;
}

}  // namespace

TEST(Construct, FirstEvenStage) {
  const SplittingTree t = construct_splitting_tree(ruler(), 1, 1 << 20);
  EXPECT_EQ(strings_at(t.tree, 3), (std::vector<std::string>{"000", "001"}));
  EXPECT_EQ(t.tree.stage_marks().size(), 2u);
  EXPECT_EQ(t.tree.stage_marks()[1], 4u);
  EXPECT_EQ(t.tree.levels().node_count(), 2u);
}

// The smallest level with pi >= 2 and the odd-stage allocation, recomputed by
// a direct search over ruler values.
TEST(Construct, FirstOddStageMatchesSearch) {
  auto first = [](std::uint64_t from, auto pred) {
    std::uint64_t k = from;
    while (!pred(k)) ++k;
    return k;
  };
  const std::uint64_t k0 = first(1, [](std::uint64_t k) { return oracle::ruler(k) >= 2; });
  const std::uint64_t m1 = k0 + 1;
  const std::uint64_t k12 = first(m1, [](std::uint64_t k) { return oracle::ruler(k) == 2; });
  const std::uint64_t k1 = first(m1, [&](std::uint64_t k) { return k != k12 && oracle::ruler(k) == 1; });
  const std::uint64_t k2 = first(k1 + 1, [&](std::uint64_t k) { return k != k12 && oracle::ruler(k) == 1; });
  const std::uint64_t m2 = first(std::max({k1, k2, k12}) + 1, [](std::uint64_t k) { return oracle::ruler(k) >= 2; });
  EXPECT_EQ(k0, 3u);
  EXPECT_EQ(m1, 4u);

  const SplittingTree t = construct_splitting_tree(ruler(), 2, 1 << 20);
  ASSERT_EQ(t.log.size(), 2u);
  const StageLog& odd = t.log[1];
  EXPECT_TRUE(odd.odd);
  EXPECT_FALSE(odd.fallback_used);
  std::map<std::uint32_t, std::uint64_t> alloc;
  for (const auto& a : odd.allocation) {
    alloc[a.members] = a.level;
    EXPECT_TRUE(a.exact);
  }
  EXPECT_EQ(alloc.at(0b01), k1);
  EXPECT_EQ(alloc.at(0b10), k2);
  EXPECT_EQ(alloc.at(0b11), k12);
  EXPECT_EQ(t.tree.stage_marks()[2], m2);
  EXPECT_EQ(alloc.at(0b01), 5u);
  EXPECT_EQ(alloc.at(0b10), 9u);
  EXPECT_EQ(alloc.at(0b11), 11u);
  EXPECT_EQ(m2, 15u);
  EXPECT_EQ(strings_at(t.tree, 5), (std::vector<std::string>{"00000"}));
  EXPECT_EQ(strings_at(t.tree, 9), (std::vector<std::string>{"001000000"}));
  EXPECT_EQ(strings_at(t.tree, 11), (std::vector<std::string>{"00000000000", "00100000000"}));
}

TEST(Construct, DegeneratePiFails) {
  EXPECT_THROW(construct_splitting_tree(FuncSpec::constant(0), 1, 1000), HorizonError);
  EXPECT_THROW(construct_splitting_tree(FuncSpec::constant(1), 1, 1000), HorizonError);
}

TEST(Construct, CapExhaustion) {
  try {
    construct_splitting_tree(ruler(), 6, 100);
    FAIL();
  } catch (const HorizonError& e) {
    EXPECT_NE(std::string(e.what()).find("100"), std::string::npos) << e.what();
  }
}

TEST(Construct, ZeroStages) {
  const SplittingTree t = construct_splitting_tree(ruler(), 0, 100);
  EXPECT_TRUE(t.tree.empty());
  EXPECT_TRUE(t.log.empty());
}

TEST(Construct, FallbackWhenNoExactLevel) {
  // pi only takes the values 0 and 3, so singleton and pair levels use pi = 3.
  const SplittingTree t = construct_splitting_tree(FuncSpec::parse("mul(min(ruler,1),3)"), 2, 1 << 12);
  EXPECT_TRUE(t.log[1].fallback_used);
  for (const auto& a : t.log[1].allocation) EXPECT_FALSE(a.exact);
  EXPECT_TRUE(verify_splitting(t.tree, 0).passed());
}

TEST(Construct, StageConditionsHoldForSixStages) {
  const auto& t = six_stages();
  const auto checks = oracle::check_stage_conditions(t.tree, ruler_value);
  ASSERT_EQ(checks.size(), 6u);
  for (const auto& c : checks) EXPECT_TRUE(c.ok) << "stage " << c.stage << ": " << c.failure;
}

TEST(Construct, StageConditionsHoldForOtherPi) {
  const FuncSpec pi = FuncSpec::parse("ruler(mul(id,3))");
  const SplittingTree t = construct_splitting_tree(pi, 5, 1 << 20);
  const auto checks = oracle::check_stage_conditions(
      t.tree, [](std::uint64_t n) { return oracle::ruler(3 * n); });
  for (const auto& c : checks) EXPECT_TRUE(c.ok) << "stage " << c.stage << ": " << c.failure;
}

TEST(Construct, OddStageAllocationIsInjectiveInsideTheStage) {
  for (const auto& log : six_stages().log) {
    if (!log.odd) continue;
    std::map<std::uint64_t, int> used;
    for (const auto& a : log.allocation) {
      EXPECT_GE(a.level, log.mark_begin);
      EXPECT_LT(a.level, log.mark_end);
      EXPECT_EQ(++used[a.level], 1);
    }
    EXPECT_EQ(log.allocation.size(), (std::size_t{1} << log.maximal_before.size()) - 1);
  }
}

TEST(Construct, Deterministic) {
  EXPECT_EQ(construct_splitting_tree(ruler(), 6, 1 << 20).tree, six_stages().tree);
}

TEST(VerifySplitting, SixStagesPassBelowLastEvenMark) {
  const auto& t = six_stages();
  const SplittingReport r = verify_splitting(t.tree, t.tree.stage_marks()[4]);
  EXPECT_TRUE(r.passed());
  EXPECT_TRUE(r.cardinality_violations.empty());
  EXPECT_TRUE(r.non_branching.empty());
  EXPECT_GT(r.indeterminate, 0u);
}

TEST(VerifySplitting, ReportsForcedViolation) {
  const PseudoTree t = tree_of({{3, {"000", "001", "010"}}}, 8);
  const SplittingReport r = verify_splitting(t, 0);
  ASSERT_EQ(r.cardinality_violations.size(), 1u);
  EXPECT_EQ(r.cardinality_violations[0].level, 3u);
  EXPECT_EQ(r.cardinality_violations[0].nodes, 3u);
  EXPECT_EQ(r.cardinality_violations[0].bound, 2u);
  EXPECT_FALSE(r.passed());
}

TEST(VerifySplitting, NonBranchingNodeBelowFrontier) {
  const PseudoTree t = tree_of({{1, {"0"}}, {3, {"000"}}}, 8);
  const SplittingReport r = verify_splitting(t, 4);
  EXPECT_EQ(r.non_branching.size(), 2u);
  EXPECT_EQ(verify_splitting(t, 0).indeterminate, 2u);
}

TEST(VerifySplitting, EmptyTreePasses) {
  EXPECT_TRUE(verify_splitting(tree_of({}, 8), 0).passed());
  EXPECT_THROW(verify_splitting(tree_of({}, 8), 8), PreconditionError);
}

TEST(FrontierBranches, TwoNodeTree) {
  const PseudoTree t = tree_of({{3, {"000", "001"}}}, 6);
  const auto b = frontier_branches(t);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b[0].bits.prefix(6).str(), "000000");
  EXPECT_EQ(b[1].bits.prefix(6).str(), "001000");
  EXPECT_EQ(frontier_branches(tree_of({{1, {"1"}}}, 4)).size(), 1u);
}

TEST(FrontierBranches, CountMatchesStageLog) {
  const auto& t = six_stages();
  EXPECT_EQ(frontier_branches(t.tree).size(), t.log.back().maximal_after.size());
  EXPECT_EQ(frontier_branches(t.tree).size(), 8u);
}

TEST(VerifyStar, FirstOddStageLevels) {
  const SplittingTree t = construct_splitting_tree(ruler(), 2, 1 << 20);
  const auto b = frontier_branches(t.tree);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(verify_star(t.tree, b), (std::vector<std::uint64_t>{3, 11}));
  EXPECT_EQ(verify_star(t.tree, std::vector<BranchSample>{b[0]}), (std::vector<std::uint64_t>{5}));
  EXPECT_EQ(verify_star(t.tree, std::vector<BranchSample>{b[1]}), (std::vector<std::uint64_t>{9}));
}

TEST(VerifyStar, BranchOutsideTree) {
  const SplittingTree t = construct_splitting_tree(ruler(), 2, 1 << 20);
  const BranchSample stray{SetWindow::full(t.tree.horizon())};
  EXPECT_TRUE(verify_star(t.tree, std::vector<BranchSample>{stray}).empty());
  auto b = frontier_branches(t.tree);
  b.push_back(stray);
  EXPECT_TRUE(verify_star(t.tree, b).empty());
}

TEST(PruneThin, Cases) {
  const auto& t = six_stages();
  const auto branches = frontier_branches(t.tree);
  EXPECT_EQ(prune_thin(t.tree, branches, 1), t.tree);
  EXPECT_TRUE(prune_thin(t.tree, branches, branches.size() + 1).empty());
  EXPECT_THROW(prune_thin(t.tree, branches, 0), PreconditionError);

  const std::vector<BranchSample> one{branches[3]};
  const PseudoTree chain = prune_thin(t.tree, one, 1);
  const MemberIndex r(branches[3].bits);
  std::size_t nodes = 0;
  for (const Level& level : chain.levels().levels()) {
    ASSERT_EQ(level.nodes.size(), 1u);
    EXPECT_TRUE(equal(level.nodes[0].view(), r.prefix(level.index)));
    ++nodes;
  }
  // Every level the branch passes through survives.
  std::size_t expected = 0;
  for (const Level& level : t.tree.levels().levels()) {
    if (t.tree.levels().contains(level.index, r.prefix(level.index))) ++expected;
  }
  EXPECT_EQ(nodes, expected);
}

TEST(PruneThin, Idempotent) {
  const auto& t = six_stages();
  auto branches = frontier_branches(t.tree);
  branches.resize(5);
  for (std::size_t s = 1; s <= 3; ++s) {
    const PseudoTree once = prune_thin(t.tree, branches, s);
    EXPECT_EQ(prune_thin(once, branches, s), once) << s;
  }
}

TEST(AvoidLevelExtension, PigeonholeAtLevelFour) {
  const PseudoTree t = tree_of({{4, {"0000"}}}, 8, FuncSpec::parse("1"));
  const AvoidingExtension e = avoid_level_extension(t, BitString(), SetWindow::from_members(8, {4}));
  EXPECT_EQ(e.extension.str(), "1000");
  EXPECT_EQ(e.level, 4u);
  EXPECT_EQ(e.candidates, 2u);
}

TEST(AvoidLevelExtension, EmptyLevelTakesZeroPad) {
  const PseudoTree t = tree_of({{4, {"0000"}}}, 8, FuncSpec::parse("1"));
  const AvoidingExtension e = avoid_level_extension(t, BitString::parse("01"), SetWindow::from_members(8, {6}));
  EXPECT_EQ(e.extension.str(), "010000");
  EXPECT_EQ(e.level, 6u);
}

TEST(AvoidLevelExtension, NoTarget) {
  const PseudoTree t = tree_of({}, 8, FuncSpec::parse("1"));
  EXPECT_THROW(avoid_level_extension(t, BitString(), SetWindow(8)), HorizonError);
}

// Property: the returned extension extends the node and misses the level.
TEST(AvoidLevelExtension, NeverInLevel) {
  const auto& t = six_stages();
  const SetWindow targets = SetWindow::interval(t.tree.horizon(), 0, t.tree.horizon());
  for (const Level& level : t.tree.levels().levels()) {
    for (const BitString& node : level.nodes) {
      const AvoidingExtension e = avoid_level_extension(t.tree, node, targets);
      EXPECT_TRUE(node.is_prefix_of(e.extension));
      EXPECT_FALSE(t.tree.levels().contains(e.level, e.extension.view()));
      EXPECT_EQ(e.extension.size(), e.level);
    }
  }
}
