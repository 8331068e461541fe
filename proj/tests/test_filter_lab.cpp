#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "diamond/error.hpp"
#include "diamond/filter_lab.hpp"
#include "diamond/probability.hpp"
#include "diamond/pseudo_tree.hpp"
#include "support/oracles.hpp"

using namespace diamond;

namespace {

// Every nonempty index list of size <= arity, intersected densely.
std::vector<std::pair<std::vector<std::size_t>, std::optional<std::uint64_t>>> fip_oracle(
    const FilterBase& base, std::size_t arity) {
  std::vector<std::vector<bool>> dense;
  for (const auto& g : base.generators()) dense.push_back(oracle::dense(g.window));
  std::vector<std::pair<std::vector<std::size_t>, std::optional<std::uint64_t>>> out;
  const std::size_t n = base.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) members.push_back(i);
    }
    if (members.size() > arity) continue;
    std::optional<std::uint64_t> top;
    for (std::uint64_t x = 0; x < base.horizon(); ++x) {
      if (std::all_of(members.begin(), members.end(), [&](std::size_t i) { return dense[i][x]; })) top = x;
    }
    out.emplace_back(members, top);
  }
  std::sort(out.begin(), out.end());
  return out;
}

FilterBase random_base(std::uint64_t horizon, std::size_t size, SplitMix64& rng, std::uint64_t sparsity) {
  FilterBase base(horizon);
  for (std::size_t i = 0; i < size; ++i) {
    SetWindow w(horizon);
    for (std::uint64_t x = 0; x < horizon; ++x) {
      if (rng.below(sparsity) == 0) w.set(x);
    }
    base.add("g" + std::to_string(i), w);
  }
  return base;
}

const FuncSpec& spec(const char* text) {
  static std::map<std::string, FuncSpec> cache;
  auto it = cache.find(text);
  if (it == cache.end()) it = cache.emplace(text, FuncSpec::parse(text)).first;
  return it->second;
}

}  // namespace

TEST(FilterBase, HorizonMismatch) {
  FilterBase base(16);
  EXPECT_THROW(base.add("x", SetWindow(17)), HorizonError);
  EXPECT_THROW(FilterBase(8, {{"a", SetWindow(9)}}), HorizonError);
  base.add("e", SetWindow(16));
  base.add("f", SetWindow::full(16));
  EXPECT_EQ(base.empty_generators(), (std::vector<std::size_t>{0}));
}

TEST(CheckFip, MatchesDenseOracle) {
  SplitMix64 rng(7);
  for (int round = 0; round < 40; ++round) {
    const std::uint64_t horizon = 1 + rng.below(90);
    const std::size_t size = 1 + rng.below(7);
    const FilterBase base = random_base(horizon, size, rng, 1 + rng.below(3));
    const std::size_t arity = 1 + rng.below(size);
    const FipReport report = check_fip(base, arity);
    std::vector<std::pair<std::vector<std::size_t>, std::optional<std::uint64_t>>> got;
    for (const auto& e : report.entries) got.emplace_back(e.members, e.witness);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, fip_oracle(base, arity)) << "round " << round;
    const bool all = std::all_of(got.begin(), got.end(), [](const auto& e) { return e.second.has_value(); });
    EXPECT_EQ(report.passed(), all);
    EXPECT_EQ(report.first_failure().has_value(), !all);
  }
}

TEST(CheckFip, Failure) {
  FilterBase base(10);
  base.add("lo", SetWindow::interval(10, 0, 5));
  base.add("hi", SetWindow::interval(10, 5, 10));
  base.add("all", SetWindow::full(10));
  const FipReport r = check_fip(base, 2);
  ASSERT_FALSE(r.passed());
  EXPECT_EQ(r.first_failure()->members, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(r.entries.size(), 6u);
  EXPECT_THROW(check_fip(base, 4), PreconditionError);
  EXPECT_TRUE(check_fip(base, 1).passed());
}

TEST(CheckFip, TreeBaseWitnessesAreLevelsOfTheTree) {
  const SplittingTree t = construct_splitting_tree(spec("ruler"), 4, 1 << 20);
  const auto branches = frontier_branches(t.tree);
  const FilterBase base = base_from_tree(t.tree, branches);
  EXPECT_EQ(base.size(), branches.size());
  EXPECT_EQ(base.generators()[0].name, "B0");
  const FipReport r = check_fip(base, std::min<std::size_t>(5, base.size()));
  EXPECT_TRUE(r.passed());
  for (const auto& e : r.entries) {
    ASSERT_TRUE(e.witness);
    EXPECT_GT(t.tree.levels().size_at(*e.witness), 0u);
  }
}

TEST(BaseFromTree, ShortBranch) {
  const SplittingTree t = construct_splitting_tree(spec("ruler"), 2, 1 << 20);
  const std::vector<BranchSample> b{{SetWindow(3)}};
  EXPECT_THROW(base_from_tree(t.tree, b), HorizonError);
}

TEST(SkyWindow, Definition) {
  const SetWindow w = sky_window(spec("ruler"), spec("id"), spec("pow2"), 64);
  for (std::uint64_t n = 0; n < 64; ++n) {
    EXPECT_EQ(w.test(n), (std::uint64_t{1} << oracle::ruler(n)) < n) << n;
  }
  // pow2(pi(n)) overflows for pi = id past 63, so those levels stay out.
  const SetWindow big = sky_window(spec("id"), spec("mul(id,id)"), spec("pow2"), 80);
  for (std::uint64_t n = 64; n < 80; ++n) EXPECT_FALSE(big.test(n));
  EXPECT_TRUE(big.test(63) == false);
}

TEST(SkyProbe, LessSupportedOnFullWindow) {
  const FilterBase base(32);
  const std::vector<FuncSpec> tests{spec("id"), spec("add(id,5)")};
  const SkyVerdict v = sky_probe(spec("1"), spec("id"), base, tests);
  EXPECT_EQ(v.outcome, SkyOutcome::kSupported);
  EXPECT_EQ(v.midpoint, 16u);
  EXPECT_EQ(v.probes.size(), 2u);
  EXPECT_FALSE(v.counterexample);
}

TEST(SkyProbe, LessRefutedWithCounterexample) {
  FilterBase base(32);
  base.add("evens", SetWindow::from_members(32, {2, 4, 20, 22}));
  const std::vector<FuncSpec> tests{spec("pow2")};
  const SkyVerdict v = sky_probe(spec("id"), spec("id"), base, tests);
  EXPECT_EQ(v.outcome, SkyOutcome::kRefutedAtHorizon);
  ASSERT_TRUE(v.counterexample);
  EXPECT_EQ(v.counterexample->members(), (std::vector<std::uint64_t>{20, 22}));
  ASSERT_TRUE(v.deciding_probe);
  EXPECT_EQ(v.probes[*v.deciding_probe].members, (std::vector<std::size_t>{0}));
  EXPECT_STREQ(to_string(v.outcome), "refuted_at_horizon");
}

TEST(SkyProbe, GreaterEq) {
  const FilterBase base(32);
  const std::vector<FuncSpec> tests{spec("id"), spec("pow2")};
  SkyOptions opt;
  opt.relation = SkyRelation::kGreaterEq;
  const SkyVerdict v = sky_probe(spec("id"), spec("id"), base, tests, opt);
  EXPECT_EQ(v.outcome, SkyOutcome::kSupported);
  EXPECT_EQ(v.witness_test, "id");
  const std::vector<FuncSpec> weak{spec("1")};
  EXPECT_EQ(sky_probe(spec("id"), spec("id"), base, weak, opt).outcome, SkyOutcome::kInconclusive);
}

TEST(SkyProbe, DeadProbesDecideNothing) {
  FilterBase base(32);
  base.add("early", SetWindow::interval(32, 0, 8));
  const std::vector<FuncSpec> tests{spec("pow2")};
  const SkyVerdict v = sky_probe(spec("id"), spec("id"), base, tests);
  EXPECT_EQ(v.outcome, SkyOutcome::kInconclusive);
  EXPECT_FALSE(v.probes[0].live);
}

TEST(SkyProbe, Preconditions) {
  const FilterBase base(32);
  EXPECT_THROW(sky_probe(spec("id"), spec("id"), base, {}), PreconditionError);
  SkyOptions opt;
  opt.midpoint = 32;
  const std::vector<FuncSpec> tests{spec("id")};
  EXPECT_THROW(sky_probe(spec("id"), spec("id"), base, tests, opt), PreconditionError);
}

TEST(ExtendGood, AdjoinsSkyWindow) {
  const SplittingTree t = construct_splitting_tree(spec("ruler"), 6, 1 << 20);
  const auto branches = frontier_branches(t.tree);
  const FilterBase base = base_from_tree(t.tree, branches);
  const Extension e = extend_good(base, spec("ruler"), spec("id"), spec("pow2"));
  EXPECT_EQ(e.base.size(), base.size() + 1);
  EXPECT_EQ(e.base.generators().back().name, "sky:pow2");
  EXPECT_EQ(e.base.generators().back().window, sky_window(spec("ruler"), spec("id"), spec("pow2"), base.horizon()));
  EXPECT_TRUE(e.report.passed());
  EXPECT_EQ(e.report.arity, 5u);
}

TEST(ExtendGood, ReportsBreakingSubfamily) {
  FilterBase base(16);
  base.add("a", SetWindow::full(16));
  try {
    extend_good(base, spec("id"), spec("id"), spec("id"));
    FAIL();
  } catch (const FipError& e) {
    EXPECT_EQ(e.failing_subfamily(), (std::vector<std::size_t>{0, 1}));
  }
}

namespace {

// Positions of ground points enumerated directly: supports by mask, then
// families as integers.
struct IsbellOracle {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> points;

  IsbellOracle(std::uint64_t cap, std::size_t max_support) {
    for (std::uint32_t f = 0; f < (1U << cap); ++f) {
      const int k = std::popcount(f);
      if (static_cast<std::size_t>(k) > max_support) continue;
      const std::uint64_t families = std::uint64_t{1} << (1U << k);
      for (std::uint64_t g = 0; g < families; ++g) points.emplace_back(f, static_cast<std::uint32_t>(g));
    }
  }

  // Bit j of G is the j-th subset of F, reading j's bits over F's members.
  static bool member(std::uint32_t f, std::uint32_t g, std::uint32_t x) {
    const std::uint32_t hit = f & x;
    std::uint32_t j = 0;
    int pos = 0;
    for (std::uint32_t b = 0; b < 32; ++b) {
      if (!(f >> b & 1)) continue;
      if (hit >> b & 1) j |= 1U << pos;
      ++pos;
    }
    return g >> j & 1;
  }
};

}  // namespace

TEST(Isbell, MembershipMatchesDefinition) {
  const std::uint64_t cap = 4;
  std::vector<SetWindow> indices;
  for (std::uint64_t x = 0; x < 16; ++x) indices.push_back(SetWindow::from_bits(BitString::from_word(x, cap), cap));
  const IsbellFamily family = isbell_family(cap, indices, 3);
  EXPECT_EQ(family.max_support(), 2u);
  const IsbellOracle o(cap, 2);
  ASSERT_EQ(family.ground_size(), o.points.size());
  for (std::uint64_t pos = 0; pos < o.points.size(); ++pos) {
    const IsbellPoint p = family.point(pos);
    EXPECT_EQ(p.support, o.points[pos].first);
    EXPECT_EQ(p.family, o.points[pos].second);
    EXPECT_EQ(family.position(p), pos);
    for (std::uint32_t x = 0; x < 16; ++x) {
      ASSERT_EQ(family.sets()[x].test(pos), IsbellOracle::member(p.support, p.family, x)) << pos << " " << x;
    }
  }
}

TEST(Isbell, IndependentUpToArity) {
  const std::uint64_t cap = 4;
  std::vector<SetWindow> indices;
  for (std::uint64_t x = 0; x < 16; ++x) indices.push_back(SetWindow::from_bits(BitString::from_word(x, cap), cap));
  for (std::size_t arity = 1; arity <= 3; ++arity) {
    const IsbellFamily family = isbell_family(cap, indices, arity);
    const IndependenceReport r = check_independence(family, arity);
    EXPECT_TRUE(r.passed()) << arity;
    EXPECT_GT(r.combinations, 0u);
  }
}

TEST(Isbell, SmallSupportBreaksIndependence) {
  // Supports of one point cannot separate two members from one complement.
  const std::uint64_t cap = 3;
  std::vector<SetWindow> indices;
  for (std::uint64_t x = 0; x < 8; ++x) indices.push_back(SetWindow::from_bits(BitString::from_word(x, cap), cap));
  IsbellFamily narrow(cap, 1);
  for (std::uint32_t x = 0; x < 8; ++x) narrow.add_index(x);
  EXPECT_FALSE(check_independence(narrow, 3).passed());
}

TEST(Isbell, Preconditions) {
  std::vector<SetWindow> dup{SetWindow::from_members(3, {0}), SetWindow::from_members(3, {0})};
  EXPECT_THROW(isbell_family(3, dup, 2), PreconditionError);
  std::vector<SetWindow> wide{SetWindow::from_members(5, {4})};
  EXPECT_THROW(isbell_family(3, wide, 2), HorizonError);
  EXPECT_THROW(IsbellFamily(kMaxIsbellCap + 1, 1), PreconditionError);
}
