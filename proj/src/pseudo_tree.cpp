#include "diamond/pseudo_tree.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <set>
#include <string>
#include <unordered_set>

#include "diamond/error.hpp"

namespace diamond {

namespace {

std::string str(std::uint64_t v) { return std::to_string(v); }

// Smallest k in [start, cap) with pi(k) >= need; an overflowing pi(k) qualifies.
std::optional<std::uint64_t> find_level(const FuncSpec& pi, std::uint64_t start, std::uint64_t cap,
                                        std::uint64_t need) {
  for (std::uint64_t k = start; k < cap; ++k) {
    const auto v = pi.try_eval(k);
    if (!v || *v >= need) return k;
  }
  return std::nullopt;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Size descending, then lexicographic on the sorted member lists.
bool allocation_order(std::uint32_t a, std::uint32_t b) {
  const int pa = std::popcount(a);
  const int pb = std::popcount(b);
  if (pa != pb) return pa > pb;
  if (a == b) return false;
  // The list holding the lowest differing member sorts first.
  return (a & (a ^ b) & ~((a ^ b) - 1)) != 0;
}

void run_even_stage(const FuncSpec& pi, std::uint64_t cap, StageLog& entry,
                    std::map<std::uint64_t, std::vector<BitString>>& raw, std::vector<BitString>& maximal,
                    std::vector<std::uint64_t>& marks) {
  std::uint64_t next_free = entry.mark_begin;
  std::vector<TreeNode> after;
  for (std::size_t i = 0; i < maximal.size(); ++i) {
    const BitString& s = maximal[i];
    const std::uint64_t start = std::max(next_free, s.size() + 1);
    const auto k = find_level(pi, start, cap, 2);
    if (!k) {
      throw HorizonError("stage " + str(entry.stage) + ": no level k in [" + str(start) + ", " + str(cap) +
                         ") with pi(k) >= 2 for maximal node " + str(i + 1) + " of " + str(maximal.size()));
    }
    BitString left = s.zero_padded(*k);
    BitString right = left.flipped(*k - 1);
    raw[*k] = {left, right};
    entry.added.push_back({*k, left});
    entry.added.push_back({*k, right});
    after.push_back({*k, std::move(left)});
    after.push_back({*k, std::move(right)});
    next_free = *k + 1;
  }
  std::sort(after.begin(), after.end(), [](const TreeNode& a, const TreeNode& b) { return a.bits < b.bits; });
  maximal.clear();
  for (const auto& n : after) maximal.push_back(n.bits);
  entry.maximal_after = std::move(after);
  entry.mark_end = next_free;
  marks.push_back(next_free);
}

void run_odd_stage(const FuncSpec& pi, std::uint64_t cap, StageLog& entry,
                   std::map<std::uint64_t, std::vector<BitString>>& raw, std::vector<BitString>& maximal,
                   std::vector<std::uint64_t>& marks) {
  const std::size_t d = maximal.size();
  if (d > kMaxOddStageWidth) {
    throw HorizonError("stage " + str(entry.stage) + ": " + str(d) + " maximal nodes need " +
                       str((std::uint64_t{1} << std::min<std::size_t>(d, 63)) - 1) +
                       " allocated levels, beyond the supported width " + str(kMaxOddStageWidth));
  }
  const std::uint64_t m = entry.mark_begin;

  std::vector<std::uint32_t> subsets;
  subsets.reserve((std::size_t{1} << d) - 1);
  for (std::uint32_t mask = 1; mask < (std::uint32_t{1} << d); ++mask) subsets.push_back(mask);
  std::sort(subsets.begin(), subsets.end(), allocation_order);

  // Exact levels per size, up to the demand C(d, s).
  std::vector<std::uint64_t> demand(d + 1, 0);
  for (std::size_t s = 1; s <= d; ++s) demand[s] = binomial(d, s);
  std::vector<std::vector<std::uint64_t>> exact(d + 1);
  std::size_t unmet = d;
  for (std::uint64_t k = m; k < cap && unmet > 0; ++k) {
    const auto v = pi.try_eval(k);
    if (!v || *v == 0 || *v > d) continue;
    auto& bucket = exact[*v];
    if (bucket.size() < demand[*v]) {
      bucket.push_back(k);
      if (bucket.size() == demand[*v]) --unmet;
    }
  }

  std::vector<std::size_t> taken(d + 1, 0);
  std::vector<StageAllocation> allocation;
  allocation.reserve(subsets.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    const auto s = static_cast<std::size_t>(std::popcount(subsets[i]));
    if (taken[s] < exact[s].size()) {
      allocation.push_back({subsets[i], exact[s][taken[s]++], true});
    } else {
      allocation.push_back({subsets[i], 0, false});
      pending.push_back(i);
    }
  }

  if (!pending.empty()) {
    entry.fallback_used = true;
    std::set<std::uint64_t> used;
    for (const auto& a : allocation) {
      if (a.exact) used.insert(a.level);
    }
    struct Candidate {
      std::uint64_t level;
      std::uint64_t value;
      bool used;
    };
    std::vector<Candidate> candidates;
    for (std::uint64_t k = m; k < cap; ++k) {
      const auto v = pi.try_eval(k);
      const std::uint64_t value = v ? *v : UINT64_MAX;
      if (value >= 1 && !used.contains(k)) candidates.push_back({k, value, false});
    }
    std::vector<std::size_t> cursor(d + 1, 0);
    for (std::size_t i : pending) {
      const auto s = static_cast<std::size_t>(std::popcount(allocation[i].members));
      std::size_t& c = cursor[s];
      while (c < candidates.size() && (candidates[c].used || candidates[c].value < s)) ++c;
      if (c == candidates.size()) {
        throw HorizonError("stage " + str(entry.stage) + ": no free level in [" + str(m) + ", " + str(cap) +
                           ") with pi(k) >= " + str(s) + " for a subset of " + str(d) + " maximal nodes");
      }
      candidates[c].used = true;
      allocation[i].level = candidates[c].level;
    }
  }

  std::uint64_t top = m;
  for (const auto& a : allocation) top = std::max(top, a.level);
  const auto next_mark = find_level(pi, top + 1, cap, d);
  if (!next_mark) {
    throw HorizonError("stage " + str(entry.stage) + ": no mark m in [" + str(top + 1) + ", " + str(cap) +
                       ") with pi(m) >= " + str(d));
  }

  std::vector<BitString> padded;
  padded.reserve(d);
  for (const auto& s : maximal) padded.push_back(s.zero_padded(*next_mark));
  std::vector<std::uint64_t> highest(d, 0);
  for (const auto& a : allocation) {
    auto& nodes = raw[a.level];
    for (std::size_t i = 0; i < d; ++i) {
      if ((a.members >> i) & 1U) {
        nodes.push_back(padded[i].prefix(a.level));
        entry.added.push_back({a.level, nodes.back()});
        highest[i] = std::max(highest[i], a.level);
      }
    }
  }
  std::vector<TreeNode> after;
  after.reserve(d);
  for (std::size_t i = 0; i < d; ++i) after.push_back({highest[i], padded[i].prefix(highest[i])});
  std::sort(after.begin(), after.end(), [](const TreeNode& a, const TreeNode& b) { return a.bits < b.bits; });
  maximal.clear();
  for (const auto& n : after) maximal.push_back(n.bits);
  entry.maximal_after = std::move(after);
  entry.allocation = std::move(allocation);
  entry.mark_end = *next_mark;
  marks.push_back(*next_mark);
}

}  // namespace

PseudoTree::PseudoTree(FuncSpec pi, FuncSpec f, std::uint64_t horizon, LevelMap levels,
                       std::vector<std::uint64_t> stage_marks)
    : pi_(std::move(pi)),
      f_(std::move(f)),
      horizon_(horizon),
      levels_(std::move(levels)),
      stage_marks_(std::move(stage_marks)) {
  std::uint64_t previous_length = 0;
  for (const Level& level : levels_.levels()) {
    if (level.index >= horizon_) {
      throw HorizonError("tree level " + str(level.index) + " at or past horizon " + str(horizon_));
    }
    const std::uint64_t len = f_(level.index);
    if (len < previous_length) {
      throw PreconditionError("f decreases across occupied levels at level " + str(level.index));
    }
    previous_length = len;
    for (const BitString& s : level.nodes) {
      if (s.size() != len) {
        throw PreconditionError("tree level " + str(level.index) + " holds a string of length " + str(s.size()) +
                                ", f(k) = " + str(len));
      }
    }
  }
  for (std::size_t i = 0; i < stage_marks_.size(); ++i) {
    if (i > 0 && stage_marks_[i] <= stage_marks_[i - 1]) {
      throw PreconditionError("stage marks must be strictly increasing");
    }
    if (stage_marks_[i] > horizon_) throw HorizonError("stage mark " + str(stage_marks_[i]) + " past horizon");
  }
}

std::vector<TreeNode> PseudoTree::maximal_nodes() const {
  // Top-down: a node is extended iff some maximal node above restricts to it.
  std::vector<TreeNode> maximal;
  const auto levels = levels_.levels();
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    const std::uint64_t len = f_(it->index);
    std::unordered_set<BitString> covered;
    for (const auto& z : maximal) {
      if (z.bits.size() >= len) covered.insert(z.bits.prefix(len));
    }
    for (const BitString& x : it->nodes) {
      if (!covered.contains(x)) maximal.push_back({it->index, x});
    }
  }
  std::sort(maximal.begin(), maximal.end(), [](const TreeNode& a, const TreeNode& b) {
    return a.bits != b.bits ? a.bits < b.bits : a.level < b.level;
  });
  return maximal;
}

GuessingStructure to_guessing_structure(const PseudoTree& tree) {
  return GuessingStructure(tree.pi(), tree.f(), tree.horizon(), tree.levels());
}

SplittingTree construct_splitting_tree(const FuncSpec& pi, std::size_t stages, std::uint64_t horizon_cap) {
  std::map<std::uint64_t, std::vector<BitString>> raw;
  std::vector<std::uint64_t> marks{0};
  std::vector<BitString> maximal{BitString()};
  std::vector<StageLog> log;
  for (std::size_t stage = 0; stage < stages; ++stage) {
    StageLog entry;
    entry.stage = stage;
    entry.odd = stage % 2 == 1;
    entry.mark_begin = marks.back();
    entry.maximal_before = maximal;
    if (entry.odd) {
      run_odd_stage(pi, horizon_cap, entry, raw, maximal, marks);
    } else {
      run_even_stage(pi, horizon_cap, entry, raw, maximal, marks);
    }
    log.push_back(std::move(entry));
  }
  const std::uint64_t horizon = marks.back();
  return {PseudoTree(pi, FuncSpec(), horizon, LevelMap(std::move(raw)), std::move(marks)), std::move(log)};
}

SplittingReport verify_splitting(const PseudoTree& tree, std::uint64_t safety_frontier) {
  if (tree.horizon() > 0 && safety_frontier >= tree.horizon()) {
    throw PreconditionError("safety frontier " + str(safety_frontier) + " not below horizon " + str(tree.horizon()));
  }
  SplittingReport report;
  for (std::uint64_t k = 0; k < tree.horizon(); ++k) {
    const std::size_t size = tree.levels().size_at(k);
    const auto bound = tree.pi().try_eval(k);
    if (bound && size > *bound) report.cardinality_violations.push_back({k, size, *bound});
    if (!bound || size < *bound) ++report.equality_shortfall;
  }
  const std::vector<TreeNode> maximal = tree.maximal_nodes();
  for (const Level& level : tree.levels().levels()) {
    for (const BitString& x : level.nodes) {
      std::size_t above = 0;
      for (const auto& z : maximal) {
        if (z.level > level.index && x.is_prefix_of(z.bits) && ++above == 2) break;
      }
      if (above >= 2) continue;
      if (level.index < safety_frontier) {
        report.non_branching.push_back({level.index, x});
      } else {
        ++report.indeterminate;
      }
    }
  }
  return report;
}

std::vector<BranchSample> frontier_branches(const PseudoTree& tree) {
  if (tree.empty()) throw PreconditionError("frontier_branches needs a nonempty tree");
  std::vector<BranchSample> out;
  for (const auto& node : tree.maximal_nodes()) {
    out.push_back({SetWindow::from_bits(node.bits, tree.horizon())});
  }
  return out;
}

std::vector<std::uint64_t> verify_star(const PseudoTree& tree, std::span<const BranchSample> family) {
  if (family.empty()) throw PreconditionError("verify_star needs a nonempty branch family");
  std::vector<MemberIndex> members;
  members.reserve(family.size());
  std::uint64_t shortest = UINT64_MAX;
  for (const auto& r : family) {
    members.emplace_back(r.bits);
    shortest = std::min(shortest, r.bits.horizon());
  }
  std::vector<std::uint64_t> exact;
  std::vector<char> hit;
  for (const Level& level : tree.levels().levels()) {
    if (level.nodes.size() > family.size()) continue;
    const std::uint64_t len = tree.f()(level.index);
    if (len > shortest) throw HorizonError("branch shorter than f(" + str(level.index) + ")");
    hit.assign(level.nodes.size(), 0);
    bool all_in = true;
    for (const auto& r : members) {
      const BitView v = r.prefix(len);
      const auto it = std::lower_bound(level.nodes.begin(), level.nodes.end(), v,
                                       [](const BitString& a, BitView b) { return compare(a.view(), b) < 0; });
      if (it == level.nodes.end() || !equal(it->view(), v)) {
        all_in = false;
        break;
      }
      hit[static_cast<std::size_t>(it - level.nodes.begin())] = 1;
    }
    if (all_in && std::all_of(hit.begin(), hit.end(), [](char c) { return c != 0; })) {
      exact.push_back(level.index);
    }
  }
  return exact;
}

PseudoTree prune_thin(const PseudoTree& tree, std::span<const BranchSample> sample, std::size_t min_support) {
  if (min_support == 0) throw PreconditionError("prune_thin needs min_support >= 1");
  std::vector<MemberIndex> members;
  members.reserve(sample.size());
  for (const auto& r : sample) members.emplace_back(r.bits);
  std::map<std::uint64_t, std::vector<BitString>> raw;
  if (min_support <= sample.size()) {
    std::vector<BitView> restrictions;
    for (const Level& level : tree.levels().levels()) {
      const std::uint64_t len = tree.f()(level.index);
      restrictions.clear();
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (sample[i].bits.horizon() >= len) restrictions.push_back(members[i].prefix(len));
      }
      std::sort(restrictions.begin(), restrictions.end(), [](BitView a, BitView b) { return compare(a, b) < 0; });
      for (const BitString& x : level.nodes) {
        const auto [lo, hi] = std::equal_range(restrictions.begin(), restrictions.end(), x.view(),
                                               [](BitView a, BitView b) { return compare(a, b) < 0; });
        if (static_cast<std::size_t>(hi - lo) >= min_support) raw[level.index].push_back(x);
      }
    }
  }
  return PseudoTree(tree.pi(), tree.f(), tree.horizon(), LevelMap(std::move(raw)),
                    std::vector<std::uint64_t>(tree.stage_marks().begin(), tree.stage_marks().end()));
}

AvoidingExtension avoid_level_extension(const PseudoTree& tree, const BitString& node, const SetWindow& targets) {
  for (const std::uint64_t m : targets.members()) {
    if (m >= tree.horizon()) break;
    const std::uint64_t len = tree.f()(m);
    if (len < node.size()) continue;
    const std::uint64_t free_bits = len - node.size();
    const auto bound = tree.pi().try_eval(m);
    if (!bound) continue;
    if (free_bits < 64 && (std::uint64_t{1} << free_bits) < *bound + 1) continue;
    const auto level = tree.levels().at(m);
    // Pigeonhole: among the first |L_m| + 1 candidates one is absent.
    const std::uint64_t tries = std::min<std::uint64_t>(*bound, level.size()) + 1;
    for (std::uint64_t j = 0; j < tries; ++j) {
      std::vector<std::uint64_t> ones(node.ones().begin(), node.ones().end());
      for (std::uint64_t b = 0; (j >> b) != 0; ++b) {
        if ((j >> b) & 1U) ones.push_back(node.size() + b);
      }
      BitString candidate(len, std::move(ones));
      if (!tree.levels().contains(m, candidate.view())) {
        return {std::move(candidate), m, static_cast<std::size_t>(j + 1)};
      }
    }
  }
  throw HorizonError("no target level below horizon " + str(tree.horizon()) +
                     " admits an extension avoiding the tree");
}

}  // namespace diamond
