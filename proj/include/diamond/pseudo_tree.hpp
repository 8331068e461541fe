#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "diamond/bits.hpp"
#include "diamond/funcspec.hpp"
#include "diamond/guessing.hpp"
#include "diamond/levels.hpp"

namespace diamond {

/// A node of a pseudo-tree: a level and the trace of length f(level) sitting there.
struct TreeNode {
  std::uint64_t level = 0;
  BitString bits;

  friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

/// A level-indexed subset of the binary tree. Level k holds strings of
/// length f(k); a node at level k lies below a node at level k' when k < k'
/// and its string is a prefix of the other's.
///
/// Level cardinality against pi is deliberately not enforced here so that
/// verify_splitting can report violations; see that function.
class PseudoTree {
 public:
  PseudoTree(FuncSpec pi, FuncSpec f, std::uint64_t horizon, LevelMap levels,
             std::vector<std::uint64_t> stage_marks = {});

  const FuncSpec& pi() const noexcept { return pi_; }
  const FuncSpec& f() const noexcept { return f_; }
  std::uint64_t horizon() const noexcept { return horizon_; }
  const LevelMap& levels() const noexcept { return levels_; }
  std::span<const std::uint64_t> stage_marks() const noexcept { return stage_marks_; }
  bool empty() const noexcept { return levels_.empty(); }

  /// Nodes with no proper extension in the tree, sorted by string.
  std::vector<TreeNode> maximal_nodes() const;

  friend bool operator==(const PseudoTree& a, const PseudoTree& b) noexcept {
    return a.horizon_ == b.horizon_ && a.pi_ == b.pi_ && a.f_ == b.f_ && a.levels_ == b.levels_ &&
           a.stage_marks_ == b.stage_marks_;
  }

 private:
  FuncSpec pi_;
  FuncSpec f_;
  std::uint64_t horizon_;
  LevelMap levels_;
  std::vector<std::uint64_t> stage_marks_;
};

/// The levels of a tree read as a guessing sequence (A_n = L_n).
GuessingStructure to_guessing_structure(const PseudoTree& tree);

/// A level chosen for one subset F of the maximal nodes at an odd stage.
struct StageAllocation {
  /// Bit i set when maximal node i (0-based, in StageLog::maximal_before order) is in F.
  std::uint32_t members = 0;
  std::uint64_t level = 0;
  /// pi(level) == |F|; false marks the pi(level) >= |F| fallback.
  bool exact = true;
};

/// Audit record of one construction stage.
struct StageLog {
  std::size_t stage = 0;
  bool odd = false;
  std::uint64_t mark_begin = 0;
  std::uint64_t mark_end = 0;
  std::vector<BitString> maximal_before;
  std::vector<TreeNode> added;
  std::vector<StageAllocation> allocation;
  std::vector<TreeNode> maximal_after;
  bool fallback_used = false;
};

struct SplittingTree {
  PseudoTree tree;
  std::vector<StageLog> log;
};

/// Largest odd-stage width the allocator accepts (2^d - 1 subsets).
inline constexpr std::size_t kMaxOddStageWidth = 20;

/// Builds a perfect-pi-splitting pseudo-tree (f = id) stage by stage from
/// a virtual root with m_0 = 0.
///
/// Even stage: every maximal node s, in string order, gets the smallest
/// unused level k >= m_n with k > |s| and pi(k) >= 2; the two new nodes are
/// s zero-padded to k and the same with bit k-1 flipped. m_{n+1} is one past
/// the last such level.
///
/// Odd stage with maximal nodes s_1..s_d: every nonempty F gets its own
/// level k_F >= m_n, visiting F by size descending then lexicographically
/// and taking the smallest free level with pi(k_F) == |F|, or with
/// pi(k_F) >= |F| when no exact level exists below the cap. m_{n+1} is the
/// smallest m past every k_F with pi(m) >= d, y_i is s_i zero-padded to
/// m_{n+1}, and L_{k_F} = {y_i restricted to k_F : i in F}.
///
/// Every level stays below `horizon_cap`; running out throws HorizonError
/// naming the unmet demand. The tree's horizon is the final mark.
SplittingTree construct_splitting_tree(const FuncSpec& pi, std::size_t stages, std::uint64_t horizon_cap);

struct CardinalityViolation {
  std::uint64_t level = 0;
  std::size_t nodes = 0;
  std::uint64_t bound = 0;
};

struct SplittingReport {
  std::vector<CardinalityViolation> cardinality_violations;
  /// Nodes below the safety frontier without two incomparable extensions.
  std::vector<TreeNode> non_branching;
  /// Non-branching nodes at or past the frontier; not failures.
  std::size_t indeterminate = 0;
  /// Levels with |L_k| < pi(k).
  std::uint64_t equality_shortfall = 0;

  bool passed() const noexcept { return cardinality_violations.empty() && non_branching.empty(); }
};

/// Checks |L_k| <= pi(k) for every k below the horizon and that every node
/// below `safety_frontier` branches.
SplittingReport verify_splitting(const PseudoTree& tree, std::uint64_t safety_frontier);

/// A finite branch surrogate: an element of 2^H.
struct BranchSample {
  SetWindow bits;

  friend bool operator==(const BranchSample&, const BranchSample&) = default;
};

/// One branch per maximal node: the node's string extended by zeros to H.
std::vector<BranchSample> frontier_branches(const PseudoTree& tree);

/// Levels m < H with L_m exactly {r restricted to f(m) : r in family}.
std::vector<std::uint64_t> verify_star(const PseudoTree& tree, std::span<const BranchSample> family);

/// Keeps the nodes that at least `min_support` sample branches pass through.
PseudoTree prune_thin(const PseudoTree& tree, std::span<const BranchSample> sample, std::size_t min_support);

struct AvoidingExtension {
  BitString extension;
  std::uint64_t level = 0;
  /// Distinct extensions generated before one missed the level.
  std::size_t candidates = 0;
};

/// Finds, at the smallest usable m in `targets`, an extension of `node` of
/// length f(m) that is not in L_m. Extension j writes j's binary digits
/// (least significant first) right after `node`; among pi(m) + 1 of them one
/// must miss a level holding at most pi(m) nodes. A target is usable when
/// f(m) >= |node| and 2^(f(m) - |node|) >= pi(m) + 1.
AvoidingExtension avoid_level_extension(const PseudoTree& tree, const BitString& node, const SetWindow& targets);

}  // namespace diamond
