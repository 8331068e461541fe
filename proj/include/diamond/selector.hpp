#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "diamond/bits.hpp"
#include "diamond/filter_lab.hpp"

namespace diamond {

/// A partition of [0, H) into consecutive intervals, given by the
/// boundaries 0 = b_0 < b_1 < ... < b_k = H; piece t is [b_t, b_{t+1}).
class FinitePartition {
 public:
  explicit FinitePartition(std::vector<std::uint64_t> boundaries);

  /// Pieces [n^2, (n+1)^2), the last one cut at the horizon.
  static FinitePartition square_intervals(std::uint64_t horizon);

  std::uint64_t horizon() const noexcept { return boundaries_.back(); }
  std::size_t size() const noexcept { return boundaries_.size() - 1; }
  std::span<const std::uint64_t> boundaries() const noexcept { return boundaries_; }
  std::uint64_t begin(std::size_t piece) const { return boundaries_.at(piece); }
  std::uint64_t end(std::size_t piece) const { return boundaries_.at(piece + 1); }

  friend bool operator==(const FinitePartition&, const FinitePartition&) = default;

 private:
  std::vector<std::uint64_t> boundaries_;
};

struct SelectorResult {
  SetWindow x;
  /// Seed of the fair-bit source; absent for a supplied window.
  std::optional<std::uint64_t> seed;
  /// |piece ∩ G| per piece.
  std::vector<std::uint64_t> source_counts;
  /// |piece ∩ X| per piece.
  std::vector<std::uint64_t> hits;
};

/// X = union of piece ∩ G over the pieces meeting G at most once.
SelectorResult extract_selector(const FinitePartition& p, const SetWindow& source);

struct SelectorTrials {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  /// Trials whose selector meets every generator.
  std::uint64_t meets_all = 0;
  double meet_fraction = 0.0;
  /// Per generator, trials whose selector meets it.
  std::vector<std::uint64_t> generator_meets;
  /// Pieces hit twice or more, summed over trials; zero by construction.
  std::uint64_t invariant_violations = 0;
  std::uint64_t empty_selectors = 0;
};

/// Draws G from SplitMix64::substream(seed, t) for each trial t and checks
/// whether the extracted selector meets every generator.
SelectorTrials selector_vs_base(const FinitePartition& p, const FilterBase& base, std::uint64_t trials,
                                std::uint64_t seed);

}  // namespace diamond
