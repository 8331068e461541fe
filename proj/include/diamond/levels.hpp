#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "diamond/bits.hpp"

namespace diamond {

/// One occupied level: its index and its nodes, sorted and distinct.
struct Level {
  std::uint64_t index = 0;
  std::vector<BitString> nodes;

  friend bool operator==(const Level&, const Level&) = default;
};

/// Level-indexed families of bit-strings, stored sparsely (empty levels are
/// absent). Shared by guessing sequences and pseudo-trees.
class LevelMap {
 public:
  LevelMap() = default;
  /// Sorts and deduplicates each level; empty levels are dropped.
  explicit LevelMap(std::map<std::uint64_t, std::vector<BitString>> raw);

  std::span<const Level> levels() const noexcept { return levels_; }
  std::span<const BitString> at(std::uint64_t index) const noexcept;
  std::size_t size_at(std::uint64_t index) const noexcept { return at(index).size(); }
  bool contains(std::uint64_t index, BitView s) const noexcept;
  bool empty() const noexcept { return levels_.empty(); }
  std::size_t node_count() const noexcept;
  std::optional<std::uint64_t> highest() const noexcept;

  friend bool operator==(const LevelMap&, const LevelMap&) = default;

 private:
  std::vector<Level> levels_;
};

}  // namespace diamond
