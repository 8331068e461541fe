#include "diamond/levels.hpp"

#include <algorithm>

namespace diamond {

LevelMap::LevelMap(std::map<std::uint64_t, std::vector<BitString>> raw) {
  levels_.reserve(raw.size());
  for (auto& [index, nodes] : raw) {
    if (nodes.empty()) continue;
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    levels_.push_back({index, std::move(nodes)});
  }
}

std::span<const BitString> LevelMap::at(std::uint64_t index) const noexcept {
  const auto it = std::lower_bound(levels_.begin(), levels_.end(), index,
                                   [](const Level& l, std::uint64_t k) { return l.index < k; });
  if (it == levels_.end() || it->index != index) return {};
  return it->nodes;
}

bool LevelMap::contains(std::uint64_t index, BitView s) const noexcept {
  const auto nodes = at(index);
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), s, [](const BitString& a, BitView b) {
    return compare(a.view(), b) < 0;
  });
  return it != nodes.end() && equal(it->view(), s);
}

std::size_t LevelMap::node_count() const noexcept {
  std::size_t n = 0;
  for (const auto& l : levels_) n += l.nodes.size();
  return n;
}

std::optional<std::uint64_t> LevelMap::highest() const noexcept {
  if (levels_.empty()) return std::nullopt;
  return levels_.back().index;
}

}  // namespace diamond
