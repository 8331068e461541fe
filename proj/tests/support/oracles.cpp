#include "oracles.hpp"

#include <algorithm>

namespace oracle {

std::uint64_t ruler(std::uint64_t n) {
  std::uint64_t m = n + 1;
  std::uint64_t v = 0;
  while (m % 2 == 0) {
    m /= 2;
    ++v;
  }
  return v;
}

DenseLevels dense_levels(const diamond::PseudoTree& tree) {
  DenseLevels out;
  for (const auto& level : tree.levels().levels()) {
    for (const auto& s : level.nodes) out[level.index].push_back(s.str());
  }
  return out;
}

bool is_prefix(const std::string& a, const std::string& b) {
  return a.size() <= b.size() && b.compare(0, a.size(), a) == 0;
}

namespace {

struct Node {
  std::uint64_t level;
  std::string bits;
};

std::vector<Node> nodes_below(const DenseLevels& levels, std::uint64_t bound) {
  std::vector<Node> out;
  for (const auto& [k, strings] : levels) {
    if (k >= bound) break;
    for (const auto& s : strings) out.push_back({k, s});
  }
  return out;
}

std::vector<Node> maximal(const std::vector<Node>& s) {
  std::vector<Node> out;
  for (const Node& a : s) {
    bool has_extension = false;
    for (const Node& b : s) {
      if (b.level > a.level && is_prefix(a.bits, b.bits)) {
        has_extension = true;
        break;
      }
    }
    if (!has_extension) out.push_back(a);
  }
  return out;
}

// Two extensions of `base` in `nodes` that are incomparable.
bool branches(const Node* base, const std::vector<Node>& nodes) {
  std::vector<const Node*> above;
  for (const Node& n : nodes) {
    if (base == nullptr || (n.level > base->level && is_prefix(base->bits, n.bits))) above.push_back(&n);
  }
  for (std::size_t i = 0; i < above.size(); ++i) {
    for (std::size_t j = i + 1; j < above.size(); ++j) {
      if (!is_prefix(above[i]->bits, above[j]->bits) && !is_prefix(above[j]->bits, above[i]->bits)) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<StageCheck> check_stage_conditions(const diamond::PseudoTree& tree, std::uint64_t (*pi)(std::uint64_t)) {
  const DenseLevels levels = dense_levels(tree);
  const auto marks = tree.stage_marks();
  std::vector<StageCheck> out;
  if (marks.empty()) return out;
  for (std::size_t n = 0; n + 1 < marks.size(); ++n) {
    StageCheck c;
    c.stage = n;
    auto fail = [&](const std::string& why) {
      if (c.ok) c.failure = why;
      c.ok = false;
    };
    const std::uint64_t lo = marks[n];
    const std::uint64_t hi = marks[n + 1];
    if (hi <= lo) fail("marks not increasing");
    const std::vector<Node> s_n = nodes_below(levels, lo);
    const std::vector<Node> s_next = nodes_below(levels, hi);
    // (i): every node of S_{n+1} has length at most m_{n+1}.
    for (const Node& x : s_next) {
      if (x.bits.size() > hi) fail("(i) node longer than its mark");
    }
    // (iii)
    for (const auto& [k, strings] : levels) {
      if (k < hi && strings.size() > pi(k)) fail("(iii) level " + std::to_string(k) + " above pi");
    }
    const std::vector<Node> max_n = maximal(s_n);
    // (iv): new nodes sit above a maximal node of S_n (the virtual root when S_n is empty).
    std::vector<Node> added;
    for (const Node& x : s_next) {
      if (x.level >= lo) added.push_back(x);
    }
    for (const Node& x : added) {
      if (max_n.empty()) continue;
      const bool above = std::any_of(max_n.begin(), max_n.end(),
                                     [&](const Node& m) { return m.level < x.level && is_prefix(m.bits, x.bits); });
      if (!above) fail("(iv) node at level " + std::to_string(x.level) + " not above a maximal node");
    }
    if (n % 2 == 0) {
      // (v)
      if (max_n.empty()) {
        if (!branches(nullptr, s_next)) fail("(v) root does not branch");
      }
      for (const Node& m : max_n) {
        if (!branches(&m, s_next)) fail("(v) maximal node at level " + std::to_string(m.level) + " does not branch");
      }
    } else {
      // (vi), first part
      for (const Node& m : max_n) {
        if (branches(&m, s_next)) fail("(vi) maximal node at level " + std::to_string(m.level) + " branches");
      }
      // (vi), second part: for every nonempty F a level in [lo, hi) reached by all of F with |F| <= pi.
      const std::size_t d = max_n.size();
      std::vector<std::pair<std::uint64_t, std::uint64_t>> reach;  // (level, mask of maximal nodes extended there)
      for (const auto& [k, strings] : levels) {
        if (k < lo || k >= hi) continue;
        std::uint64_t mask = 0;
        for (std::size_t i = 0; i < d; ++i) {
          for (const auto& s : strings) {
            if (is_prefix(max_n[i].bits, s)) mask |= std::uint64_t{1} << i;
          }
        }
        reach.emplace_back(k, mask);
      }
      for (std::uint64_t f = 1; f < (std::uint64_t{1} << d); ++f) {
        const auto size = static_cast<std::uint64_t>(__builtin_popcountll(f));
        const bool found = std::any_of(reach.begin(), reach.end(), [&](const auto& r) {
          return (r.second & f) == f && size <= pi(r.first);
        });
        if (!found) fail("(vi) no level for subset mask " + std::to_string(f));
      }
    }
    out.push_back(c);
  }
  return out;
}

std::optional<std::uint64_t> largest_common(const std::vector<std::vector<bool>>& windows) {
  if (windows.empty()) return std::nullopt;
  for (std::size_t n = windows.front().size(); n-- > 0;) {
    if (std::all_of(windows.begin(), windows.end(), [&](const std::vector<bool>& w) { return w[n]; })) return n;
  }
  return std::nullopt;
}

std::vector<bool> dense(const diamond::SetWindow& w) {
  std::vector<bool> out(w.horizon());
  for (std::uint64_t i = 0; i < w.horizon(); ++i) out[i] = w.test(i);
  return out;
}

bool guessed(const std::vector<bool>& subject, std::uint64_t length, const std::vector<std::string>& traces) {
  std::string prefix;
  for (std::uint64_t i = 0; i < length; ++i) prefix.push_back(subject[i] ? '1' : '0');
  return std::find(traces.begin(), traces.end(), prefix) != traces.end();
}

}  // namespace oracle
