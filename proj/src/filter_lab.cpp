#include "diamond/filter_lab.hpp"

#include <algorithm>
#include <bit>
#include <functional>
#include <iterator>
#include <string>

namespace diamond {

namespace {

void check_window(const SetWindow& w, std::uint64_t horizon, const std::string& name) {
  if (w.horizon() != horizon) {
    throw HorizonError("generator " + name + " has horizon " + std::to_string(w.horizon()) + ", base has " +
                       std::to_string(horizon));
  }
}

// Calls visit(members) for every nonempty subset of [0, n) with at most
// `arity` elements, in lexicographic order of index lists. `visit` returns
// false to prune the subtree below the current subset.
void for_each_subfamily(std::size_t n, std::size_t arity,
                        const std::function<bool(const std::vector<std::size_t>&)>& visit) {
  std::vector<std::size_t> members;
  std::function<void(std::size_t)> rec = [&](std::size_t start) {
    for (std::size_t i = start; i < n; ++i) {
      members.push_back(i);
      if (visit(members) && members.size() < arity) rec(i + 1);
      members.pop_back();
    }
  };
  if (arity > 0) rec(0);
}

std::vector<std::uint64_t> intersect_sorted(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
  std::vector<std::uint64_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace

FilterBase::FilterBase(std::uint64_t horizon, std::vector<NamedWindow> generators)
    : horizon_(horizon), generators_(std::move(generators)) {
  for (const NamedWindow& g : generators_) check_window(g.window, horizon_, g.name);
}

void FilterBase::add(std::string name, SetWindow window) {
  check_window(window, horizon_, name);
  generators_.push_back({std::move(name), std::move(window)});
}

std::vector<std::size_t> FilterBase::empty_generators() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < generators_.size(); ++i) {
    if (generators_[i].window.empty()) out.push_back(i);
  }
  return out;
}

FilterBase base_from_tree(const PseudoTree& tree, std::span<const BranchSample> branches) {
  FilterBase base(tree.horizon());
  for (std::size_t i = 0; i < branches.size(); ++i) {
    const MemberIndex r(branches[i].bits);
    SetWindow hits(tree.horizon());
    for (const Level& level : tree.levels().levels()) {
      const std::uint64_t len = tree.f()(level.index);
      if (len > branches[i].bits.horizon()) {
        throw HorizonError("branch " + std::to_string(i) + " has horizon " +
                           std::to_string(branches[i].bits.horizon()) + ", level " + std::to_string(level.index) +
                           " needs " + std::to_string(len));
      }
      if (tree.levels().contains(level.index, r.prefix(len))) hits.set(level.index);
    }
    base.add("B" + std::to_string(i), std::move(hits));
  }
  return base;
}

bool FipReport::passed() const noexcept {
  return std::all_of(entries.begin(), entries.end(), [](const FipEntry& e) { return e.witness.has_value(); });
}

std::optional<FipEntry> FipReport::first_failure() const {
  for (const FipEntry& e : entries) {
    if (!e.witness) return e;
  }
  return std::nullopt;
}

FipReport check_fip(const FilterBase& base, std::size_t arity) {
  if (arity > base.size()) {
    throw PreconditionError("arity " + std::to_string(arity) + " exceeds the " + std::to_string(base.size()) +
                            " generators");
  }
  // Generators are usually sparse, so the walk runs on sorted member lists.
  std::vector<std::vector<std::uint64_t>> members;
  members.reserve(base.size());
  for (const NamedWindow& g : base.generators()) members.push_back(g.window.members());

  FipReport report;
  report.arity = arity;
  std::vector<std::vector<std::uint64_t>> stack;
  for_each_subfamily(base.size(), arity, [&](const std::vector<std::size_t>& family) {
    stack.resize(family.size() - 1);
    const auto& added = members[family.back()];
    stack.push_back(stack.empty() ? added : intersect_sorted(stack.back(), added));
    FipEntry entry{family, std::nullopt};
    if (!stack.back().empty()) entry.witness = stack.back().back();
    report.entries.push_back(std::move(entry));
    return true;
  });
  return report;
}

const char* to_string(SkyRelation r) noexcept {
  return r == SkyRelation::kLess ? "less" : "greater_eq";
}

const char* to_string(SkyOutcome o) noexcept {
  switch (o) {
    case SkyOutcome::kSupported:
      return "supported";
    case SkyOutcome::kRefutedAtHorizon:
      return "refuted_at_horizon";
    case SkyOutcome::kInconclusive:
      return "inconclusive";
  }
  return "inconclusive";
}

SetWindow sky_window(const FuncSpec& pi, const FuncSpec& f, const FuncSpec& g, std::uint64_t horizon) {
  SetWindow out(horizon);
  for (std::uint64_t n = 0; n < horizon; ++n) {
    const auto p = pi.try_eval(n);
    const auto lhs = p ? g.try_eval(*p) : std::nullopt;
    if (!lhs) continue;
    const auto rhs = f.try_eval(n);
    if (!rhs || *lhs < *rhs) out.set(n);
  }
  return out;
}

SkyVerdict sky_probe(const FuncSpec& pi, const FuncSpec& f, const FilterBase& base,
                     std::span<const FuncSpec> tests, const SkyOptions& options) {
  if (tests.empty()) throw PreconditionError("sky_probe needs at least one test function");
  const std::uint64_t h = base.horizon();
  SkyVerdict verdict;
  verdict.relation = options.relation;
  verdict.midpoint = options.midpoint.value_or(h / 2);
  if (verdict.midpoint >= h && h > 0) {
    throw PreconditionError("midpoint " + std::to_string(verdict.midpoint) + " at or past horizon " +
                            std::to_string(h));
  }
  const SetWindow tail = SetWindow::interval(h, verdict.midpoint, h);

  std::vector<std::pair<std::vector<std::size_t>, SetWindow>> probes;
  if (base.size() == 0) {
    probes.emplace_back(std::vector<std::size_t>{}, SetWindow::full(h));
  } else {
    std::vector<SetWindow> stack;
    for_each_subfamily(base.size(), std::min(options.probe_arity, base.size()),
                       [&](const std::vector<std::size_t>& family) {
                         stack.resize(family.size() - 1);
                         const SetWindow& added = base.generators()[family.back()].window;
                         stack.push_back(stack.empty() ? added : stack.back() & added);
                         probes.emplace_back(family, stack.back());
                         return true;
                       });
  }

  bool all_below = true;
  bool any_live = false;
  for (const FuncSpec& g : tests) {
    const SetWindow below = sky_window(pi, f, g, h);
    bool g_above_everywhere = true;
    for (const auto& [members, x] : probes) {
      SkyProbe probe;
      probe.test = g.str();
      probe.members = members;
      probe.window = x & below;
      const SetWindow x_tail = x & tail;
      probe.live = !x_tail.empty();
      probe.below_past_midpoint = probe.window.intersects(tail);
      probe.above_past_midpoint = !x_tail.subset_of(below);
      verdict.probes.push_back(probe);
      if (!probe.live) continue;
      any_live = true;
      g_above_everywhere = g_above_everywhere && probe.above_past_midpoint;
      if (!probe.below_past_midpoint && all_below) {
        all_below = false;
        verdict.counterexample = x_tail;
        verdict.deciding_probe = verdict.probes.size() - 1;
      }
    }
    if (options.relation == SkyRelation::kGreaterEq && any_live && g_above_everywhere && !verdict.witness_test) {
      verdict.witness_test = g.str();
    }
  }

  if (!any_live) {
    verdict.counterexample.reset();
    verdict.deciding_probe.reset();
    return verdict;
  }
  if (options.relation == SkyRelation::kLess) {
    verdict.outcome = all_below ? SkyOutcome::kSupported : SkyOutcome::kRefutedAtHorizon;
  } else {
    verdict.counterexample.reset();
    verdict.deciding_probe.reset();
    verdict.outcome = verdict.witness_test ? SkyOutcome::kSupported : SkyOutcome::kInconclusive;
  }
  return verdict;
}

Extension extend_good(const FilterBase& base, const FuncSpec& pi, const FuncSpec& f, const FuncSpec& g,
                      std::size_t arity) {
  FilterBase extended = base;
  extended.add("sky:" + g.str(), sky_window(pi, f, g, base.horizon()));
  FipReport report = check_fip(extended, std::min(arity, extended.size()));
  if (auto failure = report.first_failure()) {
    std::string names;
    for (std::size_t i : failure->members) {
      if (!names.empty()) names += ", ";
      names += extended.generators()[i].name;
    }
    throw FipError("adjoining sky:" + g.str() + " breaks FIP: {" + names + "} has empty intersection",
                   failure->members);
  }
  return {std::move(extended), std::move(report)};
}

IsbellFamily::IsbellFamily(std::uint64_t ground_cap, std::size_t max_support)
    : ground_cap_(ground_cap), max_support_(max_support) {
  if (ground_cap_ > kMaxIsbellCap) {
    throw PreconditionError("ground cap " + std::to_string(ground_cap_) + " above " + std::to_string(kMaxIsbellCap));
  }
  if (max_support_ > kMaxIsbellArity) {
    throw PreconditionError("support size " + std::to_string(max_support_) + " above " +
                            std::to_string(kMaxIsbellArity));
  }
  offsets_.push_back(0);
  for (std::uint32_t mask = 0; mask < (1U << ground_cap_); ++mask) {
    const int s = std::popcount(mask);
    if (static_cast<std::size_t>(s) > max_support_) continue;
    supports_.push_back(mask);
    offsets_.push_back(offsets_.back() + (std::uint64_t{1} << (1U << s)));
  }
}

IsbellPoint IsbellFamily::point(std::uint64_t position) const {
  if (position >= ground_size()) throw HorizonError("ground position " + std::to_string(position) + " out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), position);
  const std::size_t block = static_cast<std::size_t>(it - offsets_.begin()) - 1;
  return {supports_[block], static_cast<std::uint32_t>(position - offsets_[block])};
}

std::uint64_t IsbellFamily::position(IsbellPoint p) const {
  const auto it = std::lower_bound(supports_.begin(), supports_.end(), p.support);
  if (it == supports_.end() || *it != p.support) throw PreconditionError("support not in the ground set");
  const std::size_t block = static_cast<std::size_t>(it - supports_.begin());
  if (p.family >= offsets_[block + 1] - offsets_[block]) throw PreconditionError("family not over the support");
  return offsets_[block] + p.family;
}

void IsbellFamily::add_index(std::uint32_t x) {
  if (ground_cap_ < 32 && (x >> ground_cap_) != 0) throw HorizonError("index leaves [0, ground cap)");
  SetWindow set(ground_size());
  for (std::size_t block = 0; block < supports_.size(); ++block) {
    const std::uint32_t support = supports_[block];
    // Rank of F ∩ X among the subsets of F.
    std::uint32_t rank = 0;
    std::uint32_t bit = 0;
    for (std::uint32_t rest = support; rest != 0; rest &= rest - 1, ++bit) {
      if (x & (rest & -rest)) rank |= 1U << bit;
    }
    const std::uint64_t families = offsets_[block + 1] - offsets_[block];
    for (std::uint64_t fam = 0; fam < families; ++fam) {
      if ((fam >> rank) & 1U) set.set(offsets_[block] + fam);
    }
  }
  sets_.push_back(std::move(set));
}

IsbellFamily isbell_family(std::uint64_t ground_cap, std::span<const SetWindow> indices, std::size_t arity) {
  IsbellFamily family(ground_cap, arity * arity / 4);
  std::vector<std::uint32_t> masks;
  for (const SetWindow& x : indices) {
    std::uint32_t mask = 0;
    for (std::uint64_t m : x.members()) {
      if (m >= ground_cap) {
        throw HorizonError("index member " + std::to_string(m) + " at or past ground cap " + std::to_string(ground_cap));
      }
      mask |= 1U << m;
    }
    if (std::find(masks.begin(), masks.end(), mask) != masks.end()) {
      throw PreconditionError("index sets must be distinct");
    }
    masks.push_back(mask);
  }
  for (std::uint32_t mask : masks) family.add_index(mask);
  return family;
}

IndependenceReport check_independence(const IsbellFamily& family, std::size_t arity) {
  const auto sets = family.sets();
  IndependenceReport report;
  report.arity = arity;
  std::vector<std::size_t> in;
  std::vector<std::size_t> out;
  std::vector<SetWindow> complements;
  complements.reserve(sets.size());
  for (const SetWindow& s : sets) complements.push_back(s.complement());

  std::function<void(std::size_t, const SetWindow&)> rec = [&](std::size_t start, const SetWindow& current) {
    for (std::size_t i = start; i < sets.size() && !report.failure; ++i) {
      for (int side = 0; side < 2 && !report.failure; ++side) {
        const SetWindow next = current & (side == 0 ? sets[i] : complements[i]);
        (side == 0 ? in : out).push_back(i);
        ++report.combinations;
        if (next.empty()) {
          report.failure = std::make_pair(in, out);
        } else if (in.size() + out.size() < arity) {
          rec(i + 1, next);
        }
        (side == 0 ? in : out).pop_back();
      }
    }
  };
  rec(0, SetWindow::full(family.ground_size()));
  return report;
}

}  // namespace diamond
