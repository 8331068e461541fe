#include "diamond/selector.hpp"

#include <string>

#include "diamond/error.hpp"
#include "diamond/probability.hpp"

namespace diamond {

FinitePartition::FinitePartition(std::vector<std::uint64_t> boundaries) : boundaries_(std::move(boundaries)) {
  if (boundaries_.empty() || boundaries_.front() != 0) {
    throw PreconditionError("partition boundaries must start at 0");
  }
  for (std::size_t i = 1; i < boundaries_.size(); ++i) {
    if (boundaries_[i] <= boundaries_[i - 1]) {
      throw PreconditionError("partition boundaries must increase strictly (index " + std::to_string(i) + ")");
    }
  }
}

FinitePartition FinitePartition::square_intervals(std::uint64_t horizon) {
  std::vector<std::uint64_t> b{0};
  for (std::uint64_t n = 1; b.back() < horizon; ++n) b.push_back(std::min(n * n, horizon));
  return FinitePartition(std::move(b));
}

SelectorResult extract_selector(const FinitePartition& p, const SetWindow& source) {
  if (source.horizon() != p.horizon()) {
    throw HorizonError("source horizon " + std::to_string(source.horizon()) + " differs from partition horizon " +
                       std::to_string(p.horizon()));
  }
  SelectorResult r;
  r.x = SetWindow(p.horizon());
  r.source_counts.reserve(p.size());
  r.hits.reserve(p.size());
  for (std::size_t t = 0; t < p.size(); ++t) {
    const std::uint64_t lo = p.begin(t);
    const std::uint64_t count = source.count_below(p.end(t)) - source.count_below(lo);
    r.source_counts.push_back(count);
    if (count == 1) {
      for (std::uint64_t n = lo; n < p.end(t); ++n) {
        if (source.test(n)) {
          r.x.set(n);
          break;
        }
      }
    }
    r.hits.push_back(r.x.count_below(p.end(t)) - r.x.count_below(lo));
  }
  return r;
}

SelectorTrials selector_vs_base(const FinitePartition& p, const FilterBase& base, std::uint64_t trials,
                                std::uint64_t seed) {
  if (trials == 0) throw PreconditionError("selector_vs_base needs at least one trial");
  if (base.horizon() != p.horizon()) {
    throw HorizonError("base horizon " + std::to_string(base.horizon()) + " differs from partition horizon " +
                       std::to_string(p.horizon()));
  }
  SelectorTrials report;
  report.seed = seed;
  report.trials = trials;
  report.generator_meets.assign(base.size(), 0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    SplitMix64 rng = SplitMix64::substream(seed, t);
    SelectorResult r = extract_selector(p, random_window(p.horizon(), rng));
    r.seed = seed;
    for (std::uint64_t h : r.hits) {
      if (h > 1) ++report.invariant_violations;
    }
    if (r.x.empty()) ++report.empty_selectors;
    bool all = true;
    for (std::size_t i = 0; i < base.size(); ++i) {
      if (r.x.intersects(base.generators()[i].window)) {
        ++report.generator_meets[i];
      } else {
        all = false;
      }
    }
    if (all) ++report.meets_all;
  }
  report.meet_fraction = static_cast<double>(report.meets_all) / static_cast<double>(trials);
  return report;
}

}  // namespace diamond
