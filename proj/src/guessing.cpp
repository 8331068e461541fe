#include "diamond/guessing.hpp"

#include <algorithm>
#include <map>
#include <string>

#include "diamond/error.hpp"

namespace diamond {

GuessingStructure::GuessingStructure(FuncSpec pi, FuncSpec f, std::uint64_t horizon, LevelMap levels)
    : pi_(std::move(pi)), f_(std::move(f)), horizon_(horizon), levels_(std::move(levels)) {
  for (std::uint64_t n = 0; n < horizon_; ++n) max_length_ = std::max(max_length_, f_(n));
  for (const Level& level : levels_.levels()) {
    const std::uint64_t n = level.index;
    if (n >= horizon_) {
      throw HorizonError("level " + std::to_string(n) + " at or past horizon " + std::to_string(horizon_));
    }
    const std::uint64_t len = f_(n);
    for (const BitString& s : level.nodes) {
      if (s.size() != len) {
        throw PreconditionError("level " + std::to_string(n) + " holds a trace of length " +
                                std::to_string(s.size()) + ", f(n) = " + std::to_string(len));
      }
    }
    // An overflowing bound exceeds every finite count.
    const auto bound = pi_.try_eval(n);
    if (bound && level.nodes.size() > *bound) {
      throw PreconditionError("level " + std::to_string(n) + " has " + std::to_string(level.nodes.size()) +
                              " traces, pi(n) = " + std::to_string(*bound));
    }
  }
}

GuessSet guess_levels(const GuessingStructure& g, const SetWindow& subject) {
  if (subject.horizon() < g.max_length()) {
    throw HorizonError("subject horizon " + std::to_string(subject.horizon()) + " below max f(n) = " +
                       std::to_string(g.max_length()));
  }
  const MemberIndex members(subject);
  SetWindow hits(g.horizon());
  for (const Level& level : g.levels().levels()) {
    if (g.levels().contains(level.index, members.prefix(g.f()(level.index)))) hits.set(level.index);
  }
  return {subject, std::move(hits)};
}

GuessingStructure restrict_guessing(const GuessingStructure& g, const FuncSpec& cut) {
  bool f_below = true;
  bool cut_below = true;
  for (std::uint64_t n = 0; n < g.horizon(); ++n) {
    const std::uint64_t fn = g.f()(n);
    const std::uint64_t cn = cut(n);
    f_below = f_below && fn <= cn;
    cut_below = cut_below && cn <= fn;
  }
  FuncSpec new_f = f_below ? g.f() : cut_below ? cut : FuncSpec::pointwise_min(g.f(), cut);
  std::map<std::uint64_t, std::vector<BitString>> raw;
  for (const Level& level : g.levels().levels()) {
    const std::uint64_t len = std::min(g.f()(level.index), cut(level.index));
    auto& out = raw[level.index];
    for (const BitString& s : level.nodes) out.push_back(s.prefix(len));
  }
  return GuessingStructure(g.pi(), std::move(new_f), g.horizon(), LevelMap(std::move(raw)));
}

GuessingStructure rk_transport(const GuessingStructure& g, const FuncSpec& p) {
  if (p == FuncSpec()) return g;
  std::map<std::uint64_t, std::vector<BitString>> raw;
  for (std::uint64_t i = 0; i < g.horizon(); ++i) {
    const std::uint64_t target = p(i);
    if (target >= g.horizon()) {
      throw HorizonError("p(" + std::to_string(i) + ") = " + std::to_string(target) + " leaves horizon " +
                         std::to_string(g.horizon()));
    }
    const auto level = g.level(target);
    if (!level.empty()) raw[i].assign(level.begin(), level.end());
  }
  return GuessingStructure(FuncSpec::compose(g.pi(), p), FuncSpec::compose(g.f(), p), g.horizon(),
                           LevelMap(std::move(raw)));
}

}  // namespace diamond
