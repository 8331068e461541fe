#pragma once

#include <cstdint>

#include "diamond/bits.hpp"
#include "diamond/funcspec.hpp"
#include "diamond/levels.hpp"

namespace diamond {

/// A guessing sequence truncated at a horizon: for each n < horizon a family
/// of traces of length f(n) with at most pi(n) members.
class GuessingStructure {
 public:
  /// Validates the length and cardinality invariants; duplicates are merged.
  GuessingStructure(FuncSpec pi, FuncSpec f, std::uint64_t horizon, LevelMap levels);

  const FuncSpec& pi() const noexcept { return pi_; }
  const FuncSpec& f() const noexcept { return f_; }
  std::uint64_t horizon() const noexcept { return horizon_; }
  const LevelMap& levels() const noexcept { return levels_; }
  std::span<const BitString> level(std::uint64_t n) const noexcept { return levels_.at(n); }

  /// max f(n) over n < horizon: the subject horizon the structure reads.
  std::uint64_t max_length() const noexcept { return max_length_; }

  friend bool operator==(const GuessingStructure& a, const GuessingStructure& b) noexcept {
    return a.horizon_ == b.horizon_ && a.pi_ == b.pi_ && a.f_ == b.f_ && a.levels_ == b.levels_;
  }

 private:
  FuncSpec pi_;
  FuncSpec f_;
  std::uint64_t horizon_;
  LevelMap levels_;
  std::uint64_t max_length_ = 0;
};

/// The levels at which a subject is guessed.
struct GuessSet {
  SetWindow subject;
  SetWindow hits;
};

/// hits = {n < H : subject ∩ f(n) ∈ A_n}.
/// Throws HorizonError when the subject is shorter than max f(n).
GuessSet guess_levels(const GuessingStructure& g, const SetWindow& subject);

/// Cuts every trace down to g(n): A'_n = {X ∩ g(n) : X ∈ A_n}. The result's
/// f is f itself where f <= g on the horizon, g where g <= f, and min(f, g)
/// otherwise.
GuessingStructure restrict_guessing(const GuessingStructure& g, const FuncSpec& cut);

/// Pulls the structure back along p: level i of the result is level p(i),
/// with pi o p and f o p. Throws HorizonError if p leaves [0, H).
GuessingStructure rk_transport(const GuessingStructure& g, const FuncSpec& p);

}  // namespace diamond
