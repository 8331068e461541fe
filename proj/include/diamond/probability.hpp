#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "diamond/funcspec.hpp"
#include "diamond/guessing.hpp"

namespace diamond {

using Rational = boost::multiprecision::cpp_rational;

/// Decimal "p/q" (or "p" when q = 1).
std::string to_string(const Rational& r);

/// SplitMix64. Substreams are keyed by (seed, index) so that trial i draws
/// the same bits however the trials are scheduled.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static SplitMix64 substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next() noexcept;
  std::uint64_t operator()() noexcept { return next(); }
  /// Uniform in [0, bound) by rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;

  using result_type = std::uint64_t;
  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

 private:
  std::uint64_t state_;
};

/// [begin, end) over levels.
struct LevelWindow {
  std::uint64_t begin = 0;
  std::uint64_t end = 0;

  friend bool operator==(const LevelWindow&, const LevelWindow&) = default;
};

struct BCTerm {
  std::uint64_t level = 0;
  /// |A_n| or pi(n).
  std::uint64_t count = 0;
  std::uint64_t length = 0;
  double value = 0.0;

  /// count / 2^length.
  Rational exact() const;
};

/// Lengths up to this bound keep the running sums exact.
inline constexpr std::uint64_t kMaxExactSumLength = 1U << 16;

struct BCReport {
  LevelWindow window;
  std::vector<BCTerm> terms;
  /// partial_values[k] sums the first k + 1 terms, rounded from the exact
  /// running sum whenever that is kept.
  std::vector<double> partial_values;
  /// Exact window sum; absent when some f(n) exceeds kMaxExactSumLength.
  std::optional<Rational> total;
  /// The upper half of the window still adds at least 1/2.
  bool divergence_flag = false;

  double total_value() const noexcept { return partial_values.empty() ? 0.0 : partial_values.back(); }
};

/// Sum of pi(n) / 2^f(n) over the window. An overflowing pi(n) is an error.
BCReport bc_window_sum(const FuncSpec& pi, const FuncSpec& f, LevelWindow window);
/// Sum of |A_n| / 2^f(n) over the window, which must lie below the horizon.
BCReport bc_window_sum(const GuessingStructure& g, LevelWindow window);

/// Partial sums over [0, n).
inline BCReport bc_partial_sum(const FuncSpec& pi, const FuncSpec& f, std::uint64_t n) {
  return bc_window_sum(pi, f, {0, n});
}
inline BCReport bc_partial_sum(const GuessingStructure& g, std::uint64_t n) { return bc_window_sum(g, {0, n}); }

inline constexpr std::uint64_t kMaxExactBits = 20;

/// P(X ∩ f(n) ∈ A_n for some n in the window) for uniform X, by enumerating
/// every prefix of length max f(n) over the window (at most kMaxExactBits).
Rational exact_guess_measure(const GuessingStructure& g, LevelWindow window);

struct TrialReport {
  std::uint64_t seed = 0;
  std::uint64_t trials = 0;
  LevelWindow window;
  std::uint64_t hits = 0;
  double fraction = 0.0;
  double stderr_estimate = 0.0;
};

inline constexpr std::uint64_t kMinTrials = 100;

/// Fraction of uniform subjects guessed at one or more window levels. Trial
/// i draws its bits from SplitMix64::substream(seed, i).
TrialReport mc_guess_fraction(const GuessingStructure& g, LevelWindow window, std::uint64_t trials,
                              std::uint64_t seed);

/// A structure with min(pi(n), 2^f(n)) distinct random traces at each level
/// below the horizon, drawn from substream(seed, n).
GuessingStructure random_structure(const FuncSpec& pi, const FuncSpec& f, std::uint64_t horizon, std::uint64_t seed);

/// Uniform random subset of [0, horizon).
SetWindow random_window(std::uint64_t horizon, SplitMix64& rng);

}  // namespace diamond
