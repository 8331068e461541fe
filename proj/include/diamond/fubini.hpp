#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "diamond/bits.hpp"
#include "diamond/guessing.hpp"

namespace diamond {

using Pair = std::pair<std::uint64_t, std::uint64_t>;

/// A bijection between pairs and naturals (row-major: onto its strip).
class PairCodec {
 public:
  enum class Kind { kCantor, kRowMajor };

  static PairCodec cantor() { return PairCodec(Kind::kCantor, 0); }
  /// n = i * width + j, for j < width.
  static PairCodec row_major(std::uint64_t width);
  /// "cantor" or "row-major:<width>".
  static PairCodec parse(const std::string& text);

  Kind kind() const noexcept { return kind_; }
  std::uint64_t width() const noexcept { return width_; }
  std::string name() const;

  /// Throws OverflowError past 64 bits and HorizonError for j >= width.
  std::uint64_t encode(std::uint64_t i, std::uint64_t j) const;
  Pair decode(std::uint64_t n) const;

  friend bool operator==(const PairCodec&, const PairCodec&) = default;

 private:
  PairCodec(Kind kind, std::uint64_t width) : kind_(kind), width_(width) {}

  Kind kind_;
  std::uint64_t width_;
};

/// Sum of guessing structures: level (i, j) is level j of structure i, with
/// pi(i, j) = pi_i(j) and f(i, j) = f_i(j).
class SumStructure {
 public:
  /// Throws HorizonError when the codec cannot encode some (i, j) with j
  /// below structure i's horizon.
  SumStructure(std::vector<GuessingStructure> components, PairCodec codec);

  std::span<const GuessingStructure> components() const noexcept { return components_; }
  const PairCodec& codec() const noexcept { return codec_; }
  /// One past the largest code of a pair in range.
  std::uint64_t horizon() const noexcept { return horizon_; }
  /// Longest trace any component reads.
  std::uint64_t max_length() const noexcept { return max_length_; }

  /// Codes of nonempty levels, increasing.
  std::span<const std::uint64_t> occupied() const noexcept { return occupied_; }

  /// Whether the code decodes to a pair (i, j) with i < I and j < H_i.
  bool in_range(std::uint64_t n) const;
  std::span<const BitString> level(std::uint64_t n) const;
  std::uint64_t pi(std::uint64_t n) const;
  std::uint64_t f(std::uint64_t n) const;

 private:
  std::vector<GuessingStructure> components_;
  PairCodec codec_;
  std::uint64_t horizon_ = 0;
  std::uint64_t max_length_ = 0;
  std::vector<std::uint64_t> occupied_;
};

SumStructure build_sum(std::vector<GuessingStructure> structures, PairCodec codec = PairCodec::cantor());

/// {(i, j) : X ∩ f_i(j) ∈ (A_i)_j}, read off the sum level by level in code
/// order and returned sorted.
std::vector<Pair> sum_guess_levels(const SumStructure& s, const SetWindow& subject);

/// The union over i of {i} × guess_levels(G_i, X).hits, sorted.
std::vector<Pair> rectangle_union(const SumStructure& s, const SetWindow& subject);

struct RectangleCheck {
  std::vector<Pair> sum;
  std::vector<Pair> rectangles;
  bool holds() const noexcept { return sum == rectangles; }
};

RectangleCheck check_rectangle_law(const SumStructure& s, const SetWindow& subject);

}  // namespace diamond
