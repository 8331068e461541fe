#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace diamond {

/// Read-only view of a finite bit-string: its length and the sorted
/// positions of its 1-bits. Position i is the membership bit of i, so the
/// string "001" is the set {2} truncated at 3.
struct BitView {
  std::span<const std::uint64_t> ones;
  std::uint64_t size = 0;
};

/// Lexicographic order on bit-strings ('0' < '1', a proper prefix sorts first).
std::strong_ordering compare(BitView a, BitView b) noexcept;

inline bool equal(BitView a, BitView b) noexcept {
  return a.size == b.size && a.ones.size() == b.ones.size() &&
         std::equal(a.ones.begin(), a.ones.end(), b.ones.begin());
}

/// The first `length` bits of a view (`length` <= `v.size`).
BitView restrict_view(BitView v, std::uint64_t length) noexcept;

/// A finite bit-string stored sparsely.
///
/// Tree nodes built by the splitting construction are long (millions of
/// bits at eight stages) but carry only a handful of 1-bits, so only the
/// positions of the ones are kept.
class BitString {
 public:
  BitString() = default;

  /// The all-zero string of the given length.
  explicit BitString(std::uint64_t size) : size_(size) {}

  /// `ones` must be strictly increasing and below `size`.
  BitString(std::uint64_t size, std::vector<std::uint64_t> ones);

  /// Parses a string of '0'/'1' characters.
  static BitString parse(std::string_view chars);

  /// Bit i of the result is bit i of `word`; `size` <= 64.
  static BitString from_word(std::uint64_t word, std::uint64_t size);

  static BitString from_view(BitView v) {
    return BitString(v.size, std::vector<std::uint64_t>(v.ones.begin(), v.ones.end()));
  }

  std::uint64_t size() const noexcept { return size_; }
  std::span<const std::uint64_t> ones() const noexcept { return ones_; }
  BitView view() const noexcept { return {ones_, size_}; }
  bool test(std::uint64_t i) const;

  /// Packs the string into a word (bit i = position i). Requires size <= 64.
  std::uint64_t to_word() const;

  BitString prefix(std::uint64_t length) const;
  BitString zero_padded(std::uint64_t length) const;
  BitString flipped(std::uint64_t position) const;
  bool is_prefix_of(const BitString& other) const noexcept;

  /// The '0'/'1' rendering.
  std::string str() const;

  friend bool operator==(const BitString& a, const BitString& b) noexcept {
    return equal(a.view(), b.view());
  }
  friend std::strong_ordering operator<=>(const BitString& a, const BitString& b) noexcept {
    return compare(a.view(), b.view());
  }

 private:
  std::uint64_t size_ = 0;
  std::vector<std::uint64_t> ones_;
};

/// A subset of [0, horizon) as a dense bitset: the finite shadow of a
/// subset of omega truncated at the horizon.
class SetWindow {
 public:
  SetWindow() = default;
  explicit SetWindow(std::uint64_t horizon);

  static SetWindow full(std::uint64_t horizon);
  /// Word i holds members 64i..64i+63; bits at or past the horizon are dropped.
  static SetWindow from_words(std::uint64_t horizon, std::vector<std::uint64_t> words);
  static SetWindow interval(std::uint64_t horizon, std::uint64_t lo, std::uint64_t hi);
  static SetWindow from_members(std::uint64_t horizon, std::span<const std::uint64_t> members);
  static SetWindow from_members(std::uint64_t horizon, std::initializer_list<std::uint64_t> members) {
    return from_members(horizon, std::span<const std::uint64_t>(members.begin(), members.size()));
  }
  /// The members of `bits`, placed in a window of the given horizon.
  static SetWindow from_bits(const BitString& bits, std::uint64_t horizon);

  std::uint64_t horizon() const noexcept { return horizon_; }
  bool test(std::uint64_t i) const noexcept {
    return i < horizon_ && ((words_[i >> 6] >> (i & 63)) & 1U) != 0;
  }
  void set(std::uint64_t i);
  void reset(std::uint64_t i);

  std::uint64_t count() const noexcept;
  bool empty() const noexcept;
  std::vector<std::uint64_t> members() const;
  std::optional<std::uint64_t> first() const noexcept;
  std::optional<std::uint64_t> last() const noexcept;
  /// Number of members below `bound`.
  std::uint64_t count_below(std::uint64_t bound) const noexcept;

  /// Characteristic string of this set intersected with [0, length).
  /// Requires length <= horizon.
  BitString prefix(std::uint64_t length) const;

  SetWindow& operator&=(const SetWindow& other);
  SetWindow& operator|=(const SetWindow& other);
  SetWindow& subtract(const SetWindow& other);
  SetWindow complement() const;
  friend SetWindow operator&(SetWindow a, const SetWindow& b) { return a &= b; }
  friend SetWindow operator|(SetWindow a, const SetWindow& b) { return a |= b; }

  bool intersects(const SetWindow& other) const;
  bool subset_of(const SetWindow& other) const;

  std::span<const std::uint64_t> words() const noexcept { return words_; }

  /// Two lowercase hex digits per byte; byte b holds members 8b..8b+7 with
  /// member 8b+i in bit i.
  std::string to_hex() const;
  static SetWindow from_hex(std::string_view hex, std::uint64_t horizon);

  friend bool operator==(const SetWindow&, const SetWindow&) = default;

 private:
  void check_same_horizon(const SetWindow& other) const;
  void clear_tail() noexcept;

  std::uint64_t horizon_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Sorted member list of a window, used for repeated prefix queries.
class MemberIndex {
 public:
  explicit MemberIndex(const SetWindow& window) : ones_(window.members()) {}
  explicit MemberIndex(const BitString& bits) : ones_(bits.ones().begin(), bits.ones().end()) {}

  /// The characteristic string of the set intersected with [0, length).
  BitView prefix(std::uint64_t length) const noexcept;

 private:
  std::vector<std::uint64_t> ones_;
};

}  // namespace diamond

template <>
struct std::hash<diamond::BitString> {
  std::size_t operator()(const diamond::BitString& s) const noexcept;
};
