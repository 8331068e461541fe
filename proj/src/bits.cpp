#include "diamond/bits.hpp"

#include <algorithm>
#include <bit>

#include "diamond/error.hpp"

namespace diamond {

std::strong_ordering compare(BitView a, BitView b) noexcept {
  const std::uint64_t common = std::min(a.size, b.size);
  std::size_t i = 0;
  while (i < a.ones.size() && i < b.ones.size() && a.ones[i] == b.ones[i]) ++i;
  constexpr auto kNone = ~std::uint64_t{0};
  const std::uint64_t pa = i < a.ones.size() ? a.ones[i] : kNone;
  const std::uint64_t pb = i < b.ones.size() ? b.ones[i] : kNone;
  // The first differing position holds a 1 in exactly one of the strings.
  if (std::min(pa, pb) < common) {
    return pa < pb ? std::strong_ordering::greater : std::strong_ordering::less;
  }
  return a.size <=> b.size;
}

BitView restrict_view(BitView v, std::uint64_t length) noexcept {
  const auto end = std::lower_bound(v.ones.begin(), v.ones.end(), length);
  return {v.ones.subspan(0, static_cast<std::size_t>(end - v.ones.begin())), length};
}

BitString::BitString(std::uint64_t size, std::vector<std::uint64_t> ones)
    : size_(size), ones_(std::move(ones)) {
  for (std::size_t i = 0; i < ones_.size(); ++i) {
    if (ones_[i] >= size_ || (i > 0 && ones_[i] <= ones_[i - 1])) {
      throw PreconditionError("bit positions must be increasing and below the length");
    }
  }
}

BitString BitString::parse(std::string_view chars) {
  BitString out(chars.size());
  for (std::size_t i = 0; i < chars.size(); ++i) {
    if (chars[i] == '1') {
      out.ones_.push_back(i);
    } else if (chars[i] != '0') {
      throw FormatError("bit-string contains '" + std::string(1, chars[i]) + "'");
    }
  }
  return out;
}

BitString BitString::from_word(std::uint64_t word, std::uint64_t size) {
  if (size > 64) throw PreconditionError("from_word needs size <= 64");
  if (size < 64) word &= (std::uint64_t{1} << size) - 1;
  BitString out(size);
  while (word != 0) {
    out.ones_.push_back(static_cast<std::uint64_t>(std::countr_zero(word)));
    word &= word - 1;
  }
  return out;
}

bool BitString::test(std::uint64_t i) const {
  if (i >= size_) throw HorizonError("bit index past the string length");
  return std::binary_search(ones_.begin(), ones_.end(), i);
}

std::uint64_t BitString::to_word() const {
  if (size_ > 64) throw PreconditionError("to_word needs size <= 64");
  std::uint64_t w = 0;
  for (auto p : ones_) w |= std::uint64_t{1} << p;
  return w;
}

BitString BitString::prefix(std::uint64_t length) const {
  if (length > size_) throw HorizonError("prefix longer than the string");
  return from_view(restrict_view(view(), length));
}

BitString BitString::zero_padded(std::uint64_t length) const {
  if (length < size_) throw PreconditionError("zero_padded cannot shorten");
  BitString out = *this;
  out.size_ = length;
  return out;
}

BitString BitString::flipped(std::uint64_t position) const {
  if (position >= size_) throw HorizonError("flip position past the string length");
  BitString out = *this;
  auto it = std::lower_bound(out.ones_.begin(), out.ones_.end(), position);
  if (it != out.ones_.end() && *it == position) {
    out.ones_.erase(it);
  } else {
    out.ones_.insert(it, position);
  }
  return out;
}

bool BitString::is_prefix_of(const BitString& other) const noexcept {
  return size_ <= other.size_ && equal(view(), restrict_view(other.view(), size_));
}

std::string BitString::str() const {
  std::string out(size_, '0');
  for (auto p : ones_) out[p] = '1';
  return out;
}

SetWindow::SetWindow(std::uint64_t horizon)
    : horizon_(horizon), words_((horizon + 63) / 64, 0) {}

SetWindow SetWindow::full(std::uint64_t horizon) {
  SetWindow w(horizon);
  std::fill(w.words_.begin(), w.words_.end(), ~std::uint64_t{0});
  w.clear_tail();
  return w;
}

SetWindow SetWindow::from_words(std::uint64_t horizon, std::vector<std::uint64_t> words) {
  if (words.size() != (horizon + 63) / 64) throw PreconditionError("word count does not match the horizon");
  SetWindow w;
  w.horizon_ = horizon;
  w.words_ = std::move(words);
  w.clear_tail();
  return w;
}

SetWindow SetWindow::interval(std::uint64_t horizon, std::uint64_t lo, std::uint64_t hi) {
  SetWindow w(horizon);
  hi = std::min(hi, horizon);
  for (std::uint64_t i = lo; i < hi; ++i) w.set(i);
  return w;
}

SetWindow SetWindow::from_members(std::uint64_t horizon, std::span<const std::uint64_t> members) {
  SetWindow w(horizon);
  for (auto m : members) w.set(m);
  return w;
}

SetWindow SetWindow::from_bits(const BitString& bits, std::uint64_t horizon) {
  if (bits.size() > horizon) throw HorizonError("bit-string longer than the window");
  return from_members(horizon, bits.ones());
}

void SetWindow::set(std::uint64_t i) {
  if (i >= horizon_) throw HorizonError("member " + std::to_string(i) + " outside horizon " + std::to_string(horizon_));
  words_[i >> 6] |= std::uint64_t{1} << (i & 63);
}

void SetWindow::reset(std::uint64_t i) {
  if (i >= horizon_) throw HorizonError("member " + std::to_string(i) + " outside horizon " + std::to_string(horizon_));
  words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
}

std::uint64_t SetWindow::count() const noexcept {
  std::uint64_t c = 0;
  for (auto w : words_) c += static_cast<std::uint64_t>(std::popcount(w));
  return c;
}

bool SetWindow::empty() const noexcept {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

std::vector<std::uint64_t> SetWindow::members() const {
  std::vector<std::uint64_t> out;
  for (std::size_t i = 0; i < words_.size(); ++i) {
    std::uint64_t w = words_[i];
    while (w != 0) {
      out.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

std::optional<std::uint64_t> SetWindow::first() const noexcept {
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if (words_[i] != 0) return i * 64 + static_cast<std::uint64_t>(std::countr_zero(words_[i]));
  }
  return std::nullopt;
}

std::optional<std::uint64_t> SetWindow::last() const noexcept {
  for (std::size_t i = words_.size(); i-- > 0;) {
    if (words_[i] != 0) return i * 64 + 63 - static_cast<std::uint64_t>(std::countl_zero(words_[i]));
  }
  return std::nullopt;
}

std::uint64_t SetWindow::count_below(std::uint64_t bound) const noexcept {
  bound = std::min(bound, horizon_);
  std::uint64_t c = 0;
  const std::size_t full_words = bound / 64;
  for (std::size_t i = 0; i < full_words; ++i) c += static_cast<std::uint64_t>(std::popcount(words_[i]));
  if (bound % 64 != 0) {
    c += static_cast<std::uint64_t>(std::popcount(words_[full_words] & ((std::uint64_t{1} << (bound % 64)) - 1)));
  }
  return c;
}

BitString SetWindow::prefix(std::uint64_t length) const {
  if (length > horizon_) throw HorizonError("prefix length " + std::to_string(length) + " exceeds horizon " + std::to_string(horizon_));
  std::vector<std::uint64_t> ones;
  const std::size_t nwords = (length + 63) / 64;
  for (std::size_t i = 0; i < nwords; ++i) {
    std::uint64_t w = words_[i];
    if (i + 1 == nwords && length % 64 != 0) w &= (std::uint64_t{1} << (length % 64)) - 1;
    while (w != 0) {
      ones.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return BitString(length, std::move(ones));
}

SetWindow& SetWindow::operator&=(const SetWindow& other) {
  check_same_horizon(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= other.words_[i];
  return *this;
}

SetWindow& SetWindow::operator|=(const SetWindow& other) {
  check_same_horizon(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
  return *this;
}

SetWindow& SetWindow::subtract(const SetWindow& other) {
  check_same_horizon(other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~other.words_[i];
  return *this;
}

SetWindow SetWindow::complement() const {
  SetWindow out = *this;
  for (auto& w : out.words_) w = ~w;
  out.clear_tail();
  return out;
}

bool SetWindow::intersects(const SetWindow& other) const {
  check_same_horizon(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & other.words_[i]) != 0) return true;
  }
  return false;
}

bool SetWindow::subset_of(const SetWindow& other) const {
  check_same_horizon(other);
  for (std::size_t i = 0; i < words_.size(); ++i) {
    if ((words_[i] & ~other.words_[i]) != 0) return false;
  }
  return true;
}

std::string SetWindow::to_hex() const {
  static constexpr char kDigits[] = "0123456789abcdef";
  const std::uint64_t nbytes = (horizon_ + 7) / 8;
  std::string out;
  out.reserve(nbytes * 2);
  for (std::uint64_t b = 0; b < nbytes; ++b) {
    const auto byte = static_cast<unsigned>((words_[b / 8] >> ((b % 8) * 8)) & 0xFFU);
    out.push_back(kDigits[byte >> 4]);
    out.push_back(kDigits[byte & 0xFU]);
  }
  return out;
}

SetWindow SetWindow::from_hex(std::string_view hex, std::uint64_t horizon) {
  if (hex.size() != ((horizon + 7) / 8) * 2) {
    throw FormatError("hex window has " + std::to_string(hex.size()) + " digits, horizon " +
                      std::to_string(horizon) + " needs " + std::to_string(((horizon + 7) / 8) * 2));
  }
  auto digit = [](char c) -> unsigned {
    if (c >= '0' && c <= '9') return static_cast<unsigned>(c - '0');
    if (c >= 'a' && c <= 'f') return static_cast<unsigned>(c - 'a' + 10);
    if (c >= 'A' && c <= 'F') return static_cast<unsigned>(c - 'A' + 10);
    throw FormatError("bad hex digit '" + std::string(1, c) + "'");
  };
  SetWindow w(horizon);
  for (std::uint64_t b = 0; b * 2 < hex.size(); ++b) {
    const std::uint64_t byte = digit(hex[b * 2]) * 16 + digit(hex[b * 2 + 1]);
    w.words_[b / 8] |= byte << ((b % 8) * 8);
  }
  const SetWindow trimmed = [&] {
    SetWindow t = w;
    t.clear_tail();
    return t;
  }();
  if (!(trimmed == w)) throw FormatError("hex window sets members past its horizon");
  return w;
}

void SetWindow::check_same_horizon(const SetWindow& other) const {
  if (horizon_ != other.horizon_) {
    throw HorizonError("window horizons differ: " + std::to_string(horizon_) + " vs " +
                       std::to_string(other.horizon_));
  }
}

void SetWindow::clear_tail() noexcept {
  if (horizon_ % 64 != 0 && !words_.empty()) {
    words_.back() &= (std::uint64_t{1} << (horizon_ % 64)) - 1;
  }
}

BitView MemberIndex::prefix(std::uint64_t length) const noexcept {
  return restrict_view(BitView{ones_, ~std::uint64_t{0}}, length);
}

}  // namespace diamond

std::size_t std::hash<diamond::BitString>::operator()(const diamond::BitString& s) const noexcept {
  std::uint64_t h = s.size() * 0x9E3779B97F4A7C15ULL;
  for (auto p : s.ones()) {
    h ^= p + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}
