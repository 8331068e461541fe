#include "diamond/fubini.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "diamond/error.hpp"

namespace diamond {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  if (a > std::numeric_limits<std::uint64_t>::max() - b) throw OverflowError("pair code leaves the 64-bit range");
  return a + b;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
    throw OverflowError("pair code leaves the 64-bit range");
  }
  return a * b;
}

}  // namespace

PairCodec PairCodec::row_major(std::uint64_t width) {
  if (width == 0) throw PreconditionError("row-major codec needs a positive width");
  return PairCodec(Kind::kRowMajor, width);
}

PairCodec PairCodec::parse(const std::string& text) {
  if (text == "cantor") return cantor();
  const std::string prefix = "row-major:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      return row_major(std::stoull(digits));
    }
  }
  throw FormatError("unknown pair codec '" + text + "'");
}

std::string PairCodec::name() const {
  return kind_ == Kind::kCantor ? "cantor" : "row-major:" + std::to_string(width_);
}

std::uint64_t PairCodec::encode(std::uint64_t i, std::uint64_t j) const {
  if (kind_ == Kind::kRowMajor) {
    if (j >= width_) {
      throw HorizonError("column " + std::to_string(j) + " does not fit row width " + std::to_string(width_));
    }
    return checked_add(checked_mul(i, width_), j);
  }
  const std::uint64_t w = checked_add(i, j);
  // w(w+1)/2 without overflowing the intermediate product.
  const std::uint64_t tri = w % 2 == 0 ? checked_mul(w / 2, w + 1) : checked_mul(w, w / 2 + 1);
  return checked_add(tri, j);
}

Pair PairCodec::decode(std::uint64_t n) const {
  if (kind_ == Kind::kRowMajor) return {n / width_, n % width_};
  // Largest w with w(w+1)/2 <= n, from a float estimate.
  auto w = static_cast<std::uint64_t>((std::sqrt(8.0L * static_cast<long double>(n) + 1) - 1) / 2);
  auto tri = [](std::uint64_t v) { return static_cast<unsigned __int128>(v) * (v + 1) / 2; };
  while (tri(w) > n) --w;
  while (tri(w + 1) <= n) ++w;
  const auto j = static_cast<std::uint64_t>(n - tri(w));
  return {w - j, j};
}

SumStructure::SumStructure(std::vector<GuessingStructure> components, PairCodec codec)
    : components_(std::move(components)), codec_(codec) {
  for (std::uint64_t i = 0; i < components_.size(); ++i) {
    const GuessingStructure& g = components_[i];
    max_length_ = std::max(max_length_, g.max_length());
    if (g.horizon() == 0) continue;
    // Codes grow in j for fixed i under both codecs.
    horizon_ = std::max(horizon_, codec_.encode(i, g.horizon() - 1) + 1);
    for (const Level& level : g.levels().levels()) occupied_.push_back(codec_.encode(i, level.index));
  }
  std::sort(occupied_.begin(), occupied_.end());
}

bool SumStructure::in_range(std::uint64_t n) const {
  const auto [i, j] = codec_.decode(n);
  return i < components_.size() && j < components_[i].horizon();
}

std::span<const BitString> SumStructure::level(std::uint64_t n) const {
  if (!in_range(n)) return {};
  const auto [i, j] = codec_.decode(n);
  return components_[i].level(j);
}

std::uint64_t SumStructure::pi(std::uint64_t n) const {
  if (!in_range(n)) throw HorizonError("code " + std::to_string(n) + " is not a pair in range");
  const auto [i, j] = codec_.decode(n);
  return components_[i].pi()(j);
}

std::uint64_t SumStructure::f(std::uint64_t n) const {
  if (!in_range(n)) throw HorizonError("code " + std::to_string(n) + " is not a pair in range");
  const auto [i, j] = codec_.decode(n);
  return components_[i].f()(j);
}

SumStructure build_sum(std::vector<GuessingStructure> structures, PairCodec codec) {
  return SumStructure(std::move(structures), codec);
}

std::vector<Pair> sum_guess_levels(const SumStructure& s, const SetWindow& subject) {
  if (subject.horizon() < s.max_length()) {
    throw HorizonError("subject horizon " + std::to_string(subject.horizon()) + " below max length " +
                       std::to_string(s.max_length()));
  }
  const MemberIndex x(subject);
  std::vector<Pair> out;
  for (std::uint64_t n : s.occupied()) {
    const auto level = s.level(n);
    const BitView trace = x.prefix(s.f(n));
    const bool hit = std::any_of(level.begin(), level.end(), [&](const BitString& t) { return equal(t.view(), trace); });
    if (hit) out.push_back(s.codec().decode(n));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Pair> rectangle_union(const SumStructure& s, const SetWindow& subject) {
  std::vector<Pair> out;
  const auto components = s.components();
  for (std::uint64_t i = 0; i < components.size(); ++i) {
    for (std::uint64_t j : guess_levels(components[i], subject).hits.members()) out.emplace_back(i, j);
  }
  return out;
}

RectangleCheck check_rectangle_law(const SumStructure& s, const SetWindow& subject) {
  return {sum_guess_levels(s, subject), rectangle_union(s, subject)};
}

}  // namespace diamond
