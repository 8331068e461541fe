#include "diamond/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_set>

#include "diamond/error.hpp"

namespace diamond {

namespace mp = boost::multiprecision;

std::string to_string(const Rational& r) {
  const mp::cpp_int num = mp::numerator(r);
  const mp::cpp_int den = mp::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// num / 2^shift rounded to double.
double dyadic_to_double(const mp::cpp_int& num, std::uint64_t shift) {
  if (num == 0) return 0.0;
  const std::size_t top = mp::msb(num);
  std::uint64_t drop = top > 62 ? top - 62 : 0;
  const auto head = static_cast<std::uint64_t>(num >> drop);
  const long long exponent = static_cast<long long>(drop) - static_cast<long long>(shift);
  if (exponent < std::numeric_limits<int>::min() / 2) return 0.0;
  return std::ldexp(static_cast<double>(head), static_cast<int>(exponent));
}

double term_value(std::uint64_t count, std::uint64_t length) {
  if (length > 4096) return 0.0;
  return std::ldexp(static_cast<double>(count), -static_cast<int>(length));
}

BCReport sum_terms(LevelWindow window, std::vector<BCTerm> terms) {
  BCReport report;
  report.window = window;
  report.terms = std::move(terms);
  const bool exact = std::all_of(report.terms.begin(), report.terms.end(),
                                 [](const BCTerm& t) { return t.length <= kMaxExactSumLength; });
  report.partial_values.reserve(report.terms.size());
  if (exact) {
    // Running sum kept as acc / 2^scale.
    mp::cpp_int acc = 0;
    std::uint64_t scale = 0;
    for (const BCTerm& t : report.terms) {
      if (t.length > scale) {
        acc <<= static_cast<unsigned>(t.length - scale);
        scale = t.length;
      }
      acc += mp::cpp_int(t.count) << static_cast<unsigned>(scale - t.length);
      report.partial_values.push_back(dyadic_to_double(acc, scale));
    }
    report.total = Rational(acc) / Rational(mp::cpp_int(1) << static_cast<unsigned>(scale));
  } else {
    // Neumaier compensated summation.
    double sum = 0.0;
    double carry = 0.0;
    for (const BCTerm& t : report.terms) {
      const double next = sum + t.value;
      carry += std::abs(sum) >= std::abs(t.value) ? (sum - next) + t.value : (t.value - next) + sum;
      sum = next;
      report.partial_values.push_back(sum + carry);
    }
  }
  const std::uint64_t mid = window.begin + (window.end - window.begin) / 2;
  double upper = 0.0;
  for (const BCTerm& t : report.terms) {
    if (t.level >= mid) upper += t.value;
  }
  report.divergence_flag = !report.terms.empty() && upper >= 0.5;
  return report;
}

void check_window(LevelWindow window) {
  if (window.begin > window.end) {
    throw PreconditionError("window [" + std::to_string(window.begin) + ", " + std::to_string(window.end) +
                            ") is reversed");
  }
}

// Fills `words` with fair bits, clearing any past `bits`.
std::vector<std::uint64_t> random_words(std::uint64_t bits, SplitMix64& rng) {
  std::vector<std::uint64_t> words((bits + 63) / 64);
  for (auto& w : words) w = rng.next();
  if (bits % 64 != 0) words.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
  return words;
}

BitString random_bits(std::uint64_t length, SplitMix64& rng) {
  return SetWindow::from_words(length, random_words(length, rng)).prefix(length);
}

}  // namespace

SplitMix64 SplitMix64::substream(std::uint64_t seed, std::uint64_t index) {
  return SplitMix64(mix(seed + kGolden) ^ mix(index + 2 * kGolden));
}

std::uint64_t SplitMix64::next() noexcept {
  state_ += kGolden;
  return mix(state_);
}

std::uint64_t SplitMix64::below(std::uint64_t bound) noexcept {
  const std::uint64_t limit = max() - max() % bound;
  std::uint64_t x = next();
  while (x >= limit) x = next();
  return x % bound;
}

Rational BCTerm::exact() const {
  return Rational(mp::cpp_int(count)) / Rational(mp::cpp_int(1) << static_cast<unsigned>(length));
}

BCReport bc_window_sum(const FuncSpec& pi, const FuncSpec& f, LevelWindow window) {
  check_window(window);
  std::vector<BCTerm> terms;
  terms.reserve(window.end - window.begin);
  for (std::uint64_t n = window.begin; n < window.end; ++n) {
    const auto count = pi.try_eval(n);
    if (!count) throw OverflowError("pi(" + std::to_string(n) + ") leaves the 64-bit range");
    const std::uint64_t length = f(n);
    terms.push_back({n, *count, length, term_value(*count, length)});
  }
  return sum_terms(window, std::move(terms));
}

BCReport bc_window_sum(const GuessingStructure& g, LevelWindow window) {
  check_window(window);
  if (window.end > g.horizon()) {
    throw HorizonError("window end " + std::to_string(window.end) + " past horizon " + std::to_string(g.horizon()));
  }
  std::vector<BCTerm> terms;
  terms.reserve(window.end - window.begin);
  for (std::uint64_t n = window.begin; n < window.end; ++n) {
    const std::uint64_t count = g.levels().size_at(n);
    const std::uint64_t length = g.f()(n);
    terms.push_back({n, count, length, term_value(count, length)});
  }
  return sum_terms(window, std::move(terms));
}

Rational exact_guess_measure(const GuessingStructure& g, LevelWindow window) {
  check_window(window);
  if (window.end > g.horizon()) {
    throw HorizonError("window end " + std::to_string(window.end) + " past horizon " + std::to_string(g.horizon()));
  }
  std::uint64_t bits = 0;
  for (std::uint64_t n = window.begin; n < window.end; ++n) bits = std::max(bits, g.f()(n));
  if (bits > kMaxExactBits) {
    throw PreconditionError("window reads " + std::to_string(bits) + " bits, exhaustive mode allows " +
                            std::to_string(kMaxExactBits));
  }
  const std::uint64_t total = std::uint64_t{1} << bits;
  std::vector<bool> guessed(total, false);
  for (const Level& level : g.levels().levels()) {
    if (level.index < window.begin || level.index >= window.end) continue;
    const std::uint64_t len = g.f()(level.index);
    for (const BitString& t : level.nodes) {
      // Every prefix agreeing with t on its first len bits.
      const std::uint64_t low = t.to_word();
      for (std::uint64_t high = 0; high < (total >> len); ++high) guessed[(high << len) | low] = true;
    }
  }
  const auto hits = static_cast<std::uint64_t>(std::count(guessed.begin(), guessed.end(), true));
  return Rational(mp::cpp_int(hits)) / Rational(mp::cpp_int(total));
}

TrialReport mc_guess_fraction(const GuessingStructure& g, LevelWindow window, std::uint64_t trials,
                              std::uint64_t seed) {
  check_window(window);
  if (trials < kMinTrials) {
    throw PreconditionError("need at least " + std::to_string(kMinTrials) + " trials, got " + std::to_string(trials));
  }
  if (window.end > g.horizon()) {
    throw HorizonError("window end " + std::to_string(window.end) + " past horizon " + std::to_string(g.horizon()));
  }
  std::vector<const Level*> active;
  std::uint64_t bits = 0;
  for (const Level& level : g.levels().levels()) {
    if (level.index < window.begin || level.index >= window.end) continue;
    active.push_back(&level);
    bits = std::max(bits, g.f()(level.index));
  }

  TrialReport report;
  report.seed = seed;
  report.trials = trials;
  report.window = window;
  for (std::uint64_t i = 0; i < trials; ++i) {
    if (active.empty()) break;
    SplitMix64 rng = SplitMix64::substream(seed, i);
    const MemberIndex subject(random_bits(bits, rng));
    const bool hit = std::any_of(active.begin(), active.end(), [&](const Level* level) {
      return g.levels().contains(level->index, subject.prefix(g.f()(level->index)));
    });
    if (hit) ++report.hits;
  }
  report.fraction = static_cast<double>(report.hits) / static_cast<double>(trials);
  report.stderr_estimate = std::sqrt(report.fraction * (1.0 - report.fraction) / static_cast<double>(trials));
  return report;
}

GuessingStructure random_structure(const FuncSpec& pi, const FuncSpec& f, std::uint64_t horizon, std::uint64_t seed) {
  constexpr std::uint64_t kMaxTraces = std::uint64_t{1} << 20;
  std::map<std::uint64_t, std::vector<BitString>> raw;
  for (std::uint64_t n = 0; n < horizon; ++n) {
    const std::uint64_t len = f(n);
    const auto bound = pi.try_eval(n);
    std::uint64_t count = bound.value_or(std::numeric_limits<std::uint64_t>::max());
    if (len < 64) count = std::min(count, std::uint64_t{1} << len);
    if (count == 0) continue;
    if (count > kMaxTraces) {
      throw PreconditionError("level " + std::to_string(n) + " would hold " + std::to_string(count) + " traces");
    }
    SplitMix64 rng = SplitMix64::substream(seed, n);
    std::vector<BitString>& out = raw[n];
    if (len < 64 && count * 2 > (std::uint64_t{1} << len)) {
      // Dense level: a partial shuffle of every trace.
      std::vector<std::uint64_t> all(std::uint64_t{1} << len);
      std::iota(all.begin(), all.end(), std::uint64_t{0});
      for (std::uint64_t i = 0; i < count; ++i) std::swap(all[i], all[i + rng.below(all.size() - i)]);
      for (std::uint64_t i = 0; i < count; ++i) out.push_back(BitString::from_word(all[i], len));
    } else {
      std::unordered_set<BitString> seen;
      while (seen.size() < count) {
        BitString t = random_bits(len, rng);
        if (seen.insert(t).second) out.push_back(std::move(t));
      }
    }
  }
  return GuessingStructure(pi, f, horizon, LevelMap(std::move(raw)));
}

SetWindow random_window(std::uint64_t horizon, SplitMix64& rng) {
  return SetWindow::from_words(horizon, random_words(horizon, rng));
}

}  // namespace diamond
