#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pircsi/rational.hpp"

namespace pircsi {

/// Source of the protocol's random choices. Every randomized step in the
/// library reduces to uniform_below calls in a documented order, so a test
/// can drive a construction through an exact scripted trace and a seeded
/// generator yields byte-identical transcripts across platforms.
class ChoiceSource {
 public:
  virtual ~ChoiceSource() = default;

  /// Uniform integer in [0, bound). bound == 1 returns 0 and consumes nothing.
  virtual std::uint64_t uniform_below(std::uint64_t bound) = 0;

  /// Uniform BigInt in [0, bound); assembled from 64-bit draws by rejection.
  BigInt uniform_below_big(const BigInt& bound) {
    if (bound <= 0) throw std::invalid_argument("uniform_below_big: bound < 1");
    if (bound == 1) return 0;
    if (bound <= BigInt(UINT64_MAX))
      return BigInt(uniform_below(bound.convert_to<std::uint64_t>()));
    unsigned bits = boost::multiprecision::msb(bound) + 1;
    unsigned words = (bits + 63) / 64;
    for (;;) {
      BigInt v = 0;
      for (unsigned i = 0; i < words; ++i) {
        v <<= 64;
        v += raw_u64();
      }
      v >>= (words * 64 - bits);
      if (v < bound) return v;
    }
  }

 protected:
  // Full-width draw used only by uniform_below_big.
  virtual std::uint64_t raw_u64() { return uniform_below(UINT64_MAX); }
};

/// Deterministic splitmix64 generator. Not std::uniform_int_distribution on
/// purpose: its mapping is implementation-defined and transcripts must be
/// byte-identical across standard libraries.
class Rng final : public ChoiceSource {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t uniform_below(std::uint64_t bound) override {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound 0");
    if (bound == 1) return 0;
    // Rejection sampling to kill modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t r;
    do {
      r = next();
    } while (r >= limit);
    return r % bound;
  }

  /// Child generator derived from the current state and a tag; the parent
  /// stream is not advanced. Same (state, tag) always gives the same child.
  Rng fork(std::uint64_t tag) const {
    return Rng(mix(state_ ^ (0x9E3779B97F4A7C15ULL * (tag + 1))));
  }

 protected:
  std::uint64_t raw_u64() override { return next(); }

 private:
  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

/// Replays a fixed list of choices; used by tests that pin a construction to
/// a reference trace. Throws if a scripted value is out of range or the
/// script runs dry.
class ScriptedChoices final : public ChoiceSource {
 public:
  explicit ScriptedChoices(std::vector<std::uint64_t> values)
      : values_(std::move(values)) {}

  std::uint64_t uniform_below(std::uint64_t bound) override {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound 0");
    if (bound == 1) return 0;
    if (pos_ >= values_.size())
      throw std::runtime_error("ScriptedChoices: script exhausted");
    std::uint64_t v = values_[pos_++];
    if (v >= bound)
      throw std::runtime_error("ScriptedChoices: scripted value out of range");
    return v;
  }

  bool exhausted() const { return pos_ == values_.size(); }

 private:
  std::vector<std::uint64_t> values_;
  std::size_t pos_ = 0;
};

/// In-place Fisher-Yates; the canonical shuffle for every permutation the
/// protocols draw (within-group reorder, group order, symbol positions).
template <typename T>
void fisher_yates(std::vector<T>& items, ChoiceSource& src) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(src.uniform_below(i));
    std::swap(items[i - 1], items[j]);
  }
}

/// k distinct elements picked sequentially from `pool` (each pick uniform
/// over what remains), returned sorted ascending.
template <typename T>
std::vector<T> pick_distinct(std::vector<T> pool, std::size_t k, ChoiceSource& src) {
  if (k > pool.size())
    throw std::invalid_argument("pick_distinct: k exceeds pool size");
  std::vector<T> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = static_cast<std::size_t>(src.uniform_below(pool.size()));
    out.push_back(pool[j]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(j));
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Index into `weights` with probability proportional to the weight.
/// A single option consumes no randomness.
inline std::size_t pick_weighted(const std::vector<BigInt>& weights, ChoiceSource& src) {
  if (weights.empty()) throw std::invalid_argument("pick_weighted: empty");
  if (weights.size() == 1) return 0;
  BigInt total = 0;
  for (const auto& w : weights) {
    if (w < 0) throw std::invalid_argument("pick_weighted: negative weight");
    total += w;
  }
  if (total == 0) throw std::invalid_argument("pick_weighted: zero total weight");
  BigInt x = src.uniform_below_big(total);
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (x < weights[i]) return i;
    x -= weights[i];
  }
  return weights.size() - 1;  // unreachable
}

}  // namespace pircsi
