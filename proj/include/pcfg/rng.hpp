#pragma once

#include <cstdint>
#include <limits>

namespace pcfg {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b, std::uint64_t c);

/// Counter-based generator: the i-th output is a hash of (key, i). Copying
/// the state copies the stream; rekeying starts an independent one.
class Rng {
 public:
  using result_type = std::uint64_t;

  Rng() = default;
  explicit Rng(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return splitmix64(key_ + 0x9e3779b97f4a7c15ULL * ++counter_); }

  /// Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  void rekey(std::uint64_t key) {
    key_ = key;
    counter_ = 0;
  }
  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

  bool operator==(const Rng&) const = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace pcfg
