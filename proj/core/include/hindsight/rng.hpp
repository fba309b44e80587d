#pragma once

#include <cmath>
#include <cstdint>
#include <utility>

namespace hindsight::rng {

// Stream tags. Every random quantity in the project is drawn from a stream
// keyed by (root seed, tag, indices), so results never depend on iteration
// order or on how replications are scheduled across workers.
enum class Tag : std::uint64_t {
  group_signal = 1,
  player = 2,
  multiplier = 3,
  replication_sim = 4,
  replication_boot = 5,
  check_draw = 6,
};

namespace detail {
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}
}  // namespace detail

inline std::uint64_t derive_key(std::uint64_t root, std::uint64_t a,
                                std::uint64_t b = 0, std::uint64_t c = 0) {
  std::uint64_t k = detail::mix64(root);
  k = detail::mix64(k ^ a);
  k = detail::mix64(k ^ b);
  k = detail::mix64(k ^ c);
  return k;
}

inline std::uint64_t derive_key(std::uint64_t root, Tag tag, std::uint64_t b = 0,
                                std::uint64_t c = 0) {
  return derive_key(root, static_cast<std::uint64_t>(tag), b, c);
}

// Counter-based stream: output i is a strong 64-bit hash of (key, i).
// Draws are therefore a pure function of the key, independent of any other
// stream, and reproducible bit for bit on any platform.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : key_(key) {}
  Stream(std::uint64_t root, Tag tag, std::uint64_t b = 0, std::uint64_t c = 0)
      : key_(derive_key(root, tag, b, c)) {}

  std::uint64_t next_u64() {
    std::uint64_t x = key_ + counter_ * 0x9E3779B97F4A7C15ULL;
    ++counter_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  // Uniform on (0,1].
  double uniform_pos() {
    return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
  }

  // Uniform on [0,1).
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Two independent standard normals (Box-Muller).
  std::pair<double, double> normal_pair() {
    const double u1 = uniform_pos();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.28318530717958647693 * u2;
    return {r * std::cos(a), r * std::sin(a)};
  }

  double normal() { return normal_pair().first; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace hindsight::rng
