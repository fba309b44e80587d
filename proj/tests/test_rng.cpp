#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "hindsight/rng.hpp"
#include "hindsight/util.hpp"

using namespace hindsight;

TEST_CASE("streams are reproducible and order-independent") {
  rng::Stream a(42, rng::Tag::player, 7);
  rng::Stream b(42, rng::Tag::player, 7);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  // A different tag or index gives a different sequence.
  rng::Stream c(42, rng::Tag::player, 8);
  rng::Stream d(42, rng::Tag::group_signal, 7);
  rng::Stream e(42, rng::Tag::player, 7);
  bool differs_c = false, differs_d = false;
  for (int i = 0; i < 16; ++i) {
    const std::uint64_t ref = e.next_u64();
    differs_c = differs_c || c.next_u64() != ref;
    differs_d = differs_d || d.next_u64() != ref;
  }
  CHECK(differs_c);
  CHECK(differs_d);
}

TEST_CASE("uniforms live in the right intervals") {
  rng::Stream s(1, rng::Tag::check_draw);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = s.uniform_pos();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("normal draws match the first two moments") {
  rng::Stream s(2024, rng::Tag::check_draw);
  const int n = 1000000;
  double sum = 0.0, sum_sq = 0.0, sum_cu = 0.0;
  for (int i = 0; i < n / 2; ++i) {
    const auto [a, b] = s.normal_pair();
    sum += a + b;
    sum_sq += a * a + b * b;
    sum_cu += a * a * a + b * b * b;
  }
  const double mean = sum / n;
  const double var = sum_sq / n - mean * mean;
  const double skew = sum_cu / n;
  CHECK(std::abs(mean) < 3.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - 1.0) < 3.0 * std::sqrt(2.0 / static_cast<double>(n)));
  CHECK(std::abs(skew) < 3.0 * std::sqrt(15.0 / static_cast<double>(n)));
}

TEST_CASE("uniform bits pass a coarse chi-square check") {
  rng::Stream s(77, rng::Tag::check_draw);
  const int bins = 64;
  const int n = 640000;
  std::vector<int> counts(bins, 0);
  for (int i = 0; i < n; ++i) {
    ++counts[static_cast<std::size_t>(s.uniform() * bins)];
  }
  const double expected = static_cast<double>(n) / bins;
  double chi2 = 0.0;
  for (int c : counts) chi2 += sq(c - expected) / expected;
  // 63 dof: mean 63, sd ~11.2; 5 sigma band.
  CHECK(chi2 < 63.0 + 5.0 * 11.225);
  CHECK(chi2 > 63.0 - 5.0 * 11.225);
}
