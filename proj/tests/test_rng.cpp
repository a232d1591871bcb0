#include <doctest.h>

#include <cmath>

#include "orlab/rng.hpp"

using namespace orlab;

TEST_CASE("same seed reproduces the stream bit for bit") {
  Rng a(12345), b(12345);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("derived child seeds differ across indices and bases") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
  CHECK(derive_seed(0, 0) != derive_seed(0, 1));
}

TEST_CASE("uniform stays in [0,1) and has the right mean") {
  Rng r(7);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);
}

TEST_CASE("gamma sampler matches analytic mean and variance") {
  // Duration laws used by the lab: (2,2), (3,3), (6,4), (7,5).
  const double shapes[] = {2, 3, 6, 7};
  const double scales[] = {2, 3, 4, 5};
  Rng r(42);
  for (int c = 0; c < 4; ++c) {
    const int n = 400000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = r.gamma(shapes[c], scales[c]);
      REQUIRE(x > 0.0);
      sum += x;
      sum2 += x * x;
    }
    const double mean = sum / n;
    const double var = sum2 / n - mean * mean;
    const double m = shapes[c] * scales[c];
    const double v = shapes[c] * scales[c] * scales[c];
    CHECK(std::abs(mean - m) / m < 0.01);
    CHECK(std::abs(var - v) / v < 0.03);
  }
}

TEST_CASE("gamma sampler handles shape below one via the boost branch") {
  Rng r(9);
  const int n = 300000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += r.gamma(0.5, 2.0);
  CHECK(std::abs(sum / n - 1.0) < 0.02);
}

TEST_CASE("poisson sampler matches the small rates used for arrivals") {
  Rng r(99);
  const int n = 1000000;
  long total = 0;
  for (int i = 0; i < n; ++i) total += r.poisson(0.08);
  CHECK(std::abs(static_cast<double>(total) / n - 0.08) < 0.002);
}
