#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ubo/slice.hpp"

#include <cmath>
#include <limits>

using namespace ubo;

TEST_CASE("standard normal moments are recovered") {
  auto log_target = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  Rng rng(42);
  const auto samples =
      slice_sample(log_target, Vector::Zero(1), 4000, 200, rng);
  REQUIRE(samples.size() == 4000);
  double mean = 0.0, var = 0.0;
  for (const auto& s : samples) mean += s(0);
  mean /= samples.size();
  for (const auto& s : samples) var += (s(0) - mean) * (s(0) - mean);
  var /= samples.size();
  // MCMC samples are autocorrelated; tolerances are loose but would catch a
  // wrong target (e.g. missing 0.5 factor gives var 0.5 or 2).
  CHECK(std::abs(mean) < 0.1);
  CHECK(var == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("correlated 2d gaussian: marginal variances and sign of correlation") {
  Matrix prec(2, 2);
  prec << 2.0, -1.2, -1.2, 2.0;  // covariance = prec^{-1}
  const Matrix cov = prec.inverse();
  auto log_target = [&](const Vector& x) { return -0.5 * x.dot(prec * x); };
  Rng rng(7);
  const auto samples = slice_sample(log_target, Vector::Zero(2), 6000, 300, rng);
  Vector mean = Vector::Zero(2);
  for (const auto& s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  Matrix emp = Matrix::Zero(2, 2);
  for (const auto& s : samples) emp += (s - mean) * (s - mean).transpose();
  emp /= static_cast<double>(samples.size());
  CHECK(emp(0, 0) == doctest::Approx(cov(0, 0)).epsilon(0.2));
  CHECK(emp(1, 1) == doctest::Approx(cov(1, 1)).epsilon(0.2));
  CHECK(emp(0, 1) == doctest::Approx(cov(0, 1)).epsilon(0.3));
}

TEST_CASE("bounded support is respected") {
  auto log_target = [](const Vector& x) {
    if (x(0) < 0.0 || x(0) > 1.0) return -std::numeric_limits<double>::infinity();
    return 0.0;
  };
  Rng rng(3);
  const auto samples = slice_sample(log_target, Vector::Constant(1, 0.5), 2000, 50, rng);
  double mean = 0.0;
  for (const auto& s : samples) {
    CHECK(s(0) >= 0.0);
    CHECK(s(0) <= 1.0);
    mean += s(0);
  }
  mean /= samples.size();
  CHECK(mean == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("a non-finite starting density is rejected") {
  auto log_target = [](const Vector&) { return -std::numeric_limits<double>::infinity(); };
  Rng rng(1);
  CHECK_THROWS_AS(slice_sample(log_target, Vector::Zero(1), 10, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  auto log_target = [](const Vector& x) { return -0.5 * x.squaredNorm(); };
  Rng a(99), b(99);
  const auto sa = slice_sample(log_target, Vector::Zero(2), 20, 10, a);
  const auto sb = slice_sample(log_target, Vector::Zero(2), 20, 10, b);
  for (std::size_t i = 0; i < sa.size(); ++i) CHECK(sa[i] == sb[i]);
}
