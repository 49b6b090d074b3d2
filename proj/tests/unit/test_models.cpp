#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stepwise/error.hpp"
#include "stepwise/models.hpp"
#include "stepwise/normal.hpp"
#include "stepwise/quadrature.hpp"

using namespace stepwise;

TEST_CASE("normal cdf and quantile reference values") {
  CHECK(normal::quantile(0.95) == doctest::Approx(1.6448536269514722).epsilon(1e-14));
  CHECK(normal::upper_quantile(0.025) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(normal::cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-14));
  CHECK(normal::sf(8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
  CHECK(normal::quantile(0.0) == -kInf);
  CHECK(normal::quantile(1.0) == kInf);
  for (double p : {1e-12, 1e-6, 0.01, 0.3, 0.5, 0.77, 0.999999}) {
    CHECK(oracle::Phi(normal::quantile(p)) == doctest::Approx(p).epsilon(1e-12));
  }
}

TEST_CASE("model construction validates arguments") {
  CHECK_THROWS_AS(ModelSpec::iid_normal(0), InvalidArgument);
  CHECK_THROWS_AS(ModelSpec::equicorr_normal(3, 1.0), InvalidArgument);
  CHECK_THROWS_AS(ModelSpec::equicorr_normal(3, -0.1), InvalidArgument);
  CHECK(ModelSpec::equicorr_normal(3, 0.0).has_common_factor() == false);
  CHECK(ModelSpec::equicorr_normal(3, 0.3).has_common_factor());
  CHECK(parse_family("equicorr-normal") == Family::EquicorrNormal);
  CHECK_THROWS_AS(parse_family("gamma"), InvalidArgument);
  CHECK(ModelSpec::equicorr_normal(3, 0.3).with_k(5) == ModelSpec::equicorr_normal(5, 0.3));
  CHECK_THROWS_AS(ThetaVector({0.0, std::nan("")}), InvalidArgument);
}

TEST_CASE("marginals and sentinels") {
  const ModelSpec n = ModelSpec::iid_normal(2);
  CHECK(marginal_cdf(n, 1.0, 1.0) == doctest::Approx(0.5));
  CHECK(marginal_sf(n, 0.5, 2.0) == doctest::Approx(oracle::Phi(-1.5)).epsilon(1e-14));
  CHECK(marginal_cdf(n, -kInf, 100.0) == 1.0);
  CHECK(marginal_cdf(n, kInf, 100.0) == 0.0);
  CHECK(marginal_sf(n, kInf, 100.0) == 1.0);
  const ModelSpec u = ModelSpec::iid_uniform_null(2);
  CHECK(marginal_cdf(u, 0.0, 0.3) == doctest::Approx(0.3));
  CHECK(marginal_cdf(u, 0.0, -2.0) == 0.0);
  CHECK(marginal_cdf(u, 0.0, 2.0) == 1.0);
  CHECK(marginal_upper_quantile(u, 0.0, 0.05) == doctest::Approx(0.95).epsilon(1e-15));
  CHECK_THROWS_AS(marginal_cdf(u, 0.5, 0.3), ModelError);
}

TEST_CASE("quadrature integrates normal moments") {
  CHECK(quadrature::expect_normal([](double z) { return z * z; }) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(quadrature::expect_normal([](double z) { return z * z * z * z; }) ==
        doctest::Approx(3.0).epsilon(1e-12));
  CHECK(quadrature::expect_normal([](double z) { return oracle::Phi(3.0 * z); }) ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("bivariate normal orthant matches the arcsine formula") {
  for (double rho : {0.1, 0.5, 0.9}) {
    const ModelSpec m = ModelSpec::equicorr_normal(2, rho);
    const std::vector<double> theta{0.0, 0.0}, t{0.0, 0.0};
    const double want = 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
    CHECK(lower_orthant(m, theta, t) == doctest::Approx(want).epsilon(1e-10));
    CHECK(upper_orthant(m, theta, t) == doctest::Approx(want).epsilon(1e-10));
  }
}

TEST_CASE("max cdf under equicorrelation agrees with Simpson integration") {
  for (double rho : {0.25, 0.5, 0.8}) {
    const ModelSpec m = ModelSpec::equicorr_normal(6, rho);
    for (int j : {1, 3, 6}) {
      for (double t : {-0.5, 1.0, 2.3}) {
        const double s = std::sqrt(rho), c = std::sqrt(1.0 - rho);
        const double want = oracle::expect_normal(
            [&](double z) { return std::pow(oracle::Phi((t - s * z) / c), j); });
        CHECK(max_cdf_null(m, j, t) == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
  const ModelSpec iid = ModelSpec::iid_normal(4);
  CHECK(max_cdf_null(iid, 4, 1.2) == doctest::Approx(std::pow(oracle::Phi(1.2), 4)).epsilon(1e-15));
  CHECK(max_cdf_null(ModelSpec::equicorr_normal(4, 0.0), 4, 1.2) == max_cdf_null(iid, 4, 1.2));
}

TEST_CASE("sampling is deterministic and row-addressable") {
  const ModelSpec m = ModelSpec::equicorr_normal(3, 0.4);
  const ThetaVector theta({0.0, 1.0, kInf});
  const SampleMatrix a = sample(m, theta, 50, 11);
  const SampleMatrix b = sample(m, theta, 20, 11);
  for (std::size_t r = 0; r < 20; ++r) {
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.at(r, i) == b.at(r, i));
  }
  std::vector<double> row(3);
  sample_replicate(m, theta, 11, 37, row);
  CHECK(row[0] == a.at(37, 0));
  CHECK(row[2] == kInf);
  const SampleMatrix c = sample(m, theta, 50, 12);
  CHECK(c.at(0, 0) != a.at(0, 0));
}

TEST_CASE("sample moments match the one-factor model") {
  const double rho = 0.5;
  const ModelSpec m = ModelSpec::equicorr_normal(2, rho);
  const ThetaVector theta({0.0, 2.0});
  const std::size_t n = 200'000;
  const SampleMatrix s = sample(m, theta, n, 3);
  double m0 = 0, m1 = 0, v0 = 0, v1 = 0, cov = 0;
  for (std::size_t r = 0; r < n; ++r) {
    m0 += s.at(r, 0);
    m1 += s.at(r, 1);
  }
  m0 /= n;
  m1 /= n;
  for (std::size_t r = 0; r < n; ++r) {
    const double d0 = s.at(r, 0) - m0, d1 = s.at(r, 1) - m1;
    v0 += d0 * d0;
    v1 += d1 * d1;
    cov += d0 * d1;
  }
  // 5 standard errors on each moment.
  CHECK(std::abs(m0) < 5.0 / std::sqrt(n));
  CHECK(std::abs(m1 - 2.0) < 5.0 / std::sqrt(n));
  CHECK(std::abs(v0 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cov / std::sqrt(v0 * v1) - rho) < 5.0 * (1 - rho * rho) / std::sqrt(n));
}

TEST_CASE("uniform sampling stays in the unit interval") {
  const ModelSpec m = ModelSpec::iid_uniform_null(4);
  const SampleMatrix s = sample(m, ThetaVector({0.0, 0.0, -kInf, 0.0}), 1000, 5);
  for (std::size_t r = 0; r < 1000; ++r) {
    CHECK(s.at(r, 2) == -kInf);
    CHECK(s.at(r, 0) >= 0.0);
    CHECK(s.at(r, 0) < 1.0);
  }
  CHECK_THROWS_AS(sample(m, ThetaVector({0.0, 0.5, 0.0, 0.0}), 10, 1), ModelError);
}

TEST_CASE("splitmix64 reference stream") {
  SplitMix64 g(0);
  CHECK(g() == 0xE220A8397B1DCDAFULL);
  CHECK(g() == 0x6E789E6AA1B965F4ULL);
}
