#include <doctest.h>

#include <cmath>

#include "errw/stats.hpp"

using namespace errw;
using doctest::Approx;

// Reference values below come from SciPy / statsmodels.

TEST_CASE("total variation") {
  const std::vector<double> mu{0.2, 0.3, 0.5};
  CHECK(stats::tv_distance(mu, mu) == 0.0);
  CHECK(stats::tv_distance(std::vector<double>{1, 0}, std::vector<double>{0, 1}) == 1.0);
  CHECK(stats::tv_distance(mu, std::vector<double>{0.5, 0.3, 0.2}) == Approx(0.3));
  CHECK_THROWS(stats::tv_distance(std::vector<double>{}, std::vector<double>{}));
  CHECK_THROWS(stats::tv_distance(mu, std::vector<double>{1.0}));
}

TEST_CASE("Wilson intervals") {
  const auto ci = stats::binomial_ci(7, 50);
  CHECK(ci.lo == Approx(0.06950833427016288).epsilon(1e-9));
  CHECK(ci.hi == Approx(0.26186193710585537).epsilon(1e-9));
  const auto zero = stats::binomial_ci(0, 40);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == Approx(0.08762160119728668).epsilon(1e-9));
  CHECK(stats::binomial_ci(40, 40).hi == Approx(1.0));
  CHECK_THROWS(stats::binomial_ci(1, 0));
}

TEST_CASE("least squares") {
  const std::vector<double> x{0, 1, 2, 3, 4};
  std::vector<double> y;
  for (double v : x) y.push_back(1.5 - 0.25 * v);
  const auto f = stats::linear_fit(x, y);
  CHECK(f.slope == Approx(-0.25));
  CHECK(f.intercept == Approx(1.5));
  CHECK(f.r2 == Approx(1.0));

  std::vector<double> s;
  for (double v : x) s.push_back(std::exp(-0.7 * v));
  const std::vector<std::uint64_t> counts{100, 50, 30, 29, 5};
  const auto g = stats::loglinear_fit(x, s, counts, 30);
  CHECK(g.slope == Approx(-0.7));
  CHECK(g.bins_used == std::vector<std::size_t>{0, 1, 2});
  CHECK_THROWS(stats::loglinear_fit(x, s, counts, 60));
}

TEST_CASE("summaries") {
  const std::vector<double> v{3, 1, 4, 1, 5, 9, 2, 6};
  CHECK(stats::quantile(v, 0.1) == Approx(1.0));
  CHECK(stats::quantile(v, 0.9) == Approx(6.9));
  CHECK(stats::median(v) == Approx(3.5));
  CHECK(stats::mean(v) == Approx(3.875));
  CHECK(stats::stddev(std::vector<double>{1, 2, 3, 4}) == Approx(std::sqrt(5.0 / 3.0)));
  CHECK(stats::standard_error(std::vector<double>{1, 2, 3, 4}) == Approx(std::sqrt(5.0 / 3.0) / 2));
  CHECK(stats::normal_quantile(0.975) == Approx(1.959963984540054).epsilon(1e-12));
  CHECK(stats::normal_quantile(0.001) == Approx(-3.090232306167813).epsilon(1e-12));
  CHECK_THROWS(stats::mean(std::vector<double>{}));
}

TEST_CASE("two-sample KS") {
  const std::vector<double> a{0.1, 0.4, 0.35, 0.8, 0.9}, b{0.2, 0.25, 0.5, 0.55, 0.6, 0.95};
  CHECK(stats::ks_statistic(a, b) == Approx(0.26666666666666666));
  CHECK(stats::ks_statistic(a, a) == 0.0);
  CHECK(stats::ks_statistic(std::vector<double>{1, 1, 1}, std::vector<double>{1, 1}) == 0.0);
  CHECK(stats::ks_critical(100, 200, 0.05) == Approx(0.16633278662324671));
}

TEST_CASE("bootstrap") {
  const std::vector<double> data{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  auto stat = [&](std::span<const std::size_t> idx) {
    double s = 0;
    for (auto i : idx) s += data[i];
    return s / static_cast<double>(idx.size());
  };
  const auto r1 = stats::bootstrap(data.size(), 500, 3, stat);
  const auto r2 = stats::bootstrap(data.size(), 500, 3, stat);
  CHECK(r1 == r2);
  // Bootstrap SE of the mean is close to the plug-in sd / sqrt(n).
  CHECK(stats::stddev(r1) == Approx(std::sqrt(8.25 / 10)).epsilon(0.15));
  const auto ci = stats::percentile_interval(r1);
  CHECK(ci.contains(5.5));
  CHECK(ci.lo < ci.hi);
}
