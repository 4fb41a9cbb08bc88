#include "errw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>

namespace errw::stats {

double tv_distance(std::span<const double> mu, std::span<const double> nu) {
  if (mu.empty() || nu.empty()) throw std::invalid_argument("tv_distance: empty input");
  if (mu.size() != nu.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) s += std::fabs(mu[i] - nu[i]);
  return 0.5 * s;
}

Interval binomial_ci(std::uint64_t k, std::uint64_t n, double confidence) {
  if (n == 0) throw std::invalid_argument("binomial_ci: no trials");
  if (k > n) throw std::invalid_argument("binomial_ci: more successes than trials");
  const double z = normal_quantile(0.5 + confidence / 2.0);
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  Interval ci{center - half, center + half};
  // Exact endpoints at the boundary.
  if (k == 0) ci.lo = 0.0;
  if (k == n) ci.hi = 1.0;
  ci.lo = std::max(0.0, ci.lo);
  ci.hi = std::min(1.0, ci.hi);
  return ci;
}

FitResult linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  if (x.size() < 2) throw std::invalid_argument("linear_fit: need at least two points");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw std::invalid_argument("linear_fit: x values are all equal");
  FitResult fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (fit.intercept + fit.slope * x[i]);
    fit.residuals.push_back(r);
    fit.bins_used.push_back(i);
    ssr += r * r;
  }
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

FitResult loglinear_fit(std::span<const double> x, std::span<const double> y,
                        std::span<const std::uint64_t> counts, std::uint64_t min_count) {
  if (x.empty()) throw std::invalid_argument("loglinear_fit: empty input");
  if (x.size() != y.size() || x.size() != counts.size()) {
    throw std::invalid_argument("loglinear_fit: size mismatch");
  }
  std::vector<double> xs, ys;
  std::vector<std::size_t> used;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (counts[i] >= min_count && y[i] > 0.0) {
      xs.push_back(x[i]);
      ys.push_back(std::log(y[i]));
      used.push_back(i);
    }
  }
  if (xs.size() < 2) {
    throw std::invalid_argument("loglinear_fit: fewer than two bins reach the minimum count");
  }
  FitResult fit = linear_fit(xs, ys);
  fit.bins_used = std::move(used);
  return fit;
}

double mean(std::span<const double> v) {
  if (v.empty()) throw std::invalid_argument("mean: empty input");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev(std::span<const double> v) {
  if (v.size() < 2) throw std::invalid_argument("stddev: need at least two values");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

double standard_error(std::span<const double> v) {
  return stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) throw std::invalid_argument("quantile: empty input");
  if (q < 0.0 || q > 1.0) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::sort(v.begin(), v.end());
  const double h = (static_cast<double>(v.size()) - 1.0) * q;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (h - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("normal_quantile: p outside (0, 1)");
  return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double t = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= t) ++i;
    while (j < b.size() && b[j] <= t) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_critical(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0) throw std::invalid_argument("ks_critical: empty sample");
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const double nn = static_cast<double>(n), mm = static_cast<double>(m);
  return c * std::sqrt((nn + mm) / (nn * mm));
}

Interval percentile_interval(std::vector<double> replicates, double confidence) {
  if (replicates.empty()) throw std::invalid_argument("percentile_interval: no replicates");
  const double tail = (1.0 - confidence) / 2.0;
  return {quantile(replicates, tail), quantile(replicates, 1.0 - tail)};
}

}  // namespace errw::stats
