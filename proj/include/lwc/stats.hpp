#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "lwc/error.hpp"
#include "lwc/random.hpp"

namespace lwc::stats {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t count = 0;
};

inline MeanSe mean_se(std::span<const double> xs) {
  MeanSe r;
  r.count = xs.size();
  if (xs.empty()) return r;
  // Welford
  double m = 0.0, s = 0.0;
  std::size_t k = 0;
  for (double x : xs) {
    ++k;
    double d = x - m;
    m += d / static_cast<double>(k);
    s += d * (x - m);
  }
  r.mean = m;
  if (k > 1) r.se = std::sqrt(s / static_cast<double>(k - 1) / static_cast<double>(k));
  return r;
}

/// sup_x |F_n(x) - F(x)| for a sample against a continuous cdf.
inline double ks_distance(std::vector<double> xs, const std::function<double(double)>& cdf) {
  require(!xs.empty(), "ks_distance: empty sample");
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double f = cdf(xs[i]);
    d = std::max({d, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  return d;
}

/// Two-sample Kolmogorov distance, ties handled by jumping whole runs.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() || j < b.size()) {
    double x = (j == b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

inline double quantile(std::vector<double> xs, double q) {
  require(!xs.empty(), "quantile: empty sample");
  std::size_t k = static_cast<std::size_t>(std::clamp(q, 0.0, 1.0) * static_cast<double>(xs.size() - 1));
  std::nth_element(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(k), xs.end());
  return xs[k];
}

/// Hill estimate of the tail index from the observations >= x_min.
/// With `discrete` the threshold is shifted by one half, the usual
/// continuity correction for integer-valued data.
inline std::optional<double> hill(std::span<const double> sorted_desc, double x_min, bool discrete,
                                  std::size_t* tail_count = nullptr) {
  const double base = discrete ? x_min - 0.5 : x_min;
  double acc = 0.0;
  std::size_t k = 0;
  for (double x : sorted_desc) {
    if (x < x_min) break;
    acc += std::log(x / base);
    ++k;
  }
  if (tail_count) *tail_count = k;
  if (k == 0 || acc <= 0.0) return std::nullopt;
  return static_cast<double>(k) / acc;
}

struct TailEstimate {
  double exponent = 0.0;
  double k_min = 0.0;
  std::size_t samples = 0;
  std::size_t tail_count = 0;
  double std_error = 0.0;
  bool power_law = false;
  /// (threshold, estimate) along the scanned grid.
  std::vector<std::pair<double, double>> path;
};

struct TailOptions {
  std::vector<double> k_min_grid;  ///< ascending thresholds; default: doubling from the median
  bool discrete = false;
  double stability = 0.05;         ///< relative change allowed when the threshold doubles
  std::size_t min_tail = 50;
  std::size_t bootstrap = 200;
  std::uint64_t seed = 1;
};

/// Kolmogorov distance between the sample tail above `x_min` and the fitted
/// Pareto tail with index `alpha`.
inline double tail_fit_distance(std::span<const double> sorted_desc, double x_min, double alpha, bool discrete) {
  const double base = discrete ? x_min - 0.5 : x_min;
  std::size_t k = 0;
  while (k < sorted_desc.size() && sorted_desc[k] >= x_min) ++k;
  double worst = 0.0;
  for (std::size_t i = 0; i < k;) {
    std::size_t j = i;
    while (j < k && sorted_desc[j] == sorted_desc[i]) ++j;
    // P(X >= x) and P(X > x) within the tail, against the fit at x
    const double x = sorted_desc[i];
    const double fit = std::pow((discrete ? x - 0.5 : x) / base, -alpha);
    const double ge = static_cast<double>(j) / static_cast<double>(k);
    const double gt = static_cast<double>(i) / static_cast<double>(k);
    worst = std::max({worst, std::abs(ge - fit), discrete ? 0.0 : std::abs(gt - fit)});
    i = j;
  }
  return worst;
}

/// Hill estimator. A plateau (the estimate moving by less than `stability`,
/// or by less than its sampling noise, when the threshold doubles) marks the
/// data as power-law. From the first plateau on, the first threshold whose
/// Pareto fit is not rejected by a Kolmogorov test is used. Data without a plateau is reported with power_law = false.
inline TailEstimate tail_exponent(std::vector<double> xs, TailOptions opt = {}) {
  require(xs.size() >= 1000, "tail_exponent: need at least 1000 samples");
  std::sort(xs.begin(), xs.end(), std::greater<>());
  require(xs.front() > 0.0, "tail_exponent: samples must be positive");
  TailEstimate out;
  out.samples = xs.size();
  auto& grid = opt.k_min_grid;
  if (grid.empty()) {
    double start = xs[xs.size() / 2];
    if (start <= 0.0) start = xs.front() / 1e6;
    if (opt.discrete) start = std::max(start, 1.0);
    for (double t = start; t <= xs.front(); t *= 2.0) grid.push_back(t);
  }
  // Estimates at t and 2t.
  auto estimate = [&](double t) -> std::optional<std::pair<double, std::size_t>> {
    std::size_t k = 0;
    auto a = hill(xs, t, opt.discrete, &k);
    if (!a || k < opt.min_tail) return std::nullopt;
    return std::make_pair(*a, k);
  };
  std::optional<std::size_t> chosen;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto here = estimate(grid[i]);
    if (!here) break;
    out.path.push_back({grid[i], here->first});
    auto twice = estimate(2.0 * grid[i]);
    if (!twice) break;
    // stable: within `stability` or within two standard errors of the Hill estimate
    const double noise = 2.0 * twice->first / std::sqrt(static_cast<double>(twice->second));
    if (!chosen && std::abs(twice->first - here->first) < std::max(opt.stability * here->first, noise)) chosen = i;
  }
  require(!out.path.empty(), "tail_exponent: insufficient tail mass");
  if (!chosen) {
    out.power_law = false;
    out.k_min = out.path.back().first;
    out.exponent = out.path.back().second;
    return out;
  }
  out.power_law = true;
  // smallest threshold whose fit passes a 5% KS test; the best-fitting one otherwise
  double best = INFINITY;
  for (std::size_t i = *chosen; i < out.path.size(); ++i) {
    std::size_t k = 0;
    hill(xs, out.path[i].first, opt.discrete, &k);
    const double d = tail_fit_distance(xs, out.path[i].first, out.path[i].second, opt.discrete) *
                     std::sqrt(static_cast<double>(k));
    if (d < best) {
      best = d;
      out.k_min = out.path[i].first;
      out.exponent = out.path[i].second;
    }
    if (d <= 1.36) break;
  }
  hill(xs, out.k_min, opt.discrete, &out.tail_count);

  // Bootstrap standard error at the selected threshold. Only the tail
  // matters: its size is Binomial(n, k/n) and its members are resampled.
  Rng rng(opt.seed, 0x4b1d);
  std::vector<double> boot;
  const std::span<const double> tail(xs.data(), out.tail_count);
  std::binomial_distribution<std::size_t> tail_size(xs.size(), static_cast<double>(out.tail_count) /
                                                                   static_cast<double>(xs.size()));
  const double base = opt.discrete ? out.k_min - 0.5 : out.k_min;
  for (std::size_t b = 0; b < opt.bootstrap; ++b) {
    std::size_t k = tail_size(rng);
    if (k == 0) continue;
    double acc = 0.0;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(tail[rng.index(tail.size())] / base);
    if (acc > 0.0) boot.push_back(static_cast<double>(k) / acc);
  }
  if (boot.size() > 1) {
    auto ms = mean_se(boot);
    out.std_error = ms.se * std::sqrt(static_cast<double>(boot.size()));
  }
  return out;
}

/// Convergence test for fixed-point sweeps. With change d_k per sweep and the
/// observed ratio r = d_k / d_{k-1}, the distance to the fixed point is
/// about |d_k r / (1 - r)|; a run is done when that bound is below `tol`,
/// or when the drift has stayed inside the Monte Carlo noise of the pool mean
/// for `quiet` consecutive sweeps.
class DriftMonitor {
 public:
  explicit DriftMonitor(double tol, std::size_t min_sweeps = 1, std::size_t quiet = 5)
      : tol_(tol), min_sweeps_(min_sweeps), quiet_(quiet) {}

  /// Unsigned drift: the ratio of successive drifts is taken as positive.
  bool update(double drift, double noise = 0.0) { return update(std::complex<double>(drift), noise); }

  /// Signed (complex) change of the monitored statistic. For a linear
  /// iteration with multiplier r the remaining distance is |delta r / (1 - r)|,
  /// which is about |delta| / 2 when the iterates alternate.
  bool update(std::complex<double> delta, double noise) {
    ++sweeps_;
    const double drift = std::abs(delta);
    std::complex<double> r(0.9999);
    if (std::abs(prev_) > 0.0) {
      r = delta / prev_;
      if (std::abs(r) > 0.9999) r *= 0.9999 / std::abs(r);
    }
    prev_ = delta;
    in_noise_ = (noise > 0.0 && drift <= noise) ? in_noise_ + 1 : 0;
    if (sweeps_ < min_sweeps_) return false;
    if (drift == 0.0) return true;
    if (drift * std::abs(r / (1.0 - r)) <= tol_) return true;
    return in_noise_ >= quiet_;
  }

 private:
  double tol_;
  std::size_t min_sweeps_;
  std::size_t quiet_;
  std::size_t sweeps_ = 0;
  std::size_t in_noise_ = 0;
  std::complex<double> prev_ = 0.0;
};

}  // namespace lwc::stats
