#pragma once

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "quasiortho/errors.hpp"
#include "quasiortho/hilbert.hpp"
#include "quasiortho/parallel.hpp"
#include "quasiortho/rng.hpp"

namespace quasiortho {

// ---------------------------------------------------------------------------
// Exact law of X = |<phi|psi>|^2 for Haar psi in C^d: Beta(1, d-1).
// Everything is evaluated through log1p so d in the thousands does not
// underflow before the final exp.

namespace detail {

inline void check_beta_args(std::size_t d, double x, const char* what) {
  if (d < 2) throw DomainError(std::string(what) + ": dimension must be at least 2");
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError(std::string(what) + ": argument outside [0, 1]");
}

}  // namespace detail

/// Density (d-1)(1-x)^(d-2) on [0, 1].
inline double pdf(std::size_t d, double x) {
  detail::check_beta_args(d, x, "pdf");
  if (d == 2) return 1.0;
  if (x == 1.0) return 0.0;
  return std::exp(std::log(double(d - 1)) + double(d - 2) * std::log1p(-x));
}

/// P(X >= eps) = (1-eps)^(d-1).
inline double survival(std::size_t d, double eps) {
  detail::check_beta_args(d, eps, "survival");
  if (eps == 1.0) return 0.0;
  return std::exp(double(d - 1) * std::log1p(-eps));
}

/// P(X <= x) = 1 - (1-x)^(d-1), via expm1 for small x.
inline double cdf(std::size_t d, double x) {
  detail::check_beta_args(d, x, "cdf");
  if (x == 1.0) return 1.0;
  return -std::expm1(double(d - 1) * std::log1p(-x));
}

/// Haar mean 1/d. Defined for d = 1 as well, where the overlap is always 1.
inline double mean(std::size_t d) {
  if (d < 1) throw DomainError("mean: dimension must be at least 1");
  return 1.0 / double(d);
}

/// Value-type handle on Beta(1, d-1).
class OverlapDistribution {
 public:
  explicit OverlapDistribution(std::size_t d) : dim_(d) {
    if (d < 2) throw DomainError("OverlapDistribution: dimension must be at least 2");
  }
  std::size_t dim() const { return dim_; }
  double pdf(double x) const { return quasiortho::pdf(dim_, x); }
  double cdf(double x) const { return quasiortho::cdf(dim_, x); }
  double survival(double eps) const { return quasiortho::survival(dim_, eps); }
  double mean() const { return quasiortho::mean(dim_); }

 private:
  std::size_t dim_;
};

// ---------------------------------------------------------------------------
// Concentration bounds.

/// Levy tail bound 2 exp[-(2d-1) delta^2 / (9 pi^3 L^2)] for an L-Lipschitz
/// function on the unit sphere of C^d. Returned unclipped; see is_vacuous().
inline double levy_tail_bound(std::size_t d, double delta, double lipschitz) {
  if (d < 1) throw DomainError("levy_tail_bound: dimension must be at least 1");
  if (!(delta > 0.0)) throw DomainError("levy_tail_bound: delta must be positive");
  if (!(lipschitz > 0.0)) throw DomainError("levy_tail_bound: Lipschitz constant must be positive");
  constexpr double kPi3 = std::numbers::pi * std::numbers::pi * std::numbers::pi;
  return 2.0 * std::exp(-(2.0 * double(d) - 1.0) * delta * delta / (9.0 * kPi3 * lipschitz * lipschitz));
}

/// The squared-overlap functional is 2-Lipschitz in the chordal metric.
inline double overlap_tail_bound(std::size_t d, double delta) { return levy_tail_bound(d, delta, 2.0); }

/// A probability bound of 1 or more says nothing.
inline bool is_vacuous(double bound) { return bound >= 1.0; }

/// P(|X - 1/d| >= delta) from the exact Beta(1, d-1) law.
inline double two_sided_exact_tail(std::size_t d, double delta) {
  if (d < 2) throw DomainError("two_sided_exact_tail: dimension must be at least 2");
  if (!(delta > 0.0)) throw DomainError("two_sided_exact_tail: delta must be positive");
  const double mu = 1.0 / double(d);
  const double upper = mu + delta >= 1.0 ? 0.0 : survival(d, mu + delta);
  const double lower = mu - delta > 0.0 ? cdf(d, mu - delta) : 0.0;
  return upper + lower;
}

// ---------------------------------------------------------------------------
// Monte Carlo samples and tests.

/// Sorted squared overlaps, with the seed record that produced them.
struct EmpiricalSample {
  std::size_t dim = 0;
  std::vector<double> values;  // ascending, each in [0, 1]
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;  // parent stream; trial t used substream(t)

  std::size_t count() const { return values.size(); }

  double sample_mean() const {
    double s = 0.0;
    for (double v : values) s += v;
    return values.empty() ? 0.0 : s / double(values.size());
  }

  /// Unbiased sample standard deviation.
  double sample_stddev() const {
    if (values.size() < 2) return 0.0;
    const double m = sample_mean();
    double s = 0.0;
    for (double v : values) s += (v - m) * (v - m);
    return std::sqrt(s / double(values.size() - 1));
  }

  double standard_error() const { return values.empty() ? 0.0 : sample_stddev() / std::sqrt(double(values.size())); }

  /// Number of values >= threshold.
  std::size_t count_at_least(double threshold) const {
    return static_cast<std::size_t>(values.end() - std::lower_bound(values.begin(), values.end(), threshold));
  }
};

struct TestReport {
  double statistic = 0.0;
  double threshold = 0.0;
  bool pass = false;  // statistic <= threshold
  double alpha = 0.0;
  std::string description;
};

inline constexpr std::size_t kMaxSampleCount = 100'000'000;

/// N draws of |<e_1|psi>|^2 with psi Haar in C^d; draw t uses rng.substream(t).
inline EmpiricalSample sample_overlaps(std::size_t d, std::size_t count, const RngStream& rng, unsigned threads = 0) {
  if (d < 2) throw DomainError("sample_overlaps: dimension must be at least 2");
  if (count < 1) throw DomainError("sample_overlaps: need at least one sample");
  if (count > kMaxSampleCount) throw ResourceError("sample_overlaps: sample count exceeds cap");
  detail::check_state_dim(d);
  const StateVector reference = StateVector::basis(d, 0);
  EmpiricalSample out{d, std::vector<double>(count), rng.seed(), rng.stream_index()};
  parallel_for(count, threads, [&](std::size_t t) {
    RngStream sub = rng.substream(t);
    out.values[t] = overlap_sq(haar_state(d, sub), reference);
  });
  std::sort(out.values.begin(), out.values.end());
  return out;
}

/// Overlaps of two independently drawn Haar states (no fixed reference).
inline EmpiricalSample sample_pair_overlaps(std::size_t d, std::size_t count, const RngStream& rng,
                                            unsigned threads = 0) {
  if (d < 2) throw DomainError("sample_pair_overlaps: dimension must be at least 2");
  if (count < 1) throw DomainError("sample_pair_overlaps: need at least one sample");
  if (count > kMaxSampleCount) throw ResourceError("sample_pair_overlaps: sample count exceeds cap");
  EmpiricalSample out{d, std::vector<double>(count), rng.seed(), rng.stream_index()};
  parallel_for(count, threads, [&](std::size_t t) {
    RngStream sub = rng.substream(t);
    const StateVector a = haar_state(d, sub);
    const StateVector b = haar_state(d, sub);
    out.values[t] = overlap_sq(a, b);
  });
  std::sort(out.values.begin(), out.values.end());
  return out;
}

/// Asymptotic Kolmogorov critical value c(alpha), tabulated at the usual
/// levels and from sqrt(-ln(alpha/2)/2) elsewhere.
inline double kolmogorov_critical(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("kolmogorov_critical: alpha outside (0, 1)");
  constexpr std::pair<double, double> kTable[] = {{0.10, 1.224}, {0.05, 1.358}, {0.01, 1.628}, {0.001, 1.949}};
  for (const auto& [a, c] : kTable)
    if (alpha == a) return c;
  return std::sqrt(-0.5 * std::log(alpha / 2.0));
}

inline constexpr std::size_t kMinKsCount = 100;

/// sup_x |F_N(x) - F(x)| for ascending data.
template <typename Cdf>
double ks_statistic(std::span<const double> sorted, Cdf&& cdf_fn) {
  const double n = double(sorted.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf_fn(sorted[i]);
    worst = std::max({worst, double(i + 1) / n - f, f - double(i) / n});
  }
  return worst;
}

/// One-sample KS test of the sample against Beta(1, dim-1).
inline TestReport ks_test(const EmpiricalSample& sample, double alpha = 0.01) {
  if (sample.count() < kMinKsCount)
    throw DomainError("ks_test: need at least " + std::to_string(kMinKsCount) + " samples");
  const std::size_t d = sample.dim;
  TestReport r;
  r.statistic = ks_statistic(sample.values, [d](double x) { return cdf(d, x); });
  r.threshold = kolmogorov_critical(alpha) / std::sqrt(double(sample.count()));
  r.pass = r.statistic <= r.threshold;
  r.alpha = alpha;
  r.description = "one-sample KS vs Beta(1," + std::to_string(d - 1) + "), N=" + std::to_string(sample.count());
  return r;
}

/// Two-sample KS test; both inputs ascending.
inline TestReport ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha = 0.01) {
  if (a.size() < kMinKsCount || b.size() < kMinKsCount)
    throw DomainError("ks_two_sample: need at least " + std::to_string(kMinKsCount) + " samples per arm");
  const double na = double(a.size());
  const double nb = double(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(double(i) / na - double(j) / nb));
  }
  TestReport r;
  r.statistic = worst;
  r.threshold = kolmogorov_critical(alpha) * std::sqrt((na + nb) / (na * nb));
  r.pass = r.statistic <= r.threshold;
  r.alpha = alpha;
  r.description = "two-sample KS, N=" + std::to_string(a.size()) + "/" + std::to_string(b.size());
  return r;
}

/// Wilson score interval for k successes in n trials at level 1 - alpha.
inline std::pair<double, double> wilson_interval(std::size_t k, std::size_t n, double alpha) {
  if (n == 0 || k > n) throw DomainError("wilson_interval: need 0 <= k <= n and n >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("wilson_interval: alpha outside (0, 1)");
  const double z = boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2.0);
  const double nn = double(n);
  const double p = double(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn));
  const double lo = k == 0 ? 0.0 : std::max(0.0, center - half);
  const double hi = k == n ? 1.0 : std::min(1.0, center + half);
  return {lo, hi};
}

}  // namespace quasiortho
