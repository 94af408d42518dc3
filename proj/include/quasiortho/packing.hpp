#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quasiortho/errors.hpp"
#include "quasiortho/hilbert.hpp"
#include "quasiortho/overlap_stats.hpp"
#include "quasiortho/parallel.hpp"
#include "quasiortho/rng.hpp"

namespace quasiortho {

// ---------------------------------------------------------------------------
// Random-coding lower bound on the size of an eps-quasi-orthogonal family:
//   M_eps(d) >= floor(exp[((d-1)/2)(-log(1-eps)) - 1/2]).

namespace detail {

inline void check_eps(double eps, const char* what) {
  if (!(eps >= 0.0 && eps < 1.0)) throw DomainError(std::string(what) + ": eps must lie in [0, 1)");
}

inline double log_lower_bound_real(double d, double eps) {
  check_eps(eps, "log_lower_bound");
  return 0.5 * (d - 1.0) * -std::log1p(-eps) - 0.5;
}

}  // namespace detail

/// Natural log of the bound before flooring. Affine in d.
inline double log_lower_bound(std::size_t d, double eps) {
  if (d < 1) throw DomainError("log_lower_bound: dimension must be at least 1");
  return detail::log_lower_bound_real(double(d), eps);
}

/// floor(exp(log_lower_bound)). Throws OverflowError once the bound no longer
/// fits in 63 bits; use log_lower_bound there.
inline std::uint64_t lower_bound(std::size_t d, double eps) {
  const double lg = log_lower_bound(d, eps);
  if (lg >= 63.0 * std::numbers::ln2)
    throw OverflowError("lower_bound: bound exceeds 2^63, exponent " + std::to_string(lg));
  return static_cast<std::uint64_t>(std::floor(std::exp(lg)));
}

/// log_lower_bound at d = 2^n, evaluated without forming 2^n as an integer.
inline double qubit_capacity_log(unsigned n, double eps) {
  return detail::log_lower_bound_real(std::ldexp(1.0, static_cast<int>(n)), eps);
}

/// Union bound (1/2) M^2 (1-eps)^(d-1) on the failure probability of M
/// independent Haar samples. Reported unclipped.
inline double union_bound_failure(std::size_t d, double eps, std::size_t m) {
  if (m < 2) throw DomainError("union_bound_failure: need M >= 2");
  if (d < 1) throw DomainError("union_bound_failure: dimension must be at least 1");
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("union_bound_failure: eps must lie in [0, 1]");
  if (eps == 1.0) return d == 1 ? 0.5 * double(m) * double(m) : 0.0;
  return std::exp(2.0 * std::log(double(m)) - std::numbers::ln2 + double(d - 1) * std::log1p(-eps));
}

// ---------------------------------------------------------------------------
// Families and certification.

struct QuasiOrthogonalFamily {
  std::size_t dim = 0;
  double eps = 0.0;
  std::vector<StateVector> vectors;
  /// Largest pairwise squared overlap, filled in by verify(). 0 for M = 1.
  std::optional<double> max_pairwise;

  std::size_t size() const { return vectors.size(); }
};

struct PairScan {
  double max_pairwise = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;  // lexicographic
};

/// Exact all-pairs scan: max over i < j of |<v_i|v_j>|^2 and the first pair
/// (in (i, j) lexicographic order) exceeding eps.
inline PairScan scan_pairs(const std::vector<StateVector>& vectors, double eps) {
  PairScan out;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    for (std::size_t j = i + 1; j < vectors.size(); ++j) {
      const double v = overlap_sq(vectors[i], vectors[j]);
      if (v > out.max_pairwise) out.max_pairwise = v;
      if (v > eps && !out.first_violation) out.first_violation = std::pair{i, j};
    }
  }
  return out;
}

struct VerifyResult {
  double max_pairwise = 0.0;
  bool pass = false;
  std::optional<std::pair<std::size_t, std::size_t>> first_violation;
};

/// Certifies the family against its own eps and records max_pairwise on it.
inline VerifyResult verify(QuasiOrthogonalFamily& family) {
  if (family.vectors.empty()) throw DomainError("verify: empty family");
  for (const auto& v : family.vectors)
    if (v.dim() != family.dim) throw DimensionError("verify: vector dimension differs from family dimension");
  const PairScan scan = scan_pairs(family.vectors, family.eps);
  family.max_pairwise = scan.max_pairwise;
  return {scan.max_pairwise, scan.max_pairwise <= family.eps, scan.first_violation};
}

/// The computational basis of C^d as a family; certified for every eps >= 0.
inline QuasiOrthogonalFamily orthonormal_basis_family(std::size_t d, double eps) {
  QuasiOrthogonalFamily f{d, eps, {}, std::nullopt};
  f.vectors.reserve(d);
  for (std::size_t k = 0; k < d; ++k) f.vectors.push_back(StateVector::basis(d, k));
  return f;
}

struct PackingReport {
  std::size_t dim = 0;
  double eps = 0.0;
  std::size_t m_requested = 0;
  bool success = false;  // max_pairwise <= eps
  double max_pairwise = 0.0;
  std::optional<std::pair<std::size_t, std::size_t>> failure_pair;
  double union_bound = 0.0;  // 0 when M < 2
  std::optional<QuasiOrthogonalFamily> family;  // present on success
};

namespace detail {

inline void check_family_resources(std::size_t d, std::size_t m) {
  check_state_dim(d);
  const double md = double(m) * double(d);
  if (md > double(limits().max_family_amplitudes)) throw ResourceError("family storage M*d exceeds cap");
  if (double(m) * double(m) * double(d) > limits().max_pair_ops)
    throw ResourceError("all-pairs verification M^2*d exceeds cap");
}

}  // namespace detail

/// Samples M independent Haar states in C^d and certifies them.
inline PackingReport random_coding_construct(std::size_t d, double eps, std::size_t m, const RngStream& rng) {
  if (m < 1) throw DomainError("random_coding_construct: need M >= 1");
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("random_coding_construct: eps must lie in [0, 1]");
  detail::check_family_resources(d, m);
  QuasiOrthogonalFamily family{d, eps, {}, std::nullopt};
  family.vectors.reserve(m);
  RngStream stream = rng;
  for (std::size_t i = 0; i < m; ++i) family.vectors.push_back(haar_state(d, stream));
  const VerifyResult check = verify(family);

  PackingReport report;
  report.dim = d;
  report.eps = eps;
  report.m_requested = m;
  report.success = check.pass;
  report.max_pairwise = check.max_pairwise;
  report.failure_pair = check.first_violation;
  report.union_bound = m >= 2 ? union_bound_failure(d, eps, m) : 0.0;
  if (report.success) report.family = std::move(family);
  return report;
}

/// Rejection sampling: each attempt draws a Haar state and keeps it only if
/// it stays within eps of every vector kept so far. The result is certified
/// by construction and may be shorter than target_m.
inline QuasiOrthogonalFamily greedy_construct(std::size_t d, double eps, std::size_t target_m,
                                              std::size_t max_attempts, const RngStream& rng) {
  if (target_m < 1) throw DomainError("greedy_construct: need target_M >= 1");
  if (max_attempts < target_m) throw DomainError("greedy_construct: max_attempts must be at least target_M");
  if (!(eps >= 0.0 && eps <= 1.0)) throw DomainError("greedy_construct: eps must lie in [0, 1]");
  detail::check_family_resources(d, target_m);
  QuasiOrthogonalFamily family{d, eps, {}, std::nullopt};
  double worst = 0.0;
  RngStream stream = rng;
  for (std::size_t attempt = 0; attempt < max_attempts && family.size() < target_m; ++attempt) {
    StateVector candidate = haar_state(d, stream);
    double cand_worst = 0.0;
    bool ok = true;
    for (const auto& v : family.vectors) {
      const double o = overlap_sq(candidate, v);
      if (o > eps) {
        ok = false;
        break;
      }
      cand_worst = std::max(cand_worst, o);
    }
    if (!ok) continue;
    worst = std::max(worst, cand_worst);
    family.vectors.push_back(std::move(candidate));
  }
  family.max_pairwise = worst;
  return family;
}

struct SuccessRateReport {
  TestReport test;  // statistic = guarantee - 3 SE - rate, threshold = 0
  std::size_t trials = 0;
  std::size_t successes = 0;
  double success_fraction = 0.0;
  double union_bound = 0.0;
  double guaranteed_success = 0.0;  // 1 - union bound (may be negative)
};

inline constexpr std::size_t kMinSuccessTrials = 30;

/// Repeats random_coding_construct on substreams 0..trials-1 and checks that
/// the empirical success rate is at least 1 - union bound, allowing three
/// binomial standard errors.
inline SuccessRateReport success_rate_experiment(std::size_t d, double eps, std::size_t m, std::size_t trials,
                                                 const RngStream& rng, unsigned threads = 0) {
  if (trials < kMinSuccessTrials) throw DomainError("success_rate_experiment: need at least 30 trials");
  if (m < 2) throw DomainError("success_rate_experiment: need M >= 2");
  detail::check_family_resources(d, m);
  std::vector<char> ok(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    ok[t] = random_coding_construct(d, eps, m, rng.substream(t)).success ? 1 : 0;
  });
  SuccessRateReport r;
  r.trials = trials;
  for (char c : ok) r.successes += static_cast<std::size_t>(c);
  r.success_fraction = double(r.successes) / double(trials);
  r.union_bound = union_bound_failure(d, eps, m);
  r.guaranteed_success = 1.0 - r.union_bound;
  const double se = std::sqrt(r.success_fraction * (1.0 - r.success_fraction) / double(trials));
  r.test.statistic = r.guaranteed_success - 3.0 * se - r.success_fraction;
  r.test.threshold = 0.0;
  r.test.pass = r.test.statistic <= r.test.threshold;
  r.test.alpha = 0.0027;  // two-sided 3-sigma
  r.test.description = "empirical success rate vs 1 - union bound (3 SE allowance)";
  return r;
}

}  // namespace quasiortho
