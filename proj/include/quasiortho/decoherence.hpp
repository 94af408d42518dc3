#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "quasiortho/deff.hpp"
#include "quasiortho/errors.hpp"
#include "quasiortho/hilbert.hpp"
#include "quasiortho/parallel.hpp"
#include "quasiortho/rng.hpp"

namespace quasiortho {

// ---------------------------------------------------------------------------
// Measurement model: pointer amplitudes c_i, an n-qubit environment starting
// in |E_0>, and a pointer-conditioned unitary U_i producing the record
// |E_i> = U_i |E_0>.

/// Independent Haar U_i per pointer value. With dense_unitaries the full
/// 2^n x 2^n matrix is sampled and applied; otherwise U_i|E_0> is drawn
/// directly as a Haar state, which has the same law.
struct ExactHaar {
  bool dense_unitaries = false;
};

/// Brickwork of Haar two-qubit gates: even layers act on bonds (0,1),(2,3),...
/// odd layers on (1,2),(3,4),... with open boundaries. Every gate is drawn
/// from the pointer's own substream. Depth defaults to 4n.
struct ChaoticCircuit {
  std::optional<std::size_t> depth;
};

/// U_i = R_y(theta_i) on every qubit. From |0...0> the records overlap as
/// cos^(2n)(dtheta / 2).
struct IntegrableProduct {
  std::vector<double> angles;
};

using Dynamics = std::variant<ExactHaar, ChaoticCircuit, IntegrableProduct>;

inline std::string dynamics_name(const Dynamics& d) {
  switch (d.index()) {
    case 0: return "exact-haar";
    case 1: return "chaotic-circuit";
    default: return "integrable-product";
  }
}

inline constexpr std::size_t kMaxEnvQubits = 14;
inline constexpr std::size_t kMaxDenseUnitaryQubits = 10;

struct MeasurementModel {
  std::vector<Complex> coefficients;
  std::size_t env_qubits = 1;
  Dynamics dynamics = ExactHaar{};
  std::optional<StateVector> env_initial;  // |0...0> when empty

  std::size_t pointer_count() const { return coefficients.size(); }
  std::size_t env_dim() const { return std::size_t{1} << env_qubits; }

  std::size_t circuit_depth() const {
    if (const auto* c = std::get_if<ChaoticCircuit>(&dynamics)) return c->depth.value_or(4 * env_qubits);
    return 0;
  }

  StateVector initial_state() const { return env_initial ? *env_initial : StateVector::basis(env_dim(), 0); }

  void validate() const {
    if (coefficients.size() < 2) throw DomainError("measurement model needs at least two pointer values");
    double norm_sq = 0.0;
    for (const auto& c : coefficients) norm_sq += std::norm(c);
    if (!(std::abs(norm_sq - 1.0) <= kFreshNormTol)) throw DomainError("pointer coefficients are not normalised");
    if (env_qubits < 1) throw DomainError("environment needs at least one qubit");
    if (env_qubits > kMaxEnvQubits)
      throw ResourceError("environment of " + std::to_string(env_qubits) + " qubits exceeds cap " +
                          std::to_string(kMaxEnvQubits));
    if ((std::size_t{1} << env_qubits) > limits().max_state_dim) throw ResourceError("environment dimension exceeds cap");
    if (env_initial && env_initial->dim() != env_dim()) throw DimensionError("initial environment state has wrong dimension");
    if (const auto* h = std::get_if<ExactHaar>(&dynamics); h && h->dense_unitaries && env_qubits > kMaxDenseUnitaryQubits)
      throw ResourceError("dense Haar unitaries limited to " + std::to_string(kMaxDenseUnitaryQubits) + " qubits");
    if (const auto* c = std::get_if<ChaoticCircuit>(&dynamics); c && c->depth && *c->depth == 0)
      throw DomainError("circuit depth must be positive");
    if (const auto* p = std::get_if<IntegrableProduct>(&dynamics)) {
      if (p->angles.size() != coefficients.size())
        throw DomainError("integrable dynamics needs one angle per pointer value");
      for (double a : p->angles)
        if (!std::isfinite(a)) throw DomainError("rotation angles must be finite");
    }
  }
};

/// Equal-weight pointer amplitudes 1/sqrt(k).
inline std::vector<Complex> equal_coefficients(std::size_t k) {
  return std::vector<Complex>(k, Complex(1.0 / std::sqrt(double(k))));
}

struct GenerationRecord {
  std::string dynamics;
  std::uint64_t seed = 0;
  std::uint64_t stream_index = 0;
  std::size_t depth = 0;  // circuit depth; 0 for exact-haar and integrable
};

struct BranchSet {
  std::vector<StateVector> branches;
  GenerationRecord record;

  std::size_t size() const { return branches.size(); }
};

namespace detail {

inline Unitary ry(double theta) {
  Eigen::Matrix2cd m;
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  m << c, -s, s, c;
  return Unitary::from_matrix(m);
}

inline StateVector run_brickwork(StateVector state, std::size_t n, std::size_t depth, RngStream& rng) {
  for (std::size_t layer = 0; layer < depth; ++layer) {
    if (n == 1) {
      state = apply_local(haar_unitary(2, rng), {0}, state);
      continue;
    }
    for (std::size_t q = layer % 2; q + 1 < n; q += 2) state = apply_local(haar_unitary(4, rng), {q, q + 1}, state);
  }
  return state;
}

}  // namespace detail

/// |E_i> = U_i |E_0> for every pointer value i; pointer i draws from
/// rng.substream(i).
inline BranchSet generate_branches(const MeasurementModel& model, const RngStream& rng) {
  model.validate();
  const std::size_t k = model.pointer_count();
  const std::size_t n = model.env_qubits;
  const std::size_t d = model.env_dim();
  const StateVector e0 = model.initial_state();

  BranchSet out;
  out.record = {dynamics_name(model.dynamics), rng.seed(), rng.stream_index(), model.circuit_depth()};
  out.branches.reserve(k);
  for (std::size_t i = 0; i < k; ++i) {
    RngStream sub = rng.substream(i);
    if (const auto* h = std::get_if<ExactHaar>(&model.dynamics)) {
      out.branches.push_back(h->dense_unitaries ? apply(haar_unitary(d, sub), e0) : haar_state(d, sub));
    } else if (std::holds_alternative<ChaoticCircuit>(model.dynamics)) {
      out.branches.push_back(detail::run_brickwork(e0, n, model.circuit_depth(), sub));
    } else {
      const Unitary r = detail::ry(std::get<IntegrableProduct>(model.dynamics).angles[i]);
      StateVector s = e0;
      for (std::size_t q = 0; q < n; ++q) s = apply_local(r, {q}, s);
      out.branches.push_back(std::move(s));
    }
  }
  return out;
}

/// G(j, i) = <E_j|E_i>.
inline Eigen::MatrixXcd gram_matrix(const BranchSet& set) {
  const auto k = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXcd g(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (set.branches[std::size_t(i)].dim() != set.branches[0].dim()) throw DimensionError("gram_matrix: branch dimensions differ");
    for (Eigen::Index j = 0; j < k; ++j) g(j, i) = inner(set.branches[std::size_t(i)], set.branches[std::size_t(j)]);
  }
  return g;
}

/// Hermitian, unit-trace, positive semidefinite k x k matrix. The checks run
/// at construction.
class ReducedDensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigenTol = 1e-9;

  static ReducedDensityMatrix from_matrix(Eigen::MatrixXcd rho) {
    if (rho.rows() != rho.cols() || rho.rows() == 0) throw DimensionError("density matrix must be square and non-empty");
    if (!((rho - rho.adjoint()).cwiseAbs().maxCoeff() <= kHermitianTol)) throw DomainError("density matrix is not Hermitian");
    if (!(std::abs(rho.trace() - Complex(1.0)) <= kTraceTol)) throw DomainError("density matrix trace is not 1");
    const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kEigenTol) throw DomainError("density matrix is not positive semidefinite");
    return ReducedDensityMatrix(std::move(rho));
  }

  std::size_t size() const { return static_cast<std::size_t>(rho_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  Complex operator()(std::size_t i, std::size_t j) const {
    return rho_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }

 private:
  explicit ReducedDensityMatrix(Eigen::MatrixXcd rho) : rho_(std::move(rho)) {}

  Eigen::MatrixXcd rho_;
};

/// rho_ij = c_i c_j^* <E_j|E_i>.
inline ReducedDensityMatrix reduced_density(const MeasurementModel& model, const BranchSet& set) {
  const std::size_t k = model.pointer_count();
  if (set.size() != k) throw DimensionError("reduced_density: branch count differs from pointer count");
  const Eigen::MatrixXcd g = gram_matrix(set);
  Eigen::MatrixXcd rho(g.rows(), g.cols());
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j)
      rho(Eigen::Index(i), Eigen::Index(j)) =
          model.coefficients[i] * std::conj(model.coefficients[j]) * g(Eigen::Index(j), Eigen::Index(i));
  return ReducedDensityMatrix::from_matrix(std::move(rho));
}

/// max_{i != j} |rho_ij|.
inline double max_coherence(const ReducedDensityMatrix& rho) {
  double worst = 0.0;
  for (std::size_t i = 0; i < rho.size(); ++i)
    for (std::size_t j = 0; j < rho.size(); ++j)
      if (i != j) worst = std::max(worst, std::abs(rho(i, j)));
  return worst;
}

/// Squared overlaps of all pairs i < j, in lexicographic order.
inline std::vector<double> pair_overlaps(const BranchSet& set) {
  std::vector<double> out;
  for (std::size_t i = 0; i < set.size(); ++i)
    for (std::size_t j = i + 1; j < set.size(); ++j) out.push_back(overlap_sq(set.branches[i], set.branches[j]));
  return out;
}

/// Trial-averaged typicality ratios above this are flagged atypical.
inline constexpr double kAtypicalRatio = 2.0;

inline bool is_atypical(double ratio) { return ratio > kAtypicalRatio; }

/// Mean pairwise squared overlap times d_eff. Near 1 for typical records.
inline double typicality_ratio(const BranchSet& set, double d_eff) {
  if (set.size() < 2) throw DomainError("typicality_ratio: need at least two branches");
  if (!(d_eff >= 1.0)) throw DomainError("typicality_ratio: effective dimension must be at least 1");
  const std::vector<double> v = pair_overlaps(set);
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size()) * d_eff;
}

/// cos^(2n)(dtheta / 2).
inline double integrable_overlap_exact(std::size_t n, double delta_theta) {
  if (n < 1) throw DomainError("integrable_overlap_exact: need at least one qubit");
  return std::pow(std::cos(delta_theta / 2.0), 2.0 * double(n));
}

struct PairRow {
  std::size_t trial = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  double overlap_sq = 0.0;
  double max_coherence = 0.0;  // of the whole trial
};

struct SuppressionRecord {
  std::string dynamics;
  std::size_t env_qubits = 0;
  std::size_t pointer_count = 0;
  std::size_t depth = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;

  std::vector<PairRow> rows;
  std::vector<double> trial_max_coherence;

  double mean_overlap_sq = 0.0;
  double var_overlap_sq = 0.0;
  double se_overlap_sq = 0.0;
  double mean_max_coherence = 0.0;
  double var_max_coherence = 0.0;

  double d_eff = 1.0;
  SuppressionScale predicted;
  double typicality_ratio = 0.0;
  bool atypical = false;
};

inline constexpr std::size_t kMinSuppressionTrials = 30;

namespace detail {

inline std::pair<double, double> mean_var(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= double(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return {m, v.size() > 1 ? s / double(v.size() - 1) : 0.0};
}

}  // namespace detail

/// Regenerates the branches on substream t for each trial t and collects
/// pair overlaps and coherences. The prediction uses d_eff = 2^n.
inline SuppressionRecord suppression_experiment(const MeasurementModel& model, std::size_t trials,
                                                const RngStream& rng, unsigned threads = 0) {
  if (trials < kMinSuppressionTrials) throw DomainError("suppression_experiment: need at least 30 trials");
  model.validate();
  const std::size_t k = model.pointer_count();
  const std::size_t pairs = k * (k - 1) / 2;

  std::vector<std::vector<double>> overlaps(trials);
  std::vector<double> coherence(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    const BranchSet set = generate_branches(model, rng.substream(t));
    overlaps[t] = pair_overlaps(set);
    coherence[t] = max_coherence(reduced_density(model, set));
  });

  SuppressionRecord r;
  r.dynamics = dynamics_name(model.dynamics);
  r.env_qubits = model.env_qubits;
  r.pointer_count = k;
  r.depth = model.circuit_depth();
  r.trials = trials;
  r.seed = rng.seed();
  r.trial_max_coherence = coherence;

  std::vector<double> all;
  all.reserve(trials * pairs);
  r.rows.reserve(trials * pairs);
  for (std::size_t t = 0; t < trials; ++t) {
    std::size_t p = 0;
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j, ++p) {
        r.rows.push_back({t, i, j, overlaps[t][p], coherence[t]});
        all.push_back(overlaps[t][p]);
      }
  }
  std::tie(r.mean_overlap_sq, r.var_overlap_sq) = detail::mean_var(all);
  r.se_overlap_sq = std::sqrt(r.var_overlap_sq / double(all.size()));
  std::tie(r.mean_max_coherence, r.var_max_coherence) = detail::mean_var(coherence);

  r.d_eff = double(model.env_dim());
  r.predicted = suppression_scale(r.d_eff);
  r.typicality_ratio = r.mean_overlap_sq * r.d_eff;
  r.atypical = is_atypical(r.typicality_ratio);
  return r;
}

}  // namespace quasiortho
