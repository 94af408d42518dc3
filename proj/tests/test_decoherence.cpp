#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "oracles.hpp"
#include "quasiortho/decoherence.hpp"
#include "quasiortho/overlap_stats.hpp"
#include "quasiortho/packing.hpp"

namespace qo = quasiortho;
using qo::Complex;
using qo::RngStream;

namespace {

qo::MeasurementModel model(std::size_t n, std::size_t k, qo::Dynamics dyn) {
  qo::MeasurementModel m;
  m.coefficients = qo::equal_coefficients(k);
  m.env_qubits = n;
  m.dynamics = std::move(dyn);
  return m;
}

qo::BranchSet branches_from(std::vector<qo::StateVector> v) { return {std::move(v), {}}; }

}  // namespace

TEST(Model, Validation) {
  EXPECT_THROW(model(4, 1, qo::ExactHaar{}).validate(), qo::DomainError);
  auto bad_norm = model(4, 2, qo::ExactHaar{});
  bad_norm.coefficients[0] = 1.0;
  EXPECT_THROW(bad_norm.validate(), qo::DomainError);
  EXPECT_THROW(model(15, 2, qo::ExactHaar{}).validate(), qo::ResourceError);
  EXPECT_THROW(model(11, 2, qo::ExactHaar{true}).validate(), qo::ResourceError);
  EXPECT_THROW(model(4, 2, qo::IntegrableProduct{{0.1}}).validate(), qo::DomainError);
  EXPECT_THROW(model(4, 2, qo::IntegrableProduct{{0.1, NAN}}).validate(), qo::DomainError);
  EXPECT_THROW(model(4, 2, qo::ChaoticCircuit{0}).validate(), qo::DomainError);
  auto wrong_init = model(3, 2, qo::ExactHaar{});
  wrong_init.env_initial = qo::StateVector::basis(4, 0);
  EXPECT_THROW(wrong_init.validate(), qo::DimensionError);
  EXPECT_NO_THROW(model(14, 2, qo::ExactHaar{}).validate());
  EXPECT_EQ(model(5, 2, qo::ChaoticCircuit{}).circuit_depth(), 20u);
}

TEST(GenerateBranches, IntegrableEqualAnglesGiveIdenticalBranches) {
  const auto set = qo::generate_branches(model(6, 2, qo::IntegrableProduct{{0.7, 0.7}}), RngStream(1));
  EXPECT_NEAR(qo::overlap_sq(set.branches[0], set.branches[1]), 1.0, 1e-12);
}

TEST(GenerateBranches, IntegrableMatchesClosedForm) {
  const auto set = qo::generate_branches(model(10, 2, qo::IntegrableProduct{{0.0, 0.2}}), RngStream(1));
  const double sim = qo::overlap_sq(set.branches[0], set.branches[1]);
  EXPECT_NEAR(sim, qo::integrable_overlap_exact(10, 0.2), 1e-10);
  EXPECT_NEAR(sim, oracle::kCos20At01, 1e-10);
  EXPECT_NEAR(qo::typicality_ratio(set, 1024.0), oracle::kCos20At01 * 1024.0, 1e-7);
  EXPECT_TRUE(qo::is_atypical(qo::typicality_ratio(set, 1024.0)));
}

TEST(GenerateBranches, IntegrableThreePointers) {
  const auto set = qo::generate_branches(model(5, 3, qo::IntegrableProduct{{0.0, 0.4, 1.3}}), RngStream(1));
  EXPECT_NEAR(qo::overlap_sq(set.branches[0], set.branches[2]), qo::integrable_overlap_exact(5, 1.3), 1e-12);
  EXPECT_NEAR(qo::overlap_sq(set.branches[1], set.branches[2]), qo::integrable_overlap_exact(5, 0.9), 1e-12);
}

TEST(GenerateBranches, ExactHaarMeanOverlap) {
  const auto m = model(10, 2, qo::ExactHaar{});
  std::vector<double> v;
  for (std::uint64_t t = 0; t < 200; ++t) v.push_back(qo::pair_overlaps(qo::generate_branches(m, RngStream(70, t)))[0]);
  double mean = 0.0, var = 0.0;
  for (double x : v) mean += x;
  mean /= 200.0;
  for (double x : v) var += (x - mean) * (x - mean);
  const double se = std::sqrt(var / 199.0 / 200.0);
  EXPECT_NEAR(mean, 1.0 / 1024.0, 5 * se);
}

TEST(GenerateBranches, DenseUnitaryPathHasHaarLaw) {
  // Pairs from explicitly sampled U_i |E_0> against the Beta(1, 15) law.
  const auto m = model(4, 2, qo::ExactHaar{true});
  qo::EmpiricalSample s{16, {}, 5, 0};
  for (std::uint64_t t = 0; t < 3000; ++t) s.values.push_back(qo::pair_overlaps(qo::generate_branches(m, RngStream(5, t)))[0]);
  std::sort(s.values.begin(), s.values.end());
  EXPECT_TRUE(qo::ks_test(s).pass);
}

TEST(GenerateBranches, HaarBranchLawAtEightQubits) {
  const auto m = model(8, 2, qo::ExactHaar{});
  qo::EmpiricalSample s{256, {}, 6, 0};
  for (std::uint64_t t = 0; t < 10000; ++t) s.values.push_back(qo::pair_overlaps(qo::generate_branches(m, RngStream(6, t)))[0]);
  std::sort(s.values.begin(), s.values.end());
  const auto r = qo::ks_test(s);
  EXPECT_TRUE(r.pass) << r.statistic << " > " << r.threshold;
}

TEST(GenerateBranches, ChaoticCircuitIsNormalisedAndPointerDependent) {
  const auto set = qo::generate_branches(model(6, 3, qo::ChaoticCircuit{12}), RngStream(8));
  for (const auto& b : set.branches) EXPECT_NEAR(b.amplitudes().norm(), 1.0, 1e-9);
  EXPECT_LT(qo::overlap_sq(set.branches[0], set.branches[1]), 0.5);
  EXPECT_EQ(set.record.dynamics, "chaotic-circuit");
  EXPECT_EQ(set.record.depth, 12u);
}

TEST(GenerateBranches, ChaoticCircuitSingleQubit) {
  const auto set = qo::generate_branches(model(1, 2, qo::ChaoticCircuit{}), RngStream(8));
  EXPECT_EQ(set.branches[0].dim(), 2u);
}

TEST(GenerateBranches, DeepChaoticCircuitApproachesHaarMean) {
  const std::size_t n = 6;
  const auto m = model(n, 2, qo::ChaoticCircuit{});
  double s = 0.0;
  const int trials = 400;
  for (int t = 0; t < trials; ++t) s += qo::pair_overlaps(qo::generate_branches(m, RngStream(9, std::uint64_t(t))))[0];
  EXPECT_NEAR(s / trials * 64.0, 1.0, 0.25);
}

TEST(GenerateBranches, Deterministic) {
  for (const qo::Dynamics& dyn : {qo::Dynamics{qo::ExactHaar{}}, qo::Dynamics{qo::ChaoticCircuit{5}},
                                  qo::Dynamics{qo::ExactHaar{true}}}) {
    const auto a = qo::generate_branches(model(5, 3, dyn), RngStream(44, 2));
    const auto b = qo::generate_branches(model(5, 3, dyn), RngStream(44, 2));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_TRUE(a.branches[i] == b.branches[i]);
  }
}

TEST(GramMatrix, Examples) {
  const auto e = qo::StateVector::basis(4, 1);
  const auto g1 = qo::gram_matrix(branches_from({e, e, e}));
  EXPECT_LE((g1 - Eigen::MatrixXcd::Ones(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
  const auto g2 = qo::gram_matrix(branches_from({qo::StateVector::basis(4, 0), e, qo::StateVector::basis(4, 3)}));
  EXPECT_LE((g2 - Eigen::MatrixXcd::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
  const auto set = qo::generate_branches(model(7, 4, qo::ExactHaar{}), RngStream(3));
  const auto g = qo::gram_matrix(set);
  for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(std::abs(g(i, i) - Complex(1.0)), 0.0, 1e-10);
  EXPECT_LE((g - g.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(qo::gram_matrix(branches_from({e, qo::StateVector::basis(2, 0)})), qo::DimensionError);
}

TEST(ReducedDensity, OrthogonalBranchesAreDiagonal) {
  auto m = model(2, 3, qo::ExactHaar{});
  m.coefficients = {0.6, Complex(0.0, 0.8), 0.0};
  const auto rho = qo::reduced_density(m, branches_from({qo::StateVector::basis(4, 0), qo::StateVector::basis(4, 1),
                                                         qo::StateVector::basis(4, 2)}));
  EXPECT_NEAR(rho(0, 0).real(), 0.36, 1e-15);
  EXPECT_NEAR(rho(1, 1).real(), 0.64, 1e-15);
  EXPECT_EQ(qo::max_coherence(rho), 0.0);
}

TEST(ReducedDensity, IdenticalBranchesGivePureState) {
  auto m = model(2, 2, qo::ExactHaar{});
  m.coefficients = {0.6, Complex(0.0, 0.8)};
  const auto e = qo::StateVector::basis(4, 3);
  const auto rho = qo::reduced_density(m, branches_from({e, e}));
  Eigen::Vector2cd c(0.6, Complex(0.0, 0.8));
  EXPECT_LE((rho.matrix() - c * c.adjoint()).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(qo::max_coherence(rho), 0.48, 1e-15);
}

TEST(ReducedDensity, EqualSuperpositionCoherenceIsHalfOverlap) {
  const auto set = qo::generate_branches(model(3, 2, qo::IntegrableProduct{{0.0, 1.1}}), RngStream(1));
  const auto rho = qo::reduced_density(model(3, 2, qo::ExactHaar{}), set);
  const double g = std::abs(qo::inner(set.branches[0], set.branches[1]));
  EXPECT_NEAR(std::abs(rho(0, 1)), g / 2.0, 1e-15);
  const auto e = qo::StateVector::basis(8, 0);
  EXPECT_NEAR(qo::max_coherence(qo::reduced_density(model(3, 2, qo::ExactHaar{}), branches_from({e, e}))), 0.5, 1e-15);
}

TEST(ReducedDensity, RejectsInvalidMatrices) {
  Eigen::MatrixXcd m(2, 2);
  m << 0.5, 0.1, 0.2, 0.5;
  EXPECT_THROW(qo::ReducedDensityMatrix::from_matrix(m), qo::DomainError);
  m << 0.6, 0.0, 0.0, 0.5;
  EXPECT_THROW(qo::ReducedDensityMatrix::from_matrix(m), qo::DomainError);
  m << 0.5, 0.9, 0.9, 0.5;
  EXPECT_THROW(qo::ReducedDensityMatrix::from_matrix(m), qo::DomainError);
  EXPECT_THROW(qo::reduced_density(model(2, 3, qo::ExactHaar{}), branches_from({qo::StateVector::basis(4, 0)})),
               qo::DimensionError);
}

TEST(ReducedDensity, MatchesDensePartialTrace) {
  RngStream rng(321);
  for (int inst = 0; inst < 50; ++inst) {
    const std::size_t n = 1 + std::size_t(inst) % 6;
    const std::size_t k = 2 + std::size_t(inst) % 2;
    auto m = model(n, k, inst % 3 == 0 ? qo::Dynamics{qo::ChaoticCircuit{3}} : qo::Dynamics{qo::ExactHaar{}});
    const auto coeff = qo::haar_state(k, rng);
    m.coefficients.assign(coeff.amplitudes().data(), coeff.amplitudes().data() + k);
    const auto set = qo::generate_branches(m, RngStream(900, std::uint64_t(inst)));
    std::vector<Eigen::VectorXcd> env;
    for (const auto& b : set.branches) env.push_back(b.amplitudes());
    const auto rho = qo::reduced_density(m, set);
    const Eigen::MatrixXcd expect = oracle::partial_trace_system(m.coefficients, env);
    ASSERT_LE((rho.matrix() - expect).cwiseAbs().maxCoeff(), 1e-10) << "instance " << inst;
    EXPECT_NEAR(std::abs(rho.matrix().trace() - Complex(1.0)), 0.0, 1e-10);
  }
}

TEST(MaxCoherence, BoundedBySqrtEpsForCertifiedBranches) {
  const double eps = 0.05;
  int certified = 0;
  for (std::uint64_t t = 0; certified < 100; ++t) {
    auto m = model(8, 3, qo::ExactHaar{});
    RngStream crng(7000, t);
    const auto c = qo::haar_state(3, crng);
    m.coefficients.assign(c.amplitudes().data(), c.amplitudes().data() + 3);
    const auto set = qo::generate_branches(m, RngStream(7001, t));
    qo::QuasiOrthogonalFamily fam{256, eps, set.branches, std::nullopt};
    if (!qo::verify(fam).pass) continue;
    ++certified;
    double cmax = 0.0;
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) cmax = std::max(cmax, std::abs(m.coefficients[i] * m.coefficients[j]));
    EXPECT_LE(qo::max_coherence(qo::reduced_density(m, set)), cmax * std::sqrt(eps) + 1e-12);
  }
}

TEST(Typicality, Examples) {
  EXPECT_EQ(qo::typicality_ratio(branches_from({qo::StateVector::basis(4, 0), qo::StateVector::basis(4, 1)}), 4.0), 0.0);
  EXPECT_THROW(qo::typicality_ratio(branches_from({qo::StateVector::basis(4, 0)}), 4.0), qo::DomainError);
  EXPECT_THROW(qo::typicality_ratio(branches_from({qo::StateVector::basis(4, 0), qo::StateVector::basis(4, 1)}), 0.5),
               qo::DomainError);
}

TEST(Typicality, ExactHaarRatioNearOne) {
  const auto r = qo::suppression_experiment(model(10, 2, qo::ExactHaar{}), 200, RngStream(12));
  EXPECT_GE(r.typicality_ratio, 0.8);
  EXPECT_LE(r.typicality_ratio, 1.25);
  EXPECT_FALSE(r.atypical);
}

TEST(IntegrableExact, Examples) {
  EXPECT_EQ(qo::integrable_overlap_exact(7, 0.0), 1.0);
  EXPECT_NEAR(qo::integrable_overlap_exact(1, std::numbers::pi), 0.0, 1e-30);
  EXPECT_NEAR(qo::integrable_overlap_exact(10, 0.2), oracle::kCos20At01, 1e-15);
  EXPECT_THROW(qo::integrable_overlap_exact(0, 0.1), qo::DomainError);
}

TEST(Suppression, HalvesPerAddedQubit) {
  std::vector<std::pair<std::size_t, double>> means;
  for (std::size_t n : {4, 8, 10}) {
    const auto r = qo::suppression_experiment(model(n, 2, qo::ExactHaar{}), 200, RngStream(500 + n));
    means.emplace_back(n, r.mean_overlap_sq);
  }
  for (std::size_t s = 0; s + 1 < means.size(); ++s) {
    const double per_qubit = std::pow(means[s].second / means[s + 1].second, 1.0 / double(means[s + 1].first - means[s].first));
    EXPECT_NEAR(per_qubit, 2.0, 0.4) << means[s].first << " -> " << means[s + 1].first;
  }
}

TEST(Suppression, MeanCoherenceFollowsBetaAmplitude) {
  const auto r = qo::suppression_experiment(model(10, 2, qo::ExactHaar{}), 200, RngStream(13));
  EXPECT_NEAR(oracle::kMeanAmplitude1024, std::sqrt(std::numbers::pi / 4096.0), 1e-3 * oracle::kMeanAmplitude1024);
  EXPECT_NEAR(r.mean_max_coherence, 0.5 * oracle::kMeanAmplitude1024, 0.1 * 0.5 * oracle::kMeanAmplitude1024);
  EXPECT_EQ(r.predicted.overlap_sq_scale, 1.0 / 1024.0);
  EXPECT_EQ(r.predicted.amplitude_scale, 1.0 / 32.0);
  EXPECT_EQ(r.rows.size(), 200u);
}

TEST(Suppression, IntegrableControlFlagsFailure) {
  const auto r = qo::suppression_experiment(model(10, 2, qo::IntegrableProduct{{0.0, 0.2}}), 30, RngStream(14));
  EXPECT_TRUE(r.atypical);
  EXPECT_NEAR(r.typicality_ratio, oracle::kCos20At01 * 1024.0, 1e-6);
  EXPECT_GT(r.mean_overlap_sq, 100.0 * r.predicted.overlap_sq_scale);
}

TEST(Suppression, PairRowsAndThreadIndependence) {
  const auto m = model(5, 4, qo::ExactHaar{});
  const auto a = qo::suppression_experiment(m, 30, RngStream(15), 1);
  const auto b = qo::suppression_experiment(m, 30, RngStream(15), 4);
  ASSERT_EQ(a.rows.size(), 30u * 6u);
  for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].overlap_sq, b.rows[i].overlap_sq);
  EXPECT_EQ(a.mean_overlap_sq, b.mean_overlap_sq);
  EXPECT_THROW(qo::suppression_experiment(m, 29, RngStream(1)), qo::DomainError);
}
