#include <gtest/gtest.h>

#include <sstream>

#include "quasiortho/io.hpp"

namespace qo = quasiortho;
namespace io = quasiortho::io;

TEST(Io, NumbersRoundTrip) {
  qo::RngStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform() * std::pow(10.0, double(i % 40) - 20.0);
    EXPECT_EQ(std::stod(io::num(v)), v);
  }
  EXPECT_EQ(io::num(0.1), "0.1");
}

TEST(Io, SampleCsvAndJsonRoundTrip) {
  const auto s = qo::sample_overlaps(8, 300, qo::RngStream(5));
  std::stringstream csv;
  io::write_csv(csv, s);
  const auto back = io::read_sample_csv(csv);
  EXPECT_EQ(back.dim, s.dim);
  EXPECT_EQ(back.seed, s.seed);
  EXPECT_EQ(back.values, s.values);
  const auto from_json = io::sample_from_json(nlohmann::json::parse(io::to_json(s).dump()));
  EXPECT_EQ(from_json.values, s.values);
}

TEST(Io, SampleCsvLayout) {
  qo::EmpiricalSample s{4, {0.25, 0.5}, 9, 0};
  std::ostringstream os;
  io::write_csv(os, s);
  EXPECT_EQ(os.str(), "dim,count,seed\n4,2,9\nvalue\n0.25\n0.5\n");
  std::istringstream bad("dim,count,seed\n4,3,9\nvalue\n0.25\n");
  EXPECT_THROW(io::read_sample_csv(bad), qo::DomainError);
}

TEST(Io, FamilyCsvInterleavesRealAndImaginary) {
  auto f = qo::orthonormal_basis_family(2, 0.1);
  std::ostringstream os;
  io::write_csv(os, f);
  EXPECT_EQ(os.str(), "re_0,im_0,re_1,im_1\n1,0,0,0\n0,0,1,0\n");
}

TEST(Io, PackingReportJson) {
  const auto r = qo::random_coding_construct(2, 0.01, 4, qo::RngStream(3));
  const auto j = io::to_json(r);
  EXPECT_EQ(j.at("d"), 2);
  EXPECT_EQ(j.at("success"), false);
  EXPECT_TRUE(j.at("failure_pair").is_array());
}

TEST(Io, SuppressionCsvRows) {
  qo::MeasurementModel m;
  m.coefficients = qo::equal_coefficients(3);
  m.env_qubits = 3;
  const auto r = qo::suppression_experiment(m, 30, qo::RngStream(2));
  std::ostringstream os;
  io::write_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "trial,pair,squared_overlap,max_coherence");
  std::getline(is, line);
  EXPECT_EQ(line.substr(0, 6), "0,0-1,");
  std::size_t rows = 1;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, 90u);
  EXPECT_EQ(io::to_json(r).at("rows").size(), 90u);
}

TEST(Io, ModelFromJson) {
  const auto m = io::model_from_json(nlohmann::json::parse(R"({
    "coefficients": [0.6, [0, 0.8]], "env_qubits": 4,
    "dynamics": {"type": "integrable-product", "angles": [0.0, 0.3]}})"));
  EXPECT_EQ(m.pointer_count(), 2u);
  EXPECT_EQ(m.coefficients[1], qo::Complex(0.0, 0.8));
  EXPECT_TRUE(std::holds_alternative<qo::IntegrableProduct>(m.dynamics));

  const auto c = io::model_from_json(nlohmann::json::parse(
      R"({"coefficients": 3, "env_qubits": 5, "dynamics": {"type": "chaotic-circuit", "depth": 7}})"));
  EXPECT_EQ(c.circuit_depth(), 7u);
  EXPECT_EQ(c.pointer_count(), 3u);

  const auto h = io::model_from_json(nlohmann::json::parse(R"({"coefficients": 2, "env_qubits": 3})"));
  EXPECT_TRUE(std::holds_alternative<qo::ExactHaar>(h.dynamics));

  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(R"({"coefficients": 2})")), qo::DomainError);
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(R"({"coefficients": 1, "env_qubits": 3})")), qo::DomainError);
  EXPECT_THROW(io::model_from_json(nlohmann::json::parse(
                   R"({"coefficients": 2, "env_qubits": 3, "dynamics": {"type": "mbl"}})")),
               qo::DomainError);
}
