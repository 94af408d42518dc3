#pragma once

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <istream>
#include <iterator>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "quasiortho/errors.hpp"
#include "quasiortho/hilbert.hpp"

namespace quasiortho {

/// Ascending, finite energy eigenvalues (natural units).
class Spectrum {
 public:
  Spectrum() = default;

  static Spectrum from_sorted(std::vector<double> energies) {
    for (double e : energies)
      if (!std::isfinite(e)) throw DomainError("spectrum contains a non-finite energy");
    if (!std::is_sorted(energies.begin(), energies.end())) throw DomainError("spectrum is not sorted ascending");
    Spectrum s;
    s.energies_ = std::move(energies);
    return s;
  }

  static Spectrum from_unsorted(std::vector<double> energies) {
    std::sort(energies.begin(), energies.end());
    return from_sorted(std::move(energies));
  }

  const std::vector<double>& energies() const { return energies_; }
  std::size_t size() const { return energies_.size(); }
  bool empty() const { return energies_.empty(); }

 private:
  std::vector<double> energies_;
};

/// Non-interacting n-qubit spectrum: level of basis index b is popcount(b).
inline Spectrum popcount_spectrum(unsigned n) {
  std::vector<double> e(std::size_t{1} << n);
  for (std::size_t b = 0; b < e.size(); ++b) e[b] = double(std::popcount(b));
  return Spectrum::from_unsorted(std::move(e));
}

/// Number of levels in the half-open window [E, E + dE).
inline std::size_t microcanonical_dim(const Spectrum& spectrum, double energy, double width) {
  if (!(width > 0.0)) throw DomainError("microcanonical_dim: window width must be positive");
  const auto& e = spectrum.energies();
  const auto lo = std::lower_bound(e.begin(), e.end(), energy);
  const auto hi = std::lower_bound(lo, e.end(), energy + width);
  return static_cast<std::size_t>(hi - lo);
}

/// S = ln d_eff, with k_B = 1.
inline double entropy_of(double d_eff) {
  if (!(d_eff >= 1.0)) throw DomainError("entropy_of: effective dimension must be at least 1");
  return std::log(d_eff);
}

/// 1 / sum_k p_k^2 with p_k = |<b_k|psi>|^2 in the computational basis.
inline double ipr_dimension(const StateVector& state) {
  return 1.0 / state.amplitudes().cwiseAbs2().squaredNorm();
}

/// As above, in the basis formed by the columns of `basis`.
inline double ipr_dimension(const StateVector& state, const Unitary& basis) {
  if (basis.dim() != state.dim()) throw DimensionError("ipr_dimension: basis dimension mismatch");
  const Eigen::VectorXcd coords = basis.matrix().adjoint() * state.amplitudes();
  return 1.0 / coords.cwiseAbs2().squaredNorm();
}

struct SuppressionScale {
  double overlap_sq_scale = 1.0;  // 1/d_eff = e^-S
  double amplitude_scale = 1.0;   // 1/sqrt(d_eff) = e^-S/2
};

inline SuppressionScale suppression_scale(double d_eff) {
  if (!(d_eff >= 1.0)) throw DomainError("suppression_scale: effective dimension must be at least 1");
  const double amp = 1.0 / std::sqrt(d_eff);
  return {amp * amp, amp};
}

enum class DimensionMethod { MicrocanonicalShell, Ipr };

inline const char* to_string(DimensionMethod m) {
  return m == DimensionMethod::MicrocanonicalShell ? "microcanonical-shell" : "ipr";
}

struct EffectiveDimensionReport {
  double d_eff = 1.0;
  double entropy = 0.0;
  DimensionMethod method = DimensionMethod::MicrocanonicalShell;
};

inline EffectiveDimensionReport make_dimension_report(double d_eff, DimensionMethod method) {
  return {d_eff, entropy_of(d_eff), method};
}

/// Reads a spectrum from either a JSON array of numbers or plain text with
/// one energy per line (blank lines and '#' comments skipped). The values
/// must already be ascending.
inline Spectrum read_spectrum(std::istream& in) {
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto first = std::find_if(text.begin(), text.end(), [](unsigned char c) { return !std::isspace(c); });
  std::vector<double> energies;
  if (first != text.end() && *first == '[') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw DomainError(std::string("spectrum JSON: ") + e.what());
    }
    for (const auto& v : j) {
      if (!v.is_number()) throw DomainError("spectrum JSON: array must hold numbers only");
      energies.push_back(v.get<double>());
    }
  } else {
    std::istringstream lines(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(lines, line)) {
      ++lineno;
      const auto b = line.find_first_not_of(" \t\r");
      if (b == std::string::npos || line[b] == '#') continue;
      std::istringstream field(line.substr(b));
      double v = 0.0;
      std::string rest;
      if (!(field >> v) || (field >> rest))
        throw DomainError("spectrum text: cannot parse line " + std::to_string(lineno));
      energies.push_back(v);
    }
  }
  return Spectrum::from_sorted(std::move(energies));
}

}  // namespace quasiortho
