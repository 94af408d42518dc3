// quasiortho: command-line driver for the overlap, packing, decoherence and
// effective-dimension experiments. Emits CSV or JSON with a provenance header.
//
// Exit codes: 0 pass, 1 statistical test failed, 2 usage, 3 resource or I/O.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "quasiortho/quasiortho.hpp"

namespace qo = quasiortho;
using nlohmann::json;
using quasiortho::io::num;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitStatFail = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::string format = "csv";
  std::string output;
  unsigned threads = 0;
  bool no_timestamp = false;
};

// Collects the provenance fields and renders them either as "# key=value"
// CSV comment lines or as a JSON object.
class Provenance {
 public:
  Provenance(std::string command, std::uint64_t seed, bool with_timestamp) {
    add("command", std::move(command));
    add("version", qo::kVersion);
    add("seed", std::to_string(seed));
    if (with_timestamp) {
      const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      std::ostringstream ts;
      ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
      add("timestamp", ts.str());
    }
  }

  void add(const std::string& key, const std::string& value) { fields_.emplace_back(key, value); }
  void add(const std::string& key, double value) { add(key, qo::io::num(value)); }

  void write_csv(std::ostream& os) const {
    for (const auto& [k, v] : fields_) os << "# " << k << '=' << v << '\n';
  }

  json to_json() const {
    json j = json::object();
    for (const auto& [k, v] : fields_) j[k] = v;
    return j;
  }

 private:
  std::vector<std::pair<std::string, std::string>> fields_;
};

std::string join_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) {
    if (i) out += ' ';
    out += i == 0 ? std::string("quasiortho") : std::string(argv[i]);
  }
  return out;
}

std::uint64_t resolve_seed(const GlobalOptions& g) {
  if (g.seed) return *g.seed;
  std::random_device rd;
  return (std::uint64_t(rd()) << 32) ^ rd();
}

// Writes to --output if given, otherwise stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) throw IoError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }
  void finish() {
    stream().flush();
    if (!stream()) throw IoError("failed writing output");
  }

 private:
  std::ofstream file_;
};

bool want_json(const GlobalOptions& g) { return g.format == "json"; }

// --- overlap-dist -------------------------------------------------------------

struct OverlapDistOptions {
  std::size_t d = 0;
  std::size_t bins = 50;
  double alpha = 0.01;
  std::string sample_out;
};

int run_overlap_dist(const OverlapDistOptions& o, const GlobalOptions& g, const std::string& command) {
  const std::size_t trials = g.trials.value_or(100000);
  if (o.d < 2) throw UsageError("--d must be at least 2");
  if (trials < qo::kMinKsCount) throw UsageError("--trials must be at least 100 for the KS test");
  if (o.bins < 1) throw UsageError("--bins must be positive");

  const std::uint64_t seed = resolve_seed(g);
  const qo::EmpiricalSample sample = qo::sample_overlaps(o.d, trials, qo::RngStream(seed), g.threads);
  const qo::TestReport ks = qo::ks_test(sample, o.alpha);

  // Histogram over [0, hi] where hi covers essentially all of the mass.
  const double hi = std::min(1.0, std::max(sample.values.back(), 20.0 / double(o.d)));
  const double width = hi / double(o.bins);
  std::vector<std::size_t> counts(o.bins, 0);
  for (double v : sample.values) counts[std::min(o.bins - 1, static_cast<std::size_t>(v / width))]++;

  Provenance prov(command, seed, !g.no_timestamp);
  prov.add("d", std::to_string(o.d));
  prov.add("trials", std::to_string(trials));
  prov.add("alpha", o.alpha);
  prov.add("empirical_mean", sample.sample_mean());
  prov.add("standard_error", sample.standard_error());
  prov.add("analytic_mean", qo::mean(o.d));
  prov.add("ks_statistic", ks.statistic);
  prov.add("ks_threshold", ks.threshold);
  prov.add("ks_pass", ks.pass ? "true" : "false");

  Sink sink(g.output);
  auto& os = sink.stream();
  std::size_t cumulative = 0;
  if (want_json(g)) {
    json rows = json::array();
    for (std::size_t b = 0; b < o.bins; ++b) {
      const double lo = width * double(b);
      const double up = width * double(b + 1);
      cumulative += counts[b];
      rows.push_back({{"bin_lo", lo},
                      {"bin_hi", up},
                      {"count", counts[b]},
                      {"empirical_density", double(counts[b]) / (double(trials) * width)},
                      {"analytic_pdf_mid", qo::pdf(o.d, 0.5 * (lo + up))},
                      {"empirical_cdf", double(cumulative) / double(trials)},
                      {"analytic_cdf", qo::cdf(o.d, up)},
                      {"analytic_survival", qo::survival(o.d, up)}});
    }
    json out = {{"provenance", prov.to_json()},
                {"ks", qo::io::to_json(ks)},
                {"empirical_mean", sample.sample_mean()},
                {"standard_error", sample.standard_error()},
                {"analytic_mean", qo::mean(o.d)},
                {"histogram", rows}};
    os << std::setw(2) << out << '\n';
  } else {
    prov.write_csv(os);
    os << "bin_lo,bin_hi,count,empirical_density,analytic_pdf_mid,empirical_cdf,analytic_cdf,analytic_survival\n";
    for (std::size_t b = 0; b < o.bins; ++b) {
      const double lo = width * double(b);
      const double up = width * double(b + 1);
      cumulative += counts[b];
      os << num(lo) << ',' << num(up) << ',' << counts[b] << ',' << num(double(counts[b]) / (double(trials) * width))
         << ',' << num(qo::pdf(o.d, 0.5 * (lo + up))) << ',' << num(double(cumulative) / double(trials)) << ','
         << num(qo::cdf(o.d, up)) << ',' << num(qo::survival(o.d, up)) << '\n';
    }
  }
  sink.finish();

  if (!o.sample_out.empty()) {
    std::ofstream f(o.sample_out);
    if (!f) throw IoError("cannot open sample output '" + o.sample_out + "'");
    if (want_json(g))
      f << qo::io::to_json(sample) << '\n';
    else
      qo::io::write_csv(f, sample);
    if (!f) throw IoError("failed writing sample output");
  }
  return ks.pass ? kExitPass : kExitStatFail;
}

// --- levy-check ---------------------------------------------------------------

struct LevyOptions {
  std::optional<std::size_t> d;
  std::optional<double> delta;
};

int run_levy_check(const LevyOptions& o, const GlobalOptions& g, const std::string& command) {
  std::vector<std::size_t> dims = {2, 16, 128, 1024, 4096};
  std::vector<double> deltas = {0.01, 0.05, 0.1, 0.5, 1.0};
  if (o.d.has_value() != o.delta.has_value()) throw UsageError("single-point mode needs both --d and --delta");
  if (o.d) {
    if (*o.d < 2) throw UsageError("--d must be at least 2");
    if (!(*o.delta > 0.0)) throw UsageError("--delta must be positive");
    dims = {*o.d};
    deltas = {*o.delta};
  }
  const std::uint64_t seed = resolve_seed(g);
  Provenance prov(command, seed, !g.no_timestamp);

  bool all_ok = true;
  struct Row {
    std::size_t d;
    double delta, exact, bound;
    bool vacuous, ok;
  };
  std::vector<Row> rows;
  for (std::size_t d : dims)
    for (double delta : deltas) {
      const double exact = qo::two_sided_exact_tail(d, delta);
      const double bound = qo::overlap_tail_bound(d, delta);
      rows.push_back({d, delta, exact, bound, qo::is_vacuous(bound), exact <= bound});
      all_ok = all_ok && rows.back().ok;
    }
  prov.add("points", std::to_string(rows.size()));
  prov.add("all_consistent", all_ok ? "true" : "false");

  Sink sink(g.output);
  auto& os = sink.stream();
  if (want_json(g)) {
    json arr = json::array();
    for (const auto& r : rows)
      arr.push_back({{"d", r.d}, {"delta", r.delta}, {"exact_tail", r.exact}, {"levy_bound", r.bound},
                     {"vacuous", r.vacuous}, {"consistent", r.ok}});
    os << std::setw(2) << json{{"provenance", prov.to_json()}, {"all_consistent", all_ok}, {"rows", arr}} << '\n';
  } else {
    prov.write_csv(os);
    os << "d,delta,exact_tail,levy_bound,vacuous,consistent\n";
    for (const auto& r : rows)
      os << r.d << ',' << num(r.delta) << ',' << num(r.exact) << ',' << num(r.bound) << ',' << (r.vacuous ? "true" : "false") << ','
         << (r.ok ? "true" : "false") << '\n';
  }
  sink.finish();
  return all_ok ? kExitPass : kExitStatFail;
}

// --- packing ------------------------------------------------------------------

struct PackingBoundOptions {
  std::optional<std::size_t> d;
  std::optional<unsigned> qubits;
  double eps = 0.1;
};

int run_packing_bound(const PackingBoundOptions& o, const GlobalOptions& g, const std::string& command) {
  if (o.d.has_value() == o.qubits.has_value()) throw UsageError("give exactly one of --d or --qubits");
  if (!(o.eps >= 0.0 && o.eps < 1.0)) throw UsageError("--eps must lie in [0, 1)");
  if (o.d && *o.d < 1) throw UsageError("--d must be at least 1");
  const std::uint64_t seed = resolve_seed(g);

  double log_bound = 0.0;
  std::optional<std::uint64_t> bound;
  std::string dim_text;
  if (o.d) {
    log_bound = qo::log_lower_bound(*o.d, o.eps);
    dim_text = std::to_string(*o.d);
  } else {
    log_bound = qo::qubit_capacity_log(*o.qubits, o.eps);
    dim_text = "2^" + std::to_string(*o.qubits);
  }
  // The integer form only exists when d itself is representable.
  if (o.d || *o.qubits < 63) {
    const std::size_t d = o.d ? *o.d : (std::size_t{1} << *o.qubits);
    try {
      bound = qo::lower_bound(d, o.eps);
    } catch (const qo::OverflowError&) {
    }
  }

  Provenance prov(command, seed, !g.no_timestamp);
  Sink sink(g.output);
  auto& os = sink.stream();
  if (want_json(g)) {
    json j = {{"provenance", prov.to_json()}, {"d", dim_text}, {"eps", o.eps}, {"log_lower_bound", log_bound},
              {"lower_bound", bound ? json(*bound) : json(nullptr)}};
    if (o.qubits) j["qubits"] = *o.qubits;
    os << std::setw(2) << j << '\n';
  } else {
    prov.write_csv(os);
    os << "d,eps,log_lower_bound,lower_bound\n";
    os << dim_text << ',' << num(o.eps) << ',' << num(log_bound) << ',' << (bound ? std::to_string(*bound) : std::string()) << '\n';
  }
  sink.finish();
  return kExitPass;
}

struct PackingBuildOptions {
  std::size_t d = 0;
  double eps = 0.1;
  std::size_t m = 0;
  std::string method = "random";
  std::size_t max_attempts = 0;
  std::string family_out;
};

int run_packing_build(const PackingBuildOptions& o, const GlobalOptions& g, const std::string& command) {
  if (o.d < 1) throw UsageError("--d must be at least 1");
  if (!(o.eps >= 0.0 && o.eps <= 1.0)) throw UsageError("--eps must lie in [0, 1]");
  if (o.m < 1) throw UsageError("--M must be at least 1");
  const std::uint64_t seed = resolve_seed(g);
  const qo::RngStream rng(seed);
  Provenance prov(command, seed, !g.no_timestamp);
  prov.add("d", std::to_string(o.d));
  prov.add("eps", o.eps);
  prov.add("M", std::to_string(o.m));
  prov.add("method", o.method);

  json result;
  bool pass = false;
  std::optional<qo::QuasiOrthogonalFamily> family;
  if (g.trials) {
    if (o.method != "random") throw UsageError("--trials runs the random-coding success-rate experiment only");
    if (*g.trials < qo::kMinSuccessTrials) throw UsageError("--trials must be at least 30");
    if (o.m < 2) throw UsageError("--M must be at least 2 for the success-rate experiment");
    const qo::SuccessRateReport r = qo::success_rate_experiment(o.d, o.eps, o.m, *g.trials, rng, g.threads);
    result = qo::io::to_json(r);
    result["mode"] = "success-rate";
    pass = r.test.pass;
  } else if (o.method == "random") {
    qo::PackingReport r = qo::random_coding_construct(o.d, o.eps, o.m, rng);
    result = qo::io::to_json(r);
    result["mode"] = "random-coding";
    pass = r.success;
    family = std::move(r.family);
  } else if (o.method == "greedy") {
    const std::size_t attempts = o.max_attempts ? o.max_attempts : 100 * o.m;
    if (attempts < o.m) throw UsageError("--max-attempts must be at least --M");
    qo::QuasiOrthogonalFamily f = qo::greedy_construct(o.d, o.eps, o.m, attempts, rng);
    const qo::VerifyResult v = qo::verify(f);
    result = {{"mode", "greedy"}, {"d", o.d}, {"eps", o.eps}, {"M_requested", o.m}, {"M_built", f.size()},
              {"max_pairwise", v.max_pairwise}, {"certified", v.pass}};
    pass = v.pass && f.size() == o.m;
    family = std::move(f);
  } else {
    throw UsageError("--method must be 'random' or 'greedy'");
  }

  Sink sink(g.output);
  auto& os = sink.stream();
  if (want_json(g)) {
    result["provenance"] = prov.to_json();
    os << std::setw(2) << result << '\n';
  } else {
    prov.write_csv(os);
    os << "key,value\n";
    for (const auto& [k, v] : result.items()) {
      if (v.is_object()) {
        for (const auto& [k2, v2] : v.items()) os << k << '.' << k2 << ',' << (v2.is_string() ? v2.get<std::string>() : v2.dump()) << '\n';
      } else {
        os << k << ',' << (v.is_string() ? v.get<std::string>() : v.dump()) << '\n';
      }
    }
  }
  sink.finish();

  if (!o.family_out.empty()) {
    if (!family) throw IoError("no certified family to export");
    std::ofstream f(o.family_out);
    if (!f) throw IoError("cannot open family output '" + o.family_out + "'");
    qo::io::write_csv(f, *family);
    if (!f) throw IoError("failed writing family output");
  }
  return pass ? kExitPass : kExitStatFail;
}

// --- decohere -----------------------------------------------------------------

struct DecohereOptions {
  std::optional<std::size_t> n;
  std::optional<std::size_t> k;
  std::string dynamics = "exact-haar";
  std::optional<std::size_t> depth;
  std::vector<double> theta;
  bool dense_unitaries = false;
  std::string config;
  double sigma = 5.0;
};

qo::MeasurementModel build_model(const DecohereOptions& o) {
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw IoError("cannot read config '" + o.config + "'");
    json j;
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw IoError(std::string("config is not valid JSON: ") + e.what());
    }
    return qo::io::model_from_json(j);
  }
  if (!o.n) throw UsageError("--n is required (or use --config)");
  const bool integrable = o.dynamics == "integrable" || o.dynamics == "integrable-product";
  std::size_t k = o.k.value_or(integrable && !o.theta.empty() ? o.theta.size() : 2);
  if (k < 2) throw UsageError("--k must be at least 2");
  if (*o.n < 1) throw UsageError("--n must be at least 1");

  qo::MeasurementModel m;
  m.coefficients = qo::equal_coefficients(k);
  m.env_qubits = *o.n;
  if (o.dynamics == "exact-haar") {
    m.dynamics = qo::ExactHaar{o.dense_unitaries};
  } else if (o.dynamics == "chaotic" || o.dynamics == "chaotic-circuit") {
    if (o.depth && *o.depth == 0) throw UsageError("--depth must be positive");
    m.dynamics = qo::ChaoticCircuit{o.depth};
  } else if (integrable) {
    if (o.theta.size() != k) throw UsageError("--theta needs exactly k angles");
    m.dynamics = qo::IntegrableProduct{o.theta};
  } else {
    throw UsageError("--dynamics must be exact-haar, chaotic-circuit or integrable");
  }
  return m;
}

int run_decohere(const DecohereOptions& o, const GlobalOptions& g, const std::string& command) {
  const std::size_t trials = g.trials.value_or(200);
  if (trials < qo::kMinSuppressionTrials) throw UsageError("--trials must be at least 30");
  qo::MeasurementModel model;
  try {
    model = build_model(o);
  } catch (const qo::DomainError& e) {
    throw UsageError(e.what());
  } catch (const qo::DimensionError& e) {
    throw UsageError(e.what());
  }
  const std::uint64_t seed = resolve_seed(g);
  const qo::SuppressionRecord r = qo::suppression_experiment(model, trials, qo::RngStream(seed), g.threads);

  // Haar records carry a testable prediction: mean overlap 1/d within sigma SE.
  const bool haar = std::holds_alternative<qo::ExactHaar>(model.dynamics);
  const double deviation = std::abs(r.mean_overlap_sq - r.predicted.overlap_sq_scale);
  const bool pass = !haar || deviation <= o.sigma * r.se_overlap_sq;

  Provenance prov(command, seed, !g.no_timestamp);
  const json summary = qo::io::summary_json(r);
  for (const auto& [key, v] : summary.items())
    if (key != "seed") prov.add(key, v.is_string() ? v.get<std::string>() : v.dump());
  if (haar) prov.add("haar_mean_within_sigma", pass ? "true" : "false");

  Sink sink(g.output);
  auto& os = sink.stream();
  if (want_json(g)) {
    json j = qo::io::to_json(r);
    j["provenance"] = prov.to_json();
    if (haar) j["haar_mean_within_sigma"] = pass;
    os << std::setw(2) << j << '\n';
  } else {
    prov.write_csv(os);
    qo::io::write_csv(os, r);
  }
  sink.finish();
  return pass ? kExitPass : kExitStatFail;
}

// --- deff ---------------------------------------------------------------------

struct DeffOptions {
  std::string spectrum;
  std::optional<unsigned> popcount;
  double energy = 0.0;
  double width = 1.0;
};

int run_deff(const DeffOptions& o, const GlobalOptions& g, const std::string& command) {
  if (o.spectrum.empty() == !o.popcount.has_value()) throw UsageError("give exactly one of --spectrum or --popcount");
  if (!(o.width > 0.0)) throw UsageError("--dE must be positive");
  qo::Spectrum spectrum;
  if (o.popcount) {
    if (*o.popcount > 24) throw qo::ResourceError("--popcount limited to 24 qubits");
    spectrum = qo::popcount_spectrum(*o.popcount);
  } else {
    std::ifstream in(o.spectrum);
    if (!in) throw IoError("cannot read spectrum file '" + o.spectrum + "'");
    try {
      spectrum = qo::read_spectrum(in);
    } catch (const qo::DomainError& e) {
      throw IoError(std::string("bad spectrum file: ") + e.what());
    }
  }
  const std::uint64_t seed = resolve_seed(g);
  const std::size_t shell = qo::microcanonical_dim(spectrum, o.energy, o.width);

  Provenance prov(command, seed, !g.no_timestamp);
  prov.add("levels", std::to_string(spectrum.size()));
  prov.add("E", o.energy);
  prov.add("dE", o.width);

  std::optional<qo::EffectiveDimensionReport> report;
  std::optional<qo::SuppressionScale> scale;
  if (shell > 0) {
    report = qo::make_dimension_report(double(shell), qo::DimensionMethod::MicrocanonicalShell);
    scale = qo::suppression_scale(double(shell));
  } else {
    std::cerr << "warning: energy window [" << o.energy << ", " << o.energy + o.width
              << ") contains no levels; shell dimension is 0 and the entropy is undefined\n";
  }

  Sink sink(g.output);
  auto& os = sink.stream();
  if (want_json(g)) {
    json j = {{"provenance", prov.to_json()},
              {"window", {o.energy, o.energy + o.width}},
              {"d_eff", shell},
              {"method", "microcanonical-shell"},
              {"entropy", report ? json(report->entropy) : json(nullptr)},
              {"overlap_sq_scale", scale ? json(scale->overlap_sq_scale) : json(nullptr)},
              {"amplitude_scale", scale ? json(scale->amplitude_scale) : json(nullptr)}};
    if (!report) j["warning"] = "empty energy window";
    os << std::setw(2) << j << '\n';
  } else {
    prov.write_csv(os);
    if (!report) os << "# warning=empty energy window\n";
    os << "E,dE,d_eff,entropy,overlap_sq_scale,amplitude_scale\n";
    os << num(o.energy) << ',' << num(o.width) << ',' << shell << ',';
    if (report) os << num(report->entropy) << ',' << num(scale->overlap_sq_scale) << ',' << num(scale->amplitude_scale);
    else os << ",,";
    os << '\n';
  }
  sink.finish();
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-orthogonality, overlap concentration and decoherence experiments", "quasiortho"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", qo::kVersion);

  GlobalOptions g;
  app.add_option("--seed", g.seed, "RNG seed (drawn from system entropy and recorded when omitted)");
  app.add_option("--trials", g.trials, "Monte Carlo trial count");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--output", g.output, "Output path (stdout when omitted)");
  app.add_option("--threads", g.threads, "Worker threads (0 = machine parallelism)");
  app.add_flag("--no-timestamp", g.no_timestamp, "Omit the timestamp from the provenance header");

  OverlapDistOptions od;
  auto* overlap = app.add_subcommand("overlap-dist", "Sample Haar overlaps and test them against Beta(1, d-1)");
  overlap->add_option("--d", od.d, "Hilbert space dimension")->required();
  overlap->add_option("--bins", od.bins, "Histogram bins");
  overlap->add_option("--alpha", od.alpha, "KS significance level");
  overlap->add_option("--sample-out", od.sample_out, "Also write the raw sorted sample here");

  LevyOptions lv;
  auto* levy = app.add_subcommand("levy-check", "Compare the exact two-sided tail with the Levy bound");
  levy->add_option("--d", lv.d, "Single-point dimension");
  levy->add_option("--delta", lv.delta, "Single-point deviation");

  auto* packing = app.add_subcommand("packing", "Quasi-orthogonal packing bound and constructions");
  packing->require_subcommand(1);
  PackingBoundOptions pb;
  auto* bound = packing->add_subcommand("bound", "Evaluate the random-coding lower bound");
  bound->add_option("--d", pb.d, "Dimension");
  bound->add_option("--qubits", pb.qubits, "Qubit count (d = 2^n)");
  bound->add_option("--eps", pb.eps, "Quasi-orthogonality threshold")->required();
  PackingBuildOptions pk;
  auto* build = packing->add_subcommand("build", "Construct and certify a quasi-orthogonal family");
  build->add_option("--d", pk.d, "Dimension")->required();
  build->add_option("--eps", pk.eps, "Quasi-orthogonality threshold")->required();
  build->add_option("--M", pk.m, "Family size")->required();
  build->add_option("--method", pk.method, "random or greedy");
  build->add_option("--max-attempts", pk.max_attempts, "Greedy attempt budget (default 100 M)");
  build->add_option("--family-out", pk.family_out, "Write the certified family as CSV");

  DecohereOptions dc;
  auto* decohere = app.add_subcommand("decohere", "Coherence suppression by environmental records");
  decohere->add_option("--n", dc.n, "Environment qubits");
  decohere->add_option("--k", dc.k, "Pointer values");
  decohere->add_option("--dynamics", dc.dynamics, "exact-haar, chaotic-circuit or integrable");
  decohere->add_option("--depth", dc.depth, "Brickwork depth (default 4n)");
  decohere->add_option("--theta", dc.theta, "Rotation angle per pointer value (integrable)");
  decohere->add_flag("--dense-unitaries", dc.dense_unitaries, "Sample full Haar unitaries (n <= 10)");
  decohere->add_option("--config", dc.config, "JSON model configuration");
  decohere->add_option("--sigma", dc.sigma, "Standard errors allowed for the Haar mean check");

  DeffOptions df;
  auto* deff = app.add_subcommand("deff", "Microcanonical shell dimension and entropy");
  deff->add_option("--spectrum", df.spectrum, "Spectrum file: one energy per line, or a JSON array");
  deff->add_option("--popcount", df.popcount, "Use the non-interacting n-qubit spectrum instead");
  deff->add_option("--E", df.energy, "Window start")->required();
  deff->add_option("--dE", df.width, "Window width")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  const std::string command = join_args(argc, argv);
  try {
    if (*overlap) return run_overlap_dist(od, g, command);
    if (*levy) return run_levy_check(lv, g, command);
    if (*bound) return run_packing_bound(pb, g, command);
    if (*build) return run_packing_build(pk, g, command);
    if (*decohere) return run_decohere(dc, g, command);
    if (*deff) return run_deff(df, g, command);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const qo::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kExitResource;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << '\n';
    return kExitResource;
  } catch (const qo::DomainError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const qo::DimensionError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitResource;
  }
  return kExitUsage;
}
