#pragma once

// Benchmark harness: seeded generation of (point, direction) pairs, the
// three-way comparison between the approximate projection, its angle-
// condition bounds and the oracle, and CSV/JSON emission of the results.

#include "ttproj/oracle.hpp"
#include "ttproj/projection.hpp"
#include "ttproj/rng.hpp"
#include "ttproj/tensor3.hpp"
#include "ttproj/ttd.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace ttproj {

struct OracleSpec {
  enum class Method { multistart, grid };
  Method method = Method::multistart;
  int count = 100;  // starts (multistart) or angle resolution (grid)

  std::string to_string() const {
    return (method == Method::multistart ? "multistart:" : "grid:") + std::to_string(count);
  }

  static OracleSpec parse(const std::string& text) {
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    OracleSpec spec;
    if (name == "multistart")
      spec.method = Method::multistart;
    else if (name == "grid")
      spec.method = Method::grid;
    else
      throw std::invalid_argument("oracle spec: unknown method '" + name + "'");
    if (colon != std::string::npos) {
      try {
        spec.count = std::stoi(text.substr(colon + 1));
      } catch (const std::exception&) {
        throw std::invalid_argument("oracle spec: bad count in '" + text + "'");
      }
    }
    if (spec.count < 1) throw std::invalid_argument("oracle spec: count must be >= 1");
    return spec;
  }
};

struct ExperimentConfig {
  Dims3 dims{5, 5, 5};
  Index r1 = 2, r2 = 2;  // TT-rank of the generated points
  Index k1 = 3, k2 = 3;  // rank bound of the variety
  int n_pairs = 50;
  std::uint64_t seed = 42;
  double eps = 1e-16;
  int i_max = 10;
  OracleSpec oracle{};
  double oracle_eps = 1e-16;
  int oracle_i_max = 50;
  int eta_pair = 0;   // pair whose eta trace goes into the summary
  int threads = 0;    // 0: hardware concurrency
  bool measure_time = true;
  std::string csv_path;   // output targets, used by the CLI; empty = skip
  std::string json_path;
};

inline void validate_config(const ExperimentConfig& cfg) {
  auto bad = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };
  if (cfg.dims.n1 < 1 || cfg.dims.n2 < 1 || cfg.dims.n3 < 1)
    bad("extents must be positive, got " + to_string(cfg.dims));
  if (cfg.r1 < 1 || cfg.r1 > std::min(cfg.dims.n1, cfg.dims.n2 * cfg.dims.n3) || cfg.r2 < 1 ||
      cfg.r2 > std::min(cfg.dims.n3, cfg.dims.n1 * cfg.dims.n2))
    bad("TT-rank out of range for " + to_string(cfg.dims));
  if (cfg.k1 < cfg.r1 || cfg.k2 < cfg.r2) bad("rank bound below the generated TT-rank");
  if (cfg.k1 > cfg.dims.n1 || cfg.k2 > cfg.dims.n3) bad("rank bound exceeds extents");
  if (cfg.n_pairs < 1) bad("need at least one pair");
  if (!(cfg.eps > 0)) bad("eps must be positive");
  if (cfg.i_max < 1) bad("i_max must be >= 1");
  if (!(cfg.oracle_eps > 0)) bad("oracle eps must be positive");
  if (cfg.oracle_i_max < 1) bad("oracle i_max must be >= 1");
  if (cfg.eta_pair < 0 || cfg.eta_pair >= cfg.n_pairs) bad("eta pair index out of range");
  if (cfg.threads < 0) bad("threads must be >= 0");
}

// One row of the comparison; eta_trace feeds the summary and the eta dump
// and is not part of the CSV schema.
struct PairRecord {
  int pair = 0;
  double angle_approx = 0.0;
  double angle_oracle = 0.0;
  double norm_ytilde = 0.0;
  double norm_yhat = 0.0;
  double norm_y = 0.0;
  double omega_eq4 = 0.0;
  double omega_s4 = 0.0;
  double omega_kutschan = 0.0;
  int iters = 0;
  double wall_ms = 0.0;
  std::vector<double> eta_trace;
};

struct SummaryStats {
  double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0;
};

// Box-plot statistics with linear interpolation between closest ranks.
inline SummaryStats summarize(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("summarize: empty sample");
  std::sort(values.begin(), values.end());
  auto quantile = [&values](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return SummaryStats{values.front(), quantile(0.25), quantile(0.5), quantile(0.75),
                      values.back()};
}

struct ExperimentSummary {
  SummaryStats angle_approx;
  SummaryStats angle_oracle;
  int eta_pair = 0;
  std::vector<double> eta_trace;
  double total_wall_ms = 0.0;
};

struct ExperimentResult {
  std::vector<PairRecord> records;
  ExperimentSummary summary;
};

// The seeded pair for index i: a canonical point of TT-rank (r1, r2) and a
// dense direction, drawn from streams (seed, 2i) and (seed, 2i+1) so pairs
// are reproducible independently of scheduling.
inline std::pair<CanonicalTtPair, Tensor3> generate_pair(const ExperimentConfig& cfg, int i) {
  NormalRng point_rng = NormalRng::stream(cfg.seed, 2 * static_cast<std::uint64_t>(i));
  auto [tensor, cores] = random_tt(cfg.dims, cfg.r1, cfg.r2, point_rng);
  (void)tensor;
  NormalRng dir_rng = NormalRng::stream(cfg.seed, 2 * static_cast<std::uint64_t>(i) + 1);
  return {canonicalize(cores), gaussian_tensor(cfg.dims, dir_rng)};
}

inline OracleResult run_oracle(const ExperimentConfig& cfg, const CanonicalTtPair& x,
                               const Tensor3& y) {
  if (cfg.oracle.method == OracleSpec::Method::grid)
    return exact_project_grid(y, x, cfg.k1, cfg.k2, cfg.oracle.count);
  return exact_project_multistart(y, x, cfg.k1, cfg.k2, cfg.oracle.count, cfg.seed,
                                  OracleOptions{cfg.oracle_eps, cfg.oracle_i_max});
}

// Both readings of the angle-condition constant; 1.0 at smooth points where
// the bound formula does not apply and the projection is exact.
inline std::pair<double, double> omega_values(const ExperimentConfig& cfg) {
  if (cfg.r1 == cfg.k1 && cfg.r2 == cfg.k2) return {1.0, 1.0};
  const double w = omega_bound(cfg.dims, cfg.r1, cfg.r2, cfg.k1, cfg.k2);
  return {w, w * w};
}

inline PairRecord run_pair(const ExperimentConfig& cfg, int i) {
  const auto [x, y] = generate_pair(cfg, i);

  const auto t0 = std::chrono::steady_clock::now();
  const ProjectionResult proj = approx_project(y, x, cfg.k1, cfg.k2, cfg.eps, cfg.i_max);
  const auto t1 = std::chrono::steady_clock::now();

  const OracleResult oracle = run_oracle(cfg, x, y);

  PairRecord rec;
  rec.pair = i;
  rec.angle_approx = angle_value(y, proj.y_tilde);
  rec.angle_oracle = angle_value(y, oracle.y_hat);
  rec.norm_ytilde = norm(proj.y_tilde);
  rec.norm_yhat = oracle.value;
  rec.norm_y = norm(y);
  std::tie(rec.omega_eq4, rec.omega_s4) = omega_values(cfg);
  rec.omega_kutschan = kutschan_omega(cfg.dims);
  rec.iters = proj.iterations;
  if (cfg.measure_time)
    rec.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  rec.eta_trace = proj.eta_trace;
  return rec;
}

// All pairs, processed by a small worker pool. Results are deterministic for
// a fixed seed (except wall-clock fields, which measure_time=false zeroes).
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const auto t0 = std::chrono::steady_clock::now();

  std::vector<PairRecord> records(static_cast<std::size_t>(cfg.n_pairs));
  unsigned n_workers = cfg.threads > 0 ? static_cast<unsigned>(cfg.threads)
                                       : std::max(1u, std::thread::hardware_concurrency());
  n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(cfg.n_pairs));

  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&]() {
    while (true) {
      const int i = next.fetch_add(1);
      if (i >= cfg.n_pairs) return;
      try {
        records[static_cast<std::size_t>(i)] = run_pair(cfg, i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        return;
      }
    }
  };
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned w = 0; w < n_workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentResult result;
  result.records = std::move(records);

  std::vector<double> approx_angles, oracle_angles;
  approx_angles.reserve(result.records.size());
  oracle_angles.reserve(result.records.size());
  for (const PairRecord& r : result.records) {
    approx_angles.push_back(r.angle_approx);
    oracle_angles.push_back(r.angle_oracle);
  }
  result.summary.angle_approx = summarize(std::move(approx_angles));
  result.summary.angle_oracle = summarize(std::move(oracle_angles));
  result.summary.eta_pair = cfg.eta_pair;
  result.summary.eta_trace = result.records[static_cast<std::size_t>(cfg.eta_pair)].eta_trace;
  const auto t1 = std::chrono::steady_clock::now();
  if (cfg.measure_time)
    result.summary.total_wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
  return result;
}

namespace detail {

inline std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << v;
  return os.str();
}

inline std::string format_ms(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

}  // namespace detail

inline constexpr const char* kCsvHeader =
    "pair,angle_approx,angle_oracle,norm_ytilde,norm_yhat,norm_y,omega_eq4,omega_s4,"
    "omega_kutschan,iters,wall_ms";

inline void emit_csv(const std::vector<PairRecord>& records, std::ostream& os) {
  os << kCsvHeader << "\n";
  for (const PairRecord& r : records) {
    os << r.pair << ',' << detail::format_double(r.angle_approx) << ','
       << detail::format_double(r.angle_oracle) << ',' << detail::format_double(r.norm_ytilde)
       << ',' << detail::format_double(r.norm_yhat) << ',' << detail::format_double(r.norm_y)
       << ',' << detail::format_double(r.omega_eq4) << ',' << detail::format_double(r.omega_s4)
       << ',' << detail::format_double(r.omega_kutschan) << ',' << r.iters << ','
       << detail::format_ms(r.wall_ms) << "\n";
  }
}

inline void emit_csv(const std::vector<PairRecord>& records, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("emit_csv: cannot open '" + path + "' for writing");
  emit_csv(records, os);
  if (!os) throw std::runtime_error("emit_csv: write to '" + path + "' failed");
}

inline nlohmann::json summary_json(const ExperimentConfig& cfg, const ExperimentSummary& summary) {
  auto stats = [](const SummaryStats& s) {
    return nlohmann::json{{"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3},
                          {"max", s.max}};
  };
  std::vector<double> improvements;
  improvements.reserve(summary.eta_trace.size());
  double prev = 0.0;
  for (double eta : summary.eta_trace) {
    improvements.push_back(eta - prev);
    prev = eta;
  }
  const auto [omega_eq4, omega_s4] = omega_values(cfg);
  return nlohmann::json{
      {"config",
       {{"n", {cfg.dims.n1, cfg.dims.n2, cfg.dims.n3}},
        {"r", {cfg.r1, cfg.r2}},
        {"k", {cfg.k1, cfg.k2}},
        {"pairs", cfg.n_pairs},
        {"seed", cfg.seed},
        {"eps", cfg.eps},
        {"i_max", cfg.i_max},
        {"oracle", cfg.oracle.to_string()},
        {"oracle_eps", cfg.oracle_eps},
        {"oracle_i_max", cfg.oracle_i_max},
        {"timing", cfg.measure_time}}},
      {"omega",
       {{"eq4", omega_eq4}, {"s4", omega_s4}, {"kutschan", kutschan_omega(cfg.dims)}}},
      {"angle_approx", stats(summary.angle_approx)},
      {"angle_oracle", stats(summary.angle_oracle)},
      {"eta", {{"pair", summary.eta_pair}, {"trace", summary.eta_trace},
               {"improvements", improvements}}},
      {"total_wall_ms", summary.total_wall_ms}};
}

inline void emit_json(const ExperimentConfig& cfg, const ExperimentSummary& summary,
                      const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("emit_json: cannot open '" + path + "' for writing");
  os << summary_json(cfg, summary).dump(2) << "\n";
  if (!os) throw std::runtime_error("emit_json: write to '" + path + "' failed");
}

// Tensor file round trip in the t3d format.
inline Tensor3 load_tensor(const std::string& path) { return load_t3d(path); }
inline void store_tensor(const Tensor3& t, const std::string& path) { save_t3d(t, path); }

}  // namespace ttproj
