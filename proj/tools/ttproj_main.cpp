// Command-line harness around the library: `bench` reproduces the seeded
// pair experiment and writes its CSV/JSON outputs, `project` applies the
// approximate projection to tensors from files, and `eta` dumps the captured
// energy trace of a single pair.

#include "ttproj/ttproj.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct BenchFlags {
  std::vector<ttproj::Index> n{5, 5, 5};
  std::vector<ttproj::Index> r{2, 2};
  std::vector<ttproj::Index> k{3, 3};
  int pairs = 50;
  std::uint64_t seed = 42;
  double eps = 1e-16;
  int imax = 10;
  std::string oracle = "multistart:100";
  double oracle_eps = 1e-16;
  int oracle_imax = 50;
  int eta_pair = 0;
  int threads = 0;
  bool no_timing = false;
  std::string csv_path;
  std::string json_path;
};

void add_bench_flags(CLI::App& app, BenchFlags& f) {
  app.add_option("--n", f.n, "tensor extents n1 n2 n3")->expected(3);
  app.add_option("--r", f.r, "TT-rank of the generated points r1 r2")->expected(2);
  app.add_option("--k", f.k, "rank bound of the variety k1 k2")->expected(2);
  app.add_option("--pairs", f.pairs, "number of (X, Y) pairs");
  app.add_option("--seed", f.seed, "base seed; per-pair streams derive from it");
  app.add_option("--eps", f.eps, "stopping threshold on the eta improvement");
  app.add_option("--imax", f.imax, "maximum alternating iterations");
  app.add_option("--oracle", f.oracle, "reference search: multistart:<starts> or grid:<resolution>");
  app.add_option("--oracle-eps", f.oracle_eps, "stopping threshold inside oracle runs");
  app.add_option("--oracle-imax", f.oracle_imax, "iteration cap inside oracle runs");
  app.add_option("--eta-pair", f.eta_pair, "pair whose eta trace goes into the summary");
  app.add_option("--threads", f.threads, "worker threads (0 = hardware)");
  app.add_flag("--no-timing", f.no_timing, "zero all wall-clock fields for byte-stable output");
}

ttproj::ExperimentConfig to_config(const BenchFlags& f) {
  ttproj::ExperimentConfig cfg;
  cfg.dims = ttproj::Dims3{f.n[0], f.n[1], f.n[2]};
  cfg.r1 = f.r[0];
  cfg.r2 = f.r[1];
  cfg.k1 = f.k[0];
  cfg.k2 = f.k[1];
  cfg.n_pairs = f.pairs;
  cfg.seed = f.seed;
  cfg.eps = f.eps;
  cfg.i_max = f.imax;
  cfg.oracle = ttproj::OracleSpec::parse(f.oracle);
  cfg.oracle_eps = f.oracle_eps;
  cfg.oracle_i_max = f.oracle_imax;
  cfg.eta_pair = f.eta_pair;
  cfg.threads = f.threads;
  cfg.measure_time = !f.no_timing;
  cfg.csv_path = f.csv_path;
  cfg.json_path = f.json_path;
  return cfg;
}

int run_bench(const BenchFlags& flags) {
  const ttproj::ExperimentConfig cfg = to_config(flags);
  const ttproj::ExperimentResult result = ttproj::run_experiment(cfg);

  if (!cfg.csv_path.empty()) ttproj::emit_csv(result.records, cfg.csv_path);
  if (!cfg.json_path.empty()) ttproj::emit_json(cfg, result.summary, cfg.json_path);

  const auto& s = result.summary;
  const auto [omega_eq4, omega_s4] = ttproj::omega_values(cfg);
  std::cout << "pairs: " << result.records.size() << "  seed: " << cfg.seed << "\n";
  std::cout << "omega: " << omega_eq4 << " (literal)  " << omega_s4 << " (conservative)  "
            << ttproj::kutschan_omega(cfg.dims) << " (prior)\n";
  auto line = [](const char* name, const ttproj::SummaryStats& st) {
    std::cout << name << ": min " << st.min << "  q1 " << st.q1 << "  median " << st.median
              << "  q3 " << st.q3 << "  max " << st.max << "\n";
  };
  line("angle approx", s.angle_approx);
  line("angle oracle", s.angle_oracle);
  std::cout << "total wall ms: " << s.total_wall_ms << "\n";
  return kExitOk;
}

int run_project(const std::string& x_path, const std::string& y_path,
                const std::vector<ttproj::Index>& k, double eps, int imax, double rank_tol,
                const std::string& out_path) {
  const ttproj::Tensor3 xt = ttproj::load_tensor(x_path);
  const ttproj::Tensor3 y = ttproj::load_tensor(y_path);
  if (!(xt.dims() == y.dims()))
    throw std::invalid_argument("project: extents differ, " + ttproj::to_string(xt.dims()) +
                                " vs " + ttproj::to_string(y.dims()));

  const auto [r1, r2] = ttproj::tt_rank(xt, rank_tol);
  if (r1 < 1 || r2 < 1) throw std::runtime_error("project: the point tensor is zero");
  if (r1 > k[0] || r2 > k[1])
    throw std::invalid_argument("project: point TT-rank (" + std::to_string(r1) + ", " +
                                std::to_string(r2) + ") exceeds the bound");
  const ttproj::CanonicalTtPair x = ttproj::canonicalize(ttproj::tt_svd(xt, r1, r2));
  const ttproj::ProjectionResult res = ttproj::approx_project(y, x, k[0], k[1], eps, imax);

  const double residual = ttproj::inner(y - res.y_tilde, res.y_tilde);
  std::cout << "n: " << ttproj::to_string(xt.dims()) << "  detected r: (" << r1 << ", " << r2
            << ")  k: (" << k[0] << ", " << k[1] << ")\n";
  std::cout << "iterations: " << res.iterations << "\n";
  std::cout << "|Y|: " << ttproj::norm(y) << "  |Ytilde|: " << ttproj::norm(res.y_tilde)
            << "  tangent-space |P Y|: " << res.tangent_space_norm << "\n";
  std::cout << "angle: " << ttproj::angle_value(y, res.y_tilde) << "\n";
  std::cout << "feasibility <Y - Ytilde, Ytilde>: " << residual << "\n";
  std::cout << "omega: " << res.omega << " (literal)  " << res.omega * res.omega
            << " (conservative)  " << ttproj::kutschan_omega(xt.dims()) << " (prior)\n";
  if (!out_path.empty()) ttproj::store_tensor(res.y_tilde, out_path);
  return kExitOk;
}

int run_eta(const BenchFlags& flags, int pair, const std::string& out_path) {
  ttproj::ExperimentConfig cfg = to_config(flags);
  cfg.n_pairs = std::max(cfg.n_pairs, pair + 1);
  cfg.eta_pair = pair;
  ttproj::validate_config(cfg);

  const auto [x, y] = ttproj::generate_pair(cfg, pair);
  const ttproj::ProjectionResult res =
      ttproj::approx_project(y, x, cfg.k1, cfg.k2, cfg.eps, cfg.i_max);

  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << "iter,eta,improvement\n";
  double prev = 0.0;
  for (std::size_t i = 0; i < res.eta_trace.size(); ++i) {
    os << (i + 1) << ',' << res.eta_trace[i] << ',' << res.eta_trace[i] - prev << "\n";
    prev = res.eta_trace[i];
  }
  if (out_path.empty()) {
    std::cout << os.str();
  } else {
    std::ofstream file(out_path);
    if (!file) throw std::runtime_error("eta: cannot open '" + out_path + "'");
    file << os.str();
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate projection onto the tangent cone to the bounded-TT-rank variety"};
  app.require_subcommand(1);

  BenchFlags bench_flags;
  CLI::App* bench = app.add_subcommand("bench", "run the seeded pair experiment");
  add_bench_flags(*bench, bench_flags);
  bench->add_option("--csv", bench_flags.csv_path, "write per-pair records to this CSV file");
  bench->add_option("--json", bench_flags.json_path, "write the summary to this JSON file");

  std::string x_path, y_path, out_path;
  std::vector<ttproj::Index> k{3, 3};
  double eps = 1e-16, rank_tol = 1e-10;
  int imax = 10;
  CLI::App* project = app.add_subcommand("project", "project one tensor from t3d files");
  project->add_option("--x", x_path, "point tensor (t3d)")->required();
  project->add_option("--y", y_path, "tensor to project (t3d)")->required();
  project->add_option("--k", k, "rank bound k1 k2")->expected(2);
  project->add_option("--eps", eps, "stopping threshold on the eta improvement");
  project->add_option("--imax", imax, "maximum alternating iterations");
  project->add_option("--rank-tol", rank_tol, "relative tolerance for detecting the point's TT-rank");
  project->add_option("--out", out_path, "write the projection to this t3d file");

  BenchFlags eta_flags;
  int eta_pair_index = 0;
  std::string eta_out;
  CLI::App* eta = app.add_subcommand("eta", "dump the eta trace of one pair");
  add_bench_flags(*eta, eta_flags);
  eta->add_option("--pair", eta_pair_index, "pair index")->required();
  eta->add_option("--out", eta_out, "write the trace to this file instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (bench->parsed()) return run_bench(bench_flags);
    if (project->parsed()) return run_project(x_path, y_path, k, eps, imax, rank_tol, out_path);
    if (eta->parsed()) return run_eta(eta_flags, eta_pair_index, eta_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
