// Command-line driver for the sparse subspace clustering toolkit: synthetic
// data generation, the four proximal-gradient models, ADMM and OMP baselines,
// spectral clustering, metric evaluation, and seeded benchmark sweeps.
#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ssc/admm.hpp"
#include "ssc/data_io.hpp"
#include "ssc/grad_solver.hpp"
#include "ssc/metrics.hpp"
#include "ssc/omp_solver.hpp"
#include "ssc/parallel.hpp"
#include "ssc/report.hpp"
#include "ssc/spectral.hpp"
#include "ssc/types.hpp"

namespace {

namespace fs = std::filesystem;

using ssc::Index;
using ssc::Labels;
using ssc::Matrix;
using ssc::SparseMatrix;

struct GlobalOptions {
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out_dir = ".";
};

std::string joined(const GlobalOptions& global, const std::string& path) {
  if (path.empty() || fs::path(path).is_absolute()) return path;
  return (fs::path(global.out_dir) / path).string();
}

void ensure_out_dir(const GlobalOptions& global) {
  std::error_code ec;
  fs::create_directories(global.out_dir, ec);
  if (ec) throw ssc::IoError("cannot create output directory " + global.out_dir);
}

std::string fmt(double v) { return ssc::detail::format_double(v); }

double elapsed_since(const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// synth

struct SynthOptions {
  Index p = 0;
  int K = 0;
  std::vector<Index> r;
  std::vector<Index> n_per;
  double sigma = 0.0;
  Index shared_dim = 0;
  std::string mu_mode = "zero";
  std::string out;
  std::string format = "csv";
};

std::vector<Index> broadcast(std::vector<Index> values, int K, const char* name) {
  if (values.size() == 1) values.assign(static_cast<std::size_t>(K), values.front());
  if (static_cast<int>(values.size()) != K)
    throw std::invalid_argument(std::string(name) + " needs 1 or K values");
  return values;
}

int run_synth(const GlobalOptions& global, const SynthOptions& opt) {
  ssc::SyntheticSpec spec;
  spec.p = opt.p;
  spec.K = opt.K;
  spec.r = broadcast(opt.r, opt.K, "--r");
  spec.n_per = broadcast(opt.n_per, opt.K, "--n-per");
  spec.sigma = opt.sigma;
  spec.shared_dim = opt.shared_dim;
  spec.mu_mode = opt.mu_mode == "random-unit" ? ssc::MuMode::RandomUnit : ssc::MuMode::Zero;
  spec.rng_seed = global.seed;

  const ssc::Dataset data = ssc::generate_synthetic(spec);
  ensure_out_dir(global);
  const std::string out_path = joined(global, opt.out);
  ssc::save_matrix(data.X, out_path, ssc::parse_matrix_format(opt.format));
  ssc::save_labels(*data.truth, out_path + ".labels");

  std::cout << "wrote " << out_path << " (p=" << data.X.rows() << ", n=" << data.X.cols()
            << ", K=" << spec.K << ", sigma=" << spec.sigma << ", seed=" << spec.rng_seed
            << ")\nwrote " << out_path << ".labels\n";
  return 0;
}

// ---------------------------------------------------------------------------
// solver dispatch shared by solve and bench

struct SolverRequest {
  std::string solver;  // prox-l1 | prox-l0 | admm-naive | admm-fast | omp
  bool affine = false;
  double lambda_e = 0.0;  // 0 = derive from alpha
  double alpha = 0.0;     // 0 = unset
  Index k = 0;
  double rho = 0.0;  // admm only; 0 = alpha
  int max_iter = 0;  // 0 = solver default
  std::optional<double> epsilon;
  double step_scale = 0.0;
  bool accelerate = true;
  bool line_search = false;
  Index column_block = 0;
};

struct SolverRun {
  SparseMatrix C;
  ssc::SolveTrace trace;
  double lambda_e = 0.0;  // resolved value (0 for l0/omp)
  ssc::ModelKind objective_kind = ssc::ModelKind::L1Affine;
  bool project_before_metrics = false;  // ADMM affine iterates are infeasible
};

double resolve_lambda(const SolverRequest& req, const Matrix& X) {
  if (req.lambda_e > 0.0) return req.lambda_e;
  if (req.alpha > 0.0) return req.alpha / ssc::mu_heuristic(X);
  throw std::invalid_argument("l1 solvers need --lambda-e or --alpha");
}

SolverRun run_solver(const Matrix& X, const SolverRequest& req, int threads) {
  SolverRun out;
  if (req.solver == "prox-l1" || req.solver == "prox-l0") {
    ssc::GradSolverConfig cfg;
    const bool l1 = req.solver == "prox-l1";
    cfg.kind = l1 ? (req.affine ? ssc::ModelKind::L1Affine : ssc::ModelKind::L1Linear)
                  : (req.affine ? ssc::ModelKind::L0Affine : ssc::ModelKind::L0Linear);
    if (l1) {
      cfg.lambda_e = resolve_lambda(req, X);
      cfg.accelerate = req.accelerate;
    } else {
      if (req.k < 1) throw std::invalid_argument("prox-l0 needs --k");
      cfg.k = req.k;
    }
    if (req.max_iter > 0) cfg.max_iter = req.max_iter;
    cfg.epsilon = req.epsilon;
    cfg.step_scale = req.step_scale;
    cfg.line_search = req.line_search;
    cfg.column_block = req.column_block;
    cfg.threads = threads;
    auto result = ssc::solve(X, cfg);
    out.C = std::move(result.C);
    out.trace = std::move(result.trace);
    out.lambda_e = cfg.lambda_e;
    out.objective_kind = cfg.kind;
    return out;
  }
  if (req.solver == "admm-naive" || req.solver == "admm-fast") {
    ssc::AdmmConfig cfg;
    cfg.variant = req.solver == "admm-fast" ? ssc::AdmmVariant::Fast : ssc::AdmmVariant::Naive;
    cfg.affine = req.affine;
    if (req.lambda_e <= 0.0 && req.alpha <= 0.0)
      throw std::invalid_argument("admm needs --lambda-e or --alpha");
    cfg.lambda_e = req.lambda_e > 0.0 ? req.lambda_e : req.alpha / ssc::mu_heuristic(X);
    cfg.alpha = req.alpha > 0.0 ? req.alpha : 10.0;
    cfg.rho = req.rho > 0.0 ? req.rho : cfg.alpha;
    if (req.max_iter > 0) cfg.max_iter = req.max_iter;
    auto result = ssc::admm_solve(X, cfg);
    out.C = std::move(result.C);
    out.trace = std::move(result.trace);
    out.lambda_e = cfg.lambda_e;
    out.objective_kind = req.affine ? ssc::ModelKind::L1Affine : ssc::ModelKind::L1Linear;
    out.project_before_metrics = req.affine;
    return out;
  }
  if (req.solver == "omp") {
    if (req.affine)
      throw std::invalid_argument(
          "omp cannot enforce the affine constraint c^T 1 = 1; "
          "use prox-l0 --affine for affine subspaces");
    if (req.k < 1) throw std::invalid_argument("omp needs --k");
    const auto start = std::chrono::steady_clock::now();
    out.C = ssc::omp_solve(X, req.k, threads);
    out.trace.iterations_run = static_cast<int>(req.k);
    out.trace.wall_time_s = elapsed_since(start);
    out.objective_kind = ssc::ModelKind::L0Linear;
    return out;
  }
  throw std::invalid_argument("unknown solver: " + req.solver);
}

// Metric evaluation protocol: affine ADMM iterates get the closest-feasible
// projection first; the projected copy is used only for metrics, never fed
// back into the iteration.
ssc::MetricSet evaluate_metrics(const SolverRun& run, const Matrix& X, const Labels* truth,
                                const Labels* predicted) {
  ssc::MetricSet metrics;
  Index zeros = 0;
  if (run.project_before_metrics) {
    const Matrix projected = ssc::project_affine_feasible(run.C);
    metrics.objective = ssc::objective_value(projected, X, run.lambda_e, run.objective_kind);
    if (truth) {
      metrics.subspace_preserving_error =
          ssc::subspace_preserving_error(projected, *truth, &zeros);
      metrics.zero_columns = zeros;
    }
  } else {
    metrics.objective = ssc::objective_value(run.C, X, run.lambda_e, run.objective_kind);
    if (truth) {
      metrics.subspace_preserving_error = ssc::subspace_preserving_error(run.C, *truth, &zeros);
      metrics.zero_columns = zeros;
    }
  }
  if (truth && predicted) metrics.clustering_error = ssc::clustering_error(*predicted, *truth);
  return metrics;
}

// ---------------------------------------------------------------------------
// solve

struct SolveOptions {
  std::string data;
  std::string format = "csv";
  bool zscore = false;
  bool unit_norm = false;
  SolverRequest request;
  std::string truth;
  int K = 0;
  std::string out_c = "coefficients.txt";
  std::string out_labels;
  std::string report = "report.json";
};

std::map<std::string, std::string> echo_solve_config(const GlobalOptions& global,
                                                     const SolveOptions& opt,
                                                     double resolved_lambda) {
  std::map<std::string, std::string> echo;
  echo["data"] = opt.data;
  echo["format"] = opt.format;
  echo["zscore"] = opt.zscore ? "true" : "false";
  echo["unit_norm"] = opt.unit_norm ? "true" : "false";
  echo["solver"] = opt.request.solver;
  echo["affine"] = opt.request.affine ? "true" : "false";
  if (resolved_lambda > 0.0) echo["lambda_e"] = fmt(resolved_lambda);
  if (opt.request.alpha > 0.0) echo["alpha"] = fmt(opt.request.alpha);
  if (opt.request.k > 0) echo["k"] = std::to_string(opt.request.k);
  if (opt.request.rho > 0.0) echo["rho"] = fmt(opt.request.rho);
  if (opt.request.max_iter > 0) echo["max_iter"] = std::to_string(opt.request.max_iter);
  if (opt.request.epsilon) echo["epsilon"] = fmt(*opt.request.epsilon);
  if (opt.request.step_scale > 0.0) echo["step_scale"] = fmt(opt.request.step_scale);
  echo["accelerate"] = opt.request.accelerate ? "true" : "false";
  echo["line_search"] = opt.request.line_search ? "true" : "false";
  if (opt.request.column_block > 0)
    echo["column_block"] = std::to_string(opt.request.column_block);
  if (opt.K > 0) echo["K"] = std::to_string(opt.K);
  echo["threads"] = std::to_string(global.threads);
  echo["seed"] = std::to_string(global.seed);
  return echo;
}

int run_solve(const GlobalOptions& global, const SolveOptions& opt) {
  const auto total_start = std::chrono::steady_clock::now();
  ssc::Dataset data = ssc::load_matrix(opt.data, ssc::parse_matrix_format(opt.format));
  if (opt.zscore) data.X = ssc::zscore_normalize(data.X);
  if (opt.unit_norm) data.X = ssc::normalize_columns(data.X);

  std::optional<Labels> truth;
  if (!opt.truth.empty()) {
    truth = ssc::load_labels(opt.truth);
    if (static_cast<Index>(truth->size()) != data.X.cols())
      throw std::invalid_argument("--truth length does not match the data");
  }

  SolverRun run = run_solver(data.X, opt.request, global.threads);

  std::optional<Labels> predicted;
  double spectral_s = 0.0;
  if (opt.K > 0) {
    const auto spectral_start = std::chrono::steady_clock::now();
    predicted = ssc::cluster(run.C, opt.K, global.seed, global.threads);
    spectral_s = elapsed_since(spectral_start);
  }

  ensure_out_dir(global);
  ssc::save_coefficients(run.C, joined(global, opt.out_c));
  if (predicted && !opt.out_labels.empty())
    ssc::save_labels(*predicted, joined(global, opt.out_labels));

  ssc::ExperimentReport report;
  report.solver = opt.request.solver;
  report.config = echo_solve_config(global, opt, run.lambda_e);
  report.seed = global.seed;
  report.metrics = evaluate_metrics(run, data.X, truth ? &*truth : nullptr,
                                    predicted ? &*predicted : nullptr);
  report.trace = run.trace;
  report.timings = {run.trace.wall_time_s, spectral_s, elapsed_since(total_start)};
  ssc::save_report(report, joined(global, opt.report));

  std::cout << "solver " << opt.request.solver << ": " << run.trace.iterations_run
            << " iterations, objective " << fmt(*report.metrics.objective) << '\n';
  if (report.metrics.subspace_preserving_error)
    std::cout << "subspace_preserving_error "
              << fmt(*report.metrics.subspace_preserving_error) << '\n';
  if (report.metrics.clustering_error)
    std::cout << "clustering_error " << fmt(*report.metrics.clustering_error) << '\n';
  std::cout << "wrote " << joined(global, opt.out_c) << " and " << joined(global, opt.report)
            << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// cluster

struct ClusterOptions {
  std::string coeffs;
  int K = 0;
  std::string truth;
  std::string data;
  std::string format = "csv";
  double lambda_e = 0.0;
  std::string model = "l1-affine";
  std::string out_labels = "labels.txt";
  std::string report;
};

int run_cluster(const GlobalOptions& global, const ClusterOptions& opt) {
  const auto total_start = std::chrono::steady_clock::now();
  const SparseMatrix C = ssc::load_coefficients(opt.coeffs);

  const auto spectral_start = std::chrono::steady_clock::now();
  const ssc::SparseMatrix W = ssc::build_affinity(C);
  const ssc::Embedding embedding = ssc::normalized_embedding(W, opt.K);
  if (!embedding.isolated.empty())
    std::cerr << "warning: " << embedding.isolated.size()
              << " isolated vertices (all-zero coefficient columns) pinned to e1\n";
  const Labels labels = ssc::kmeans(embedding.rows, opt.K, 20, global.seed, global.threads);
  const double spectral_s = elapsed_since(spectral_start);

  ensure_out_dir(global);
  ssc::save_labels(labels, joined(global, opt.out_labels));

  ssc::ExperimentReport report;
  report.solver = "spectral";
  report.seed = global.seed;
  report.config = {{"coeffs", opt.coeffs},
                   {"K", std::to_string(opt.K)},
                   {"seed", std::to_string(global.seed)}};

  if (!opt.truth.empty()) {
    const Labels truth = ssc::load_labels(opt.truth);
    if (truth.size() != labels.size())
      throw std::invalid_argument("--truth length does not match the coefficients");
    report.metrics.clustering_error = ssc::clustering_error(labels, truth);
    Index zeros = 0;
    report.metrics.subspace_preserving_error = ssc::subspace_preserving_error(C, truth, &zeros);
    report.metrics.zero_columns = zeros;
    std::cout << "clustering_error " << fmt(*report.metrics.clustering_error) << '\n';
    std::cout << "subspace_preserving_error "
              << fmt(*report.metrics.subspace_preserving_error) << '\n';
  }
  if (!opt.data.empty()) {
    const ssc::Dataset data = ssc::load_matrix(opt.data, ssc::parse_matrix_format(opt.format));
    const ssc::ModelKind kind = ssc::parse_model_kind(opt.model);
    if (ssc::is_l1(kind) && opt.lambda_e <= 0.0)
      throw std::invalid_argument("objective for an l1 model needs --lambda-e");
    report.config["model"] = opt.model;
    report.metrics.objective = ssc::objective_value(C, data.X, opt.lambda_e, kind);
    std::cout << "objective " << fmt(*report.metrics.objective) << '\n';
  }

  report.timings = {0.0, spectral_s, elapsed_since(total_start)};
  if (!opt.report.empty()) ssc::save_report(report, joined(global, opt.report));
  std::cout << "wrote " << joined(global, opt.out_labels) << '\n';
  return 0;
}

// ---------------------------------------------------------------------------
// metrics

struct MetricsOptions {
  std::string coeffs;
  std::string truth;
  std::string pred;
  std::string data;
  std::string format = "csv";
  double lambda_e = 0.0;
  std::string model = "l1-affine";
  std::string report;
};

int run_metrics(const GlobalOptions& global, const MetricsOptions& opt) {
  const SparseMatrix C = ssc::load_coefficients(opt.coeffs);
  const Labels truth = ssc::load_labels(opt.truth);
  if (static_cast<Index>(truth.size()) != C.cols())
    throw std::invalid_argument("--truth length does not match the coefficients");

  ssc::ExperimentReport report;
  report.solver = "metrics";
  report.seed = global.seed;
  report.config = {{"coeffs", opt.coeffs}, {"truth", opt.truth}};

  Index zeros = 0;
  report.metrics.subspace_preserving_error = ssc::subspace_preserving_error(C, truth, &zeros);
  report.metrics.zero_columns = zeros;
  std::cout << "subspace_preserving_error "
            << fmt(*report.metrics.subspace_preserving_error) << " (zero columns: " << zeros
            << ")\n";

  if (!opt.pred.empty()) {
    const Labels pred = ssc::load_labels(opt.pred);
    report.metrics.clustering_error = ssc::clustering_error(pred, truth);
    std::cout << "clustering_error " << fmt(*report.metrics.clustering_error) << '\n';
  }
  if (!opt.data.empty()) {
    const ssc::Dataset data = ssc::load_matrix(opt.data, ssc::parse_matrix_format(opt.format));
    const ssc::ModelKind kind = ssc::parse_model_kind(opt.model);
    if (ssc::is_l1(kind) && opt.lambda_e <= 0.0)
      throw std::invalid_argument("objective for an l1 model needs --lambda-e");
    report.metrics.objective = ssc::objective_value(C, data.X, opt.lambda_e, kind);
    std::cout << "objective " << fmt(*report.metrics.objective) << '\n';
  }
  if (!opt.report.empty()) {
    ensure_out_dir(global);
    ssc::save_report(report, joined(global, opt.report));
  }
  return 0;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
  std::string suite;
  int trials = 0;  // 0 = suite default
  int iters = 0;   // 0 = suite default
  Index p = 0;
  int K = 0;
  Index r = 0;
  Index n_per = 0;
  double sigma = -1.0;
  Index shared_dim = -1;
  double alpha = 0.0;
  bool unit_norm = true;
  std::vector<double> rho_list;
  std::vector<double> sigma_list;
  std::vector<Index> k_list;
  std::vector<Index> n_per_list;
};

struct BenchRow {
  int trial = 0;
  std::uint64_t seed = 0;
  std::string solver;
  Index n = 0, p = 0;
  int K = 0;
  Index r = 0;
  double sigma = 0.0;
  Index shared_dim = 0;
  Index k = 0;         // 0 = n/a
  double rho = 0.0;    // 0 = n/a
  double alpha = 0.0;  // 0 = n/a
  double lambda_e = 0.0;
  int iters = 0;
  std::string status = "ok";
  std::optional<double> objective, spe, ce;
  double solve_s = 0.0, spectral_s = 0.0;
};

std::string csv_cell(const std::optional<double>& v) { return v ? fmt(*v) : ""; }

// The CSV stays byte-identical across reruns of the same root seed, so wall
// times live in the JSON reports instead.
void write_bench_csv(const std::string& path, const std::string& suite,
                     const std::vector<BenchRow>& rows) {
  std::ofstream out(path);
  if (!out) throw ssc::IoError("cannot write " + path);
  out << "suite,trial,seed,solver,n,p,K,r,sigma,shared_dim,k,rho,alpha,lambda_e,iters,"
         "status,objective,subspace_preserving_error,clustering_error\n";
  for (const auto& row : rows) {
    out << suite << ',' << row.trial << ',' << row.seed << ',' << row.solver << ',' << row.n
        << ',' << row.p << ',' << row.K << ',' << row.r << ',' << fmt(row.sigma) << ','
        << row.shared_dim << ',' << (row.k > 0 ? std::to_string(row.k) : "") << ','
        << (row.rho > 0 ? fmt(row.rho) : "") << ',' << (row.alpha > 0 ? fmt(row.alpha) : "")
        << ',' << (row.lambda_e > 0 ? fmt(row.lambda_e) : "") << ',' << row.iters << ','
        << row.status << ',' << csv_cell(row.objective) << ',' << csv_cell(row.spe) << ','
        << csv_cell(row.ce) << '\n';
  }
  if (!out) throw ssc::IoError("write failed: " + path);
}

struct BenchUnit {
  SolverRequest request;
  ssc::SyntheticSpec spec;
  BenchRow row;  // pre-filled identity columns
};

// Runs one (dataset, solver) cell; fills metrics or records the failure and
// lets the suite continue.
void run_bench_unit(BenchUnit& unit, bool unit_norm, int K,
                    std::vector<ssc::ExperimentReport>* reports, std::mutex* reports_mutex) {
  try {
    ssc::Dataset data = ssc::generate_synthetic(unit.spec);
    if (unit_norm) data.X = ssc::normalize_columns(data.X);
    SolverRun run = run_solver(data.X, unit.request, 1);

    const auto spectral_start = std::chrono::steady_clock::now();
    const Labels predicted = ssc::cluster(run.C, K, unit.spec.rng_seed, 1);
    const double spectral_s = elapsed_since(spectral_start);

    const ssc::MetricSet metrics = evaluate_metrics(run, data.X, &*data.truth, &predicted);
    unit.row.lambda_e = run.lambda_e;
    unit.row.iters = run.trace.iterations_run;
    unit.row.objective = metrics.objective;
    unit.row.spe = metrics.subspace_preserving_error;
    unit.row.ce = metrics.clustering_error;
    unit.row.solve_s = run.trace.wall_time_s;
    unit.row.spectral_s = spectral_s;

    ssc::ExperimentReport report;
    report.solver = unit.row.solver;
    report.seed = unit.spec.rng_seed;
    report.config = {{"trial", std::to_string(unit.row.trial)},
                     {"solver", unit.row.solver},
                     {"n", std::to_string(unit.row.n)},
                     {"sigma", fmt(unit.row.sigma)},
                     {"k", std::to_string(unit.row.k)},
                     {"rho", fmt(unit.row.rho)},
                     {"lambda_e", fmt(run.lambda_e)}};
    report.metrics = metrics;
    report.trace = run.trace;
    report.timings = {run.trace.wall_time_s, spectral_s, run.trace.wall_time_s + spectral_s};
    std::lock_guard<std::mutex> guard(*reports_mutex);
    reports->push_back(std::move(report));
  } catch (const std::exception& e) {
    unit.row.status = std::string("error: ") + e.what();
  }
}

void print_aggregates(const std::vector<BenchRow>& rows) {
  // Group by (solver, n, sigma, k, rho) and report mean/std clustering error.
  std::map<std::string, std::vector<double>> groups;
  for (const auto& row : rows) {
    if (!row.ce) continue;
    std::ostringstream key;
    key << row.solver << " n=" << row.n << " sigma=" << row.sigma;
    if (row.k > 0) key << " k=" << row.k;
    if (row.rho > 0) key << " rho=" << row.rho;
    groups[key.str()].push_back(*row.ce);
  }
  for (const auto& [key, values] : groups) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = values.size() > 1 ? std::sqrt(var / (values.size() - 1.0)) : 0.0;
    std::cout << key << ": clustering_error mean " << mean << " std " << sd << " ("
              << values.size() << " trials)\n";
  }
}

void save_report_set(const std::vector<ssc::ExperimentReport>& reports,
                     const std::string& path) {
  nlohmann::json j = nlohmann::json::array();
  for (const auto& r : reports) j.push_back(ssc::to_json(r));
  std::ofstream out(path);
  if (!out) throw ssc::IoError("cannot write " + path);
  out << j.dump(2) << '\n';
}

int run_bench(const GlobalOptions& global, const BenchOptions& opt) {
  ensure_out_dir(global);
  std::vector<BenchUnit> units;

  const auto make_spec = [&](std::uint64_t seed, Index p, int K, Index r, Index n_per,
                             double sigma, Index shared) {
    ssc::SyntheticSpec spec;
    spec.p = p;
    spec.K = K;
    spec.r.assign(static_cast<std::size_t>(K), r);
    spec.n_per.assign(static_cast<std::size_t>(K), n_per);
    spec.sigma = sigma;
    spec.shared_dim = shared;
    spec.rng_seed = seed;
    return spec;
  };
  const auto base_row = [&](const ssc::SyntheticSpec& spec, int trial,
                            const std::string& solver) {
    BenchRow row;
    row.trial = trial;
    row.seed = spec.rng_seed;
    row.solver = solver;
    row.n = spec.total_points();
    row.p = spec.p;
    row.K = spec.K;
    row.r = spec.r.front();
    row.sigma = spec.sigma;
    row.shared_dim = spec.shared_dim;
    return row;
  };

  int K = 0;
  if (opt.suite == "rho-sweep") {
    // ADMM penalty sensitivity across rho = 0.1 .. 1000 with a fixed-lambda
    // proximal reference per trial.
    const int trials = opt.trials > 0 ? opt.trials : 3;
    const int iters = opt.iters > 0 ? opt.iters : 250;
    const Index p = opt.p > 0 ? opt.p : 32;
    K = opt.K > 0 ? opt.K : 2;
    const Index r = opt.r > 0 ? opt.r : 5;
    const Index n_per = opt.n_per > 0 ? opt.n_per : 100;
    const double sigma = opt.sigma >= 0 ? opt.sigma : 0.2;
    const double alpha = opt.alpha > 0 ? opt.alpha : 1.1;
    std::vector<double> rhos = opt.rho_list;
    if (rhos.empty()) rhos = {0.1, 0.316, 1.0, 3.16, 10.0, 31.6, 100.0, 316.0, 1000.0};

    for (int trial = 0; trial < trials; ++trial) {
      const auto spec = make_spec(global.seed + static_cast<std::uint64_t>(trial), p, K, r,
                                  n_per, sigma, 0);
      BenchUnit prox;
      prox.spec = spec;
      prox.request.solver = "prox-l1";
      prox.request.affine = true;
      prox.request.alpha = alpha;
      prox.request.max_iter = iters;
      prox.row = base_row(spec, trial, "prox-l1");
      prox.row.alpha = alpha;
      units.push_back(prox);
      for (const double rho : rhos) {
        BenchUnit admm;
        admm.spec = spec;
        admm.request.solver = "admm-fast";
        admm.request.affine = true;
        admm.request.alpha = alpha;
        admm.request.rho = rho;
        admm.request.max_iter = iters;
        admm.row = base_row(spec, trial, "admm-fast");
        admm.row.alpha = alpha;
        admm.row.rho = rho;
        units.push_back(admm);
      }
    }
  } else if (opt.suite == "sigma-sweep") {
    // Noise robustness of prox-l0 vs OMP at two sparsity levels.
    const int trials = opt.trials > 0 ? opt.trials : 5;
    const int iters = opt.iters > 0 ? opt.iters : 100;
    const Index p = opt.p > 0 ? opt.p : 64;
    K = opt.K > 0 ? opt.K : 3;
    const Index r = opt.r > 0 ? opt.r : 10;
    const Index n_per = opt.n_per > 0 ? opt.n_per : 200;
    const Index shared = opt.shared_dim >= 0 ? opt.shared_dim : 5;
    std::vector<double> sigmas = opt.sigma_list;
    if (sigmas.empty()) sigmas = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<Index> ks = opt.k_list;
    if (ks.empty()) ks = {10, 20};

    for (int trial = 0; trial < trials; ++trial) {
      for (const double sigma : sigmas) {
        const auto spec = make_spec(global.seed + static_cast<std::uint64_t>(trial), p, K, r,
                                    n_per, sigma, shared);
        for (const Index k : ks) {
          for (const char* solver : {"prox-l0", "omp"}) {
            BenchUnit unit;
            unit.spec = spec;
            unit.request.solver = solver;
            unit.request.affine = false;
            unit.request.k = k;
            unit.request.max_iter = iters;
            unit.row = base_row(spec, trial, solver);
            unit.row.k = k;
            units.push_back(unit);
          }
        }
      }
    }
  } else if (opt.suite == "n-sweep") {
    // Runtime and error growth with the number of points.
    const int trials = opt.trials > 0 ? opt.trials : 3;
    const int iters = opt.iters > 0 ? opt.iters : 50;
    const Index p = opt.p > 0 ? opt.p : 256;
    K = opt.K > 0 ? opt.K : 10;
    const Index r = opt.r > 0 ? opt.r : 3;
    const double sigma = opt.sigma >= 0 ? opt.sigma : 0.1;
    const double alpha = opt.alpha > 0 ? opt.alpha : 30.0;
    std::vector<Index> n_pers = opt.n_per_list;
    if (n_pers.empty()) n_pers = {20, 40, 80};

    for (int trial = 0; trial < trials; ++trial) {
      for (const Index n_per : n_pers) {
        const auto spec = make_spec(global.seed + static_cast<std::uint64_t>(trial), p, K, r,
                                    n_per, sigma, 0);
        BenchUnit prox;
        prox.spec = spec;
        prox.request.solver = "prox-l1";
        prox.request.affine = true;
        prox.request.alpha = alpha;
        prox.request.max_iter = iters;
        prox.row = base_row(spec, trial, "prox-l1");
        prox.row.alpha = alpha;
        units.push_back(prox);

        BenchUnit admm;
        admm.spec = spec;
        admm.request.solver = "admm-fast";
        admm.request.affine = true;
        admm.request.alpha = alpha;
        admm.request.rho = 10.0 * alpha;  // the large-sweep setting
        admm.request.max_iter = iters;
        admm.row = base_row(spec, trial, "admm-fast");
        admm.row.alpha = alpha;
        admm.row.rho = 10.0 * alpha;
        units.push_back(admm);
      }
    }
  } else {
    throw std::invalid_argument("unknown suite: " + opt.suite +
                                " (expected rho-sweep, sigma-sweep, or n-sweep)");
  }

  std::vector<ssc::ExperimentReport> reports;
  std::mutex reports_mutex;
  const int suite_K = K;
  ssc::parallel_for(0, static_cast<std::int64_t>(units.size()), global.threads,
                    [&](std::int64_t i) {
                      run_bench_unit(units[static_cast<std::size_t>(i)], opt.unit_norm,
                                     suite_K, &reports, &reports_mutex);
                    });

  std::vector<BenchRow> rows;
  rows.reserve(units.size());
  for (const auto& unit : units) rows.push_back(unit.row);

  const std::string csv_path = joined(global, opt.suite + ".csv");
  write_bench_csv(csv_path, opt.suite, rows);
  std::sort(reports.begin(), reports.end(),
            [](const ssc::ExperimentReport& a, const ssc::ExperimentReport& b) {
              return std::tie(a.config.at("trial"), a.solver, a.config.at("n"),
                              a.config.at("sigma"), a.config.at("k"), a.config.at("rho")) <
                     std::tie(b.config.at("trial"), b.solver, b.config.at("n"),
                              b.config.at("sigma"), b.config.at("k"), b.config.at("rho"));
            });
  save_report_set(reports, joined(global, opt.suite + "_reports.json"));

  print_aggregates(rows);

  if (opt.suite == "n-sweep") {
    // Least-squares slope of log(solve time) against log(n) per solver.
    std::map<std::string, std::vector<std::pair<double, double>>> points;
    for (const auto& row : rows)
      if (row.status == "ok" && row.solve_s > 0.0)
        points[row.solver].push_back(
            {std::log(static_cast<double>(row.n)), std::log(row.solve_s)});
    for (const auto& [solver, xy] : points) {
      if (xy.size() < 2) continue;
      double sx = 0, sy = 0, sxx = 0, sxy = 0;
      for (const auto& [x, y] : xy) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
      }
      const double m = static_cast<double>(xy.size());
      const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
      std::cout << solver << ": log-time vs log-n slope " << slope << '\n';
    }
  }

  std::cout << "wrote " << csv_path << " and " << joined(global, opt.suite + "_reports.json")
            << '\n';
  int failures = 0;
  for (const auto& row : rows)
    if (row.status != "ok") ++failures;
  if (failures > 0) std::cout << failures << " of " << rows.size() << " trials failed\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse subspace clustering toolkit"};
  app.require_subcommand(1);
  app.set_config("--config");
  app.allow_config_extras(CLI::config_extras_mode::error);

  GlobalOptions global;
  app.add_option("--seed", global.seed, "root RNG seed");
  app.add_option("--threads", global.threads, "worker threads (0 = hardware)");
  app.add_option("--out-dir", global.out_dir, "directory for output files");

  SynthOptions synth;
  auto* synth_cmd = app.add_subcommand("synth", "generate a union-of-subspaces dataset");
  synth_cmd->add_option("--p", synth.p, "ambient dimension")->required();
  synth_cmd->add_option("--K", synth.K, "number of subspaces")->required();
  synth_cmd->add_option("--r", synth.r, "subspace dimension(s)")->required();
  synth_cmd->add_option("--n-per", synth.n_per, "points per subspace")->required();
  synth_cmd->add_option("--sigma", synth.sigma, "noise standard deviation");
  synth_cmd->add_option("--shared-dim", synth.shared_dim, "pairwise intersection dimension");
  synth_cmd->add_option("--mu-mode", synth.mu_mode, "zero | random-unit")
      ->check(CLI::IsMember({"zero", "random-unit"}));
  synth_cmd->add_option("--out", synth.out, "output matrix path")->required();
  synth_cmd->add_option("--format", synth.format, "csv | csv-rows | raw")
      ->check(CLI::IsMember({"csv", "csv-rows", "raw"}));

  SolveOptions solve;
  auto* solve_cmd = app.add_subcommand("solve", "compute self-expressive coefficients");
  solve_cmd->add_option("--data", solve.data, "input matrix path")->required();
  solve_cmd->add_option("--format", solve.format, "csv | csv-rows | raw")
      ->check(CLI::IsMember({"csv", "csv-rows", "raw"}));
  solve_cmd->add_flag("--zscore", solve.zscore, "z-score features first");
  solve_cmd->add_flag("--unit-norm", solve.unit_norm, "normalize points to unit length first");
  solve_cmd
      ->add_option("--solver", solve.request.solver,
                   "prox-l1 | prox-l0 | admm-naive | admm-fast | omp")
      ->required()
      ->check(CLI::IsMember({"prox-l1", "prox-l0", "admm-naive", "admm-fast", "omp"}));
  solve_cmd->add_flag("--affine", solve.request.affine, "enforce c^T 1 = 1");
  solve_cmd->add_option("--lambda-e", solve.request.lambda_e, "residual weight");
  solve_cmd->add_option("--alpha", solve.request.alpha, "lambda_e = alpha / mu(X)");
  solve_cmd->add_option("--k", solve.request.k, "sparsity budget (l0 / omp)");
  solve_cmd->add_option("--rho", solve.request.rho, "ADMM penalty (default alpha)");
  solve_cmd->add_option("--max-iter", solve.request.max_iter, "iteration budget");
  solve_cmd->add_option_function<double>(
      "--epsilon", [&solve](double v) { solve.request.epsilon = v; }, "stopping tolerance");
  solve_cmd->add_option("--step-scale", solve.request.step_scale, "gamma = step_scale / L");
  solve_cmd->add_flag("--accelerate,!--no-accelerate", solve.request.accelerate,
                      "Nesterov acceleration for prox-l1");
  solve_cmd->add_flag("--line-search", solve.request.line_search, "backtracking step size");
  solve_cmd->add_option("--column-block", solve.request.column_block,
                        "solve this many columns at a time");
  solve_cmd->add_option("--truth", solve.truth, "ground-truth labels path");
  solve_cmd->add_option("--K", solve.K, "cluster after solving with this many clusters");
  solve_cmd->add_option("--out-c", solve.out_c, "coefficient output path");
  solve_cmd->add_option("--out-labels", solve.out_labels, "label output path (with --K)");
  solve_cmd->add_option("--report", solve.report, "JSON report path");

  ClusterOptions cluster;
  auto* cluster_cmd =
      app.add_subcommand("cluster", "spectral clustering of saved coefficients");
  cluster_cmd->add_option("--coeffs", cluster.coeffs, "coefficient triplet file")->required();
  cluster_cmd->add_option("--K", cluster.K, "number of clusters")->required();
  cluster_cmd->add_option("--truth", cluster.truth, "ground-truth labels path");
  cluster_cmd->add_option("--data", cluster.data, "data matrix (for the objective metric)");
  cluster_cmd->add_option("--format", cluster.format, "csv | csv-rows | raw")
      ->check(CLI::IsMember({"csv", "csv-rows", "raw"}));
  cluster_cmd->add_option("--lambda-e", cluster.lambda_e, "residual weight for the objective");
  cluster_cmd->add_option("--model", cluster.model,
                          "objective model: l1-linear | l1-affine | l0-linear | l0-affine");
  cluster_cmd->add_option("--out-labels", cluster.out_labels, "label output path");
  cluster_cmd->add_option("--report", cluster.report, "JSON report path");

  MetricsOptions metrics;
  auto* metrics_cmd = app.add_subcommand("metrics", "evaluate saved coefficients and labels");
  metrics_cmd->add_option("--coeffs", metrics.coeffs, "coefficient triplet file")->required();
  metrics_cmd->add_option("--truth", metrics.truth, "ground-truth labels path")->required();
  metrics_cmd->add_option("--pred", metrics.pred, "predicted labels path");
  metrics_cmd->add_option("--data", metrics.data, "data matrix (for the objective metric)");
  metrics_cmd->add_option("--format", metrics.format, "csv | csv-rows | raw")
      ->check(CLI::IsMember({"csv", "csv-rows", "raw"}));
  metrics_cmd->add_option("--lambda-e", metrics.lambda_e, "residual weight for the objective");
  metrics_cmd->add_option("--model", metrics.model, "objective model");
  metrics_cmd->add_option("--report", metrics.report, "JSON report path");

  BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "seeded multi-trial benchmark sweeps");
  bench_cmd->add_option("--suite", bench.suite, "rho-sweep | sigma-sweep | n-sweep")
      ->required()
      ->check(CLI::IsMember({"rho-sweep", "sigma-sweep", "n-sweep"}));
  bench_cmd->add_option("--trials", bench.trials, "trials per configuration");
  bench_cmd->add_option("--iters", bench.iters, "iteration budget override");
  bench_cmd->add_option("--p", bench.p, "ambient dimension");
  bench_cmd->add_option("--K", bench.K, "number of subspaces");
  bench_cmd->add_option("--r", bench.r, "subspace dimension");
  bench_cmd->add_option("--n-per", bench.n_per, "points per subspace");
  bench_cmd->add_option("--sigma", bench.sigma, "noise level (fixed-sigma suites)");
  bench_cmd->add_option("--shared-dim", bench.shared_dim, "pairwise intersection dimension");
  bench_cmd->add_option("--alpha", bench.alpha, "lambda_e = alpha / mu(X)");
  bench_cmd->add_flag("--unit-norm,!--no-unit-norm", bench.unit_norm,
                      "normalize points before solving (default on)");
  bench_cmd->add_option("--rho-list", bench.rho_list, "rho grid for rho-sweep");
  bench_cmd->add_option("--sigma-list", bench.sigma_list, "sigma grid for sigma-sweep");
  bench_cmd->add_option("--k-list", bench.k_list, "sparsity grid for sigma-sweep");
  bench_cmd->add_option("--n-per-list", bench.n_per_list,
                        "points-per-subspace grid for n-sweep");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (app.got_subcommand(synth_cmd)) return run_synth(global, synth);
    if (app.got_subcommand(solve_cmd)) return run_solve(global, solve);
    if (app.got_subcommand(cluster_cmd)) return run_cluster(global, cluster);
    if (app.got_subcommand(metrics_cmd)) return run_metrics(global, metrics);
    if (app.got_subcommand(bench_cmd)) return run_bench(global, bench);
  } catch (const ssc::IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return 4;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const ssc::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "failure: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
