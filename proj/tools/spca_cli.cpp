// Command-line front end: exact solves, relaxations with rounding,
// heuristics, brute-force enumeration and the spiked-covariance support
// recovery experiment. Reports are JSON (schema 1); experiments also emit a
// tidy CSV of per-cell results.
#include <CLI11.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spca/exact.hpp"
#include "spca/experiment.hpp"
#include "spca/heuristics.hpp"
#include "spca/instance.hpp"
#include "spca/oracle.hpp"
#include "spca/relax.hpp"
#include "spca/report.hpp"
#include "spca/rounding.hpp"

namespace {

using namespace spca;

constexpr int kExitOk = 0;
constexpr int kExitInputError = 2;
constexpr int kExitNoIncumbent = 3;

struct RunConfig {
  std::string input_path;
  std::string bundled_name;
  std::string csv_mode = "covariance";
  bool normalize = false;
  Index k = 0;
  std::string mode = "exact";
  std::string relaxation = "strong";
  std::string psd_mode;
  std::string heuristic = "tpm";
  double gap_tol = 1e-3;
  double time_limit = std::numeric_limits<double>::infinity();
  long long node_limit = std::numeric_limits<long long>::max();
  std::uint64_t seed = 0;
  int samples = 100;
  std::string output_path;
  std::string trace_path;
  // experiment mode
  Index exp_p = 150;
  Index exp_n = 150;
  double exp_snr = 2.0;
  Index exp_instances = 20;
  std::string exp_k_grid = "5,10,15,20,25,30,35,40";
  std::string exp_methods = "exact,relax-round,greedy,tpm,sorting";
  std::string experiment_csv;
};

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

RelaxationKind parse_relaxation(const RunConfig& cfg) {
  RelaxationKind kind;
  if (cfg.relaxation == "weak")
    kind.tag = RelaxTag::Weak;
  else if (cfg.relaxation == "strong")
    kind.tag = RelaxTag::Strong;
  else if (cfg.relaxation == "strong-minors")
    kind.tag = RelaxTag::StrongMinors;
  else if (cfg.relaxation == "daspremont")
    kind.tag = RelaxTag::DAspremont;
  else if (cfg.relaxation == "daspremont-strong")
    kind.tag = RelaxTag::DAspremontStrong;
  else if (cfg.relaxation == "dnn")
    kind.tag = RelaxTag::Dnn;
  else
    throw ValidationError("unknown relaxation '" + cfg.relaxation + "'");

  if (!cfg.psd_mode.empty()) {
    if (cfg.psd_mode == "exact")
      kind.psd_mode = PsdMode::exact();
    else if (cfg.psd_mode == "minors")
      kind.psd_mode = PsdMode::minors();
    else if (cfg.psd_mode.rfind("minors-cuts=", 0) == 0)
      kind.psd_mode =
          PsdMode::minors_plus_cuts(std::stoi(cfg.psd_mode.substr(12)));
    else
      throw ValidationError("unknown psd-mode '" + cfg.psd_mode +
                            "' (expected exact, minors or minors-cuts=N)");
  }
  return kind;
}

Instance<double> load_instance(const RunConfig& cfg) {
  if (!cfg.bundled_name.empty()) return bundled<double>(cfg.bundled_name);
  CsvMode mode;
  if (cfg.csv_mode == "covariance")
    mode = CsvMode::Covariance;
  else if (cfg.csv_mode == "data")
    mode = CsvMode::DataMatrix;
  else
    throw ValidationError("unknown csv-mode '" + cfg.csv_mode +
                          "' (expected covariance or data)");
  return load_csv<double>(cfg.input_path, mode, cfg.normalize);
}

void emit(const Json& j, const std::string& path) {
  if (path.empty()) {
    std::cout << j.dump(2) << std::endl;
  } else {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << j.dump(2) << '\n';
  }
}

int run_experiment_mode(const RunConfig& cfg) {
  ExperimentConfig ecfg;
  ecfg.model.p = cfg.exp_p;
  ecfg.model.n = cfg.exp_n;
  ecfg.model.sigma_snr = cfg.exp_snr;
  ecfg.model.seed = cfg.seed;
  ecfg.instances = cfg.exp_instances;
  ecfg.time_limit_per_solve = std::isfinite(cfg.time_limit)
                                  ? cfg.time_limit
                                  : 30.0;
  ecfg.methods.clear();
  for (const auto& name : split_list(cfg.exp_methods))
    ecfg.methods.push_back(parse_method(name));
  ecfg.k_grid.clear();
  for (const auto& tok : split_list(cfg.exp_k_grid))
    ecfg.k_grid.push_back(Index(std::stoi(tok)));

  const auto t0 = std::chrono::steady_clock::now();
  auto summary = run_experiment<double>(ecfg);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();

  std::string csv_path = cfg.experiment_csv;
  if (csv_path.empty())
    csv_path = cfg.output_path.empty() ? "experiment.csv"
                                       : cfg.output_path + ".csv";
  write_experiment_csv(summary, csv_path);
  emit(experiment_summary_json({}, ecfg, summary, secs), cfg.output_path);
  return kExitOk;
}

int run(const RunConfig& cfg) {
  if (cfg.mode == "experiment") return run_experiment_mode(cfg);

  if (cfg.k < 1)
    throw ValidationError("k must be >= 1, got " + std::to_string(cfg.k));
  if (cfg.input_path.empty() && cfg.bundled_name.empty())
    throw ValidationError("exactly one of --input or --bundled is required");
  auto inst = load_instance(cfg);
  validate_budget(inst.p(), cfg.k);
  ReportInputs in{inst.name, inst.p(), cfg.k, cfg.mode};
  const auto t0 = std::chrono::steady_clock::now();
  auto seconds = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t0)
        .count();
  };

  if (cfg.mode == "exact") {
    SolveOptions opts;
    opts.gap_tol = cfg.gap_tol;
    opts.time_limit = cfg.time_limit;
    opts.node_limit = cfg.node_limit;
    std::ofstream trace_file;
    if (!cfg.trace_path.empty()) {
      trace_file.open(cfg.trace_path);
      if (!trace_file)
        throw ParseError("cannot open trace file: " + cfg.trace_path);
      opts.trace = &trace_file;
    }
    auto rep = solve_exact(inst, cfg.k, opts);
    emit(solve_report_json(in, rep), cfg.output_path);
    return kExitOk;
  }
  if (cfg.mode == "relax" || cfg.mode == "relax-round") {
    const RelaxationKind kind = parse_relaxation(cfg);
    auto relax = solve_relaxation<double>(inst, cfg.k, kind);
    if (cfg.mode == "relax") {
      emit(relax_report_json<double>(in, relax, nullptr, seconds()),
           cfg.output_path);
      return kExitOk;
    }
    FeasiblePoint<double> rounded =
        (kind.tag == RelaxTag::Dnn && relax.Z.has_value())
            ? gw_round(inst, cfg.k, relax.z_frac, *relax.Z, cfg.samples,
                       cfg.seed)
            : greedy_round(inst, cfg.k, relax.z_frac);
    emit(relax_report_json(in, relax, &rounded, seconds()), cfg.output_path);
    return kExitOk;
  }
  if (cfg.mode == "heuristic") {
    FeasiblePoint<double> fp;
    if (cfg.heuristic == "tpm")
      fp = truncated_power_method(inst, cfg.k);
    else if (cfg.heuristic == "greedy")
      fp = forward_greedy(inst, cfg.k);
    else if (cfg.heuristic == "sorting")
      fp = sorting_baseline(inst, cfg.k);
    else
      throw ValidationError("unknown heuristic '" + cfg.heuristic + "'");
    emit(point_report_json(in, fp, /*is_oracle=*/false, seconds()),
         cfg.output_path);
    return kExitOk;
  }
  if (cfg.mode == "oracle") {
    auto res = brute_force(inst, cfg.k);
    emit(point_report_json(in, res.point, /*is_oracle=*/true, seconds()),
         cfg.output_path);
    return kExitOk;
  }
  throw ValidationError("unknown mode '" + cfg.mode + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse principal component analysis solvers"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* solve = app.add_subcommand(
      "solve", "solve one instance or run the synthetic experiment");
  auto* input = solve->add_option("--input", cfg.input_path,
                                  "CSV file (covariance or data matrix)");
  auto* bundled_opt =
      solve->add_option("--bundled", cfg.bundled_name, "bundled dataset name");
  input->excludes(bundled_opt);
  solve->add_option("--csv-mode", cfg.csv_mode,
                    "covariance (default) or data");
  solve->add_flag("--normalize", cfg.normalize,
                  "center and scale data-matrix columns");
  solve->add_option("--k", cfg.k, "sparsity budget");
  solve->add_option(
      "--mode", cfg.mode,
      "exact | relax | relax-round | heuristic | oracle | experiment");
  solve->add_option("--relaxation", cfg.relaxation,
                    "weak | strong | strong-minors | daspremont | "
                    "daspremont-strong | dnn");
  solve->add_option("--psd-mode", cfg.psd_mode,
                    "exact | minors | minors-cuts=N");
  solve->add_option("--heuristic", cfg.heuristic, "tpm | greedy | sorting");
  solve->add_option("--gap-tol", cfg.gap_tol, "relative optimality gap");
  solve->add_option("--time-limit", cfg.time_limit, "seconds per solve");
  solve->add_option("--node-limit", cfg.node_limit, "branch-and-bound nodes");
  solve->add_option("--seed", cfg.seed, "random seed");
  solve->add_option("--samples", cfg.samples,
                    "random rounding samples (dnn relax-round)");
  solve->add_option("--output", cfg.output_path,
                    "JSON report path (default: stdout)");
  solve->add_option("--trace", cfg.trace_path, "per-node CSV trace (exact)");
  solve->add_option("--p", cfg.exp_p, "experiment: dimension");
  solve->add_option("--n", cfg.exp_n, "experiment: samples in noise matrix");
  solve->add_option("--snr", cfg.exp_snr, "experiment: signal-to-noise");
  solve->add_option("--instances", cfg.exp_instances,
                    "experiment: instance count");
  solve->add_option("--k-grid", cfg.exp_k_grid,
                    "experiment: comma-separated k values");
  solve->add_option("--methods", cfg.exp_methods,
                    "experiment: comma-separated method names");
  solve->add_option("--experiment-csv", cfg.experiment_csv,
                    "experiment: per-cell CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitInputError : kExitOk;
  }

  try {
    return run(cfg);
  } catch (const CertificateError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoIncumbent;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const Error& e) {
    // Limits hit before any incumbent existed, or internal solve trouble.
    std::cerr << "error: " << e.what() << "\n";
    return kExitNoIncumbent;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}
