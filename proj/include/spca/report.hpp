// Machine-readable run reports (schema version 1). Field order is fixed so
// identical runs serialize byte-identically; time_seconds is the only field
// expected to differ between repeated runs.
#pragma once

#include <json.hpp>

#include <fstream>
#include <string>

#include "spca/exact.hpp"
#include "spca/experiment.hpp"
#include "spca/types.hpp"

namespace spca {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

struct ReportInputs {
  std::string instance_name;
  Index p = 0;
  Index k = 0;
  std::string mode;
};

template <typename Scalar>
Json feasible_point_json(const FeasiblePoint<Scalar>& fp) {
  Json support = Json::array();
  Json loadings = Json::array();
  for (const Index i : fp.support.chosen()) {
    support.push_back(i + 1);  // 1-based, sorted
    loadings.push_back(double(fp.x(i)));
  }
  return Json{{"support", std::move(support)}, {"x", std::move(loadings)}};
}

inline Json base_report(const ReportInputs& in) {
  Json j;
  j["schema"] = kReportSchemaVersion;
  j["instance"] = in.instance_name;
  j["p"] = in.p;
  j["k"] = in.k;
  j["mode"] = in.mode;
  return j;
}

template <typename Scalar>
Json solve_report_json(const ReportInputs& in, const SolveReport<Scalar>& rep) {
  Json j = base_report(in);
  j["lower_bound"] = double(rep.incumbent.objective);
  j["upper_bound"] = double(rep.upper_bound);
  j["gap"] = double(rep.gap);
  const Json point = feasible_point_json(rep.incumbent);
  j["support"] = point["support"];
  j["x"] = point["x"];
  j["nodes"] = rep.nodes_explored;
  j["cuts"] = rep.cuts_generated;
  j["iterations"] = rep.cuts_generated;  // one cut per master iteration
  j["time_seconds"] = rep.wall_time;
  j["status"] = std::string(solve_status_name(rep.status));
  return j;
}

template <typename Scalar>
Json relax_report_json(const ReportInputs& in,
                       const RelaxationResult<Scalar>& relax,
                       const FeasiblePoint<Scalar>* rounded,
                       double time_seconds) {
  Json j = base_report(in);
  if (rounded)
    j["lower_bound"] = double(rounded->objective);
  else
    j["lower_bound"] = nullptr;
  j["upper_bound"] = double(relax.upper_bound);
  if (rounded)
    j["gap"] = double((relax.upper_bound - rounded->objective) /
                      std::max(std::abs(double(relax.upper_bound)), 1e-12));
  else
    j["gap"] = nullptr;
  if (rounded) {
    const Json point = feasible_point_json(*rounded);
    j["support"] = point["support"];
    j["x"] = point["x"];
  } else {
    j["support"] = nullptr;
    j["x"] = nullptr;
  }
  j["nodes"] = 0;
  j["cuts"] = relax.cuts_added;
  j["iterations"] = relax.iterations;
  j["time_seconds"] = time_seconds;
  j["status"] = std::string(conic_status_name(relax.solver_status));
  j["bound_certified"] = relax.bound_certified;
  return j;
}

template <typename Scalar>
Json point_report_json(const ReportInputs& in, const FeasiblePoint<Scalar>& fp,
                       bool is_oracle, double time_seconds) {
  Json j = base_report(in);
  j["lower_bound"] = double(fp.objective);
  if (is_oracle) {
    j["upper_bound"] = double(fp.objective);
    j["gap"] = 0.0;
  } else {
    j["upper_bound"] = nullptr;
    j["gap"] = nullptr;
  }
  const Json point = feasible_point_json(fp);
  j["support"] = point["support"];
  j["x"] = point["x"];
  j["nodes"] = 0;
  j["cuts"] = 0;
  j["iterations"] = 0;
  j["time_seconds"] = time_seconds;
  j["status"] = "optimal";
  if (!is_oracle) j["status"] = "heuristic";
  return j;
}

inline Json experiment_summary_json(const ReportInputs& in,
                                    const ExperimentConfig& cfg,
                                    const ExperimentSummary& summary,
                                    double time_seconds) {
  Json j;
  j["schema"] = kReportSchemaVersion;
  j["mode"] = "experiment";
  j["p"] = cfg.model.p;
  j["n"] = cfg.model.n;
  j["snr"] = cfg.model.sigma_snr;
  j["seed"] = cfg.model.seed;
  j["instances"] = cfg.instances;
  Json grid = Json::array();
  for (const Index k : cfg.k_grid) grid.push_back(k);
  j["k_grid"] = std::move(grid);
  Json methods = Json::array();
  for (const Method m : cfg.methods)
    methods.push_back(std::string(method_name(m)));
  j["methods"] = std::move(methods);
  j["auc"] = summary.auc;
  j["mean_gap"] = summary.mean_gap;
  j["mean_seconds"] = summary.mean_seconds;
  j["time_seconds"] = time_seconds;
  (void)in;
  return j;
}

inline void write_experiment_csv(const ExperimentSummary& summary,
                                 const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open file for writing: " + path);
  out << "instance,method,k,tpr,fpr,objective,gap,seconds,status\n";
  for (const auto& row : summary.rows) {
    out << row.instance << ',' << method_name(row.method) << ',' << row.k
        << ',' << row.tpr << ',' << row.fpr << ',' << row.objective << ',';
    if (row.gap >= 0) out << row.gap;
    out << ',' << row.seconds << ',' << row.status << '\n';
  }
}

}  // namespace spca
