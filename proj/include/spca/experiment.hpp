// Support-recovery experiment over spiked-covariance instances: run each
// method across a k grid, record TPR/FPR per cell, aggregate per-method ROC
// points and AUC. Cells execute on a small thread pool; results live in
// pre-assigned slots so assembly is deterministic regardless of scheduling.
#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "spca/exact.hpp"
#include "spca/heuristics.hpp"
#include "spca/oracle.hpp"
#include "spca/relax.hpp"
#include "spca/rounding.hpp"
#include "spca/spiked.hpp"
#include "spca/types.hpp"

namespace spca {

enum class Method { Exact, RelaxRound, Greedy, Tpm, Sorting };

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::Exact: return "exact";
    case Method::RelaxRound: return "relax-round";
    case Method::Greedy: return "greedy";
    case Method::Tpm: return "tpm";
    case Method::Sorting: return "sorting";
  }
  return "?";
}

inline Method parse_method(std::string_view name) {
  if (name == "exact") return Method::Exact;
  if (name == "relax-round") return Method::RelaxRound;
  if (name == "greedy") return Method::Greedy;
  if (name == "tpm") return Method::Tpm;
  if (name == "sorting") return Method::Sorting;
  throw ValidationError("unknown method '" + std::string(name) + "'");
}

struct ExperimentConfig {
  SpikedModel model;
  Index instances = 20;
  std::vector<Method> methods = {Method::Exact, Method::RelaxRound,
                                 Method::Greedy, Method::Tpm,
                                 Method::Sorting};
  std::vector<Index> k_grid = {5, 10, 15, 20, 25, 30, 35, 40};
  double time_limit_per_solve = 30.0;
  double relax_tol = 1e-5;
  int threads = 0;  // 0: hardware concurrency
};

struct ExperimentRow {
  Index instance = 0;
  Method method = Method::Sorting;
  Index k = 0;
  double tpr = 0, fpr = 0;
  double objective = 0;
  double gap = -1;  // negative: method provides no bound
  double seconds = 0;
  std::string status = "ok";
};

struct ExperimentSummary {
  std::map<std::string, double> auc;
  std::map<std::string, double> mean_seconds;
  std::map<std::string, double> mean_gap;  // exact / relax-round only
  std::vector<ExperimentRow> rows;
};

namespace detail {

// Trapezoid over the (FPR, TPR) sweep with (0,0) and (1,1) anchors.
inline double roc_auc(std::vector<std::pair<double, double>> pts) {
  pts.emplace_back(0.0, 0.0);
  pts.emplace_back(1.0, 1.0);
  std::sort(pts.begin(), pts.end());
  double auc = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    auc += (pts[i].first - pts[i - 1].first) *
           (pts[i].second + pts[i - 1].second) / 2.0;
  return auc;
}

}  // namespace detail

inline int resolve_thread_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("SPCA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? int(hw) : 1;
}

template <typename Scalar>
ExperimentSummary run_experiment(const ExperimentConfig& cfg) {
  if (cfg.methods.empty()) throw ValidationError("no methods selected");
  for (const Index k : cfg.k_grid) validate_budget(cfg.model.p, k);

  struct Cell {
    Index instance;
    std::size_t method;
    std::size_t kpos;
  };
  std::vector<Cell> cells;
  for (Index inst = 0; inst < cfg.instances; ++inst)
    for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi)
      for (std::size_t ki = 0; ki < cfg.k_grid.size(); ++ki)
        cells.push_back({inst, mi, ki});

  std::vector<ExperimentRow> rows(cells.size());

  // Instances are generated once per instance id (methods share them).
  std::vector<SpikedInstance<Scalar>> data;
  data.reserve(static_cast<std::size_t>(cfg.instances));
  for (Index i = 0; i < cfg.instances; ++i) {
    SpikedModel m = cfg.model;
    m.seed = derive_seed(cfg.model.seed, std::uint64_t(i));
    data.push_back(generate_spiked<Scalar>(m));
  }

  auto run_cell = [&](const Cell& cell, ExperimentRow& row) {
    const auto& sp = data[static_cast<std::size_t>(cell.instance)];
    const Instance<Scalar>& inst = sp.instance;
    const Index k = cfg.k_grid[cell.kpos];
    const Method method = cfg.methods[cell.method];
    row.instance = cell.instance;
    row.method = method;
    row.k = k;
    const auto t0 = std::chrono::steady_clock::now();
    Support support;
    try {
      switch (method) {
        case Method::Exact: {
          SolveOptions opts;
          opts.time_limit = cfg.time_limit_per_solve;
          auto rep = solve_exact(inst, k, opts);
          support = rep.incumbent.support;
          row.objective = double(rep.incumbent.objective);
          row.gap = double(rep.gap);
          row.status = std::string(solve_status_name(rep.status));
          break;
        }
        case Method::RelaxRound: {
          // Strengthened relaxation with the SOC outer-approximation of
          // the PSD cone and no dynamic cuts (the synthetic-benchmark
          // protocol; exact PSD at this scale buys little and costs much).
          auto relax = solve_relaxation(
              inst, k, RelaxationKind{RelaxTag::Strong, PsdMode::minors()},
              Scalar(cfg.relax_tol), 60000);
          auto fp = greedy_round(inst, k, relax.z_frac);
          support = fp.support;
          row.objective = double(fp.objective);
          row.gap = double((relax.upper_bound - fp.objective) /
                           std::max(relax.upper_bound, Scalar(1e-12)));
          row.status = std::string(conic_status_name(relax.solver_status));
          break;
        }
        case Method::Greedy: {
          auto fp = forward_greedy(inst, k);
          support = fp.support;
          row.objective = double(fp.objective);
          break;
        }
        case Method::Tpm: {
          auto fp = truncated_power_method(inst, k);
          support = fp.support;
          row.objective = double(fp.objective);
          break;
        }
        case Method::Sorting: {
          auto fp = sorting_baseline(inst, k);
          support = fp.support;
          row.objective = double(fp.objective);
          break;
        }
      }
    } catch (const Error& e) {
      row.status = std::string("error: ") + e.what();
      row.seconds = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
      return;
    }
    row.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();

    Index tp = 0, fp_count = 0, true_total = 0;
    for (Index i = 0; i < inst.p(); ++i) {
      const bool truth = sp.true_mask[size_t(i)];
      if (truth) ++true_total;
      if (support.is_chosen(i)) {
        if (truth)
          ++tp;
        else
          ++fp_count;
      }
    }
    row.tpr = true_total ? double(tp) / double(true_total) : 0.0;
    const Index neg_total = inst.p() - true_total;
    row.fpr = neg_total ? double(fp_count) / double(neg_total) : 0.0;
  };

  const int n_threads =
      std::min<int>(resolve_thread_count(cfg.threads), int(cells.size()));
  if (n_threads <= 1) {
    for (std::size_t i = 0; i < cells.size(); ++i) run_cell(cells[i], rows[i]);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t)
      pool.emplace_back([&] {
        while (true) {
          const std::size_t i = next.fetch_add(1);
          if (i >= cells.size()) return;
          run_cell(cells[i], rows[i]);
        }
      });
    for (auto& th : pool) th.join();
  }

  ExperimentSummary summary;
  summary.rows = std::move(rows);
  for (std::size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    const Method method = cfg.methods[mi];
    const std::string name(method_name(method));
    std::vector<std::pair<double, double>> sweep;
    double total_seconds = 0.0, total_gap = 0.0;
    int count = 0, gap_count = 0;
    for (std::size_t ki = 0; ki < cfg.k_grid.size(); ++ki) {
      double tpr = 0, fpr = 0;
      int ok = 0;
      for (const auto& row : summary.rows) {
        if (row.method != method || row.k != cfg.k_grid[ki]) continue;
        if (row.status.rfind("error", 0) == 0) continue;
        tpr += row.tpr;
        fpr += row.fpr;
        ++ok;
        total_seconds += row.seconds;
        ++count;
        if (row.gap >= 0) {
          total_gap += row.gap;
          ++gap_count;
        }
      }
      if (ok) sweep.emplace_back(fpr / ok, tpr / ok);
    }
    summary.auc[name] = detail::roc_auc(std::move(sweep));
    summary.mean_seconds[name] = count ? total_seconds / count : 0.0;
    if (gap_count) summary.mean_gap[name] = total_gap / gap_count;
  }
  return summary;
}

}  // namespace spca
