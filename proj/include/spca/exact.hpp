// Certifiably optimal solver: outer-approximation cuts embedded in a
// best-first branch-and-bound over support fixings, pruned by worst-case
// Gershgorin bounds. Single-threaded and deterministic: ties in the node
// queue break toward the most recently created node.
#pragma once

#include <chrono>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <string>
#include <vector>

#include "spca/bounds.hpp"
#include "spca/heuristics.hpp"
#include "spca/instance.hpp"
#include "spca/subproblem.hpp"
#include "spca/types.hpp"

namespace spca {

enum class SolveStatus { Optimal, GapLimit, TimeLimit, NodeLimit };

inline std::string_view solve_status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::GapLimit: return "gap-limit";
    case SolveStatus::TimeLimit: return "time-limit";
    case SolveStatus::NodeLimit: return "node-limit";
  }
  return "?";
}

struct SolveOptions {
  double gap_tol = 1e-3;
  double time_limit = std::numeric_limits<double>::infinity();  // seconds
  std::int64_t node_limit = std::numeric_limits<std::int64_t>::max();
  bool use_gershgorin = true;
  bool use_cassini = false;
  bool warm_start = true;
  std::ostream* trace = nullptr;  // per-node CSV: id,depth,bound,action
};

template <typename Scalar>
struct SolveReport {
  FeasiblePoint<Scalar> incumbent;
  Scalar upper_bound = std::numeric_limits<Scalar>::infinity();
  Scalar gap = std::numeric_limits<Scalar>::infinity();
  std::int64_t nodes_explored = 0;
  std::int64_t cuts_generated = 0;
  double wall_time = 0;
  SolveStatus status = SolveStatus::Optimal;

  Scalar lower_bound() const { return incumbent.objective; }
};

// Upper bound on max_z min_cuts cut(z) over binary completions of s with
// |z| <= k. Per cut the maximization is exact: the fixed coordinates
// contribute unconditionally and the largest free gradients fill the
// budget; min-composition over cuts keeps validity.
template <typename Scalar>
Scalar cut_model_bound(const std::vector<Cut<Scalar>>& cuts,
                       const Support& s, Index k) {
  if (cuts.empty()) return std::numeric_limits<Scalar>::infinity();
  const Index p = s.p();
  Scalar best = std::numeric_limits<Scalar>::infinity();
  std::vector<Scalar> free_grads;
  free_grads.reserve(static_cast<std::size_t>(p));
  for (const Cut<Scalar>& cut : cuts) {
    // cut(z) = value + sum_i grad_i z_i (grad vanishes on chosen(base)).
    Scalar acc = cut.value;
    free_grads.clear();
    for (Index i = 0; i < p; ++i) {
      if (s.is_chosen(i))
        acc += cut.grad(i);
      else if (s.is_free(i) && cut.grad(i) > Scalar(0))
        free_grads.push_back(cut.grad(i));
    }
    const Index room = k - s.num_chosen();
    if (room > 0 && !free_grads.empty()) {
      const Index take = std::min<Index>(room, Index(free_grads.size()));
      std::nth_element(free_grads.begin(), free_grads.begin() + (take - 1),
                       free_grads.end(), std::greater<Scalar>());
      for (Index t = 0; t < take; ++t) acc += free_grads[t];
    }
    best = std::min(best, acc);
  }
  return best;
}

namespace detail {

template <typename Scalar>
struct BnbNode {
  Support support;
  Scalar bound;
  Index depth;
  std::int64_t id;                // creation order, for deterministic ties
  std::size_t cuts_seen;          // cut pool size when bound was computed
};

template <typename Scalar>
struct NodeOrder {
  bool operator()(const BnbNode<Scalar>& a, const BnbNode<Scalar>& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // max-heap on bound
    return a.id < b.id;  // newer node first
  }
};

}  // namespace detail

template <typename Scalar>
SolveReport<Scalar> solve_exact(const Instance<Scalar>& inst, Index k,
                                const SolveOptions& opts = {}) {
  validate_budget(inst.p(), k);
  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         t_start)
        .count();
  };
  const Index p = inst.p();
  const Scalar inf = std::numeric_limits<Scalar>::infinity();

  SolveReport<Scalar> report;
  std::vector<Cut<Scalar>> cuts;
  std::map<IndexList, std::size_t> cut_index;  // dedupe by base support

  if (opts.trace) *opts.trace << "node,depth,bound,action\n";
  auto trace = [&](std::int64_t id, Index depth, Scalar bound,
                   std::string_view action) {
    if (opts.trace)
      *opts.trace << id << ',' << depth << ',' << bound << ',' << action
                  << '\n';
  };

  // Evaluates a complete support: incumbent update plus one cut, reusing
  // the cut when the support was already visited.
  auto process_complete = [&](const Support& s) -> Scalar {
    const Scalar f = eval_f(inst, s);
    if (f > report.incumbent.objective ||
        report.incumbent.x.size() == 0) {
      report.incumbent = detail::polish_support(inst, k, s.chosen());
    }
    const IndexList key = s.chosen();
    if (cut_index.find(key) == cut_index.end()) {
      cuts.push_back(make_cut(inst, s));
      cut_index.emplace(key, cuts.size() - 1);
      ++report.cuts_generated;
    }
    return f;
  };

  // Root incumbent.
  if (opts.warm_start) {
    auto warm = truncated_power_method(inst, k);
    report.incumbent = warm;
    process_complete(warm.support);
  }

  auto node_bound = [&](const Support& s) {
    Scalar b = cut_model_bound(cuts, s, k);
    if (opts.use_gershgorin)
      b = std::min(b, gershgorin_node_bound(inst, s, k));
    if (opts.use_cassini) b = std::min(b, cassini_node_bound(inst, s, k));
    return b;
  };

  std::priority_queue<detail::BnbNode<Scalar>,
                      std::vector<detail::BnbNode<Scalar>>,
                      detail::NodeOrder<Scalar>>
      open;
  std::int64_t next_id = 0;
  Support root = Support::all_free(p, k);
  open.push({root, node_bound(root), 0, next_id++, cuts.size()});

  Scalar pruned_ub = -inf;  // max bound among tolerance-pruned nodes
  auto lb = [&]() -> Scalar {
    return report.incumbent.x.size() ? report.incumbent.objective : -inf;
  };
  auto prune_threshold = [&]() -> Scalar {
    const Scalar l = lb();
    return l > Scalar(0) ? l * (Scalar(1) + Scalar(opts.gap_tol)) : l;
  };

  SolveStatus status = SolveStatus::Optimal;
  std::optional<Scalar> gap_break_ub;
  while (!open.empty()) {
    if (elapsed() > opts.time_limit) {
      status = SolveStatus::TimeLimit;
      break;
    }
    if (report.nodes_explored >= opts.node_limit) {
      status = SolveStatus::NodeLimit;
      break;
    }

    detail::BnbNode<Scalar> node = open.top();
    open.pop();
    ++report.nodes_explored;

    // Stale bound: new cuts may have arrived since the node was created.
    if (node.cuts_seen < cuts.size()) {
      node.bound = std::min(node.bound, node_bound(node.support));
      node.cuts_seen = cuts.size();
    }
    if (node.bound <= prune_threshold()) {
      pruned_ub = std::max(pruned_ub, node.bound);
      trace(node.id, node.depth, node.bound, "prune");
      continue;
    }

    // Unresolved work is this node plus the rest of the heap (top is max).
    const Scalar global_ub =
        std::max(lb(), std::max(node.bound,
                                open.empty() ? -inf : open.top().bound));
    if (std::isfinite(double(global_ub)) && lb() > -inf) {
      const Scalar g = (global_ub - lb()) /
                       std::max(std::abs(global_ub), Scalar(1e-12));
      if (g <= Scalar(opts.gap_tol)) {
        gap_break_ub = global_ub;
        trace(node.id, node.depth, node.bound, "gap-reached");
        break;
      }
    }

    Support s = node.support;
    // Nodes that can take every remaining free index auto-complete.
    if (!s.is_complete() && s.num_chosen() + s.num_free() <= k)
      s = s.completed_with_free_chosen();

    if (s.is_complete() || s.num_chosen() == k) {
      if (!s.is_complete()) s = s.completed();
      if (s.num_chosen() == 0) {
        trace(node.id, node.depth, node.bound, "prune");
        continue;
      }
      const Scalar f = process_complete(s);
      pruned_ub = std::max(pruned_ub, std::min(node.bound, f));
      trace(node.id, node.depth, f, "complete");
      continue;
    }

    // Branch on the free index with the largest absolute row mass over
    // non-excluded columns; ties go to the smallest index.
    Index branch_idx = -1;
    Scalar best_mass = -inf;
    for (Index i = 0; i < p; ++i) {
      if (!s.is_free(i)) continue;
      Scalar mass = Scalar(0);
      for (Index j = 0; j < p; ++j)
        if (!s.is_excluded(j)) mass += std::abs(inst.sigma(i, j));
      if (mass > best_mass) {
        best_mass = mass;
        branch_idx = i;
      }
    }
    trace(node.id, node.depth, node.bound, "branch");
    for (const bool to_one : {true, false}) {
      Support child = s.with_fixed(branch_idx, to_one);
      if (child.num_chosen() == 0 && child.num_free() == 0) continue;
      const Scalar cb = std::min(node.bound, node_bound(child));
      if (cb <= prune_threshold()) {
        pruned_ub = std::max(pruned_ub, std::min(cb, prune_threshold()));
        continue;
      }
      open.push({std::move(child), cb, Index(node.depth + 1), next_id++,
                 cuts.size()});
    }
  }

  // Certified bound: incumbent, tolerance-pruned nodes, the gap-break
  // snapshot (which already covers the popped node and the heap top), and
  // any heap remainder after a limit stop.
  Scalar ub = std::max(lb(), pruned_ub);
  if (gap_break_ub.has_value()) {
    ub = std::max(ub, *gap_break_ub);
  } else {
    while (!open.empty()) {
      ub = std::max(ub, open.top().bound);
      open.pop();
    }
  }
  report.upper_bound = ub;

  if (report.incumbent.x.size() == 0)
    throw Error("no incumbent found (node budget too small for first leaf)");

  report.gap = (report.upper_bound - lb()) /
               std::max(std::abs(report.upper_bound), Scalar(1e-12));
  if (report.gap < Scalar(0)) report.gap = Scalar(0);
  report.wall_time = elapsed();
  report.status = status;
  return report;
}

}  // namespace spca
