// Shared scalar-templated dense types, index-set machinery and the error
// hierarchy used across the solver suite.
#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace spca {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = int;
using IndexList = std::vector<Index>;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ValidationError : Error {
  using Error::Error;
};
struct ContractError : Error {
  using Error::Error;
};
struct CertificateError : Error {
  double best_residual;
  CertificateError(const std::string& msg, double residual)
      : Error(msg), best_residual(residual) {}
};

inline void validate_budget(Index p, Index k) {
  if (k < 1) throw ValidationError("k must be >= 1, got " + std::to_string(k));
  if (k > p)
    throw ValidationError("k must be <= p = " + std::to_string(p) + ", got " +
                          std::to_string(k));
}

// Ternary selection state over [p]: every coordinate is chosen, excluded or
// still free, with a cardinality budget k on the chosen set.
class Support {
 public:
  enum class State : std::int8_t { Free = 0, Chosen = 1, Excluded = 2 };

  Support() = default;

  static Support all_free(Index p, Index k) {
    validate_budget(p, k);
    Support s;
    s.state_.assign(static_cast<std::size_t>(p), State::Free);
    s.k_ = k;
    s.n_chosen_ = 0;
    s.n_excluded_ = 0;
    return s;
  }

  // Complete support: the given indices are chosen, everything else excluded.
  static Support complete(Index p, Index k, const IndexList& chosen) {
    Support s = all_free(p, k);
    for (Index i : chosen) s.fix(i, true);
    for (Index i = 0; i < p; ++i)
      if (s.state(i) == State::Free) s.fix(i, false);
    return s;
  }

  Index p() const { return static_cast<Index>(state_.size()); }
  Index k() const { return k_; }
  Index num_chosen() const { return n_chosen_; }
  Index num_excluded() const { return n_excluded_; }
  Index num_free() const { return p() - n_chosen_ - n_excluded_; }
  bool is_complete() const { return num_free() == 0; }

  State state(Index i) const { return state_[static_cast<std::size_t>(i)]; }
  bool is_chosen(Index i) const { return state(i) == State::Chosen; }
  bool is_excluded(Index i) const { return state(i) == State::Excluded; }
  bool is_free(Index i) const { return state(i) == State::Free; }

  void fix(Index i, bool to_one) {
    auto& st = state_.at(static_cast<std::size_t>(i));
    if (st != State::Free)
      throw ContractError("index " + std::to_string(i) + " already fixed");
    if (to_one) {
      if (n_chosen_ + 1 > k_)
        throw ContractError("fixing index " + std::to_string(i) +
                            " exceeds budget k = " + std::to_string(k_));
      st = State::Chosen;
      ++n_chosen_;
    } else {
      st = State::Excluded;
      ++n_excluded_;
    }
  }

  Support with_fixed(Index i, bool to_one) const {
    Support s = *this;
    s.fix(i, to_one);
    return s;
  }

  // All remaining free indices become excluded.
  Support completed() const {
    Support s = *this;
    for (Index i = 0; i < p(); ++i)
      if (s.is_free(i)) s.fix(i, false);
    return s;
  }

  // All remaining free indices become chosen; requires budget room.
  Support completed_with_free_chosen() const {
    Support s = *this;
    for (Index i = 0; i < p(); ++i)
      if (s.is_free(i)) s.fix(i, true);
    return s;
  }

  IndexList chosen() const { return collect(State::Chosen); }
  IndexList excluded() const { return collect(State::Excluded); }
  IndexList free_indices() const { return collect(State::Free); }

  friend bool operator==(const Support& a, const Support& b) {
    return a.k_ == b.k_ && a.state_ == b.state_;
  }

 private:
  IndexList collect(State which) const {
    IndexList out;
    for (Index i = 0; i < p(); ++i)
      if (state(i) == which) out.push_back(i);
    return out;
  }

  std::vector<State> state_;
  Index k_ = 0;
  Index n_chosen_ = 0;
  Index n_excluded_ = 0;
};

// A k-sparse unit vector together with its support and explained variance.
template <typename Scalar>
struct FeasiblePoint {
  Support support;
  Vector<Scalar> x;
  Scalar objective = Scalar(0);
};

}  // namespace spca
