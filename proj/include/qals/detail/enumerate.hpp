#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <utility>

#include "qals/core.hpp"

namespace qals::detail {

// Walks all 2^n spin vectors in Gray-code order starting from all -1.
// `before_flip(z, i)` runs while z still holds the old spin i.
template <class BeforeFlip, class Visit>
void gray_walk(std::size_t n, BeforeFlip&& before_flip, Visit&& visit) {
  SpinVector z(n, -1);
  visit(z);
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t t = 1; t < total; ++t) {
    const auto i = static_cast<std::size_t>(std::countr_zero(t));
    before_flip(z, i);
    z.flip(i);
    visit(z);
  }
}

// Incrementally tracked Ising energy for the Gray walk.
class EnergyTracker {
public:
  explicit EnergyTracker(const WeightMatrix& theta) : theta_(&theta), field_(theta.size(), 0.0) {
    const SpinVector start(theta.size(), -1);
    value_ = energy(theta, start);
    for (const auto& [i, j] : theta.graph().edges()) {
      field_[i] -= theta.coupling(i, j);
      field_[j] -= theta.coupling(i, j);
    }
  }

  double value() const noexcept { return value_; }

  void flip(const SpinVector& z, std::size_t i) {
    const double zi = z[i];
    value_ += -2.0 * zi * (theta_->bias(i) + field_[i]);
    for (auto j : theta_->graph().neighbors(i)) field_[j] -= 2.0 * zi * theta_->coupling(i, j);
  }

  // Upper bound on |energy|, used to size the rounding tolerance.
  static double magnitude(const WeightMatrix& theta) {
    double m = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) m += std::abs(theta.bias(i));
    for (const auto& [i, j] : theta.graph().edges()) m += std::abs(theta.coupling(i, j));
    return m;
  }

private:
  const WeightMatrix* theta_;
  std::vector<double> field_;
  double value_ = 0.0;
};

// Incrementally tracked z^T Q z.
class ObjectiveTracker {
public:
  explicit ObjectiveTracker(const QuboProblem& problem)
      : q_(&problem.matrix()), field_(problem.size(), 0.0) {
    const SpinVector start(problem.size(), -1);
    value_ = objective(problem, start);
    for (std::size_t i = 0; i < q_->size(); ++i)
      for (std::size_t j = 0; j < q_->size(); ++j)
        if (i != j) field_[i] -= (*q_)(i, j);
  }

  double value() const noexcept { return value_; }

  void flip(const SpinVector& z, std::size_t i) {
    const double zi = z[i];
    value_ += -4.0 * zi * field_[i];
    for (std::size_t j = 0; j < q_->size(); ++j)
      if (j != i) field_[j] -= 2.0 * zi * (*q_)(j, i);
  }

  static double magnitude(const QuboProblem& problem) {
    double m = 0.0;
    for (double v : problem.matrix().values()) m += std::abs(v);
    return m;
  }

private:
  const SquareMatrix<double>* q_;
  std::vector<double> field_;
  double value_ = 0.0;
};

// Two Gray-code passes: the first finds the approximate minimum with the
// incremental tracker, the second hands every state within rounding
// tolerance of it to `on_candidate`, which re-evaluates exactly. Exact
// ties are therefore decided by the canonical evaluator, not by
// accumulated rounding.
template <class Tracker, class Source, class OnCandidate>
void scan_near_minima(std::size_t n, const Source& source, double magnitude,
                      OnCandidate&& on_candidate) {
  const double tolerance = 1e-7 * (1.0 + magnitude);
  double best = std::numeric_limits<double>::infinity();
  {
    Tracker tracker(source);
    gray_walk(
        n, [&](const SpinVector& z, std::size_t i) { tracker.flip(z, i); },
        [&](const SpinVector&) { best = std::min(best, tracker.value()); });
  }
  Tracker tracker(source);
  gray_walk(
      n, [&](const SpinVector& z, std::size_t i) { tracker.flip(z, i); },
      [&](const SpinVector& z) {
        if (tracker.value() <= best + tolerance) on_candidate(z);
      });
}

}  // namespace qals::detail
